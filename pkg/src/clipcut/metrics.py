"""Trajectory smoothness and classification metrics for the evaluation harness."""

from __future__ import annotations

import numpy as np


def traj_length(trace: np.ndarray) -> float:
    """Sum of consecutive Euclidean distances over an (N, 3) position trace, mm."""
    trace = np.asarray(trace, dtype=np.float64)
    if trace.ndim != 2 or trace.shape[1] != 3:
        raise ValueError(f"trace must be (N, 3), got {trace.shape}")
    if len(trace) < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(trace, axis=0), axis=1)))


def mean_jerk(trace: np.ndarray, dt: float) -> float:
    """Mean magnitude of the third time-derivative of position, mm/s^3.

    Uses the third-order backward difference (p_i - 3 p_{i-1} + 3 p_{i-2}
    - p_{i-3}) / dt^3; the three leading samples carry no estimate and are
    dropped. Requires a uniformly sampled trace of at least 4 points.
    """
    trace = np.asarray(trace, dtype=np.float64)
    if trace.ndim != 2 or trace.shape[1] != 3:
        raise ValueError(f"trace must be (N, 3), got {trace.shape}")
    if len(trace) < 4:
        raise ValueError("mean_jerk needs at least 4 samples")
    if dt <= 0:
        raise ValueError("dt must be positive")
    d3 = trace[3:] - 3 * trace[2:-1] + 3 * trace[1:-2] - trace[:-3]
    jerk = d3 / dt**3
    return float(np.mean(np.linalg.norm(jerk, axis=1)))


def mean_jerk_scaled(trace: np.ndarray, dt: float) -> float:
    """mean_jerk expressed in 1e-2 mm/s^3 units (the reporting convention)."""
    return mean_jerk(trace, dt) * 100.0


def mean_of(values) -> float:
    """Plain arithmetic mean used for every aggregate in reports."""
    values = list(values)
    if not values:
        raise ValueError("mean of empty sequence")
    return float(sum(values) / len(values))


def confusion_matrix(y_true, y_pred, num_classes: int) -> np.ndarray:
    cm = np.zeros((num_classes, num_classes), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        cm[int(t), int(p)] += 1
    return cm


def accuracy(y_true, y_pred) -> float:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if len(y_true) == 0:
        raise ValueError("empty label arrays")
    return float(np.mean(y_true == y_pred))


def macro_f1(y_true, y_pred, num_classes: int) -> float:
    """Macro-averaged F1 over all classes; absent classes contribute 0."""
    cm = confusion_matrix(y_true, y_pred, num_classes)
    f1s = []
    for c in range(num_classes):
        tp = cm[c, c]
        fp = cm[:, c].sum() - tp
        fn = cm[c, :].sum() - tp
        if tp == 0 and fp == 0 and fn == 0:
            continue  # class absent from both truth and predictions
        denom = 2 * tp + fp + fn
        f1s.append(0.0 if denom == 0 else 2 * tp / denom)
    return float(np.mean(f1s)) if f1s else 0.0
