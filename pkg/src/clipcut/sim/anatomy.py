"""Procedural two-tube anatomy: per-seed geometry, colors, and tube mechanics
parameters standing in for per-specimen variability."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SimConfig


@dataclass
class Tube:
    rest_points: np.ndarray   # (N, 3) rest polyline, base to top
    rest_lengths: np.ndarray  # (N-1,) segment rest lengths
    stiffness: float
    color: tuple[int, int, int]

    @property
    def total_rest_length(self) -> float:
        return float(self.rest_lengths.sum())


@dataclass
class AnatomyInstance:
    seed: int
    left_tube: Tube
    right_tube: Tube
    body_anchor: np.ndarray
    neck_rest: np.ndarray
    tube_radius: float
    inter_tube_gap: float
    body_color: tuple[int, int, int]
    background_color: tuple[int, int, int]
    blotches: list  # (center3, rx, ry, color) background texture patches

    def tube(self, name: str) -> Tube:
        return self.left_tube if name == "left" else self.right_tube


def _smooth_blend(s: np.ndarray) -> np.ndarray:
    return s * s * (3 - 2 * s)


def _tube_polyline(rng, cfg: SimConfig, base: np.ndarray, top: np.ndarray) -> np.ndarray:
    n = cfg.tube_vertices
    s = np.linspace(0.0, 1.0, n)
    pts = base[None, :] + _smooth_blend(s)[:, None] * (top - base)[None, :]
    bow_x = rng.uniform(-cfg.bow_amplitude_mm, cfg.bow_amplitude_mm)
    bow_y = rng.uniform(-1.0, 1.0)
    pts[:, 0] += bow_x * np.sin(np.pi * s)
    pts[:, 1] += bow_y * np.sin(np.pi * s)
    return pts


def _varied_color(rng, base: tuple[int, int, int], spread: float = 0.3) -> tuple[int, int, int]:
    mult = rng.uniform(1 - spread, 1 + spread, size=3)
    return tuple(int(np.clip(c * m, 25, 245)) for c, m in zip(base, mult))


def generate_anatomy(seed: int, cfg: SimConfig) -> AnatomyInstance:
    rng = np.random.default_rng(np.random.SeedSequence([seed, cfg.seed_salt, 0xA0A]))
    gap = rng.uniform(*cfg.inter_tube_gap_range)
    neck = np.array(cfg.neck_rest, dtype=np.float64)

    tubes = {}
    for name, side in (("left", -1.0), ("right", 1.0)):
        base = np.array([side * gap / 2 + rng.uniform(-0.6, 0.6),
                         rng.uniform(-0.5, 0.5), 0.0])
        top = np.array([side * cfg.tube_top_half_gap_mm + rng.uniform(-0.4, 0.4),
                        rng.uniform(-0.4, 0.4), cfg.tube_top_z_mm])
        pts = _tube_polyline(rng, cfg, base, top)
        rest_len = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        color = _varied_color(rng, (172, 74, 58) if name == "left" else (205, 150, 82))
        tubes[name] = Tube(pts, rest_len, stiffness=rng.uniform(0.7, 1.0), color=color)

    blotches = []
    for _ in range(rng.integers(4, 9)):
        center = np.array([rng.uniform(-30, 30), rng.uniform(-2, 2), rng.uniform(0, 34)])
        blotches.append((center, rng.uniform(2.5, 8.0), rng.uniform(2.0, 6.0),
                         _varied_color(rng, (95, 52, 48), 0.45)))

    return AnatomyInstance(
        seed=seed,
        left_tube=tubes["left"],
        right_tube=tubes["right"],
        body_anchor=np.zeros(3),
        neck_rest=neck,
        tube_radius=cfg.tube_radius_mm,
        inter_tube_gap=gap,
        body_color=_varied_color(rng, (128, 158, 96), 0.25),
        background_color=_varied_color(rng, (74, 46, 42), 0.25),
        blotches=blotches,
    )


def warped_rest_shape(tube: Tube, neck_rest: np.ndarray, neck: np.ndarray) -> np.ndarray:
    """Rest polyline deformed to follow the (possibly grabbed) neck point.

    Displacement fades toward the anchored base with a power profile so the
    base stays pinned while upper vertices track the neck.
    """
    disp = neck - neck_rest
    n = len(tube.rest_points)
    weight = (np.arange(n) / (n - 1)) ** 1.5
    return tube.rest_points + weight[:, None] * disp[None, :]
