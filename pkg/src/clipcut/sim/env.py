"""Bimanual clip-and-cut environment: state, stepping, events, success report.

Tools are position-controlled (poses follow actions exactly); the tubes are
the only deformable elements. All tube landmarks (clips, cuts) are stored as
normalized rest-arc-length coordinates so they ride along with deformation.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from .. import vocab
from ..geometry import ActionVector, CameraFrame, Pose, apply_action
from .anatomy import AnatomyInstance, generate_anatomy, warped_rest_shape
from .config import SimConfig
from .render import render_observation

TOOLS = ("grasper", "clip_applier_loaded", "clip_applier_empty", "scissors")

CUT_DEDUP_MM = 2.5  # re-closing scissors this close to an existing cut is a no-op

LEFT_HOME = np.array([-20.0, -7.0, 25.0])
RIGHT_HOME = np.array([20.0, -7.0, 16.0])


@dataclass
class Event:
    kind: str              # clip_placed | cut_made | grab_acquired | grab_lost | tissue_damage
    tube: str | None = None
    arc: float | None = None  # normalized rest-arc position

    def to_dict(self) -> dict:
        return {"kind": self.kind, "tube": self.tube, "arc": self.arc}


@dataclass
class Observation:
    endoscope: np.ndarray
    wrist_left: np.ndarray
    wrist_right: np.ndarray
    t: float


@dataclass
class SimState:
    anatomy: AnatomyInstance
    arms: tuple[Pose, Pose]  # (left, right)
    tool_right: str
    placed_clips: list = field(default_factory=list)  # (tube, arc) in placement order
    cuts: list = field(default_factory=list)
    grabbed: bool = False
    stretch: float = 0.0
    t: float = 0.0
    damaged: bool = False
    # deformation state
    tube_points: dict = field(default_factory=dict)  # name -> (N, 3) current vertices
    neck: np.ndarray = field(default_factory=lambda: np.zeros(3))
    # close-crossing latches, armed when a jaw opens past the arm level
    jaw_armed: list = field(default_factory=lambda: [False, False])

    def copy(self) -> "SimState":
        new = copy.copy(self)
        new.placed_clips = list(self.placed_clips)
        new.cuts = list(self.cuts)
        new.arms = (self.arms[0].copy(), self.arms[1].copy())
        new.tube_points = {k: v.copy() for k, v in self.tube_points.items()}
        new.neck = self.neck.copy()
        new.jaw_armed = list(self.jaw_armed)
        return new

    def signature(self) -> tuple:
        """Hashable full-state fingerprint for replay/determinism checks."""
        return (
            self.anatomy.seed,
            tuple(np.round(self.arms[0].position, 12)), tuple(np.round(self.arms[1].position, 12)),
            round(self.arms[0].jaw, 12), round(self.arms[1].jaw, 12),
            self.tool_right, tuple(self.placed_clips), tuple(self.cuts),
            self.grabbed, round(self.stretch, 12), self.damaged,
            tuple(np.round(self.tube_points["left"].ravel(), 10)),
            tuple(np.round(self.tube_points["right"].ravel(), 10)),
        )


def endoscope_frame() -> CameraFrame:
    """Endoscope tip frame; axes aligned with world (x right, y deep, z up)."""
    return CameraFrame(np.array([0.0, -80.0, 20.0]), np.eye(3))


def reset(seed: int, cfg: SimConfig | None = None) -> tuple[SimState, Observation]:
    cfg = cfg or SimConfig()
    anatomy = generate_anatomy(seed, cfg)
    arms = (
        Pose(LEFT_HOME.copy(), np.eye(3), 0.8),
        Pose(RIGHT_HOME.copy(), np.eye(3), 0.8),
    )
    state = SimState(
        anatomy=anatomy,
        arms=arms,
        tool_right="clip_applier_loaded",
        neck=anatomy.neck_rest.copy(),
        tube_points={
            "left": anatomy.left_tube.rest_points.copy(),
            "right": anatomy.right_tube.rest_points.copy(),
        },
    )
    return state, render_observation(state, cfg)


def set_tool(state: SimState, tool: str) -> SimState:
    """Instant tool swap/reload, the stand-in for the assistant's manual step."""
    if tool not in TOOLS:
        raise ValueError(f"unknown tool {tool!r}")
    new = state.copy()
    new.tool_right = tool
    return new


def closest_arc(points: np.ndarray, rest_lengths: np.ndarray, p: np.ndarray) -> tuple[float, float]:
    """(distance, normalized rest-arc position) of the closest centerline point."""
    best_d, best_arc = np.inf, 0.0
    cum = np.concatenate([[0.0], np.cumsum(rest_lengths)])
    total = cum[-1]
    for i in range(len(points) - 1):
        seg = points[i + 1] - points[i]
        L2 = seg @ seg
        t = 0.0 if L2 == 0 else float(np.clip((p - points[i]) @ seg / L2, 0.0, 1.0))
        d = float(np.linalg.norm(p - (points[i] + t * seg)))
        if d < best_d:
            best_d = d
            best_arc = (cum[i] + t * rest_lengths[i]) / total
    return best_d, best_arc


def point_at_arc(state: SimState, tube: str, arc: float) -> np.ndarray:
    """World point on the current (deformed) tube at a normalized rest-arc position."""
    tube_def = state.anatomy.tube(tube)
    pts = state.tube_points[tube]
    cum = np.concatenate([[0.0], np.cumsum(tube_def.rest_lengths)])
    target = np.clip(arc, 0.0, 1.0) * cum[-1]
    i = int(np.searchsorted(cum, target, side="right") - 1)
    i = min(i, len(pts) - 2)
    frac = (target - cum[i]) / tube_def.rest_lengths[i]
    return pts[i] + frac * (pts[i + 1] - pts[i])


def _detect_close(prev_jaw: float, new_jaw: float, armed: bool, cfg: SimConfig) -> tuple[bool, bool]:
    """Latched close-crossing detector; returns (fired, new_armed)."""
    if new_jaw > cfg.jaw_close_arm_level:
        return False, True
    if armed and new_jaw < cfg.jaw_close_fire_level:
        return True, False
    return False, armed


def step(
    state: SimState, a: ActionVector, dt: float | None = None, cfg: SimConfig | None = None
) -> tuple[SimState, Observation, list[Event]]:
    cfg = cfg or SimConfig()
    dt = cfg.dt if dt is None else dt
    events: list[Event] = []
    new = state.copy()
    prev_jaws = (state.arms[0].jaw, state.arms[1].jaw)

    new.arms = apply_action(state.arms, a, endoscope_frame())
    new.t = state.t + dt

    left_fired, new.jaw_armed[0] = _detect_close(prev_jaws[0], new.arms[0].jaw, state.jaw_armed[0], cfg)
    right_fired, new.jaw_armed[1] = _detect_close(prev_jaws[1], new.arms[1].jaw, state.jaw_armed[1], cfg)

    # grab dynamics (left grasper on the gallbladder neck)
    if state.grabbed and new.arms[0].jaw > cfg.jaw_close_arm_level:
        new.grabbed = False
        events.append(Event("grab_lost"))
    if left_fired and not new.grabbed:
        if np.linalg.norm(new.arms[0].position - new.neck) <= cfg.grab_radius_mm:
            new.grabbed = True
            events.append(Event("grab_acquired"))

    # neck follows the gripper when grabbed, otherwise returns to rest
    if new.grabbed:
        new.neck = new.arms[0].position.copy()
    else:
        rate = 1.0 - np.exp(-cfg.neck_return_rate_per_s * dt)
        new.neck = new.neck + rate * (new.anatomy.neck_rest - new.neck)

    # tube vertices relax toward the neck-warped rest shape
    relax = 1.0 - np.exp(-cfg.relax_rate_per_s * dt)
    for name in ("left", "right"):
        tube = new.anatomy.tube(name)
        target = warped_rest_shape(tube, new.anatomy.neck_rest, new.neck)
        new.tube_points[name] = new.tube_points[name] + (relax * tube.stiffness) * (
            target - new.tube_points[name]
        )

    new.stretch = float(np.linalg.norm(new.neck - new.anatomy.neck_rest))
    if new.stretch > cfg.damage_stretch_mm:
        new.damaged = True
        events.append(Event("tissue_damage"))

    # right tool close-crossing -> clip or cut on the nearest in-range tube
    if right_fired and new.tool_right in ("clip_applier_loaded", "scissors"):
        tip = new.arms[1].position
        hits = []
        for name in ("left", "right"):
            tube = new.anatomy.tube(name)
            d, arc = closest_arc(new.tube_points[name], tube.rest_lengths, tip)
            hits.append((d, name, arc))
        d, name, arc = min(hits)
        if d <= cfg.capture_radius_mm:
            if new.tool_right == "clip_applier_loaded":
                new.placed_clips.append((name, float(arc)))
                new.tool_right = "clip_applier_empty"
                events.append(Event("clip_placed", name, float(arc)))
            else:
                total = new.anatomy.tube(name).total_rest_length
                # closing on an already-severed spot cuts nothing
                if not any(t == name and abs(c - arc) * total < CUT_DEDUP_MM
                           for t, c in new.cuts):
                    new.cuts.append((name, float(arc)))
                    events.append(Event("cut_made", name, float(arc)))

    return new, render_observation(new, cfg), events


def inject_failure(state: SimState, mode: str, cfg: SimConfig | None = None) -> SimState:
    """Deterministically place a tool into one of the tabled failure states."""
    cfg = cfg or SimConfig()
    if mode not in cfg.failure_table:
        raise ValueError(f"unknown failure mode {mode!r}")
    pert = cfg.failure_table[mode]
    new = state.copy()

    if pert.anchor == "neck":
        anchor = new.anatomy.neck_rest.copy()
        new.grabbed = False
        new.neck = new.anatomy.neck_rest.copy()
    elif pert.anchor == "tube_midpoint":
        anchor = 0.5 * (point_at_arc(new, "left", 0.45) + point_at_arc(new, "right", 0.45))
    else:  # next_clip_target
        tube, arc = next_clip_site(new, cfg)
        anchor = point_at_arc(new, tube, arc)

    idx = 0 if pert.arm == "left" else 1
    pose = new.arms[idx]
    moved = Pose(anchor + np.array(pert.offset), pose.orientation.copy(), pert.jaw)
    new.arms = (moved, new.arms[1].copy()) if idx == 0 else (new.arms[0].copy(), moved)
    new.jaw_armed[idx] = pert.jaw > cfg.jaw_close_arm_level
    return new


# canonical clip sites along each tube, normalized rest-arc positions:
# two proximal clips near the base, the third distal, cut in between;
# spread sized so the 2->3 gap clears scissor_gap_mm on the shortest tubes
CLIP_ARCS = (0.24, 0.35, 0.68)
CUT_ARC = 0.515


def next_clip_site(state: SimState, cfg: SimConfig) -> tuple[str, float]:
    """Tube and arc of the next clip in canonical order (left tube first)."""
    for tube in ("left", "right"):
        n = sum(1 for t, _ in state.placed_clips if t == tube)
        if n < 3:
            return tube, CLIP_ARCS[n]
    return "right", CLIP_ARCS[2]


def _tube_report(state: SimState, tube: str, cfg: SimConfig) -> dict:
    total = state.anatomy.tube(tube).total_rest_length
    arcs = sorted(arc * total for t, arc in state.placed_clips if t == tube)
    cuts = [arc * total for t, arc in state.cuts if t == tube]
    report = {
        "clip_count": len(arcs),
        "cut_count": len(cuts),
        "proximal_ok": False,
        "gap_ok": False,
        "cut_between_ok": False,
    }
    if len(arcs) >= 3:
        report["proximal_ok"] = (arcs[1] - arcs[0]) <= cfg.proximal_spacing_mm
        report["gap_ok"] = (arcs[2] - arcs[1]) >= cfg.scissor_gap_mm
        if len(cuts) == 1:
            report["cut_between_ok"] = arcs[1] < cuts[0] < arcs[2]
    return report


def episode_success(state: SimState, cfg: SimConfig | None = None) -> tuple[bool, dict]:
    """Overall success plus a per-task completion report (17 entries)."""
    cfg = cfg or SimConfig()
    tube_ok = {}
    reports = {}
    for tube in ("left", "right"):
        rep = _tube_report(state, tube, cfg)
        reports[tube] = rep
        tube_ok[tube] = (
            rep["clip_count"] == 3 and rep["cut_count"] == 1
            and rep["proximal_ok"] and rep["gap_ok"] and rep["cut_between_ok"]
        )
    success = tube_ok["left"] and tube_ok["right"] and not state.damaged

    clip_counts = {t: sum(1 for tt, _ in state.placed_clips if tt == t) for t in ("left", "right")}
    cut_counts = {t: sum(1 for tt, _ in state.cuts if tt == t) for t in ("left", "right")}

    def tool_clear_of(tube: str) -> bool:
        d, _ = closest_arc(state.tube_points[tube],
                           state.anatomy.tube(tube).rest_lengths, state.arms[1].position)
        return d > 6.0

    per_task = {}
    for tid in range(vocab.NUM_TASKS):
        text = vocab.task_text(tid)
        if tid == vocab.GRAB_TASK:
            done = state.grabbed and state.stretch >= cfg.min_stretch_mm
        else:
            tube = "left" if "left tube" in text else "right"
            if tid in vocab.CLIP_TASKS:
                k = 1 + vocab.CLIP_TASKS.index(tid) % 3
                done = clip_counts[tube] >= k
            elif tid in vocab.CUT_TASKS:
                done = cut_counts[tube] >= 1
            else:  # go-back: prerequisite done and the procedure moved on or tool pulled clear
                prereq = vocab.task_text(tid - 1)
                if "clip" in prereq:
                    k = 1 + vocab.CLIP_TASKS.index(tid - 1) % 3
                    pre_done = clip_counts[tube] >= k
                    later = (clip_counts[tube] > k or cut_counts[tube] > 0
                             or (tube == "left" and (clip_counts["right"] > 0 or cut_counts["right"] > 0)))
                else:
                    pre_done = cut_counts[tube] >= 1
                    later = tube == "left" and cut_counts["right"] > 0
                done = pre_done and (later or tool_clear_of(tube))
        per_task[tid] = bool(done)

    report = {
        "per_task": per_task,
        "tasks_done": sum(per_task.values()),
        "tubes": reports,
        "damaged": state.damaged,
        "grabbed": state.grabbed,
        "stretch": state.stretch,
    }
    return success, report
