"""Scripted demonstrator: waypoint plans per task, optional waypoint noise,
and recovery variants that start from a perturbed tool state and return to
the nominal path one axis at a time (so look-ahead labels come out clean).
"""

from __future__ import annotations

import numpy as np

from .. import vocab
from ..geometry import ActionVector, Pose, encode_action
from .config import SimConfig
from .env import (CLIP_ARCS, CUT_ARC, LEFT_HOME, RIGHT_HOME, SimState,
                  endoscope_frame, point_at_arc, set_tool, step)

TRANSLATE_SPEED = 0.5   # mm per step
JAW_RATE = 0.12         # jaw fraction per step
APPROACH_STANDOFF = 7.0  # mm in front of (toward the viewer from) a target
CONTACT_OFFSET = 0.35   # mm short of the centerline at close time

OPEN = 0.85
CLOSED = 0.04
RELEASED = 0.7


class InfeasibleTaskError(ValueError):
    """Task preconditions (ordering, tool, grasp) not met by the state."""


def _clip_count(state: SimState, tube: str) -> int:
    return sum(1 for t, _ in state.placed_clips if t == tube)


def _cut_count(state: SimState, tube: str) -> int:
    return sum(1 for t, _ in state.cuts if t == tube)


def check_feasible(state: SimState, task: int) -> None:
    text = vocab.task_text(task)
    tube = vocab.task_tube(task)
    if task == vocab.GRAB_TASK:
        if state.grabbed:
            raise InfeasibleTaskError("gallbladder already grabbed")
        return
    if not state.grabbed:
        raise InfeasibleTaskError(f"{text!r} requires the gallbladder to be grabbed")
    if task in vocab.CLIP_TASKS:
        k = vocab.CLIP_TASKS.index(task) % 3  # clips already expected on this tube
        if state.tool_right != "clip_applier_loaded":
            raise InfeasibleTaskError(f"{text!r} needs a loaded clip applier, have {state.tool_right}")
        if _clip_count(state, tube) != k:
            raise InfeasibleTaskError(
                f"{text!r} expects {k} clips on the {tube} tube, found {_clip_count(state, tube)}")
    elif task in vocab.CUT_TASKS:
        if state.tool_right != "scissors":
            raise InfeasibleTaskError(f"{text!r} needs scissors, have {state.tool_right}")
        if _clip_count(state, tube) < 3:
            raise InfeasibleTaskError(f"{text!r} before the {tube} tube is fully clipped")
        if _cut_count(state, tube) > 0:
            raise InfeasibleTaskError(f"{tube} tube already cut")
    else:  # go-back tasks
        prereq = task - 1
        if prereq in vocab.CLIP_TASKS:
            k = 1 + vocab.CLIP_TASKS.index(prereq) % 3
            if _clip_count(state, tube) < k:
                raise InfeasibleTaskError(f"{text!r} before its clip was placed")
        elif _cut_count(state, tube) < 1:
            raise InfeasibleTaskError(f"{text!r} before the cut was made")


def _interp(start_pos, start_jaw, waypoints) -> list[tuple[np.ndarray, float]]:
    """Per-step (position, jaw) targets along waypoint legs.

    Each waypoint is (pos, jaw) or (pos, jaw, dwell_steps); leg duration is
    set by the slower of translation and jaw motion.
    """
    targets = []
    pos, jaw = np.asarray(start_pos, float), float(start_jaw)
    for wp in waypoints:
        wp_pos, wp_jaw = np.asarray(wp[0], float), float(wp[1])
        dwell = wp[2] if len(wp) > 2 else 0
        dist = float(np.linalg.norm(wp_pos - pos))
        steps = max(int(np.ceil(dist / TRANSLATE_SPEED)),
                    int(np.ceil(abs(wp_jaw - jaw) / JAW_RATE)), 1)
        for i in range(1, steps + 1):
            f = i / steps
            targets.append((pos + f * (wp_pos - pos), jaw + f * (wp_jaw - jaw)))
        for _ in range(dwell):
            targets.append((wp_pos.copy(), wp_jaw))
        pos, jaw = wp_pos, wp_jaw
    return targets


def _to_actions(state: SimState, arm: int, targets) -> list[ActionVector]:
    """Encode per-step single-arm targets into bimanual actions (other arm holds)."""
    cam = endoscope_frame()
    current = [state.arms[0].copy(), state.arms[1].copy()]
    actions = []
    for pos, jaw in targets:
        nxt = [current[0].copy(), current[1].copy()]
        nxt[arm] = Pose(np.asarray(pos, float), current[arm].orientation.copy(),
                        float(np.clip(jaw, 0.0, 1.0)))
        actions.append(encode_action(tuple(current), tuple(nxt), cam))
        current = nxt
    return actions


def _jitter(rng, noise: float, cap: float | None = None) -> np.ndarray:
    if rng is None or noise <= 0:
        return np.zeros(3)
    v = rng.normal(0.0, noise, size=3)
    if cap is not None:
        n = np.linalg.norm(v)
        if n > cap:
            v *= cap / n
    return v


def _task_site(state: SimState, task: int) -> np.ndarray:
    tube = vocab.task_tube(task)
    if task in vocab.CLIP_TASKS:
        arc = CLIP_ARCS[vocab.CLIP_TASKS.index(task) % 3]
    else:
        arc = CUT_ARC
    return point_at_arc(state, tube, arc)


def _approach_waypoints(state: SimState, task: int, noise: float, rng) -> list:
    """Align / approach / close / release legs for a clip or cut task."""
    site = _task_site(state, task)
    align = site + np.array([0.0, -APPROACH_STANDOFF, 0.0]) + _jitter(rng, noise)
    contact = site + np.array([0.0, -CONTACT_OFFSET, 0.0]) + _jitter(rng, noise * 0.15, cap=0.3)
    return [
        (align, OPEN),
        (contact, OPEN),
        (contact, CLOSED, 4),
        (contact, RELEASED),
    ]


def plan_task(state: SimState, task: int, noise: float = 0.0, rng=None) -> tuple[int, list]:
    """(acting arm index, waypoints) for one task from the given state."""
    check_feasible(state, task)
    if task == vocab.GRAB_TASK:
        neck = state.neck
        align = neck + np.array([0.0, -APPROACH_STANDOFF, 0.0]) + _jitter(rng, noise)
        contact = neck + np.array([0.0, -0.3, 0.0]) + _jitter(rng, noise * 0.15, cap=0.3)
        pull = neck + np.array([-1.0, 0.0, 4.2])
        return 0, [(align, OPEN), (contact, OPEN), (contact, CLOSED, 2), (pull, CLOSED, 2)]
    if task in vocab.CLIP_TASKS or task in vocab.CUT_TASKS:
        return 1, _approach_waypoints(state, task, noise, rng)
    # go-back: retract straight out front, then to the staging pose
    tip = state.arms[1].position
    out = tip + np.array([0.0, -APPROACH_STANDOFF, 0.0])
    return 1, [(out, RELEASED), (RIGHT_HOME + _jitter(rng, noise), RELEASED)]


def scripted_expert(state: SimState, task: int, noise: float = 0.0, rng=None) -> list[ActionVector]:
    """Action sequence completing the task from the state; exact when noise=0."""
    arm, waypoints = plan_task(state, task, noise, rng)
    targets = _interp(state.arms[arm].position, state.arms[arm].jaw, waypoints)
    return _to_actions(state, arm, targets)


def _axis_legs(frm: np.ndarray, to: np.ndarray, jaw: float) -> list:
    """Decompose a return into z, x, y legs so each gets a single-axis label."""
    legs = []
    cur = frm.astype(float).copy()
    for axis in (2, 0, 1):
        if abs(to[axis] - cur[axis]) > 0.05:
            cur = cur.copy()
            cur[axis] = to[axis]
            legs.append((cur.copy(), jaw))
    if not legs:
        legs.append((to.copy(), jaw))
    return legs


def scripted_recovery(
    state: SimState, task: int, rng
) -> tuple[SimState, list[ActionVector]]:
    """Perturbed start plus an expert sequence that recovers and completes.

    The acting tool is displaced (or wrongly closed, for the grab task) the
    way rollout failures look; the demonstration then returns axis-by-axis
    to the nominal approach and finishes the task.
    """
    check_feasible(state, task)
    start = state.copy()
    if task == vocab.GRAB_TASK:
        bad = state.neck + np.array([rng.uniform(-8, -4), 0.0, rng.uniform(-7, -3)])
        start.arms = (Pose(bad, start.arms[0].orientation.copy(), CLOSED), start.arms[1].copy())
        start.jaw_armed[0] = False
        arm, nominal = plan_task(start, task)
        first = nominal[0]
        legs = [(bad, OPEN)] + _axis_legs(bad, first[0], OPEN) + list(nominal[1:])
    else:
        site = _task_site(state, task)
        mode = rng.integers(0, 3)
        if mode == 0:    # overshot past the tube
            off = np.array([0.0, rng.uniform(5, 9), 0.0])
        elif mode == 1:  # wrong height
            off = np.array([0.0, rng.uniform(-6, -3), rng.uniform(6, 12)])
        else:            # lateral misalignment
            off = np.array([rng.uniform(4, 8) * rng.choice([-1.0, 1.0]),
                            rng.uniform(-6, -3), 0.0])
        bad = site + off
        start.arms = (start.arms[0].copy(), Pose(bad, start.arms[1].orientation.copy(), OPEN))
        arm, nominal = plan_task(start, task)
        align = nominal[0][0] if task not in vocab.GOBACK_TASKS else bad + np.array([0.0, -APPROACH_STANDOFF, 0.0])
        legs = _axis_legs(bad, align, OPEN) + list(nominal[1:] if task not in vocab.GOBACK_TASKS else nominal)
    targets = _interp(start.arms[arm].position, start.arms[arm].jaw, legs)
    return start, _to_actions(start, arm, targets)


def prepare_tool(state: SimState, task: int) -> SimState:
    """Reload/swap the right tool the way the pause-resume transition would."""
    need = vocab.required_right_tool(task)
    if need is not None and state.tool_right != need:
        return set_tool(state, need)
    return state


def run_schedule(
    state: SimState,
    tasks=range(vocab.NUM_TASKS),
    noise: float = 0.0,
    rng=None,
    cfg: SimConfig | None = None,
    on_frame=None,
):
    """Run tasks in order with automatic tool management.

    Yields (task_id, frames) per task, where each frame is
    (obs, pose_pair, action, events). on_frame(obs) is an optional hook.
    """
    cfg = cfg or SimConfig()
    for task in tasks:
        state = prepare_tool(state, task)
        actions = scripted_expert(state, task, noise, rng)
        frames = []
        for a in actions:
            prev = state
            state, obs, events = step(state, a, cfg=cfg)
            frames.append((obs, (prev.arms[0], prev.arms[1]), a, events))
            if on_frame:
                on_frame(obs)
        yield task, frames, state
