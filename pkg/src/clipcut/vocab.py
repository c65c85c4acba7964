"""Canonical instruction vocabularies and automatic corrective labeling.

Task instructions follow the procedure's temporal order: grab, then for each
tube three clip/retract pairs, then a cut/retract pair per tube. Corrective
instructions are cardinal gripper and translation commands.

The corrective labeler maps a short look-ahead action chunk to the single
instruction that best describes its dominant motion, or to no label when no
motion stands out. Rule, in order:

1. Net jaw change per arm = last jaw target - first jaw target over the chunk.
   If |change| >= jaw threshold on both arms in the same direction -> the
   matching "both grippers" label; on both arms in opposite directions -> the
   arm with the larger |change| wins (exact tie -> right arm); on one arm ->
   that arm's label. Closing is a negative change.
2. Otherwise net translation per arm = sum of camera-frame dt over the chunk.
   An arm fires when its largest |axis component| >= translation threshold AND
   >= dominance_ratio * its second-largest |axis component|. Both arms firing
   -> larger winning magnitude (exact tie -> right arm).
3. Otherwise no label.

Axis phrases assume the camera frame x right, y into the scene, z up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ActionVector

LABEL_CHUNK_LEN = 10

TASKS: tuple[str, ...] = (
    "grabbing gallbladder",
    "clipping first clip left tube",
    "going back from first clip left tube",
    "clipping second clip left tube",
    "going back from second clip left tube",
    "clipping third clip left tube",
    "going back from third clip left tube",
    "clipping first clip right tube",
    "going back from first clip right tube",
    "clipping second clip right tube",
    "going back from second clip right tube",
    "clipping third clip right tube",
    "going back from third clip right tube",
    "cutting left tube",
    "going back from cutting left tube",
    "cutting right tube",
    "going back from cutting right tube",
)

CORRECTIVES: tuple[str, ...] = (
    "close left gripper",
    "close right gripper",
    "open left gripper",
    "open right gripper",
    "move left arm to the left",
    "move left arm to the right",
    "move left arm towards me",
    "move left arm away from me",
    "move left arm higher",
    "move left arm lower",
    "move right arm to the left",
    "move right arm to the right",
    "move right arm towards me",
    "move right arm away from me",
    "move right arm higher",
    "move right arm lower",
    "close both grippers",
    "open both grippers",
)

NUM_TASKS = len(TASKS)
NUM_CORRECTIVES = len(CORRECTIVES)

GRAB_TASK = 0
CLIP_TASKS = (1, 3, 5, 7, 9, 11)
CUT_TASKS = (13, 15)
GOBACK_TASKS = (2, 4, 6, 8, 10, 12, 14, 16)

_TASK_INDEX = {t: i for i, t in enumerate(TASKS)}
_CORR_INDEX = {t: i for i, t in enumerate(CORRECTIVES)}

# direction phrase per camera axis, for positive / negative net motion
_AXIS_PHRASES = (("to the right", "to the left"),
                 ("away from me", "towards me"),
                 ("higher", "lower"))

VOCAB_VERSION = "1"


class UnknownInstructionError(KeyError):
    pass


def task_text(i: int) -> str:
    if not 0 <= i < NUM_TASKS:
        raise UnknownInstructionError(f"task id {i} out of range")
    return TASKS[i]


def task_index(text: str) -> int:
    try:
        return _TASK_INDEX[text]
    except KeyError:
        raise UnknownInstructionError(f"unknown task instruction: {text!r}") from None


def corrective_text(i: int) -> str:
    if not 0 <= i < NUM_CORRECTIVES:
        raise UnknownInstructionError(f"corrective id {i} out of range")
    return CORRECTIVES[i]


def corrective_index(text: str) -> int:
    try:
        return _CORR_INDEX[text]
    except KeyError:
        raise UnknownInstructionError(f"unknown corrective instruction: {text!r}") from None


def task_group(i: int) -> str:
    """Coarse phase group used by the correction histograms."""
    if i == GRAB_TASK:
        return "grab"
    if i in CLIP_TASKS:
        return "clip"
    if i in CUT_TASKS:
        return "cut"
    return "go back"


def required_right_tool(i: int) -> str | None:
    """Right-arm tool a task needs, or None when any tool state is fine."""
    if i in CLIP_TASKS:
        return "clip_applier_loaded"
    if i in CUT_TASKS:
        return "scissors"
    return None


def task_tube(i: int) -> str | None:
    """Which tube a task acts on; None for the grab task."""
    if i == GRAB_TASK:
        return None
    return "left" if "left tube" in TASKS[i] else "right"


@dataclass(frozen=True)
class LabelThresholds:
    jaw_change: float = 0.5
    translation_mm: float = 3.0
    dominance_ratio: float = 1.5


def _gripper_label(arm: str, change: float) -> str:
    verb = "open" if change > 0 else "close"
    return f"{verb} {arm} gripper" if arm != "both" else f"{verb} both grippers"


def generate_corrective_label(
    chunk: list[ActionVector], thresholds: LabelThresholds = LabelThresholds()
) -> str | None:
    """Label a 10-action chunk with its dominant-motion instruction, or None."""
    if len(chunk) != LABEL_CHUNK_LEN:
        raise ValueError(f"label chunk must have length {LABEL_CHUNK_LEN}, got {len(chunk)}")

    arms = [[a.left for a in chunk], [a.right for a in chunk]]
    jaw_change = [arm[-1].jaw_target - arm[0].jaw_target for arm in arms]
    exceeds = [abs(c) >= thresholds.jaw_change for c in jaw_change]

    if exceeds[0] and exceeds[1]:
        if np.sign(jaw_change[0]) == np.sign(jaw_change[1]):
            return _gripper_label("both", jaw_change[0])
        winner = 0 if abs(jaw_change[0]) > abs(jaw_change[1]) else 1
        return _gripper_label(("left", "right")[winner], jaw_change[winner])
    if exceeds[0]:
        return _gripper_label("left", jaw_change[0])
    if exceeds[1]:
        return _gripper_label("right", jaw_change[1])

    best = None  # (magnitude, arm_idx, axis, signed value)
    for arm_idx, arm in enumerate(arms):
        net = np.sum([d.dt for d in arm], axis=0)
        mags = np.abs(net)
        order = np.argsort(mags)
        top, runner = mags[order[2]], mags[order[1]]
        if top < thresholds.translation_mm or top < thresholds.dominance_ratio * runner:
            continue
        # right arm wins exact-magnitude ties, so >= when scanning left->right
        if best is None or top > best[0] or (top == best[0] and arm_idx == 1):
            best = (top, arm_idx, int(order[2]), net[order[2]])
    if best is None:
        return None
    _, arm_idx, axis, value = best
    phrase = _AXIS_PHRASES[axis][0 if value > 0 else 1]
    return f"move {('left', 'right')[arm_idx]} arm {phrase}"


def manifest() -> str:
    """Versioned plain-text export shared verbatim with UI clients."""
    lines = [f"# clipcut-vocab v{VOCAB_VERSION}", "# section: tasks"]
    lines += [f"{i}\t{t}" for i, t in enumerate(TASKS)]
    lines.append("# section: correctives")
    lines += [f"{i}\t{t}" for i, t in enumerate(CORRECTIVES)]
    return "\n".join(lines) + "\n"


def parse_manifest(text: str) -> dict:
    """Inverse of manifest(); returns {"version", "tasks", "correctives"}."""
    version, section = None, None
    out: dict = {"tasks": [], "correctives": []}
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("clipcut-vocab v"):
                version = body[len("clipcut-vocab v"):]
            elif body.startswith("section:"):
                section = body.split(":", 1)[1].strip()
            continue
        ident, text_part = line.split("\t", 1)
        if section not in out:
            raise ValueError(f"entry outside a known section: {line!r}")
        if int(ident) != len(out[section]):
            raise ValueError(f"non-contiguous id in manifest: {line!r}")
        out[section].append(text_part)
    if version is None:
        raise ValueError("manifest missing version header")
    out["version"] = version
    return out
