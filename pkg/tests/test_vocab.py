import numpy as np
import pytest

from clipcut import vocab
from clipcut.geometry import ActionVector, ArmDelta

EYE6 = np.array([1.0, 0, 0, 0, 1, 0])


def chunk_from(dts_left=None, dts_right=None, jaws_left=None, jaws_right=None):
    """Build a 10-action chunk from optional per-step translation/jaw sequences."""
    n = vocab.LABEL_CHUNK_LEN
    dts_left = dts_left if dts_left is not None else [np.zeros(3)] * n
    dts_right = dts_right if dts_right is not None else [np.zeros(3)] * n
    jaws_left = jaws_left if jaws_left is not None else [0.5] * n
    jaws_right = jaws_right if jaws_right is not None else [0.5] * n
    return [
        ActionVector(
            ArmDelta(np.asarray(dl, float), EYE6.copy(), jl),
            ArmDelta(np.asarray(dr, float), EYE6.copy(), jr),
        )
        for dl, dr, jl, jr in zip(dts_left, dts_right, jaws_left, jaws_right)
    ]


def oracle_label(chunk, th=vocab.LabelThresholds()):
    """Brute-force re-statement of the labeling rule, kept independent of the
    implementation: enumerate every candidate label and apply the stated
    priorities explicitly."""
    jaw = {}
    for arm in ("left", "right"):
        seq = [getattr(a, arm).jaw_target for a in chunk]
        jaw[arm] = seq[-1] - seq[0]
    fired = {arm: abs(v) >= th.jaw_change for arm, v in jaw.items()}
    if fired["left"] or fired["right"]:
        if fired["left"] and fired["right"]:
            if (jaw["left"] > 0) == (jaw["right"] > 0):
                return ("open" if jaw["left"] > 0 else "close") + " both grippers"
            arm = "right" if abs(jaw["right"]) >= abs(jaw["left"]) else "left"
        else:
            arm = "left" if fired["left"] else "right"
        return ("open" if jaw[arm] > 0 else "close") + f" {arm} gripper"

    candidates = []  # (magnitude, preference, label) -- preference breaks exact ties
    for arm, pref in (("left", 0), ("right", 1)):
        net = np.zeros(3)
        for a in chunk:
            net += getattr(a, arm).dt
        mags = sorted(enumerate(np.abs(net)), key=lambda kv: kv[1])
        (axis, top), (_, runner) = mags[2], mags[1]
        if top >= th.translation_mm and top >= th.dominance_ratio * runner:
            direction = {
                0: "to the right" if net[axis] > 0 else "to the left",
                1: "away from me" if net[axis] > 0 else "towards me",
                2: "higher" if net[axis] > 0 else "lower",
            }[axis]
            candidates.append((top, pref, f"move {arm} arm {direction}"))
    if not candidates:
        return None
    return max(candidates, key=lambda c: (c[0], c[1]))[2]


class TestVocabularies:
    def test_task_count_and_anchors(self):
        assert len(vocab.TASKS) == 17
        assert vocab.task_index("grabbing gallbladder") == 0
        assert vocab.task_text(3) == "clipping second clip left tube"
        assert vocab.task_text(12) == "going back from third clip right tube"

    def test_corrective_count_and_last_entry(self):
        assert len(vocab.CORRECTIVES) == 18
        assert vocab.corrective_text(17) == "open both grippers"

    def test_bijections_round_trip(self):
        for i in range(vocab.NUM_TASKS):
            assert vocab.task_index(vocab.task_text(i)) == i
        for i in range(vocab.NUM_CORRECTIVES):
            assert vocab.corrective_index(vocab.corrective_text(i)) == i

    def test_unknown_text_raises(self):
        with pytest.raises(vocab.UnknownInstructionError):
            vocab.task_index("clip the duct")
        with pytest.raises(vocab.UnknownInstructionError):
            vocab.corrective_index("wiggle")

    def test_task_groups_partition(self):
        groups = [vocab.task_group(i) for i in range(17)]
        assert groups.count("grab") == 1
        assert groups.count("clip") == 6
        assert groups.count("cut") == 2
        assert groups.count("go back") == 8


class TestCorrectiveLabel:
    def test_right_arm_dominant_x(self):
        chunk = chunk_from(dts_right=[np.array([0.6, 0, 0])] * 10)
        assert vocab.generate_corrective_label(chunk) == "move right arm to the right"

    def test_all_zero_chunk(self):
        assert vocab.generate_corrective_label(chunk_from()) is None

    def test_both_jaws_close(self):
        jaws = list(np.linspace(1.0, 0.0, 10))
        chunk = chunk_from(jaws_left=jaws, jaws_right=jaws,
                           dts_left=[np.array([1.0, 0, 0])] * 10)
        assert vocab.generate_corrective_label(chunk) == "close both grippers"

    def test_gripper_priority_over_translation(self):
        chunk = chunk_from(
            dts_right=[np.array([2.0, 0, 0])] * 10,
            jaws_left=list(np.linspace(0.0, 0.9, 10)),
        )
        assert vocab.generate_corrective_label(chunk) == "open left gripper"

    def test_opposite_jaw_tie_right_wins(self):
        chunk = chunk_from(jaws_left=list(np.linspace(0, 0.8, 10)),
                           jaws_right=list(np.linspace(0.8, 0, 10)))
        assert vocab.generate_corrective_label(chunk) == "close right gripper"

    def test_translation_tie_right_wins(self):
        dl = [np.array([0, 0, 0.5])] * 10
        dr = [np.array([0, 0, 0.5])] * 10
        assert vocab.generate_corrective_label(chunk_from(dts_left=dl, dts_right=dr)) \
            == "move right arm higher"

    def test_dominance_ratio_blocks_ambiguous_axis(self):
        # 5 mm on x vs 4 mm on z: 5 < 1.5 * 4, no label
        dts = [np.array([0.5, 0, 0.4])] * 10
        assert vocab.generate_corrective_label(chunk_from(dts_right=dts)) is None

    def test_below_translation_threshold(self):
        dts = [np.array([0.2, 0, 0])] * 10
        assert vocab.generate_corrective_label(chunk_from(dts_right=dts)) is None

    def test_axis_phrases(self):
        cases = [
            (np.array([-0.6, 0, 0]), "move left arm to the left"),
            (np.array([0, 0.6, 0]), "move left arm away from me"),
            (np.array([0, -0.6, 0]), "move left arm towards me"),
            (np.array([0, 0, -0.6]), "move left arm lower"),
        ]
        for step, expected in cases:
            assert vocab.generate_corrective_label(chunk_from(dts_left=[step] * 10)) == expected

    def test_wrong_chunk_length(self):
        with pytest.raises(ValueError):
            vocab.generate_corrective_label(chunk_from()[:7])

    def test_scale_invariance_above_threshold(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            dts = [rng.normal(scale=1.0, size=3) for _ in range(10)]
            base = chunk_from(dts_right=dts)
            label = vocab.generate_corrective_label(base)
            if label is None:
                continue
            scaled = chunk_from(dts_right=[3.7 * d for d in dts])
            assert vocab.generate_corrective_label(scaled) == label


def random_chunk(rng):
    """Random chunk hitting jaw, translation, tie, and sub-threshold regimes."""
    scale = rng.choice([0.05, 0.3, 1.0])
    dts_l = [rng.normal(scale=scale, size=3) for _ in range(10)]
    dts_r = [rng.normal(scale=scale, size=3) for _ in range(10)]
    if rng.random() < 0.25:  # force exact cross-arm ties now and then
        dts_r = [d.copy() for d in dts_l]
    jl = np.clip(np.linspace(rng.uniform(0, 1), rng.uniform(0, 1), 10)
                 + rng.normal(scale=0.02, size=10), 0, 1)
    jr = np.clip(np.linspace(rng.uniform(0, 1), rng.uniform(0, 1), 10)
                 + rng.normal(scale=0.02, size=10), 0, 1)
    if rng.random() < 0.3:
        jl = np.full(10, 0.5)
    if rng.random() < 0.3:
        jr = jl.copy()
    return chunk_from(dts_l, dts_r, list(jl), list(jr))


class TestOracleAgreement:
    def test_1000_random_chunks(self):
        rng = np.random.default_rng(12)
        labelled = 0
        for _ in range(1000):
            chunk = random_chunk(rng)
            got = vocab.generate_corrective_label(chunk)
            assert got == oracle_label(chunk)
            labelled += got is not None
        assert labelled > 100  # the sweep must actually exercise labelled cases


class TestManifest:
    def test_round_trip(self):
        parsed = vocab.parse_manifest(vocab.manifest())
        assert parsed["version"] == vocab.VOCAB_VERSION
        assert tuple(parsed["tasks"]) == vocab.TASKS
        assert tuple(parsed["correctives"]) == vocab.CORRECTIVES

    def test_entry_format(self):
        lines = [l for l in vocab.manifest().splitlines() if l and not l.startswith("#")]
        assert len(lines) == 35
        assert all("\t" in l for l in lines)
        assert lines[0] == "0\tgrabbing gallbladder"
