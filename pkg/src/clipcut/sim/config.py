"""Simulator configuration: randomization ranges, event thresholds, failure
perturbation table, camera geometry. Everything JSON round-trippable so runs
are reproducible from a config file."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path


@dataclass
class FailurePerturbation:
    """Absolute placement of a tool for one injected failure mode (mm offsets)."""

    arm: str  # "left" | "right"
    offset: tuple[float, float, float]
    jaw: float
    anchor: str  # "next_clip_target" | "neck" | "tube_midpoint"


def default_failure_table() -> dict[str, FailurePerturbation]:
    return {
        # right tool pushed 8 mm past (deeper than) the left tube it was aiming at
        "overshoot_right_arm": FailurePerturbation("right", (0.0, 8.0, 0.0), 0.85, "next_clip_target"),
        # left jaw closed on nothing, offset from the neck
        "missed_grab": FailurePerturbation("left", (-5.0, 0.0, -4.0), 0.08, "neck"),
        "wrong_height": FailurePerturbation("right", (0.0, -5.0, 10.0), 0.85, "next_clip_target"),
        "between_tubes_misaligned": FailurePerturbation("right", (-6.0, -2.0, 0.0), 0.85, "tube_midpoint"),
    }


@dataclass
class SimConfig:
    fps: int = 30
    seed_salt: int = 0

    # rendered image sizes (w, h); desk-scale defaults, full-scale 960x540 / 640x480
    endoscope_size: tuple[int, int] = (240, 135)
    wrist_size: tuple[int, int] = (160, 120)
    # world-mm windows the views cover
    endoscope_window_mm: tuple[float, float] = (64.0, 36.0)
    wrist_window_mm: tuple[float, float] = (24.0, 18.0)

    # anatomy randomization
    tube_vertices: int = 12
    tube_radius_mm: float = 1.2
    inter_tube_gap_range: tuple[float, float] = (9.0, 13.0)
    tube_top_half_gap_mm: float = 2.2
    tube_top_z_mm: float = 20.0
    neck_rest: tuple[float, float, float] = (0.0, 0.0, 23.0)
    bow_amplitude_mm: float = 2.2

    # event thresholds
    capture_radius_factor: float = 1.5   # x tube_radius, for clip/cut capture
    grab_radius_mm: float = 3.0
    jaw_close_arm_level: float = 0.5
    jaw_close_fire_level: float = 0.2
    min_stretch_mm: float = 3.0
    damage_stretch_mm: float = 25.0

    # success-predicate bounds (arc distances along the tube, mm)
    proximal_spacing_mm: float = 4.0
    scissor_gap_mm: float = 6.0

    # deformation response
    relax_rate_per_s: float = 12.0
    neck_return_rate_per_s: float = 8.0

    failure_table: dict[str, FailurePerturbation] = field(default_factory=default_failure_table)

    @property
    def capture_radius_mm(self) -> float:
        return self.capture_radius_factor * self.tube_radius_mm

    @property
    def dt(self) -> float:
        return 1.0 / self.fps

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "SimConfig":
        raw = json.loads(text)
        table = {
            k: FailurePerturbation(v["arm"], tuple(v["offset"]), v["jaw"], v["anchor"])
            for k, v in raw.pop("failure_table", {}).items()
        }
        cfg = cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in raw.items()})
        if table:
            cfg.failure_table = table
        return cfg

    @classmethod
    def load(cls, path) -> "SimConfig":
        return cls.from_json(Path(path).read_text())
