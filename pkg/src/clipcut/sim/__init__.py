from .config import SimConfig, FailurePerturbation, default_failure_table
from .anatomy import AnatomyInstance, Tube, generate_anatomy
from .env import (CLIP_ARCS, CUT_ARC, Event, Observation, SimState,
                  closest_arc, endoscope_frame, episode_success, inject_failure,
                  next_clip_site, point_at_arc, reset, set_tool, step)
from .expert import (InfeasibleTaskError, check_feasible, plan_task, prepare_tool,
                     run_schedule, scripted_expert, scripted_recovery)

__all__ = [
    "SimConfig", "FailurePerturbation", "default_failure_table",
    "AnatomyInstance", "Tube", "generate_anatomy",
    "CLIP_ARCS", "CUT_ARC", "Event", "Observation", "SimState",
    "closest_arc", "endoscope_frame", "episode_success", "inject_failure",
    "next_clip_site", "point_at_arc", "reset", "set_tool", "step",
    "InfeasibleTaskError", "check_feasible", "plan_task", "prepare_tool",
    "run_schedule", "scripted_expert", "scripted_recovery",
]
