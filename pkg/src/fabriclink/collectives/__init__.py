#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

from .algorithms import (
    ALGORITHMS,
    Algorithm,
    CollectiveKind,
    PatternSend,
    PlanError,
    all_to_all_phases,
    basic_phases,
)
from .planner import (
    DEFAULT_CHUNKS,
    CollectivePlan,
    Phase,
    Send,
    StagePattern,
    per_dim_traffic,
    plan_collective,
    plan_to_dict,
    write_plan,
)
from .verify import ChunkLabelState, Verdict, verify_plan

__all__ = [
    "ALGORITHMS",
    "Algorithm",
    "CollectiveKind",
    "PatternSend",
    "PlanError",
    "all_to_all_phases",
    "basic_phases",
    "DEFAULT_CHUNKS",
    "CollectivePlan",
    "Phase",
    "Send",
    "StagePattern",
    "per_dim_traffic",
    "plan_collective",
    "plan_to_dict",
    "write_plan",
    "ChunkLabelState",
    "Verdict",
    "verify_plan",
]
