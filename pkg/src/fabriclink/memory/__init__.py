#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

from .memory import (
    REMOTE_MODELS,
    LocalMemSpec,
    MemoryModelError,
    MemoryPoolSpec,
    TierLoads,
    in_switch_collective_time,
    link_loads,
    local_access_time,
    pipeline_chunks,
    pipeline_time,
    pool_access_time,
    remote_access_time,
    stage_times,
    zero_infinity_access_time,
)
from .replay import replay_pool_transfer, replay_stage_pipeline

__all__ = [
    "REMOTE_MODELS",
    "LocalMemSpec",
    "MemoryModelError",
    "MemoryPoolSpec",
    "TierLoads",
    "in_switch_collective_time",
    "link_loads",
    "local_access_time",
    "pipeline_chunks",
    "pipeline_time",
    "pool_access_time",
    "remote_access_time",
    "stage_times",
    "zero_infinity_access_time",
    "replay_pool_transfer",
    "replay_stage_pipeline",
]
