#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Event-driven chunk replay of a linear transfer pipeline.

Independent of the closed form in :mod:`fabriclink.memory.memory`: chunks
move through the stages one event at a time, each stage handling one chunk
at a time in order. Used as the brute-force oracle for the pooled models.
"""

from __future__ import annotations

from typing import List, Sequence

from ..network import EventCore
from .memory import (
    MemoryModelError,
    MemoryPoolSpec,
    pipeline_chunks,
    stage_times,
)


def replay_stage_pipeline(chunks: int, stages: Sequence[int]) -> int:
    """
    Simulate ``chunks`` chunks through ``stages`` (per-chunk ns) and return the
    time the last chunk leaves the last stage.
    """
    if chunks < 1:
        raise MemoryModelError("a pipeline needs at least one chunk")
    stages = [int(s) for s in stages]
    core = EventCore()
    nstage = len(stages)
    done: List[List[bool]] = [[False] * chunks for _ in range(nstage)]
    busy = [False] * nstage
    next_chunk = [0] * nstage

    def try_start(s: int) -> None:
        c = next_chunk[s]
        if busy[s] or c >= chunks:
            return
        if s > 0 and not done[s - 1][c]:
            return
        busy[s] = True
        next_chunk[s] = c + 1
        core.schedule(stages[s], lambda: finish(s, c))

    def finish(s: int, c: int) -> None:
        done[s][c] = True
        busy[s] = False
        try_start(s)
        if s + 1 < nstage:
            try_start(s + 1)

    core.schedule(0, lambda: try_start(0))
    return core.run()


def replay_pool_transfer(
    tensor_bytes_per_gpu,
    pool: MemoryPoolSpec,
    in_switch: bool = False,
    direction="load",
) -> int:
    """Replay counterpart of the closed-form pooled transfer times."""
    stages = stage_times(pool, in_switch=in_switch)
    if direction == "store":
        stages = stages[::-1]
    return replay_stage_pipeline(pipeline_chunks(tensor_bytes_per_gpu, pool), stages)
