#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Label-replay oracle for collective plans.

Every NPU holds a set of labelled shards. A label is the shard id (a tuple of
scoped coordinates; for All-to-All the destination coordinates followed by the
source coordinates) mapped to the set of ranks whose contributions it already
includes. Replaying a plan moves, merges and copies labels exactly as the
phases prescribe, then the final holdings are checked against the meaning of
the collective.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from ..topology import TopologySpec
from .algorithms import CollectiveKind
from .planner import CollectivePlan, Phase

ShardId = Tuple[int, ...]


@dataclass(frozen=True)
class Verdict:
    passed: bool
    kind: CollectiveKind
    first_violation: Optional[int] = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.passed


class _Violation(Exception):
    def __init__(self, rank: int, message: str):
        super().__init__(message)
        self.rank = rank
        self.message = message


class ChunkLabelState:
    """
    Per-NPU shard labels for one plan.

    Parameters
    ----------
    spec : TopologySpec
    kind : CollectiveKind
    scope_dims : sequence of int
    """

    def __init__(
        self, spec: TopologySpec, kind: CollectiveKind, scope_dims: Sequence[int]
    ):
        self.spec = spec
        self.kind = CollectiveKind.parse(kind)
        self.scope = spec.check_scope(scope_dims)
        self.radix = tuple(spec.dims[d - 1].size for d in self.scope)
        self.shard_count = math.prod(self.radix)
        self.holdings: List[Dict[ShardId, FrozenSet[int]]] = []
        for rank in range(spec.npu_count):
            own = spec.scoped_coords(rank, self.scope)
            me = frozenset({rank})
            if self.kind is CollectiveKind.ALL_GATHER:
                held = {own: me}
            elif self.kind is CollectiveKind.ALL_TO_ALL:
                held = {dest + own: me for dest in self._all_ids()}
            else:
                held = {s: me for s in self._all_ids()}
            self.holdings.append(held)

    def _all_ids(self):
        return itertools.product(*(range(k) for k in self.radix))

    def coords(self, rank: int) -> ShardId:
        return self.spec.scoped_coords(rank, self.scope)

    def expected_keys(
        self, phase: Phase, src: int, blocks: Sequence[int]
    ) -> List[ShardId]:
        """Shard ids the sender of ``blocks`` must hold in ``phase``."""
        j = phase.scope_pos
        own = self.coords(src)
        m = len(self.radix)
        choices = []
        for i in range(m):
            if i < j:
                choices.append((own[i],))
            elif i == j:
                choices.append(tuple(blocks))
            else:
                choices.append(range(self.radix[i]))
        if phase.op is CollectiveKind.ALL_TO_ALL:
            for i in range(m):
                choices.append(range(self.radix[i]) if i < j else (own[i],))
        return [tuple(c) for c in itertools.product(*choices)]

    def apply(self, phase: Phase, unit: Fraction) -> None:
        """Replay one phase; all sends read the state from before the phase."""
        moves = []
        for send in phase.sends:
            held = self.holdings[send.src]
            keys = self.expected_keys(phase, send.src, send.blocks)
            for key in keys:
                if key not in held:
                    raise _Violation(
                        send.src,
                        f"NPU {send.src} must send shard {key} to {send.dst} in "
                        f"{phase.op.value} dim {phase.dim_index} step {phase.step} "
                        "but does not hold it",
                    )
            if send.bytes != unit * len(keys):
                raise _Violation(
                    send.src,
                    f"NPU {send.src} sends {send.bytes} bytes for {len(keys)} shards "
                    f"of {unit} bytes in dim {phase.dim_index} step {phase.step}",
                )
            moves.append((send, {key: held[key] for key in keys}))

        keep = phase.op is CollectiveKind.ALL_GATHER
        for send, payload in moves:
            if not keep:
                for key in payload:
                    self.holdings[send.src].pop(key, None)
        for send, payload in moves:
            dst = self.holdings[send.dst]
            for key, contrib in payload.items():
                dst[key] = dst.get(key, frozenset()) | contrib

    def check_final(self) -> None:
        for rank, held in enumerate(self.holdings):
            group = frozenset(self.spec.scope_group(rank, self.scope))
            own = self.coords(rank)
            if self.kind is CollectiveKind.REDUCE_SCATTER:
                want = {own: group}
            elif self.kind is CollectiveKind.ALL_REDUCE:
                want = {s: group for s in self._all_ids()}
            elif self.kind is CollectiveKind.ALL_GATHER:
                want = {s: frozenset({self._owner(rank, s)}) for s in self._all_ids()}
            else:
                want = {
                    own + src: frozenset({self._owner(rank, src)})
                    for src in self._all_ids()
                }
            if held != want:
                missing = sorted(set(want) - set(held))
                extra = sorted(set(held) - set(want))
                partial = sorted(k for k in want if k in held and held[k] != want[k])
                raise _Violation(
                    rank,
                    f"NPU {rank} final state wrong for {self.kind.value}: "
                    f"missing {missing[:4]}, unexpected {extra[:4]}, "
                    f"incomplete {partial[:4]}",
                )

    def _owner(self, rank: int, scoped: ShardId) -> int:
        coords = list(self.spec.rank_to_coords(rank))
        for d, c in zip(self.scope, scoped):
            coords[d - 1] = c
        return self.spec.coords_to_rank(coords)


def verify_plan(plan: CollectivePlan, spec: Optional[TopologySpec] = None) -> Verdict:
    """
    Replay ``plan`` on labelled shards and check the collective's meaning.

    Returns
    -------
    Verdict
        ``passed`` plus the first violating NPU and a message on failure.
    """
    spec = spec if spec is not None else plan.topology
    state = ChunkLabelState(spec, plan.kind, plan.scope_dims)
    unit = plan.initial_bytes_per_npu / state.shard_count
    try:
        for phase in plan.phases:
            state.apply(phase, unit)
        state.check_final()
    except _Violation as err:
        return Verdict(False, plan.kind, err.rank, err.message)
    return Verdict(True, plan.kind)
