#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Hierarchical (multi-rail) collective plans.

A collective spanning several dimensions runs the basic algorithm of each
dimension in turn: Reduce-Scatter ascends the scoped dimensions, All-Gather
descends them, All-Reduce is Reduce-Scatter followed by All-Gather, and
All-to-All runs a direct exchange per scoped dimension in ascending order with
the per-NPU size unchanged across dimensions.

Plans keep the per-dimension patterns (``stages``) and expand them onto real
ranks on demand (``phases``). Byte counts are exact ``Fraction`` values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..topology import TopologySpec
from ..units import Number, exact, render_exact
from .algorithms import (
    ALGORITHMS,
    Algorithm,
    CollectiveKind,
    PatternSend,
    PlanError,
    all_to_all_phases,
    basic_phases,
)

DEFAULT_CHUNKS = 64


@dataclass(frozen=True)
class StagePattern:
    """
    One dimension of a plan in position space.

    ``op`` is ``ReduceScatter``, ``AllGather`` or ``AllToAll``; ``scope_pos``
    is the 0-based position of ``dim_index`` inside the plan's scope.
    """

    op: CollectiveKind
    dim_index: int
    scope_pos: int
    algorithm: Algorithm
    k: int
    entering_bytes: Fraction
    steps: Tuple[Tuple[PatternSend, ...], ...]
    _by_src: Tuple[Dict[int, Tuple[PatternSend, ...]], ...] = field(
        init=False, repr=False, compare=False
    )
    _by_dst: Tuple[Dict[int, Tuple[PatternSend, ...]], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        by_src, by_dst = [], []
        for step in self.steps:
            s: Dict[int, list] = {}
            r: Dict[int, list] = {}
            for ps in step:
                s.setdefault(ps.src, []).append(ps)
                r.setdefault(ps.dst, []).append(ps)
            by_src.append({p: tuple(v) for p, v in s.items()})
            by_dst.append({p: tuple(v) for p, v in r.items()})
        object.__setattr__(self, "_by_src", tuple(by_src))
        object.__setattr__(self, "_by_dst", tuple(by_dst))

    @property
    def num_steps(self) -> int:
        return len(self.steps)

    def sends_from(self, step: int, pos: int) -> Tuple[PatternSend, ...]:
        return self._by_src[step].get(pos, ())

    def recvs_to(self, step: int, pos: int) -> Tuple[PatternSend, ...]:
        return self._by_dst[step].get(pos, ())

    def bytes_per_position(self) -> Fraction:
        return sum((ps.bytes for step in self.steps for ps in step if ps.src == 0),
                   Fraction(0))


@dataclass(frozen=True)
class Send:
    src: int
    dst: int
    bytes: Fraction
    blocks: Tuple[int, ...] = ()


@dataclass(frozen=True)
class Phase:
    dim_index: int
    step: int
    sends: Tuple[Send, ...]
    algorithm: Algorithm
    op: CollectiveKind
    scope_pos: int = 0


@dataclass(frozen=True)
class CollectivePlan:
    """
    Phase schedule for one collective over every group of its scope.

    Attributes
    ----------
    kind : CollectiveKind
    scope_dims : tuple of int
        Spanned dimensions, ascending.
    initial_bytes_per_npu : Fraction
    chunk_count : int
        Pipelining chunks; each send splits into ``chunk_count`` equal pieces.
    stages : tuple of StagePattern
        Per-dimension patterns in execution order.
    topology : TopologySpec
    """

    kind: CollectiveKind
    scope_dims: Tuple[int, ...]
    initial_bytes_per_npu: Fraction
    chunk_count: int
    stages: Tuple[StagePattern, ...]
    topology: TopologySpec = field(repr=False, compare=False)

    @cached_property
    def phases(self) -> Tuple[Phase, ...]:
        """Stages expanded onto real ranks, in execution order."""
        out = []
        for stage in self.stages:
            groups = self.topology.all_dim_groups(stage.dim_index).tolist()
            for t, step in enumerate(stage.steps):
                sends = tuple(
                    Send(g[ps.src], g[ps.dst], ps.bytes, ps.blocks)
                    for g in groups
                    for ps in step
                )
                out.append(
                    Phase(
                        stage.dim_index,
                        t + 1,
                        sends,
                        stage.algorithm,
                        stage.op,
                        stage.scope_pos,
                    )
                )
        return tuple(out)

    def chunk_bytes(self, nbytes: Fraction) -> Fraction:
        return nbytes / self.chunk_count

    def traffic_per_dim(self) -> List[Fraction]:
        """Bytes one NPU sends in each dimension (all NPUs are symmetric)."""
        traffic = [Fraction(0)] * self.topology.ndims
        for stage in self.stages:
            traffic[stage.dim_index - 1] += stage.bytes_per_position()
        return traffic

    def describe(self) -> str:
        lines = [
            f"{self.kind.value} {float(self.initial_bytes_per_npu):.0f} B on "
            f"{self.topology.text} scope {list(self.scope_dims)} "
            f"chunks {self.chunk_count}"
        ]
        for stage in self.stages:
            lines.append(
                f"  {stage.op.short:<3} dim {stage.dim_index} "
                f"{stage.algorithm.value:<15} k={stage.k:<4} steps={stage.num_steps}"
            )
        return "\n".join(lines)


def _check_bytes(nbytes: Number) -> Fraction:
    d = exact(nbytes)
    if d <= 0:
        raise PlanError(f"Collective size must be positive, got {nbytes}.")
    return d


def _scope(spec: TopologySpec, scope_dims: Optional[Sequence[int]]) -> Tuple[int, ...]:
    if scope_dims is None:
        return tuple(range(1, spec.ndims + 1))
    if len(scope_dims) == 0:
        raise PlanError("Collective scope is empty.")
    return spec.check_scope(scope_dims)


def _entering(
    d: Fraction, spec: TopologySpec, scope: Sequence[int], j: int
) -> Fraction:
    return d / math.prod(spec.dims[s - 1].size for s in scope[:j])


@lru_cache(maxsize=256)
def _stage(op: CollectiveKind, block, k: int, entering: Fraction, dim: int, pos: int):
    if op is CollectiveKind.ALL_TO_ALL:
        steps = all_to_all_phases(k, entering)
        algorithm = Algorithm.DIRECT
    else:
        steps = basic_phases(op, block, k, entering)
        algorithm = ALGORITHMS[block]
    return StagePattern(op, dim, pos, algorithm, k, entering, tuple(steps))


def plan_collective(
    kind: CollectiveKind,
    bytes_per_npu: Number,
    spec: TopologySpec,
    scope_dims: Optional[Sequence[int]] = None,
    chunk_count: int = DEFAULT_CHUNKS,
) -> CollectivePlan:
    """
    Build the hierarchical phase schedule of a collective.

    Parameters
    ----------
    kind : CollectiveKind
    bytes_per_npu : number
        Per-NPU payload. For All-Gather this is the gathered (output) size.
    spec : TopologySpec
    scope_dims : sequence of int, optional
        Dimensions spanned; all dimensions when omitted.
    chunk_count : int, default: 64
        Pipelining chunks.

    Returns
    -------
    CollectivePlan

    Raises
    ------
    PlanError
        Non-positive size, empty scope or ``chunk_count < 1``.
    """
    kind = CollectiveKind.parse(kind)
    bad_count = isinstance(chunk_count, bool) or not isinstance(chunk_count, int)
    if bad_count or chunk_count < 1:
        raise PlanError(f"chunk_count must be an int >= 1, got {chunk_count!r}.")
    d = _check_bytes(bytes_per_npu)
    scope = _scope(spec, scope_dims)

    def stage(op, j):
        dim = spec.dims[scope[j] - 1]
        if op is CollectiveKind.ALL_TO_ALL:
            entering = d
        else:
            entering = _entering(d, spec, scope, j)
        return _stage(op, dim.kind, dim.size, entering, scope[j], j)

    rs = [stage(CollectiveKind.REDUCE_SCATTER, j) for j in range(len(scope))]
    ag = [stage(CollectiveKind.ALL_GATHER, j) for j in reversed(range(len(scope)))]
    if kind is CollectiveKind.REDUCE_SCATTER:
        stages = rs
    elif kind is CollectiveKind.ALL_GATHER:
        stages = ag
    elif kind is CollectiveKind.ALL_REDUCE:
        stages = rs + ag
    else:
        stages = [stage(CollectiveKind.ALL_TO_ALL, j) for j in range(len(scope))]
    return CollectivePlan(kind, scope, d, chunk_count, tuple(stages), spec)


def per_dim_traffic(
    kind: CollectiveKind,
    total_bytes_per_npu: Number,
    spec: TopologySpec,
    scope_dims: Optional[Sequence[int]] = None,
) -> List[Fraction]:
    """
    Closed-form bytes one NPU sends in every dimension.

    Dimension ``i`` of the scope carries ``f * S_i * (k_i - 1) / k_i`` where
    ``S_i`` is the shard entering it (the total divided by the sizes of the
    lower scoped dimensions) and ``f`` is 2 for All-Reduce and 1 for
    Reduce-Scatter and All-Gather. All-to-All keeps ``S_i`` equal to the total.
    Unscoped dimensions carry zero.
    """
    kind = CollectiveKind.parse(kind)
    d = _check_bytes(total_bytes_per_npu)
    scope = _scope(spec, scope_dims)
    factor = 2 if kind is CollectiveKind.ALL_REDUCE else 1
    traffic = [Fraction(0)] * spec.ndims
    for j, dim_index in enumerate(scope):
        k = spec.dims[dim_index - 1].size
        if kind is CollectiveKind.ALL_TO_ALL:
            s = d
        else:
            s = _entering(d, spec, scope, j)
        traffic[dim_index - 1] = factor * s * (k - 1) / k
    return traffic


def plan_to_dict(plan: CollectivePlan) -> dict:
    return {
        "kind": plan.kind.value,
        "topology": plan.topology.text,
        "scope_dims": list(plan.scope_dims),
        "initial_bytes_per_npu": render_exact(plan.initial_bytes_per_npu),
        "chunk_count": plan.chunk_count,
        "phases": [
            {
                "op": ph.op.value,
                "dim_index": ph.dim_index,
                "step": ph.step,
                "algorithm": ph.algorithm.value,
                "sends": [[s.src, s.dst, render_exact(s.bytes)] for s in ph.sends],
            }
            for ph in plan.phases
        ],
    }


def write_plan(plan: CollectivePlan, path: Union[str, Path]) -> Path:
    """Dump the expanded plan as JSON for debugging."""
    path = Path(path)
    path.write_text(
        json.dumps(plan_to_dict(plan), indent=1, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return path
