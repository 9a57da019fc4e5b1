#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Basic per-dimension collective algorithms.

Each building block maps to exactly one algorithm:

==============  =================
Block           Algorithm
==============  =================
Ring            Ring
FC              Direct
Switch          HalvingDoubling
==============  =================

A *pattern* describes one dimension in isolation: ``k`` positions, a list of
steps, and in every step the sends ``(src_pos, dst_pos, bytes, blocks)``.
``blocks`` names the data blocks (positions in this dimension) the send
carries. Patterns are expanded onto real ranks by the planner.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Tuple

from ..topology import BlockKind
from ..units import Number, exact


class PlanError(ValueError):
    """Raised for invalid collective arguments."""


class CollectiveKind(str, Enum):
    REDUCE_SCATTER = "ReduceScatter"
    ALL_GATHER = "AllGather"
    ALL_REDUCE = "AllReduce"
    ALL_TO_ALL = "AllToAll"

    @classmethod
    def parse(cls, token) -> "CollectiveKind":
        if isinstance(token, CollectiveKind):
            return token
        key = str(token).strip().lower().replace("-", "").replace("_", "")
        key = key.replace(" ", "")
        try:
            return _KIND_ALIASES[key]
        except KeyError:
            raise PlanError(
                f"Unknown collective {token!r}; expected ReduceScatter, AllGather, "
                "AllReduce or AllToAll."
            ) from None

    @property
    def short(self) -> str:
        return _SHORT[self]


_KIND_ALIASES: Dict[str, CollectiveKind] = {
    "reducescatter": CollectiveKind.REDUCE_SCATTER,
    "rs": CollectiveKind.REDUCE_SCATTER,
    "allgather": CollectiveKind.ALL_GATHER,
    "ag": CollectiveKind.ALL_GATHER,
    "allreduce": CollectiveKind.ALL_REDUCE,
    "ar": CollectiveKind.ALL_REDUCE,
    "alltoall": CollectiveKind.ALL_TO_ALL,
    "a2a": CollectiveKind.ALL_TO_ALL,
}

_SHORT = {
    CollectiveKind.REDUCE_SCATTER: "RS",
    CollectiveKind.ALL_GATHER: "AG",
    CollectiveKind.ALL_REDUCE: "AR",
    CollectiveKind.ALL_TO_ALL: "A2A",
}


class Algorithm(str, Enum):
    RING = "Ring"
    DIRECT = "Direct"
    HALVING_DOUBLING = "HalvingDoubling"


ALGORITHMS: Dict[BlockKind, Algorithm] = {
    BlockKind.RING: Algorithm.RING,
    BlockKind.FULLY_CONNECTED: Algorithm.DIRECT,
    BlockKind.SWITCH: Algorithm.HALVING_DOUBLING,
}


@dataclass(frozen=True)
class PatternSend:
    src: int
    dst: int
    bytes: Fraction
    blocks: Tuple[int, ...]


Step = Tuple[PatternSend, ...]


def _check_k(k: int, algorithm: Algorithm) -> None:
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise PlanError(f"Group size must be an int >= 2, got {k!r}.")
    if algorithm is Algorithm.HALVING_DOUBLING and (k & (k - 1)) != 0:
        raise PlanError(f"HalvingDoubling needs a power-of-two group size, got {k}.")


def _ring(kind: CollectiveKind, k: int, d: Fraction) -> List[Step]:
    # RS: position p ends up owning block p; AG starts from it.
    shift = 1 if kind is CollectiveKind.REDUCE_SCATTER else 0
    return [
        tuple(
            PatternSend(p, (p + 1) % k, d / k, ((p - t - shift) % k,))
            for p in range(k)
        )
        for t in range(k - 1)
    ]


def _direct(kind: CollectiveKind, k: int, d: Fraction) -> List[Step]:
    rs = kind is CollectiveKind.REDUCE_SCATTER
    return [
        tuple(
            PatternSend(p, q, d / k, (q,) if rs else (p,))
            for p in range(k)
            for q in range(k)
            if q != p
        )
    ]


def _halving_doubling(kind: CollectiveKind, k: int, d: Fraction) -> List[Step]:
    levels = k.bit_length() - 1
    if kind is CollectiveKind.REDUCE_SCATTER:
        order = range(1, levels + 1)
    else:
        order = range(levels, 0, -1)
    steps: List[Step] = []
    for i in order:
        dist = 1 << (i - 1)
        mask = (1 << i) - 1
        sends = []
        for p in range(k):
            q = p ^ dist
            # RS sends the half the partner keeps; AG sends everything held so far
            ref = q if kind is CollectiveKind.REDUCE_SCATTER else p
            blocks = tuple(b for b in range(k) if (b ^ ref) & mask == 0)
            sends.append(PatternSend(p, q, d / (1 << i), blocks))
        steps.append(tuple(sends))
    return steps


def basic_phases(
    kind: CollectiveKind,
    block: BlockKind,
    k: int,
    entering_bytes: Number,
) -> List[Step]:
    """
    Per-step send pattern of one dimension.

    Parameters
    ----------
    kind : CollectiveKind
        ``ReduceScatter`` or ``AllGather``; the other kinds are composed by the
        planner.
    block : BlockKind
        Building block of the dimension; selects the algorithm.
    k : int
        Group size.
    entering_bytes : number
        Per-NPU data size entering this dimension. For AllGather this is the
        size after gathering, mirroring ReduceScatter.

    Returns
    -------
    list of tuple of PatternSend
        One tuple per step. Every algorithm moves ``entering_bytes * (k-1)/k``
        bytes per position in total.

    Raises
    ------
    PlanError
        ``k < 2``, non-power-of-two ``k`` for Switch, or an unsupported kind.
    """
    kind = CollectiveKind.parse(kind)
    if kind not in (CollectiveKind.REDUCE_SCATTER, CollectiveKind.ALL_GATHER):
        raise PlanError(
            f"basic_phases handles ReduceScatter and AllGather only, got {kind.value}."
        )
    algorithm = ALGORITHMS[BlockKind(block)]
    _check_k(k, algorithm)
    d = exact(entering_bytes)
    if d < 0:
        raise PlanError("entering_bytes must be non-negative.")
    if algorithm is Algorithm.RING:
        return _ring(kind, k, d)
    if algorithm is Algorithm.DIRECT:
        return _direct(kind, k, d)
    return _halving_doubling(kind, k, d)


def all_to_all_phases(k: int, entering_bytes: Number) -> List[Step]:
    """Direct personalized exchange: ``entering_bytes / k`` to every peer."""
    _check_k(k, Algorithm.DIRECT)
    d = exact(entering_bytes)
    return [
        tuple(
            PatternSend(p, q, d / k, (q,)) for p in range(k) for q in range(k) if q != p
        )
    ]
