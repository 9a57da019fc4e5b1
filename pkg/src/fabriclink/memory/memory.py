#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Closed-form memory timing models.

- **Local memory**: ``access_latency + bytes / bandwidth``.
- **Hierarchical disaggregated pool**: remote memory groups feed out-node
  switches, which feed the in-node switches of every node, which feed the
  GPUs. A transfer is split into chunks that flow through the three tiers as
  a linear pipeline:

  ``total = t_rem2outsw + t_outsw2insw + t_insw2gpu + (N - 1) * max(t_*)``

  with ``N = ceil(W * GPUs / groups / out_switches / chunk)`` (at least 1).
  Stage times are rounded up to the nanosecond before they are combined, so
  the closed form equals an event-driven chunk replay exactly.
- **In-switch collectives**: parameters are gathered inside the switches on
  loads (All-Gather) and reduced on stores (Reduce-Scatter); the switch
  stages lose their node and GPU divisors.
- **ZeRO-Infinity-style baseline**: each GPU reads its own remote group over
  a private channel with no switch tiers.

Stores traverse the tiers in reverse with identical timing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

from ..collectives import CollectiveKind
from ..units import NS_PER_S, Number, ceil_ns, exact


class MemoryModelError(ValueError):
    """Raised for invalid memory specs or arguments."""


REMOTE_MODELS = ("hiermem", "zero-infinity")


@dataclass(frozen=True)
class LocalMemSpec:
    """
    Parameters
    ----------
    access_latency : Fraction
        Seconds.
    bandwidth : Fraction
        Bytes/s.
    """

    access_latency: Fraction
    bandwidth: Fraction

    def __post_init__(self):
        object.__setattr__(self, "access_latency", exact(self.access_latency))
        object.__setattr__(self, "bandwidth", exact(self.bandwidth))
        if self.bandwidth <= 0:
            raise MemoryModelError("local memory bandwidth must be positive")
        if self.access_latency < 0:
            raise MemoryModelError("local memory access latency must be non-negative")


@dataclass(frozen=True)
class MemoryPoolSpec:
    """
    Hierarchical disaggregated memory pool.

    Bandwidths are bytes/s, ``chunk_size`` is bytes, ``latency`` is seconds
    (only used by the ``zero-infinity`` model).
    """

    num_nodes: int
    gpus_per_node: int
    num_out_switches: int
    num_remote_groups: int
    chunk_size: Fraction
    in_node_fabric_bw: Fraction
    gpu_side_out_fabric_bw: Fraction
    mem_side_out_fabric_bw: Fraction
    remote_group_bw: Fraction
    remote_model: str = "hiermem"
    latency: Fraction = Fraction(0)

    def __post_init__(self):
        for name in (
            "num_nodes", "gpus_per_node", "num_out_switches", "num_remote_groups"
        ):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise MemoryModelError(f"{name} must be an int >= 1, got {v!r}")
        for name in (
            "chunk_size",
            "in_node_fabric_bw",
            "gpu_side_out_fabric_bw",
            "mem_side_out_fabric_bw",
            "remote_group_bw",
        ):
            v = exact(getattr(self, name))
            if v <= 0:
                raise MemoryModelError(f"{name} must be positive, got {v}")
            object.__setattr__(self, name, v)
        lat = exact(self.latency)
        if lat < 0:
            raise MemoryModelError("pool latency must be non-negative")
        object.__setattr__(self, "latency", lat)
        if self.remote_model not in REMOTE_MODELS:
            raise MemoryModelError(
                f"remote_model must be one of {REMOTE_MODELS}, "
                f"got {self.remote_model!r}"
            )

    @property
    def total_gpus(self) -> int:
        return self.num_nodes * self.gpus_per_node


@dataclass(frozen=True)
class TierLoads:
    """Bytes crossing each tier for one transfer, in the units of ``W``."""

    per_remote_group: Fraction
    rem_to_outsw_link: Fraction
    per_out_switch: Fraction
    outsw_to_node_link: Fraction
    per_in_node_switch: Fraction


def _direction(direction: str) -> str:
    d = str(direction).lower()
    if d not in ("load", "store"):
        raise MemoryModelError(
            f"direction must be 'load' or 'store', got {direction!r}"
        )
    return d


def _seconds_to_ns(x: Fraction) -> int:
    return ceil_ns(x * NS_PER_S)


# -------------- local --------------


def local_access_time(tensor_bytes: Number, mem: LocalMemSpec) -> int:
    """``access_latency + tensor_bytes / bandwidth`` in integer ns."""
    b = exact(tensor_bytes)
    if b < 0:
        raise MemoryModelError("tensor size must be non-negative")
    return _seconds_to_ns(mem.access_latency + b / mem.bandwidth)


# -------------- pooled --------------


def pipeline_chunks(tensor_bytes_per_gpu: Number, pool: MemoryPoolSpec) -> int:
    """Number of pipeline chunks per remote group and out-node switch."""
    w = exact(tensor_bytes_per_gpu)
    n = w * pool.total_gpus / pool.num_remote_groups / pool.num_out_switches
    return max(1, math.ceil(n / pool.chunk_size))


def stage_times(pool: MemoryPoolSpec, in_switch: bool = False) -> Tuple[int, int, int]:
    """
    Per-chunk time of the three tiers, ns, in load order.

    Returns
    -------
    tuple of int
        ``(rem->outSW, outSW->inSW, inSW->GPU)``.
    """
    c = pool.chunk_size
    groups = pool.num_remote_groups
    t1 = c / pool.mem_side_out_fabric_bw
    if in_switch:
        t2 = groups * c / pool.gpu_side_out_fabric_bw
        t3 = groups * pool.num_out_switches * c / pool.in_node_fabric_bw
    else:
        t2 = groups * c / (pool.num_nodes * pool.gpu_side_out_fabric_bw)
        t3 = (
            groups
            * pool.num_out_switches
            * c
            / (pool.total_gpus * pool.in_node_fabric_bw)
        )
    return _seconds_to_ns(t1), _seconds_to_ns(t2), _seconds_to_ns(t3)


def pipeline_time(chunks: int, stages: Sequence[int]) -> int:
    """Linear pipeline critical path: fill plus ``(chunks - 1)`` bottleneck slots."""
    if chunks < 1:
        raise MemoryModelError("a pipeline needs at least one chunk")
    return sum(stages) + (chunks - 1) * max(stages)


def remote_access_time(
    tensor_bytes_per_gpu: Number, pool: MemoryPoolSpec, direction: str = "load"
) -> int:
    """
    Time for every GPU to load (or store) ``tensor_bytes_per_gpu`` through the
    hierarchical pool.

    Parameters
    ----------
    tensor_bytes_per_gpu : number
        ``W``, bytes per GPU (``> 0``).
    pool : MemoryPoolSpec
    direction : {"load", "store"}
        Stores mirror loads.

    Returns
    -------
    int
        Nanoseconds.
    """
    _direction(direction)
    if exact(tensor_bytes_per_gpu) <= 0:
        raise MemoryModelError("remote tensor size must be positive")
    n = pipeline_chunks(tensor_bytes_per_gpu, pool)
    stages = stage_times(pool, in_switch=False)
    if direction == "store":
        stages = stages[::-1]
    return pipeline_time(n, stages)


def in_switch_collective_time(
    tensor_bytes_per_gpu: Number, pool: MemoryPoolSpec, kind="AllGather"
) -> int:
    """
    Remote transfer with the collective performed inside the switches.

    ``AllGather`` applies to loads, ``ReduceScatter`` to stores (reverse
    traversal). Same pipeline skeleton as :func:`remote_access_time`.
    """
    kind = CollectiveKind.parse(kind)
    if kind not in (CollectiveKind.ALL_GATHER, CollectiveKind.REDUCE_SCATTER):
        raise MemoryModelError(
            f"in-switch collectives are AllGather or ReduceScatter, got {kind.value}"
        )
    if exact(tensor_bytes_per_gpu) <= 0:
        raise MemoryModelError("remote tensor size must be positive")
    n = pipeline_chunks(tensor_bytes_per_gpu, pool)
    stages = stage_times(pool, in_switch=True)
    if kind is CollectiveKind.REDUCE_SCATTER:
        stages = stages[::-1]
    return pipeline_time(n, stages)


def zero_infinity_access_time(
    tensor_bytes_per_gpu: Number, group_bw: Number, latency: Number = 0
) -> int:
    """Private per-GPU channel: ``latency + bytes / group_bw``."""
    b = exact(tensor_bytes_per_gpu)
    bw = exact(group_bw)
    if b < 0:
        raise MemoryModelError("tensor size must be non-negative")
    if bw <= 0:
        raise MemoryModelError("group bandwidth must be positive")
    return _seconds_to_ns(exact(latency) + b / bw)


def pool_access_time(
    tensor_bytes_per_gpu: Number,
    pool: MemoryPoolSpec,
    direction: str = "load",
    in_switch: bool = False,
) -> int:
    """Dispatch on ``pool.remote_model`` and the in-switch flag."""
    direction = _direction(direction)
    if pool.remote_model == "zero-infinity":
        if in_switch:
            raise MemoryModelError("in-switch collectives need the hiermem pool model")
        return zero_infinity_access_time(
            tensor_bytes_per_gpu, pool.remote_group_bw, pool.latency
        )
    if exact(tensor_bytes_per_gpu) == 0:
        return 0
    if in_switch:
        kind = "AllGather" if direction == "load" else "ReduceScatter"
        return in_switch_collective_time(tensor_bytes_per_gpu, pool, kind)
    return remote_access_time(tensor_bytes_per_gpu, pool, direction)


def link_loads(
    pool: MemoryPoolSpec, tensor_bytes_per_gpu: Number = 1, in_switch: bool = False
) -> TierLoads:
    """
    Bytes per tier element when every GPU loads ``W`` bytes.

    Pass ``W = 1`` to read the loads as multiples of ``W``.

    Plain loads divide the total ``W * GPUs`` evenly: each remote group serves
    ``W * GPUs / groups``, split over the out-node switches; each node receives
    ``W * gpus_per_node``. With in-switch All-Gather every out-node switch
    forwards its whole aggregate to every node, so each in-node switch receives
    the reconstructed ``W * GPUs``.
    """
    w = exact(tensor_bytes_per_gpu)
    total = w * pool.total_gpus
    per_group = total / pool.num_remote_groups
    rem_link = per_group / pool.num_out_switches
    per_outsw = total / pool.num_out_switches
    if in_switch:
        outsw_node = per_outsw
        per_insw = total
    else:
        outsw_node = total / (pool.num_out_switches * pool.num_nodes)
        per_insw = w * pool.gpus_per_node
    return TierLoads(per_group, rem_link, per_outsw, outsw_node, per_insw)
