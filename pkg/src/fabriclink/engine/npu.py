#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Per-NPU compute model and ready-set bookkeeping.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Set

from ..memory import LocalMemSpec
from ..units import GBPS, NS_PER_S, TFLOPS, Number, ceil_ns, exact
from ..workloads import TraceNode


@dataclass(frozen=True)
class NpuSpec:
    """
    Parameters
    ----------
    peak_flops : Fraction
        FLOP/s.
    local_mem : LocalMemSpec
        Local HBM; its bandwidth is also the roofline memory arm.
    """

    peak_flops: Fraction = Fraction(234 * TFLOPS)
    local_mem: LocalMemSpec = field(
        default_factory=lambda: LocalMemSpec(Fraction(0), Fraction(4096 * GBPS))
    )

    def __post_init__(self):
        object.__setattr__(self, "peak_flops", exact(self.peak_flops))
        if self.peak_flops <= 0:
            raise ValueError(f"peak_flops must be positive, got {self.peak_flops}")

    @classmethod
    def from_units(
        cls,
        peak_tflops: Number = 234,
        local_bw_GBps: Number = 4096,
        local_latency_ns: Number = 0,
    ) -> "NpuSpec":
        """Build from TFLOPS, GB/s and ns."""
        local = LocalMemSpec(
            exact(local_latency_ns) / NS_PER_S, exact(local_bw_GBps) * GBPS
        )
        return cls(exact(peak_tflops) * TFLOPS, local)


def roofline_time(flops: Number, tensor_bytes: Number, npu: NpuSpec) -> int:
    """
    Roofline estimate of a compute node in integer ns.

    ``max(flops / peak_flops, tensor_bytes / local_bandwidth)``, rounded up.
    """
    f = exact(flops)
    b = exact(tensor_bytes)
    if f < 0 or b < 0:
        raise ValueError("flops and tensor_bytes must be non-negative")
    seconds = max(f / npu.peak_flops, b / npu.local_mem.bandwidth)
    return ceil_ns(seconds * NS_PER_S)


class NpuState:
    """
    Issue state of one NPU's trace graph.

    Nodes move from waiting to ready once all dependencies complete, then to
    issued and finally done. Any number of ready nodes may be issued at once.
    """

    def __init__(self, rank: int, nodes: Sequence[TraceNode] = ()):
        self.rank = rank
        self.nodes: Dict[int, TraceNode] = {}
        self.index: Dict[int, int] = {}
        self._waiting: Dict[int, int] = {}
        self._children: Dict[int, List[int]] = defaultdict(list)
        self._ready: Set[int] = set()
        self.issued: Set[int] = set()
        self.done: Set[int] = set()
        for i, n in enumerate(nodes):
            self.nodes[n.id] = n
            self.index[n.id] = i
            deps = set(n.deps)
            self._waiting[n.id] = len(deps)
            for d in deps:
                self._children[d].append(n.id)
            if not deps:
                self._ready.add(n.id)

    def step_ready(self) -> Set[int]:
        """Unissued nodes whose dependencies have all completed."""
        return set(self._ready)

    def issue(self, node_id: int) -> None:
        if node_id not in self._ready:
            raise RuntimeError(f"node {node_id} on NPU {self.rank} is not ready")
        self._ready.discard(node_id)
        self.issued.add(node_id)

    def complete(self, node_id: int) -> List[int]:
        """Mark a node done and return the nodes it made ready."""
        if node_id not in self.issued or node_id in self.done:
            raise RuntimeError(f"node {node_id} on NPU {self.rank} completed twice")
        self.done.add(node_id)
        newly = []
        for c in self._children.get(node_id, ()):
            self._waiting[c] -= 1
            if self._waiting[c] == 0:
                self._ready.add(c)
                newly.append(c)
        return newly

    @property
    def finished(self) -> bool:
        return len(self.done) == len(self.nodes)

    def pending(self) -> List[int]:
        return [nid for nid in self.nodes if nid not in self.done]


# -------------- issue policies --------------


class FifoPolicy:
    """Issue ready nodes in trace declaration order."""

    name = "fifo"

    def order(self, ready: Iterable[int], state: NpuState) -> List[int]:
        return sorted(ready, key=state.index.__getitem__)


__schedulers__ = {
    "fifo": FifoPolicy,
}
