#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Static trace analysis on networkx graphs.
"""

from __future__ import annotations

from typing import Callable, Dict, List, Optional, Tuple

import networkx as nx

from .trace import NodeKind, TraceError, TraceFile, TraceNode

_SINK = "end"


def trace_graph(trace: TraceFile, npu: Optional[int] = None) -> nx.DiGraph:
    """
    Dependency graph of a trace.

    Graph nodes are ``(npu, id)`` pairs carrying the :class:`TraceNode` under
    the ``node`` attribute. Restrict to one NPU with ``npu``.
    """
    g = nx.DiGraph()
    for n in trace.nodes:
        if npu is not None and n.npu != npu:
            continue
        g.add_node((n.npu, n.id), node=n)
        for d in n.deps:
            g.add_edge((n.npu, d), (n.npu, n.id))
    if not nx.is_directed_acyclic_graph(g):
        raise TraceError("trace dependencies contain a cycle")
    return g


def critical_path_time(
    trace: TraceFile, duration: Callable[[TraceNode], int], npu: int = 0
) -> int:
    """
    Longest dependency chain of one NPU, weighting nodes with ``duration``.

    Each node's duration sits on its outgoing edges and on an edge to a
    shared sink, so the longest edge-weighted path is the critical path.
    """
    nodes = [n for n in trace.nodes if n.npu == npu]
    if not nodes:
        return 0
    weight = {n.id: int(duration(n)) for n in nodes}
    g = nx.DiGraph()
    for n in nodes:
        g.add_edge(n.id, _SINK, weight=weight[n.id])
        for d in n.deps:
            g.add_edge(d, n.id, weight=weight[d])
    return int(nx.dag_longest_path_length(g, weight="weight"))


def kind_sequences(trace: TraceFile) -> List[Tuple[str, ...]]:
    """Per-NPU node kind sequences in declaration order."""
    return [tuple(n.kind.value for n in ns) for ns in trace.by_npu()]


def is_symmetric(trace: TraceFile) -> bool:
    """
    ``True`` when every NPU carries the same nodes (ids, kinds, deps, attrs)
    and no PeerComm, so one NPU can stand for all of them.
    """
    per = trace.by_npu()
    if not per:
        return True
    ref = [n.signature for n in per[0]]
    if any(n.kind is NodeKind.PEER for n in per[0]):
        return False
    return all([n.signature for n in ns] == ref for ns in per[1:])


def flops_per_npu(trace: TraceFile) -> List:
    totals: Dict[int, object] = {r: 0 for r in range(trace.npu_count)}
    for n in trace.nodes:
        if n.kind is NodeKind.COMPUTE:
            totals[n.npu] += n["flops"]
    return [totals[r] for r in range(trace.npu_count)]
