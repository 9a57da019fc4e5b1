#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Execution-trace format.

A trace is a per-NPU dependency DAG of compute, memory and communication
nodes, stored as JSON lines: one header record followed by one record per
node. See ``docs/source/trace_format.rst`` for the grammar.

Header::

    {"format": "fabriclink-trace", "version": 1, "npu_count": 4,
     "generator": {"name": "dp", ...}}

Node::

    {"id": 3, "npu": 0, "kind": "CollectiveComm", "deps": [2],
     "attrs": {"collective": "AllReduce", "comm_bytes": 1048576,
               "scope_dims": [1, 2], "tag": 0}}

Byte and FLOP counts are integers, or ``"p/q"`` strings when not integral.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import IO, Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from ..collectives import CollectiveKind, PlanError
from ..units import exact, parse_exact, render_exact

TRACE_FORMAT = "fabriclink-trace"
TRACE_VERSION = 1


class TraceError(ValueError):
    """Raised for malformed traces; the message names the offending record."""


class NodeKind(str, Enum):
    COMPUTE = "Compute"
    MEMORY = "MemoryAccess"
    COLLECTIVE = "CollectiveComm"
    PEER = "PeerComm"


REQUIRED_ATTRS: Dict[NodeKind, Tuple[str, ...]] = {
    NodeKind.COMPUTE: ("flops", "tensor_bytes"),
    NodeKind.MEMORY: ("tensor_bytes", "location", "direction", "in_switch"),
    NodeKind.COLLECTIVE: ("collective", "comm_bytes", "scope_dims", "tag"),
    NodeKind.PEER: ("comm_bytes", "peer", "tag", "direction"),
}

_NUMERIC = ("flops", "tensor_bytes", "comm_bytes")


@dataclass(frozen=True)
class TraceNode:
    """
    One node of an NPU's execution graph.

    ``attrs`` holds exactly the keys listed in :data:`REQUIRED_ATTRS` for the
    node's kind, already normalized (exact numbers, enums, tuples).
    """

    id: int
    npu: int
    kind: NodeKind
    deps: Tuple[int, ...] = ()
    attrs: Dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: str):
        return self.attrs[key]

    @property
    def signature(self) -> tuple:
        """Everything but the NPU index; equal signatures mean equal roles."""
        return (self.id, self.kind, self.deps, tuple(sorted(self.attrs.items())))

    # -------------- constructors --------------

    @classmethod
    def compute(cls, id, npu, flops, tensor_bytes=0, deps=()):
        return cls(
            id,
            npu,
            NodeKind.COMPUTE,
            tuple(deps),
            {"flops": exact(flops), "tensor_bytes": exact(tensor_bytes)},
        )

    @classmethod
    def memory(cls, id, npu, tensor_bytes, location="local", direction="load",
               in_switch=False, deps=()):
        return cls(
            id,
            npu,
            NodeKind.MEMORY,
            tuple(deps),
            {
                "tensor_bytes": exact(tensor_bytes),
                "location": location,
                "direction": direction,
                "in_switch": bool(in_switch),
            },
        )

    @classmethod
    def collective(cls, id, npu, kind, comm_bytes, scope_dims, tag, deps=()):
        return cls(
            id,
            npu,
            NodeKind.COLLECTIVE,
            tuple(deps),
            {
                "collective": CollectiveKind.parse(kind),
                "comm_bytes": exact(comm_bytes),
                "scope_dims": tuple(int(d) for d in scope_dims),
                "tag": int(tag),
            },
        )

    @classmethod
    def peer(cls, id, npu, comm_bytes, peer, tag, direction, deps=()):
        return cls(
            id,
            npu,
            NodeKind.PEER,
            tuple(deps),
            {
                "comm_bytes": exact(comm_bytes),
                "peer": int(peer),
                "tag": int(tag),
                "direction": direction,
            },
        )

    # -------------- codec --------------

    def to_record(self) -> dict:
        attrs = {}
        for k, v in self.attrs.items():
            if k in _NUMERIC:
                v = render_exact(v)
            elif isinstance(v, Enum):
                v = v.value
            elif isinstance(v, tuple):
                v = list(v)
            attrs[k] = v
        return {
            "id": self.id,
            "npu": self.npu,
            "kind": self.kind.value,
            "deps": list(self.deps),
            "attrs": attrs,
        }


@dataclass
class TraceFile:
    npu_count: int
    nodes: List[TraceNode] = field(default_factory=list)
    generator: Dict[str, Any] = field(default_factory=dict)
    version: int = TRACE_VERSION

    def by_npu(self) -> List[List[TraceNode]]:
        out: List[List[TraceNode]] = [[] for _ in range(self.npu_count)]
        for node in self.nodes:
            out[node.npu].append(node)
        return out

    def node_counts(self) -> List[int]:
        return [len(ns) for ns in self.by_npu()]

    def header(self) -> dict:
        return {
            "format": TRACE_FORMAT,
            "version": self.version,
            "npu_count": self.npu_count,
            "generator": self.generator,
        }

    def same_nodes(self, other: "TraceFile") -> bool:
        return self.npu_count == other.npu_count and self.nodes == other.nodes


def _fail(line: int, msg: str) -> TraceError:
    return TraceError(f"trace line {line}: {msg}")


def _int(value, what: str, line: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(line, f"{what} must be an integer, got {value!r}")
    return value


def _normalize_attrs(kind: NodeKind, attrs: dict, npu: int, npu_count: int, line: int):
    if not isinstance(attrs, dict):
        raise _fail(line, "attrs must be an object")
    need = set(REQUIRED_ATTRS[kind])
    missing = sorted(need - set(attrs))
    extra = sorted(set(attrs) - need)
    if missing:
        raise _fail(line, f"{kind.value} node is missing attrs {missing}")
    if extra:
        raise _fail(line, f"{kind.value} node has unexpected attrs {extra}")
    out: Dict[str, Any] = {}
    for key in REQUIRED_ATTRS[kind]:
        v = attrs[key]
        if key in _NUMERIC:
            try:
                if isinstance(v, bool):
                    raise ValueError
                v = parse_exact(v)
            except (ValueError, ZeroDivisionError, TypeError):
                raise _fail(line, f"{key} must be a number, got {v!r}") from None
            if v < 0:
                raise _fail(line, f"{key} must be non-negative, got {v}")
        elif key == "collective":
            try:
                v = CollectiveKind.parse(v)
            except PlanError as err:
                raise _fail(line, str(err)) from None
        elif key == "scope_dims":
            if not isinstance(v, list) or not v:
                raise _fail(line, "scope_dims must be a non-empty list")
            v = tuple(_int(d, "scope_dims entry", line) for d in v)
        elif key == "tag":
            v = _int(v, "tag", line)
            if kind is NodeKind.PEER and v < 0:
                raise _fail(line, f"PeerComm tag must be >= 0, got {v}")
        elif key == "peer":
            v = _int(v, "peer", line)
            if not 0 <= v < npu_count or v == npu:
                raise _fail(line, f"peer {v} is not another NPU of 0..{npu_count - 1}")
        elif key == "location":
            if v not in ("local", "remote"):
                raise _fail(line, f"location must be 'local' or 'remote', got {v!r}")
        elif key == "direction":
            allowed = ("send", "recv") if kind is NodeKind.PEER else ("load", "store")
            if v not in allowed:
                raise _fail(line, f"direction must be one of {allowed}, got {v!r}")
        elif key == "in_switch":
            if not isinstance(v, bool):
                raise _fail(line, f"in_switch must be a boolean, got {v!r}")
        out[key] = v
    return out


def _parse_node(rec: Any, npu_count: int, line: int) -> TraceNode:
    if not isinstance(rec, dict):
        raise _fail(line, "node record must be an object")
    for key in ("id", "npu", "kind", "deps", "attrs"):
        if key not in rec:
            raise _fail(line, f"node record is missing {key!r}")
    nid = _int(rec["id"], "id", line)
    npu = _int(rec["npu"], "npu", line)
    if not 0 <= npu < npu_count:
        raise _fail(line, f"npu {npu} outside 0..{npu_count - 1}")
    try:
        kind = NodeKind(rec["kind"])
    except ValueError:
        raise _fail(line, f"unknown node kind {rec['kind']!r}") from None
    if not isinstance(rec["deps"], list):
        raise _fail(line, "deps must be a list")
    deps = tuple(_int(d, "dep", line) for d in rec["deps"])
    attrs = _normalize_attrs(kind, rec["attrs"], npu, npu_count, line)
    return TraceNode(nid, npu, kind, deps, attrs)


def validate_trace(trace: TraceFile, lines: Optional[Sequence[int]] = None) -> None:
    """
    Check structural invariants of an in-memory trace.

    Node ids are unique per NPU and every dependency names a node of the same
    NPU declared earlier, which makes each per-NPU graph acyclic.

    Parameters
    ----------
    trace : TraceFile
    lines : sequence of int, optional
        Source line of each node, used in error messages. Defaults to the
        record position in a written trace (header on line 1).

    Raises
    ------
    TraceError
    """
    if trace.version != TRACE_VERSION:
        raise TraceError(f"unsupported trace version {trace.version}")
    if isinstance(trace.npu_count, bool) or not isinstance(trace.npu_count, int):
        raise TraceError("npu_count must be an integer")
    if trace.npu_count < 1:
        raise TraceError("npu_count must be >= 1")
    seen: List[set] = [set() for _ in range(trace.npu_count)]
    if lines is None:
        lines = range(2, len(trace.nodes) + 2)
    elif len(lines) != len(trace.nodes):
        raise ValueError("lines must give one line number per node")
    for line, node in zip(lines, trace.nodes):
        if not 0 <= node.npu < trace.npu_count:
            raise _fail(line, f"npu {node.npu} outside 0..{trace.npu_count - 1}")
        ids = seen[node.npu]
        if node.id in ids:
            raise _fail(line, f"duplicate node id {node.id} on npu {node.npu}")
        for dep in node.deps:
            if dep not in ids:
                raise _fail(
                    line,
                    f"node {node.id} on npu {node.npu} depends on missing or later "
                    f"node {dep}",
                )
        need = set(REQUIRED_ATTRS[node.kind])
        if set(node.attrs) != need:
            raise _fail(line, f"node {node.id} attrs do not match {node.kind.value}")
        ids.add(node.id)


def write_trace(trace: TraceFile, destination: Union[str, Path, IO[str]]) -> None:
    """Write ``trace`` as JSON lines to a path or a text stream."""
    def dump(fh):
        for rec in [trace.header()] + [n.to_record() for n in trace.nodes]:
            fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")))
            fh.write("\n")

    if isinstance(destination, (str, Path)):
        with Path(destination).open("w", encoding="utf-8") as fh:
            dump(fh)
    else:
        dump(destination)


def read_trace(source: Union[str, Path, IO[str], Iterable[str]]) -> TraceFile:
    """
    Read and validate a trace.

    Parameters
    ----------
    source : path, text stream or iterable of lines

    Raises
    ------
    TraceError
        Bad header or version, duplicate ids, dangling dependencies or bad
        attributes. The message names the first offending line.
    """
    if isinstance(source, (str, Path)):
        with Path(source).open("r", encoding="utf-8") as fh:
            return read_trace(fh.readlines())

    header = None
    nodes: List[TraceNode] = []
    linenos: List[int] = []
    for lineno, raw in enumerate(source, start=1):
        text = raw.strip()
        if not text:
            continue
        try:
            rec = json.loads(text)
        except json.JSONDecodeError as err:
            raise _fail(lineno, f"invalid JSON ({err.msg})") from None
        if header is None:
            if not isinstance(rec, dict) or rec.get("format") != TRACE_FORMAT:
                raise _fail(lineno, f"first record must be a {TRACE_FORMAT} header")
            if rec.get("version") != TRACE_VERSION:
                raise _fail(
                    lineno,
                    f"trace version {rec.get('version')!r} is not supported "
                    f"(expected {TRACE_VERSION})",
                )
            header = rec
            npu_count = _int(rec.get("npu_count"), "npu_count", lineno)
            if npu_count < 1:
                raise _fail(lineno, "npu_count must be >= 1")
            continue
        node = _parse_node(rec, npu_count, lineno)
        nodes.append(node)
        linenos.append(lineno)
    if header is None:
        raise TraceError("trace is empty: missing header")
    trace = TraceFile(
        npu_count=npu_count,
        nodes=nodes,
        generator=dict(header.get("generator") or {}),
        version=header["version"],
    )
    validate_trace(trace, linenos)
    return trace


def replicate(template: Sequence[TraceNode], npu_count: int) -> List[TraceNode]:
    """Copy one NPU's node list onto every NPU."""
    return [replace(n, npu=r) for r in range(npu_count) for n in template]
