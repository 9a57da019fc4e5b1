#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

import io
import json
from fractions import Fraction

import pytest

from fabriclink.collectives import CollectiveKind
from fabriclink.units import MIB
from fabriclink.workloads import (
    TraceError,
    TraceFile,
    TraceNode,
    read_trace,
    validate_trace,
    write_trace,
)

HEADER = {"format": "fabriclink-trace", "version": 1, "npu_count": 2}


def _lines(*records):
    return [json.dumps(r) for r in records]


def _compute(nid, npu=0, deps=()):
    return {"id": nid, "npu": npu, "kind": "Compute", "deps": list(deps),
            "attrs": {"flops": 10, "tensor_bytes": 0}}


@pytest.mark.core
def test_write_then_read_keeps_every_node(tmp_path):
    trace = TraceFile(
        2,
        [
            TraceNode.compute(0, 0, Fraction(10**9, 3), MIB),
            TraceNode.peer(1, 0, MIB, 1, 7, "send", deps=(0,)),
            TraceNode.peer(0, 1, MIB, 0, 7, "recv"),
            TraceNode.collective(1, 1, "ar", 2 * MIB, [1], 4, deps=(0,)),
            TraceNode.memory(2, 1, MIB, "remote", "store", in_switch=True, deps=(1,)),
        ],
        generator={"name": "handmade"},
    )
    path = tmp_path / "t.jsonl"
    write_trace(trace, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 6
    assert json.loads(lines[1])["attrs"]["flops"] == "1000000000/3"

    back = read_trace(path)
    assert back.same_nodes(trace)
    assert back.generator == {"name": "handmade"}
    assert back.nodes[3]["collective"] is CollectiveKind.ALL_REDUCE
    assert back.node_counts() == [2, 3]

    buf = io.StringIO()
    write_trace(trace, buf)
    assert buf.getvalue() == path.read_text()


@pytest.mark.core
def test_read_rejects_bad_header():
    with pytest.raises(TraceError, match="trace line 1"):
        read_trace(_lines({"format": "other", "version": 1, "npu_count": 2}))
    with pytest.raises(TraceError, match="not supported"):
        read_trace(_lines(dict(HEADER, version=2)))
    with pytest.raises(TraceError, match="missing header"):
        read_trace([])
    with pytest.raises(TraceError, match="invalid JSON"):
        read_trace(["{not json"])


@pytest.mark.core
def test_read_rejects_bad_dependencies():
    with pytest.raises(TraceError, match="trace line 2"):
        read_trace(_lines(HEADER, _compute(0, deps=[1]), _compute(1)))
    with pytest.raises(TraceError, match="trace line 3: duplicate node id 0"):
        read_trace(_lines(HEADER, _compute(0), _compute(0)))
    # ids are per NPU
    trace = read_trace(_lines(HEADER, _compute(0), _compute(0, npu=1)))
    assert trace.node_counts() == [1, 1]


@pytest.mark.core
def test_read_rejects_bad_attributes():
    extra = _compute(0)
    extra["attrs"]["colour"] = "red"
    with pytest.raises(TraceError, match="trace line 2: .*unexpected attrs"):
        read_trace(_lines(HEADER, extra))

    missing = _compute(0)
    del missing["attrs"]["tensor_bytes"]
    with pytest.raises(TraceError, match="missing attrs"):
        read_trace(_lines(HEADER, missing))

    negative = _compute(0)
    negative["attrs"]["flops"] = -1
    with pytest.raises(TraceError, match="non-negative"):
        read_trace(_lines(HEADER, negative))

    self_peer = {"id": 0, "npu": 1, "kind": "PeerComm", "deps": [],
                 "attrs": {"comm_bytes": 1, "peer": 1, "tag": 0, "direction": "send"}}
    with pytest.raises(TraceError, match="peer 1"):
        read_trace(_lines(HEADER, self_peer))

    bad_kind = _compute(0)
    bad_kind["kind"] = "Sleep"
    with pytest.raises(TraceError, match="unknown node kind"):
        read_trace(_lines(HEADER, bad_kind))

    outside = _compute(0, npu=2)
    with pytest.raises(TraceError, match="outside"):
        read_trace(_lines(HEADER, outside))


@pytest.mark.core
def test_validate_in_memory_trace():
    validate_trace(TraceFile(1, [TraceNode.compute(0, 0, 1)]))
    with pytest.raises(TraceError):
        validate_trace(TraceFile(0))
    with pytest.raises(TraceError, match="missing or later"):
        validate_trace(TraceFile(1, [TraceNode.compute(0, 0, 1, deps=(0,))]))


@pytest.mark.core
def test_errors_name_the_file_line_past_blank_lines(tmp_path):
    lines = _lines(HEADER, _compute(0), _compute(1, deps=[0]), _compute(1))
    text = lines[0] + "\n\n" + lines[1] + "\n\n\n" + lines[2] + "\n" + lines[3] + "\n"
    path = tmp_path / "gappy.jsonl"
    path.write_text(text)
    # header 1, blank 2, node 3, blanks 4-5, node 6, duplicate 7
    with pytest.raises(TraceError, match="trace line 7: duplicate node id 1"):
        read_trace(path)

    nodes = [TraceNode.compute(0, 0, 1), TraceNode.compute(0, 0, 1)]
    with pytest.raises(TraceError, match="trace line 3: duplicate"):
        validate_trace(TraceFile(1, nodes))
    with pytest.raises(TraceError, match="trace line 12: duplicate"):
        validate_trace(TraceFile(1, nodes), lines=[5, 12])
