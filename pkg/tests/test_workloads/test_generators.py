#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

from fractions import Fraction

import pytest

from conftest import system
from fabriclink.collectives import CollectiveKind
from fabriclink.engine import Simulator
from fabriclink.units import MIB
from fabriclink.workloads import (
    __generators__,
    GeneratorError,
    ModelShape,
    NodeKind,
    build_trace,
    critical_path_time,
    flops_per_npu,
    gen_dp_trace,
    gen_hybrid_trace,
    gen_microbench,
    gen_mp_trace,
    gen_offload_trace,
    gen_pipeline_trace,
    is_symmetric,
    kind_sequences,
    split_degrees,
    trace_graph,
)
from fabriclink.workloads.generators import dp_from_params, pipeline_from_params

C, A, M, P = "Compute", "CollectiveComm", "MemoryAccess", "PeerComm"


@pytest.fixture
def model():
    return ModelShape.uniform(2, 10**9, 4 * MIB, MIB)


@pytest.mark.core
def test_model_shape_from_dict():
    shape = ModelShape.from_dict(
        {"layers": 3, "fwd_gflops": [1, 2, 3], "param_mb": 8, "act_mb": 0.5}
    )
    assert shape.fwd_flops == (10**9, 2 * 10**9, 3 * 10**9)
    assert shape.bwd_flops == (2 * 10**9, 4 * 10**9, 6 * 10**9)
    assert shape.param_bytes == (8 * MIB,) * 3
    assert shape.act_bytes == (Fraction(MIB, 2),) * 3
    assert shape.total_flops == 18 * 10**9
    with pytest.raises(GeneratorError):
        ModelShape.from_dict({"layers": 2, "fwd_gflops": [1, 2, 3], "param_mb": 1,
                              "act_mb": 1})
    with pytest.raises(GeneratorError):
        ModelShape.from_dict({"layers": 0})
    with pytest.raises(GeneratorError):
        ModelShape.from_dict({"layers": 1, "param_mb": 1, "act_mb": 1})


@pytest.mark.core
def test_data_parallel_structure(ring4_ring2, model):
    """
    Forward computes, then per layer a backward compute followed by a gradient
    All-Reduce over every dimension that only depends on that compute.
    """
    trace = gen_dp_trace(model, ring4_ring2)
    assert trace.npu_count == 8
    assert is_symmetric(trace)
    assert kind_sequences(trace)[0] == (C, C, C, A, C, A)
    per = trace.by_npu()[3]
    grads = [n for n in per if n.kind is NodeKind.COLLECTIVE]
    assert [n["collective"] for n in grads] == [CollectiveKind.ALL_REDUCE] * 2
    assert [n["scope_dims"] for n in grads] == [(1, 2), (1, 2)]
    assert [n["comm_bytes"] for n in grads] == [4 * MIB, 4 * MIB]
    assert [n["tag"] for n in grads] == [3, 5]
    assert grads[1].deps == (4,)
    assert flops_per_npu(trace) == [model.total_flops] * 8

    with pytest.raises(GeneratorError):
        gen_dp_trace(model, ring4_ring2, [])


@pytest.mark.core
def test_model_and_hybrid_parallel(ring4_ring2, model):
    mp = gen_mp_trace(model, ring4_ring2, [1])
    first = mp.by_npu()[0]
    assert kind_sequences(mp)[0] == (C, A, C, A, C, A, C, A)
    assert first[0]["flops"] == Fraction(10**9, 4)
    assert first[1]["collective"] is CollectiveKind.ALL_GATHER
    assert first[3]["collective"] is CollectiveKind.ALL_GATHER
    assert first[5]["collective"] is CollectiveKind.ALL_REDUCE

    hybrid = gen_hybrid_trace(model, ring4_ring2, [1], [2])
    seq = kind_sequences(hybrid)[0]
    assert seq == (C, A, C, A, C, A, A, C, A, A)
    dp = [
        n for n in hybrid.by_npu()[0]
        if n.kind is NodeKind.COLLECTIVE and n["scope_dims"] == (2,)
    ]
    assert [n["comm_bytes"] for n in dp] == [MIB, MIB]

    with pytest.raises(GeneratorError, match="overlap"):
        gen_hybrid_trace(model, ring4_ring2, [1, 2], [2])
    with pytest.raises(GeneratorError):
        gen_hybrid_trace(model, ring4_ring2, [1], [])


@pytest.mark.core
def test_split_degrees(ring4_ring2):
    assert split_degrees(ring4_ring2, 1) == ((), (1, 2))
    assert split_degrees(ring4_ring2, 4) == ((1,), (2,))
    assert split_degrees(ring4_ring2, 8) == ((1, 2), ())
    with pytest.raises(GeneratorError):
        split_degrees(ring4_ring2, 2)

    trace = build_trace(
        "hybrid",
        ring4_ring2,
        {"mp_degree": 4, "model": {"layers": 1, "fwd_gflops": 1, "param_mb": 4,
                                   "act_mb": 1}},
    )
    assert trace.generator["mp_scope"] == [1]
    assert trace.generator["dp_scope"] == [2]


@pytest.mark.core
def test_pipeline_stages_differ_and_replay(ring4):
    """
    Two stages on Ring(4): ranks 0-1 own the first layer, ranks 2-3 the
    second. Activations flow forward, gradients flow back, and the trace
    replays to completion.
    """
    model = ModelShape.uniform(2, 10**9, 4 * MIB, MIB)
    trace = gen_pipeline_trace(model, ring4, stages=2, microbatches=2)
    seqs = kind_sequences(trace)
    assert seqs[0] == (C, P, C, P, P, C, P, C)
    assert seqs[2] == (P, C, P, C, C, P, C, P)
    assert seqs[0] == seqs[1] and seqs[0] != seqs[2]
    assert not is_symmetric(trace)
    sends = [n for n in trace.by_npu()[0] if n.kind is NodeKind.PEER]
    assert [(n["direction"], n["peer"], n["tag"]) for n in sends] == [
        ("send", 2, 0), ("send", 2, 2), ("recv", 2, 1), ("recv", 2, 3),
    ]
    assert sends[0]["comm_bytes"] == Fraction(MIB, 2)

    report = Simulator(ring4, trace).run()
    assert report.mode == "full"
    assert all(b.total == report.makespan for b in report.breakdowns)
    assert report.dim_traffic[0].bytes_total == 8 * Fraction(MIB, 2)

    with pytest.raises(GeneratorError):
        gen_pipeline_trace(model, ring4, stages=3, microbatches=1)
    with pytest.raises(GeneratorError):
        gen_pipeline_trace(ModelShape.uniform(3, 1, 1, 1), ring4, 2, 1)


@pytest.mark.core
def test_microbench_and_offload(ring4_ring2, model):
    bench = gen_microbench("a2a", 3 * MIB, ring4_ring2, [2])
    (node,) = bench.by_npu()[7]
    assert node["collective"] is CollectiveKind.ALL_TO_ALL
    assert node["scope_dims"] == (2,)
    assert node["tag"] == 0
    with pytest.raises(GeneratorError):
        gen_microbench("AllReduce", 0, ring4_ring2)
    with pytest.raises(GeneratorError):
        gen_microbench("Broadcast", MIB, ring4_ring2)
    with pytest.raises(GeneratorError):
        gen_microbench("AllReduce", MIB, ring4_ring2, [3])

    off = gen_offload_trace(model, ring4_ring2, in_switch=True)
    remote = [n for n in off.by_npu()[0] if n.kind is NodeKind.MEMORY
              and n["location"] == "remote"]
    assert [n["direction"] for n in remote] == ["load", "load", "load", "store", "load",
                                                "store"]
    assert all(n["in_switch"] for n in remote)
    assert kind_sequences(off)[0].count(M) == 4 * 2 + 2


@pytest.mark.core
def test_build_trace_registry(ring4):
    trace = build_trace("microbench", ring4, {"kind": "AllGather", "mb": 2})
    assert trace.nodes[0]["comm_bytes"] == 2 * MIB
    assert trace.generator["name"] == "microbench"
    with pytest.raises(GeneratorError):
        build_trace("nonexistent", ring4)
    with pytest.raises(GeneratorError, match="does not take"):
        build_trace("microbench", ring4, {"mb": 1, "colour": "red"})
    with pytest.raises(GeneratorError):
        build_trace("microbench", ring4, {"kind": "AllReduce"})


@pytest.mark.core
def test_graph_analysis():
    spec = system("Ring(2)", (1,))
    model = ModelShape.uniform(1, 10**6, 0, 0)
    trace = gen_dp_trace(model, spec)
    g = trace_graph(trace, npu=1)
    assert sorted(g.nodes) == [(1, 0), (1, 1), (1, 2)]
    assert critical_path_time(trace, lambda n: 10) == 30
    assert critical_path_time(trace, lambda n: 10, npu=5) == 0


@pytest.mark.core
def test_registry_entries_are_the_param_wrappers(ring4):
    assert __generators__["dp"] is dp_from_params
    assert __generators__["pipeline"] is pipeline_from_params
    assert set(__generators__) == {
        "dp", "mp", "hybrid", "pipeline", "microbench", "offload",
    }
    params = {"model": {"layers": 2, "fwd_gflops": 1, "param_mb": 4, "act_mb": 1}}
    assert build_trace("dp", ring4, params).same_nodes(dp_from_params(ring4, **params))


@pytest.mark.core
def test_degenerate_hybrid_is_pure_dp_or_mp(ring4_ring2, model):
    dp = gen_hybrid_trace(model, ring4_ring2, [], [1, 2])
    assert dp.same_nodes(gen_dp_trace(model, ring4_ring2))
    mp = gen_hybrid_trace(model, ring4_ring2, [1, 2], [])
    assert mp.same_nodes(gen_mp_trace(model, ring4_ring2))
    assert not dp.same_nodes(mp)


@pytest.mark.core
@pytest.mark.parametrize(
    "build, replicas",
    [
        (lambda m, s: gen_dp_trace(m, s), 8),
        (lambda m, s: gen_mp_trace(m, s), 1),
        (lambda m, s: gen_mp_trace(m, s, [1]), 2),
        (lambda m, s: gen_hybrid_trace(m, s, [1], [2]), 2),
        (lambda m, s: gen_hybrid_trace(m, s, [2], [1]), 4),
        (lambda m, s: gen_pipeline_trace(m, s, 2, 4), 4),
    ],
    ids=["dp", "mp", "mp-inner", "hybrid", "hybrid-outer", "pipeline"],
)
def test_flops_are_conserved_per_replica(ring4_ring2, build, replicas):
    """
    Summed over the cluster, compute FLOPs equal one model step per data
    replica, whichever way the model is split.
    """
    model = ModelShape.from_dict(
        {"layers": 2, "fwd_gflops": [1, 3], "param_mb": 4, "act_mb": 1}
    )
    trace = build(model, ring4_ring2)
    assert sum(flops_per_npu(trace)) == replicas * model.total_flops


@pytest.mark.core
def test_single_stage_pipeline_is_the_plain_step(ring4, model):
    """
    One stage and one microbatch leaves no peer traffic and runs the same
    computes, in the same order, as the data-parallel step.
    """
    pipe = gen_pipeline_trace(model, ring4, stages=1, microbatches=1)
    assert is_symmetric(pipe)
    assert set(kind_sequences(pipe)[0]) == {C}

    def computes(trace):
        return [
            (n["flops"], n["tensor_bytes"]) for n in trace.by_npu()[0]
            if n.kind is NodeKind.COMPUTE
        ]

    assert computes(pipe) == computes(gen_dp_trace(model, ring4))
    assert flops_per_npu(pipe) == [model.total_flops] * 4
