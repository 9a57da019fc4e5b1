#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

import dataclasses
from fractions import Fraction

import pytest

from fabriclink.memory import (
    LocalMemSpec,
    MemoryModelError,
    link_loads,
    local_access_time,
    pipeline_chunks,
    pipeline_time,
    pool_access_time,
    remote_access_time,
    replay_pool_transfer,
    replay_stage_pipeline,
    stage_times,
    zero_infinity_access_time,
)
from fabriclink.units import GBPS, GIB, MIB


@pytest.mark.core
def test_link_loads_plain_and_in_switch(hiermem_pool):
    """
    16 nodes x 16 GPUs, 4 out-node switches, 8 remote groups, every GPU
    loading ``W``.

    Pass criteria: plain loads give 32W per remote group, 8W per
    group-to-switch link, 4W per switch-to-node link and 16W per node; with
    in-switch All-Gather each node switch receives the full 256W.
    """
    plain = link_loads(hiermem_pool, 1)
    assert plain.per_remote_group == 32
    assert plain.rem_to_outsw_link == 8
    assert plain.per_out_switch == 64
    assert plain.outsw_to_node_link == 4
    assert plain.per_in_node_switch == 16

    fused = link_loads(hiermem_pool, 1, in_switch=True)
    assert fused.per_remote_group == 32
    assert fused.rem_to_outsw_link == 8
    assert fused.per_out_switch == 64
    assert fused.outsw_to_node_link == 64
    assert fused.per_in_node_switch == 256

    scaled = link_loads(hiermem_pool, 3 * MIB)
    assert scaled.per_remote_group == 96 * MIB


@pytest.mark.core
def test_stage_times_and_chunking(hiermem_pool):
    assert stage_times(hiermem_pool) == (9766, 477, 477)
    assert stage_times(hiermem_pool, in_switch=True) == (9766, 7630, 122_071)
    # W * 256 GPUs / (8 groups * 4 switches) = 8W bytes per pipeline
    assert pipeline_chunks(MIB // 8, hiermem_pool) == 1
    assert pipeline_chunks(MIB, hiermem_pool) == 8
    assert pipeline_chunks(MIB + 1, hiermem_pool) == 9
    assert pipeline_time(1, (5, 3, 7)) == 15
    assert pipeline_time(4, (5, 3, 7)) == 15 + 3 * 7
    with pytest.raises(MemoryModelError):
        pipeline_time(0, (1,))


@pytest.mark.core
@pytest.mark.parametrize("chunks", [1, 2, 4, 8])
@pytest.mark.parametrize("stages", [(5, 3, 7), (7, 3, 5), (4, 4, 4), (1, 9)])
def test_closed_form_matches_replay(chunks, stages):
    assert replay_stage_pipeline(chunks, stages) == pipeline_time(chunks, stages)


@pytest.mark.core
@pytest.mark.parametrize("chunks", [1, 2, 4, 8])
@pytest.mark.parametrize("chunk_mb", [Fraction(1, 4), 1])
@pytest.mark.parametrize("in_switch", [False, True])
@pytest.mark.parametrize("direction", ["load", "store"])
def test_pool_closed_form_matches_replay(
    hiermem_pool, chunks, chunk_mb, in_switch, direction
):
    """
    The pooled transfer time in closed form equals the chunk-level replay for
    several chunk counts and chunk sizes, loads and stores, with and without
    in-switch collectives.
    """
    pool = dataclasses.replace(hiermem_pool, chunk_size=chunk_mb * MIB)
    w = chunks * pool.chunk_size / 8
    assert pipeline_chunks(w, pool) == chunks
    closed = pool_access_time(w, pool, direction=direction, in_switch=in_switch)
    replayed = replay_pool_transfer(w, pool, in_switch=in_switch, direction=direction)
    assert closed == replayed
    if not in_switch:
        assert closed == remote_access_time(w, pool, direction)


@pytest.mark.core
def test_store_reverses_stage_order(hiermem_pool):
    w = 4 * MIB / 8
    t1, t2, t3 = stage_times(hiermem_pool, in_switch=True)
    load = pool_access_time(w, hiermem_pool, "load", in_switch=True)
    store = pool_access_time(w, hiermem_pool, "store", in_switch=True)
    assert load == store == t1 + t2 + t3 + 3 * max(t1, t2, t3)
    assert replay_stage_pipeline(4, (t3, t2, t1)) == store


@pytest.mark.core
def test_zero_infinity_and_local(hiermem_pool):
    assert zero_infinity_access_time(MIB, 100 * GBPS) == 9766
    assert zero_infinity_access_time(MIB, 100 * GBPS, Fraction(1, 10**6)) == 10_766

    zi = dataclasses.replace(hiermem_pool, remote_model="zero-infinity")
    assert pool_access_time(MIB, zi) == 9766
    with pytest.raises(MemoryModelError):
        pool_access_time(MIB, zi, in_switch=True)

    assert pool_access_time(0, hiermem_pool) == 0
    with pytest.raises(MemoryModelError):
        pool_access_time(MIB, hiermem_pool, direction="copy")

    hbm = LocalMemSpec(0, 4096 * GBPS)
    assert local_access_time(4 * GIB, hbm) == 976_563
    assert local_access_time(0, LocalMemSpec(Fraction(1, 10**7), GBPS)) == 100
    with pytest.raises(MemoryModelError):
        LocalMemSpec(0, 0)


@pytest.mark.core
def test_pool_rejects_bad_shape(hiermem_pool):
    with pytest.raises(MemoryModelError):
        dataclasses.replace(hiermem_pool, num_out_switches=0)
    with pytest.raises(MemoryModelError):
        dataclasses.replace(hiermem_pool, remote_group_bw=0)
    with pytest.raises(MemoryModelError):
        dataclasses.replace(hiermem_pool, remote_model="flat")
