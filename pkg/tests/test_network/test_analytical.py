#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

import json
from fractions import Fraction

import pytest

from conftest import system
from fabriclink.network import (
    AnalyticalNetwork,
    ContractError,
    DeadlockError,
    EventCore,
    LinkModel,
    transfer_time,
)
from fabriclink.units import GBPS, GIB, MIB, NS_PER_S


@pytest.mark.core
@pytest.mark.parametrize(
    "nbytes, bw_GBps, latency_ns, hops, expected",
    [
        (MIB, 1, 700, 2, 977_963),
        (MIB, 1, 100, 1, 976_663),
        (4 * GIB, 4096, 0, 1, 976_563),
        (GIB, 100, 0, 1, 10_000_000),
        (0, 1, 50, 2, 100),
        (0, 1, 0, 1, 0),
    ],
)
def test_transfer_time_formula(nbytes, bw_GBps, latency_ns, hops, expected):
    """
    ``ceil((latency * hops + bytes / bandwidth) * 1e9)`` with GB/s = 2**30 B/s.
    """
    link = LinkModel(bw_GBps * GBPS, Fraction(latency_ns, NS_PER_S), hops)
    assert transfer_time(nbytes, link) == expected


@pytest.mark.core
def test_event_core_orders_by_time_then_insertion():
    core = EventCore()
    seen = []
    core.schedule(5, lambda: seen.append("b"))
    core.schedule(5, lambda: seen.append("c"))
    core.schedule(1, lambda: seen.append("a"))
    core.schedule(0, lambda: core.schedule(10, lambda: seen.append("d")))
    assert core.run() == 10
    assert seen == ["a", "b", "c", "d"]
    assert core.processed == 5
    with pytest.raises(ValueError):
        core.schedule(-1, lambda: None)


def _net(text="Ring(4)", bw=(1,), lat=None, **kw):
    return AnalyticalNetwork(system(text, bw, lat), **kw)


@pytest.mark.core
def test_rendezvous_fires_on_arrival_either_order():
    """
    A message starts when both sides are posted, whichever comes first; the
    receive fires at start + transfer time.
    """
    for recv_first in (True, False):
        net = _net()
        done = {}
        matched = []

        def post_recv():
            net.sim_recv(MIB, 0, 1, 7, lambda: done.setdefault("recv", net.now),
                         on_match=lambda: matched.append(net.now))

        def post_send():
            net.sim_send(MIB, 0, 1, 7, lambda: done.setdefault("send", net.now))

        if recv_first:
            post_recv()
            net.sim_schedule(1000, post_send)
        else:
            post_send()
            net.sim_schedule(1000, post_recv)
        assert net.run_until_idle() == 1000 + 976_563
        assert done == {"send": 1000 + 976_563, "recv": 1000 + 976_563}
        assert matched == [1000]
        assert net.sent_bytes[(0, 1)] == MIB


@pytest.mark.core
def test_port_serializes_sends_in_fifo_order():
    """
    Two messages from the same NPU in the same dimension share its port: the
    second starts when the first has finished serializing.
    """
    net = _net("Ring(4)", (1,), (100,))
    arrivals = []
    for dst, tag in ((1, 0), (3, 1)):
        net.sim_send(MIB, 0, dst, tag, lambda: None)
        net.sim_recv(MIB, 0, dst, tag, lambda d=dst: arrivals.append((d, net.now)))
    net.run_until_idle()
    assert arrivals == [(1, 976_663), (3, 976_563 + 976_663)]
    assert net.messages == 2


@pytest.mark.core
def test_ports_are_per_dimension():
    net = _net("Ring(2)_Ring(2)", (1, 1))
    arrivals = []
    for dst in (1, 2):
        net.sim_send(MIB, 0, dst, 0, lambda: None)
        net.sim_recv(MIB, 0, dst, 0, lambda d=dst: arrivals.append((d, net.now)))
    net.run_until_idle()
    assert sorted(arrivals) == [(1, 976_563), (2, 976_563)]


@pytest.mark.core
def test_unmatched_operation_deadlocks():
    net = _net()
    net.sim_send(MIB, 2, 3, "x", lambda: None)
    net.sim_recv(MIB, 1, 0, "y", lambda: None)
    with pytest.raises(DeadlockError) as err:
        net.run_until_idle()
    assert len(err.value.parked) == 2
    assert "send (2->3, tag x" in str(err.value)
    assert "recv (1->0, tag y" in str(err.value)


@pytest.mark.core
def test_size_mismatch_and_self_send_are_contract_errors():
    net = _net()
    net.sim_send(MIB, 0, 1, 0, lambda: None)
    with pytest.raises(ContractError):
        net.sim_recv(2 * MIB, 0, 1, 0, lambda: None)
    with pytest.raises(ContractError):
        net.sim_send(MIB, 2, 2, 0, lambda: None)


@pytest.mark.core
def test_mirror_send_and_event_log(tmp_path):
    net = _net("Ring(4)", (1,), record_events=True)
    hits = []
    net.sim_mirror_send(MIB, 0, 1, 3, lambda: hits.append(net.now))
    net.sim_send(MIB, 0, 3, 4, lambda: None)
    net.sim_recv(MIB, 0, 3, 4, lambda: None)
    net.run_until_idle()
    assert hits == [976_563]
    assert net.sent_bytes[(0, 1)] == 2 * MIB

    path = net.write_event_log(tmp_path / "events.jsonl")
    records = [json.loads(line) for line in path.read_text().splitlines()]
    assert [(r["src"], r["dst"], r["tag"], r["time_ns"]) for r in records] == [
        (0, 1, 3, 976_563),
        (0, 3, 4, 2 * 976_563),
    ]
