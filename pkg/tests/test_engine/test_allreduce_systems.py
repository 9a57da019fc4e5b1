#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
1 GiB All-Reduce on the seven Ring(a)_FC(8)_Ring(8)_Switch(b) systems with
1000/200/100/50 GB/s per dimension, zero latency and 64 chunks.
"""

import time

import numpy as np
import pytest

from fabriclink.config import load_scenario
from fabriclink.engine import run_simulation
from fabriclink.units import MIB

# scenario -> (reference time in us, bottleneck bound in us)
REFERENCE_US = {
    "allreduce_1gib_2_8_8_4": (4392.85, 4375.0),
    "allreduce_1gib_2_8_8_8": (4392.85, 4375.0),
    "allreduce_1gib_2_8_8_16": (4392.85, 4375.0),
    "allreduce_1gib_2_8_8_32": (4392.85, 4375.0),
    "allreduce_1gib_4_8_8_4": (2212.60, 2187.5),
    "allreduce_1gib_8_8_8_4": (1753.48, 1750.0),
    "allreduce_1gib_16_8_8_4": (1879.17, 1875.0),
}


def _run(name):
    return run_simulation(load_scenario(name))


@pytest.mark.core
@pytest.mark.parametrize("name", sorted(REFERENCE_US))
def test_allreduce_time_within_tolerance(name):
    """
    Pass criteria: the simulated time is within 2.5% of the reference and
    never below the busiest port's serialization bound.
    """
    reference, bound = REFERENCE_US[name]
    report = _run(name)
    assert report.mode == "reduced"
    makespan_us = report.makespan / 1000
    assert makespan_us >= bound
    np.testing.assert_allclose(makespan_us, reference, rtol=0.025)
    for b in report.breakdowns[:1]:
        assert b.exposed_comm == report.makespan


@pytest.mark.core
def test_traffic_reported_per_dimension():
    report = _run("allreduce_1gib_2_8_8_4")
    assert [t.kind for t in report.dim_traffic] == ["Ring", "FC", "Ring", "Switch"]
    assert [t.bytes_per_npu for t in report.dim_traffic] == [
        1024 * MIB, 896 * MIB, 112 * MIB, 12 * MIB,
    ]
    assert report.dim_traffic[1].bytes_total == 896 * MIB * 512

    wide = _run("allreduce_1gib_16_8_8_4")
    assert [t.bytes_per_npu / MIB for t in wide.dim_traffic] == [1920, 112, 14, 1.5]


@pytest.mark.core
def test_scale_up_speedup():
    """Growing the fast first dimension from 2 to 8 NPUs speeds the collective ~2.5x."""
    ratio = _run("allreduce_1gib_2_8_8_4").makespan / _run(
        "allreduce_1gib_8_8_8_4"
    ).makespan
    np.testing.assert_allclose(ratio, 2.51, atol=0.05)


@pytest.mark.slow
def test_4096_npus_simulate_quickly():
    """A 4096-NPU collective with 64 chunks replays in well under ten seconds."""
    t0 = time.perf_counter()
    report = _run("allreduce_1gib_16_8_8_4")
    assert time.perf_counter() - t0 < 10.0
    assert report.npu_count == 4096
    assert len(report.breakdowns) == 4096
