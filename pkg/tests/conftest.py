#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

from __future__ import annotations

from fractions import Fraction
from importlib.resources import files
from pathlib import Path

import pytest

from fabriclink.memory import MemoryPoolSpec
from fabriclink.topology import parse_topology
from fabriclink.units import GBPS, MIB

# Dimension bandwidths used by the seven all-reduce systems, GB/s, innermost first.
SYSTEM_BW_GBPS = (1000, 200, 100, 50)

SYSTEMS = (
    "Ring(2)_FC(8)_Ring(8)_Switch(4)",
    "Ring(4)_FC(8)_Ring(8)_Switch(4)",
    "Ring(8)_FC(8)_Ring(8)_Switch(4)",
    "Ring(16)_FC(8)_Ring(8)_Switch(4)",
    "Ring(2)_FC(8)_Ring(8)_Switch(8)",
    "Ring(2)_FC(8)_Ring(8)_Switch(16)",
    "Ring(2)_FC(8)_Ring(8)_Switch(32)",
)


def system(text: str, bw_GBps=SYSTEM_BW_GBPS, latency_ns=None):
    """Parse ``text`` with per-dimension bandwidths in GB/s and latencies in ns."""
    n = len(text.split("_"))
    bws = [b * GBPS for b in bw_GBps[:n]]
    lats = None if latency_ns is None else [Fraction(x) / 10**9 for x in latency_ns]
    return parse_topology(text, bws, lats)


@pytest.fixture
def ring4():
    """Ring(4) at 100 GB/s, no latency."""
    return parse_topology("Ring(4)", [100 * GBPS])


@pytest.fixture
def ring4_ring2():
    return parse_topology("Ring(4)_Ring(2)", [100 * GBPS, 50 * GBPS])


@pytest.fixture
def hiermem_pool():
    """16 nodes x 16 GPUs, 4 out-node switches, 8 remote groups."""
    return MemoryPoolSpec(
        num_nodes=16,
        gpus_per_node=16,
        num_out_switches=4,
        num_remote_groups=8,
        chunk_size=MIB,
        in_node_fabric_bw=256 * GBPS,
        gpu_side_out_fabric_bw=1024 * GBPS,
        mem_side_out_fabric_bw=100 * GBPS,
        remote_group_bw=100 * GBPS,
    )


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    """Directory holding the bundled scenario files."""
    return Path(str(files("fabriclink.scenarios")))
