#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

from fractions import Fraction

import numpy as np
import pytest

from fabriclink.topology import (
    BlockKind,
    TopologyError,
    parse_topology,
    topology_from_dict,
    topology_to_dict,
)
from fabriclink.units import GBPS


@pytest.mark.core
def test_parse_normalizes_aliases():
    """
    Block aliases are case-insensitive and normalize to Ring / FC / Switch.

    Pass criteria: the normalized text uses the canonical names and the
    NPU count is the product of the sizes.
    """
    spec = parse_topology("r(2)_FullyConnected(8)_ring(8)_SW(4)", [1, 1, 1, 1])
    assert spec.text == "Ring(2)_FC(8)_Ring(8)_Switch(4)"
    assert spec.sizes == (2, 8, 8, 4)
    assert spec.npu_count == 512
    assert [d.kind for d in spec.dims] == [
        BlockKind.RING,
        BlockKind.FULLY_CONNECTED,
        BlockKind.RING,
        BlockKind.SWITCH,
    ]
    assert [d.link_hops for d in spec.dims] == [1, 1, 1, 2]


@pytest.mark.core
@pytest.mark.parametrize(
    "text, nbw",
    [
        ("Switch(6)", 1),
        ("Ring(1)", 1),
        ("Torus(4)", 1),
        ("Ring(4)_", 1),
        ("Ring(4)_Ring(2)", 1),
        ("", 0),
    ],
)
def test_parse_rejects_invalid(text, nbw):
    with pytest.raises(TopologyError):
        parse_topology(text, [GBPS] * nbw)


@pytest.mark.core
def test_rank_coordinates_innermost_fastest(ring4_ring2):
    """Rank 5 of Ring(4)_Ring(2) is coordinate (1, 1); dimension 1 varies fastest."""
    assert ring4_ring2.rank_to_coords(5) == (1, 1)
    assert ring4_ring2.coords_to_rank((3, 1)) == 7
    for r in range(ring4_ring2.npu_count):
        assert ring4_ring2.coords_to_rank(ring4_ring2.rank_to_coords(r)) == r
    with pytest.raises(TopologyError):
        ring4_ring2.rank_to_coords(8)


@pytest.mark.core
def test_groups_and_scopes(ring4_ring2):
    assert ring4_ring2.dim_group(5, 1) == [4, 5, 6, 7]
    assert ring4_ring2.dim_group(5, 2) == [1, 5]
    assert ring4_ring2.scope_group(5, [2]) == [1, 5]
    assert ring4_ring2.scope_group(5, [2, 1]) == list(range(8))
    assert ring4_ring2.scope_size([1, 2]) == 8
    with pytest.raises(TopologyError):
        ring4_ring2.check_scope([1, 1])
    with pytest.raises(TopologyError):
        ring4_ring2.check_scope([3])

    groups = ring4_ring2.all_dim_groups(2)
    np.testing.assert_array_equal(groups, [[0, 4], [1, 5], [2, 6], [3, 7]])


@pytest.mark.core
def test_pair_dimension_uses_outermost_difference(ring4_ring2):
    assert ring4_ring2.pair_dimension(0, 3) == 1
    assert ring4_ring2.pair_dimension(0, 4) == 2
    assert ring4_ring2.pair_dimension(1, 6) == 2
    with pytest.raises(TopologyError):
        ring4_ring2.pair_dimension(2, 2)


@pytest.mark.core
def test_dict_forms_agree():
    """
    The compact ``spec`` form and the per-dimension ``dims`` form build the
    same topology, with GB/s and ns converted to bytes/s and seconds.
    """
    compact = topology_from_dict(
        {"spec": "Ring(4)_Switch(2)", "bandwidth_GBps": [100, 50], "latency_ns": 700}
    )
    dims = topology_from_dict(
        {
            "dims": [
                {"kind": "Ring", "size": 4, "bandwidth_GBps": 100, "latency_ns": 700},
                {"kind": "sw", "size": 2, "bandwidth_GBps": 50, "latency_ns": 700},
            ]
        }
    )
    assert compact.dims == dims.dims
    assert compact.dim(1).bandwidth == 100 * GBPS
    assert compact.dim(2).latency == Fraction(7, 10**7)
    back = topology_from_dict(topology_to_dict(compact))
    assert back.text == compact.text
    assert [(d.bandwidth, d.latency, d.link_hops) for d in back.dims] == [
        (d.bandwidth, d.latency, d.link_hops) for d in compact.dims
    ]

    with pytest.raises(TopologyError):
        topology_from_dict({"spec": "Ring(4)"})
    with pytest.raises(TopologyError):
        topology_from_dict({"dims": [{"kind": "Ring", "size": 4}]})
