#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

from .topology import (
    HOPS,
    BlockKind,
    Dimension,
    TopologyError,
    TopologySpec,
    coords_to_rank,
    dim_group,
    hop_count,
    parse_topology,
    rank_to_coords,
    topology_from_dict,
    topology_to_dict,
)

__all__ = [
    "HOPS",
    "BlockKind",
    "Dimension",
    "TopologyError",
    "TopologySpec",
    "coords_to_rank",
    "dim_group",
    "hop_count",
    "parse_topology",
    "rank_to_coords",
    "topology_from_dict",
    "topology_to_dict",
]
