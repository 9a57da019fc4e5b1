#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Multi-dimensional hierarchical topologies.

A topology is an ordered stack of building blocks, innermost first. Each
block (``Ring``, ``FC`` for fully connected, ``Switch``) joins ``size`` NPUs
or NPU groups of the level below. The compact notation joins blocks with
underscores, e.g. ``Ring(2)_FC(8)_Ring(8)_Switch(4)``.

This module provides:

- **BlockKind**, **Dimension**, **TopologySpec**: immutable descriptions.
- **parse_topology**: compact notation plus per-dimension bandwidth/latency.
- **Addressing**: mixed-radix ``rank_to_coords`` / ``coords_to_rank`` with
  dimension 1 as the fastest-varying digit, ``dim_group`` and
  ``scope_group``.
- **hop_count**: link traversals per block, used by the latency term.

Dimension indices are 1-based everywhere in the public API.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..units import GBPS, NS_PER_S, Number, exact, render_exact


class TopologyError(ValueError):
    """
    Raised for malformed topology text, invalid dimensions and out-of-range
    addresses.
    """


class BlockKind(str, Enum):
    RING = "Ring"
    FULLY_CONNECTED = "FC"
    SWITCH = "Switch"

    @classmethod
    def parse(cls, token: str) -> "BlockKind":
        try:
            return _BLOCK_ALIASES[token.strip().lower()]
        except KeyError:
            raise TopologyError(
                f"Unknown building block {token!r}; expected one of "
                "Ring (R), FC (FullyConnected), Switch (SW)."
            ) from None


_BLOCK_ALIASES: Dict[str, BlockKind] = {
    "ring": BlockKind.RING,
    "r": BlockKind.RING,
    "fc": BlockKind.FULLY_CONNECTED,
    "fullyconnected": BlockKind.FULLY_CONNECTED,
    "switch": BlockKind.SWITCH,
    "sw": BlockKind.SWITCH,
}

# Link traversals per message. Overridable per dimension via ``Dimension.hops``.
HOPS: Dict[BlockKind, int] = {
    BlockKind.RING: 1,
    BlockKind.FULLY_CONNECTED: 1,
    BlockKind.SWITCH: 2,
}

_TOKEN = re.compile(r"^\s*([A-Za-z]+)\s*\(\s*(-?\d+)\s*\)\s*$")


def hop_count(kind: BlockKind) -> int:
    """
    Return the number of link traversals a message makes inside a block.

    Parameters
    ----------
    kind : BlockKind
        Building block.

    Returns
    -------
    int
        ``1`` for Ring (neighbor link) and FullyConnected (direct link), ``2``
        for Switch (NPU to switch to NPU).
    """
    return HOPS[BlockKind(kind)]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Dimension:
    """
    One level of the hierarchy.

    Parameters
    ----------
    kind : BlockKind
        Building block joining this level.
    size : int
        Number of members joined by the block (``>= 2``).
    bandwidth : Fraction
        Per-NPU usable injection bandwidth into this dimension, bytes/s.
    latency : Fraction, default: 0
        Seconds per link traversal.
    hops : int, optional
        Overrides :data:`HOPS` for this dimension.
    """

    kind: BlockKind
    size: int
    bandwidth: Fraction
    latency: Fraction = Fraction(0)
    hops: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", BlockKind(self.kind))
        object.__setattr__(self, "bandwidth", exact(self.bandwidth))
        object.__setattr__(self, "latency", exact(self.latency))
        if isinstance(self.size, bool) or not isinstance(self.size, int):
            raise TopologyError(f"Dimension size must be an int, got {self.size!r}.")
        if self.size < 2:
            raise TopologyError(
                f"{self.kind.value}({self.size}): a dimension needs size >= 2."
            )
        if self.kind is BlockKind.SWITCH and not _is_power_of_two(self.size):
            raise TopologyError(
                f"Switch({self.size}): Switch dimensions must have a power-of-two "
                "size for halving-doubling."
            )
        if self.bandwidth <= 0:
            raise TopologyError(
                f"{self.kind.value}({self.size}): bandwidth must be positive."
            )
        if self.latency < 0:
            raise TopologyError(
                f"{self.kind.value}({self.size}): latency must be non-negative."
            )
        if self.hops is not None and (
            isinstance(self.hops, bool)
            or not isinstance(self.hops, int)
            or self.hops < 1
        ):
            raise TopologyError(f"hops must be an int >= 1, got {self.hops!r}.")

    @property
    def link_hops(self) -> int:
        return self.hops if self.hops is not None else hop_count(self.kind)

    @property
    def token(self) -> str:
        return f"{self.kind.value}({self.size})"

    @property
    def bandwidth_GBps(self) -> Fraction:
        return self.bandwidth / GBPS

    @property
    def latency_ns(self) -> Fraction:
        return self.latency * NS_PER_S


@dataclass(frozen=True)
class TopologySpec:
    """
    Ordered stack of dimensions, index 1 innermost.

    Instances are immutable and can be shared between concurrent simulations.
    """

    dims: Tuple[Dimension, ...]
    name: str = ""
    _strides: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        dims = tuple(self.dims)
        if not dims:
            raise TopologyError("A topology needs at least one dimension.")
        object.__setattr__(self, "dims", dims)
        strides = [1]
        for d in dims[:-1]:
            strides.append(strides[-1] * d.size)
        object.__setattr__(self, "_strides", tuple(strides))
        if not self.name:
            object.__setattr__(self, "name", self.text)

    # -------------- shape --------------

    @property
    def ndims(self) -> int:
        return len(self.dims)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(d.size for d in self.dims)

    @property
    def npu_count(self) -> int:
        return math.prod(self.sizes)

    @property
    def text(self) -> str:
        """Normalized compact notation, e.g. ``Ring(4)_Ring(2)``."""
        return "_".join(d.token for d in self.dims)

    def __str__(self) -> str:
        return self.text

    def dim(self, dim_index: int) -> Dimension:
        self._check_dim(dim_index)
        return self.dims[dim_index - 1]

    def stride(self, dim_index: int) -> int:
        self._check_dim(dim_index)
        return self._strides[dim_index - 1]

    def _check_dim(self, dim_index: int) -> None:
        if isinstance(dim_index, bool) or not isinstance(dim_index, (int, np.integer)):
            raise TopologyError(f"Dimension index must be an int, got {dim_index!r}.")
        if not 1 <= dim_index <= self.ndims:
            raise TopologyError(
                f"Dimension index {dim_index} out of range 1..{self.ndims} "
                f"for {self.text}."
            )

    def _check_rank(self, rank: int) -> None:
        if isinstance(rank, bool) or not isinstance(rank, (int, np.integer)):
            raise TopologyError(f"Rank must be an int, got {rank!r}.")
        if not 0 <= rank < self.npu_count:
            raise TopologyError(
                f"Rank {rank} out of range 0..{self.npu_count - 1} for {self.text}."
            )

    def check_scope(self, scope_dims: Sequence[int]) -> Tuple[int, ...]:
        """Validate a list of dimension indices and return it sorted ascending."""
        scope = tuple(int(d) for d in scope_dims)
        if not scope:
            raise TopologyError("Scope must name at least one dimension.")
        for d in scope:
            self._check_dim(d)
        if len(set(scope)) != len(scope):
            raise TopologyError(f"Scope {list(scope)} repeats a dimension.")
        return tuple(sorted(scope))

    def scope_size(self, scope_dims: Sequence[int]) -> int:
        return math.prod(self.dims[d - 1].size for d in self.check_scope(scope_dims))

    # -------------- addressing --------------

    def rank_to_coords(self, rank: int) -> Tuple[int, ...]:
        self._check_rank(rank)
        return tuple(int(c) for c in np.unravel_index(rank, self.sizes, order="F"))

    def coords_to_rank(self, coords: Sequence[int]) -> int:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.ndims:
            raise TopologyError(
                f"Expected {self.ndims} coordinates for {self.text}, got {len(coords)}."
            )
        for i, (c, k) in enumerate(zip(coords, self.sizes), start=1):
            if not 0 <= c < k:
                raise TopologyError(
                    f"Coordinate {c} out of range 0..{k - 1} in dim {i}."
                )
        return int(np.ravel_multi_index(coords, self.sizes, order="F"))

    def dim_group(self, rank: int, dim_index: int) -> List[int]:
        """Ranks differing from ``rank`` only in ``dim_index``, by that coordinate."""
        coords = self.rank_to_coords(rank)
        stride = self.stride(dim_index)
        base = rank - coords[dim_index - 1] * stride
        return [base + j * stride for j in range(self.dims[dim_index - 1].size)]

    def dim_position(self, rank: int, dim_index: int) -> int:
        self._check_rank(rank)
        return (rank // self.stride(dim_index)) % self.dims[dim_index - 1].size

    def scope_group(self, rank: int, scope_dims: Sequence[int]) -> List[int]:
        """
        Ranks agreeing with ``rank`` on every coordinate outside ``scope_dims``.

        Ordered mixed-radix over the scoped coordinates, the lowest scoped
        dimension varying fastest.
        """
        scope = self.check_scope(scope_dims)
        coords = list(self.rank_to_coords(rank))
        base = rank - sum(coords[d - 1] * self._strides[d - 1] for d in scope)
        out = [base]
        for d in scope:
            stride = self._strides[d - 1]
            out = [r + j * stride for j in range(self.dims[d - 1].size) for r in out]
        return out

    def scoped_coords(self, rank: int, scope_dims: Sequence[int]) -> Tuple[int, ...]:
        coords = self.rank_to_coords(rank)
        return tuple(coords[d - 1] for d in self.check_scope(scope_dims))

    def pair_dimension(self, src: int, dst: int) -> int:
        """
        Dimension a message from ``src`` to ``dst`` travels over.

        When the two ranks differ in more than one coordinate the outermost
        differing dimension is used.
        """
        if src == dst:
            raise TopologyError(f"src and dst are the same rank {src}.")
        a = self.rank_to_coords(src)
        b = self.rank_to_coords(dst)
        return max(i for i in range(1, self.ndims + 1) if a[i - 1] != b[i - 1])

    def all_dim_groups(self, dim_index: int) -> np.ndarray:
        """All groups of ``dim_index`` as a ``(npu_count / k, k)`` array of ranks."""
        k = self.dim(dim_index).size
        ranks = np.arange(self.npu_count, dtype=np.int64).reshape(self.sizes, order="F")
        moved = np.moveaxis(ranks, dim_index - 1, -1)
        return moved.reshape(-1, k, order="F")

    def with_bandwidths(self, bandwidths: Sequence[Number]) -> "TopologySpec":
        if len(bandwidths) != self.ndims:
            raise TopologyError(
                f"{len(bandwidths)} bandwidths given for {self.ndims} dimensions."
            )
        dims = tuple(
            Dimension(d.kind, d.size, exact(bw), d.latency, d.hops)
            for d, bw in zip(self.dims, bandwidths)
        )
        return TopologySpec(dims)

    def describe(self) -> str:
        lines = [f"{self.text}  ({self.npu_count} NPUs)"]
        for i, d in enumerate(self.dims, start=1):
            lines.append(
                f"  dim {i}: {d.token:<12} bw {float(d.bandwidth_GBps):10.2f} GB/s"
                f"  latency {float(d.latency_ns):8.1f} ns  hops {d.link_hops}"
            )
        return "\n".join(lines)


# -------------- public API --------------


def parse_topology(
    spec_text: str,
    bandwidths: Sequence[Number],
    latencies: Optional[Sequence[Number]] = None,
    hops: Optional[Sequence[Optional[int]]] = None,
    name: str = "",
) -> TopologySpec:
    """
    Parse the compact notation into a :class:`TopologySpec`.

    Parameters
    ----------
    spec_text : str
        ``_``-separated ``Block(size)`` tokens, innermost first.
    bandwidths : sequence of number
        Per-dimension bandwidth in bytes/s.
    latencies : sequence of number, optional
        Per-dimension link latency in seconds. Defaults to zeros.
    hops : sequence of int or None, optional
        Per-dimension hop overrides.
    name : str, optional
        Display name; defaults to the normalized notation.

    Returns
    -------
    TopologySpec

    Raises
    ------
    TopologyError
        Unknown block token, size < 2, non-power-of-two Switch, or list-length
        mismatch.
    """
    if not isinstance(spec_text, str) or not spec_text.strip():
        raise TopologyError("Topology text is empty.")
    tokens = spec_text.strip().split("_")
    parsed: List[Tuple[BlockKind, int]] = []
    for tok in tokens:
        m = _TOKEN.match(tok)
        if m is None:
            raise TopologyError(f"Malformed topology token {tok!r} in {spec_text!r}.")
        parsed.append((BlockKind.parse(m.group(1)), int(m.group(2))))

    n = len(parsed)
    if len(bandwidths) != n:
        raise TopologyError(
            f"{spec_text}: {n} dimensions but {len(bandwidths)} bandwidths."
        )
    if latencies is None:
        latencies = [0] * n
    if len(latencies) != n:
        raise TopologyError(
            f"{spec_text}: {n} dimensions but {len(latencies)} latencies."
        )
    if hops is None:
        hops = [None] * n
    if len(hops) != n:
        raise TopologyError(f"{spec_text}: {n} dimensions but {len(hops)} hop values.")

    dims = tuple(
        Dimension(kind, size, exact(bw), exact(lat), h)
        for (kind, size), bw, lat, h in zip(parsed, bandwidths, latencies, hops)
    )
    return TopologySpec(dims, name=name)


def rank_to_coords(rank: int, spec: TopologySpec) -> Tuple[int, ...]:
    return spec.rank_to_coords(rank)


def coords_to_rank(coords: Sequence[int], spec: TopologySpec) -> int:
    return spec.coords_to_rank(coords)


def dim_group(rank: int, dim_index: int, spec: TopologySpec) -> List[int]:
    return spec.dim_group(rank, dim_index)


def topology_from_dict(cfg: dict) -> TopologySpec:
    """
    Build a topology from its config-file form.

    Two layouts are accepted::

        {"dims": [{"kind": "Ring", "size": 4, "bandwidth_GBps": 100,
                   "latency_ns": 0, "hops": 1}, ...]}
        {"spec": "Ring(4)_Ring(2)", "bandwidth_GBps": [100, 50],
         "latency_ns": [0, 0]}

    Bandwidths are in GB/s (``2**30`` bytes/s) and latencies in nanoseconds.
    """
    name = str(cfg.get("name", ""))
    if "dims" in cfg:
        dims = []
        for i, d in enumerate(cfg["dims"], start=1):
            try:
                kind = BlockKind.parse(str(d["kind"]))
                size = d["size"]
                bw = exact(d["bandwidth_GBps"]) * GBPS
            except KeyError as err:
                raise TopologyError(f"topology.dims[{i}] is missing {err}.") from None
            lat = exact(d.get("latency_ns", 0)) / NS_PER_S
            dims.append(Dimension(kind, size, bw, lat, d.get("hops")))
        return TopologySpec(tuple(dims), name=name)
    if "spec" in cfg:
        text = cfg["spec"]
        bws = cfg.get("bandwidth_GBps")
        if bws is None:
            raise TopologyError(
                "topology.bandwidth_GBps is required with topology.spec."
            )
        n = len(text.split("_"))
        if not isinstance(bws, list):
            bws = [bws] * n
        lats = cfg.get("latency_ns", 0)
        if not isinstance(lats, list):
            lats = [lats] * n
        return parse_topology(
            text,
            [exact(b) * GBPS for b in bws],
            [exact(x) / NS_PER_S for x in lats],
            cfg.get("hops"),
            name=name,
        )
    raise TopologyError("topology needs either 'dims' or 'spec'.")


def topology_to_dict(spec: TopologySpec) -> dict:
    return {
        "name": spec.name,
        "dims": [
            {
                "kind": d.kind.value,
                "size": d.size,
                "bandwidth_GBps": render_exact(d.bandwidth_GBps),
                "latency_ns": render_exact(d.latency_ns),
                "hops": d.link_hops,
            }
            for d in spec.dims
        ],
    }
