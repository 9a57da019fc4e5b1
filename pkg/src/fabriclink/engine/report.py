#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Run reports and the five-way exposed-time breakdown.

Time attribution walks the elementary intervals between all activity
boundaries of an NPU. Each interval goes to the first active category in
``compute > local_mem > remote_mem > comm``; intervals with no activity,
including the tail up to the global makespan, are idle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from ..units import MIB, ns_to_us, render_exact

CATEGORIES = ("compute", "local_mem", "remote_mem", "comm")
COMPONENTS = (
    "compute",
    "exposed_local_mem",
    "exposed_remote_mem",
    "exposed_comm",
    "exposed_idle",
)

Interval = Tuple[int, int]


@dataclass(frozen=True)
class Breakdown:
    """Per-NPU time components in integer ns; they sum to the makespan."""

    compute: int = 0
    exposed_local_mem: int = 0
    exposed_remote_mem: int = 0
    exposed_comm: int = 0
    exposed_idle: int = 0

    @property
    def total(self) -> int:
        return (
            self.compute
            + self.exposed_local_mem
            + self.exposed_remote_mem
            + self.exposed_comm
            + self.exposed_idle
        )

    def to_dict(self) -> Dict[str, int]:
        return {name: getattr(self, name) for name in COMPONENTS}

    def __add__(self, other: "Breakdown") -> "Breakdown":
        return Breakdown(
            *(getattr(self, n) + getattr(other, n) for n in COMPONENTS)
        )


def attribute_intervals(
    intervals: Dict[str, Sequence[Interval]], makespan: int
) -> Breakdown:
    """
    Split ``[0, makespan)`` of one NPU into the five components.

    Parameters
    ----------
    intervals : dict
        ``category -> [(start_ns, end_ns), ...]`` for the categories in
        :data:`CATEGORIES`; intervals may overlap.
    makespan : int
        Global end time in ns.
    """
    if makespan <= 0:
        return Breakdown()
    points = [0, makespan]
    for cat in CATEGORIES:
        for a, b in intervals.get(cat, ()):
            points.append(a)
            points.append(b)
    bounds = np.unique(np.asarray(points, dtype=np.int64))
    seg = np.diff(bounds)
    covered = np.zeros(seg.shape, dtype=bool)
    parts = []
    for cat in CATEGORIES:
        iv = np.asarray(intervals.get(cat, ()), dtype=np.int64).reshape(-1, 2)
        iv = iv[iv[:, 1] > iv[:, 0]]
        delta = np.zeros(bounds.shape, dtype=np.int64)
        np.add.at(delta, np.searchsorted(bounds, iv[:, 0]), 1)
        np.add.at(delta, np.searchsorted(bounds, iv[:, 1]), -1)
        active = np.cumsum(delta)[:-1] > 0
        parts.append(int(seg[active & ~covered].sum()))
        covered |= active
    parts.append(int(seg[~covered].sum()))
    return Breakdown(*parts)


@dataclass(frozen=True)
class DimTraffic:
    dim: int
    kind: str
    bytes_per_npu: Fraction
    bytes_total: Fraction

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "kind": self.kind,
            "bytes_per_npu": render_exact(self.bytes_per_npu),
            "bytes_total": render_exact(self.bytes_total),
        }


@dataclass(frozen=True)
class CollectiveRecord:
    tag: int
    kind: str
    bytes: Fraction
    scope_dims: Tuple[int, ...]
    start: int
    end: int
    groups: int = 1

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "kind": self.kind,
            "bytes": render_exact(self.bytes),
            "scope_dims": list(self.scope_dims),
            "start_ns": self.start,
            "end_ns": self.end,
            "groups": self.groups,
        }


@dataclass
class RunReport:
    """
    Result of one simulation.

    ``breakdowns`` holds one entry per NPU, each summing to ``makespan``.
    """

    name: str
    topology: str
    npu_count: int
    makespan: int
    breakdowns: List[Breakdown]
    dim_traffic: List[DimTraffic] = field(default_factory=list)
    collectives: List[CollectiveRecord] = field(default_factory=list)
    mode: str = "full"
    events: int = 0
    nodes: int = 0

    def aggregate(self) -> Breakdown:
        """Component-wise sum over NPUs."""
        total = Breakdown()
        for b in self.breakdowns:
            total = total + b
        return total

    def mean(self) -> Dict[str, Fraction]:
        agg = self.aggregate().to_dict()
        n = max(1, len(self.breakdowns))
        return {k: Fraction(v, n) for k, v in agg.items()}

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "topology": self.topology,
            "npu_count": self.npu_count,
            "mode": self.mode,
            "events": self.events,
            "nodes": self.nodes,
            "makespan_ns": self.makespan,
            "aggregate_ns": self.aggregate().to_dict(),
            "per_npu_ns": [b.to_dict() for b in self.breakdowns],
            "dim_traffic": [t.to_dict() for t in self.dim_traffic],
            "collectives": [c.to_dict() for c in self.collectives],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(self.to_json(), encoding="utf-8")
        return path

    def summary_row(self) -> Dict[str, float]:
        """Makespan and mean breakdown in microseconds, for sweep tables."""
        row = {"makespan_us": round(ns_to_us(self.makespan), 2)}
        for k, v in self.mean().items():
            row[f"{k}_us"] = round(ns_to_us(v), 2)
        return row

    def render(self) -> str:
        lines = [
            f"Scenario   {self.name}",
            f"Topology   {self.topology}  ({self.npu_count} NPUs, {self.mode} replay)",
            f"Makespan   {ns_to_us(self.makespan):.2f} us",
            "",
            "Breakdown (mean per NPU)",
        ]
        for k, v in self.mean().items():
            lines.append(f"  {k:<20} {ns_to_us(v):>14.2f} us")
        if self.dim_traffic:
            lines += ["", "Traffic per dimension", f"  {'dim':<4}{'block':<8}"
                      f"{'MB per NPU':>14}{'MB total':>16}"]
            for t in self.dim_traffic:
                lines.append(
                    f"  {t.dim:<4}{t.kind:<8}{float(t.bytes_per_npu / MIB):>14.2f}"
                    f"{float(t.bytes_total / MIB):>16.2f}"
                )
        if self.collectives:
            lines += ["", f"Collectives ({len(self.collectives)})"]
            for c in self.collectives[:16]:
                lines.append(
                    f"  tag {c.tag:<6} {c.kind:<14} {float(c.bytes / MIB):>10.2f} MB "
                    f"{ns_to_us(c.start):>12.2f} -> {ns_to_us(c.end):.2f} us"
                )
            if len(self.collectives) > 16:
                lines.append(f"  ... {len(self.collectives) - 16} more")
        return "\n".join(lines)
