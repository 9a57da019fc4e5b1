#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Unit constants and exact-arithmetic helpers.

Sizes are binary (1 MB = 2**20 bytes, 1 GB/s = 2**30 bytes/s) and compute
throughput is decimal (1 TFLOPS = 1e12 FLOP/s). The simulation clock counts
integer nanoseconds; every conversion into the clock rounds up.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Number = Union[int, float, str, Fraction]

KIB = 2**10
MIB = 2**20  # "MB" in reports and config files
GIB = 2**30

GBPS = 2**30  # 1 GB/s in bytes per second
TFLOPS = 10**12  # 1 TFLOPS in FLOP per second

NS_PER_S = 10**9
NS_PER_US = 10**3

__all__ = [
    "KIB",
    "MIB",
    "GIB",
    "GBPS",
    "TFLOPS",
    "NS_PER_S",
    "NS_PER_US",
    "exact",
    "ceil_ns",
    "seconds_to_ns",
    "ns_to_us",
    "bytes_to_mb",
    "render_exact",
    "parse_exact",
]


def exact(x: Number) -> Fraction:
    """
    Convert a number to an exact ``Fraction``.

    Floats go through their shortest decimal repr so ``0.1`` becomes ``1/10``
    rather than the binary approximation.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


def ceil_ns(x: Fraction) -> int:
    """Round a nanosecond quantity up to the integer clock."""
    return -((-x.numerator) // x.denominator)


def seconds_to_ns(seconds: Number) -> int:
    return ceil_ns(exact(seconds) * NS_PER_S)


def ns_to_us(ns: Number) -> float:
    return float(exact(ns) / NS_PER_US)


def bytes_to_mb(nbytes: Number) -> Fraction:
    return exact(nbytes) / MIB


def render_exact(x: Number):
    """
    Render an exact number for JSON output.

    Integral values become ``int``; everything else becomes a ``"p/q"`` string
    so that no precision is lost on the way to disk.
    """
    x = exact(x)
    if x.denominator == 1:
        return int(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_exact(value) -> Fraction:
    """Inverse of :func:`render_exact`; also accepts plain ints and floats."""
    if isinstance(value, str):
        return Fraction(value.strip())
    return exact(value)
