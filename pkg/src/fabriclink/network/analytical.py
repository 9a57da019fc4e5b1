#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Analytical network backend.

A message of ``B`` bytes over a link takes

    latency * hops + B / bandwidth

rounded up to the nanosecond. The only shared resource is the sender's
per-dimension injection port: matched transfers occupy it in FIFO order for
their serialization time ``B / bandwidth``. There is no congestion model
beyond that.

The API mirrors a simulator network layer:

- ``sim_schedule(delta, action)``
- ``sim_send(bytes, src, dst, tag, action)`` / ``sim_recv(...)`` rendezvous on
  ``(src, dst, tag)``; the send action fires when serialization ends, the recv
  action when the whole message has arrived.
- ``run_until_idle()`` drains the queue and reports parked operations as a
  deadlock.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Deque, Dict, Hashable, List, Optional, Tuple, Union

from ..topology import TopologySpec
from ..units import NS_PER_S, Number, ceil_ns, exact, render_exact
from .events import EventCore

Action = Callable[[], None]


class ContractError(RuntimeError):
    """Raised when the two sides of a communication disagree."""


class DeadlockError(RuntimeError):
    """
    Raised when the simulation drains with operations still parked.

    Attributes
    ----------
    parked : list of str
        One description per parked operation.
    """

    def __init__(self, parked: List[str], time_ns: int = 0, extra: str = ""):
        self.parked = list(parked)
        self.time_ns = time_ns
        head = "; ".join(self.parked[:8])
        more = f" (+{len(self.parked) - 8} more)" if len(self.parked) > 8 else ""
        msg = f"Deadlock at t={time_ns} ns: {len(self.parked)} parked operation(s): "
        msg += head + more
        if extra:
            msg += f". {extra}"
        super().__init__(msg)


@dataclass(frozen=True)
class LinkModel:
    bandwidth: Fraction
    latency: Fraction = Fraction(0)
    hops: int = 1

    def __post_init__(self):
        object.__setattr__(self, "bandwidth", exact(self.bandwidth))
        object.__setattr__(self, "latency", exact(self.latency))
        if self.bandwidth <= 0:
            raise ValueError("LinkModel bandwidth must be positive.")
        if self.latency < 0:
            raise ValueError("LinkModel latency must be non-negative.")
        if self.hops < 1:
            raise ValueError("LinkModel hops must be >= 1.")


def transfer_time(nbytes: Number, link: LinkModel) -> int:
    """
    Latency-bandwidth delay of one message, in integer nanoseconds.

    Parameters
    ----------
    nbytes : number
        Message size in bytes (``>= 0``).
    link : LinkModel

    Returns
    -------
    int
        ``ceil((latency * hops + nbytes / bandwidth) * 1e9)``.
    """
    b = exact(nbytes)
    if b < 0:
        raise ValueError("message size must be non-negative")
    return ceil_ns((link.latency * link.hops + b / link.bandwidth) * NS_PER_S)


def serialization_time(nbytes: Number, link: LinkModel) -> int:
    return ceil_ns(exact(nbytes) / link.bandwidth * NS_PER_S)


@dataclass
class _Parked:
    side: str
    nbytes: Fraction
    action: Action
    posted_at: int
    on_match: Optional[Action] = None


class AnalyticalNetwork:
    """
    Rendezvous message layer over an :class:`EventCore`.

    Parameters
    ----------
    topology : TopologySpec
        Supplies the link model for every rank pair.
    core : EventCore, optional
        Shared event core; a fresh one is created when omitted.
    record_events : bool, default: False
        Keep one record per send completion for :meth:`write_event_log`.
    verbose : bool, default: False
    """

    def __init__(
        self,
        topology: TopologySpec,
        core: Optional[EventCore] = None,
        record_events: bool = False,
        verbose: bool = False,
    ):
        self.topology = topology
        self.core = core if core is not None else EventCore()
        self.record_events = record_events
        self.verbose = verbose
        self.events: List[dict] = []
        self.links: Tuple[LinkModel, ...] = tuple(
            LinkModel(d.bandwidth, d.latency, d.link_hops) for d in topology.dims
        )
        self._port_free: Dict[Tuple[int, int], int] = {}
        self._parked: Dict[Tuple[int, int, Hashable], Deque[_Parked]] = {}
        self.sent_bytes: Dict[Tuple[int, int], Fraction] = {}
        self.messages = 0

    # -------------- clock --------------

    @property
    def now(self) -> int:
        return self.core.now

    def sim_schedule(self, delta: int, action: Action) -> None:
        self.core.schedule(delta, action)

    # -------------- point-to-point --------------

    def link(self, dim_index: int) -> LinkModel:
        return self.links[dim_index - 1]

    def _check_pair(self, src: int, dst: int) -> int:
        if src == dst:
            raise ContractError(f"send from rank {src} to itself")
        return self.topology.pair_dimension(src, dst)

    def sim_send(
        self, nbytes: Number, src: int, dst: int, tag: Hashable, action: Action
    ) -> None:
        self._post("send", exact(nbytes), src, dst, tag, action)

    def sim_recv(
        self,
        nbytes: Number,
        src: int,
        dst: int,
        tag: Hashable,
        action: Action,
        on_match: Optional[Action] = None,
    ) -> None:
        """
        Post a receive. ``action`` fires on arrival; ``on_match`` fires when
        the matching send is posted (or immediately if it already was).
        """
        self._post("recv", exact(nbytes), src, dst, tag, action, on_match)

    def _post(self, side, nbytes, src, dst, tag, action, on_match=None) -> None:
        self._check_pair(src, dst)
        if nbytes < 0:
            raise ContractError(
                f"negative message size {nbytes} ({src}->{dst}, tag {tag})"
            )
        key = (src, dst, tag)
        queue = self._parked.get(key)
        if queue and queue[0].side != side:
            other = queue.popleft()
            if not queue:
                del self._parked[key]
            if other.nbytes != nbytes:
                raise ContractError(
                    f"size mismatch on {src}->{dst} tag {tag}: "
                    f"{other.side} posted {other.nbytes} bytes, {side} posted {nbytes}"
                )
            matched = on_match if side == "recv" else other.on_match
            if matched is not None:
                matched()
            if side == "send":
                self._start(nbytes, src, dst, tag, action, other.action)
            else:
                self._start(nbytes, src, dst, tag, other.action, action)
            return
        self._parked.setdefault(key, deque()).append(
            _Parked(side, nbytes, action, self.now, on_match)
        )

    def _occupy(self, nbytes: Fraction, src: int, dim: int) -> Tuple[int, int, int]:
        link = self.links[dim - 1]
        port = (src, dim)
        start = max(self.now, self._port_free.get(port, 0))
        ser_end = start + serialization_time(nbytes, link)
        self._port_free[port] = ser_end
        arrival = start + transfer_time(nbytes, link)
        self.sent_bytes[port] = self.sent_bytes.get(port, Fraction(0)) + nbytes
        self.messages += 1
        return start, ser_end, arrival

    def _start(self, nbytes, src, dst, tag, on_sent: Action, on_arrival: Action):
        dim = self.topology.pair_dimension(src, dst)
        _, ser_end, arrival = self._occupy(nbytes, src, dim)

        def sent():
            self._record(src, dst, dim, nbytes, tag)
            on_sent()

        self.core.schedule_at(ser_end, sent)
        self.core.schedule_at(arrival, on_arrival)

    def sim_mirror_send(
        self, nbytes: Number, src: int, dst: int, tag: Hashable, action: Action
    ) -> None:
        """
        Start a send whose matching receive is assumed posted at the same time.

        ``action`` fires on arrival. Used by symmetry-reduced replay, where only
        one representative NPU is simulated and every peer mirrors it.
        """
        nbytes = exact(nbytes)
        dim = self._check_pair(src, dst)
        _, ser_end, arrival = self._occupy(nbytes, src, dim)
        if self.record_events:
            self.core.schedule_at(
                ser_end, lambda: self._record(src, dst, dim, nbytes, tag)
            )
        self.core.schedule_at(arrival, action)

    def _record(self, src, dst, dim, nbytes, tag) -> None:
        if self.record_events:
            self.events.append(
                {
                    "time_ns": self.now,
                    "src": src,
                    "dst": dst,
                    "dim": dim,
                    "bytes": render_exact(nbytes),
                    "tag": tag if isinstance(tag, int) else str(tag),
                }
            )

    # -------------- driving --------------

    def parked(self) -> List[str]:
        out = []
        for (src, dst, tag), queue in sorted(
            self._parked.items(), key=lambda kv: (kv[0][0], kv[0][1], str(kv[0][2]))
        ):
            for op in queue:
                out.append(
                    f"{op.side} ({src}->{dst}, tag {tag}, {render_exact(op.nbytes)} B, "
                    f"posted at {op.posted_at} ns)"
                )
        return out

    def run_until_idle(self) -> int:
        """
        Process events until none remain.

        Returns
        -------
        int
            Final simulated time in ns.

        Raises
        ------
        DeadlockError
            If sends or receives are still waiting for their counterpart.
        """
        self.core.run()
        if self._parked:
            raise DeadlockError(self.parked(), self.now)
        if self.verbose:
            self._log(
                f"idle at t={self.now} ns after {self.core.processed} events, "
                f"{self.messages} messages"
            )
        return self.now

    def _log(self, *a):
        print("[Network]", *a)

    def write_event_log(self, path: Union[str, Path]) -> Path:
        """Write the recorded send completions as JSON lines."""
        path = Path(path)
        with path.open("w", encoding="utf-8") as fh:
            for rec in self.events:
                fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")
        return path
