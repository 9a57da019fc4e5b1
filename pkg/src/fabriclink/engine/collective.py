#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Drives one NPU's role in a collective over the network backend.

The payload is split into ``plan.chunk_count`` chunks that flow through the
plan's stages like a pipeline: chunk ``c`` enters stage ``s`` once it has
left stage ``s - 1`` and chunk ``c - 1`` has left stage ``s``. Inside a stage
the algorithm steps run one after another; a step ends when every send of
this NPU has completed and every receive has arrived.

In mirrored mode only this NPU is simulated. Its peers are assumed to do the
same thing at the same time, so receives are not posted and a step ends when
the last of its own sends arrives.
"""

from __future__ import annotations

from typing import Callable, Hashable, List

from ..collectives import CollectivePlan
from ..network import AnalyticalNetwork


class CollectiveDriver:
    """
    Parameters
    ----------
    net : AnalyticalNetwork
    rank : int
        The NPU whose role is driven.
    plan : CollectivePlan
    key : hashable
        Identifies the collective instance; combined with chunk, stage and
        step to derive message tags shared by every group member.
    tagger : callable
        Maps such a key to a network tag.
    on_done : callable
        Fired once every chunk has left the last stage.
    mirror : bool, default: False
    """

    def __init__(
        self,
        net: AnalyticalNetwork,
        rank: int,
        plan: CollectivePlan,
        key: Hashable,
        tagger: Callable[[Hashable], Hashable],
        on_done: Callable[[], None],
        mirror: bool = False,
    ):
        self.net = net
        self.rank = rank
        self.plan = plan
        self.key = key
        self.tagger = tagger
        self.on_done = on_done
        self.mirror = mirror
        topo = net.topology
        self.chunks = plan.chunk_count
        self.stages = plan.stages
        self.groups: List[List[int]] = [
            topo.dim_group(rank, st.dim_index) for st in self.stages
        ]
        self.positions: List[int] = [
            topo.dim_position(rank, st.dim_index) for st in self.stages
        ]
        self._left = [0] * self.chunks  # stages each chunk has left
        self._busy = [False] * len(self.stages)
        self._next = [0] * len(self.stages)
        self._completed = 0

    def start(self) -> None:
        self._try_enter(0)

    def _try_enter(self, s: int) -> None:
        if s >= len(self.stages) or self._busy[s]:
            return
        c = self._next[s]
        if c >= self.chunks or self._left[c] != s:
            return
        self._busy[s] = True
        self._next[s] += 1
        self._step(c, s, 0)

    def _step(self, c: int, s: int, t: int) -> None:
        stage = self.stages[s]
        group = self.groups[s]
        pos = self.positions[s]
        sends = stage.sends_from(t, pos)
        recvs = () if self.mirror else stage.recvs_to(t, pos)
        remaining = [len(sends) + len(recvs)]
        if remaining[0] == 0:
            self._step_done(c, s, t)
            return

        def one():
            remaining[0] -= 1
            if remaining[0] == 0:
                self._step_done(c, s, t)

        tag = self.tagger((self.key, c, s, t))
        for ps in sends:
            nbytes = ps.bytes / self.chunks
            if self.mirror:
                self.net.sim_mirror_send(nbytes, self.rank, group[ps.dst], tag, one)
            else:
                self.net.sim_send(nbytes, self.rank, group[ps.dst], tag, one)
        for ps in recvs:
            nbytes = ps.bytes / self.chunks
            self.net.sim_recv(nbytes, group[ps.src], self.rank, tag, one)

    def _step_done(self, c: int, s: int, t: int) -> None:
        if t + 1 < self.stages[s].num_steps:
            self._step(c, s, t + 1)
            return
        self._busy[s] = False
        self._left[c] = s + 1
        if s + 1 == len(self.stages):
            self._completed += 1
            if self._completed == self.chunks:
                self.on_done()
                return
        self._try_enter(s)
        self._try_enter(s + 1)
