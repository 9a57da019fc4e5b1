#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Graph-based execution engine.

Every NPU replays its trace DAG on one shared event core. Ready nodes issue
immediately and run to completion:

- ``Compute``: roofline time.
- ``MemoryAccess``: local HBM model, or the pooled remote model when
  ``location == "remote"``.
- ``CollectiveComm``: hierarchical plan driven step by step over the network.
- ``PeerComm``: a single send or receive.

When every NPU holds the same trace and there is no point-to-point traffic the
engine can replay rank 0 alone and replicate its result (``symmetry``).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Hashable, List, Optional, Tuple, Union

from ..collectives import CollectiveKind, CollectivePlan, plan_collective
from ..collectives.planner import DEFAULT_CHUNKS
from ..config.validate import SYMMETRY_MODES, ConfigError, ValidationError
from ..memory import MemoryPoolSpec, local_access_time, pool_access_time
from ..network import AnalyticalNetwork, ContractError, DeadlockError
from ..topology import TopologyError, TopologySpec
from ..workloads import NodeKind, TraceFile, TraceNode, is_symmetric, validate_trace
from .collective import CollectiveDriver
from .npu import NpuSpec, NpuState, __schedulers__, roofline_time
from .report import (
    CollectiveRecord,
    DimTraffic,
    RunReport,
    attribute_intervals,
)


@dataclass
class _Group:
    """Bookkeeping for one collective tag."""

    kind: CollectiveKind
    nbytes: Fraction
    scope: Tuple[int, ...]
    members: Dict[Tuple[int, ...], int] = field(default_factory=dict)
    start: Optional[int] = None
    end: int = 0


class Simulator:
    """
    Parameters
    ----------
    topology : TopologySpec
    trace : TraceFile
        Must cover exactly ``topology.npu_count`` NPUs.
    npu : NpuSpec, optional
    pool : MemoryPoolSpec, optional
        Required when the trace has remote memory accesses.
    chunks : int, default: 64
        Pipelining chunks per collective.
    scheduler : str, default: "fifo"
        Issue order among nodes that become ready together.
    symmetry : {"auto", "on", "off"}, default: "auto"
    name : str, optional
    record_events : bool, default: False
        Keep the per-send event log.
    verbose : bool, default: False
    """

    def __init__(
        self,
        topology: TopologySpec,
        trace: TraceFile,
        npu: Optional[NpuSpec] = None,
        pool: Optional[MemoryPoolSpec] = None,
        chunks: int = DEFAULT_CHUNKS,
        scheduler: str = "fifo",
        symmetry: str = "auto",
        name: str = "",
        record_events: bool = False,
        verbose: bool = False,
    ):
        self.topology = topology
        self.trace = trace
        self.npu = npu if npu is not None else NpuSpec()
        self.pool = pool
        self.chunks = chunks
        self.name = name or "unnamed"
        self.verbose = verbose
        if scheduler not in __schedulers__:
            raise ConfigError(
                ValidationError(
                    "scheduler",
                    f"unknown scheduler {scheduler!r}; "
                    f"expected one of {sorted(__schedulers__)}",
                )
            )
        self.policy = __schedulers__[scheduler]()
        if symmetry not in SYMMETRY_MODES:
            raise ConfigError(
                ValidationError("symmetry", f"must be one of {list(SYMMETRY_MODES)}")
            )
        self.static_checks()
        eligible = self.symmetry_eligible()
        if symmetry == "on" and not eligible:
            raise ConfigError(
                ValidationError(
                    "symmetry",
                    "reduced replay needs identical per-NPU traces without PeerComm",
                )
            )
        self.reduced = eligible and symmetry != "off"
        self.net = AnalyticalNetwork(
            topology, record_events=record_events, verbose=verbose
        )
        self.plans: Dict[tuple, CollectivePlan] = {}
        self._groups: Dict[int, _Group] = {}
        self._tags: Dict[Hashable, int] = {}
        self._intervals: List[Dict[str, List[Tuple[int, int]]]] = []
        self._finish: List[int] = []
        self._states: List[NpuState] = []

    @classmethod
    def from_config(cls, config, trace: Optional[TraceFile] = None, verbose=False):
        """Build from a :class:`~fabriclink.config.ScenarioConfig`."""
        if trace is None:
            trace = config.load_trace()
        return cls(
            config.topology,
            trace,
            npu=config.npu,
            pool=config.pool,
            chunks=config.chunks,
            scheduler=config.scheduler,
            symmetry=config.symmetry,
            name=config.name,
            record_events=config.event_log is not None,
            verbose=verbose,
        )

    # -------------- static checks --------------

    def static_checks(self) -> None:
        """
        Checks that need no simulation.

        Raises
        ------
        ConfigError
            Aggregated problems: NPU-count mismatch, invalid collective scopes,
            remote accesses without a pool, in-switch accesses on the
            ``zero-infinity`` model and out-of-range peers.
        """
        validate_trace(self.trace)
        errors: List[ValidationError] = []
        n = self.topology.npu_count
        if self.trace.npu_count != n:
            errors.append(
                ValidationError(
                    "trace",
                    f"trace has {self.trace.npu_count} NPUs, "
                    f"topology {self.topology.text} has {n}",
                )
            )
            raise ConfigError(errors)
        seen_scopes = set()
        for node in self.trace.nodes:
            where = f"trace node {node.id} on npu {node.npu}"
            if node.kind is NodeKind.COLLECTIVE:
                scope = node["scope_dims"]
                if scope in seen_scopes:
                    continue
                seen_scopes.add(scope)
                try:
                    self.topology.check_scope(scope)
                except TopologyError as err:
                    errors.append(ValidationError(where, str(err)))
            elif node.kind is NodeKind.MEMORY and node["location"] == "remote":
                if self.pool is None:
                    errors.append(
                        ValidationError(where, "remote memory access needs a pool")
                    )
                    break
                if node["in_switch"] and self.pool.remote_model == "zero-infinity":
                    errors.append(
                        ValidationError(
                            where, "in-switch access needs the hiermem pool model"
                        )
                    )
                    break
            elif node.kind is NodeKind.PEER:
                peer = node["peer"]
                if not 0 <= peer < n or peer == node.npu:
                    errors.append(ValidationError(where, f"invalid peer {peer}"))
        if errors:
            raise ConfigError(errors)

    def symmetry_eligible(self) -> bool:
        if any(node.kind is NodeKind.PEER for node in self.trace.nodes):
            return False
        return is_symmetric(self.trace)

    # -------------- dispatch --------------

    def _tagger(self, key: Hashable) -> int:
        tag = self._tags.get(key)
        if tag is None:
            tag = -(len(self._tags) + 1)
            self._tags[key] = tag
        return tag

    def _plan(self, kind, nbytes, scope) -> CollectivePlan:
        key = (kind, nbytes, scope)
        plan = self.plans.get(key)
        if plan is None:
            plan = plan_collective(kind, nbytes, self.topology, scope, self.chunks)
            self.plans[key] = plan
        return plan

    def dispatch(self, slot: int, state: NpuState, node_id: int) -> None:
        """Issue one ready node and register what happens when it completes."""
        state.issue(node_id)
        node = state.nodes[node_id]
        now = self.net.now
        rank = state.rank

        def done(category: str, start: Optional[int] = None):
            def _done():
                begin = now if start is None else start
                self._intervals[slot][category].append((begin, self.net.now))
                self._finish[slot] = max(self._finish[slot], self.net.now)
                for nid in self.policy.order(state.complete(node_id), state):
                    self.dispatch(slot, state, nid)

            return _done

        if node.kind is NodeKind.COMPUTE:
            dt = roofline_time(node["flops"], node["tensor_bytes"], self.npu)
            self.net.sim_schedule(dt, done("compute"))
        elif node.kind is NodeKind.MEMORY:
            if node["location"] == "local":
                dt = local_access_time(node["tensor_bytes"], self.npu.local_mem)
                self.net.sim_schedule(dt, done("local_mem"))
            else:
                dt = pool_access_time(
                    node["tensor_bytes"],
                    self.pool,
                    node["direction"],
                    node["in_switch"],
                )
                self.net.sim_schedule(dt, done("remote_mem"))
        elif node.kind is NodeKind.COLLECTIVE:
            self._collective(rank, node, done("comm"))
        else:
            self._peer(rank, node, done)

    def _collective(self, rank: int, node: TraceNode, on_done) -> None:
        kind = node["collective"]
        nbytes = node["comm_bytes"]
        scope = self.topology.check_scope(node["scope_dims"])
        tag = node["tag"]
        group = self._groups.get(tag)
        if group is None:
            group = self._groups[tag] = _Group(kind, nbytes, scope)
        elif (group.kind, group.nbytes, group.scope) != (kind, nbytes, scope):
            raise ContractError(
                f"collective tag {tag}: npu {rank} posted {kind.value} "
                f"{nbytes} B over {list(scope)}, group expects {group.kind.value} "
                f"{group.nbytes} B over {list(group.scope)}"
            )
        members = tuple(self.topology.scope_group(rank, scope))
        group.members[members] = group.members.get(members, 0) + 1
        now = self.net.now
        group.start = now if group.start is None else min(group.start, now)

        def finished():
            group.end = max(group.end, self.net.now)
            on_done()

        if nbytes == 0:
            self.net.sim_schedule(0, finished)
            return
        driver = CollectiveDriver(
            self.net,
            rank,
            self._plan(kind, nbytes, scope),
            tag,
            self._tagger,
            finished,
            mirror=self.reduced,
        )
        driver.start()

    def _peer(self, rank: int, node: TraceNode, done) -> None:
        peer = node["peer"]
        if node["direction"] == "send":
            self.net.sim_send(node["comm_bytes"], rank, peer, node["tag"], done("comm"))
            return
        matched = {}

        def on_match():
            matched["t"] = self.net.now

        def arrived():
            done("comm", matched.get("t", self.net.now))()

        self.net.sim_recv(
            node["comm_bytes"], peer, rank, node["tag"], arrived, on_match=on_match
        )

    # -------------- driving --------------

    def run(self, event_log: Union[str, Path, None] = None) -> RunReport:
        """
        Replay every trace to completion.

        Raises
        ------
        DeadlockError
            Communication left unmatched; collectives missing members are named.
        ContractError
            Mismatched sizes, or one tag posted as different collectives.
        """
        t0 = time.perf_counter()
        per_npu = self.trace.by_npu()
        ranks = [0] if self.reduced else list(range(self.topology.npu_count))
        for rank in ranks:
            self._states.append(NpuState(rank, per_npu[rank]))
            self._intervals.append({"compute": [], "local_mem": [], "remote_mem": [],
                                    "comm": []})
            self._finish.append(0)
        for slot, state in enumerate(self._states):
            for nid in self.policy.order(state.step_ready(), state):
                self.dispatch(slot, state, nid)
        try:
            self.net.run_until_idle()
        except DeadlockError as err:
            extra = self._missing_members()
            raise DeadlockError(err.parked, err.time_ns, extra) from None
        stuck = [s for s in self._states if not s.finished]
        if stuck:
            parked = [
                f"npu {s.rank} nodes {s.pending()[:8]} never completed" for s in stuck
            ]
            raise DeadlockError(parked, self.net.now, self._missing_members())

        makespan = max(self._finish, default=0)
        breakdowns = [attribute_intervals(iv, makespan) for iv in self._intervals]
        if self.reduced:
            breakdowns = breakdowns * self.topology.npu_count
        report = RunReport(
            name=self.name,
            topology=self.topology.text,
            npu_count=self.topology.npu_count,
            makespan=makespan,
            breakdowns=breakdowns,
            dim_traffic=self._dim_traffic(),
            collectives=self._collective_records(),
            mode="reduced" if self.reduced else "full",
            events=self.net.core.processed,
            nodes=len(self.trace.nodes),
        )
        if event_log is not None:
            self.net.write_event_log(event_log)
        if self.verbose:
            self._log(
                f"{report.mode} replay of {self.name} on {self.topology.text}: "
                f"makespan {makespan} ns, {report.events} events, "
                f"{time.perf_counter() - t0:.3f} s wall"
            )
        return report

    def _missing_members(self) -> str:
        if self.reduced:
            return ""
        out = []
        for tag, group in sorted(self._groups.items()):
            size = self.topology.scope_size(group.scope)
            for members, posted in sorted(group.members.items()):
                if posted < size:
                    out.append(
                        f"collective tag {tag} on ranks {list(members)[:8]} "
                        f"posted by {posted} of {size} members"
                    )
        return "; ".join(out[:8])

    def _dim_traffic(self) -> List[DimTraffic]:
        n = self.topology.npu_count
        out = []
        for i, dim in enumerate(self.topology.dims, start=1):
            sent = [
                self.net.sent_bytes.get((s.rank, i), Fraction(0)) for s in self._states
            ]
            per_npu = max(sent, default=Fraction(0))
            total = per_npu * n if self.reduced else sum(sent, Fraction(0))
            out.append(DimTraffic(i, dim.kind.value, per_npu, total))
        return out

    def _collective_records(self) -> List[CollectiveRecord]:
        n = self.topology.npu_count
        out = []
        for tag, g in sorted(self._groups.items()):
            groups = n // self.topology.scope_size(g.scope) if self.reduced else len(
                g.members
            )
            out.append(
                CollectiveRecord(
                    tag, g.kind.value, g.nbytes, g.scope, g.start or 0, g.end, groups
                )
            )
        return out

    def _log(self, *a):
        print("[Engine]", *a)


def run_simulation(
    config, trace: Optional[TraceFile] = None, verbose: bool = False
) -> RunReport:
    """
    Run one scenario.

    Parameters
    ----------
    config : ScenarioConfig
    trace : TraceFile, optional
        Overrides the scenario's own trace source.
    verbose : bool, default: False

    Returns
    -------
    RunReport
    """
    sim = Simulator.from_config(config, trace, verbose=verbose)
    return sim.run(event_log=config.event_log)
