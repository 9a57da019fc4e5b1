#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

from importlib.metadata import version, PackageNotFoundError

try:
    __version__ = version("fabriclink")
except PackageNotFoundError:
    __version__ = "0.0.0"

__all__ = [
    "TopologySpec",
    "parse_topology",
    "topology_from_dict",
    "CollectiveKind",
    "plan_collective",
    "verify_plan",
    "AnalyticalNetwork",
    "EventCore",
    "MemoryPoolSpec",
    "LocalMemSpec",
    "link_loads",
    "pool_access_time",
    "NpuSpec",
    "Simulator",
    "RunReport",
    "run_simulation",
    "TraceFile",
    "TraceNode",
    "read_trace",
    "write_trace",
    "build_trace",
    "ScenarioConfig",
    "load_scenario",
    "fabriclink_main",
]


# Lazy attribute loader: import submodules *only when accessed*.
def __getattr__(name):
    """
    Lazy attribute loader that imports and returns public objects on demand.

    Parameters
    ----------
    name : str
        The attribute name requested (e.g., ``"Simulator"``, ``"load_scenario"``).

    Returns
    -------
    object
        The requested class or function.

    Raises
    ------
    AttributeError
        If the requested attribute is not part of the public API.
    """
    if name in {"TopologySpec", "parse_topology", "topology_from_dict"}:
        from .topology import TopologySpec, parse_topology, topology_from_dict

        return locals()[name]

    if name in {"CollectiveKind", "plan_collective", "verify_plan"}:
        from .collectives import CollectiveKind, plan_collective, verify_plan

        return locals()[name]

    if name in {"AnalyticalNetwork", "EventCore"}:
        from .network import AnalyticalNetwork, EventCore

        return locals()[name]

    if name in {"MemoryPoolSpec", "LocalMemSpec", "link_loads", "pool_access_time"}:
        from .memory import LocalMemSpec, MemoryPoolSpec, link_loads, pool_access_time

        return locals()[name]

    if name in {"NpuSpec", "Simulator", "RunReport", "run_simulation"}:
        from .engine import NpuSpec, RunReport, Simulator, run_simulation

        return locals()[name]

    if name in {"TraceFile", "TraceNode", "read_trace", "write_trace", "build_trace"}:
        from .workloads import (
            TraceFile,
            TraceNode,
            build_trace,
            read_trace,
            write_trace,
        )

        return locals()[name]

    if name in {"ScenarioConfig", "load_scenario"}:
        from .config import ScenarioConfig, load_scenario

        return locals()[name]

    if name == "fabriclink_main":
        from .cli.main import fabriclink_main

        return fabriclink_main
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
