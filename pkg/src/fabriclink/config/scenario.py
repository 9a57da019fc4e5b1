#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Scenario files: loading, dotted-path overrides and conversion to model objects.

A scenario is a JSON object; see ``docs/source/scenarios.rst`` for the
layout. Bundled scenarios ship in :mod:`fabriclink.scenarios` and can be
named without the ``.json`` suffix.
"""

from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass, field
from importlib.resources import files
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from ..engine.npu import NpuSpec, __schedulers__
from ..memory import MemoryModelError, MemoryPoolSpec
from ..topology import TopologyError, TopologySpec, topology_from_dict
from ..units import GBPS, MIB, NS_PER_S, exact
from ..workloads import TraceFile, __generators__, build_trace, read_trace
from .validate import ConfigError, ValidationError, validate_scenario_dict

ScenarioSource = Union[str, Path, Mapping[str, Any]]

_SEGMENT = re.compile(r"^([^\[\]]+)((?:\[\d+\])*)$")


@dataclass
class ScenarioConfig:
    """
    A validated scenario.

    Attributes
    ----------
    topology : TopologySpec
    npu : NpuSpec
    pool : MemoryPoolSpec or None
    trace_path : Path or None
        Trace file, already resolved against the scenario's directory.
    generator : str or None
        Registered generator used when no trace file is given.
    generator_params : dict
    chunks : int
    scheduler : str
    symmetry : str
    event_log : Path or None
    name : str
    source : Path or None
        File the scenario was read from.
    raw : dict
        The mapping after overrides.
    """

    topology: TopologySpec
    npu: NpuSpec = field(default_factory=NpuSpec)
    pool: Optional[MemoryPoolSpec] = None
    trace_path: Optional[Path] = None
    generator: Optional[str] = None
    generator_params: Dict[str, Any] = field(default_factory=dict)
    chunks: int = 64
    scheduler: str = "fifo"
    symmetry: str = "auto"
    event_log: Optional[Path] = None
    name: str = ""
    source: Optional[Path] = None
    raw: Dict[str, Any] = field(default_factory=dict)

    def load_trace(self) -> TraceFile:
        """Read the trace file or run the generator."""
        if self.trace_path is not None:
            return read_trace(self.trace_path)
        return build_trace(self.generator, self.topology, self.generator_params)


# -------------- lookup --------------


def bundled_scenarios() -> List[str]:
    """Names of the scenarios shipped with the package."""
    root = files("fabriclink.scenarios")
    return sorted(
        p.name[: -len(".json")]
        for p in root.iterdir()
        if p.name.endswith(".json") and not p.name.startswith("sweep_")
    )


def resolve_scenario(name_or_path: Union[str, Path]) -> Path:
    """
    Locate a scenario file.

    A path that exists wins; otherwise the name is looked up among the bundled
    scenarios (``.json`` optional).

    Raises
    ------
    ConfigError
    """
    path = Path(name_or_path)
    if path.is_file():
        return path
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    bundled = files("fabriclink.scenarios").joinpath(f"{stem}.json")
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigError(
        ValidationError(
            "", f"no scenario file or bundled scenario {str(name_or_path)!r}"
        )
    )


def read_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as err:
        raise ConfigError(ValidationError("", f"cannot read {path}: {err}")) from None
    except json.JSONDecodeError as err:
        raise ConfigError(
            ValidationError("", f"{path}: invalid JSON at line {err.lineno}: {err.msg}")
        ) from None


# -------------- overrides --------------


def _split_path(path: str) -> List[Union[str, int]]:
    """``"topology.dims[2].bandwidth_GBps"`` -> ``["topology", "dims", 2, ...]``."""
    keys: List[Union[str, int]] = []
    for part in path.split("."):
        part = part.strip()
        if part.isdigit():
            keys.append(int(part))
            continue
        m = _SEGMENT.match(part)
        if m is None:
            raise ConfigError(ValidationError(path, "malformed parameter path"))
        keys.append(m.group(1))
        keys.extend(int(i) for i in re.findall(r"\[(\d+)\]", m.group(2)))
    return keys


def _set_path(cfg: Dict[str, Any], path: str, value: Any) -> None:
    keys = _split_path(path)
    node: Any = cfg
    for i, key in enumerate(keys):
        last = i == len(keys) - 1
        if isinstance(key, int):
            if not isinstance(node, list) or not 1 <= key <= len(node):
                raise ConfigError(
                    ValidationError(
                        path, f"index {key} does not exist (indices are 1-based)"
                    )
                )
            if last:
                node[key - 1] = value
            else:
                node = node[key - 1]
            continue
        if not isinstance(node, dict):
            raise ConfigError(ValidationError(path, f"{key!r} is not inside an object"))
        if last:
            node[key] = value
        else:
            if node.get(key) is None:
                node[key] = {}
            node = node[key]


def apply_overrides(
    cfg: Mapping[str, Any], overrides: Mapping[str, Any]
) -> Dict[str, Any]:
    """
    Return a copy of ``cfg`` with dotted-path overrides applied.

    Paths use ``.`` between keys and 1-based list indices, either
    ``dims[2]`` or ``dims.2``. Missing objects along the way are created.

    Raises
    ------
    ConfigError
        Path indexes a missing list element or descends into a scalar.
    """
    out = copy.deepcopy(dict(cfg))
    for path, value in overrides.items():
        _set_path(out, path, value)
    return out


# -------------- building --------------


def pool_from_dict(cfg: Mapping[str, Any]) -> MemoryPoolSpec:
    """Pool section (GB/s, MB, ns) to a :class:`MemoryPoolSpec` (bytes/s, bytes, s)."""
    if "chunk_bytes" in cfg:
        chunk = exact(cfg["chunk_bytes"])
    else:
        chunk = exact(cfg["chunk_mb"]) * MIB
    group_bw = exact(cfg["remote_group_GBps"]) * GBPS
    mem_side = cfg.get("mem_side_out_fabric_GBps")
    return MemoryPoolSpec(
        num_nodes=cfg["num_nodes"],
        gpus_per_node=cfg["gpus_per_node"],
        num_out_switches=cfg["num_out_switches"],
        num_remote_groups=cfg["num_remote_groups"],
        chunk_size=chunk,
        in_node_fabric_bw=exact(cfg["in_node_fabric_GBps"]) * GBPS,
        gpu_side_out_fabric_bw=exact(cfg["gpu_side_out_fabric_GBps"]) * GBPS,
        mem_side_out_fabric_bw=(
            group_bw if mem_side is None else exact(mem_side) * GBPS
        ),
        remote_group_bw=group_bw,
        remote_model=cfg.get("remote_model", "hiermem"),
        latency=exact(cfg.get("latency_ns", 0)) / NS_PER_S,
    )


def npu_from_dict(cfg: Optional[Mapping[str, Any]]) -> NpuSpec:
    cfg = cfg or {}
    return NpuSpec.from_units(
        cfg.get("peak_tflops", 234),
        cfg.get("local_bw_GBps", 4096),
        cfg.get("local_latency_ns", 0),
    )


def scenario_from_dict(
    cfg: Mapping[str, Any],
    base_dir: Optional[Path] = None,
    source: Optional[Path] = None,
) -> ScenarioConfig:
    """
    Validate a scenario mapping and build the model objects.

    Raises
    ------
    ConfigError
        With every problem found, each tagged by its dotted field path.
    """
    errors = validate_scenario_dict(cfg, sorted(__generators__), sorted(__schedulers__))
    if errors:
        raise ConfigError(errors)
    try:
        topology = topology_from_dict(cfg["topology"])
    except TopologyError as err:
        raise ConfigError(ValidationError("topology", str(err))) from None
    try:
        npu = npu_from_dict(cfg.get("npu"))
        pool = pool_from_dict(cfg["pool"]) if cfg.get("pool") is not None else None
    except (MemoryModelError, ValueError) as err:
        raise ConfigError(ValidationError("pool", str(err))) from None
    if pool is not None and pool.total_gpus != topology.npu_count:
        raise ConfigError(
            ValidationError(
                "pool",
                f"pool serves {pool.total_gpus} GPUs, topology {topology.text} "
                f"has {topology.npu_count} NPUs",
            )
        )

    trace_cfg = cfg["trace"]
    trace_path = None
    if "path" in trace_cfg:
        trace_path = Path(trace_cfg["path"])
        if not trace_path.is_absolute() and base_dir is not None:
            trace_path = base_dir / trace_path
    event_log = (cfg.get("report") or {}).get("event_log")
    if event_log is not None:
        event_log = Path(event_log)
    return ScenarioConfig(
        topology=topology,
        npu=npu,
        pool=pool,
        trace_path=trace_path,
        generator=trace_cfg.get("generator"),
        generator_params=dict(trace_cfg.get("params", {})),
        chunks=cfg.get("chunks", 64),
        scheduler=cfg.get("scheduler", "fifo"),
        symmetry=cfg.get("symmetry", "auto"),
        event_log=event_log,
        name=str(cfg.get("name") or (source.stem if source else "scenario")),
        source=source,
        raw=copy.deepcopy(dict(cfg)),
    )


def load_scenario_dict(source: ScenarioSource) -> Tuple[Dict[str, Any], Optional[Path]]:
    """Raw mapping and the file it came from (``None`` for in-memory mappings)."""
    if isinstance(source, Mapping):
        return copy.deepcopy(dict(source)), None
    path = resolve_scenario(source)
    cfg = read_json(path)
    if not isinstance(cfg, dict):
        raise ConfigError(
            ValidationError("", f"{path}: scenario must be a JSON object")
        )
    return cfg, path


def load_scenario(
    source: ScenarioSource, overrides: Optional[Mapping[str, Any]] = None
) -> ScenarioConfig:
    """
    Read, override and validate a scenario.

    Parameters
    ----------
    source : str, Path or mapping
        Scenario file, bundled scenario name, or an in-memory mapping.
    overrides : mapping, optional
        Dotted-path overrides, see :func:`apply_overrides`.

    Returns
    -------
    ScenarioConfig
    """
    cfg, path = load_scenario_dict(source)
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    base_dir = path.parent if path is not None else None
    return scenario_from_dict(cfg, base_dir=base_dir, source=path)

