#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Static validation of scenario files.

Checks collect every problem into a list of :class:`ValidationError` (dotted
field path plus message) instead of stopping at the first one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, List, Sequence

from ..memory import REMOTE_MODELS
from ..topology import BlockKind, TopologyError, topology_from_dict

SYMMETRY_MODES = ("auto", "on", "off")
SCENARIO_FIELDS = (
    "name",
    "description",
    "topology",
    "npu",
    "pool",
    "trace",
    "chunks",
    "scheduler",
    "symmetry",
    "report",
)

POOL_INT_FIELDS = (
    "num_nodes",
    "gpus_per_node",
    "num_out_switches",
    "num_remote_groups",
)
POOL_BW_FIELDS = (
    "in_node_fabric_GBps",
    "gpu_side_out_fabric_GBps",
    "remote_group_GBps",
)
POOL_OPTIONAL_FIELDS = (
    "chunk_mb",
    "chunk_bytes",
    "mem_side_out_fabric_GBps",
    "remote_model",
    "latency_ns",
)
NPU_FIELDS = ("peak_tflops", "local_bw_GBps", "local_latency_ns")


@dataclass(frozen=True)
class ValidationError:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}" if self.path else self.message


class ConfigError(ValueError):
    """
    Raised for invalid scenario or sweep configuration.

    Attributes
    ----------
    errors : list of ValidationError
    """

    def __init__(self, errors):
        if isinstance(errors, (str, ValidationError)):
            errors = [errors]
        self.errors: List[ValidationError] = [
            e if isinstance(e, ValidationError) else ValidationError("", str(e))
            for e in errors
        ]
        super().__init__("; ".join(str(e) for e in self.errors))


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _require(cond: bool, path: str, msg: str, errors: List[ValidationError]) -> None:
    if not cond:
        errors.append(ValidationError(path, msg))


def _require_number(
    x: Any, path: str, errors: List[ValidationError], minimum=None, strict=False
) -> None:
    if not _is_number(x):
        errors.append(ValidationError(path, f"must be a number, got {x!r}"))
        return
    if minimum is not None:
        ok = x > minimum if strict else x >= minimum
        rel = ">" if strict else ">="
        _require(ok, path, f"must be {rel} {minimum}, got {x!r}", errors)


def _require_int(
    x: Any, path: str, errors: List[ValidationError], minimum=None
) -> None:
    if not (isinstance(x, int) and not isinstance(x, bool)):
        errors.append(ValidationError(path, f"must be an int, got {x!r}"))
        return
    if minimum is not None:
        _require(x >= minimum, path, f"must be >= {minimum}, got {x}", errors)


def _require_str(x: Any, path: str, errors: List[ValidationError]) -> None:
    _require(
        isinstance(x, str) and x.strip() != "",
        path,
        "must be a non-empty string",
        errors,
    )


def _reject_unknown(cfg: dict, known, prefix: str, errors: List[ValidationError]):
    for key in sorted(set(cfg) - set(known)):
        errors.append(ValidationError(f"{prefix}.{key}", "unknown field"))


def _per_dim(value, n: int):
    return value if isinstance(value, list) else [value] * n


# -------------- sections --------------


def validate_topology_dict(cfg: Any, errors: List[ValidationError]) -> None:
    start = len(errors)
    if cfg is None:
        errors.append(ValidationError("topology.dims", "topology is required"))
        return
    if not isinstance(cfg, dict):
        errors.append(ValidationError("topology", "must be an object"))
        return
    if "dims" in cfg:
        dims = cfg["dims"]
        if not isinstance(dims, list) or not dims:
            errors.append(ValidationError("topology.dims", "must be a non-empty list"))
            return
        for i, d in enumerate(dims, start=1):
            p = f"topology.dims[{i}]"
            if not isinstance(d, dict):
                errors.append(ValidationError(p, "must be an object"))
                continue
            try:
                kind = BlockKind.parse(str(d.get("kind", "")))
            except TopologyError as err:
                errors.append(ValidationError(f"{p}.kind", str(err)))
                kind = None
            size = d.get("size")
            _require_int(size, f"{p}.size", errors, minimum=2)
            if kind is BlockKind.SWITCH and isinstance(size, int) and size >= 2:
                _require(
                    size & (size - 1) == 0,
                    f"{p}.size",
                    f"Switch({size}) must have a power-of-two size",
                    errors,
                )
            _require_number(
                d.get("bandwidth_GBps"), f"{p}.bandwidth_GBps", errors, 0, strict=True
            )
            if "latency_ns" in d:
                _require_number(d["latency_ns"], f"{p}.latency_ns", errors, 0)
            if d.get("hops") is not None:
                _require_int(d["hops"], f"{p}.hops", errors, minimum=1)
    elif "spec" in cfg:
        _require_str(cfg.get("spec"), "topology.spec", errors)
        if not isinstance(cfg.get("spec"), str):
            return
        n = len(cfg["spec"].split("_"))
        bws = cfg.get("bandwidth_GBps")
        if bws is None:
            errors.append(ValidationError("topology.bandwidth_GBps", "is required"))
        else:
            bws = _per_dim(bws, n)
            _require(
                len(bws) == n,
                "topology.bandwidth_GBps",
                f"lists {len(bws)} values for {n} dimensions",
                errors,
            )
            for i, bw in enumerate(bws, start=1):
                p = f"topology.bandwidth_GBps[{i}]"
                _require_number(bw, p, errors, 0, strict=True)
        lats = _per_dim(cfg.get("latency_ns", 0), n)
        _require(
            len(lats) == n,
            "topology.latency_ns",
            f"lists {len(lats)} values for {n} dimensions",
            errors,
        )
        for i, lat in enumerate(lats, start=1):
            _require_number(lat, f"topology.latency_ns[{i}]", errors, 0)
    else:
        errors.append(
            ValidationError("topology.dims", "topology needs 'dims' or 'spec'")
        )
        return
    if len(errors) == start:
        try:
            topology_from_dict(cfg)
        except (TopologyError, TypeError, ValueError) as err:
            errors.append(ValidationError("topology", str(err)))


def validate_npu_dict(cfg: Any, errors: List[ValidationError]) -> None:
    if cfg is None:
        return
    if not isinstance(cfg, dict):
        errors.append(ValidationError("npu", "must be an object"))
        return
    if "peak_tflops" in cfg:
        _require_number(cfg["peak_tflops"], "npu.peak_tflops", errors, 0, strict=True)
    if "local_bw_GBps" in cfg:
        bw = cfg["local_bw_GBps"]
        _require_number(bw, "npu.local_bw_GBps", errors, 0, strict=True)
    if "local_latency_ns" in cfg:
        _require_number(cfg["local_latency_ns"], "npu.local_latency_ns", errors, 0)
    _reject_unknown(cfg, NPU_FIELDS, "npu", errors)


def validate_pool_dict(cfg: Any, errors: List[ValidationError]) -> None:
    if cfg is None:
        return
    if not isinstance(cfg, dict):
        errors.append(ValidationError("pool", "must be an object"))
        return
    for name in POOL_INT_FIELDS:
        _require_int(cfg.get(name), f"pool.{name}", errors, minimum=1)
    _require(
        ("chunk_mb" in cfg) != ("chunk_bytes" in cfg),
        "pool.chunk_mb",
        "give exactly one of chunk_mb or chunk_bytes",
        errors,
    )
    for name in ("chunk_mb", "chunk_bytes"):
        if name in cfg:
            _require_number(cfg[name], f"pool.{name}", errors, 0, strict=True)
    for name in POOL_BW_FIELDS:
        _require_number(cfg.get(name), f"pool.{name}", errors, 0, strict=True)
    if "mem_side_out_fabric_GBps" in cfg:
        _require_number(
            cfg["mem_side_out_fabric_GBps"],
            "pool.mem_side_out_fabric_GBps",
            errors,
            0,
            strict=True,
        )
    model = cfg.get("remote_model", "hiermem")
    _require(
        model in REMOTE_MODELS,
        "pool.remote_model",
        f"must be one of {list(REMOTE_MODELS)}, got {model!r}",
        errors,
    )
    if "latency_ns" in cfg:
        _require_number(cfg["latency_ns"], "pool.latency_ns", errors, 0)
    known = POOL_INT_FIELDS + POOL_BW_FIELDS + POOL_OPTIONAL_FIELDS
    _reject_unknown(cfg, known, "pool", errors)


def validate_trace_dict(
    cfg: Any, errors: List[ValidationError], generators: Sequence[str]
) -> None:
    if cfg is None:
        errors.append(ValidationError("trace", "trace is required (path or generator)"))
        return
    if not isinstance(cfg, dict):
        errors.append(ValidationError("trace", "must be an object"))
        return
    has_path = "path" in cfg
    has_gen = "generator" in cfg
    _require(
        has_path != has_gen,
        "trace",
        "give exactly one of trace.path or trace.generator",
        errors,
    )
    if has_path:
        _require_str(cfg["path"], "trace.path", errors)
    if has_gen:
        _require(
            cfg["generator"] in generators,
            "trace.generator",
            f"unknown generator {cfg['generator']!r}; "
            f"expected one of {sorted(generators)}",
            errors,
        )
        _require(
            isinstance(cfg.get("params", {}), dict),
            "trace.params",
            "must be an object",
            errors,
        )


def validate_scenario_dict(
    cfg: Any, generators: Sequence[str] = (), schedulers: Sequence[str] = ("fifo",)
) -> List[ValidationError]:
    """
    Check the structure of a scenario mapping.

    Returns
    -------
    list of ValidationError
        Empty when the scenario is well formed.
    """
    errors: List[ValidationError] = []
    if not isinstance(cfg, dict):
        return [ValidationError("", "scenario must be a JSON object")]
    if "name" in cfg:
        _require_str(cfg["name"], "name", errors)
    validate_topology_dict(cfg.get("topology"), errors)
    validate_npu_dict(cfg.get("npu"), errors)
    validate_pool_dict(cfg.get("pool"), errors)
    validate_trace_dict(cfg.get("trace"), errors, generators)
    if "chunks" in cfg:
        _require_int(cfg["chunks"], "chunks", errors, minimum=1)
    sched = cfg.get("scheduler", "fifo")
    _require(
        sched in schedulers,
        "scheduler",
        f"unknown scheduler {sched!r}; expected one of {sorted(schedulers)}",
        errors,
    )
    sym = cfg.get("symmetry", "auto")
    _require(
        sym in SYMMETRY_MODES,
        "symmetry",
        f"must be one of {list(SYMMETRY_MODES)}, got {sym!r}",
        errors,
    )
    report = cfg.get("report", {})
    _require(isinstance(report, dict), "report", "must be an object", errors)
    for key in sorted(set(cfg) - set(SCENARIO_FIELDS)):
        errors.append(ValidationError(key, "unknown field"))
    return errors
