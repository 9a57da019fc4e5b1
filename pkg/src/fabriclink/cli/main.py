#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""
Command-line front end.

Subcommands::

    fabriclink run <scenario> [--topology T --bw B ...] [--report out.json]
    fabriclink sweep <sweep.json> [--jobs N] [--output table.csv]
    fabriclink gen-trace <generator> [--scenario S | --topology T] -o trace.jsonl
    fabriclink validate <scenario>

Exit codes: 0 success, 2 configuration error, 3 deadlock or communication
contract violation, 1 internal fault.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..collectives import PlanError, plan_to_dict
from ..config import (
    ConfigError,
    ValidationError,
    apply_overrides,
    load_scenario_dict,
    read_json,
    scenario_from_dict,
    validate_scenario_dict,
)
from ..engine import Simulator, __schedulers__
from ..memory import MemoryModelError
from ..network import ContractError, DeadlockError
from ..topology import TopologyError, topology_from_dict
from ..workloads import (
    GeneratorError,
    TraceError,
    __generators__,
    build_trace,
    write_trace,
)

description = """
FabricLink: analytical discrete-event simulator for distributed DNN training
on hierarchical networks and disaggregated memory pools.
"""

EXIT_OK = 0
EXIT_FAULT = 1
EXIT_CONFIG = 2
EXIT_DEADLOCK = 3

CONFIG_ERRORS = (
    ConfigError,
    TopologyError,
    TraceError,
    GeneratorError,
    PlanError,
    MemoryModelError,
)


# -------------- parameter parsing --------------


def _read_value(s):
    """
    Attempt to parse a string as ``int`` or ``float``; fall back to string/boolean.

    ``|``-separated tokens become a list, e.g. ``1|2`` -> ``[1, 2]``.

    Parameters
    ----------
    s : str
        Input token.

    Returns
    -------
    int or float or bool or str or list
        Parsed value.
    """

    s = s.strip()
    if "|" in s:
        return [_read_value(t) for t in s.split("|") if t.strip()]
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            continue
    if s.lower() == "false":
        return False
    if s.lower() == "true":
        return True
    return s


def _read_args_kwargs(input_str):
    """
    Parse a comma-separated string into positional and keyword arguments.

    Parameters
    ----------
    input_str : str
        Comma-separated tokens. Positional values are bare; keyword values use
        ``key=value``. Booleans accept ``true``/``false`` (case-insensitive).

    Returns
    -------
    tuple
        ``(args, kwargs)`` where ``args`` is a list and ``kwargs`` is a dict.
    """

    args = []
    kwargs = {}
    tokens = input_str.split(",")
    for token in tokens:
        token = token.strip()
        if "=" in token:
            key, value = token.split("=", 1)
            kwargs[key.strip()] = _read_value(value)
        elif len(token) > 0:
            args.append(_read_value(token))
    return args, kwargs


def _number_list(text: Optional[str], what: str) -> Optional[List[Any]]:
    """``"1000_200_100_50"`` or ``"1000,200"`` -> numbers."""
    if text is None:
        return None
    out = []
    for tok in text.replace(",", "_").split("_"):
        value = _read_value(tok)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(ValidationError(what, f"not a number: {tok!r}"))
        out.append(value)
    return out


def _int_list(text: Optional[str], what: str) -> Optional[List[int]]:
    values = _number_list(text, what)
    if values is None:
        return None
    if not all(isinstance(v, int) for v in values):
        raise ConfigError(ValidationError(what, f"expected integers, got {text!r}"))
    return values


def _param_overrides(text: str) -> Dict[str, Any]:
    args, kwargs = _read_args_kwargs(text or "")
    if args:
        raise ConfigError(
            ValidationError("--param", f"expected path=value pairs, got {args}")
        )
    return kwargs


def _cli_overrides(args, raw: Dict[str, Any]) -> Dict[str, Any]:
    """Turn common flags into dotted-path overrides against ``raw``."""
    out: Dict[str, Any] = {}
    bws = _number_list(getattr(args, "bw", None), "--bw")
    lats = _number_list(getattr(args, "latency", None), "--latency")
    # one value covers every dimension
    bw_value = bws[0] if bws is not None and len(bws) == 1 else bws
    lat_value = lats[0] if lats is not None and len(lats) == 1 else lats
    if getattr(args, "topology", None):
        if bws is None:
            raise ConfigError(ValidationError("--bw", "is required with --topology"))
        out["topology"] = {
            "spec": args.topology,
            "bandwidth_GBps": bw_value,
            "latency_ns": lat_value if lats is not None else 0,
        }
    elif bws is not None or lats is not None:
        topo = raw.get("topology") or {}
        if "dims" in topo:
            for i, d in enumerate(topo["dims"], start=1):
                if bws is not None:
                    bw = bws[min(i, len(bws)) - 1]
                    out[f"topology.dims[{i}].bandwidth_GBps"] = bw
                if lats is not None:
                    lat = lats[min(i, len(lats)) - 1]
                    out[f"topology.dims[{i}].latency_ns"] = lat
        else:
            if bws is not None:
                out["topology.bandwidth_GBps"] = bw_value
            if lats is not None:
                out["topology.latency_ns"] = lat_value
    if getattr(args, "chunks", None) is not None:
        out["chunks"] = args.chunks
    if getattr(args, "trace", None):
        out["trace"] = {"path": str(Path(args.trace).resolve())}
    if getattr(args, "pool", None):
        out["pool"] = read_json(args.pool)
    if getattr(args, "symmetry", None):
        out["symmetry"] = args.symmetry
    if getattr(args, "scheduler", None):
        out["scheduler"] = args.scheduler
    if getattr(args, "event_log", None):
        out["report.event_log"] = str(Path(args.event_log).resolve())
    out.update(_param_overrides(getattr(args, "param", "")))
    return out


def _load(args):
    """Scenario named on the command line plus flag overrides."""
    if args.scenario:
        raw, path = load_scenario_dict(args.scenario)
    else:
        raw, path = {}, None
    raw = apply_overrides(raw, _cli_overrides(args, raw))
    base_dir = path.parent if path is not None else Path.cwd()
    return raw, base_dir, path


# -------------- subcommands --------------


def cmd_run(args) -> int:
    raw, base_dir, path = _load(args)
    config = scenario_from_dict(raw, base_dir=base_dir, source=path)
    sim = Simulator.from_config(config, verbose=args.verbose)
    report = sim.run(event_log=config.event_log)
    print(report.render())
    out = args.report or (raw.get("report") or {}).get("path")
    if out:
        report.write(out)
        print(f"\nReport written to {out}")
    if config.event_log is not None:
        print(f"Event log written to {config.event_log}")
    if args.plan_out:
        plans = [plan_to_dict(p) for p in sim.plans.values()]
        Path(args.plan_out).write_text(
            json.dumps(plans, indent=1, sort_keys=True) + "\n", encoding="utf-8"
        )
        print(f"{len(plans)} collective plan(s) written to {args.plan_out}")
    return EXIT_OK


def _axis_values(axis: Any, i: int) -> Tuple[str, List[Any]]:
    where = f"axes[{i}]"
    if not isinstance(axis, dict) or not isinstance(axis.get("path"), str):
        raise ConfigError(ValidationError(where, "needs a 'path' string"))
    values = axis.get("values")
    if isinstance(values, dict):
        rng = values
    elif values is None and "start" in axis:
        rng = axis
    else:
        rng = None
    if rng is not None:
        try:
            start, stop, step = rng["start"], rng["stop"], rng.get("step", 1)
        except KeyError as err:
            raise ConfigError(ValidationError(where, f"range needs {err}")) from None
        if not step or step <= 0 or stop < start:
            raise ConfigError(ValidationError(where, "empty or descending range"))
        grid = np.arange(start, stop + step / 2, step)
        if all(isinstance(v, int) for v in (start, stop, step)):
            values = [int(v) for v in grid]
        else:
            values = [float(v) for v in grid]
    if not isinstance(values, list) or not values:
        raise ConfigError(
            ValidationError(f"{where}.values", "must be a non-empty list")
        )
    return axis["path"], values


def _run_point(
    raw: Dict[str, Any], base_dir: Optional[str], overrides: Dict[str, Any]
) -> Dict[str, Any]:
    cfg = apply_overrides(raw, overrides)
    config = scenario_from_dict(cfg, base_dir=Path(base_dir) if base_dir else None)
    report = Simulator.from_config(config).run()
    row = dict(overrides)
    row.update(report.summary_row())
    return row


def cmd_sweep(args) -> int:
    sweep_path = Path(args.sweep)
    spec = read_json(sweep_path)
    if not isinstance(spec, dict):
        raise ConfigError(ValidationError("", "sweep file must be a JSON object"))
    base = spec.get("base")
    if isinstance(base, dict):
        raw, base_dir = base, sweep_path.parent
    elif isinstance(base, str):
        candidate = sweep_path.parent / base
        raw, path = load_scenario_dict(candidate if candidate.is_file() else base)
        base_dir = path.parent
    else:
        raise ConfigError(ValidationError("base", "must be a scenario object or path"))
    raw = apply_overrides(raw, _param_overrides(args.param))
    axes = spec.get("axes")
    if not isinstance(axes, list) or not axes:
        raise ConfigError(ValidationError("axes", "must be a non-empty list"))
    named = [_axis_values(a, i) for i, a in enumerate(axes, start=1)]
    paths = [p for p, _ in named]
    grid = itertools.product(*(v for _, v in named))
    points = [dict(zip(paths, combo)) for combo in grid]
    # fail on bad paths before any run
    for p in points[:1]:
        errors = validate_scenario_dict(
            apply_overrides(raw, p), sorted(__generators__), sorted(__schedulers__)
        )
        if errors:
            raise ConfigError(errors)
    print(f"[Sweep] {len(points)} points over {len(paths)} axes: {', '.join(paths)}")

    jobs = max(1, args.jobs)
    base_arg = str(base_dir) if base_dir is not None else None
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(
                pool.map(
                    _run_point,
                    itertools.repeat(raw),
                    itertools.repeat(base_arg),
                    points,
                )
            )
    else:
        rows = [_run_point(raw, base_arg, p) for p in points]

    table = pd.DataFrame(rows).sort_values(paths, kind="mergesort")
    table = table.reset_index(drop=True)
    output = args.output or spec.get("output")
    if output:
        out = Path(output)
        table.to_csv(out, index=False, float_format="%.2f")
        print(f"[Sweep] {len(table)} rows written to {out}")
    else:
        print(table.to_csv(index=False, float_format="%.2f"), end="")
    return EXIT_OK


def _gen_params(args) -> Dict[str, Any]:
    name = args.generator
    model = {}
    for key, flag in (
        ("layers", "layers"),
        ("fwd_gflops", "fwd_gflops"),
        ("param_mb", "param_mb"),
        ("act_mb", "act_mb"),
    ):
        value = getattr(args, flag)
        if value is not None:
            model[key] = value
    params: Dict[str, Any] = {}
    if name == "microbench":
        params["kind"] = args.kind
        if args.bytes is not None:
            params["bytes"] = args.bytes
        elif args.mb is not None:
            params["mb"] = args.mb
        if args.scope:
            params["scope_dims"] = _int_list(args.scope, "--scope")
    else:
        params["model"] = model
        if name in ("dp", "mp") and args.scope:
            params["scope_dims"] = _int_list(args.scope, "--scope")
        if name == "hybrid":
            if args.mp_degree is not None:
                params["mp_degree"] = args.mp_degree
            else:
                params["mp_scope"] = _int_list(args.mp_scope, "--mp-scope") or []
                params["dp_scope"] = _int_list(args.dp_scope, "--dp-scope") or []
        if name == "pipeline":
            params["stages"] = args.stages
            params["microbatches"] = args.microbatches
        if name == "offload":
            params["in_switch"] = args.in_switch
    params.update(_param_overrides(args.param))
    return params


def cmd_gen_trace(args) -> int:
    if args.scenario:
        raw, _ = load_scenario_dict(args.scenario)
        topo_cfg = raw.get("topology")
    else:
        if not args.topology:
            raise ConfigError(
                ValidationError("--topology", "give --topology or --scenario")
            )
        n = len(args.topology.split("_"))
        topo_cfg = {"spec": args.topology, "bandwidth_GBps": [1] * n}
    topology = topology_from_dict(topo_cfg or {})
    trace = build_trace(args.generator, topology, _gen_params(args))
    write_trace(trace, args.output)
    counts = trace.node_counts()
    distinct = sorted(set(counts))
    print(
        f"[Trace] {args.generator}: {len(trace.nodes)} nodes for "
        f"{trace.npu_count} NPUs on {topology.text} -> {args.output}"
    )
    if len(distinct) == 1:
        print(f"[Trace] {distinct[0]} nodes per NPU")
    else:
        print(f"[Trace] nodes per NPU range {distinct[0]}..{distinct[-1]}")
    return EXIT_OK


def cmd_validate(args) -> int:
    raw, base_dir, path = _load(args)
    config = scenario_from_dict(raw, base_dir=base_dir, source=path)
    trace = config.load_trace()
    sim = Simulator.from_config(config, trace)
    print(
        f"OK: {config.name} ({config.topology.text}, {config.topology.npu_count} NPUs, "
        f"{len(trace.nodes)} trace nodes, "
        f"{'reduced' if sim.reduced else 'full'} replay)"
    )
    return EXIT_OK


# -------------- parser --------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "scenario",
        nargs="?",
        default=None,
        help="Scenario JSON file or bundled scenario name.",
    )
    p.add_argument("--topology", type=str, help="Topology, e.g. Ring(2)_FC(8).")
    p.add_argument("--bw", type=str, help="GB/s per dimension, e.g. 1000_200.")
    p.add_argument("--latency", type=str, help="Per-dimension latency in ns.")
    p.add_argument("--chunks", type=int, help="Pipelining chunks per collective.")
    p.add_argument("--trace", type=str, help="Trace file to replay instead.")
    p.add_argument("--pool", type=str, help="JSON file with the memory pool section.")
    p.add_argument("--symmetry", choices=["auto", "on", "off"])
    p.add_argument("--scheduler", choices=sorted(__schedulers__))
    p.add_argument("--event-log", dest="event_log", type=str, help="Send log path.")
    p.add_argument(
        "-o",
        "--param",
        type=str,
        default="",
        help='Dotted-path overrides, e.g. "pool.remote_group_GBps=500, chunks=16".',
    )
    p.add_argument("-v", "--verbose", action="store_true", default=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fabriclink", description=description)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="Simulate one scenario.")
    _add_common(p)
    p.add_argument("--report", type=str, help="Write the JSON report here.")
    p.add_argument("--plan-out", dest="plan_out", type=str, help="Plan dump path.")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="Run a cartesian parameter sweep.")
    p.add_argument("sweep", type=str, help="Sweep JSON file.")
    p.add_argument("--jobs", type=int, default=1, help="Parallel worker processes.")
    p.add_argument("--output", type=str, help="CSV output (overrides the sweep file).")
    p.add_argument("--param", type=str, default="", help="Base overrides.")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen-trace", help="Write a synthetic trace.")
    p.add_argument("generator", choices=sorted(__generators__))
    p.add_argument("--scenario", type=str, help="Take the topology from this scenario.")
    p.add_argument("--topology", type=str)
    p.add_argument("--kind", type=str, default="AllReduce", help="Collective kind.")
    p.add_argument("--mb", type=float, help="Microbench payload in MB.")
    p.add_argument("--bytes", type=int, help="Microbench payload in bytes.")
    p.add_argument("--scope", type=str, help="Scope dimensions, e.g. 1,2.")
    p.add_argument("--mp-scope", dest="mp_scope", type=str)
    p.add_argument("--dp-scope", dest="dp_scope", type=str)
    p.add_argument("--mp-degree", dest="mp_degree", type=int)
    p.add_argument("--stages", type=int, default=1)
    p.add_argument("--microbatches", type=int, default=1)
    p.add_argument("--layers", type=int)
    p.add_argument("--fwd-gflops", dest="fwd_gflops", type=float)
    p.add_argument("--param-mb", dest="param_mb", type=float)
    p.add_argument("--act-mb", dest="act_mb", type=float)
    p.add_argument("--in-switch", dest="in_switch", action="store_true", default=False)
    p.add_argument("--param", type=str, default="", help="Extra generator parameters.")
    p.add_argument("-o", "--output", type=str, required=True)
    p.set_defaults(func=cmd_gen_trace)

    p = sub.add_parser("validate", help="Static checks without simulating.")
    _add_common(p)
    p.set_defaults(func=cmd_validate)
    return parser


def _print_errors(err: Exception) -> None:
    if isinstance(err, ConfigError):
        print(f"Configuration error ({len(err.errors)}):", file=sys.stderr)
        for e in err.errors:
            print(f"  {e}", file=sys.stderr)
    else:
        print(f"Error: {err}", file=sys.stderr)


def fabriclink_main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse the command line and run a subcommand.

    Returns
    -------
    int
        Process exit code.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CONFIG_ERRORS as err:
        _print_errors(err)
        return EXIT_CONFIG
    except (DeadlockError, ContractError) as err:
        print(f"Simulation failed: {err}", file=sys.stderr)
        return EXIT_DEADLOCK
    except Exception:
        traceback.print_exc()
        return EXIT_FAULT


if __name__ == "__main__":
    raise SystemExit(fabriclink_main())
