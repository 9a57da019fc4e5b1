#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

from __future__ import annotations

from typing import Any, Callable, Dict, Optional

from .trace import (
    REQUIRED_ATTRS,
    TRACE_FORMAT,
    TRACE_VERSION,
    NodeKind,
    TraceError,
    TraceFile,
    TraceNode,
    read_trace,
    replicate,
    validate_trace,
    write_trace,
)
from .generators import (
    GeneratorError,
    ModelShape,
    dp_from_params,
    gen_dp_trace,
    gen_hybrid_trace,
    gen_microbench,
    gen_mp_trace,
    gen_offload_trace,
    gen_pipeline_trace,
    hybrid_from_params,
    microbench_from_params,
    mp_from_params,
    offload_from_params,
    pipeline_from_params,
    split_degrees,
)
from .analysis import (
    critical_path_time,
    flops_per_npu,
    is_symmetric,
    kind_sequences,
    trace_graph,
)

__all__ = [
    "REQUIRED_ATTRS",
    "TRACE_FORMAT",
    "TRACE_VERSION",
    "NodeKind",
    "TraceError",
    "TraceFile",
    "TraceNode",
    "read_trace",
    "replicate",
    "validate_trace",
    "write_trace",
    "GeneratorError",
    "ModelShape",
    "gen_dp_trace",
    "gen_hybrid_trace",
    "gen_microbench",
    "gen_mp_trace",
    "gen_offload_trace",
    "gen_pipeline_trace",
    "split_degrees",
    "critical_path_time",
    "flops_per_npu",
    "is_symmetric",
    "kind_sequences",
    "trace_graph",
    "build_trace",
    "__generators__",
]


# --- Generator registry used by the CLI and scenario loader ---
__generators__: Dict[str, Callable[..., TraceFile]] = {
    "dp": dp_from_params,
    "mp": mp_from_params,
    "hybrid": hybrid_from_params,
    "pipeline": pipeline_from_params,
    "microbench": microbench_from_params,
    "offload": offload_from_params,
}


def build_trace(name: str, spec, params: Optional[Dict[str, Any]] = None) -> TraceFile:
    """
    Run a registered generator by name.

    Raises
    ------
    GeneratorError
        Unknown generator name or failed precondition.
    """
    if name not in __generators__:
        raise GeneratorError(
            f"unknown generator {name!r}; expected one of {sorted(__generators__)}"
        )
    return __generators__[name](spec, **dict(params or {}))
