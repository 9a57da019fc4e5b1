#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

from .validate import (
    SYMMETRY_MODES,
    ConfigError,
    ValidationError,
    validate_npu_dict,
    validate_pool_dict,
    validate_scenario_dict,
    validate_topology_dict,
    validate_trace_dict,
)
from .scenario import (
    ScenarioConfig,
    apply_overrides,
    bundled_scenarios,
    load_scenario,
    load_scenario_dict,
    npu_from_dict,
    pool_from_dict,
    read_json,
    resolve_scenario,
    scenario_from_dict,
)

__all__ = [
    "SYMMETRY_MODES",
    "ConfigError",
    "ValidationError",
    "validate_npu_dict",
    "validate_pool_dict",
    "validate_scenario_dict",
    "validate_topology_dict",
    "validate_trace_dict",
    "ScenarioConfig",
    "apply_overrides",
    "bundled_scenarios",
    "load_scenario",
    "load_scenario_dict",
    "npu_from_dict",
    "pool_from_dict",
    "read_json",
    "resolve_scenario",
    "scenario_from_dict",
]
