#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

from .npu import FifoPolicy, NpuSpec, NpuState, __schedulers__, roofline_time
from .report import (
    CATEGORIES,
    COMPONENTS,
    Breakdown,
    CollectiveRecord,
    DimTraffic,
    RunReport,
    attribute_intervals,
)
from .collective import CollectiveDriver
from .simulator import Simulator, run_simulation

__all__ = [
    "FifoPolicy",
    "NpuSpec",
    "NpuState",
    "__schedulers__",
    "roofline_time",
    "CATEGORIES",
    "COMPONENTS",
    "Breakdown",
    "CollectiveRecord",
    "DimTraffic",
    "RunReport",
    "attribute_intervals",
    "CollectiveDriver",
    "Simulator",
    "run_simulation",
]
