#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

from .main import build_parser, cmd_gen_trace, cmd_run, cmd_sweep, cmd_validate
from .main import fabriclink_main

__all__ = [
    "build_parser",
    "cmd_gen_trace",
    "cmd_run",
    "cmd_sweep",
    "cmd_validate",
    "fabriclink_main",
]
