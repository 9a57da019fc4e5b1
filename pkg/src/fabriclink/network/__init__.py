#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

from .analytical import (
    AnalyticalNetwork,
    ContractError,
    DeadlockError,
    LinkModel,
    serialization_time,
    transfer_time,
)
from .events import Event, EventCore

__all__ = [
    "AnalyticalNetwork",
    "ContractError",
    "DeadlockError",
    "LinkModel",
    "serialization_time",
    "transfer_time",
    "Event",
    "EventCore",
]
