#--------------------------------------------------------------------------------------#
# Copyright (c) 2026 FabricLink                                                        #
# This file is part of FabricLink, an analytical simulator for distributed training.   #
# See README.md and docs/ for details.                                                 #
#--------------------------------------------------------------------------------------#

"""Every bundled scenario conserves time and replays identically."""

import pytest

from fabriclink.config import bundled_scenarios, load_scenario
from fabriclink.engine import run_simulation


@pytest.mark.slow
@pytest.mark.parametrize("name", bundled_scenarios())
def test_bundled_scenario_conserves_time_and_is_deterministic(name, tmp_path):
    """
    Pass criteria: on every NPU the five components add up to the makespan
    exactly, and two runs write byte-identical reports.
    """
    config = load_scenario(name)
    first = run_simulation(config)
    assert first.makespan > 0
    assert len(first.breakdowns) == config.topology.npu_count
    for b in first.breakdowns:
        assert b.total == first.makespan

    second = run_simulation(load_scenario(name))
    a = first.write(tmp_path / "a.json")
    b = second.write(tmp_path / "b.json")
    assert a.read_bytes() == b.read_bytes()
