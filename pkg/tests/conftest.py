"""Pytest configuration and fixtures."""

from pathlib import Path
from tempfile import NamedTemporaryFile

import numpy as np
import pytest

from ticket.config.settings import get_settings
from ticket.network import Architecture, TargetNetwork, save_network
from ticket.sampling.streams import generator


@pytest.fixture(autouse=True)
def test_config_path(monkeypatch):
    """Create a temporary experiments file and set TICKET_CONFIG_PATH for all tests."""
    yaml_content = """
repro:
  n_max: 100
  depth: 10
  eps: 0.01
  delta: 0.01
  w_max: 1.0
  f_max: 1.0
  tolerance: 0.02
  reported:
    thm1_unit: 630
    thm1_worst: 2450
    recycle_unit: 144
    recycle_worst: 574
    malach: 2.0e+15

subsums:
  subsum_count: 10
  uniform_count: 200
  w_max: 1.0

end_to_end:
  eps: 0.2
  delta: 0.1
  w_max: 1.0
  num_inputs: 200
"""
    with NamedTemporaryFile(mode="w", suffix=".yaml", delete=False) as f:
        f.write(yaml_content)
        f.flush()
        config_path = f.name

    monkeypatch.setenv("TICKET_CONFIG_PATH", config_path)
    monkeypatch.setenv("TICKET_AUDIT_ENABLED", "false")
    get_settings.cache_clear()

    yield config_path

    # Cleanup
    Path(config_path).unlink(missing_ok=True)
    get_settings.cache_clear()


@pytest.fixture
def small_target() -> TargetNetwork:
    """The desk-scale end-to-end target n=(3, 4, 2) with seeded uniform weights."""
    arch = Architecture.uniform([3, 4, 2])
    return TargetNetwork.random(arch, 1.0, generator(7, "target"))


@pytest.fixture
def single_weight_target() -> TargetNetwork:
    """One ReLU weight w* = 0.5."""
    return TargetNetwork(Architecture.uniform([1, 1]), (np.array([[0.5]]),), 1.0)


@pytest.fixture
def network_file(tmp_path, small_target) -> Path:
    """small_target written as network JSON."""
    return save_network(small_target, tmp_path / "target.json")
