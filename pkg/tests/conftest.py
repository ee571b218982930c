import importlib.util
from pathlib import Path

import pytest

from casimir.lib.config_loader import get_default_material
from casimir.lib.params import to_dimensionless
from casimir.models.physics import StatePoint

ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def gold_perfect():
    return get_default_material("perfect-lattice")


@pytest.fixture
def gold_defect():
    return get_default_material("defect-lattice")


@pytest.fixture
def gold_ds(gold_perfect):
    """Au-like nonlocal state at a = 1 μm and T = 0"""
    return to_dimensionless(StatePoint(a=1e-6, T=0.0), gold_perfect)


@pytest.fixture(scope="session")
def cli():
    spec = importlib.util.spec_from_file_location("casimir_cli", ROOT / "tools" / "casimir_cli.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.fixture
def write_config(tmp_path):
    def _write(text: str, name: str = "run.yml") -> Path:
        path = tmp_path / name
        path.write_text(text)
        return path
    return _write


SMALL_CONFIG = """\
material:
  omega_p: {value: 9.0, unit: eV}
  relaxation: {kind: perfect-lattice, b: 3.3125e+9}
  v_tr: {value: 0.01, unit: c}
  v_l: {value: 0.01, unit: c}
geometry:
  a: 1.0e-6
temperature:
  T_values: [100.0, 300.0]
model: [ideal-metal, plasma]
output:
  format: csv
  path: {path}
  precision: 12
"""


@pytest.fixture
def small_config(write_config, tmp_path):
    """Two-model, two-temperature run writing CSV into tmp_path"""
    def _make(path_name: str = "results.csv", name: str = "run.yml") -> Path:
        return write_config(SMALL_CONFIG.replace("{path}", str(tmp_path / path_name)), name)
    return _make
