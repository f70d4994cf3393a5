import numpy as np
import pytest

from levy_squarefn.config import (default_config_text, dumps_config,
                                  load_config, loads_config)
from levy_squarefn.errors import ConfigError, StructuralError
from levy_squarefn import io as fio
from levy_squarefn.spectral import Grid, GridFunction


def test_default_config_parses():
    cfg = loads_config("")
    assert cfg.model.kind == "isotropic-stable"
    assert cfg.grid.N == 512
    assert cfg.suites == ("all",)


def test_round_trip():
    cfg = loads_config("")
    assert loads_config(dumps_config(cfg)) == cfg
    text = default_config_text()
    assert loads_config(text) == cfg


def test_round_trip_compound_poisson():
    text = """
[model]
kind = "compound-poisson"
d = 1
atoms = [[[1.0], 0.5], [[-1.0], 0.5]]
"""
    cfg = loads_config(text)
    assert loads_config(dumps_config(cfg)) == cfg
    assert cfg.model.tail_mass(0.5) == pytest.approx(1.0)


def test_config_errors_carry_field():
    with pytest.raises(ConfigError) as err:
        loads_config("[run]\nsuites = [\"nope\"]\n")
    assert err.value.field == "run.suites"
    with pytest.raises(ConfigError) as err:
        loads_config("[grid]\nd = 2\n")
    assert err.value.field == "grid.d"
    with pytest.raises(ConfigError) as err:
        loads_config("[family]\nwidths = [1.0]\n")
    assert err.value.field == "family"
    with pytest.raises(ConfigError) as err:
        loads_config("[tolerances]\nsymbol = -1.0\n")
    assert err.value.field == "tolerances.symbol"
    with pytest.raises(ConfigError):
        loads_config("[bogus]\nx = 1\n")


def test_tolerance_override():
    cfg = loads_config("[tolerances]\nsymbol = 0.5\n")
    assert cfg.tol("symbol", 1e-3) == 0.5
    assert cfg.tol("other", 1e-3) == 1e-3


def test_load_config_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(default_config_text())
    cfg = load_config(str(path))
    assert cfg == loads_config("")


def _field(d=1):
    grid = Grid(d=d, N=32, L=4.0)
    rng = np.random.default_rng(0)
    return GridFunction(grid, rng.standard_normal(grid.shape))


def test_csv_round_trip(tmp_path):
    f = _field()
    path = str(tmp_path / "f.csv")
    fio.save_csv(f, path)
    g = fio.load_csv(path)
    assert g.grid == f.grid
    assert np.max(np.abs(g.values - f.values)) < 1e-12


def test_csv_round_trip_d2(tmp_path):
    f = _field(d=2)
    path = str(tmp_path / "f.csv")
    fio.save_csv(f, path)
    g = fio.load_csv(path)
    assert g.grid == f.grid
    assert np.max(np.abs(g.values - f.values)) < 1e-12


def test_raw_round_trip(tmp_path):
    f = _field(d=2)
    path = str(tmp_path / "f.raw")
    fio.save_raw(f, path, name="noise")
    g = fio.load_raw(path)
    assert g.grid == f.grid
    assert np.array_equal(g.values, f.values)


def test_raw_size_mismatch(tmp_path):
    f = _field()
    path = str(tmp_path / "f.raw")
    fio.save_raw(f, path)
    with open(path, "ab") as fh:
        fh.write(b"\x00" * 8)
    with pytest.raises(StructuralError):
        fio.load_raw(path)
