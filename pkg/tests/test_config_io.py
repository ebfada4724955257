import json

import numpy as np
import pytest

from anyon_orbits.config import DEFAULT_TOLERANCES, OUTPUT_DIR_ENV, RunConfig, Tolerances, load_config
from anyon_orbits.io import metadata, read_csv, resolve_path, write_csv, write_json


def test_default_tolerances():
    t = DEFAULT_TOLERANCES
    assert (t.orthosymplectic, t.projector, t.degeneracy, t.pole_location) == (1e-10, 1e-12, 1e-9, 1e-9)


def test_tolerances_must_be_positive():
    with pytest.raises(ValueError):
        Tolerances(degeneracy=0.0)


def test_load_config_from_ini(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[run]\neta = 0.05\nseed = 7\ntol_degeneracy = 1e-7\n")
    cfg = load_config(p, seed=None, n_max=3)
    assert cfg.eta == 0.05 and cfg.seed == 7 and cfg.n_max == 3
    assert cfg.tolerances.degeneracy == 1e-7


def test_unknown_key_rejected():
    with pytest.raises(KeyError):
        load_config(colour="blue")


def test_output_dir_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    assert load_config().output_dir == str(tmp_path)
    assert load_config(output_dir="elsewhere").output_dir == "elsewhere"


def test_csv_round_trip(tmp_path):
    cfg = RunConfig(output_dir=str(tmp_path))
    meta = metadata(cfg, alpha=0.3, grid=np.array([1.0, 2.0]))
    path = write_csv(resolve_path(cfg, "sub/t.csv"), {"a": np.array([0.1, 0.2]), "b": [1, 2]}, meta)
    back, cols = read_csv(path)
    assert back["parameters"] == {"alpha": 0.3, "grid": [1.0, 2.0]}
    assert [float(x) for x in cols["a"]] == [0.1, 0.2]
    assert cols["b"] == ["1", "2"]


def test_csv_rejects_ragged(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "x.csv", {"a": [1, 2], "b": [1]}, {})


def test_json_has_metadata_first(tmp_path):
    cfg = RunConfig()
    path = write_json(tmp_path / "x.json", {"value": np.float64(np.inf), "z": 1 + 2j}, metadata(cfg))
    doc = json.loads(path.read_text())
    assert list(doc)[0] == "metadata"
    assert doc["value"] == "inf" and doc["z"] == {"re": 1.0, "im": 2.0}
    assert doc["metadata"]["config"]["k_max"] == 2000


def test_metadata_is_deterministic():
    assert metadata(RunConfig(), a=1) == metadata(RunConfig(), a=1)
