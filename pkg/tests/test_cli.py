import json

import numpy as np
import pytest

from anyon_orbits.cli import main
from anyon_orbits.io import read_csv


def run(capsys, tmp_path, *argv):
    code = main(["--output-dir", str(tmp_path), *argv])
    out = capsys.readouterr().out
    return code, out


def test_generators_two_particles(capsys, tmp_path):
    code, out = run(capsys, tmp_path, "generators", "--n-particles", "2", "--check")
    assert code == 0
    doc = json.loads(out)
    assert doc["count"] == 16 and doc["failures"] == 0
    saved = json.loads((tmp_path / doc["written"]).read_text())
    assert "metadata" in saved


def test_generators_three_particles(capsys, tmp_path):
    code, out = run(capsys, tmp_path, "generators", "--n-particles", "3", "--check")
    assert code == 0 and json.loads(out)["count"] == 36


def test_generators_zero_particles(capsys, tmp_path):
    assert run(capsys, tmp_path, "generators", "--n-particles", "0")[0] == 1


@pytest.mark.parametrize("n,count", [(2, 2), (3, 8)])
def test_families(capsys, tmp_path, n, count):
    code, out = run(capsys, tmp_path, "families", "--n-particles", str(n), "--export", "cat.json")
    assert code == 0
    doc = json.loads((tmp_path / "cat.json").read_text())
    assert doc["count"] == count and len(doc["classes"]) == count


def test_families_out_of_range(capsys, tmp_path):
    assert run(capsys, tmp_path, "families", "--n-particles", "7")[0] == 1


def test_families_concentric_only_reports_gap(capsys, tmp_path):
    code, _ = run(capsys, tmp_path, "families", "--n-particles", "4", "--concentric-only")
    assert code == 2


def orbit(capsys, tmp_path, ell, alpha, *extra):
    code, out = run(
        capsys, tmp_path, "orbit", "--energy", "1", "--ell", str(ell), "--alpha", str(alpha), *extra
    )
    return code, (json.loads(out) if code == 0 else None)


def test_orbit_reflecting(capsys, tmp_path):
    code, doc = orbit(capsys, tmp_path, 0.5, 0.5, "--epsilon", "1e-3")
    assert code == 0 and doc["kind"] == "reflecting_radial"
    meta, cols = read_csv(tmp_path / doc["written"])
    assert meta["parameters"]["alpha"] == 0.5
    assert {"t", "r", "theta", "region"} <= set(cols)


def test_orbit_exterior(capsys, tmp_path):
    code, doc = orbit(capsys, tmp_path, 0.9, 0.3, "--epsilon", "1e-3")
    assert code == 0 and doc["kind"] == "exterior_ellipse"


def test_orbit_degenerate_line(capsys, tmp_path):
    code, doc = orbit(capsys, tmp_path, 0.0, 0.0, "--epsilon", "1e-2")
    assert code == 0
    assert "through the origin" in doc["description"]


def test_orbit_limit_sequence(capsys, tmp_path):
    code, doc = orbit(capsys, tmp_path, 0.5, 0.5, "--epsilon", "1e-1", "--epsilon", "1e-2", "--epsilon", "1e-3")
    assert code == 0 and doc["kind"] == "reflecting_radial"


def test_orbit_inconsistent_state(capsys, tmp_path):
    code, _ = orbit(capsys, tmp_path, 5.0, 0.0, "--epsilon", "1e-2")
    assert code == 1


def test_spectrum(capsys, tmp_path):
    code, out = run(capsys, tmp_path, "spectrum", "--n-particles", "3", "--alpha-grid", "0,0.5,1", "--out", "s.csv")
    assert code == 0
    meta, cols = read_csv(tmp_path / "s.csv")
    assert {int(s) for s in cols["slope"]} == {-3, -1, 1, 3}
    assert meta["parameters"]["offset"] == "maslov"


def test_dos(capsys, tmp_path):
    code, _ = run(capsys, tmp_path, "dos", "--alpha", "0.3", "--grid", "1.5:4:0.01", "--k-max", "200", "--out", "d.csv")
    assert code == 0
    meta, cols = read_csv(tmp_path / "d.csv")
    assert len(cols["E"]) == 251
    assert meta["config"]["k_max"] == 200


def test_dos_rejects_low_grid(capsys, tmp_path):
    assert run(capsys, tmp_path, "dos", "--alpha", "0.3", "--grid", "0.5:4:0.01")[0] == 1


def test_propagator_both(capsys, tmp_path):
    code, out = run(capsys, tmp_path, "propagator", "--alpha", "0.25", "--form", "both", "--e-max", "6")
    assert code == 0


def test_fourier(capsys, tmp_path):
    code, out = run(capsys, tmp_path, "fourier", "--alpha", "0.3", "--k-max", "500", "--out", "f.json")
    assert code == 0
    doc = json.loads((tmp_path / "f.json").read_text())
    ts = [p["t"] for p in doc["peaks"]]
    assert min(abs(t - np.pi) for t in ts) < 0.01
    assert min(abs(t - 2 * np.pi) for t in ts) < 0.01


def test_accept_single_criterion(capsys, tmp_path):
    code, out = run(capsys, tmp_path, "accept", "--only", "6")
    assert code == 0 and "[PASS] 6." in out
    assert (tmp_path / "acceptance.json").exists()


def test_bad_flags(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["generators", "--n-particles", "two"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 1


def test_config_file_and_env(capsys, tmp_path, monkeypatch):
    ini = tmp_path / "run.ini"
    ini.write_text("[run]\nk_max = 123\n")
    out_dir = tmp_path / "env_out"
    monkeypatch.setenv("ANYON_ORBITS_OUTPUT_DIR", str(out_dir))
    code = main(["--config", str(ini), "dos", "--alpha", "0.2", "--grid", "1.5:2:0.1", "--out", "x.csv"])
    assert code == 0
    meta, _ = read_csv(out_dir / "x.csv")
    assert meta["config"]["k_max"] == 123


def test_missing_config_file(capsys, tmp_path):
    assert main(["--config", str(tmp_path / "nope.ini"), "generators", "--n-particles", "1"]) == 1
