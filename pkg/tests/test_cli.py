import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from kgwigner import io
from kgwigner.cli import main
from kgwigner.grid import make_grid
from kgwigner.states import make_gaussian, superpose
from kgwigner.wigner import fv_wigner_components

SMALL = ["--nodes", "256", "--p-max", "12"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def state_file(tmp_path, capsys):
    path = tmp_path / "s.txt"
    assert run(capsys, "gaussian", *SMALL, "--sigma2", "0.8", "--p0", "0.5", "-o", str(path))[0] == 0
    return path


def test_gaussian_and_moments(tmp_path, capsys):
    path = tmp_path / "g.txt"
    assert run(capsys, "gaussian", "-o", str(path))[0] == 0
    code, out, _ = run(capsys, "moments", str(path), "--n", "2")
    assert code == 0
    data = json.loads(out)
    assert data["second_moment"] == pytest.approx(0.2110801143953004, abs=1e-10)
    assert data["formula_value"] == pytest.approx(data["grid_value"], abs=1e-9)


def test_state_file_round_trip(state_file):
    s = io.read_state(state_file)
    again = state_file.parent / "again.txt"
    io.write_state(s, again)
    assert again.read_bytes() == state_file.read_bytes()


def test_wigner_csv_round_trip(state_file, tmp_path, capsys):
    csv = tmp_path / "w.csv"
    assert run(capsys, "wigner", str(state_file), "-o", str(csv))[0] == 0
    w = io.read_wigner_csv(csv)
    ref = fv_wigner_components(io.read_state(state_file))
    for name in ("w_pp", "w_mm", "w_pm", "w_mp"):
        np.testing.assert_allclose(getattr(w, name), getattr(ref, name), rtol=0, atol=1e-15)
    lines = csv.read_text().splitlines()
    assert lines[0].startswith("# grid")
    assert lines[2] == "p,q,w_pp,w_mm,re_w_pm,im_w_pm"
    assert len(lines) == 3 + 256 * 256


def test_outputs_are_deterministic(state_file, tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "wigner", str(state_file), "-o", str(a))
    run(capsys, "wigner", str(state_file), "-o", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_evolve_preserves_norm(state_file, tmp_path, capsys):
    out = tmp_path / "e.txt"
    assert run(capsys, "evolve", str(state_file), "--t", "2.5", "-o", str(out))[0] == 0
    s0, s1 = io.read_state(state_file), io.read_state(out)
    assert s1.norm() == pytest.approx(s0.norm(), abs=1e-12)
    assert not np.allclose(s1.components, s0.components)


def test_purity_from_state_and_csv(state_file, tmp_path, capsys):
    code, out, _ = run(capsys, "purity", str(state_file))
    assert code == 0
    assert json.loads(out)["ratio_to_bound"] == pytest.approx(1.0, abs=1e-8)
    csv = tmp_path / "w.csv"
    run(capsys, "wigner", str(state_file), "-o", str(csv))
    code, out2, _ = run(capsys, "purity", str(csv))
    assert code == 0
    assert json.loads(out2)["purity_functional"] == pytest.approx(json.loads(out)["purity_functional"], abs=1e-14)


def test_check_passes(state_file, capsys):
    code, out, _ = run(capsys, "check", str(state_file))
    assert code == 0
    assert json.loads(out)["all_pass"] is True


def test_bad_input_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("not a state\n")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 2
    assert err.startswith("kgwigner: error:") and err.count("\n") == 1
    assert run(capsys, "check", str(tmp_path / "missing.txt"))[0] == 2
    code, _, err = run(capsys, "gaussian", *SMALL, "--sigma2", "3", "-o", str(tmp_path / "x.txt"))
    assert code == 2 and "too large" in err
    assert run(capsys, "gaussian", "--charge", "0", "-o", str(tmp_path / "x.txt"))[0] == 2


def test_numerical_failure_exit_code(tmp_path, capsys):
    # packets at +-6.5 on a window of 12: staggered products leave the grid
    g = make_grid(256, 12.0)
    s = superpose([make_gaussian(g, 0.2, 1, 6.5, 0.0), make_gaussian(g, 0.2, 1, -6.5, 1.0)], [1, 1])
    path = tmp_path / "far.txt"
    io.write_state(s, path)
    code, _, err = run(capsys, "moments", str(path), "--n", "2")
    assert code == 3 and "route" in err
    code, out, err = run(capsys, "check", str(path))
    assert code == 3
    assert json.loads(out)["all_pass"] is False


def test_fig2(tmp_path, capsys):
    csv, png = tmp_path / "fig2.csv", tmp_path / "fig2.png"
    code, out, _ = run(capsys, "fig2", "-o", str(csv), "--figure", str(png))
    assert code == 0
    summary = json.loads(out)
    assert summary["rows"] == 60
    assert summary["all_below_reference"] is True
    assert summary["sign_changes"] == 1
    assert summary["threshold_sigma_p"] == pytest.approx(2.7630719497554295, abs=1e-4)
    assert summary["dx_dp_at_min_sigma"] == pytest.approx(0.5, abs=1e-3)
    lines = csv.read_text().splitlines()
    assert lines[0] == "sigma_p,dx2_usual,dx2_corrected,reference_dx2"
    assert len(lines) == 61
    assert png.stat().st_size > 0
    again = tmp_path / "again.csv"
    run(capsys, "fig2", "-o", str(again))
    assert again.read_bytes() == csv.read_bytes()


def test_fig2_rejects_bad_range(tmp_path, capsys):
    code, _, _ = run(capsys, "fig2", "--sigma2-min", "2", "--sigma2-max", "1", "-o", str(tmp_path / "f.csv"))
    assert code == 2


@pytest.mark.skipif(shutil.which("kgwigner") is None, reason="console script not installed")
def test_console_script(tmp_path):
    path = tmp_path / "g.txt"
    r = subprocess.run(["kgwigner", "gaussian", *SMALL, "-o", str(path)], capture_output=True, text=True)
    assert r.returncode == 0
    r = subprocess.run([sys.executable, "-m", "kgwigner.cli", "check", str(path)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
