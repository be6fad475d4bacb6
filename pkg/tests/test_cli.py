import csv
import io
import json
import math
import subprocess
import sys

import mpmath as mp
import pytest

from cmcgraphs.cli import OUTPUT_DIR_ENV, fmt, generate_rows, main
from cmcgraphs.profiles import Family, profile

CHECK_KEYS = {"name", "expected", "actual", "tolerance", "pass"}


def alpha_oracle(c, H):
    return float(mp.quad(lambda s: 4 * H / (4 * H * H + c * (1 - s * s)), [0, 1]))


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(v) for v in r] for r in rows[1:]]


@pytest.fixture(autouse=True)
def no_env_dir(monkeypatch):
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)


# -- generate ---------------------------------------------------------------------


def test_generate_hsiang(tmp_path):
    out = tmp_path / "g.csv"
    rc = main(["generate", "--family", "rot-sphere-h2", "--mean-curvature", "0.7", "--samples", "256",
               "--format", "csv", "-o", str(out)])
    assert rc == 0
    header, rows = read_csv(out)
    assert header == ["param", "base_arclength", "h", "nu", "H_num"]
    assert len(rows) == 256
    hmax = max(r[2] for r in rows)
    # interior samples stop short of the axis by O(1e-3) in the radius
    assert hmax == pytest.approx(alpha_oracle(-1, 0.7), abs=1e-4)
    assert hmax <= alpha_oracle(-1, 0.7)
    assert all(abs(r[4] - 0.7) <= 1e-6 for r in rows)
    meta = json.loads((tmp_path / "g.csv.meta.json").read_text())
    assert meta["is_bigraph"] is True


def test_generate_parabolic(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["generate", "--family", "parabolic", "--mean-curvature", "1", "--samples", "128",
                 "-o", str(out)]) == 0
    _, rows = read_csv(out)
    assert len(rows) == 128
    meta = json.loads((tmp_path / "p.csv.meta.json").read_text())
    assert meta["is_bigraph"] is False
    # the profile spans two periods of y; samples 64 apart are one period apart and the
    # height drifts by the same nonzero amount every period instead of closing up
    om = math.sqrt(3)
    drifts = [rows[k + 64][2] - rows[k][2] for k in range(64)]
    assert all(d == pytest.approx(-2 * math.pi * (2 / om - 1), abs=1e-9) for d in drifts)


def test_generate_json_records(tmp_path):
    out = tmp_path / "t.json"
    assert main(["generate", "--family", "rot-torus-s2", "-H", "1", "--samples", "10", "--format", "json",
                 "-o", str(out)]) == 0
    recs = json.loads(out.read_text())
    assert len(recs) == 10 and set(recs[0]) == {"param", "base_arclength", "h", "nu", "H_num"}


def test_generate_stdout(capsys):
    assert main(["generate", "--family", "euclidean-sphere", "-H", "2", "--samples", "3"]) == 0
    text = capsys.readouterr().out
    assert text.splitlines()[0] == "param,base_arclength,h,nu,H_num"
    assert len(text.splitlines()) == 4


def test_csv_round_trip(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["generate", "--family", "hyp-cylinder", "-H", "0.8", "--samples", "50", "-o", str(out)]) == 0
    _, rows = read_csv(out)
    ref = generate_rows(profile(Family.HYP_CYLINDER, 0.8), 50)
    assert rows == ref.tolist()
    raw = out.read_bytes()
    assert b"\r" not in raw and b'"' not in raw


@pytest.mark.parametrize("x", [math.pi, 1 / 3, 1e-300, -2.5e17, 0.1 + 0.2])
def test_fmt_round_trip(x):
    assert float(fmt(x)) == x


# -- verify -----------------------------------------------------------------------


def _report(path):
    rep = json.loads(path.read_text())
    assert set(rep) == {"config", "checks", "pass"}
    assert all(set(c) == CHECK_KEYS for c in rep["checks"])
    assert rep["pass"] == all(c["pass"] for c in rep["checks"])
    return rep


def test_verify_hyp_cylinder(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--family", "hyp-cylinder", "--mean-curvature", "1", "-o", str(out)]) == 0
    rep = _report(out)
    assert rep["pass"] is True
    kappas = [c for c in rep["checks"] if c["name"].startswith("boundary_kappa")]
    assert kappas and all(c["expected"] == pytest.approx(-0.5, abs=1e-15) for c in kappas)


def test_verify_s2_sphere(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--family", "rot-sphere-s2", "--mean-curvature", "1", "-o", str(out)]) == 0
    rep = _report(out)
    kappas = [c for c in rep["checks"] if c["name"].startswith("boundary_kappa")]
    assert kappas and all(c["expected"] == pytest.approx(-0.75, abs=1e-15) for c in kappas)


def test_verify_unreachable_tolerance(tmp_path):
    out = tmp_path / "v.json"
    rc = main(["verify", "--family", "euclidean-sphere", "--mean-curvature", "1", "--tolerance", "1e-20",
               "-o", str(out)])
    assert rc == 1
    rep = _report(out)
    assert rep["pass"] is False


def test_verify_timings_separate(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["verify", "--family", "euclidean-cylinder", "-H", "1", "--grid", "16"]
    assert main(args + ["-o", str(a)]) == 0
    assert main(args + ["--timings", "-o", str(b)]) == 0
    plain, timed = json.loads(a.read_text()), json.loads(b.read_text())
    assert set(timed["timings"]) == {c["name"] for c in timed["checks"]}
    del timed["timings"]
    assert plain == timed


# -- bounds -----------------------------------------------------------------------


def test_bounds_torus_equality(tmp_path):
    out = tmp_path / "b.json"
    assert main(["bounds", "-c", "1", "-H", "1", "--nu0", "0", "-m", "0.5", "--format", "json", "-o", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["kappa_lower_height"] == pytest.approx(0.5, abs=1e-15)


def test_bounds_distance(tmp_path):
    out = tmp_path / "b.json"
    assert main(["bounds", "-c", "0", "-H", "1", "--nu0", "0", "--height", "1", "--format", "json",
                 "-o", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["distance_lower_bound"] == pytest.approx(math.pi / 2, abs=1e-10)
    assert {"convexity_cap", "convexity_cap_printed", "forces_convex", "forces_convex_printed"} <= set(rec)


def test_bounds_text(capsys):
    assert main(["bounds", "-c", "1", "-H", "1"]) == 0
    text = capsys.readouterr().out
    assert "alpha_max = 0.860818" in text


def test_bounds_invalid():
    assert main(["bounds", "-c", "-4", "-H", "1"]) == 2


# -- figures ----------------------------------------------------------------------


def test_figures(tmp_path):
    assert main(["figures", "--output-dir", str(tmp_path), "--samples", "101"]) == 0
    meta = json.loads((tmp_path / "figures_meta.json").read_text())
    assert meta["H_star"] == pytest.approx(0.331372, abs=1e-4)
    f1 = meta["fig1"]
    assert len(f1) == 12
    for H in {r["H"] for r in f1}:
        sphere = next(r["peak"] for r in f1 if r["H"] == H and r["kind"] == "RotSphereH2xR")
        cyl = next(r["peak"] for r in f1 if r["H"] == H and r["kind"] == "HypCylinderH2xR")
        assert cyl / sphere == pytest.approx(0.5, abs=1e-10)
    f2 = meta["fig2"]
    assert len(f2) == 12
    for kind in ("RotSphereS2xR", "RotTorusS2xR"):
        peaks = {r["H"]: r["peak"] for r in f2 if r["kind"] == kind}
        assert max(peaks, key=peaks.get) == meta["H_star"]
    header, rows = read_csv(tmp_path / "fig1.csv")
    assert header == ["H", "kind", "s", "h"]
    assert len(rows) == 6 * (2 * 101 - 1) + 6 * 101


# -- contract: exit codes, config, environment, determinism --------------------------


@pytest.mark.parametrize("argv", [
    ["generate", "--family", "rot-torus-s2", "--mean-curvature", "0"],
    ["generate", "--family", "no-such-family", "-H", "1"],
    ["generate", "-H", "1"],
    ["generate", "--family", "hyp-cylinder", "-H", "0.5"],
    ["generate", "--family", "rot-general-s2", "-H", "1", "--aux", "5"],
    ["generate", "--family", "hyp-cylinder", "-H", "1", "--samples", "0"],
    ["verify", "--family", "hyp-cylinder", "-H", "1", "--grid", "4"],
    ["bounds", "-H", "1", "--nu0", "0.3"],
    ["nonsense"],
    [],
])
def test_invalid_input_exit_2(argv):
    assert main(argv) == 2


def test_io_failure_exit_3(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["generate", "--family", "euclidean-sphere", "-H", "1", "-o", str(blocker / "out.csv")]) == 3
    assert main(["figures", "--output-dir", str(blocker / "sub")]) == 3


def test_missing_config_exit_2(tmp_path):
    assert main(["--config", str(tmp_path / "absent"), "bounds", "-H", "1"]) == 2


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep entry\nfamily = hyp-cylinder\nmean-curvature = 1\nsamples = 7\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["--config", str(cfg), "generate", "-o", str(a)]) == 0
    assert len(read_csv(a)[1]) == 7
    assert main(["generate", "--config", str(cfg), "--samples", "5", "-H", "2", "-o", str(b)]) == 0
    assert len(read_csv(b)[1]) == 5
    assert json.loads((tmp_path / "b.csv.meta.json").read_text())["H"] == 2.0


def test_bad_config_line(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("family hyp-cylinder\n")
    assert main(["--config", str(cfg), "generate"]) == 2


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    assert main(["generate", "--family", "euclidean-cylinder", "-H", "1", "--samples", "4"]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["euclidean-cylinder_H1.csv", "euclidean-cylinder_H1.csv.meta.json"]
    assert main(["figures", "--samples", "11"]) == 0
    assert (tmp_path / "fig2.csv").exists()


def test_no_temp_files_left(tmp_path):
    assert main(["generate", "--family", "euclidean-sphere", "-H", "1", "-o", str(tmp_path / "x.csv")]) == 0
    assert not [p for p in tmp_path.iterdir() if p.name.endswith(".tmp")]


@pytest.mark.parametrize("argv", [
    ["generate", "--family", "rot-sphere-s2", "-H", "0.9", "--samples", "40"],
    ["generate", "--family", "hyp-general", "-H", "1", "--aux", "0.4", "--samples", "40", "--format", "json"],
    ["verify", "--family", "rot-torus-s2", "-H", "1", "--grid", "16"],
    ["bounds", "-c", "-1", "-H", "0.8", "--nu0", "-0.2", "-m", "0.3", "--height", "0.5", "--format", "json"],
])
def test_byte_identical_outputs(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(argv + ["-o", str(a)]) in (0, 1)
    assert main(argv + ["-o", str(b)]) in (0, 1)
    assert a.read_bytes() == b.read_bytes()


def test_figures_deterministic(tmp_path):
    for d in ("a", "b"):
        assert main(["figures", "--output-dir", str(tmp_path / d), "--samples", "21"]) == 0
    for name in ("fig1.csv", "fig2.csv", "figures_meta.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cmcgraphs", "bounds", "-c", "-4", "-H", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 2
    assert "error" in res.stderr
    res = subprocess.run([sys.executable, "-m", "cmcgraphs", "bounds", "-c", "0", "-H", "1", "--height", "1",
                          "--format", "json"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.load(io.StringIO(res.stdout))["distance_lower_bound"] == pytest.approx(math.pi / 2, abs=1e-10)
