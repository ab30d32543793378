import json
import subprocess
import sys

import numpy as np
import pytest

from salsa_deconv.bench import degrade, phantom
from salsa_deconv.cli import PgmError, main, parse_args, read_image, write_image
from salsa_deconv.convolution import BlurKind, build_psf
from salsa_deconv.solver import DivergenceError


# ---------------------------------------------------------------------------
# PGM I/O


def test_pgm_round_trip_byte_identical(tmp_path):
    rng = np.random.default_rng(70)
    img = np.rint(rng.uniform(0, 255, (24, 16)))
    p = tmp_path / "a.pgm"
    q = tmp_path / "b.pgm"
    write_image(img, p)
    decoded = read_image(p)
    assert np.array_equal(decoded, img)
    write_image(decoded, q)
    assert p.read_bytes() == q.read_bytes()


def test_pgm_known_payload_decodes(tmp_path):
    p = tmp_path / "tiny.pgm"
    p.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 128, 255, 7]))
    img = read_image(p)
    assert np.array_equal(img, [[0.0, 128.0], [255.0, 7.0]])


def test_pgm_header_comments_and_whitespace(tmp_path):
    p = tmp_path / "c.pgm"
    p.write_bytes(b"P5 # comment\n# another\n 3\t1 # w h\n255\n" + bytes([9, 8, 7]))
    assert np.array_equal(read_image(p), [[9.0, 8.0, 7.0]])


def test_pgm_sixteen_bit_rejected(tmp_path):
    p = tmp_path / "deep.pgm"
    p.write_bytes(b"P5\n2 2\n65535\n" + bytes(8))
    with pytest.raises(PgmError, match="maxval"):
        read_image(p)


def test_pgm_wrong_magic_rejected(tmp_path):
    p = tmp_path / "ascii.pgm"
    p.write_bytes(b"P2\n2 2\n255\n0 1 2 3\n")
    with pytest.raises(PgmError, match="P5"):
        read_image(p)


def test_pgm_truncated_raster_names_offset(tmp_path):
    p = tmp_path / "short.pgm"
    p.write_bytes(b"P5\n4 4\n255\n" + bytes(7))
    with pytest.raises(PgmError, match="byte"):
        read_image(p)


def test_pgm_bad_header_token(tmp_path):
    p = tmp_path / "bad.pgm"
    p.write_bytes(b"P5\nx 2\n255\n" + bytes(4))
    with pytest.raises(PgmError, match="width"):
        read_image(p)


def test_write_image_clamps_and_rounds(tmp_path):
    p = tmp_path / "clamp.pgm"
    write_image(np.array([[-5.0, 300.7], [128.4, 127.5]]), p)
    img = read_image(p)
    assert np.array_equal(img, [[0.0, 255.0], [128.0, 128.0]])


def test_write_image_rejects_non_2d(tmp_path):
    with pytest.raises(ValueError):
        write_image(np.zeros(5), tmp_path / "x.pgm")


# ---------------------------------------------------------------------------
# parse_args


def make_pgm(tmp_path, name="img.pgm", side=32):
    p = tmp_path / name
    write_image(phantom(side), p)
    return p


def test_parse_run_defaults(tmp_path):
    img = make_pgm(tmp_path)
    cfg = parse_args(["run", "--experiment", "1", "--image", str(img),
                      "--out", str(tmp_path / "results")])
    assert cfg.subcommand == "run"
    assert cfg.experiment == "1"
    assert cfg.image == img
    assert cfg.tau is None and cfg.mu is None and cfg.solvers == ()
    assert cfg.out == tmp_path / "results"


def test_parse_deblur_mu_auto(tmp_path):
    img = make_pgm(tmp_path)
    cfg = parse_args(["deblur", "--image", str(img), "--blur", "uniform9",
                      "--tau", "0.05", "--mu", "auto"])
    assert cfg.blur is BlurKind.UNIFORM9
    assert cfg.tau == 0.05
    assert cfg.mu is None  # auto resolves downstream to 0.1*tau


def test_parse_scientific_notation(tmp_path):
    img = make_pgm(tmp_path)
    cfg = parse_args(["deblur", "--image", str(img), "--blur", "gaussian",
                      "--tau", "5e-2", "--mu", "1.5e-3", "--rel-tol", "1E-7"])
    assert cfg.tau == 0.05
    assert cfg.mu == 1.5e-3
    assert cfg.rel_tol == 1e-7


def test_parse_repeatable_solver(tmp_path):
    img = make_pgm(tmp_path)
    cfg = parse_args(["run", "--experiment", "2A", "--image", str(img),
                      "--solver", "salsa", "--solver", "fista"])
    assert cfg.solvers == ("salsa", "fista")


def test_unknown_experiment_id_is_usage_error(tmp_path, capsys):
    img = make_pgm(tmp_path)
    with pytest.raises(SystemExit) as exc:
        parse_args(["run", "--experiment", "9", "--image", str(img)])
    assert exc.value.code == 2
    assert "unknown experiment id" in capsys.readouterr().err


def test_missing_image_file_is_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        parse_args(["deblur", "--image", str(tmp_path / "nope.pgm"),
                    "--blur", "uniform9", "--tau", "0.1"])
    assert exc.value.code == 2
    assert "not found" in capsys.readouterr().err


def test_deblur_requires_tau(tmp_path):
    img = make_pgm(tmp_path)
    with pytest.raises(SystemExit) as exc:
        parse_args(["deblur", "--image", str(img), "--blur", "uniform9"])
    assert exc.value.code == 2


def test_non_numeric_value_is_usage_error(tmp_path):
    img = make_pgm(tmp_path)
    with pytest.raises(SystemExit) as exc:
        parse_args(["deblur", "--image", str(img), "--blur", "uniform9",
                    "--tau", "lots"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        parse_args(["deblur", "--image", str(img), "--blur", "uniform9",
                    "--tau", "0.1", "--mu", "bogus"])


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        parse_args(["run", "--experiment", "1", "--frobnicate"])
    assert exc.value.code == 2


def test_negative_tau_rejected(tmp_path):
    img = make_pgm(tmp_path)
    with pytest.raises(SystemExit):
        parse_args(["deblur", "--image", str(img), "--blur", "uniform9",
                    "--tau", "-0.5"])


# ---------------------------------------------------------------------------
# main


def test_run_writes_stable_artifacts(tmp_path, capsys):
    img = make_pgm(tmp_path)
    out = tmp_path / "results"
    code = main(["run", "--experiment", "1", "--image", str(img),
                 "--out", str(out), "--max-iters", "8",
                 "--solver", "salsa", "--solver", "ist"])
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["1_ist.pgm", "1_ist_trace.csv", "1_report.json",
                     "1_salsa.pgm", "1_salsa_trace.csv"]
    doc = json.loads((out / "1_report.json").read_text())
    assert doc["experiment"]["id"] == "1"
    assert set(doc["solvers"]) == {"salsa", "ist"}
    assert "1 salsa:" in capsys.readouterr().out


def test_run_uses_builtin_phantom_when_no_image(tmp_path):
    out = tmp_path / "r"
    code = main(["run", "--experiment", "2A", "--out", str(out),
                 "--max-iters", "3"])
    assert code == 0
    assert (out / "2A_salsa.pgm").exists()
    assert read_image(out / "2A_salsa.pgm").shape == (256, 256)


def test_deblur_end_to_end(tmp_path):
    y = degrade(phantom(32), build_psf(BlurKind.UNIFORM9), 0.3136, seed=4)
    obs = tmp_path / "obs.pgm"
    write_image(y, obs)
    out = tmp_path / "d"
    code = main(["deblur", "--image", str(obs), "--blur", "uniform9",
                 "--tau", "0.05", "--mu", "auto", "--max-iters", "20",
                 "--out", str(out)])
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["deblur_report.json", "deblur_salsa.pgm",
                     "deblur_salsa_trace.csv"]
    trace = (out / "deblur_salsa_trace.csv").read_text().splitlines()
    assert trace[0] == "iter,elapsed_s,objective,isnr_db"
    assert all(line.endswith(",") for line in trace[1:])  # no truth, no ISNR


def test_psf_dump(capsys):
    assert main(["psf-dump", "--blur", "invquad"]) == 0
    out = capsys.readouterr().out
    assert "invquad: 15x15" in out
    assert len(out.splitlines()) == 16


def test_divergence_exits_nonzero(tmp_path, monkeypatch, capsys):
    img = make_pgm(tmp_path)

    def blow_up(*args, **kwargs):
        raise DivergenceError("non-finite coefficients at iteration 3")

    monkeypatch.setattr("salsa_deconv.bench.salsa_solve", blow_up)
    code = main(["run", "--experiment", "1", "--image", str(img),
                 "--out", str(tmp_path / "f"), "--max-iters", "4"])
    assert code == 1
    assert "DIVERGED" in capsys.readouterr().out


def test_malformed_pgm_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5\n4 4\n255\n" + bytes(3))
    code = main(["deblur", "--image", str(bad), "--blur", "uniform9",
                 "--tau", "0.1", "--out", str(tmp_path)])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "salsa_deconv.cli", "psf-dump", "--blur", "uniform9"],
        capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert "uniform9" in proc.stdout
