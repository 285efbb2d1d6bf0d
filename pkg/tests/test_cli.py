"""Command-line interface: artifacts, determinism, exit codes."""

import cmath
import csv
import json
import math

import numpy as np
import pytest

from qscatter.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_PRECONDITION,
    EXIT_TOLERANCE,
    main,
)
from qscatter.transfer_matrix import analytic_barrier_transfer, rt_from_transfer

GAMMA = 1.0 / (4.0 * math.pi**2)

SIMULATE_CFG = f"""\
n = 8
gamma = {GAMMA!r}
dtau = 1e-4
n_steps = 512
k0 = 20, 24
sigma_k = 1.5
xi0 = -0.25
potential.kind = delta
potential.strength = 250.0
shots = 3000
"""


def write_cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def read_rows(path):
    with open(path, newline="") as fh:
        header_comment = fh.readline()
        assert header_comment.startswith("# qscatter-csv v1 ")
        return list(csv.DictReader(fh))


def compare_cfg(tol_modulus):
    """Delta case at eta = 1 on a small register, anti-aliased step count."""
    k0 = 24
    tau = 2 * 0.25 / (4 * math.pi * GAMMA * k0)
    n_steps = 2048
    return f"""\
n = 9
gamma = {GAMMA!r}
dtau = {tau / n_steps!r}
n_steps = {n_steps}
k0 = {k0}
sigma_k = 1.2
xi0 = -0.25
potential.kind = delta
potential.strength = {4 * math.pi * k0!r}
tol.modulus = {tol_modulus}
tol.phase = 0.15
"""


# ---------------------------------------------------------------- simulate


def test_simulate_writes_csv_and_manifest(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SIMULATE_CFG)
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == EXIT_OK
    assert "simulate.csv" in capsys.readouterr().out
    rows = read_rows(out / "simulate.csv")
    assert len(rows) == 4  # exact + shots for each of two packets
    by_method = {(row["K0"], row["method"]) for row in rows}
    assert ("20", "exact") in by_method and ("24", "shots") in by_method
    for row in rows:
        total = float(row["P_refl"]) + float(row["P_trans"])
        assert abs(total - 1.0) < 1e-9
    manifest = json.loads((out / "simulate.manifest.json").read_text())
    assert manifest["command"] == "simulate"
    assert len(manifest["config_sha256"]) == 64
    assert manifest["outputs"] == [str(out / "simulate.csv")]


def test_simulate_is_deterministic_across_runs_and_threads(tmp_path):
    cfg = write_cfg(tmp_path, SIMULATE_CFG)
    outs = [tmp_path / f"out{i}" for i in range(3)]
    main(["simulate", "--config", cfg, "--out", str(outs[0])])
    main(["simulate", "--config", cfg, "--out", str(outs[1])])
    main(["simulate", "--config", cfg, "--out", str(outs[2]), "--threads", "2"])
    baseline = (outs[0] / "simulate.csv").read_bytes()
    assert (outs[1] / "simulate.csv").read_bytes() == baseline
    assert (outs[2] / "simulate.csv").read_bytes() == baseline


def test_simulate_seed_override_changes_shot_rows(tmp_path):
    cfg = write_cfg(tmp_path, SIMULATE_CFG)
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "a")])
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "b"),
          "--seed", "123"])
    rows_a = read_rows(tmp_path / "a" / "simulate.csv")
    rows_b = read_rows(tmp_path / "b" / "simulate.csv")
    shots_a = [r for r in rows_a if r["method"] == "shots"]
    shots_b = [r for r in rows_b if r["method"] == "shots"]
    assert shots_a[0]["seed"] == "0" and shots_b[0]["seed"] == "123"
    assert shots_a[0]["P_refl"] != shots_b[0]["P_refl"]
    # exact rows carry the same physics regardless of seed
    exact_a = [r for r in rows_a if r["method"] == "exact"]
    exact_b = [r for r in rows_b if r["method"] == "exact"]
    assert [r["Re_T"] for r in exact_a] == [r["Re_T"] for r in exact_b]


def test_json_and_flat_configs_produce_identical_output(tmp_path):
    flat = write_cfg(tmp_path, SIMULATE_CFG, "run.cfg")
    as_json = write_cfg(tmp_path, json.dumps({
        "n": 8, "gamma": GAMMA, "dtau": 1e-4, "n_steps": 512,
        "k0": [20, 24], "sigma_k": 1.5, "xi0": -0.25,
        "potential": {"kind": "delta", "strength": 250.0},
        "shots": 3000,
    }), "run.json")
    main(["simulate", "--config", flat, "--out", str(tmp_path / "flat")])
    main(["simulate", "--config", as_json, "--out", str(tmp_path / "json")])
    assert (tmp_path / "flat" / "simulate.csv").read_bytes() == \
        (tmp_path / "json" / "simulate.csv").read_bytes()


# ------------------------------------------------------------------ oracle


def test_oracle_delta_scan_matches_closed_form(tmp_path):
    cfg = write_cfg(tmp_path, """\
potential.kind = delta
k = 2.0
grid.parameter = eta
grid.values = 0.1, 0.5, 1.0, 2.0, 10.0
""")
    out = tmp_path / "out"
    assert main(["oracle", "--config", cfg, "--out", str(out)]) == EXIT_OK
    rows = read_rows(out / "oracle.csv")
    assert len(rows) == 5
    for row in rows:
        eta = float(row["parameter"])
        r_ref = -1j * eta / (1 + 1j * eta)
        assert abs(float(row["Re_R"]) - r_ref.real) < 1e-12
        assert abs(float(row["Im_R"]) - r_ref.imag) < 1e-12
        assert abs(float(row["R2"]) + float(row["T2"]) - 1.0) < 1e-12
        assert abs(math.tan(float(row["delta_even"])) + eta) < 1e-9
        assert abs(float(row["delta_odd"])) < 1e-12
        assert abs(float(row["optical_residual"])) < 1e-12


def test_oracle_barrier_scan_analytic_and_chain_agree(tmp_path):
    base = """\
potential.kind = barrier
potential.width = 1.0
potential.strength = 1.0
grid.start = 0.5
grid.stop = 0.9
grid.count = 3
"""
    cfg_a = write_cfg(tmp_path, base, "analytic.cfg")
    cfg_c = write_cfg(tmp_path, base + "method = chain\nn_pulses = 400\n",
                      "chain.cfg")
    main(["oracle", "--config", cfg_a, "--out", str(tmp_path / "a")])
    main(["oracle", "--config", cfg_c, "--out", str(tmp_path / "c")])
    rows_a = read_rows(tmp_path / "a" / "oracle.csv")
    rows_c = read_rows(tmp_path / "c" / "oracle.csv")
    for row_a, row_c in zip(rows_a, rows_c):
        energy = float(row_a["parameter"])
        r_ref, t_ref = rt_from_transfer(
            analytic_barrier_transfer(1.0, energy, 1.0))
        assert abs(float(row_a["Re_T"]) - t_ref.real) < 1e-12
        assert abs(float(row_a["Im_T"]) - t_ref.imag) < 1e-12
        assert abs(float(row_c["T2"]) - float(row_a["T2"])) < 1e-5


# ----------------------------------------------------------------- compare


def test_compare_within_tolerance_exits_zero(tmp_path, capsys):
    cfg = write_cfg(tmp_path, compare_cfg(tol_modulus=0.08))
    out = tmp_path / "out"
    assert main(["compare", "--config", cfg, "--out", str(out)]) == EXIT_OK
    assert "pass" in capsys.readouterr().out
    report = json.loads((out / "compare.json").read_text())
    assert report["pass"] is True
    assert report["tolerances"] == {"modulus": 0.08, "phase": 0.15}
    case = report["cases"][0]
    assert case["k0"] == 24
    assert abs(case["unitarity_residual"]) < 1e-9
    assert case["reflection"]["pass"] and case["transmission"]["pass"]
    assert case["reflection"]["modulus_delta_rel"] < 0.08
    assert abs(case["reflection"]["phase_delta"]) < 0.15
    # quantum moduli really do sit near the oracle values
    r_quantum = complex(*case["quantum"]["R"])
    r_oracle = complex(*case["oracle"]["R"])
    assert abs(abs(r_quantum) - abs(r_oracle)) / abs(r_oracle) < 0.08


def test_compare_tolerance_failure_exits_four_but_writes_report(tmp_path):
    cfg = write_cfg(tmp_path, compare_cfg(tol_modulus=0.005))
    out = tmp_path / "out"
    assert main(["compare", "--config", cfg, "--out", str(out)]) == EXIT_TOLERANCE
    report = json.loads((out / "compare.json").read_text())
    assert report["pass"] is False
    assert (out / "compare.manifest.json").exists()


# -------------------------------------------------------------------- scan


def test_scan_trotter_convergence(tmp_path):
    cfg = write_cfg(tmp_path, f"""\
mode = trotter-convergence
n = 6
gamma = {GAMMA!r}
dtau = 5e-4
n_steps = 128
k0 = 10
sigma_k = 1.0
xi0 = -0.25
potential.kind = delta
potential.strength = 40.0
halvings = 2
""")
    out = tmp_path / "out"
    assert main(["scan", "--config", cfg, "--out", str(out)]) == EXIT_OK
    rows = read_rows(out / "scan-trotter-convergence.csv")
    assert len(rows) == 3
    errors = [float(row["max_amp_error"]) for row in rows]
    assert errors[0] > errors[1] > errors[2]
    assert [row["n_steps"] for row in rows] == ["128", "256", "512"]


def test_scan_pulse_convergence(tmp_path):
    cfg = write_cfg(tmp_path, "mode = pulse-convergence\n")
    out = tmp_path / "out"
    assert main(["scan", "--config", cfg, "--out", str(out)]) == EXIT_OK
    rows = read_rows(out / "scan-pulse-convergence.csv")
    assert [row["n_pulses"] for row in rows] == ["25", "50", "100", "200"]
    for column in ("err_mod_R", "err_arg_R", "err_mod_T", "err_arg_T"):
        values = [float(row[column]) for row in rows]
        assert values[0] > values[1] > values[2] > values[3]


def test_scan_resonance_mode_flag_overrides_config(tmp_path):
    cfg = write_cfg(tmp_path, """\
opacity = 10.0
width = 1.0
grid.start = 0.3
grid.stop = 2.0
grid.count = 60
n_pulses = 300
""")
    out = tmp_path / "out"
    assert main(["scan", "--config", cfg, "--out", str(out),
                 "--mode", "resonance"]) == EXIT_OK
    rows = read_rows(out / "scan-resonance.csv")
    assert len(rows) == 60
    assert float(rows[0]["E_over_V0"]) == pytest.approx(0.3)
    assert any(row["flag"] == "max" for row in rows)
    for row in rows:
        assert abs(float(row["T2"]) + float(row["R2"]) - 1.0) < 1e-9


def test_scan_rejects_unknown_mode(tmp_path):
    cfg = write_cfg(tmp_path, "mode = sideways\nopacity = 1.0\n")
    assert main(["scan", "--config", cfg, "--out", str(tmp_path)]) == EXIT_CONFIG


# ------------------------------------------------------------- exit codes


def test_missing_config_file_is_a_config_error(tmp_path):
    missing = str(tmp_path / "nope.cfg")
    assert main(["simulate", "--config", missing,
                 "--out", str(tmp_path)]) == EXIT_CONFIG


def test_missing_required_key_is_a_config_error(tmp_path):
    cfg = write_cfg(tmp_path, "n = 8\n")
    assert main(["simulate", "--config", cfg,
                 "--out", str(tmp_path)]) == EXIT_CONFIG


def test_unrunnable_physics_is_a_precondition_error(tmp_path):
    cfg = write_cfg(tmp_path, SIMULATE_CFG.replace("k0 = 20, 24", "k0 = 0"))
    assert main(["simulate", "--config", cfg,
                 "--out", str(tmp_path)]) == EXIT_PRECONDITION
