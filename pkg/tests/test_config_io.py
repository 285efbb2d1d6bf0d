"""Config parsing, CSV artifacts, manifests."""

import json

import numpy as np
import pytest

from qscatter.config_io import (
    CSV_FORMAT,
    ConfigMap,
    RunManifest,
    SIMULATE_COLUMNS,
    estimate_row,
    format_cell,
    load_config,
    parse_flat_text,
    simulation_from_config,
    write_csv,
)
from qscatter.errors import ConfigError
from qscatter.scattering import ScatteringEstimate

FLAT_EXAMPLE = """\
# run header comment
n = 8
gamma = 0.0253302959105844
dtau = 1e-4          # inline comment
n_steps = 512
k0 = 20, 24
sigma_k = 1.5
xi0 = -0.25
potential.kind = delta
potential.strength = 250.0
shots = 0
"""


def write_file(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


# ---------------------------------------------------------------- parsing


def test_parse_flat_text_values_and_line_numbers():
    entries = parse_flat_text(FLAT_EXAMPLE)
    assert entries["n"] == ("8", 2)
    assert entries["dtau"] == ("1e-4", 4)
    assert entries["potential.kind"] == ("delta", 9)
    assert "run" not in entries


def test_parse_flat_text_errors_carry_line_numbers():
    with pytest.raises(ConfigError, match="line 2"):
        parse_flat_text("n = 4\nnot a key value pair\n")
    with pytest.raises(ConfigError, match="line 1"):
        parse_flat_text("= 3\n")
    with pytest.raises(ConfigError, match="line 3.*duplicate"):
        parse_flat_text("a = 1\nb = 2\na = 3\n")


def test_load_config_reads_flat_and_json(tmp_path):
    flat = load_config(write_file(tmp_path, "run.cfg", FLAT_EXAMPLE))
    as_json = {
        "n": 8, "gamma": 0.0253302959105844, "dtau": 1e-4, "n_steps": 512,
        "k0": [20, 24], "sigma_k": 1.5, "xi0": -0.25,
        "potential": {"kind": "delta", "strength": 250.0}, "shots": 0,
    }
    nested = load_config(write_file(tmp_path, "run.json", json.dumps(as_json)))
    assert nested.get_str("potential.kind") == "delta"
    assert nested.get_int("n") == flat.get_int("n")
    assert nested.get_float("potential.strength") == flat.get_float(
        "potential.strength")
    # brace-led content is detected as JSON regardless of suffix
    braced = load_config(write_file(tmp_path, "run.txt", json.dumps(as_json)))
    assert braced.get_int("n_steps") == 512


def test_load_config_rejects_bad_json(tmp_path):
    with pytest.raises(ConfigError, match="line"):
        load_config(write_file(tmp_path, "bad.json", '{"n": 4,,}'))
    with pytest.raises(ConfigError, match="object"):
        load_config(write_file(tmp_path, "list.json", "[1, 2]"))


# ----------------------------------------------------------------- getters


def test_typed_getters_from_text_values():
    cfg = ConfigMap(parse_flat_text(
        "a = 12\nb = 0x10\nc = 2.5e3\nd = yes\ne = off\nf = 1,2,3\n"
        "g = 0.5, 1.5\nh = hello\n"
    ))
    assert cfg.get_int("a") == 12
    assert cfg.get_int("b") == 16
    assert cfg.get_float("c") == 2500.0
    assert cfg.get_bool("d") is True
    assert cfg.get_bool("e") is False
    assert cfg.get_int_list("f") == [1, 2, 3]
    assert cfg.get_float_list("g") == [0.5, 1.5]
    assert cfg.get_str("h") == "hello"


def test_typed_getters_from_json_values(tmp_path):
    cfg = load_config(write_file(tmp_path, "t.json", json.dumps(
        {"a": 3.0, "b": 3.5, "c": True, "d": [4, 5], "e": 2}
    )))
    assert cfg.get_int("a") == 3
    with pytest.raises(ConfigError, match="not an integer"):
        cfg.get_int("b")
    with pytest.raises(ConfigError, match="expected integer"):
        cfg.get_int("c")
    assert cfg.get_bool("c") is True
    assert cfg.get_int_list("d") == [4, 5]
    assert cfg.get_float("e") == 2.0


def test_getter_errors_and_defaults():
    cfg = ConfigMap(parse_flat_text("a = zebra\nempty = ,\n"))
    with pytest.raises(ConfigError, match="line 1"):
        cfg.get_int("a")
    with pytest.raises(ConfigError, match="line 1"):
        cfg.get_float("a")
    with pytest.raises(ConfigError, match="line 1"):
        cfg.get_bool("a")
    with pytest.raises(ConfigError, match="empty list"):
        cfg.get_int_list("empty")
    with pytest.raises(ConfigError, match="missing required key"):
        cfg.get_int("absent", required=True)
    assert cfg.get_int("absent", 7) == 7
    assert cfg.get_str("absent") is None


def test_usage_tracking_and_resolved():
    cfg = ConfigMap(parse_flat_text("a = 1\nb = 2\n"))
    assert cfg.has("a") and not cfg.has("z")
    cfg.get_int("a")
    assert cfg.unused_keys() == ["b"]
    assert cfg.resolved() == {"a": "1", "b": "2"}


# ------------------------------------------------------------ run assembly


def test_simulation_from_config_round_trip(tmp_path):
    cfg = load_config(write_file(tmp_path, "run.cfg", FLAT_EXAMPLE))
    config, packets, potential, options = simulation_from_config(cfg)
    assert config.n == 8 and config.n_steps == 512 and config.seed == 0
    assert [p.k0 for p in packets] == [20, 24]
    assert all(p.sigma_k == 1.5 for p in packets)  # one sigma broadcasts
    assert all(p.xi0 == -0.25 for p in packets)
    assert potential.kind == "delta" and potential.strength == 250.0
    assert options.shots == 0 and options.use_ancilla is False
    assert options.tol_modulus == 0.02 and options.tol_phase == 0.05
    _, _, _, opts = simulation_from_config(cfg, seed_override=99)
    assert opts is not None
    assert simulation_from_config(cfg, seed_override=99)[0].seed == 99


def test_sigma_list_must_match_k0_list(tmp_path):
    text = FLAT_EXAMPLE.replace("sigma_k = 1.5", "sigma_k = 1.5, 2.0, 2.5")
    cfg = load_config(write_file(tmp_path, "run.cfg", text))
    with pytest.raises(ConfigError, match="sigma_k"):
        simulation_from_config(cfg)


def test_table_potential_interpolates_onto_grid(tmp_path):
    table = write_file(tmp_path, "pot.txt",
                       "-0.1 0.0\n0.0 8.0\n0.1 0.0\n")
    text = (
        "n = 6\ngamma = 0.025\ndtau = 1e-4\nn_steps = 8\n"
        "k0 = 10\nsigma_k = 1.0\nxi0 = -0.3\n"
        f"potential.kind = custom\npotential.table = {table}\n"
    )
    cfg = load_config(write_file(tmp_path, "run.cfg", text))
    _, _, potential, _ = simulation_from_config(cfg)
    assert potential.samples is not None
    xi = np.arange(64) / 64.0 - 0.5
    expected = np.interp(xi, [-0.1, 0.0, 0.1], [0.0, 8.0, 0.0],
                         left=0.0, right=0.0)
    np.testing.assert_allclose(potential.samples, expected)


def test_table_potential_needs_two_columns(tmp_path):
    table = write_file(tmp_path, "pot.txt", "0.0 1.0 2.0\n0.1 2.0 3.0\n")
    text = (
        "n = 6\ngamma = 0.025\ndtau = 1e-4\nn_steps = 8\n"
        "k0 = 10\nsigma_k = 1.0\nxi0 = -0.3\n"
        f"potential.kind = custom\npotential.table = {table}\n"
    )
    cfg = load_config(write_file(tmp_path, "run.cfg", text))
    with pytest.raises(ConfigError, match="two columns"):
        simulation_from_config(cfg)


# -------------------------------------------------------------------- CSV


def test_format_cell_covers_types():
    assert format_cell(True) == "true"
    assert format_cell(False) == "false"
    assert format_cell(0.1) == repr(0.1)
    assert format_cell(np.float64(0.1)) == repr(0.1)
    assert format_cell(7) == "7"
    assert format_cell(np.int64(7)) == "7"
    assert format_cell("exact") == "exact"


def test_write_csv_is_versioned_and_byte_stable(tmp_path):
    rows = [[1, 0.25, "exact"], [2, 0.5, "shots"]]
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    write_csv(first, "demo", ["k", "p", "method"], rows)
    write_csv(second, "demo", ["k", "p", "method"], rows)
    text = first.read_text()
    assert text.splitlines()[0] == f"# {CSV_FORMAT} demo"
    assert text.splitlines()[1] == "k,p,method"
    assert text.splitlines()[2] == "1,0.25,exact"
    assert first.read_bytes() == second.read_bytes()


def test_estimate_row_matches_column_layout():
    estimate = ScatteringEstimate(
        r_amp=0.1 + 0.2j, t_amp=0.3 - 0.4j, p_refl=0.05, p_trans=0.95,
        method="exact", k0=12,
    )
    row = estimate_row(12, estimate, seed=3)
    assert len(row) == len(SIMULATE_COLUMNS)
    assert row[0] == 12 and row[3] == 0.1 and row[4] == 0.2
    assert row[7] == "exact" and row[9] == 3


# --------------------------------------------------------------- manifest


def test_manifest_digest_tracks_config_content(tmp_path):
    cfg_a = load_config(write_file(tmp_path, "a.cfg", FLAT_EXAMPLE))
    cfg_b = load_config(write_file(tmp_path, "b.cfg", FLAT_EXAMPLE))
    cfg_c = load_config(write_file(tmp_path, "c.cfg",
                                   FLAT_EXAMPLE.replace("n = 8", "n = 9")))
    m_a = RunManifest.start("simulate", cfg_a, seed=0)
    m_b = RunManifest.start("simulate", cfg_b, seed=0)
    m_c = RunManifest.start("simulate", cfg_c, seed=0)
    assert m_a.config_sha256 == m_b.config_sha256
    assert m_a.config_sha256 != m_c.config_sha256


def test_manifest_write_contains_run_facts(tmp_path):
    cfg = load_config(write_file(tmp_path, "a.cfg", FLAT_EXAMPLE))
    manifest = RunManifest.start("simulate", cfg, seed=5)
    manifest.finish([tmp_path / "out.csv"], 1.25)
    path = tmp_path / "out.manifest.json"
    manifest.write(path)
    payload = json.loads(path.read_text())
    assert payload["command"] == "simulate"
    assert payload["seed"] == 5
    assert payload["duration_s"] == 1.25
    assert payload["outputs"] == [str(tmp_path / "out.csv")]
    assert payload["config"]["n"] == "8"
    assert len(payload["config_sha256"]) == 64
    assert payload["tool_version"]
