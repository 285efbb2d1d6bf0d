"""qscatter command line: simulate | oracle | compare | scan.

Every command reads one config file, writes CSV or JSON artifacts into
--out, and drops a manifest (config hash, seed, tool version, outputs,
duration) next to them.  Exit codes: 0 ok, 2 config error, 3 physics
precondition or validation error, 4 tolerance failure in compare.
"""

import argparse
import cmath
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config_io
from .config_io import RunManifest, load_config, write_csv
from .errors import ConfigError, QScatterError, ToleranceFailure
from .scattering import (
    dense_evolve,
    prepare_packet,
    run_scattering,
    sample_potential,
    trotter_evolve,
)
from .transfer_matrix import (
    Units,
    analytic_barrier_transfer,
    chain_from_samples,
    compose_transfer_chain,
    delta_transfer,
    optical_theorem_residual,
    phase_shifts_from_rt,
    potential_from_table,
    rt_from_transfer,
    sample_delta_pulses,
    transmission_scan,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_TOLERANCE = 4

# Register frame used by simulate/compare: positions are dimensionless,
# energies are squared wavenumbers (hbar = 2m = 1).
REGISTER_UNITS = Units()


def _units_from(cfg):
    return Units(m=cfg.get_float("units.m", 0.5), hbar=cfg.get_float("units.hbar", 1.0))


def _grid_from(cfg, prefix="grid"):
    if cfg.has(f"{prefix}.values"):
        return cfg.get_float_list(f"{prefix}.values", required=True)
    start = cfg.get_float(f"{prefix}.start", required=True)
    stop = cfg.get_float(f"{prefix}.stop", required=True)
    count = cfg.get_int(f"{prefix}.count", required=True)
    if count < 1:
        raise ConfigError(f"key '{prefix}.count': must be >= 1")
    return list(np.linspace(start, stop, count))


def _pool_map(threads, fn, items):
    items = list(items)
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _wrap_angle(value):
    """Reduce an angle difference into (-pi, pi]."""
    wrapped = math.fmod(value, 2.0 * math.pi)
    if wrapped > math.pi:
        wrapped -= 2.0 * math.pi
    elif wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


# ---------------------------------------------------------------- simulate


def _simulate_rows(cfg, seed_override, threads):
    config, packets, potential, options = config_io.simulation_from_config(
        cfg, seed_override
    )
    sampled = sample_potential(config, potential)

    def one(index_packet):
        index, packet = index_packet
        run_config = replace(config, seed=config.seed + index)
        result = run_scattering(
            run_config, packet, sampled,
            shots=options.shots, use_ancilla=options.use_ancilla,
        )
        rows = [config_io.estimate_row(packet.k0, result.estimate, run_config.seed)]
        if result.shot_estimate is not None:
            rows.append(
                config_io.estimate_row(packet.k0, result.shot_estimate, run_config.seed)
            )
        return rows

    nested = _pool_map(threads, one, enumerate(packets))
    return config, [row for group in nested for row in group]


def cmd_simulate(args):
    cfg = load_config(args.config)
    started = time.perf_counter()
    config, rows = _simulate_rows(cfg, args.seed, args.threads)
    manifest = RunManifest.start("simulate", cfg, config.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "simulate.csv"
    write_csv(csv_path, "simulate", config_io.SIMULATE_COLUMNS, rows)
    manifest.finish([csv_path], time.perf_counter() - started)
    manifest.write(out_dir / "simulate.manifest.json")
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return EXIT_OK


# ------------------------------------------------------------------ oracle

ORACLE_COLUMNS = [
    "parameter", "Re_R", "Im_R", "Re_T", "Im_T", "R2", "T2",
    "delta_even", "delta_odd", "optical_residual",
]


def _oracle_rows(cfg, threads):
    units = _units_from(cfg)
    kind = cfg.get_str("potential.kind", required=True)
    center = cfg.get_float("potential.center", 0.0)
    # pulse chains sit half a spacing off center, so their T +- R
    # combinations fail the symmetry closure; keep shifts off by default
    want_shifts = cfg.get_bool(
        "phase_shifts",
        kind != "custom" and center == 0.0
        and cfg.get_str("method", "analytic") != "chain",
    )
    grid = _grid_from(cfg)

    def amplitudes(value):
        if kind == "delta":
            parameter = cfg.get_str("grid.parameter", "eta")
            if parameter == "eta":
                k = units.wavenumber(cfg.get_float("energy", required=True)) \
                    if cfg.has("energy") else cfg.get_float("k", required=True)
                eta = float(value)
            elif parameter == "energy":
                k = units.wavenumber(float(value))
                eta = units.c2m * cfg.get_float("potential.strength", required=True) / (2.0 * k)
            else:
                raise ConfigError("key 'grid.parameter': delta scans use 'eta' or 'energy'")
            matrix = delta_transfer(eta, k, center)
        elif kind in ("barrier", "well"):
            width = cfg.get_float("potential.width", required=True)
            strength = cfg.get_float("potential.strength", required=True)
            v0 = strength if kind == "barrier" else -abs(strength)
            energy = float(value)
            k = units.wavenumber(energy)
            if cfg.get_str("method", "analytic") == "chain":
                pulses = sample_delta_pulses(
                    v0, width, cfg.get_int("n_pulses", 1000), k, units=units
                )
                matrix = compose_transfer_chain(pulses, k, width)
            else:
                matrix = analytic_barrier_transfer(v0, energy, width, units=units)
        elif kind == "custom":
            table = np.loadtxt(cfg.get_str("potential.table", required=True), ndmin=2)
            if table.shape[1] != 2:
                raise ConfigError("key 'potential.table': file must have two columns")
            v_func = potential_from_table(table[:, 0], table[:, 1])
            width = cfg.get_float("potential.width", required=True)
            energy = float(value)
            k = units.wavenumber(energy)
            pulses = sample_delta_pulses(
                v_func, width, cfg.get_int("n_pulses", 1000), k, units=units
            )
            matrix = compose_transfer_chain(pulses, k, width)
        else:
            raise ConfigError(f"key 'potential.kind': no oracle for kind {kind!r}")
        r_amp, t_amp = rt_from_transfer(matrix)
        return k, r_amp, t_amp

    def one(value):
        k, r_amp, t_amp = amplitudes(value)
        if want_shifts:
            shifts = phase_shifts_from_rt(r_amp, t_amp)
            even, odd = float(shifts.even), float(shifts.odd)
        else:
            even = odd = ""
        return [
            float(value),
            r_amp.real, r_amp.imag, t_amp.real, t_amp.imag,
            abs(r_amp) ** 2, abs(t_amp) ** 2,
            even, odd,
            optical_theorem_residual(r_amp, t_amp, k),
        ]

    return _pool_map(threads, one, grid)


def cmd_oracle(args):
    cfg = load_config(args.config)
    started = time.perf_counter()
    rows = _oracle_rows(cfg, args.threads)
    manifest = RunManifest.start("oracle", cfg, args.seed or 0)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "oracle.csv"
    write_csv(csv_path, "oracle", ORACLE_COLUMNS, rows)
    manifest.finish([csv_path], time.perf_counter() - started)
    manifest.write(out_dir / "oracle.manifest.json")
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return EXIT_OK


# ----------------------------------------------------------------- compare


def _oracle_for_run(config, packet, potential):
    """Reference (R, T) for the sampled potential seen by the packet.

    Deltas use the closed form; every sampled potential is otherwise
    treated as the delta train living on the register grid, which is the
    object the split-step evolution converges to.  Mirrored packets
    (k0 < 0) scatter from the right, which swaps in the right-incidence
    reflection amplitude.
    """
    k = 2.0 * math.pi * abs(packet.k0)
    if potential.kind == "delta":
        eta = potential.strength / (2.0 * k)
        matrix = delta_transfer(eta, k, potential.center)
    else:
        size = potential.samples.size
        dx = 1.0 / size
        matrix = chain_from_samples(
            potential.samples, dx, -0.5, k, units=REGISTER_UNITS
        )
    if packet.k0 > 0:
        return rt_from_transfer(matrix)
    t_amp = 1.0 / matrix.m11
    return -matrix.m12 / matrix.m11, t_amp


def _compare_case(config, packet, potential, options):
    result = run_scattering(config, packet, potential)
    sim_r, sim_t = result.estimate.r_amp, result.estimate.t_amp
    ora_r, ora_t = _oracle_for_run(config, packet, potential)

    def side(sim, ora):
        mod_abs = abs(abs(sim) - abs(ora))
        well_conditioned = abs(ora) > 0.05
        mod_rel = mod_abs / abs(ora) if well_conditioned else None
        phase = _wrap_angle(cmath.phase(sim) - cmath.phase(ora)) if well_conditioned else None
        mod_ok = (mod_rel if well_conditioned else mod_abs) <= options.tol_modulus
        phase_ok = phase is None or abs(phase) <= options.tol_phase
        return {
            "modulus_sim": abs(sim), "modulus_oracle": abs(ora),
            "modulus_delta_abs": mod_abs, "modulus_delta_rel": mod_rel,
            "phase_delta": phase,
            "pass": bool(mod_ok and phase_ok),
        }

    reflection = side(sim_r, ora_r)
    transmission = side(sim_t, ora_t)
    return {
        "k0": int(packet.k0),
        "sigma_k": packet.sigma_k,
        "tau": result.tau,
        "P_refl": result.estimate.p_refl,
        "P_trans": result.estimate.p_trans,
        "unitarity_residual": result.estimate.unitarity_residual,
        "quantum": {
            "R": [sim_r.real, sim_r.imag], "T": [sim_t.real, sim_t.imag],
        },
        "oracle": {
            "R": [complex(ora_r).real, complex(ora_r).imag],
            "T": [complex(ora_t).real, complex(ora_t).imag],
        },
        "reflection": reflection,
        "transmission": transmission,
        "pass": bool(reflection["pass"] and transmission["pass"]),
    }


def cmd_compare(args):
    cfg = load_config(args.config)
    started = time.perf_counter()
    config, packets, potential, options = config_io.simulation_from_config(
        cfg, args.seed
    )
    sampled = sample_potential(config, potential)
    cases = _pool_map(
        args.threads,
        lambda packet: _compare_case(config, packet, sampled, options),
        packets,
    )
    report = {
        "tolerances": {"modulus": options.tol_modulus, "phase": options.tol_phase},
        "cases": cases,
        "pass": all(case["pass"] for case in cases),
    }
    manifest = RunManifest.start("compare", cfg, config.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "compare.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest.finish([report_path], time.perf_counter() - started)
    manifest.write(out_dir / "compare.manifest.json")
    for case in cases:
        verdict = "pass" if case["pass"] else "FAIL"
        print(f"k0={case['k0']}: {verdict}")
    print(f"wrote {report_path}")
    return EXIT_OK if report["pass"] else EXIT_TOLERANCE


# -------------------------------------------------------------------- scan


def _scan_trotter(cfg, threads):
    config, packets, potential, _ = config_io.simulation_from_config(cfg, None)
    packet = packets[0]
    sampled = sample_potential(config, potential)
    halvings = cfg.get_int("halvings", 4)
    state0 = prepare_packet(config, packet, sampled)
    tau = config.n_steps * config.dtau
    reference = dense_evolve(state0, config, sampled, tau)

    def one(rung):
        run_config = replace(
            config,
            dtau=config.dtau / (1 << rung),
            n_steps=config.n_steps * (1 << rung),
        )
        evolved = trotter_evolve(state0.copy(), run_config, sampled)
        error = float(np.max(np.abs(evolved.amps - reference.amps)))
        return [run_config.dtau, run_config.n_steps, error]

    return _pool_map(threads, one, range(halvings + 1)), ["dtau", "n_steps", "max_amp_error"]


def _scan_pulses(cfg, threads):
    units = _units_from(cfg)
    width = cfg.get_float("width", 1.0)
    opacity = cfg.get_float("opacity", 1.0)
    e_over_v0 = cfg.get_float("e_over_v0", 1.0 / math.sqrt(2.0))
    counts = cfg.get_int_list("pulse_counts", [25, 50, 100, 200])
    v0 = (opacity / width) ** 2 / units.c2m
    energy = e_over_v0 * v0
    k = units.wavenumber(energy)
    ref_r, ref_t = rt_from_transfer(
        analytic_barrier_transfer(v0, energy, width, units=units)
    )

    def one(count):
        pulses = sample_delta_pulses(v0, width, count, k, units=units)
        r_amp, t_amp = rt_from_transfer(compose_transfer_chain(pulses, k, width))
        return [
            int(count),
            abs(abs(r_amp) - abs(ref_r)),
            abs(_wrap_angle(cmath.phase(r_amp) - cmath.phase(ref_r))),
            abs(abs(t_amp) - abs(ref_t)),
            abs(_wrap_angle(cmath.phase(t_amp) - cmath.phase(ref_t))),
        ]

    columns = ["n_pulses", "err_mod_R", "err_arg_R", "err_mod_T", "err_arg_T"]
    return _pool_map(threads, one, counts), columns


def _scan_resonance(cfg, threads):
    units = _units_from(cfg)
    width = cfg.get_float("width", 1.0)
    opacity = cfg.get_float("opacity", required=True)
    n_pulses = cfg.get_int("n_pulses", 1000)
    v0 = (opacity / width) ** 2 / units.c2m
    ratios = _grid_from(cfg)

    rows = transmission_scan(
        -v0, width, [r * v0 for r in ratios],
        vary="energy", n_pulses=n_pulses, units=units,
    )
    table = [
        [row["parameter"] / v0, row["T2"], row["R2"],
         row["arg_T"], row["arg_R"], row["flag"]]
        for row in rows
    ]
    return table, ["E_over_V0", "T2", "R2", "arg_T", "arg_R", "flag"]


SCAN_MODES = {
    "trotter-convergence": _scan_trotter,
    "pulse-convergence": _scan_pulses,
    "resonance": _scan_resonance,
}


def cmd_scan(args):
    cfg = load_config(args.config)
    mode = args.mode or cfg.get_str("mode")
    if mode not in SCAN_MODES:
        raise ConfigError(
            f"scan mode must be one of {sorted(SCAN_MODES)}, got {mode!r}"
        )
    started = time.perf_counter()
    rows, columns = SCAN_MODES[mode](cfg, args.threads)
    manifest = RunManifest.start(f"scan:{mode}", cfg, args.seed or 0)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"scan-{mode}.csv"
    write_csv(csv_path, f"scan {mode}", columns, rows)
    manifest.finish([csv_path], time.perf_counter() - started)
    manifest.write(out_dir / f"scan-{mode}.manifest.json")
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return EXIT_OK


# -------------------------------------------------------------- entry point


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qscatter",
        description="Digital quantum simulation of 1D scattering with a "
                    "transfer-matrix cross-check.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = [
        ("simulate", cmd_simulate, "run the quantum pipeline for each k0"),
        ("oracle", cmd_oracle, "evaluate the transfer-matrix oracle on a grid"),
        ("compare", cmd_compare, "quantum run vs oracle with tolerances"),
        ("scan", cmd_scan, "convergence and resonance scans"),
    ]
    for name, func, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="config file (text or JSON)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        if name == "scan":
            p.add_argument(
                "--mode", choices=sorted(SCAN_MODES), default=None,
                help="scan mode (may also come from the config key 'mode')",
            )
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ToleranceFailure as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except QScatterError as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
