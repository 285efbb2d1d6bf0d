"""Run descriptors, CSV artifacts and reproducibility manifests.

Config files are flat ``key = value`` text with ``#`` comments; the same
keys may instead be given as a JSON object (nested objects flatten to
dotted keys, so {"potential": {"kind": "delta"}} and a text line
``potential.kind = delta`` are interchangeable).  Parse errors carry the
offending line number.

CSV outputs start with a versioned comment line followed by the column
header; floats are written with repr() so identical runs produce
byte-identical files.
"""

import hashlib
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .scattering import PotentialSpec, SimulationConfig, WavePacketSpec

TOOL_VERSION = "0.1.0"

CSV_FORMAT = "qscatter-csv v1"


# -------------------------------------------------------------- raw parsing


def parse_flat_text(text):
    """key -> (raw string value, line number) from flat key=value text."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "#" in line:
            line = line.split("#", 1)[0].rstrip()
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = (value.strip(), lineno)
    return out


def _flatten_json(obj, prefix, out):
    for key, value in obj.items():
        if not isinstance(key, str):
            raise ConfigError(f"config keys must be strings, got {key!r}")
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            _flatten_json(value, dotted + ".", out)
        else:
            out[dotted] = (value, 0)
    return out


def load_config(path):
    """ConfigMap from a text or JSON config file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if str(path).endswith(".json") or stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise ConfigError("JSON config must be an object at the top level")
        return ConfigMap(_flatten_json(obj, "", {}), source=str(path))
    return ConfigMap(parse_flat_text(text), source=str(path))


class ConfigMap:
    """Typed access to flat config keys with line-anchored errors."""

    def __init__(self, entries, source="<config>"):
        self.entries = dict(entries)
        self.source = source
        self._used = set()

    def _where(self, key):
        lineno = self.entries[key][1]
        return f"line {lineno}: " if lineno else ""

    def _fetch(self, key, required, default):
        if key not in self.entries:
            if required:
                raise ConfigError(f"missing required key {key!r}")
            return None
        self._used.add(key)
        return self.entries[key][0]

    def has(self, key):
        return key in self.entries

    def unused_keys(self):
        return sorted(set(self.entries) - self._used)

    def get_str(self, key, default=None, required=False):
        raw = self._fetch(key, required, default)
        if raw is None:
            return default
        return str(raw)

    def get_int(self, key, default=None, required=False):
        raw = self._fetch(key, required, default)
        if raw is None:
            return default
        if isinstance(raw, bool):
            raise ConfigError(f"{self._where(key)}key {key!r}: expected integer")
        if isinstance(raw, int):
            return raw
        if isinstance(raw, float):
            if raw != int(raw):
                raise ConfigError(f"{self._where(key)}key {key!r}: {raw} is not an integer")
            return int(raw)
        try:
            return int(str(raw), 0)
        except ValueError:
            raise ConfigError(
                f"{self._where(key)}key {key!r}: cannot parse {raw!r} as integer"
            ) from None

    def get_float(self, key, default=None, required=False):
        raw = self._fetch(key, required, default)
        if raw is None:
            return default
        if isinstance(raw, bool):
            raise ConfigError(f"{self._where(key)}key {key!r}: expected number")
        if isinstance(raw, (int, float)):
            return float(raw)
        try:
            return float(str(raw))
        except ValueError:
            raise ConfigError(
                f"{self._where(key)}key {key!r}: cannot parse {raw!r} as number"
            ) from None

    def get_bool(self, key, default=None, required=False):
        raw = self._fetch(key, required, default)
        if raw is None:
            return default
        if isinstance(raw, bool):
            return raw
        token = str(raw).strip().lower()
        if token in ("true", "yes", "1", "on"):
            return True
        if token in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"{self._where(key)}key {key!r}: cannot parse {raw!r} as boolean")

    def _get_list(self, key, conv, default, required):
        raw = self._fetch(key, required, default)
        if raw is None:
            return default
        if isinstance(raw, (list, tuple)):
            items = list(raw)
        else:
            items = [tok for tok in str(raw).split(",") if tok.strip()]
        if not items:
            raise ConfigError(f"{self._where(key)}key {key!r}: empty list")
        try:
            return [conv(tok) for tok in items]
        except (TypeError, ValueError):
            raise ConfigError(
                f"{self._where(key)}key {key!r}: cannot parse {raw!r} as a list"
            ) from None

    def get_int_list(self, key, default=None, required=False):
        return self._get_list(
            key, lambda t: int(t) if not isinstance(t, str) else int(t, 0),
            default, required,
        )

    def get_float_list(self, key, default=None, required=False):
        return self._get_list(key, float, default, required)

    def resolved(self):
        """Plain key -> value dict (raw values, no line info)."""
        return {key: value for key, (value, _) in sorted(self.entries.items())}


# ------------------------------------------------------------ run assembly


@dataclass(frozen=True)
class RunOptions:
    """Simulate/compare options that sit outside the physics config."""

    shots: int = 0
    use_ancilla: bool = False
    tol_modulus: float = 0.02
    tol_phase: float = 0.05


def potential_from_config(cfg, n):
    """PotentialSpec from the potential.* block (samples not yet filled,
    except for table-backed custom potentials which are interpolated onto
    the register grid here)."""
    kind = cfg.get_str("potential.kind", required=True)
    spec = PotentialSpec(
        kind=kind,
        strength=cfg.get_float("potential.strength", 0.0),
        center=cfg.get_float("potential.center", 0.0),
        ell=cfg.get_int("potential.ell", 0),
    )
    if kind == "custom":
        table = cfg.get_str("potential.table", required=True)
        data = np.loadtxt(table, dtype=np.float64, ndmin=2)
        if data.shape[1] != 2:
            raise ConfigError(f"potential table {table!r} must have two columns")
        size = 1 << n
        xi = np.arange(size) / size - 0.5
        u = np.interp(xi, data[:, 0], data[:, 1], left=0.0, right=0.0)
        spec = PotentialSpec(kind="custom", samples=u)
    return spec


def simulation_from_config(cfg, seed_override=None):
    """(SimulationConfig, [WavePacketSpec per k0], PotentialSpec, RunOptions)."""
    seed = cfg.get_int("seed", 0) if seed_override is None else int(seed_override)
    config = SimulationConfig(
        n=cfg.get_int("n", required=True),
        gamma=cfg.get_float("gamma", required=True),
        dtau=cfg.get_float("dtau", required=True),
        n_steps=cfg.get_int("n_steps", required=True),
        eps=cfg.get_float("eps", 1e-12),
        seed=seed,
    )
    k0_values = cfg.get_int_list("k0", required=True)
    sigma_values = cfg.get_float_list("sigma_k", required=True)
    if len(sigma_values) == 1:
        sigma_values = sigma_values * len(k0_values)
    if len(sigma_values) != len(k0_values):
        raise ConfigError("sigma_k must be one value or one per k0")
    xi0 = cfg.get_float("xi0", required=True)
    packets = [
        WavePacketSpec(k0=k0, sigma_k=sig, xi0=xi0)
        for k0, sig in zip(k0_values, sigma_values)
    ]
    options = RunOptions(
        shots=cfg.get_int("shots", 0),
        use_ancilla=cfg.get_bool("use_ancilla", False),
        tol_modulus=cfg.get_float("tol.modulus", 0.02),
        tol_phase=cfg.get_float("tol.phase", 0.05),
    )
    potential = potential_from_config(cfg, config.n)
    return config, packets, potential, options


# ------------------------------------------------------------------- CSV


def format_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        # plain float() first: repr of numpy float subclasses spells out
        # the type, which would leak into the CSV
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    return str(value)


def write_csv(path, kind, columns, rows):
    """CSV with a versioned comment line; floats via repr for stability."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {CSV_FORMAT} {kind}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(format_cell(cell) for cell in row) + "\n")


SIMULATE_COLUMNS = [
    "K0", "P_refl", "P_trans", "Re_R", "Im_R", "Re_T", "Im_T",
    "method", "shots", "seed",
]


def estimate_row(k0, estimate, seed):
    return [
        int(k0),
        float(estimate.p_refl), float(estimate.p_trans),
        float(estimate.r_amp.real), float(estimate.r_amp.imag),
        float(estimate.t_amp.real), float(estimate.t_amp.imag),
        estimate.method, int(estimate.shots_used), int(seed),
    ]


# --------------------------------------------------------------- manifest


@dataclass
class RunManifest:
    """What produced which artifacts, and from which inputs."""

    command: str
    config: dict
    config_sha256: str
    seed: int
    tool_version: str = TOOL_VERSION
    outputs: list = field(default_factory=list)
    duration_s: float = 0.0
    created_utc: str = ""

    @classmethod
    def start(cls, command, cfg, seed):
        resolved = cfg.resolved()
        digest = hashlib.sha256(
            json.dumps(resolved, sort_keys=True, default=str).encode()
        ).hexdigest()
        return cls(
            command=command, config=resolved, config_sha256=digest, seed=int(seed),
            created_utc=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        )

    def finish(self, outputs, duration_s):
        self.outputs = [str(p) for p in outputs]
        self.duration_s = float(duration_s)
        return self

    def write(self, path):
        payload = {
            "command": self.command,
            "tool_version": self.tool_version,
            "config": {k: format_cell(v) for k, v in self.config.items()},
            "config_sha256": self.config_sha256,
            "seed": self.seed,
            "outputs": self.outputs,
            "duration_s": self.duration_s,
            "created_utc": self.created_utc,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
