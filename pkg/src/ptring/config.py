"""
Run parameters: built-in defaults, ``key = value`` config files and the
run manifest written next to every output.

Precedence is flag > file > default; the manifest records which of the
three supplied each value.
"""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field
from pathlib import Path

from ptring.errors import ConfigParseError, ConfigurationError
from ptring.hamiltonian import RingConfig
from ptring.sweeps import default_d_values

__all__ = [
    "PARAMETERS",
    "RunManifest",
    "read_config_file",
    "load_config",
    "validate_parameters",
    "ring_config",
]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in _split(text)]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in _split(text)]


def _split(text: str) -> list[str]:
    items = [x.strip() for x in str(text).split(",") if x.strip()]
    if not items:
        raise ValueError("empty list")
    return items


# name -> (parser, default). ``None`` defaults are filled per subcommand.
PARAMETERS: dict = {
    "n": (int, 32),
    "d": (int, 16),
    "t0": (float, 0.5),
    "tb": (float, 1.0),
    "gamma": (float, 0.0),
    "hbar": (float, 1.0),
    "m0": (int, 8),
    "dt": (float, 0.05),
    "t_max": (float, 20.0),
    "t_avg": (float, 500.0),
    "phase_tol": (float, 1e-8),
    "bisect_tol": (float, 1e-4),
    "cond_limit": (float, 1e8),
    "tb_list": (_float_list, None),
    "d_list": (_int_list, None),
    "gamma_max": (float, 1.0),
    "gamma_steps": (int, 21),
    "threads": (int, 1),
}

# Parameters each subcommand reads; the manifest materializes exactly these.
SUBCOMMAND_PARAMETERS = {
    "spectrum": ("n", "d", "t0", "tb", "gamma", "hbar", "phase_tol"),
    "bethe": ("n", "d", "t0", "tb", "gamma", "hbar", "phase_tol"),
    "evolve": ("n", "d", "t0", "tb", "gamma", "hbar", "m0", "t_max", "dt", "cond_limit"),
    "phase-diagram": ("n", "t0", "tb_list", "d_list", "phase_tol", "bisect_tol", "threads"),
    "chirality": (
        "n", "t0", "tb", "m0", "d_list", "gamma_max", "gamma_steps", "t_avg", "dt", "threads",
    ),
}


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    provenance: dict
    options: dict = field(default_factory=dict)
    tool: str = "ptring"
    version: str = ""
    timestamp: str = ""

    @property
    def solver(self) -> dict:
        keys = ("phase_tol", "bisect_tol", "cond_limit", "dt", "t_avg", "t_max")
        return {k: self.parameters[k] for k in keys if k in self.parameters}

    def to_dict(self) -> dict:
        return {
            "tool": self.tool,
            "version": self.version,
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "provenance": self.provenance,
            "options": self.options,
            "solver": self.solver,
            "timestamp": self.timestamp,
        }

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def read(cls, path) -> "RunManifest":
        data = json.loads(Path(path).read_text())
        return cls(
            subcommand=data["subcommand"],
            parameters=data["parameters"],
            provenance=data.get("provenance", {}),
            options=data.get("options", {}),
            tool=data.get("tool", "ptring"),
            version=data.get("version", ""),
            timestamp=data.get("timestamp", ""),
        )


def _parse_value(key: str, raw, line_number=None):
    parser = PARAMETERS[key][0]
    try:
        return parser(raw)
    except (TypeError, ValueError) as exc:
        if line_number is not None:
            raise ConfigParseError(line_number, f"bad value {raw!r} for {key}: {exc}") from exc
        raise ConfigurationError(key, f"bad value {raw!r}: {exc}") from exc


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are skipped."""
    values = {}
    for number, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(number, f"expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in PARAMETERS:
            raise ConfigParseError(number, f"unknown key {key!r}")
        if not raw:
            raise ConfigParseError(number, f"missing value for {key}")
        values[key] = _parse_value(key, raw, number)
    return values


def _subcommand_default(key: str, subcommand: str, params: dict):
    if key == "d_list":
        return default_d_values(params["n"]) if subcommand == "phase-diagram" else [8, 12, 16]
    if key == "tb_list":
        return [params.get("tb", PARAMETERS["tb"][1])]
    return PARAMETERS[key][1]


def validate_parameters(params: dict) -> None:
    """Range checks, raising :class:`ConfigurationError` named by the config key."""

    def need(key, ok, message):
        if key in params and not ok(params[key]):
            raise ConfigurationError(key, f"{message}, got {params[key]!r}")

    need("n", lambda v: v >= 3, "must be at least 3")
    n = params.get("n", PARAMETERS["n"][1])
    need("d", lambda v: 2 <= v <= n, f"must satisfy 2 <= d <= {n}")
    need("t0", lambda v: v > 0, "must be positive")
    need("tb", lambda v: v > 0, "must be positive")
    need("gamma", lambda v: v >= 0, "must be non-negative")
    need("hbar", lambda v: v > 0, "must be positive")
    need("m0", lambda v: 1 <= v <= n, f"must satisfy 1 <= m0 <= {n}")
    need("dt", lambda v: v > 0, "must be positive")
    need("t_max", lambda v: v >= 0, "must be non-negative")
    need("t_avg", lambda v: v > 0, "must be positive")
    need("phase_tol", lambda v: v > 0, "must be positive")
    need("bisect_tol", lambda v: v > 0, "must be positive")
    need("cond_limit", lambda v: v >= 1, "must be at least 1")
    need("tb_list", lambda v: all(x > 0 for x in v), "entries must be positive")
    need("d_list", lambda v: all(2 <= x <= n for x in v), f"entries must satisfy 2 <= d <= {n}")
    need("gamma_max", lambda v: v >= 0, "must be non-negative")
    need("gamma_steps", lambda v: v >= 1, "must be at least 1")
    need("threads", lambda v: v >= 1, "must be at least 1")


def load_config(path=None, flags: dict | None = None, subcommand: str = "evolve", version: str = "") -> RunManifest:
    """Resolve the parameters of ``subcommand`` into a manifest.

    ``flags`` maps parameter names to command-line values; ``None`` entries
    count as absent.
    """
    if subcommand not in SUBCOMMAND_PARAMETERS:
        raise ConfigurationError("subcommand", f"unknown subcommand {subcommand!r}")
    file_values = read_config_file(path) if path is not None else {}
    flag_values = {}
    for key, value in (flags or {}).items():
        if value is None:
            continue
        if key not in PARAMETERS:
            raise ConfigurationError(key, "unknown parameter")
        flag_values[key] = value

    params, provenance = {}, {}
    # scalars first so list defaults can depend on n and tb
    keys = sorted(PARAMETERS, key=lambda k: k.endswith("_list"))
    for key in keys:
        if key in flag_values:
            params[key], provenance[key] = flag_values[key], "flag"
        elif key in file_values:
            params[key], provenance[key] = file_values[key], "file"
        else:
            params[key], provenance[key] = _subcommand_default(key, subcommand, params), "default"

    wanted = SUBCOMMAND_PARAMETERS[subcommand]
    resolved = {k: params[k] for k in wanted}
    validate_parameters(resolved)
    return RunManifest(
        subcommand=subcommand,
        parameters=resolved,
        provenance={k: provenance[k] for k in wanted},
        version=version,
        timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    )


def ring_config(params: dict, **overrides) -> RingConfig:
    """RingConfig from resolved parameters (keys n, d, t0, tb, gamma, hbar)."""
    p = {**params, **overrides}
    return RingConfig(
        n_sites=p["n"],
        sink_site=p.get("d", 2),
        t_inner=p["tb"],
        t_outer=p["t0"],
        gamma=p.get("gamma", 0.0),
        hbar=p.get("hbar", 1.0),
    )
