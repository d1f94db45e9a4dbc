"""
CSV and JSON serialization of spectra, trajectories and sweeps.

Floats are written with 17 significant digits so a CSV parsed back into
floats and written again reproduces the same bytes.
"""

from __future__ import annotations

import csv
import io
import json
import re
from pathlib import Path

import numpy as np

from ptring.dynamics import Trajectory
from ptring.hamiltonian import RingConfig
from ptring.spectrum import BetheRoot, SpectralReport, SpectralResult, match_eigenvalues
from ptring.sweeps import SweepGrid

__all__ = [
    "format_value",
    "parse_value",
    "csv_text",
    "write_csv",
    "read_csv",
    "write_trajectory",
    "write_phase_diagram",
    "write_chirality",
    "spectrum_payload",
    "bethe_table",
    "write_json",
]

_INT = re.compile(r"^[+-]?\d+$")

PHASE_DIAGRAM_COLUMNS = (
    "n", "d", "mu", "t0", "tb", "gamma_pt", "gamma_pt_normalized", "bisection_iters", "errors",
)
CHIRALITY_COLUMNS = ("d", "gamma", "p_bar", "errors")


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def parse_value(text: str):
    """Inverse of :func:`format_value` for the scalar types it emits."""
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    if _INT.match(text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(header, rows))


def read_csv(path):
    """Header and rows with values converted by :func:`parse_value`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[parse_value(v) for v in row] for row in reader]
    return header, rows


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def write_trajectory(traj: Trajectory, out_dir) -> dict:
    """Write ``real.csv``, ``reciprocal.csv`` and ``momentum.csv`` in long format."""
    out_dir = Path(out_dir)
    n = traj.config.n_sites
    sites = np.arange(1, n + 1)
    p_u = traj.momenta
    paths = {
        "real": out_dir / "real.csv",
        "reciprocal": out_dir / "reciprocal.csv",
        "momentum": out_dir / "momentum.csv",
    }
    write_csv(
        paths["real"],
        ("t", "site", "intensity"),
        ((t, int(j), float(v)) for t, row in zip(traj.sample_times, traj.i_r) for j, v in zip(sites, row)),
    )
    write_csv(
        paths["reciprocal"],
        ("t", "u", "p_u", "intensity"),
        (
            (t, int(u), float(p), float(v))
            for t, row in zip(traj.sample_times, traj.i_m)
            for u, p, v in zip(sites, p_u, row)
        ),
    )
    write_csv(
        paths["momentum"],
        ("t", "p", "net_intensity", "log_norm"),
        zip(
            traj.sample_times.tolist(),
            traj.p_t.tolist(),
            traj.net_intensity.tolist(),
            traj.log_norm.tolist(),
        ),
    )
    return paths


def write_phase_diagram(grid: SweepGrid, path) -> None:
    rows = []
    for r in grid.records:
        i = r.inputs
        rows.append((
            i["n"], i["d"], i["mu"], i["t0"], i["tb"],
            r.diagnostics.get("gamma_pt"), r.value, r.diagnostics.get("bisection_iters"), r.error,
        ))
    write_csv(path, PHASE_DIAGRAM_COLUMNS, rows)


def write_chirality(grid: SweepGrid, path) -> None:
    rows = [(r.inputs["d"], r.inputs["gamma"], r.value, r.error) for r in grid.records]
    write_csv(path, CHIRALITY_COLUMNS, rows)


def bethe_table(roots: list[BetheRoot], spectral: SpectralResult, radius: float = 1e-7) -> dict:
    """Match Bethe-root energies to eigenvalues (greedy, within ``radius``)."""
    pairs, unmatched, _ = match_eigenvalues([r.energy for r in roots], spectral.eigenvalues, radius)
    partner = {i: (j, dist) for i, j, dist in pairs}
    rows = []
    for i, r in enumerate(roots):
        j, dist = partner.get(i, (None, None))
        rows.append({
            "k": [r.k.real, r.k.imag],
            "k_prime": [r.k_prime.real, r.k_prime.imag],
            "energy": [r.energy.real, r.energy.imag],
            "residual": r.residual,
            "eigenvalue_index": j,
            "distance": dist,
        })
    return {"roots": rows, "matched": len(pairs), "total": len(roots), "radius": radius}


def spectrum_payload(
    config: RingConfig,
    spectral: SpectralResult,
    report: SpectralReport,
    bethe: dict | None = None,
) -> dict:
    payload = {
        "config": {
            "n": config.n_sites,
            "d": config.sink_site,
            "t0": config.t_outer,
            "tb": config.t_inner,
            "gamma": config.gamma,
            "hbar": config.hbar,
        },
        "phase": spectral.phase.value,
        "max_imag": spectral.max_imag,
        "threshold": spectral.threshold,
        "residual": spectral.residual,
        "eigenvalues": [[float(w.real), float(w.imag)] for w in spectral.eigenvalues],
        "checks": report.as_dict(),
    }
    if bethe is not None:
        payload["bethe"] = bethe
    return payload
