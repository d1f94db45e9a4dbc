"""
Command-line entry point.

Subcommands: ``spectrum``, ``bethe``, ``evolve``, ``phase-diagram``,
``chirality`` and ``rerun`` (replays a written manifest).

Exit codes: 0 success, 2 invalid parameters or usage, 3 numerical failure,
4 I/O failure, 5 fewer than 90% of sweep points succeeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ptring import __version__
from ptring.config import PARAMETERS, SUBCOMMAND_PARAMETERS, RunManifest, load_config, ring_config
from ptring.dynamics import evolve
from ptring.errors import ConfigurationError, NumericalError
from ptring.hamiltonian import RingConfig, build_hamiltonian
from ptring.io import (
    bethe_table,
    csv_text,
    spectrum_payload,
    write_chirality,
    write_phase_diagram,
    write_trajectory,
)
from ptring.spectrum import bethe_roots, diagonalize, spectral_checks
from ptring.svg import heatmap_svg, line_plot_svg
from ptring.sweeps import chirality_curve, phase_diagram

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4
EXIT_SWEEP = 5

MIN_SUCCESS = 0.9

# flag -> parameter name
_FLAGS = {
    "--n": "n",
    "--d": "d",
    "--t0": "t0",
    "--tb": "tb",
    "--gamma": "gamma",
    "--hbar": "hbar",
    "--m0": "m0",
    "--dt": "dt",
    "--tmax": "t_max",
    "--t-avg": "t_avg",
    "--phase-tol": "phase_tol",
    "--bisect-tol": "bisect_tol",
    "--cond-limit": "cond_limit",
    "--tb-list": "tb_list",
    "--d-list": "d_list",
    "--gamma-max": "gamma_max",
    "--gamma-steps": "gamma_steps",
    "--threads": "threads",
}


def _add_params(parser, names):
    for flag, name in _FLAGS.items():
        if name in names:
            parser.add_argument(flag, dest=name, type=PARAMETERS[name][0], default=None, metavar=name.upper())
    parser.add_argument("--config", type=Path, default=None, help="key = value parameter file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptring", description=__doc__.splitlines()[1])
    parser.add_argument("--version", action="version", version=f"ptring {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    params = SUBCOMMAND_PARAMETERS

    p = sub.add_parser("spectrum", help="diagonalize one ring and check its spectrum")
    _add_params(p, params["spectrum"])
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--bethe", action="store_true", help="cross-check against Bethe-ansatz roots")
    p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")

    p = sub.add_parser("bethe", help="real-quasimomentum roots of the quantization condition")
    _add_params(p, params["bethe"])
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("evolve", help="evolve a site-localized wave packet")
    _add_params(p, params["evolve"])
    p.add_argument("--heatmap", choices=("real", "reciprocal", "both", "none"), default="both")
    p.add_argument("--log-scale", action="store_true", help="log color scale for heatmaps")
    p.add_argument("--out-dir", type=Path, required=True)

    p = sub.add_parser("phase-diagram", help="critical gamma versus impurity distance")
    _add_params(p, params["phase-diagram"])
    p.add_argument("--out-dir", type=Path, required=True)

    p = sub.add_parser("chirality", help="steady-state momentum versus gamma")
    _add_params(p, params["chirality"])
    p.add_argument("--out-dir", type=Path, required=True)

    p = sub.add_parser("rerun", help="repeat a run from its manifest.json")
    p.add_argument("manifest", type=Path)
    p.add_argument("--out-dir", type=Path, default=None)
    p.add_argument("--out", type=Path, default=None)
    return parser


# --- subcommand bodies -------------------------------------------------------


def _emit(text: str, out: Path | None, manifest: RunManifest) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    manifest.write(out.with_name(out.name + ".manifest.json"))


def _spectrum(manifest: RunManifest, out: Path | None) -> int:
    params, opts = manifest.parameters, manifest.options
    config = ring_config(params)
    spectral = diagonalize(build_hamiltonian(config), params["phase_tol"])
    report = spectral_checks(spectral, config)
    table = bethe_table(bethe_roots(config), spectral) if opts.get("bethe") else None

    if opts.get("format", "json") == "json":
        text = json.dumps(spectrum_payload(config, spectral, report, table), indent=2) + "\n"
    else:
        partner = {}
        if table is not None:
            partner = {r["eigenvalue_index"]: r for r in table["roots"] if r["eigenvalue_index"] is not None}
        header = ["index", "re", "im"] + (["bethe_k", "bethe_residual"] if table is not None else [])
        rows = []
        for i, w in enumerate(spectral.eigenvalues):
            row = [i, float(w.real), float(w.imag)]
            if table is not None:
                root = partner.get(i)
                row += [root["k"][0], root["residual"]] if root else [None, None]
            rows.append(row)
        text = csv_text(header, rows)
    _emit(text, out, manifest)
    return EXIT_OK


def _bethe(manifest: RunManifest, out: Path | None) -> int:
    params = manifest.parameters
    config = ring_config(params)
    spectral = diagonalize(build_hamiltonian(config), params["phase_tol"])
    table = bethe_table(bethe_roots(config), spectral)
    if manifest.options.get("format", "json") == "json":
        text = json.dumps(table, indent=2) + "\n"
    else:
        header = ["k", "k_prime_re", "k_prime_im", "energy_re", "energy_im", "residual", "eigenvalue_index", "distance"]
        rows = [
            [r["k"][0], r["k_prime"][0], r["k_prime"][1], r["energy"][0], r["energy"][1],
             r["residual"], r["eigenvalue_index"], r["distance"]]
            for r in table["roots"]
        ]
        text = csv_text(header, rows)
    _emit(text, out, manifest)
    return EXIT_OK


def _evolve(manifest: RunManifest, out_dir: Path) -> int:
    params, opts = manifest.parameters, manifest.options
    config = ring_config(params)
    traj = evolve(config, params["m0"], params["t_max"], params["dt"], cond_limit=params["cond_limit"])
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trajectory(traj, out_dir)

    which = opts.get("heatmap", "both")
    log_scale = bool(opts.get("log_scale", False))
    time_label = "t [2πħ/max(t0,tb)]"
    subtitle = f"N={config.n_sites} d={config.sink_site} t0={config.t_outer:g} tb={config.t_inner:g} γ={config.gamma:g} m0={params['m0']}"
    if which in ("real", "both"):
        svg = heatmap_svg(
            traj.i_r.T, traj.sample_times, np.arange(1, config.n_sites + 1),
            time_label, "site j", f"I_R(j,t)  {subtitle}", log_scale=log_scale,
        )
        (out_dir / "heatmap_real.svg").write_text(svg)
    if which in ("reciprocal", "both"):
        svg = heatmap_svg(
            traj.i_m.T, traj.sample_times, traj.momenta,
            time_label, "p_u", f"I_M(u,t)  {subtitle}", log_scale=log_scale,
        )
        (out_dir / "heatmap_reciprocal.svg").write_text(svg)
    manifest.write(out_dir / "manifest.json")
    return EXIT_OK


def _phase_diagram(manifest: RunManifest, out_dir: Path) -> int:
    params = manifest.parameters
    base = RingConfig(params["n"], 2, t_inner=params["tb_list"][0], t_outer=params["t0"])
    grid = phase_diagram(
        base, params["d_list"], params["tb_list"],
        tol=params["bisect_tol"], phase_tol=params["phase_tol"], workers=params["threads"],
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    write_phase_diagram(grid, out_dir / "phase_diagram.csv")
    series = {f"tb={tb:g}": xy for tb, xy in grid.series("tb", "mu").items()}
    t0 = params["t0"]
    refs = {f"|t0-tb|={abs(t0 - tb):g}": abs(t0 - tb) / max(t0, tb) for tb in params["tb_list"]}
    svg = line_plot_svg(series, "μ = (d-1)/N", "γ_PT / max(t0,tb)", f"PT phase diagram, N={params['n']}, t0={t0:g}", refs)
    (out_dir / "phase_diagram.svg").write_text(svg)
    manifest.write(out_dir / "manifest.json")
    return EXIT_OK if grid.success_fraction >= MIN_SUCCESS else EXIT_SWEEP


def _chirality(manifest: RunManifest, out_dir: Path) -> int:
    params = manifest.parameters
    base = RingConfig(params["n"], params["d_list"][0], t_inner=params["tb"], t_outer=params["t0"])
    gammas = np.linspace(0.0, params["gamma_max"], params["gamma_steps"])
    grid = chirality_curve(
        base, params["m0"], params["d_list"], gammas,
        T=params["t_avg"], dt=params["dt"], workers=params["threads"],
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    write_chirality(grid, out_dir / "chirality.csv")
    series = {f"d={d}": xy for d, xy in grid.series("d", "gamma").items()}
    svg = line_plot_svg(
        series, "γ", "steady-state momentum p(γ)",
        f"Chirality, N={params['n']}, t0={params['t0']:g}, tb={params['tb']:g}, m0={params['m0']}",
        {"p = 1": 1.0},
    )
    (out_dir / "chirality.svg").write_text(svg)
    manifest.write(out_dir / "manifest.json")
    return EXIT_OK if grid.success_fraction >= MIN_SUCCESS else EXIT_SWEEP


def run_manifest(manifest: RunManifest, out_dir: Path | None = None, out: Path | None = None) -> int:
    command = manifest.subcommand
    if command == "spectrum":
        return _spectrum(manifest, out)
    if command == "bethe":
        return _bethe(manifest, out)
    if out_dir is None:
        raise ConfigurationError("out_dir", f"{command} needs an output directory")
    body = {"evolve": _evolve, "phase-diagram": _phase_diagram, "chirality": _chirality}[command]
    return body(manifest, out_dir)


def _manifest_from_args(args) -> tuple[RunManifest, Path | None, Path | None]:
    if args.command == "rerun":
        manifest = RunManifest.read(args.manifest)
        manifest.provenance = {k: "manifest" for k in manifest.parameters}
        out_dir = args.out_dir if args.out_dir is not None else args.manifest.parent
        return manifest, out_dir, args.out

    flags = {name: getattr(args, name) for name in PARAMETERS if hasattr(args, name)}
    manifest = load_config(args.config, flags, args.command, version=__version__)
    for key in ("format", "bethe", "heatmap", "log_scale"):
        if hasattr(args, key):
            manifest.options[key] = getattr(args, key)
    return manifest, getattr(args, "out_dir", None), getattr(args, "out", None)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        manifest, out_dir, out = _manifest_from_args(args)
        return run_manifest(manifest, out_dir, out)
    except ConfigurationError as exc:
        print(f"ptring: invalid parameter {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"ptring: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"ptring: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
