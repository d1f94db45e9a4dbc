"""
Parameter sweeps behind the phase diagram and the chirality curves.

Every grid point is an independent pure computation, so points are farmed
out to a process pool when ``workers > 1``. Records are sorted by their
axis values before they are returned, so serial and parallel runs give the
same result in the same order.
"""

from __future__ import annotations

import dataclasses
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ptring.dynamics import DEFAULT_DT, steady_state_momentum
from ptring.errors import PTRingError
from ptring.hamiltonian import RingConfig
from ptring.spectrum import PHASE_TOL, find_gamma_pt

__all__ = ["SweepRecord", "SweepGrid", "phase_diagram", "chirality_curve", "default_d_values"]


@dataclass(frozen=True)
class SweepRecord:
    """One grid point: its inputs, the scalar result and diagnostics.

    ``value`` is ``None`` and ``error`` holds the message when the point failed.
    """

    inputs: dict
    value: float | None
    diagnostics: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class SweepGrid:
    kind: str
    axes: dict
    base: RingConfig
    settings: dict
    records: tuple[SweepRecord, ...]

    @property
    def success_fraction(self) -> float:
        if not self.records:
            return 1.0
        return sum(r.ok for r in self.records) / len(self.records)

    def series(self, group: str, x: str) -> dict:
        """Successful points grouped by ``inputs[group]`` as ``(x, value)`` arrays."""
        out: dict = {}
        for r in self.records:
            if r.ok:
                out.setdefault(r.inputs[group], []).append((r.inputs[x], r.value))
        return {k: tuple(np.array(c) for c in zip(*sorted(v))) for k, v in out.items()}


def default_d_values(n_sites: int) -> list[int]:
    """Sink positions 3, 5, ..., N/2 + 1 (fractional distance up to 1/2)."""
    return list(range(3, n_sites // 2 + 2, 2))


def _run(func, tasks, workers):
    if workers is None or workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _phase_point(task) -> SweepRecord:
    config, tol, phase_tol = task
    inputs = {
        "n": config.n_sites,
        "d": config.sink_site,
        "mu": config.mu,
        "t0": config.t_outer,
        "tb": config.t_inner,
    }
    try:
        info = find_gamma_pt(config, tol=tol, phase_tol=phase_tol, full_output=True)
    except (PTRingError, ArithmeticError) as exc:
        return SweepRecord(inputs, None, {}, f"{type(exc).__name__}: {exc}")
    diagnostics = {
        "gamma_pt": info.gamma_pt,
        "bisection_iters": info.iterations,
        "eigensolves": info.evaluations,
        "monotone": info.monotone,
    }
    return SweepRecord(inputs, info.gamma_pt / config.t_max, diagnostics)


def phase_diagram(
    base: RingConfig,
    d_values=None,
    tb_values=None,
    tol: float = 1e-4,
    phase_tol: float = PHASE_TOL,
    workers: int = 1,
) -> SweepGrid:
    """Critical strength ``gamma_PT / max(t0, tb)`` over sink positions and inner tunnelings.

    ``base`` supplies N and t0 (and tb when ``tb_values`` is omitted).
    Points that fail keep their slot with an error message.
    """
    d_values = default_d_values(base.n_sites) if d_values is None else [int(d) for d in d_values]
    tb_values = [base.t_inner] if tb_values is None else [float(t) for t in tb_values]
    tasks = [
        (dataclasses.replace(base, sink_site=d, t_inner=tb, gamma=0.0), tol, phase_tol)
        for tb in tb_values
        for d in d_values
    ]
    records = _run(_phase_point, tasks, workers)
    records.sort(key=lambda r: (r.inputs["tb"], r.inputs["d"]))
    return SweepGrid(
        kind="phase_diagram",
        axes={"tb": tb_values, "d": d_values},
        base=base,
        settings={"tol": tol, "phase_tol": phase_tol},
        records=tuple(records),
    )


def _chirality_point(task) -> SweepRecord:
    config, m0, T, dt = task
    inputs = {"d": config.sink_site, "gamma": config.gamma}
    try:
        p_bar, info = steady_state_momentum(config, m0, T, dt, full_output=True)
    except (PTRingError, ArithmeticError) as exc:
        return SweepRecord(inputs, None, {}, f"{type(exc).__name__}: {exc}")
    return SweepRecord(inputs, p_bar, info)


def chirality_curve(
    base: RingConfig,
    m0: int,
    d_values,
    gammas,
    T: float = 500.0,
    dt: float = DEFAULT_DT,
    workers: int = 1,
) -> SweepGrid:
    """Steady-state momentum p(gamma) for each sink position in ``d_values``."""
    if T < 10 * base.n_sites:
        warnings.warn(f"T = {T} is short of 10 N = {10 * base.n_sites}; p may not be stationary", stacklevel=2)
    d_values = [int(d) for d in d_values]
    gammas = [float(g) for g in gammas]
    tasks = []
    for d in d_values:
        for g in gammas:
            config = dataclasses.replace(base, sink_site=d, gamma=g)
            tasks.append((config, m0, T, dt))
    records = _run(_chirality_point, tasks, workers)
    records.sort(key=lambda r: (r.inputs["d"], r.inputs["gamma"]))
    return SweepGrid(
        kind="chirality",
        axes={"d": d_values, "gamma": gammas},
        base=base,
        settings={"m0": m0, "T": T, "dt": dt},
        records=tuple(records),
    )
