"""
Non-unitary time evolution of site-localized wave packets.

Times are in normalized units of ``2*pi*hbar/max(t0, tb)``. States are
renormalized after every step and the discarded scale is kept as a running
log-norm, so broken-phase runs never overflow; every observable here is
either scale-invariant or reported through that log-norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ptring.errors import ConfigurationError, DomainError, NumericalError
from ptring.hamiltonian import HamiltonianMatrix, RingConfig, build_hamiltonian

__all__ = [
    "WaveState",
    "Propagator",
    "Trajectory",
    "momentum_grid",
    "make_propagator",
    "evolve",
    "momentum_matrix_element",
    "reciprocal_intensity",
    "steady_state_momentum",
]

COND_LIMIT = 1e8
DEFAULT_DT = 0.05


@dataclass(frozen=True, eq=False)
class WaveState:
    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=complex))

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @classmethod
    def localized(cls, n_sites: int, site: int) -> "WaveState":
        """Unit amplitude on ``site`` (1-based)."""
        if not 1 <= site <= n_sites:
            raise ConfigurationError("m0", f"must satisfy 1 <= m0 <= {n_sites}, got {site}")
        f = np.zeros(n_sites, dtype=complex)
        f[site - 1] = 1.0
        return cls(f)


@dataclass(frozen=True, eq=False)
class Propagator:
    """One-step evolution operator ``exp(-i H dt_phys / hbar)``.

    ``method`` is ``"spectral"`` (eigen-decomposition) or ``"expm"``
    (scaling-and-squaring fallback); ``condition`` is the condition number
    of the eigenvector matrix that drove the choice.
    """

    matrix: np.ndarray
    dt: float
    method: str
    condition: float

    def __call__(self, f: np.ndarray) -> np.ndarray:
        return self.matrix @ f


def make_propagator(h: HamiltonianMatrix, dt: float, cond_limit: float = COND_LIMIT) -> Propagator:
    if not dt > 0:
        raise ConfigurationError("dt", f"must be positive, got {dt}")
    a = h.entries
    # exp(-i H dt_phys / hbar) with dt_phys = dt * 2 pi hbar / E_unit
    phase = 2.0 * np.pi * dt / h.energy_unit
    cond = math.inf
    try:
        if np.array_equal(a, a.conj().T):
            w, v = scipy.linalg.eigh(a)
            u = (v * np.exp(-1j * w * phase)) @ v.conj().T
            return Propagator(u, dt, "spectral", 1.0)
        w, v = scipy.linalg.eig(a)
        cond = float(np.linalg.cond(v))
        if np.isfinite(cond) and cond <= cond_limit:
            # V diag(e^{-i w phase}) V^{-1}
            u = scipy.linalg.solve(v.T, (v * np.exp(-1j * w * phase)).T).T
            return Propagator(u, dt, "spectral", cond)
    except (np.linalg.LinAlgError, ValueError):
        pass  # near-defective: fall through to the exponential

    try:
        u = scipy.linalg.expm(-1j * phase * a)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"matrix exponential failed: {exc}", h.config) from exc
    if not np.all(np.isfinite(u)):
        raise NumericalError("matrix exponential produced non-finite entries", h.config)
    return Propagator(u, dt, "expm", cond)


def _as_array(state) -> np.ndarray:
    return state.amplitudes if isinstance(state, WaveState) else np.asarray(state, dtype=complex)


def _momentum(g: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Lattice momentum matrix element along the last axis (periodic)."""
    g_next = np.roll(g, -1, axis=-1)
    f_next = np.roll(f, -1, axis=-1)
    total = np.sum((g_next.conj() + g.conj()) * (f_next - f), axis=-1)
    norms = np.sqrt(np.sum(np.abs(g) ** 2, axis=-1) * np.sum(np.abs(f) ** 2, axis=-1))
    return -0.5j * total / norms


def momentum_matrix_element(phi, psi) -> complex:
    """``<phi| p |psi>`` normalized by ``sqrt(<phi|phi><psi|psi>)``.

    For ``phi == psi`` this equals ``Im sum_j conj(f_j) f_{j+1} / <psi|psi>``
    and lies in [-1, 1].
    """
    g, f = _as_array(phi), _as_array(psi)
    if g.shape != f.shape:
        raise ValueError(f"state dimensions differ: {g.shape} vs {f.shape}")
    if not (np.any(g) and np.any(f)):
        raise DomainError("momentum of a zero-norm state is undefined")
    return complex(_momentum(g, f))


def momentum_grid(n_sites: int) -> np.ndarray:
    """Reciprocal-space points ``p_u = pi (2u/N - 1)`` for u = 1..N."""
    u = np.arange(1, n_sites + 1)
    return np.pi * (2.0 * u / n_sites - 1.0)


def reciprocal_intensity(psi) -> np.ndarray:
    """``I_M(u) = |sum_j exp(-i p_u j) f_j|**2 / N`` for u = 1..N.

    Accepts a single state or a stack of states along the leading axes.
    """
    f = _as_array(psi)
    n = f.shape[-1]
    sign = (-1.0) ** np.arange(1, n + 1)
    # sum_j e^{-2 pi i u j / N} (-1)^j f_j; FFT index u mod N, rolled so u = 1 comes first
    spectrum = np.fft.fft(f * sign, axis=-1)
    return np.roll(np.abs(spectrum) ** 2 / n, -1, axis=-1)


def _propagate(u: Propagator, f0: np.ndarray, n_steps: int):
    """Normalized amplitudes at every step plus the accumulated log-norm."""
    amps = np.empty((n_steps + 1, f0.size), dtype=complex)
    log_norm = np.empty(n_steps + 1)
    norm0 = np.linalg.norm(f0)
    f = f0 / norm0
    amps[0] = f
    log_norm[0] = math.log(norm0)
    m = u.matrix
    for i in range(1, n_steps + 1):
        f = m @ f
        nrm = np.linalg.norm(f)
        if not (nrm > 0 and np.isfinite(nrm)):
            raise NumericalError(f"state norm became {nrm} at step {i}")
        f = f / nrm
        amps[i] = f
        log_norm[i] = log_norm[i - 1] + math.log(nrm)
    return amps, log_norm


def _steps(t_total: float, dt: float) -> tuple[int, float]:
    if not dt > 0:
        raise ConfigurationError("dt", f"must be positive, got {dt}")
    if t_total < 0:
        raise ConfigurationError("t_max", f"must be non-negative, got {t_total}")
    if t_total == 0:
        return 0, dt
    n = max(1, math.ceil(t_total / dt - 1e-9))
    return n, t_total / n


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled time history of one wave packet.

    ``amplitudes`` are the renormalized states; the physical state at
    sample ``i`` is ``amplitudes[i] * exp(log_norm[i])``. ``i_r`` and
    ``i_m`` hold physical intensities, so in a deep broken phase they (and
    ``net_intensity``) may overflow to ``inf`` while ``log_norm`` stays finite.
    """

    config: RingConfig
    m0: int
    sample_times: np.ndarray
    amplitudes: np.ndarray
    log_norm: np.ndarray
    i_r: np.ndarray
    i_m: np.ndarray
    p_t: np.ndarray
    net_intensity: np.ndarray
    method: str

    @property
    def momenta(self) -> np.ndarray:
        return momentum_grid(self.config.n_sites)

    def state(self, i: int) -> WaveState:
        return WaveState(self.amplitudes[i] * math.exp(self.log_norm[i]), float(self.sample_times[i]))

    @property
    def states(self) -> list[WaveState]:
        return [self.state(i) for i in range(len(self.sample_times))]


def evolve(
    config: RingConfig,
    m0: int,
    t_max: float,
    dt: float = DEFAULT_DT,
    cond_limit: float = COND_LIMIT,
) -> Trajectory:
    """Evolve a packet starting on site ``m0`` and sample it every ``dt``.

    ``dt`` is shrunk slightly when needed so that ``t_max`` is hit exactly.
    """
    f0 = WaveState.localized(config.n_sites, m0).amplitudes
    n_steps, dt_eff = _steps(t_max, dt)
    prop = make_propagator(build_hamiltonian(config), dt_eff, cond_limit)
    amps, log_norm = _propagate(prop, f0, n_steps)

    with np.errstate(over="ignore"):
        net = np.exp(2.0 * log_norm)
        i_r = np.abs(amps) ** 2 * net[:, None]
        i_m = reciprocal_intensity(amps) * net[:, None]
    p_t = _momentum(amps, amps).real
    times = np.arange(n_steps + 1) * dt_eff
    return Trajectory(config, m0, times, amps, log_norm, i_r, i_m, p_t, net, prop.method)


def steady_state_momentum(
    config: RingConfig,
    m0: int,
    T: float = 500.0,
    dt: float = DEFAULT_DT,
    full_output: bool = False,
):
    """Time-averaged momentum ``(1/T) * integral_0^T p(t) dt`` (trapezoidal rule).

    With ``full_output`` also returns a dict with the largest ``|p(t)|``,
    the final log-norm, the step count and the propagator method.
    """
    if not T > 0:
        raise ConfigurationError("T", f"must be positive, got {T}")
    f0 = WaveState.localized(config.n_sites, m0).amplitudes
    n_steps, dt_eff = _steps(T, dt)
    prop = make_propagator(build_hamiltonian(config), dt_eff)
    amps, log_norm = _propagate(prop, f0, n_steps)
    p_t = _momentum(amps, amps).real
    p_bar = float(np.trapezoid(p_t, dx=dt_eff) / T)
    if not full_output:
        return p_bar
    info = {
        "max_abs_p": float(np.max(np.abs(p_t))),
        "log_norm": float(log_norm[-1]),
        "n_steps": n_steps,
        "method": prop.method,
    }
    return p_bar, info
