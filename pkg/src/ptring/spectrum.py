"""
Spectra of the ring: dense diagonalization, PT-phase classification,
threshold search, and the Bethe-ansatz quantization condition as an
independent cross-check.

Quasimomenta follow ``E = -2*t0*cos(k) = -2*tb*cos(k')``, with ``k`` living
on the outer arc (t0) and ``k'`` on the inner arc (tb).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy import optimize

from ptring.errors import DomainError, NoTransitionError, NumericalError
from ptring.hamiltonian import HamiltonianMatrix, RingConfig, build_hamiltonian

__all__ = [
    "Phase",
    "SpectralResult",
    "SpectralReport",
    "BetheRoot",
    "ThresholdInfo",
    "diagonalize",
    "spectral_checks",
    "find_gamma_pt",
    "match_eigenvalues",
    "bethe_residual",
    "bethe_roots",
    "residual_scale",
    "asymptotic_condition",
]

PHASE_TOL = 1e-8
RESIDUAL_TOL = 1e-10


class Phase(str, enum.Enum):
    UNBROKEN = "unbroken"
    BROKEN = "broken"


@dataclass(frozen=True, eq=False)
class SpectralResult:
    """Eigen-decomposition of one Hamiltonian.

    Attributes
    ----------
    eigenvalues : ndarray, shape (N,)
        Sorted by real part, then imaginary part.
    eigenvectors : ndarray, shape (N, N)
        Unit-norm right eigenvectors stored as columns.
    max_imag : float
        ``max |Im lambda|``.
    phase : Phase
        ``BROKEN`` iff ``max_imag > threshold``.
    threshold : float
        Imaginary-part tolerance used for the classification.
    residual : float
        ``max_j ||H v_j - lambda_j v_j|| / ||H||``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    max_imag: float
    phase: Phase
    threshold: float
    residual: float


@dataclass(frozen=True)
class SpectralReport:
    """Diagnostics produced by :func:`spectral_checks`."""

    bound: float
    max_abs_real: float
    bound_ok: bool
    particle_hole_deviation: float
    particle_hole_symmetric: bool
    particle_hole_expected: bool
    conjugate_pair_deviation: float
    conjugate_paired: bool
    n_complex: int

    def as_dict(self) -> dict:
        return {
            "bound": self.bound,
            "max_abs_real": self.max_abs_real,
            "bound_ok": self.bound_ok,
            "particle_hole_deviation": self.particle_hole_deviation,
            "particle_hole_symmetric": self.particle_hole_symmetric,
            "particle_hole_expected": self.particle_hole_expected,
            "conjugate_pair_deviation": self.conjugate_pair_deviation,
            "conjugate_paired": self.conjugate_paired,
            "n_complex": self.n_complex,
        }


@dataclass(frozen=True)
class BetheRoot:
    k: complex
    k_prime: complex
    energy: complex
    residual: float


@dataclass(frozen=True)
class ThresholdInfo:
    """Bookkeeping returned by ``find_gamma_pt(..., full_output=True)``."""

    gamma_pt: float
    lower: float
    upper: float
    iterations: int
    evaluations: int
    monotone: bool


def diagonalize(h: HamiltonianMatrix, phase_tol: float = PHASE_TOL) -> SpectralResult:
    """Eigenpairs of ``h`` with a PT-phase label.

    Hermitian input goes through ``eigh`` so degenerate levels get an
    orthonormal basis; everything else through the general ``eig``.
    Near exceptional points the eigenvectors become ill-conditioned but the
    eigenvalues stay usable, so no condition-number check is done here.
    """
    a = h.entries
    try:
        if np.array_equal(a, a.conj().T):
            w, v = scipy.linalg.eigh(a)
            w = w.astype(complex)
        else:
            w, v = scipy.linalg.eig(a)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigensolver failed: {exc}", h.config) from exc

    order = np.lexsort((w.imag, w.real))
    w = w[order]
    v = v[:, order]
    v = v / np.linalg.norm(v, axis=0)

    scale = np.linalg.norm(a, 2) or 1.0
    residual = float(np.max(np.linalg.norm(a @ v - v * w, axis=0)) / scale)
    if not residual <= RESIDUAL_TOL:
        raise NumericalError(f"eigenpair residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}", h.config)

    threshold = phase_tol * h.energy_unit
    max_imag = float(np.max(np.abs(w.imag)))
    phase = Phase.BROKEN if max_imag > threshold else Phase.UNBROKEN
    return SpectralResult(w, v, max_imag, phase, threshold, residual)


def match_eigenvalues(a, b, radius: float = 1e-6):
    """Greedy nearest-neighbour pairing of two eigenvalue lists.

    The globally closest unused pair is accepted first, as long as it lies
    within ``radius``.

    Returns
    -------
    pairs : list of (int, int, float)
        Index into ``a``, index into ``b`` and their distance.
    unmatched_a, unmatched_b : list of int
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    dist = np.abs(a[:, None] - b[None, :])
    used_a = np.zeros(a.size, bool)
    used_b = np.zeros(b.size, bool)
    pairs = []
    for flat in np.argsort(dist, axis=None, kind="stable"):
        i, j = divmod(int(flat), b.size)
        if dist[i, j] > radius:
            break
        if used_a[i] or used_b[j]:
            continue
        used_a[i] = used_b[j] = True
        pairs.append((i, j, float(dist[i, j])))
    return pairs, np.flatnonzero(~used_a).tolist(), np.flatnonzero(~used_b).tolist()


def _multiset_deviation(a, b) -> float:
    pairs, rest_a, rest_b = match_eigenvalues(a, b, radius=np.inf)
    if rest_a or rest_b:
        return math.inf
    return max((p[2] for p in pairs), default=0.0)


def spectral_checks(s: SpectralResult, config: RingConfig, tol: float = 1e-10) -> SpectralReport:
    """Band bound, particle-hole symmetry and conjugate pairing of a spectrum."""
    w = s.eigenvalues
    bound = 2.0 * config.t_max
    max_abs_real = float(np.max(np.abs(w.real)))
    bound_ok = s.phase is Phase.BROKEN or max_abs_real <= bound + 1e-9

    ph_dev = _multiset_deviation(w, -w)
    conj_dev = _multiset_deviation(w, np.conj(w))
    return SpectralReport(
        bound=bound,
        max_abs_real=max_abs_real,
        bound_ok=bool(bound_ok),
        particle_hole_deviation=ph_dev,
        particle_hole_symmetric=ph_dev <= tol,
        particle_hole_expected=config.n_sites % 2 == 0,
        conjugate_pair_deviation=conj_dev,
        conjugate_paired=conj_dev <= tol,
        n_complex=int(np.count_nonzero(np.abs(w.imag) > s.threshold)),
    )


def _phase_at(config: RingConfig, gamma: float, phase_tol: float) -> Phase:
    return diagonalize(build_hamiltonian(config.with_gamma(gamma)), phase_tol).phase


def find_gamma_pt(
    config: RingConfig,
    bracket_max: float | None = None,
    tol: float = 1e-4,
    phase_tol: float = PHASE_TOL,
    prescan: int = 20,
    cap: float = 64.0,
    full_output: bool = False,
):
    """Critical impurity strength of ``config`` (its ``gamma`` is ignored).

    A coarse scan of ``prescan`` points on ``(0, bracket_max]`` picks the
    first unbroken/broken bracket, which is then bisected down to
    ``tol * max(t0, tb)``. If ``bracket_max`` is still unbroken it is doubled
    until the phase breaks or it exceeds ``cap * max(t0, tb)``.

    Returns
    -------
    float, or ThresholdInfo when ``full_output`` is true.
    """
    unit = config.t_max
    hi = 2.0 * unit if bracket_max is None else float(bracket_max)
    if hi <= 0:
        raise ValueError("bracket_max must be positive")
    evaluations = 0

    def broken(g):
        nonlocal evaluations
        evaluations += 1
        return _phase_at(config, g, phase_tol) is Phase.BROKEN

    while not broken(hi):
        hi *= 2.0
        if hi > cap * unit:
            raise NoTransitionError(f"no PT transition below gamma = {cap * unit:g}", config)

    grid = np.linspace(0.0, hi, prescan + 1)
    flags = [False] + [broken(g) for g in grid[1:-1]] + [True]
    first = flags.index(True)
    monotone = all(flags[first:])
    lo, hi = float(grid[first - 1]), float(grid[first])

    iterations = 0
    while hi - lo > tol * unit:
        mid = 0.5 * (lo + hi)
        if broken(mid):
            hi = mid
        else:
            lo = mid
        iterations += 1

    gamma_pt = 0.5 * (lo + hi)
    if full_output:
        return ThresholdInfo(gamma_pt, lo, hi, iterations, evaluations, monotone)
    return gamma_pt


# --- Bethe-ansatz quantization condition -------------------------------------


def _m_value(k, kp, config: RingConfig):
    n, d = config.n_sites, config.sink_site
    t0, tb, g = config.t_outer, config.t_inner, config.gamma
    return (
        t0**2 * np.sin(kp * (d - 1)) * np.sin(k * (n - d - 1))
        + tb**2 * np.sin(kp * (d + 1)) * np.sin(k * (n - d + 1))
        - 2 * tb * t0 * (np.sin(kp * d) * np.sin(k * (n - d)) + np.sin(kp) * np.sin(k))
        + g**2 * np.sin(kp * (d - 1)) * np.sin(k * (n - d + 1))
    )


def _k_prime(k, config: RingConfig):
    return np.arccos((config.t_outer / config.t_inner) * np.cos(np.asarray(k, dtype=complex)))


def _k_from_prime(kp, config: RingConfig):
    return np.arccos((config.t_inner / config.t_outer) * np.cos(np.asarray(kp, dtype=complex)))


def bethe_residual(k, config: RingConfig):
    """Left-hand side M(k, k') of the quantization condition.

    ``k'`` is taken on the principal branch of
    ``arccos((t0/tb) * cos(k))``, which is complex once the argument leaves
    [-1, 1].
    """
    return _m_value(np.asarray(k, dtype=complex), _k_prime(k, config), config)


def residual_scale(k, kp, config: RingConfig) -> float:
    """Magnitude normalization for |M|.

    ``(t0 + tb + gamma)**2 * N`` times the largest sine factor on each arc;
    the sine factors are at most 1 for real quasimomenta and grow like
    ``sinh`` on an evanescent arc.
    """
    n, d = config.n_sites, config.sink_site
    inner = max(1.0, max(abs(np.sin(kp * m)) for m in (d - 1, d, d + 1)))
    outer = max(1.0, max(abs(np.sin(k * m)) for m in (n - d - 1, n - d, n - d + 1)))
    return (config.t_outer + config.t_inner + config.gamma) ** 2 * n * inner * outer


def _wrap(q: float) -> float:
    """Map an angle into (-pi, pi]."""
    q = math.remainder(q, 2 * math.pi)
    return math.pi if q == -math.pi else q


def bethe_roots(
    config: RingConfig,
    grid_factor: int = 40,
    tol: float = 1e-9,
    check: bool = True,
) -> list[BetheRoot]:
    """Real-quasimomentum roots of the quantization condition.

    The scan variable is the quasimomentum on the arc with the larger
    tunneling (``k`` when ``t0 >= tb``, else ``k'``), sampled on
    ``grid_factor * N`` midpoints of (-pi, pi]. Roots are located on the
    reduced function ``M / (sin k sin k')``, which is real on the real axis
    and free of the trivial zeros at ``sin k = 0`` and ``sin k' = 0``:
    sign changes are refined with Brent's method, and tangential (double)
    roots are caught at near-zero local minima of its magnitude.

    Each root is reported once with the scan variable in [0, pi]; ``k`` and
    ``-k`` give the same energy. Roots with complex quasimomenta on the
    dominant arc are not searched for. With ``check`` set, a warning is
    issued when fewer roots than distinct real eigenvalues are found.
    """
    outer_dominant = config.t_outer >= config.t_inner

    def quasimomenta(q):
        q = np.asarray(q, dtype=complex)
        if outer_dominant:
            return q, _k_prime(q, config)
        return _k_from_prime(q, config), q

    def reduced(q):
        k, kp = quasimomenta(q)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.real(_m_value(k, kp, config) / (np.sin(k) * np.sin(kp)))

    n_grid = max(grid_factor * config.n_sites, 64)
    h = 2 * np.pi / n_grid
    q = -np.pi + (np.arange(n_grid) + 0.5) * h
    g = reduced(q)
    g = np.where(np.isfinite(g), g, 0.0)
    nxt = np.roll(np.arange(n_grid), -1)
    prv = np.roll(np.arange(n_grid), 1)

    def f(x):
        return float(reduced(x))

    candidates = []
    for i in range(n_grid):
        a, b = q[i], q[i] + h  # periodic: the last cell wraps past pi
        gi, gj = g[i], g[nxt[i]]
        if gi == 0.0:
            candidates.append(q[i])
        elif gi * gj < 0:
            candidates.append(optimize.brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps))

    for i in range(n_grid):
        gm, g0, gp = g[prv[i]], g[i], g[nxt[i]]
        if not (abs(g0) <= abs(gm) and abs(g0) <= abs(gp)):
            continue
        if gm * g0 <= 0 or g0 * gp <= 0:
            continue  # already bracketed by a sign change
        s = math.copysign(1.0, g0)
        a, b = q[i] - h, q[i] + h
        res = optimize.minimize_scalar(
            lambda x: s * f(x), bounds=(a, b), method="bounded", options={"xatol": 1e-13}
        )
        x_min = float(res.x)
        if res.fun < 0:
            # two close roots hiding inside one grid cell
            candidates.append(optimize.brentq(f, a, x_min, xtol=1e-15))
            candidates.append(optimize.brentq(f, x_min, b, xtol=1e-15))
        else:
            candidates.append(x_min)

    roots: list[BetheRoot] = []
    seen: list[float] = []
    for x in sorted(abs(_wrap(float(c))) for c in candidates):
        if any(abs(x - y) < 1e-6 for y in seen):
            continue
        k, kp = quasimomenta(x)
        k, kp = complex(k), complex(kp)
        m = complex(_m_value(k, kp, config))
        scale = residual_scale(k, kp, config)
        if abs(m) > tol * scale:
            continue
        seen.append(x)
        energy = -2 * config.t_outer * np.cos(k)
        roots.append(BetheRoot(k, kp, complex(energy), abs(m) / scale))

    roots.sort(key=lambda r: (r.energy.real, r.energy.imag))
    if check:
        spectral = diagonalize(build_hamiltonian(config))
        real = spectral.eigenvalues[np.abs(spectral.eigenvalues.imag) <= spectral.threshold].real
        distinct = np.unique(np.round(real, 7)).size
        if len(roots) < distinct:
            warnings.warn(
                f"found {len(roots)} real-quasimomentum roots for {distinct} distinct real "
                "eigenvalues; complex quasimomenta are not searched",
                RuntimeWarning,
                stacklevel=2,
            )
    return roots


def asymptotic_condition(k: float, mu: float, config: RingConfig) -> tuple[float, float]:
    """Both sides of the large-N form of the quantization condition.

    ``lhs = sin(k' mu N) sin(k (1 - mu) N) / (sin k' sin k)`` and
    ``rhs = 2 t0 tb / ((t0 - tb)**2 + gamma**2)``; ``rhs`` is ``inf`` when the
    denominator vanishes (equal arcs without gain/loss).
    """
    t0, tb, n = config.t_outer, config.t_inner, config.n_sites
    kp = complex(_k_prime(k, config))
    sk, skp = np.sin(complex(k)), np.sin(kp)
    if abs(sk) < 1e-12 or abs(skp) < 1e-12:
        raise DomainError(f"sin(k) or sin(k') vanishes at k = {k!r}")
    lhs = np.sin(kp * mu * n) * np.sin(k * (1 - mu) * n) / (skp * sk)
    denom = (t0 - tb) ** 2 + config.gamma**2
    rhs = math.inf if denom == 0 else 2 * t0 * tb / denom
    return float(lhs.real), rhs
