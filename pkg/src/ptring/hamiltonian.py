"""
Ring Hamiltonian with a balanced gain/loss impurity pair.

Sites are labelled 1..N in every public interface. Arrays are stored
0-based, so site ``j`` lives at index ``j - 1``; bond ``i`` couples sites
``i`` and ``i + 1`` (bond ``N`` is the wrap bond ``N -> 1``).

The gain impurity ``+i*gamma`` sits on site 1 and the loss impurity
``-i*gamma`` on the sink site ``d``. Bonds ``1 <= i < d`` (the inner arc)
carry ``t_inner``; bonds ``d <= i <= N`` (the outer arc, wrap bond
included) carry ``t_outer``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from ptring.errors import ConfigurationError

__all__ = [
    "RingConfig",
    "HamiltonianMatrix",
    "ParityMap",
    "bond_amplitudes",
    "build_hamiltonian",
    "build_parity",
    "check_pt_symmetry",
    "mirror_config",
    "mirror_site",
]


@dataclass(frozen=True)
class RingConfig:
    """Physical description of one ring.

    Parameters
    ----------
    n_sites : int
        Number of sites N (at least 3).
    sink_site : int
        Site d of the loss impurity, ``2 <= d <= N``.
    t_inner : float
        Tunneling on the arc 1 -> d (t_b).
    t_outer : float
        Tunneling on the arc d -> N -> 1 (t_0).
    gamma : float
        Impurity strength, non-negative.
    hbar : float
        Scaled Planck constant.
    """

    n_sites: int
    sink_site: int
    t_inner: float
    t_outer: float
    gamma: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("n_sites", "sink_site"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ConfigurationError(name, f"must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("t_inner", "t_outer", "gamma", "hbar"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ConfigurationError(name, f"must be finite, got {value!r}")
            object.__setattr__(self, name, value)

        if self.n_sites < 3:
            raise ConfigurationError("n_sites", f"need at least 3 sites, got {self.n_sites}")
        if not 2 <= self.sink_site <= self.n_sites:
            raise ConfigurationError(
                "sink_site", f"must satisfy 2 <= d <= {self.n_sites}, got {self.sink_site}"
            )
        if self.t_inner <= 0:
            raise ConfigurationError("t_inner", f"must be positive, got {self.t_inner}")
        if self.t_outer <= 0:
            raise ConfigurationError("t_outer", f"must be positive, got {self.t_outer}")
        if self.gamma < 0:
            raise ConfigurationError("gamma", f"must be non-negative, got {self.gamma}")
        if self.hbar <= 0:
            raise ConfigurationError("hbar", f"must be positive, got {self.hbar}")

    # Short names matching the usual physics notation.
    @property
    def n(self) -> int:
        return self.n_sites

    @property
    def d(self) -> int:
        return self.sink_site

    @property
    def t0(self) -> float:
        return self.t_outer

    @property
    def tb(self) -> float:
        return self.t_inner

    @property
    def t_max(self) -> float:
        """Energy unit max(t0, tb)."""
        return max(self.t_outer, self.t_inner)

    @property
    def mu(self) -> float:
        """Fractional distance (d - 1) / N between the impurities."""
        return (self.sink_site - 1) / self.n_sites

    @property
    def time_unit(self) -> float:
        """Physical duration of one normalized time unit, 2*pi*hbar/max(t0, tb)."""
        return 2.0 * np.pi * self.hbar / self.t_max

    def with_gamma(self, gamma: float) -> "RingConfig":
        return dataclasses.replace(self, gamma=gamma)


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    """Dense site-basis Hamiltonian.

    ``entries[j - 1, i - 1]`` is the matrix element between sites j and i.
    ``energy_unit`` and ``hbar`` fix the conversion between normalized and
    physical time; ``config`` is ``None`` only for hand-built matrices.
    """

    entries: np.ndarray
    energy_unit: float = 1.0
    hbar: float = 1.0
    config: RingConfig | None = field(default=None, repr=False)

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ConfigurationError("entries", f"must be a square matrix, got shape {entries.shape}")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def time_unit(self) -> float:
        return 2.0 * np.pi * self.hbar / self.energy_unit

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))


@dataclass(frozen=True)
class ParityMap:
    """Site involution exchanging the gain site 1 and the sink site d.

    ``permutation[j - 1]`` is the image of site ``j`` (1-based).
    """

    permutation: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.permutation)

    def __call__(self, site: int) -> int:
        return self.permutation[site - 1]

    def matrix(self) -> np.ndarray:
        n = self.dim
        p = np.zeros((n, n))
        p[np.asarray(self.permutation) - 1, np.arange(n)] = 1.0
        return p


def bond_amplitudes(config: RingConfig) -> np.ndarray:
    """Tunneling t(i) for bonds i = 1..N (index i - 1), wrap bond last."""
    bonds = np.full(config.n_sites, config.t_outer)
    bonds[: config.sink_site - 1] = config.t_inner
    return bonds


def build_hamiltonian(config: RingConfig) -> HamiltonianMatrix:
    """Assemble the N x N matrix of H0 + V for ``config``."""
    n = config.n_sites
    bonds = bond_amplitudes(config)
    h = np.zeros((n, n), dtype=complex)
    left = np.arange(n)
    right = (left + 1) % n
    h[right, left] = -bonds
    h[left, right] = -bonds
    h[0, 0] = 1j * config.gamma
    h[config.sink_site - 1, config.sink_site - 1] = -1j * config.gamma
    return HamiltonianMatrix(h, energy_unit=config.t_max, hbar=config.hbar, config=config)


def build_parity(config: RingConfig) -> ParityMap:
    n, d = config.n_sites, config.sink_site
    return ParityMap(tuple((d - j) % n + 1 for j in range(1, n + 1)))


def check_pt_symmetry(h: HamiltonianMatrix, p: ParityMap) -> float:
    """Largest entry of ``|P conj(H) P - H|``; zero for an exactly PT-symmetric H."""
    if h.dim != p.dim:
        raise ValueError(f"dimension mismatch: H is {h.dim}x{h.dim}, parity map has {p.dim} sites")
    perm = np.asarray(p.permutation) - 1
    # P is an involution, so (P A P)[i, j] = A[perm[i], perm[j]].
    transformed = np.conj(h.entries)[np.ix_(perm, perm)]
    return float(np.max(np.abs(transformed - h.entries)))


def mirror_config(config: RingConfig) -> RingConfig:
    """Relabel sites j -> 2 - j (mod N): the sink moves to N + 2 - d and the arcs swap.

    The gain stays on site 1, so the result is again a canonical config with
    the same spectrum.
    """
    return dataclasses.replace(
        config,
        sink_site=config.n_sites + 2 - config.sink_site,
        t_inner=config.t_outer,
        t_outer=config.t_inner,
    )


def mirror_site(site: int, n_sites: int) -> int:
    """Image of ``site`` under the relabelling used by :func:`mirror_config`."""
    return (1 - site) % n_sites + 1
