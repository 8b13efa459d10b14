"""Position-grid model of a gravitational field acting as a classical channel.

A classical channel couples to each mass through ``H_cl = sum_j K'_j(t) x_j``
whose time integral ``K_j`` is a stochastic measurement record. Its only
effect on a wavefunction is the pointwise factor ``exp(-i K_j x_j / hbar)``.
Here the split mass is a sum of two Gaussian branches on a uniform grid; the
two-level description is recovered by projecting onto the branch modes.

Gaussians use ``exp(-(x - xbar)^2 / (2 sigma^2))`` with ``sigma`` a length.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from ._backend import get_kernels
from .physics import CODATA
from .qstate import DensityOperator

HBAR = CODATA.hbar
MIN_POINTS = 256
NORM_TOL = 1e-8
MAX_BRANCH_OVERLAP = 1e-6
REJECT_OVERLAP = 1e-3
EDGE_MARGIN_SIGMAS = 5.0
MIN_CAPTURED_WEIGHT = 1e-8

DEFAULT_SIGMA = 1e-6
DEFAULT_SEPARATION_SIGMAS = 20.0
DEFAULT_HALF_WINDOW_SIGMAS = 60.0
DEFAULT_POINTS = 4096


@dataclass(frozen=True)
class GridSpec:
    n: int
    x_min: float
    x_max: float

    def __post_init__(self):
        if self.n < MIN_POINTS:
            raise ValueError(f"grid needs at least {MIN_POINTS} points, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError("grid needs x_max > x_min")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @classmethod
    def around(cls, center: float, sigma: float, half_window_sigmas=DEFAULT_HALF_WINDOW_SIGMAS,
               n=DEFAULT_POINTS) -> "GridSpec":
        h = half_window_sigmas * sigma
        return cls(n, center - h, center + h)


def gaussian_mode(grid: GridSpec, center: float, sigma: float) -> np.ndarray:
    """Real Gaussian normalised so that ``sum |g|^2 dx = 1`` on the grid."""
    x = grid.x
    g = np.exp(-((x - center) ** 2) / (2.0 * sigma ** 2)).astype(np.complex128)
    return g / np.sqrt(np.sum(np.abs(g) ** 2) * grid.dx)


def _inner(a, b, dx) -> complex:
    return complex(np.sum(np.conj(a) * b) * dx)


@dataclass(frozen=True, eq=False)
class GridWavefunction:
    """Single-coordinate wavefunction of the split mass.

    ``centers`` are the branch centres (L, R) used to build the projection
    modes in :func:`reduced_qubit`.
    """

    grid: GridSpec
    amplitudes: np.ndarray
    sigma: float
    centers: tuple

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128)
        if a.shape != (self.grid.n,):
            raise ValueError(f"amplitudes of shape {a.shape} do not match grid of {self.grid.n} points")
        if self.sigma < 4 * self.grid.dx:
            raise ValueError(f"sigma={self.sigma:g} under-resolved by grid spacing {self.grid.dx:g}")
        norm = np.sum(np.abs(a) ** 2) * self.grid.dx
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"wavefunction norm is {norm:.12g}, expected 1")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "centers", tuple(float(c) for c in self.centers))

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def modes(self):
        return tuple(gaussian_mode(self.grid, c, self.sigma) for c in self.centers)

    def branch_overlap(self) -> float:
        mode_l, mode_r = self.modes()
        return abs(_inner(mode_l, mode_r, self.grid.dx))

    def branch_amplitudes(self):
        mode_l, mode_r = self.modes()
        dx = self.grid.dx
        return _inner(mode_l, self.amplitudes, dx), _inner(mode_r, self.amplitudes, dx)


def _check_branches(grid: GridSpec, centers: Sequence[float], sigma: float):
    margin = EDGE_MARGIN_SIGMAS * sigma
    for c in centers:
        if c - margin < grid.x_min or c + margin > grid.x_max:
            raise ValueError(f"branch centre {c:g} is closer than {EDGE_MARGIN_SIGMAS} sigma to the grid edge")
    if len(centers) == 2:
        sep = abs(centers[1] - centers[0])
        overlap = np.exp(-(sep ** 2) / (4.0 * sigma ** 2))
        if overlap > REJECT_OVERLAP:
            raise ValueError(f"branches overlap too much (<L|R> ~ {overlap:.3e})")


def make_two_branch_state(xbar2: float = -0.5 * DEFAULT_SEPARATION_SIGMAS * DEFAULT_SIGMA,
                          xbar3: float = 0.5 * DEFAULT_SEPARATION_SIGMAS * DEFAULT_SIGMA,
                          sigma: float = DEFAULT_SIGMA, grid: Optional[GridSpec] = None,
                          weights=(1.0, 1.0)) -> GridWavefunction:
    """Normalised superposition of Gaussian branches at ``xbar2`` (L) and ``xbar3`` (R).

    ``weights`` are the unnormalised branch amplitudes; ``(1, 0)`` gives a
    single Gaussian. The default grid spans 60 sigma either side of the
    midpoint with 4096 points.
    """
    if grid is None:
        grid = GridSpec.around(0.5 * (xbar2 + xbar3), sigma)
    _check_branches(grid, (xbar2, xbar3), sigma)
    mode_l = gaussian_mode(grid, xbar2, sigma)
    mode_r = gaussian_mode(grid, xbar3, sigma)
    psi = weights[0] * mode_l + weights[1] * mode_r
    psi = psi / np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
    return GridWavefunction(grid, psi, sigma, (xbar2, xbar3))


def apply_classical_phase(psi: GridWavefunction, K: float, hbar: float = HBAR) -> GridWavefunction:
    """Multiply by ``exp(-i K x / hbar)`` for an accumulated record value ``K``."""
    if K == 0:
        return psi
    factor = np.exp(-1j * (K / hbar) * psi.x)
    return GridWavefunction(psi.grid, psi.amplitudes * factor, psi.sigma, psi.centers)


def qubit_from_amplitudes(a_l: complex, a_r: complex) -> np.ndarray:
    w = abs(a_l) ** 2 + abs(a_r) ** 2
    if w < MIN_CAPTURED_WEIGHT:
        raise ValueError("branch modes capture none of the wavefunction")
    v = np.array([a_l, a_r], dtype=np.complex128)
    return np.outer(v, v.conj()) / w


def reduced_qubit(psi: GridWavefunction) -> DensityOperator:
    """Two-level {|L>, |R>} state from projections onto the branch modes.

    The projections are normalised by their total weight, so a common
    amplitude loss of both modes (e.g. from a momentum kick) drops out.
    """
    overlap = psi.branch_overlap()
    if overlap >= MAX_BRANCH_OVERLAP:
        raise ValueError(f"branch modes overlap ({overlap:.3e}); qubit description invalid")
    return DensityOperator(qubit_from_amplitudes(*psi.branch_amplitudes()))


def relative_phase(psi: GridWavefunction) -> float:
    """``arg(<L|psi> conj(<R|psi>))``."""
    a_l, a_r = psi.branch_amplitudes()
    return float(np.angle(a_l * np.conj(a_r)))


@dataclass(frozen=True)
class StochasticRecord:
    """Accumulated impulses ``(K_1, K_2)`` for one realisation of the channel.

    Drawn from Normal(0, std^2) using a stream seeded by ``(seed, run_index)``,
    so any single run can be regenerated independently.
    """

    std: float
    seed: int
    run_index: int
    values: tuple = field(default=())

    @classmethod
    def draw(cls, std: float, seed: int, run_index: int, n_coordinates: int = 2) -> "StochasticRecord":
        if std < 0:
            raise ValueError(f"record std must be non-negative, got {std}")
        rng = np.random.default_rng((int(seed), int(run_index)))
        values = tuple(float(v) for v in std * rng.standard_normal(n_coordinates))
        return cls(std, seed, run_index, values)

    @property
    def probe(self) -> float:
        return self.values[0]

    @property
    def split_mass(self) -> float:
        return self.values[1]


def draw_records(std: float, seed: int, n_runs: int) -> list:
    return [StochasticRecord.draw(std, seed, i) for i in range(n_runs)]


def ensemble_average(runs: Sequence) -> DensityOperator:
    """Mean reduced qubit over realisations.

    ``runs`` may hold GridWavefunctions (all on one grid) or already reduced
    DensityOperators.
    """
    if len(runs) == 0:
        raise ValueError("ensemble_average needs at least one run")
    mats = []
    first = runs[0]
    for r in runs:
        if isinstance(r, GridWavefunction):
            if not isinstance(first, GridWavefunction) or r.grid != first.grid:
                raise ValueError("all runs must share one grid")
            mats.append(reduced_qubit(r).matrix)
        else:
            mats.append(r.matrix if isinstance(r, DensityOperator) else np.asarray(r))
    return DensityOperator(np.mean(mats, axis=0))


class EnsembleResult(NamedTuple):
    initial: DensityOperator
    mean: DensityOperator
    offdiag: np.ndarray
    offdiag_mc_sigma: float
    first_run_relative_phase: float
    seed: int
    n_runs: int
    record_std: float


def classical_channel_ensemble(psi: GridWavefunction, record_std: float, n_runs: int,
                               seed: int = 0, hbar: float = HBAR, backend=None) -> EnsembleResult:
    """Average the split-mass qubit over ``n_runs`` stochastic records.

    Equivalent to applying :func:`apply_classical_phase` with each record's
    ``K_2`` and calling :func:`ensemble_average`, but evaluated by the
    branch-overlap kernel without materialising each wavefunction.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    records = draw_records(record_std, seed, n_runs)
    ks = np.array([r.split_mass for r in records])
    mode_l, mode_r = psi.modes()
    if abs(_inner(mode_l, mode_r, psi.grid.dx)) >= MAX_BRANCH_OVERLAP:
        raise ValueError("branch modes overlap; qubit description invalid")
    # the K=0 row gives the initial qubit through the same arithmetic as the runs
    ks = np.concatenate(([0.0], ks))
    amps = get_kernels(backend).branch_amplitudes(psi.x, psi.amplitudes, mode_l, mode_r, ks, hbar, psi.grid.dx)
    initial = DensityOperator(qubit_from_amplitudes(amps[0, 0], amps[0, 1]))
    amps = amps[1:]
    w = np.abs(amps[:, 0]) ** 2 + np.abs(amps[:, 1]) ** 2
    if np.any(w < MIN_CAPTURED_WEIGHT):
        raise ValueError("branch modes capture none of the wavefunction for some record")
    rho_ll = np.abs(amps[:, 0]) ** 2 / w
    offdiag = amps[:, 0] * np.conj(amps[:, 1]) / w
    # shifted means are exact when every run agrees (e.g. a zero record)
    ll = rho_ll[0] + np.mean(rho_ll - rho_ll[0])
    od = offdiag[0] + np.mean(offdiag - offdiag[0])
    mean = np.array([[ll, od], [np.conj(od), 1.0 - ll]])
    if n_runs > 1:
        sigma = float(np.sqrt(offdiag.real.var(ddof=1) + offdiag.imag.var(ddof=1)) / np.sqrt(n_runs))
    else:
        sigma = 0.0
    return EnsembleResult(
        initial=initial,
        mean=DensityOperator(mean),
        offdiag=offdiag,
        offdiag_mc_sigma=sigma,
        first_run_relative_phase=float(np.angle(offdiag[0])),
        seed=seed,
        n_runs=n_runs,
        record_std=record_std,
    )


def expected_offdiag_decay(record_std: float, separation: float, hbar: float = HBAR) -> float:
    """Gaussian characteristic-function factor ``exp(-s^2 sep^2 / (2 hbar^2))``."""
    theta = record_std * separation / hbar
    return float(np.exp(-0.5 * theta * theta))


@dataclass(frozen=True, eq=False)
class TwoBodyGridState:
    """Joint wavefunction ``psi(x, x')`` of the probe (x) and the split mass (x')."""

    probe_grid: GridSpec
    mass_grid: GridSpec
    amplitudes: np.ndarray
    sigma: float
    centers: tuple

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128)
        if a.shape != (self.probe_grid.n, self.mass_grid.n):
            raise ValueError("amplitudes do not match the two grids")
        norm = np.sum(np.abs(a) ** 2) * self.probe_grid.dx * self.mass_grid.dx
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"wavefunction norm is {norm:.12g}, expected 1")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)


def make_probe_and_split_state(xbar1: float, xbar2: float, xbar3: float, sigma: float = DEFAULT_SIGMA,
                               n: int = 512) -> TwoBodyGridState:
    """Product of a probe Gaussian at ``xbar1`` and a two-branch split mass."""
    probe_grid = GridSpec.around(xbar1, sigma, n=n)
    mass = make_two_branch_state(xbar2, xbar3, sigma, GridSpec.around(0.5 * (xbar2 + xbar3), sigma, n=n))
    probe = gaussian_mode(probe_grid, xbar1, sigma)
    return TwoBodyGridState(probe_grid, mass.grid, np.outer(probe, mass.amplitudes), sigma, (xbar2, xbar3))


def apply_classical_phases(state: TwoBodyGridState, K1: float, K2: float, hbar: float = HBAR) -> TwoBodyGridState:
    """Apply ``exp(-i K1 x / hbar) exp(-i K2 x' / hbar)`` pointwise on the joint grid."""
    f1 = np.exp(-1j * (K1 / hbar) * state.probe_grid.x)
    f2 = np.exp(-1j * (K2 / hbar) * state.mass_grid.x)
    return TwoBodyGridState(state.probe_grid, state.mass_grid, state.amplitudes * np.outer(f1, f2),
                            state.sigma, state.centers)


def reduced_split_qubit(state: TwoBodyGridState) -> DensityOperator:
    """Split-mass qubit after tracing out the probe coordinate.

    ``rho_XY = integral dx a_X(x) conj(a_Y(x))`` where ``a_X(x)`` is the
    projection of ``psi(x, .)`` on branch mode X.
    """
    mode_l = gaussian_mode(state.mass_grid, state.centers[0], state.sigma)
    mode_r = gaussian_mode(state.mass_grid, state.centers[1], state.sigma)
    modes = np.stack([mode_l, mode_r], axis=1)
    a = state.amplitudes @ np.conj(modes) * state.mass_grid.dx
    rho = a.T @ np.conj(a) * state.probe_grid.dx
    w = np.trace(rho).real
    if w < MIN_CAPTURED_WEIGHT:
        raise ValueError("branch modes capture none of the wavefunction")
    rho = rho / w
    return DensityOperator(0.5 * (rho + rho.conj().T))
