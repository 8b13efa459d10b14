"""Gravitational energies and phases for the two interferometer set-ups.

All inputs are SI. Phases for macroscopic parameters are astronomically
large, so :func:`delta_phi` also reduces them modulo 2*pi with mpmath at a
working precision that scales with the size of the argument.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import NamedTuple

import mpmath

TWO_PI = 2.0 * math.pi
# Relative error budget for a phase assembled from double-precision inputs
# (five roundings in G*M*m*tau*D / (hbar*d*(d+D)) plus representation error).
PHASE_REL_ERR = 8 * 2.0 ** -53


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values of G [m^3 kg^-1 s^-2], hbar [J s] and c [m s^-1]."""

    G: float = 6.67430e-11
    hbar: float = 1.054571817e-34
    c: float = 2.99792458e8

    def __post_init__(self):
        for name in ("G", "hbar", "c"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"physical constant {name} must be positive and finite, got {value}")

    @property
    def planck_mass(self) -> float:
        return math.sqrt(self.hbar * self.c / self.G)


CODATA = PhysicalConstants()


def _require_positive(**values):
    for name, value in values.items():
        if not (value > 0 and math.isfinite(value)):
            raise ValueError(f"{name} must be positive and finite, got {value}")


@dataclass(frozen=True)
class InterferometerParams:
    """Geometry and masses of the probe-mass interferometer.

    M is the split mass, m the probe running alongside the L arm at distance
    d, D the arm separation and tau the transit time. ``p`` is the
    depolarising parameter of the initial state. ``d_prime`` (length of the
    non-parallel part of the arms) is carried for documentation only and
    never enters a formula.
    """

    M: float
    m: float
    D: float
    d: float
    tau: float
    p: float = 1.0
    d_prime: float = 0.0

    def __post_init__(self):
        _require_positive(M=self.M, m=self.m, D=self.D, d=self.d, tau=self.tau)
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.d >= self.D / 10:
            warnings.warn(
                f"probe distance d={self.d:g} m is not small compared with D={self.D:g} m; "
                "formulas still apply but the geometry is outside the intended regime",
                stacklevel=3,
            )

    def as_dict(self) -> dict:
        return asdict(self)


class PhaseValue(NamedTuple):
    raw: float
    mod: float
    reduction_err: float


class DimensionlessPhase(NamedTuple):
    delta_phi: float
    alpha: float
    planck_mass: float


def _digits(x: float) -> int:
    x = abs(x)
    return max(0, int(math.log10(x)) + 1) if x > 0 else 0


def reduce_phase(raw: float, exact=None) -> PhaseValue:
    """Reduce a phase modulo 2*pi.

    ``exact`` is an optional zero-argument callable that rebuilds the phase
    from its (exactly representable) float inputs with mpmath numbers; it is
    evaluated at a working precision of 30 digits beyond the integer part of
    ``raw``. Without it ``raw`` itself is reduced. ``reduction_err`` is the
    absolute uncertainty of the reduced value implied by double-precision
    inputs, so a value above pi means the reduced phase carries no
    information.
    """
    with mpmath.workdps(30 + _digits(raw)):
        value = exact() if exact is not None else mpmath.mpf(raw)
        mod = float(mpmath.fmod(value, 2 * mpmath.pi))
    if mod < 0:
        mod += TWO_PI
    if mod >= TWO_PI:
        mod = 0.0
    return PhaseValue(raw, mod, abs(raw) * PHASE_REL_ERR)


def _mp(*xs):
    return [mpmath.mpf(x) for x in xs]


def self_energy(M: float, D: float, constants: PhysicalConstants = CODATA) -> float:
    """Mutual potential energy ``G M^2 / D`` of the two branches of one mass."""
    _require_positive(M=M, D=D)
    return constants.G * M * M / D


def probe_energies(params: InterferometerParams, constants: PhysicalConstants = CODATA):
    """Energies ``(E_L, E_R) = (G M m / d, G M m / (d + D))`` from the probe."""
    gmm = constants.G * params.M * params.m
    return gmm / params.d, gmm / (params.d + params.D)


def phase(E: float, tau: float, constants: PhysicalConstants = CODATA) -> float:
    """Dynamical phase ``E tau / hbar``."""
    return E * tau / constants.hbar


def branch_phases(params: InterferometerParams, constants: PhysicalConstants = CODATA):
    """Branch phases ``(phi_L, phi_R)`` as :class:`PhaseValue` records.

    The reduced values are consistent with :func:`delta_phi`: their
    difference equals its reduced value modulo 2*pi.
    """
    G, hbar = constants.G, constants.hbar
    M, m, d, D, tau = params.M, params.m, params.d, params.D, params.tau
    gmmt = G * M * m * tau / hbar

    def exact_l():
        g, M_, m_, t, h, d_ = _mp(G, M, m, tau, hbar, d)
        return g * M_ * m_ * t / (h * d_)

    def exact_r():
        g, M_, m_, t, h, d_, D_ = _mp(G, M, m, tau, hbar, d, D)
        return g * M_ * m_ * t / (h * (d_ + D_))

    return reduce_phase(gmmt / d, exact_l), reduce_phase(gmmt / (d + D), exact_r)


def delta_phi(params: InterferometerParams, constants: PhysicalConstants = CODATA) -> PhaseValue:
    """Relative phase ``G M m tau D / (hbar d (d + D))`` accumulated by the L arm."""
    G, hbar = constants.G, constants.hbar
    M, m, d, D, tau = params.M, params.m, params.d, params.D, params.tau
    raw = G * M * m * tau * D / (hbar * d * (d + D))

    def exact():
        g, M_, m_, t, h, d_, D_ = _mp(G, M, m, tau, hbar, d, D)
        return g * M_ * m_ * t * D_ / (h * d_ * (d_ + D_))

    return reduce_phase(raw, exact)


def delta_phi_dimensionless(params: InterferometerParams,
                            constants: PhysicalConstants = CODATA) -> DimensionlessPhase:
    """Same phase through ``alpha M m / m_P^2`` with ``alpha = tau D c / (d (d + D))``."""
    alpha = params.tau * params.D * constants.c / (params.d * (params.d + params.D))
    mp = constants.planck_mass
    return DimensionlessPhase(alpha * params.M * params.m / (mp * mp), alpha, mp)


def tau_for_target_phase(target: float, M: float, m: float, D: float, d: float,
                         constants: PhysicalConstants = CODATA) -> float:
    """Transit time giving a relative phase of ``target`` radians."""
    _require_positive(target=target, M=M, m=m, D=D, d=d)
    return target * constants.hbar * d * (d + D) / (constants.G * M * m * D)


def coupling_constant(m1: float, m2: float, d: float, constants: PhysicalConstants = CODATA) -> float:
    """Harmonic coupling ``K = 2 G m1 m2 / d^3`` between two suspended masses."""
    _require_positive(m1=m1, m2=m2, d=d)
    return 2.0 * constants.G * m1 * m2 / d ** 3
