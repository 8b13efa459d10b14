"""Executable versions of the interferometer thought experiments.

Register conventions: kets are written in the ``lr`` frame with |L> = e0 and
|R> = e1. The probe mass is a two-level register prepared in |m> = e0, and
the gravitational field is a two-level label register prepared in |g> = e0.
Composite orderings are (mass, field) for the single-mass set-up and
(probe, mass, field) for the probe-mass set-up.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import mpmath
import numpy as np

from . import qmat
from .errors import NumericalValidationError
from .physics import (
    CODATA,
    InterferometerParams,
    PhaseValue,
    PhysicalConstants,
    branch_phases,
    delta_phi as compute_delta_phi,
    reduce_phase,
    self_energy,
)
from .qstate import (
    KET_L,
    KET_PLUS,
    KET_R,
    Basis,
    DensityOperator,
    change_basis,
    density_from_ket,
    depolarize,
    get_basis,
)
from .witness import INCOHERENT_TOL, c_l1, c_rel_ent, coherences, entanglement_entropy

AGREEMENT_TOL = 1e-10
IDENTITY_TOL = 1e-14

E0 = np.array([1.0, 0.0], dtype=np.complex128)
E1 = np.array([0.0, 1.0], dtype=np.complex128)
I2 = np.eye(2, dtype=np.complex128)

FIELD_LABELS = {
    # |g_L>, |g_R> while the branches are apart
    "orthogonal": (E0, E1),
    "parallel": (E0, E0),
}


class ClosedForm(NamedTuple):
    c_rel_ent: float
    c_l1: float


@dataclass
class ExperimentReport:
    """Result of one pipeline run.

    ``simulated`` and ``closed`` hold coherences of the final state of the
    split mass in the pm basis. Construction fails with
    :class:`NumericalValidationError` if both are present and disagree by
    more than 1e-10.
    """

    label: str
    params: dict
    delta_phi: Optional[PhaseValue] = None
    state_lr: Optional[np.ndarray] = None
    state_pm: Optional[np.ndarray] = None
    simulated: dict = field(default_factory=dict)
    closed: Optional[dict] = None
    global_phase_dropped: Optional[float] = None
    entanglement: Optional[float] = None
    seed: Optional[int] = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.closed is None:
            return
        for key, value in self.closed.items():
            if key in self.simulated and abs(self.simulated[key] - value) > AGREEMENT_TOL:
                raise NumericalValidationError(
                    f"{self.label}: simulated {key}={self.simulated[key]!r} disagrees with "
                    f"closed form {value!r}"
                )

    def to_dict(self) -> dict:
        """JSON-ready mapping."""
        out = {"label": self.label, "params": dict(self.params)}
        if self.delta_phi is not None:
            out["delta_phi"] = self.delta_phi._asdict()
        out["coherences"] = {"simulated": dict(self.simulated), "closed": dict(self.closed or {})}
        if self.entanglement is not None:
            out["entanglement"] = self.entanglement
        if self.seed is not None:
            out["seed"] = self.seed
        if self.global_phase_dropped is not None:
            out["global_phase_dropped"] = self.global_phase_dropped
        for name in ("state_lr", "state_pm"):
            M = getattr(self, name)
            if M is not None:
                out[name] = {"re": M.real.tolist(), "im": M.imag.tolist()}
        if self.extras:
            out["extras"] = self.extras
        return out


def _clip0(x: float) -> float:
    return x if x > 0.0 else 0.0


def _xlog2(a: float, b: float) -> float:
    return 0.0 if a == 0.0 or b == 0.0 else a * math.log2(b)


def closed_form_noiseless(delta_phi: float) -> ClosedForm:
    """Coherences of ``(|L> + e^{i dphi}|R>)/sqrt(2)`` in the pm basis."""
    c = math.cos(delta_phi)
    half_c = abs(math.cos(delta_phi / 2))
    half_s = abs(math.sin(delta_phi / 2))
    rel = -_xlog2(1 + c, half_c) - _xlog2(1 - c, half_s)
    return ClosedForm(_clip0(rel), abs(math.sin(delta_phi)))


def closed_form_noisy(delta_phi: float, p: float) -> ClosedForm:
    """Coherences of the depolarised output of the probe-mass set-up."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    pc = p * math.cos(delta_phi)
    rel = (_xlog2((1 - p) / 2, 1 - p) + _xlog2((1 + p) / 2, 1 + p)
           - _xlog2(0.5 + pc / 2, 1 + pc) - _xlog2(0.5 - pc / 2, 1 - pc))
    return ClosedForm(_clip0(rel), p * abs(math.sin(delta_phi)))


def closed_form_setup2(delta_phi: float, p: float = 1.0) -> ClosedForm:
    """Closed-form ``(c_rel_ent, c_l1)`` for the probe-mass output state."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 1.0:
        return closed_form_noiseless(delta_phi)
    return closed_form_noisy(delta_phi, p)


def _relabel_operator(labels_from, labels_to, n_before: int = 1) -> np.ndarray:
    """``sum_X |X><X| (x) |to_X><from_X|`` on (mass, field), padded on the left."""
    op = sum(
        qmat.kron(np.outer(x, x.conj()), np.outer(t, f.conj()))
        for x, f, t in zip((KET_L, KET_R), labels_from, labels_to)
    )
    if n_before > 1:
        op = qmat.kron(np.eye(n_before, dtype=np.complex128), op)
    return op


def _apply_map(K, rho: DensityOperator, what: str) -> DensityOperator:
    out = K @ rho.matrix @ K.conj().T
    tr = np.trace(out).real
    if abs(tr - 1.0) > 1e-12:
        raise NumericalValidationError(f"{what} lost trace: {tr!r}")
    return DensityOperator(out, rho.dims)


def _mass_state(p: float) -> DensityOperator:
    return depolarize(density_from_ket(KET_PLUS), p)


def _final_report(label, params, rho_mass, closed, **kw) -> ExperimentReport:
    pm = Basis.pm()
    simulated = coherences(rho_mass, pm)
    extras = kw.pop("extras", {})
    extras["coherences_lr"] = coherences(rho_mass, Basis.lr())
    return ExperimentReport(
        label=label,
        params=params,
        state_lr=np.array(rho_mass.matrix),
        state_pm=change_basis(rho_mass, pm),
        simulated=simulated,
        closed=None if closed is None else closed._asdict(),
        extras=extras,
        **kw,
    )


def run_single_mass(p: float = 1.0, M: float = 1.0, D: float = 1.0, tau: float = 1.0,
                    constants: PhysicalConstants = CODATA) -> ExperimentReport:
    """Mass split into two arms with no probe; the output is incoherent in pm.

    Both branches carry the same self-energy ``G M^2 / D`` and the same
    field label, so the evolution is a global phase.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    E = self_energy(M, D, constants)
    rho0 = _mass_state(p).tensor(density_from_ket(E0))

    g = FIELD_LABELS["parallel"]
    rho = _apply_map(_relabel_operator((E0, E0), g), rho0, "field labelling")
    rho = qmat.unitary_evolve(E * np.eye(4), tau, rho, constants.hbar)
    rho = _apply_map(_relabel_operator(g, (E0, E0)), rho, "recombination")
    rho1 = rho.ptrace(0)

    G, hbar = constants.G, constants.hbar
    global_phase = reduce_phase(E * tau / hbar, lambda: _exact_ratio((G, M, M, tau), (D, hbar)))
    return _final_report(
        "setup1",
        {"p": p, "M": M, "D": D, "tau": tau},
        rho1,
        ClosedForm(0.0, 0.0),
        global_phase_dropped=global_phase.mod,
    )


def _exact_ratio(num, den):
    out = mpmath.mpf(1)
    for x in num:
        out *= mpmath.mpf(x)
    for x in den:
        out /= mpmath.mpf(x)
    return out


def run_probe_mass(params: Optional[InterferometerParams] = None,
                   constants: PhysicalConstants = CODATA, *,
                   delta_phi: Optional[float] = None, p: Optional[float] = None,
                   field_labels: str = "orthogonal") -> ExperimentReport:
    """Split mass with a probe mass running alongside the L arm.

    Pass either full ``params`` or a direct relative phase ``delta_phi``
    (radians; ``p`` then defaults to 1). The branch phases are applied
    modulo 2*pi as ``H = diag(phi_L, phi_R)`` on the mass for unit time.
    """
    if params is None and delta_phi is None:
        raise ValueError("give either InterferometerParams or delta_phi")
    if params is not None:
        if p is not None and p != params.p:
            raise ValueError("p given twice with different values")
        p = params.p
        dphi = compute_delta_phi(params, constants)
        phi_l, phi_r = (v.mod for v in branch_phases(params, constants))
        pdict = params.as_dict()
    else:
        p = 1.0 if p is None else float(p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {p}")
        dphi = reduce_phase(float(delta_phi))
        phi_l, phi_r = dphi.mod, 0.0
        pdict = {"delta_phi": float(delta_phi), "p": p}
    if field_labels not in FIELD_LABELS:
        raise ValueError(f"field_labels must be one of {sorted(FIELD_LABELS)}")
    g = FIELD_LABELS[field_labels]

    probe = density_from_ket(E0)
    rho0 = probe.tensor(_mass_state(p)).tensor(density_from_ket(E0))
    rho = _apply_map(_relabel_operator((E0, E0), g, 2), rho0, "field labelling")
    H = qmat.kron_all(I2, np.diag([phi_l, phi_r]).astype(np.complex128), I2)
    rho = qmat.unitary_evolve(H, 1.0, rho)
    rho = _apply_map(_relabel_operator(g, (E0, E0), 2), rho, "recombination")
    rho_pm = rho.ptrace([0, 1])
    rho2 = rho_pm.ptrace(1)

    return _final_report(
        "setup2",
        pdict,
        rho2,
        closed_form_setup2(dphi.mod, p),
        delta_phi=dphi,
        global_phase_dropped=phi_l,
        extras={"field_labels": field_labels},
    )


def classical_identity_check(psi0=None, E: float = 1.0, tau: float = 1.0, hbar: float = 1.0,
                             bases: Sequence = ("lr", "pm")) -> dict:
    """Evolve under ``H = E * I`` and confirm nothing observable changes.

    ``psi0`` may be a ket, a density matrix or a DensityOperator (default
    |+>). Raises :class:`NumericalValidationError` if any entry moves by more
    than 1e-14 or any coherence value changes.
    """
    if psi0 is None:
        psi0 = KET_PLUS
    if isinstance(psi0, DensityOperator):
        rho0 = psi0
    else:
        arr = np.asarray(psi0, dtype=np.complex128)
        rho0 = density_from_ket(arr) if arr.ndim == 1 else DensityOperator(arr)
    n = rho0.dim
    H = E * np.eye(n, dtype=np.complex128)
    rho1 = qmat.unitary_evolve(H, tau, rho0, hbar)
    entry_delta = float(np.max(np.abs(rho1.matrix - rho0.matrix)))

    before, after, deltas = {}, {}, {}
    for b in bases:
        basis = Basis.computational(n) if b == "computational" else get_basis(b)
        name = basis.name
        before[name] = coherences(rho0, basis)
        after[name] = coherences(rho1, basis)
        deltas[name] = max(abs(after[name][k] - before[name][k]) for k in before[name])
    coherence_delta = max(deltas.values()) if deltas else 0.0
    unchanged = entry_delta <= IDENTITY_TOL and coherence_delta == 0.0
    if not unchanged:
        raise NumericalValidationError(
            f"identity evolution changed the state (entry delta {entry_delta:.3e}, "
            f"coherence delta {coherence_delta:.3e})"
        )
    return {
        "label": "classical-identity",
        "E": E,
        "tau": tau,
        "hbar": hbar,
        "global_phase": reduce_phase(E * tau / hbar).mod,
        "max_entry_delta": entry_delta,
        "coherence_before": before,
        "coherence_after": after,
        "max_coherence_delta": coherence_delta,
        "unchanged": unchanged,
    }


def diagonal_phase_check(E_L: float, E_R: float, tau: float, hbar: float = 1.0) -> dict:
    """Evolve |+> under ``E_L |L><L| + E_R |R><R|`` and report its pm coherence.

    This diagonal Hamiltonian imprints a relative phase, so it creates
    coherence unless ``(E_L - E_R) tau / hbar`` is a multiple of pi.
    """
    H = np.diag([E_L, E_R]).astype(np.complex128)
    psi = qmat.unitary_evolve(H, tau, KET_PLUS, hbar)
    rho = density_from_ket(psi)
    x = (E_L - E_R) * tau / hbar
    expected = abs(math.sin(x))
    simulated = c_l1(rho, "pm")
    if abs(simulated - expected) > 1e-12:
        raise NumericalValidationError(f"diagonal check: simulated c_l1 {simulated!r} != |sin| {expected!r}")
    return {
        "label": "classical-diagonal",
        "E_L": E_L,
        "E_R": E_R,
        "tau": tau,
        "hbar": hbar,
        "relative_phase": x,
        "c_l1": simulated,
        "c_l1_expected": expected,
        "c_rel_ent": c_rel_ent(rho, "pm"),
        "introduces_coherence": simulated > INCOHERENT_TOL,
    }


# name used by the command-line mode of the same name
eq37_check = diagonal_phase_check


BMV_DEFAULT_ENERGIES = (1.0, 1.0, 1.0, -1.0)


def bmv_hamiltonian(energies: Sequence[float] = BMV_DEFAULT_ENERGIES) -> np.ndarray:
    """Two split masses, ordered (mass 2, mass 1); ``energies = (E1, E2, E1', E2')``."""
    e1, e2, e1p, e2p = (float(e) for e in energies)
    PL = np.outer(KET_L, KET_L.conj())
    PR = np.outer(KET_R, KET_R.conj())
    return qmat.kron(PR, e1 * PR + e2 * PL) + qmat.kron(PL, e1p * PR + e2p * PL)


def bmv_state(t: float, energies: Sequence[float] = BMV_DEFAULT_ENERGIES, hbar: float = 1.0) -> np.ndarray:
    psi0 = qmat.kron_ket(KET_PLUS, KET_PLUS)
    if t == 0:
        return psi0
    return qmat.unitary_evolve(bmv_hamiltonian(energies), t, psi0, hbar)


def bmv_curve(times: Sequence[float], energies: Sequence[float] = BMV_DEFAULT_ENERGIES,
              hbar: float = 1.0) -> np.ndarray:
    """Entanglement entropy (ebits) of the evolved product state at each time."""
    return np.array([entanglement_entropy(bmv_state(t, energies, hbar), (2, 2)) for t in times])


def bmv_run(t: float = math.pi / 2, energies: Sequence[float] = BMV_DEFAULT_ENERGIES,
            hbar: float = 1.0) -> ExperimentReport:
    """Evolve the unentangled pair under the branch-conditioned Hamiltonian."""
    psi = bmv_state(t, energies, hbar)
    ent = entanglement_entropy(psi, (2, 2))
    rho12 = density_from_ket(psi, (2, 2))
    return ExperimentReport(
        label="bmv",
        params={"t": t, "energies": list(map(float, energies)), "hbar": hbar},
        state_lr=np.array(rho12.ptrace(1).matrix),
        entanglement=ent,
        extras={"entanglement_initial": entanglement_entropy(bmv_state(0.0, energies), (2, 2))},
    )
