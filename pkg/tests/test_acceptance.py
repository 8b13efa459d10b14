"""Acceptance criteria, one test each; each prints a PASS/FAIL line."""
import io
import math
import warnings

import mpmath
import numpy as np

from gravcoherence import experiments as ex
from gravcoherence import gridsim as gs
from gravcoherence.cli import main
from gravcoherence.physics import InterferometerParams, delta_phi, delta_phi_dimensionless
from gravcoherence.qmat import entropy_from_spectrum, kron, partial_trace
from gravcoherence.qstate import DensityOperator, get_basis
from gravcoherence.witness import coherences
from helpers import kron_oracle, ptrace_keep_first_oracle, ptrace_keep_second_oracle, random_density, random_matrix

PHIS = np.linspace(0.0, 2 * math.pi, 21)
PS = np.linspace(0.0, 1.0, 21)
MEASURES = ("c_l1", "c_rel_ent")


def test_01_setup1_incoherent(acceptance):
    worst = 0.0
    for p in (0.0, 0.25, 0.5, 0.75, 1.0):
        r = ex.run_single_mass(p)
        worst = max(worst, *(r.simulated[k] for k in MEASURES))
    acceptance(1, worst < 1e-12, f"setup 1 max coherence (pm) = {worst:.3e} < 1e-12")


def test_02_closed_form_equivalence(acceptance):
    worst = 0.0
    for dphi in PHIS:
        for p in PS:
            r = ex.run_probe_mass(delta_phi=float(dphi), p=float(p))
            rel, l1 = ex.closed_form_setup2(float(dphi), float(p))
            worst = max(worst, abs(r.simulated["c_rel_ent"] - rel), abs(r.simulated["c_l1"] - l1))
    acceptance(2, worst < 1e-10, f"21x21 pipeline vs closed form max |diff| = {worst:.3e} < 1e-10")


def test_03_maximal_coherence(acceptance):
    r = ex.run_probe_mass(delta_phi=math.pi / 2, p=1.0).simulated
    err = max(abs(r["c_l1"] - 1.0), abs(r["c_rel_ent"] - 1.0))
    acceptance(3, err < 1e-10, f"dphi=pi/2, p=1: c_l1={r['c_l1']!r}, c_rel_ent={r['c_rel_ent']!r}")


def test_04_strict_contrast(acceptance):
    margin = math.inf
    for p in np.round(np.arange(1, 11) / 10, 12):
        one = ex.run_single_mass(float(p)).simulated
        for dphi in (0.3, math.pi / 2, 2.5):
            two = ex.run_probe_mass(delta_phi=dphi, p=float(p)).simulated
            margin = min(margin, *(two[k] - one[k] for k in MEASURES))
    acceptance(4, margin > 1e-6, f"min (setup 2 - setup 1) coherence = {margin:.3e} > 1e-6")


def test_05_noise_monotonicity(acceptance):
    # non-decreasing up to a 1e-12 rounding floor; strictness only where the noiseless state is coherent
    worst_step, worst_gap, skipped = math.inf, math.inf, 0
    for dphi in PHIS:
        vals = {k: [ex.run_probe_mass(delta_phi=float(dphi), p=float(p)).simulated[k] for p in PS] for k in MEASURES}
        for k in MEASURES:
            worst_step = min(worst_step, float(np.min(np.diff(vals[k]))))
        if abs(math.sin(dphi)) <= 1e-9:
            skipped += 1
            continue
        for k in MEASURES:
            worst_gap = min(worst_gap, vals[k][-1] - max(vals[k][:-1]))
    ok = worst_step >= -1e-12 and worst_gap > 0
    acceptance(5, ok, f"min step in p = {worst_step:.3e}, min gap below noiseless = {worst_gap:.3e} "
                      f"({skipped} incoherent phases excluded from strictness)")


def test_06_dimensionless_identity(acceptance):
    rng = np.random.default_rng(6)
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(100):
            M, m = 10 ** rng.uniform(-15, 2, size=2)
            D = 10 ** rng.uniform(-6, 0)
            d = D * 10 ** rng.uniform(-4, 0)
            params = InterferometerParams(M, m, D, d, 10 ** rng.uniform(-3, 1))
            a = delta_phi(params).raw
            b = delta_phi_dimensionless(params).delta_phi
            worst = max(worst, abs(a - b) / abs(a))
    acceptance(6, worst <= 1e-12, f"100 draws max relative diff = {worst:.3e} <= 1e-12")


def test_07_classical_identity(acceptance):
    rng = np.random.default_rng(7)
    entry, coh = 0.0, 0.0
    for _ in range(20):
        rho = DensityOperator(random_density(2, rng))
        res = ex.classical_identity_check(rho, E=rng.normal() * 10, tau=rng.uniform(0, 10))
        entry = max(entry, res["max_entry_delta"])
        coh = max(coh, res["max_coherence_delta"])
    acceptance(7, entry <= 1e-14 and coh == 0.0, f"max entry change = {entry:.3e}, max coherence change = {coh!r}")


def test_08_diagonal_hamiltonian(acceptance):
    rng = np.random.default_rng(8)
    worst, smallest = 0.0, math.inf
    for _ in range(50):
        EL, ER = rng.normal(size=2)
        tau = rng.uniform(0.1, 5)
        res = ex.diagonal_phase_check(EL, ER, tau)
        worst = max(worst, abs(res["c_l1"] - abs(math.sin((EL - ER) * tau))))
        smallest = min(smallest, res["c_l1"])
    acceptance(8, worst < 1e-12 and smallest > 0, f"max |c_l1 - |sin|| = {worst:.3e}, min c_l1 = {smallest:.3e}")


def test_09_bmv(acceptance):
    e0 = ex.bmv_run(0.0).entanglement
    e1 = ex.bmv_run(math.pi / 2).entanglement
    acceptance(9, e0 == 0.0 and abs(e1 - 1.0) < 1e-10, f"E(0) = {e0!r}, E(pi/2) = {e1!r}")


def test_10_grid_classical_channel(acceptance):
    # (a) coupling only to the probe coordinate
    state = gs.make_probe_and_split_state(-40e-6, -10e-6, 10e-6)
    before = gs.reduced_split_qubit(state).matrix
    a_err = max(np.max(np.abs(gs.reduced_split_qubit(gs.apply_classical_phases(state, K1, 0.0)).matrix - before))
                for K1 in (1e-29, 3e-28, -2e-27))
    # (b) Gaussian record with s * separation / hbar = 1
    psi = gs.make_two_branch_state()
    sep = psi.centers[1] - psi.centers[0]
    res = gs.classical_channel_ensemble(psi, gs.HBAR / sep, 10_000, seed=0)
    b_err = abs(abs(res.mean.matrix[0, 1]) - 0.5 * math.exp(-0.5))
    # (c) no coherence creation over several (s, separation)
    c_excess = -math.inf
    for k in (12.0, 20.0, 30.0):
        p = gs.make_two_branch_state(-0.5 * k * 1e-6, 0.5 * k * 1e-6)
        for theta in (0.0, 0.25, 1.0, 4.0):
            r = gs.classical_channel_ensemble(p, theta * gs.HBAR / (k * 1e-6), 2000, seed=10)
            c_excess = max(c_excess, abs(r.mean.matrix[0, 1]) - abs(r.initial.matrix[0, 1]) - 3 * r.offdiag_mc_sigma)
    ok = a_err < 1e-12 and b_err < 0.01 and c_excess <= 0
    acceptance(10, ok, f"(a) {a_err:.3e} < 1e-12; (b) |offdiag| = {abs(res.mean.matrix[0, 1]):.5f} "
                       f"vs {0.5 * math.exp(-0.5):.5f}, diff {b_err:.2e} < 0.01; (c) max excess = {c_excess:.3e} <= 0")


def test_11_oracle_equivalence(acceptance):
    rng = np.random.default_rng(11)
    k_err = t_err = s_err = 0.0
    for _ in range(50):
        da, db = rng.integers(1, 5, size=2)
        A, B = random_matrix(int(da), rng), random_matrix(int(db), rng)
        k_err = max(k_err, np.max(np.abs(kron(A, B) - kron_oracle(A, B))))
        rho = random_density(int(da * db), rng)
        t_err = max(t_err,
                    np.max(np.abs(partial_trace(rho, (int(da), int(db)), 0) - ptrace_keep_first_oracle(rho, int(da), int(db)))),
                    np.max(np.abs(partial_trace(rho, (int(da), int(db)), 1) - ptrace_keep_second_oracle(rho, int(da), int(db)))))
        spectrum = rng.dirichlet(np.ones(int(rng.integers(2, 17))))
        with mpmath.workdps(50):
            oracle = -mpmath.fsum(mpmath.mpf(float(x)) * mpmath.log(mpmath.mpf(float(x)), 2) for x in spectrum if x > 0)
        s_err = max(s_err, abs(entropy_from_spectrum(spectrum) - float(oracle)))
    ok = k_err < 1e-13 and t_err < 1e-13 and s_err < 1e-11
    acceptance(11, ok, f"kron {k_err:.2e}, partial trace {t_err:.2e} (< 1e-13); entropy {s_err:.2e} (< 1e-11)")


def test_12_cli_determinism(acceptance, tmp_path):
    argv = ["sweep", "--var", "delta_phi", "--from", "0", "--to", "6.283185307179586", "--steps", "41", "--p", "0.8"]
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    codes = [main(argv + ["--out", str(p)], out=io.StringIO()) for p in paths]
    same = paths[0].read_bytes() == paths[1].read_bytes()
    acceptance(12, codes == [0, 0] and same, f"two sweeps byte-identical: {same} ({len(paths[0].read_bytes())} bytes)")
