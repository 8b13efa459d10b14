import math
import warnings

import numpy as np
import pytest

from gravcoherence import experiments as ex
from gravcoherence.errors import NumericalValidationError
from gravcoherence.physics import InterferometerParams, delta_phi, tau_for_target_phase
from gravcoherence.qstate import KET_MINUS, KET_PLUS, DensityOperator
from gravcoherence.witness import c_l1, entanglement_entropy
from helpers import random_density


class TestSingleMass:
    def test_pure_input_stays_plus(self):
        r = ex.run_single_mass(1.0)
        assert np.max(np.abs(r.state_pm - np.diag([1, 0]))) < 1e-15
        assert r.simulated["c_l1"] < 1e-12 and r.simulated["c_rel_ent"] < 1e-12

    def test_fully_depolarised(self):
        r = ex.run_single_mass(0.0)
        assert np.max(np.abs(r.state_lr - np.eye(2) / 2)) < 1e-15
        assert r.simulated["c_l1"] == 0.0

    def test_p_03_populations(self):
        r = ex.run_single_mass(0.3)
        assert np.max(np.abs(r.state_pm - np.diag([0.65, 0.35]))) < 1e-15
        assert r.simulated["c_rel_ent"] < 1e-12

    def test_global_phase_recorded(self):
        r = ex.run_single_mass(1.0, M=1.0, D=1.0, tau=1.0)
        assert 0.0 <= r.global_phase_dropped < 2 * math.pi

    def test_lr_coherence_nonzero(self):
        assert ex.run_single_mass(1.0).extras["coherences_lr"]["c_l1"] == pytest.approx(1.0, abs=1e-12)

    def test_invalid_p(self):
        with pytest.raises(ValueError):
            ex.run_single_mass(-0.1)


class TestClosedForm:
    def test_quarter_turn(self):
        rel, l1 = ex.closed_form_setup2(math.pi / 2, 1.0)
        assert rel == pytest.approx(1.0, abs=1e-15) and l1 == 1.0

    def test_half_turn(self):
        rel, l1 = ex.closed_form_setup2(math.pi, 1.0)
        assert rel == 0.0 and l1 < 1e-15

    @pytest.mark.parametrize("dphi", np.linspace(-7, 13, 41))
    def test_noiseless_is_p1_specialisation(self, dphi):
        a = ex.closed_form_noiseless(dphi)
        b = ex.closed_form_noisy(dphi, 1.0)
        assert abs(a.c_rel_ent - b.c_rel_ent) < 1e-12
        assert abs(a.c_l1 - b.c_l1) < 1e-12

    def test_pipeline_oracle(self):
        r = ex.run_probe_mass(delta_phi=0.7, p=0.6)
        rel, l1 = ex.closed_form_setup2(0.7, 0.6)
        assert abs(r.simulated["c_rel_ent"] - rel) < 1e-10
        assert abs(r.simulated["c_l1"] - l1) < 1e-10

    def test_range(self):
        with pytest.raises(ValueError):
            ex.closed_form_setup2(1.0, 1.5)


class TestProbeMass:
    def test_maximal(self):
        r = ex.run_probe_mass(delta_phi=math.pi / 2)
        assert r.simulated["c_l1"] == pytest.approx(1.0, abs=1e-12)

    def test_no_phase_is_setup1(self):
        r = ex.run_probe_mass(delta_phi=0.0)
        assert r.simulated["c_l1"] < 1e-15
        assert np.max(np.abs(r.state_pm - ex.run_single_mass(1.0).state_pm)) < 1e-15

    def test_noisy_values(self):
        r = ex.run_probe_mass(delta_phi=math.pi / 2, p=0.5)
        assert r.simulated["c_l1"] == pytest.approx(0.5, abs=1e-12)
        assert r.simulated["c_rel_ent"] == pytest.approx(0.1887218755, abs=1e-9)

    @pytest.mark.parametrize("dphi,p", [(0.4, 1.0), (2.2, 0.7), (5.5, 0.1)])
    def test_matrix_elements(self, dphi, p):
        M = ex.run_probe_mass(delta_phi=dphi, p=p).state_pm
        expected = np.array([[0.5 + 0.5 * p * math.cos(dphi), 0.5j * p * math.sin(dphi)],
                             [-0.5j * p * math.sin(dphi), 0.5 - 0.5 * p * math.cos(dphi)]])
        assert np.max(np.abs(M - expected)) < 1e-12

    @pytest.mark.parametrize("dphi,p", [(0.4, 1.0), (2.2, 0.7), (5.5, 0.1)])
    def test_field_label_choice_irrelevant(self, dphi, p):
        a = ex.run_probe_mass(delta_phi=dphi, p=p, field_labels="orthogonal")
        b = ex.run_probe_mass(delta_phi=dphi, p=p, field_labels="parallel")
        assert np.max(np.abs(a.state_lr - b.state_lr)) < 1e-15

    def test_physical_params(self):
        tau = tau_for_target_phase(math.pi / 2, 1e-12, 1e-12, 1e-3, 1e-5)
        params = InterferometerParams(1e-12, 1e-12, 1e-3, 1e-5, tau, p=0.8)
        r = ex.run_probe_mass(params)
        assert r.delta_phi.mod == pytest.approx(math.pi / 2, abs=1e-12)
        assert r.simulated["c_l1"] == pytest.approx(0.8, abs=1e-10)
        assert r.params["M"] == 1e-12

    def test_huge_phase_uses_reduced_value(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            params = InterferometerParams(1.0, 1.0, 1.0, 1.0, 1.0)
        r = ex.run_probe_mass(params)
        dphi = delta_phi(params).mod
        assert r.simulated["c_l1"] == pytest.approx(abs(math.sin(dphi)), abs=1e-10)

    def test_lr_coherence_nonzero(self):
        r = ex.run_probe_mass(delta_phi=1.0)
        assert r.extras["coherences_lr"]["c_l1"] == pytest.approx(1.0, abs=1e-12)

    def test_argument_errors(self):
        with pytest.raises(ValueError):
            ex.run_probe_mass()
        with pytest.raises(ValueError):
            ex.run_probe_mass(delta_phi=1.0, p=2.0)
        with pytest.raises(ValueError):
            ex.run_probe_mass(delta_phi=1.0, field_labels="tilted")


class TestContrast:
    @pytest.mark.parametrize("p", [0.2, 0.6, 1.0])
    @pytest.mark.parametrize("dphi", [0.3, 1.9, 4.0])
    def test_probe_beats_single_mass(self, p, dphi):
        two = ex.run_probe_mass(delta_phi=dphi, p=p).simulated
        one = ex.run_single_mass(p).simulated
        assert two["c_l1"] > one["c_l1"] and two["c_rel_ent"] > one["c_rel_ent"]

    @pytest.mark.parametrize("dphi", [0.3, 1.9, 4.0])
    def test_noisy_below_noiseless(self, dphi):
        clean = ex.run_probe_mass(delta_phi=dphi).simulated
        for p in (0.0, 0.5, 0.99):
            noisy = ex.run_probe_mass(delta_phi=dphi, p=p).simulated
            assert noisy["c_l1"] < clean["c_l1"] and noisy["c_rel_ent"] < clean["c_rel_ent"]


class TestReport:
    def test_disagreement_raises(self):
        with pytest.raises(NumericalValidationError):
            ex.ExperimentReport("x", {}, simulated={"c_l1": 0.5}, closed={"c_l1": 0.6})

    def test_json_shape(self):
        d = ex.run_probe_mass(delta_phi=1.0, p=0.5).to_dict()
        assert set(d) >= {"label", "params", "delta_phi", "coherences"}
        assert set(d["delta_phi"]) == {"raw", "mod", "reduction_err"}
        assert set(d["coherences"]) == {"simulated", "closed"}


class TestClassicalIdentity:
    def test_plus_stays_incoherent(self):
        res = ex.classical_identity_check(KET_PLUS, E=3.3e-20, tau=2.0, hbar=1.054571817e-34)
        assert res["coherence_after"]["pm"]["c_l1"] == 0.0
        assert res["max_entry_delta"] == 0.0

    def test_maximally_mixed(self):
        res = ex.classical_identity_check(np.eye(2) / 2, E=5.0, tau=1.0)
        assert res["unchanged"]

    def test_random_states(self, rng):
        for n in (2, 3, 4):
            rho = DensityOperator(random_density(n, rng))
            res = ex.classical_identity_check(rho, E=rng.normal() * 1e3, tau=rng.uniform(0, 10),
                                              bases=("computational",))
            assert res["max_entry_delta"] <= 1e-14
            assert res["max_coherence_delta"] == 0.0


class TestDiagonalHamiltonian:
    def test_equal_energies(self):
        assert ex.diagonal_phase_check(2.0, 2.0, 1.0)["c_l1"] < 1e-15

    def test_quarter_turn(self):
        res = ex.diagonal_phase_check(1.0, 0.0, math.pi / 2)
        assert res["c_l1"] == pytest.approx(1.0, abs=1e-12)
        assert res["introduces_coherence"]

    def test_half_turn_gives_minus(self):
        res = ex.diagonal_phase_check(1.0, 0.0, math.pi)
        assert res["c_l1"] < 1e-12
        assert not res["introduces_coherence"]

    def test_generic(self, rng):
        for _ in range(20):
            EL, ER, tau = rng.normal(size=3)
            res = ex.diagonal_phase_check(EL, ER, tau)
            assert abs(res["c_l1"] - abs(math.sin((EL - ER) * tau))) < 1e-12


class TestBMV:
    def test_initially_unentangled(self):
        assert ex.bmv_run(0.0).entanglement == 0.0

    def test_quarter_turn_maximal(self):
        assert ex.bmv_run(math.pi / 2).entanglement == pytest.approx(1.0, abs=1e-10)

    def test_analytic_state(self):
        psi = ex.bmv_state(math.pi / 2)
        # hand evolution: -i|R2>|+1> + i|L2>|-1>, over sqrt(2); ordering (mass 2, mass 1)
        target = (-1j * np.kron([0, 1], KET_PLUS) + 1j * np.kron([1, 0], KET_MINUS)) / np.sqrt(2)
        assert np.max(np.abs(psi - target)) < 1e-12

    def test_equal_energies_never_entangle(self):
        times = np.linspace(0, 10, 23)
        assert np.max(ex.bmv_curve(times, (0.7, 0.7, 0.7, 0.7))) < 1e-12

    def test_curve_against_analytic(self):
        # mass-1 states in the two mass-2 branches overlap by cos t -> S = h((1 + |cos t|) / 2)
        times = np.linspace(0.05, 3.0, 13)
        curve = ex.bmv_curve(times)
        for t, s in zip(times, curve):
            q = 0.5 * (1 + abs(math.cos(t)))
            h = -(q * math.log2(q) + (1 - q) * math.log2(1 - q)) if 0 < q < 1 else 0.0
            assert abs(s - h) < 1e-10
            assert abs(s - entanglement_entropy(ex.bmv_state(t), (2, 2))) == 0.0
