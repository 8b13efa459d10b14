"""Exact density-operator simulation of gravity-induced coherence in interferometers."""
from ._backend import BACKEND
from .errors import (
    DimensionError,
    GravCoherenceError,
    InvalidStateError,
    NotHermitianError,
    NumericalValidationError,
)
from .experiments import (
    ExperimentReport,
    bmv_run,
    classical_identity_check,
    closed_form_setup2,
    diagonal_phase_check,
    eq37_check,
    run_probe_mass,
    run_single_mass,
)
from .physics import CODATA, InterferometerParams, PhysicalConstants, delta_phi
from .qstate import Basis, DensityOperator, density_from_ket
from .witness import c_l1, c_rel_ent, entanglement_entropy

__version__ = "0.1.0"
