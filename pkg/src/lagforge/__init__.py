"""Construct and numerically verify Lagrangian immersions of complex space forms
whose second fundamental form has a distinguished direction e_1."""
from .delta import Partition, a_coefficient, classify_special_d, delta_bound_rhs
from .immersions import ImmersionChart, build, build_chn_lift, build_cpn_lift, build_flat
from .linalg import AmbientSpace, hermitian_inner, jet2, real_inner, symplectic_form
from .profile import ProfileParams, ProfileState, Trajectory, integrate
from .seeds import SeedMap, catalog_seed, certify_seed, solve_w
from .verifier import VerificationReport, VerifyConfig, run_report

__all__ = [
    "AmbientSpace", "ImmersionChart", "Partition", "ProfileParams", "ProfileState", "SeedMap",
    "Trajectory", "VerificationReport", "VerifyConfig", "a_coefficient", "build", "build_chn_lift",
    "build_cpn_lift", "build_flat", "catalog_seed", "certify_seed", "classify_special_d",
    "delta_bound_rhs", "hermitian_inner", "integrate", "jet2", "real_inner", "run_report",
    "solve_w", "symplectic_form",
]
