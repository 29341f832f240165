"""Incomplete beta function toolkit: evaluation, Turán-type determinant
coefficients, exact identity checks, proof-chain verification and a small
log-concave allocation solver."""
from .errors import ConvergenceError, DomainError, HypothesisError
from .kernels import BACKEND
from .specfun import (
    ParameterPoint,
    beta,
    digamma,
    gauss_2f1_unit,
    inc_beta,
    inc_beta_derivs,
    log_beta,
    log_gamma,
    log_inc_beta,
    trigamma,
)
from .series import (
    TruncatedSeries,
    cauchy_product,
    normalized_coeff,
    phi_oracle,
    psi_oracle,
    series_of_normalized_I,
)
from .turan import (
    SignReport,
    conjecture_scan,
    phi_k_closed,
    phi_linearization_eval,
    psi_k_closed,
    psi_linearization_eval,
    turan_bounds_a,
    turan_bounds_b,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConvergenceError",
    "DomainError",
    "HypothesisError",
    "ParameterPoint",
    "SignReport",
    "TruncatedSeries",
    "beta",
    "cauchy_product",
    "conjecture_scan",
    "digamma",
    "gauss_2f1_unit",
    "inc_beta",
    "inc_beta_derivs",
    "log_beta",
    "log_gamma",
    "log_inc_beta",
    "normalized_coeff",
    "phi_k_closed",
    "phi_linearization_eval",
    "phi_oracle",
    "psi_k_closed",
    "psi_linearization_eval",
    "psi_oracle",
    "series_of_normalized_I",
    "trigamma",
    "turan_bounds_a",
    "turan_bounds_b",
]
