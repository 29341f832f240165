"""Active kernel backend (numba loops or numpy), chosen by ``BETA_TURAN_JIT``."""
from ._accel import USE_JIT

if USE_JIT:
    from . import _kernels_jit as backend
else:
    from . import _kernels_np as backend

BACKEND = "numba" if USE_JIT else "numpy"

digamma = backend.digamma
trigamma = backend.trigamma
unit_hyp_sum = backend.unit_hyp_sum
inc_beta_series_derivs = backend.inc_beta_series_derivs
convolve_trunc = backend.convolve_trunc
wright_diff = backend.wright_diff
wright_diff_compensated = backend.wright_diff_compensated

__all__ = [
    "BACKEND",
    "convolve_trunc",
    "digamma",
    "inc_beta_series_derivs",
    "trigamma",
    "unit_hyp_sum",
    "wright_diff",
    "wright_diff_compensated",
]
