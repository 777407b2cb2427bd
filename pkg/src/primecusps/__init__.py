"""Computational analytic number theory around prime exponential sums.

Exact enveloping-sieve weights and their Ramanujan-sum expansion, FFT
spectra of prime subsets, detection and structure checks of the cusps
where |T*(alpha)| is large, numerically verified large-sieve
inequalities, and the Bohr-set transference decomposition of the prime
indicator into a sieve-dense part plus a spectrally small part.
"""

from .arith import (
    CapacityError,
    FareyPoint,
    PrimeContext,
    WeightedPoint,
    build_context,
    circle_distance,
    extract_well_spaced,
    farey_points,
)
from .gfunctions import (
    G_CONSTANT,
    explicit_estimate_report,
    g_bracket,
    g_sifted,
    g_value,
    xi_value,
)
from .sieve import (
    SieveParams,
    SieveWeights,
    alpha_local,
    beta_array,
    beta_direct,
    beta_fourier,
    beta_fourier_many,
    beta_mean_value,
    build_weights,
    hardy_partial,
    wq_bound_report,
)
from .expsums import (
    IntervalPolynomial,
    PrimeSubset,
    SpectrumGrid,
    exp_sum_at,
    local_model_full,
    local_model_sqrt2,
    spectrum,
    subset_full,
    subset_random,
    subset_sqrt2,
    vaaler_coeffs,
)
from .cusps import (
    CuspArc,
    CuspReport,
    companion_search,
    find_cusps,
    large_sieve_check,
    dilated_large_sieve_check,
    rational_shift_check,
    structure_check,
)
from .transference import (
    BohrSet,
    Cover,
    Decomposition,
    bohr_sum,
    build_bohr,
    build_cover,
    cusp_suppression_report,
    decompose,
    rho,
    transform_checks,
)
from .report import CheckRow, all_clean
from .verify import run_suite, suite_passed

__version__ = "0.1.0"

__all__ = [
    "BohrSet", "CapacityError", "CheckRow", "Cover", "CuspArc", "CuspReport",
    "Decomposition", "FareyPoint", "G_CONSTANT", "IntervalPolynomial",
    "PrimeContext", "PrimeSubset", "SieveParams", "SieveWeights",
    "SpectrumGrid", "WeightedPoint", "all_clean", "alpha_local", "beta_array",
    "beta_direct", "beta_fourier", "beta_fourier_many", "beta_mean_value",
    "bohr_sum", "build_bohr", "build_context", "build_cover", "build_weights",
    "circle_distance", "companion_search", "cusp_suppression_report",
    "decompose", "exp_sum_at", "explicit_estimate_report",
    "extract_well_spaced", "farey_points", "find_cusps", "g_bracket",
    "g_sifted", "g_value", "hardy_partial", "large_sieve_check",
    "local_model_full", "local_model_sqrt2", "dilated_large_sieve_check",
    "rational_shift_check", "rho", "run_suite", "spectrum",
    "structure_check", "subset_full", "subset_random", "subset_sqrt2",
    "suite_passed", "transform_checks", "vaaler_coeffs", "wq_bound_report",
    "xi_value",
]
