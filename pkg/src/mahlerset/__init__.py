"""Mahler measures of Laurent polynomials and the closed sets they generate.

Modules:

* :mod:`~mahlerset.laurent` -- sparse Laurent polynomials, monomial substitution
* :mod:`~mahlerset.lattice` -- Hermite and saturated Hermite normal forms
* :mod:`~mahlerset.measure_uni` -- one-variable measures by root finding
* :mod:`~mahlerset.measure_multi` -- Lawton, Jensen and quasi-Monte Carlo estimators
* :mod:`~mahlerset.spectrum` -- finite samples of the measure set M(F)
* :mod:`~mahlerset.cli` -- the ``mahlerset`` command
"""

from .laurent import (
    LaurentPoly,
    Polytope,
    PolySyntaxError,
    ZeroPolynomialError,
    coefficient_bounds,
    evaluate,
    exponent_polytope,
    length,
    mul,
    parse_poly,
    substitute,
)
from .lattice import (
    HnfResult,
    IntMatrix,
    NotFound,
    ShnfResult,
    check_shnf_gcd_condition,
    enumerate_shnf,
    hnf,
    is_saturated,
    lawton_vector,
    q_value,
    shnf,
    smith_invariants,
)
from .measure_multi import (
    ConvergenceTrace,
    LawtonSchedule,
    MeasureConfig,
    jensen_2d,
    lawton_estimate,
    measure,
    measure_of_family_member,
    qmc_estimate,
)
from .measure_uni import MeasureResult, UniPoly, measure_uni, roots, zero_certificate
from .spectrum import (
    SignedPartition,
    SpectrumSample,
    embed_in_linear_form,
    lehmer_element,
    linear_form_F_n,
    max_element,
    mb_generators,
    sample_measure_set,
)

__all__ = [
    "LaurentPoly",
    "Polytope",
    "PolySyntaxError",
    "ZeroPolynomialError",
    "coefficient_bounds",
    "evaluate",
    "exponent_polytope",
    "length",
    "mul",
    "parse_poly",
    "substitute",
    "HnfResult",
    "IntMatrix",
    "NotFound",
    "ShnfResult",
    "check_shnf_gcd_condition",
    "enumerate_shnf",
    "hnf",
    "is_saturated",
    "lawton_vector",
    "q_value",
    "shnf",
    "smith_invariants",
    "ConvergenceTrace",
    "LawtonSchedule",
    "MeasureConfig",
    "jensen_2d",
    "lawton_estimate",
    "measure",
    "measure_of_family_member",
    "qmc_estimate",
    "SignedPartition",
    "SpectrumSample",
    "embed_in_linear_form",
    "lehmer_element",
    "linear_form_F_n",
    "max_element",
    "mb_generators",
    "sample_measure_set",
    "MeasureResult",
    "UniPoly",
    "measure_uni",
    "roots",
    "zero_certificate",
]

__version__ = "0.1.0"
