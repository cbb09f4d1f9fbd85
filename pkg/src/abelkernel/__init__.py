"""Abel-summed kernels and measures on the circle.

Tools for checking numerically whether a measure mu belongs to M(K_C), the set
of measures for which a positive coefficient matrix C reproduces its kernel
through weak boundary functions in L^2(mu).
"""

__version__ = "0.1.0"

from .abel import (
    AbelBatch,
    AbelResult,
    Analysis,
    RuleMatrix,
    SGrid,
    Synthesis,
    abel_limit,
    abel_pairing,
    analysis_limit,
    synthesis_limit,
)
from .boundary import BoundaryError, BoundaryFunction, boundary_function, boundary_limit, weak_limit_check
from .coeff import (
    CoeffMatrix,
    Dense,
    Diagonal,
    DiscCombination,
    Identity,
    RankOne,
    rank_one_from_coeffs,
    synthesized_function,
)
from .kernel import kernel_eval, positive_matrix_check, szego_kernel
from .measures import (
    IFS,
    Atomic,
    Density,
    DiscretizedMeasure,
    Lebesgue,
    MuFunction,
    discretize,
    fourier_coefficient,
    fourier_coefficients,
    inner_product_mu,
)
from .moment import MomentMatrix, bessel_growth, moment_matrix
from .verify import (
    DiscSampleSet,
    Verdict,
    adjoint_check,
    cmc_bounded_check,
    membership_test,
    reproduction_check,
    swapping_check,
)
