"""Polyharmonic weak Maass forms for the full modular group.

Exact q-expansions of the classical weakly holomorphic basis, numerical
Maass-Poincare series through Kloosterman-Bessel Fourier expansions, Taylor
coefficient tables over the Fourier-Whittaker basis, the xi and Laplacian
operator calculus on those tables, and a verification suite exercising the
identities that tie all of it together.
"""

from .qseries import QSeries, QSeriesError
from .modforms import (
    BasisElement,
    WeightProfile,
    basis_coefficient,
    closed_form_eval,
    delta_qexp,
    divisor_sigma,
    duke_jenkins,
    e2star_qpart,
    eisenstein_qexp,
    ell_index,
    faber_poly,
    j_qexp,
)
from .special import (
    SpecialFunctionError,
    StepPolicy,
    WhittakerParams,
    bessel,
    gamma_fn,
    inc_gamma_upper,
    mplus,
    u_eval,
    whittaker_M,
    whittaker_W,
    whittaker_s_deriv,
    zeta_even,
)
from .kloosterman import LSeriesSpec, LSeriesResult, g_coeff, kloosterman_sum, l_series
from .poincare import (
    EvalPoint,
    FourierWhittakerExpansion,
    PoincareSpec,
    TruncationPolicy,
    complete_eisenstein,
    eisenstein_lattice,
    expansion_eval,
    phi_eval,
    poincare_direct,
    poincare_fourier,
    taylor_expansion,
    tilde_combination,
    weakly_holomorphic_coefficient,
)
from .operators import (
    SampledForm,
    depth_classify,
    laplacian_numeric,
    laplacian_on_expansion,
    xi_numeric,
    xi_on_expansion,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
