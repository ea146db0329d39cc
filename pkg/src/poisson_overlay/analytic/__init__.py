"""Closed forms and quadratures for the overlay triangle laws."""

from .densities import (
    CLOSED_FAMILY,
    FAMILY,
    MEASURE_ACUTE,
    MEASURE_WELL_CONDITIONED,
    extremal_density,
    f_marginal,
    f_tilde,
    filled_measure_density,
    g_marginal,
    g_tilde,
    joint_density,
    marginal_density,
    marginal_density_numeric,
    moment,
    moment_numeric,
    normalization_constant,
    phi,
    prob_acute_closed,
    prob_max_below,
    prob_min_above,
    prob_well_conditioned_closed,
)
from .intensity import (
    AbcTriple,
    abc,
    eta,
    h_of,
    intensity_pierced,
    intensity_t00,
    q_of,
    s_integral,
    xi,
    xi_of_h,
)
from .quadrature import QuadratureError, integrate_1d, integrate_triangle
from .special import (
    CATALAN,
    LN2,
    PI,
    SQRT3,
    ZETA3,
    elliptic_E,
    elliptic_K,
    erf,
    erfc,
    erfcx,
)

__all__ = [name for name in dir() if not name.startswith("_")]
