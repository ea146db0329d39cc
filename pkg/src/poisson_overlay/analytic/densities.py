"""Angle laws of the triangle family  C_j sin x sin y sin(x+y) / (sin x + sin y + sin(x+y))^j.

j = 4 is the 0-pierced triangle of the Poisson overlay, j = 3 the broken-stick
triangle, j = 1 the Goudsmit-Miles triangular cell; j = 2 has no known
generating mechanism.  Marginals have closed forms for j in {2, 4} only.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .quadrature import integrate_1d
from .special import CATALAN, LN2, PI, SQRT3, ZETA3

FAMILY = (1, 2, 3, 4)
CLOSED_FAMILY = (2, 4)

_C2 = 1.0 / ((-2.0 + 3.0 * LN2) * PI)


def _check_j(j: int, allowed=FAMILY) -> None:
    if j not in allowed:
        raise ValueError(f"family index j must be one of {allowed}, got {j!r}")


def normalization_constant(j: int) -> float:
    _check_j(j)
    return {
        1: 4.0 / (12.0 - PI**2),
        2: _C2,
        3: 8.0,
        4: 42.0 / PI,
    }[j]


def joint_density(j: int, x, y):
    """Joint density of two angles (alpha, beta); zero off the open simplex."""
    _check_j(j)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    inside = (x > 0) & (y > 0) & (x + y < PI)
    sx, sy, sxy = np.sin(x), np.sin(y), np.sin(x + y)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = normalization_constant(j) * sx * sy * sxy / (sx + sy + sxy) ** j
    out = np.where(inside, val, 0.0)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# closed-form marginals


def _f_series_coefficients(n_terms: int = 80) -> np.ndarray:
    # f = (21/2pi)/16 * N(u)/u^4 with N(u) = 24u - 20u^2 + 4(6-2u)(1-u) ln(1-u);
    # the u^1..u^3 coefficients of N cancel, leaving N_n = -4(6/n - 8/(n-1) + 2/(n-2))
    n = np.arange(4, 4 + n_terms, dtype=float)
    return -4.0 * (6.0 / n - 8.0 / (n - 1.0) + 2.0 / (n - 2.0))


_F_SERIES = _f_series_coefficients()
_F_SERIES_U_MAX = 0.35
_F_PREFACTOR = 21.0 / (2.0 * PI)


def f_marginal(x):
    """Marginal density of one angle of a 0-pierced triangle (j = 4).

    Evaluated in u = cos^2(x/2); near x = pi the closed form loses every digit
    to cancellation, so small u switches to the power series in u.
    """
    x = np.asarray(x, dtype=float)
    u = np.cos(0.5 * x) ** 2
    w = np.sin(0.5 * x) ** 2
    small = u < _F_SERIES_U_MAX
    with np.errstate(divide="ignore", invalid="ignore"):
        num = 24.0 * u - 20.0 * u * u + 4.0 * (6.0 - 2.0 * u) * w * np.log(w)
        direct = num / (16.0 * u**4)
    series = np.polynomial.polynomial.polyval(np.where(small, u, 0.0), _F_SERIES) / 16.0
    out = _F_PREFACTOR * np.where(small, series, direct)
    return out[()] if out.ndim == 0 else out


def f_tilde(x):
    x = np.asarray(x, dtype=float)
    c = np.cos(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        num = (7.0 - 4.0 * c) * (1.0 - 2.0 * c) - 4.0 * (5.0 - c) * (1.0 - c) * np.log(2.0 * np.sin(0.5 * x))
    out = _F_PREFACTOR * num / (1.0 + c) ** 4
    return out[()] if out.ndim == 0 else out


# In e = pi - x the bracket of g over (1 + cos x) loses two orders to
# cancellation; below _G_SERIES_E_MAX use its Taylor series (even powers of e).
_G_SERIES = np.array([
    0.0, 1.0 / 12.0, -1.0 / 360.0, -29.0 / 120960.0, -17.0 / 1209600.0,
    -733.0 / 958003200.0, -110599.0 / 2615348736000.0, -20651.0 / 8369115955200.0,
])
_G_SERIES_E_MAX = 0.1


def g_marginal(x):
    """Marginal density of one angle under the j = 2 law."""
    x = np.asarray(x, dtype=float)
    c = np.cos(x)
    e = PI - x
    small = e < _G_SERIES_E_MAX
    with np.errstate(divide="ignore", invalid="ignore"):
        num = (PI - x) * np.sin(x) + 4.0 * (1.0 - c) * np.log(np.sin(0.5 * x))
        direct = num / (1.0 + c)
    series = np.polynomial.polynomial.polyval(np.where(small, e * e, 0.0), _G_SERIES)
    out = 0.5 * _C2 * np.where(small, series, direct)
    return out[()] if out.ndim == 0 else out


def g_tilde(x):
    x = np.asarray(x, dtype=float)
    c = np.cos(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        num = (3.0 * x - PI) * np.sin(x) - 4.0 * (1.0 - c) * np.log(2.0 * np.sin(0.5 * x))
        out = 0.5 * _C2 * num / (1.0 + c)
    return out[()] if out.ndim == 0 else out


_MARGINAL = {4: f_marginal, 2: g_marginal}
_TILDE = {4: f_tilde, 2: g_tilde}


def marginal_density(j: int, x):
    """Closed-form density of a single angle; only j = 2 and j = 4 have one."""
    if j not in CLOSED_FAMILY:
        raise ValueError(
            f"no closed-form marginal for j={j!r}; use marginal_density_numeric"
        )
    return _MARGINAL[j](x)


def marginal_density_numeric(j: int, x: float, tol: float = 1e-10) -> float:
    """Marginal density by integrating the joint density over the second angle."""
    _check_j(j)
    if not 0.0 < x < PI:
        return 0.0
    val, _ = integrate_1d(lambda y: joint_density(j, x, y), 0.0, PI - x, tol, vectorized=True)
    return val


def extremal_density(j: int, which: str, x):
    """Density of the largest (``"max"``) or smallest (``"min"``) angle.

    max: 3 f~ on (pi/3, pi/2), 3 f on (pi/2, pi);  min: -3 f~ on (0, pi/3);
    zero outside the support.  ``f`` stands for the j-specific marginal.
    """
    _check_j(j, CLOSED_FAMILY)
    x = np.asarray(x, dtype=float)
    tilde = _TILDE[j]
    if which == "max":
        with np.errstate(divide="ignore", invalid="ignore"):
            low = 3.0 * tilde(np.clip(x, PI / 3, PI / 2))
            high = 3.0 * _MARGINAL[j](np.clip(x, PI / 2, PI))
        out = np.where(x < PI / 2, low, high)
        out = np.where((x > PI / 3) & (x < PI), out, 0.0)
    elif which == "min":
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -3.0 * tilde(np.clip(x, 1e-300, PI / 3))
        out = np.where((x > 0) & (x < PI / 3), out, 0.0)
    else:
        raise ValueError(f"which must be 'max' or 'min', got {which!r}")
    return out[()] if out.ndim == 0 else out


def prob_max_below(j: int, t: float, tol: float = 1e-12) -> float:
    """P(largest angle < t) by quadrature of the max-angle density."""
    _check_j(j, CLOSED_FAMILY)
    if not PI / 3 < t <= PI:
        raise ValueError(f"t must lie in (pi/3, pi], got {t!r}")
    val, _ = integrate_1d(lambda x: extremal_density(j, "max", x), PI / 3, t, tol,
                          vectorized=True, breakpoints=(PI / 2,))
    return val


def prob_min_above(j: int, t: float, tol: float = 1e-12) -> float:
    """P(smallest angle > t) by quadrature of the min-angle density."""
    _check_j(j, CLOSED_FAMILY)
    if not 0.0 <= t < PI / 3:
        raise ValueError(f"t must lie in [0, pi/3), got {t!r}")
    val, _ = integrate_1d(lambda x: extremal_density(j, "min", x), t, PI / 3, tol, vectorized=True)
    return val


# ---------------------------------------------------------------------------
# closed forms for probabilities and moments


def prob_acute_closed(j: int) -> float:
    _check_j(j, CLOSED_FAMILY)
    if j == 4:
        return (96.0 - 132.0 * LN2 - PI) / (2.0 * PI)
    return (-24.0 * LN2 + (4.0 - 3.0 * LN2) * PI + 12.0 * CATALAN) / (4.0 * (-2.0 + 3.0 * LN2) * PI)


def prob_well_conditioned_closed(j: int) -> float:
    """Exact P(min angle > pi/6); only the j = 4 expression is known in closed form."""
    if j != 4:
        raise ValueError("closed form known only for j = 4; use prob_min_above")
    s3 = SQRT3
    d = 71.0 + 41.0 * s3
    num = (
        -3144.0 + 1584.0 * s3
        + (-2190.0 + 1338.0 * s3) * LN2
        + (4380.0 - 2676.0 * s3) * math.log(-1.0 + s3)
        + d * PI
    )
    return num / (2.0 * d * PI)


def moment(j: int, kind: str) -> float:
    """E(alpha), E(alpha^2) or E(alpha beta) in closed form (j in {2, 4}).

    The cross moment follows from Var(alpha + beta + gamma) = 0 and
    exchangeability:  E(ab) = (3/2)(pi/3)^2 - E(a^2)/2 = pi^2/6 - E(a^2)/2.
    """
    _check_j(j, CLOSED_FAMILY)
    if kind == "mean":
        return PI / 3.0
    if j == 4:
        second = 13.0 / 10.0 - 2.0 * LN2 + 4.0 * LN2**2
        cross = -13.0 / 20.0 + LN2 - 2.0 * LN2**2 + PI**2 / 6.0
    else:
        den = -2.0 + 3.0 * LN2
        second = (4.0 * (PI**2 - 12.0 * LN2) * LN2 - 3.0 * ZETA3) / (6.0 * den)
        cross = (2.0 * (PI**2 + 24.0 * LN2) * LN2 - 4.0 * PI**2 + 3.0 * ZETA3) / (12.0 * den)
    if kind == "second":
        return second
    if kind == "cross":
        return cross
    raise ValueError(f"kind must be 'mean', 'second' or 'cross', got {kind!r}")


@lru_cache(maxsize=None)
def moment_numeric(j: int, kind: str, tol: float = 1e-9) -> float:
    """Moments by quadrature of the (numeric) marginal; works for every j."""
    _check_j(j)
    if j in CLOSED_FAMILY:
        def dens(x):
            return marginal_density(j, x)
        vec = True
    else:
        def dens(x):
            return marginal_density_numeric(j, x)
        vec = False
    if kind == "mean":
        val, _ = integrate_1d(lambda x: x * dens(x), 0.0, PI, tol, vectorized=vec)
        return val
    second, _ = integrate_1d(lambda x: x * x * dens(x), 0.0, PI, tol, vectorized=vec)
    if kind == "second":
        return second
    if kind == "cross":
        return PI**2 / 6.0 - 0.5 * second
    raise ValueError(f"kind must be 'mean', 'second' or 'cross', got {kind!r}")


# ---------------------------------------------------------------------------
# 0-filled triangles: non-normalizable measure


def filled_measure_density(which: str, x: float) -> float:
    """Measure density of the max or min angle of a 0-filled triangle.

    max: -12 csc^2(x) ln(2 cos x) on [pi/3, pi/2), +inf on [pi/2, pi);
    min: 12 csc^2(x) ln(2 cos x) on (0, pi/3).
    """
    if which == "max":
        if not PI / 3 <= x < PI:
            raise ValueError(f"max-angle measure is supported on [pi/3, pi), got {x!r}")
        if x >= PI / 2:
            return math.inf
        return -12.0 * math.log(2.0 * math.cos(x)) / math.sin(x) ** 2
    if which == "min":
        if not 0.0 < x < PI / 3:
            raise ValueError(f"min-angle measure is supported on (0, pi/3), got {x!r}")
        return 12.0 * math.log(2.0 * math.cos(x)) / math.sin(x) ** 2
    raise ValueError(f"which must be 'max' or 'min', got {which!r}")


def phi(x: float) -> float:
    """4 (3x - pi + 3 cot(x) ln(2 cos x)) on (0, pi/2], with the limit 2 pi at pi/2.

    On (pi/3, pi/2) it is the measure of {max angle <= x}; on (0, pi/3) it is
    the measure of {min angle > x}.
    """
    if not 0.0 < x <= PI / 2:
        raise ValueError(f"phi is defined on (0, pi/2], got {x!r}")
    if x == PI / 2:
        return 2.0 * PI
    return 4.0 * (3.0 * x - PI + 3.0 * math.log(2.0 * math.cos(x)) / math.tan(x))


MEASURE_ACUTE = 2.0 * PI
MEASURE_WELL_CONDITIONED = 2.0 * (3.0 * SQRT3 * math.log(3.0) - PI)
