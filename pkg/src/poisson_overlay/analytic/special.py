"""Special functions and constants used by the closed forms.

Elliptic integrals use the *modulus* convention: ``K(k)`` integrates
``1/sqrt(1 - k**2 sin(t)**2)``.  Passing the parameter ``m = k**2`` instead is
the classic silent mistake, so every public function here takes the modulus.
"""

from __future__ import annotations

import math

PI = math.pi
LN2 = math.log(2.0)
SQRT3 = math.sqrt(3.0)
SQRT_PI = math.sqrt(math.pi)
ZETA3 = 1.2020569031595942853997381615114499907649862923405  # Apery's constant
CATALAN = 0.91596559417721901505460351493238411077414937428167


def zeta3_series(terms: int = 20000) -> float:
    """Apery's constant from the defining series, with an Euler-Maclaurin tail."""
    n = terms
    s = math.fsum(1.0 / (k * k * k) for k in range(1, n))
    # tail sum_{k>=n} k^-3
    tail = 1.0 / (2 * n * n) + 1.0 / (2 * n**3) + 1.0 / (4 * n**4) - 1.0 / (12 * n**6)
    return s + tail


def catalan_series(terms: int = 20000) -> float:
    """Catalan's constant from the alternating series sum (-1)^k / (2k+1)^2.

    Averaging consecutive partial sums cancels the leading oscillating error.
    """
    partial = 0.0
    prev = 0.0
    for k in range(terms + 1):
        prev = partial
        partial += (-1.0) ** k / (2 * k + 1) ** 2
    return 0.5 * (partial + prev)


# ---------------------------------------------------------------------------
# error function family

_CF_MAX_ITER = 20000
_SERIES_SWITCH = 1.0


def _erf_series(z: float) -> float:
    # erf(z) = 2/sqrt(pi) exp(-z^2) sum 2^n z^(2n+1) / (2n+1)!!  (all terms positive)
    term = z
    total = z
    n = 0
    z2 = z * z
    while term > 1e-17 * total:
        n += 1
        term *= 2.0 * z2 / (2 * n + 1)
        total += term
    return 2.0 / SQRT_PI * math.exp(-z2) * total


def _erfcx_cf(z: float) -> float:
    """exp(z^2) erfc(z) for z >= 1 by modified Lentz on the Laplace fraction.

    sqrt(pi) erfcx(z) = 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    """
    tiny = 1e-300
    f = z
    c = z
    d = 0.0
    for n in range(1, _CF_MAX_ITER):
        an = 0.5 * n
        d = z + an * d
        d = tiny if d == 0.0 else d
        c = z + an / c
        c = tiny if c == 0.0 else c
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise ArithmeticError(f"erfcx continued fraction did not converge at z={z}")
    return 1.0 / (SQRT_PI * f)


def erfcx(z: float) -> float:
    """Scaled complementary error function exp(z^2) * erfc(z)."""
    if math.isnan(z):
        return math.nan
    if z < 0.0:
        return 2.0 * math.exp(z * z) - erfcx(-z)
    if math.isinf(z):
        return 0.0
    if z < _SERIES_SWITCH:
        return math.exp(z * z) * (1.0 - _erf_series(z))
    return _erfcx_cf(z)


def erfc(z: float) -> float:
    """Complementary error function, relative accuracy ~1e-15 for z >= 0."""
    if z < 0.0:
        return 2.0 - erfc(-z)
    if z < _SERIES_SWITCH:
        return 1.0 - _erf_series(z)
    if z > 27.3:
        return 0.0
    return math.exp(-z * z) * _erfcx_cf(z)


def erf(z: float) -> float:
    if z < 0.0:
        return -erf(-z)
    if z < _SERIES_SWITCH:
        return _erf_series(z)
    return 1.0 - erfc(z)


# ---------------------------------------------------------------------------
# complete elliptic integrals (modulus convention)


def _agm_KE(k: float, kp: float) -> tuple[float, float]:
    """K and E from the arithmetic-geometric mean of (1, kp).

    ``kp`` is the complementary modulus sqrt(1 - k^2); passing it separately
    keeps full relative precision when k is close to 1.
    """
    a, b = 1.0, kp
    c2_sum = 0.5 * k * k  # 2^(n-1) c_n^2 at n = 0
    power = 0.5
    for _ in range(64):
        if abs(a - b) <= 4e-16 * a:
            break
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        power *= 2.0
        c2_sum += power * c * c
    K = PI / (2.0 * a)
    return K, K * (1.0 - c2_sum)


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind, K(k), modulus ``k``."""
    k = abs(k)
    if k > 1.0:
        raise ValueError(f"modulus must satisfy |k| <= 1, got {k}")
    if k == 1.0:
        raise ValueError("K(k) diverges at k = 1")
    return _agm_KE(k, math.sqrt((1.0 - k) * (1.0 + k)))[0]


def elliptic_E(k: float) -> float:
    """Complete elliptic integral of the second kind, E(k), modulus ``k``."""
    k = abs(k)
    if k > 1.0:
        raise ValueError(f"modulus must satisfy |k| <= 1, got {k}")
    if k == 1.0:
        return 1.0
    return _agm_KE(k, math.sqrt((1.0 - k) * (1.0 + k)))[1]


def elliptic_KE_complementary(kp: float) -> tuple[float, float]:
    """(K(k), E(k)) given only the complementary modulus kp = sqrt(1 - k^2)."""
    if not 0.0 < kp <= 1.0:
        raise ValueError(f"complementary modulus must lie in (0, 1], got {kp}")
    k = math.sqrt((1.0 - kp) * (1.0 + kp))
    return _agm_KE(k, kp)
