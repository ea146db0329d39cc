"""Intensities of the 0-pierced (T.0) and 0-pierced-and-0-filled (T00) triangle processes.

Counts are of unordered vertex triples.  The values quoted for ordered triples
are six times larger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .quadrature import QuadratureError, integrate_1d
from .special import PI, SQRT3, SQRT_PI, elliptic_KE_complementary, erfcx

_H0 = 2.0 * 27.0**0.25
# ξ switches from the erfcx form to its cancellation-free asymptotic series here
_XI_SERIES_MIN_H = 14.0


@dataclass(frozen=True)
class AbcTriple:
    a: float
    b: float
    c: float


def intensity_pierced() -> float:
    """Mean number of 0-pierced triangles per unit area: 2 pi^2 / 21."""
    return 2.0 * PI**2 / 21.0


def _check_open(x: float) -> None:
    if not 0.0 < x < PI:
        raise ValueError(f"x must lie in the open interval (0, pi), got {x!r}")


def abc(x: float) -> AbcTriple:
    """a, b, c = (2/3)(cos((x + s)/3) + 1) for shifts s = 0, -2pi, +2pi.

    Written as (4/3) cos^2((x + s)/6) so that c stays accurate as x -> pi.
    """
    _check_open(x)
    return AbcTriple(
        a=4.0 / 3.0 * math.cos(x / 6.0) ** 2,
        b=4.0 / 3.0 * math.cos((x - 2.0 * PI) / 6.0) ** 2,
        c=4.0 / 3.0 * math.cos((x + 2.0 * PI) / 6.0) ** 2,
    )


def q_of(x: float) -> float:
    """Elliptic modulus sqrt(a (b - c) / (b (a - c)))."""
    t = abc(x)
    return math.sqrt(t.a * (t.b - t.c) / (t.b * (t.a - t.c)))


def _q_complement(t: AbcTriple) -> float:
    # 1 - q^2 = c (a - b) / (b (a - c)), free of the cancellation in 1 - q^2
    return math.sqrt(t.c * (t.a - t.b) / (t.b * (t.a - t.c)))


def h_of(x: float) -> float:
    """2 * 27^(1/4) / sqrt(cos(x/2))."""
    _check_open(x)
    return _H0 / math.sqrt(math.cos(0.5 * x))


def xi_of_h(h: float) -> float:
    """2(4 + h^2) - sqrt(pi)(6 + h^2) h exp(h^2/4) erfc(h/2).

    The two terms agree to O(h^-6) relative for large h; beyond
    ``_XI_SERIES_MIN_H`` the asymptotic expansion with w = 2/h^2,
        xi = -(4/w) sum_{n>=3} (s_n + 3 s_{n-1}) w^n,   s_n = (-1)^n (2n-1)!!,
    is used instead.
    """
    if h < _XI_SERIES_MIN_H:
        return 2.0 * (4.0 + h * h) - SQRT_PI * (6.0 + h * h) * h * erfcx(0.5 * h)
    w = 2.0 / (h * h)
    s_prev = -1.0  # s_1
    s_cur = 3.0  # s_2
    total = 0.0
    wn = w * w
    last = math.inf
    for n in range(3, 200):
        s_prev, s_cur = s_cur, -s_cur * (2 * n - 1)
        wn *= w
        term = (s_cur + 3.0 * s_prev) * wn
        if n > 3 and abs(term) >= abs(last):
            break  # optimal truncation of the divergent series
        total += term
        last = term
        if abs(term) < 1e-18 * abs(total):
            break
    return -4.0 / w * total


def xi(x: float) -> float:
    return xi_of_h(h_of(x))


def eta(x: float) -> float:
    """(3/c - 3/a) E(q) + (3/a - 1) K(q), modulus convention."""
    t = abc(x)
    K, E = elliptic_KE_complementary(_q_complement(t))
    return (3.0 / t.c - 3.0 / t.a) * E + (3.0 / t.a - 1.0) * K


def t00_integrand(x: float) -> float:
    t = abc(x)
    K, E = elliptic_KE_complementary(_q_complement(t))
    eta_x = (3.0 / t.c - 3.0 / t.a) * E + (3.0 / t.a - 1.0) * K
    return xi(x) * eta_x / math.sqrt(t.b * (t.a - t.c)) * math.sin(0.5 * x)


def intensity_t00(tol: float = 1e-9) -> float:
    """Mean number of triangles per unit area that are both 0-pierced and 0-filled.

    pi/(18 sqrt 3) * integral over (0, pi) of xi eta sin(x/2) / sqrt(b (a - c)).
    The integrand has a finite limit at pi (xi ~ 1/c cancels the 1/c in eta),
    so the open Gauss-Kronrod rule needs no substitution.
    """
    scale = PI / (18.0 * SQRT3)
    try:
        value, _ = integrate_1d(t00_integrand, 0.0, PI, tol / scale)
    except QuadratureError as exc:
        raise QuadratureError("i(T00) quadrature failed", scale * exc.value, scale * exc.error) from exc
    return scale * value


def s_integral(t: float, mode: str = "closed", tol: float = 1e-12) -> float:
    """Integral over s > 0 of s exp(-s - t sqrt(s)).

    ``closed`` uses (1/8)[2(4+t^2) - sqrt(pi)(6+t^2) t exp(t^2/4) erfc(t/2)];
    ``numeric`` integrates 2 u^3 exp(-u^2 - t u) over u > 0 (s = u^2).
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t!r}")
    if mode == "closed":
        return xi_of_h(t) / 8.0
    if mode == "numeric":
        value, _ = integrate_1d(lambda u: 2.0 * u**3 * math.exp(-u * u - t * u), 0.0, math.inf, tol)
        return value
    raise ValueError(f"mode must be 'closed' or 'numeric', got {mode!r}")
