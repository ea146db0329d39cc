"""The verification suite behind ``verify --level quick|full``.

Each ``check_*`` function returns the targets for one group of checks, so the
acceptance tests and the CLI share a single definition of what is checked.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .. import analytic as an
from ..classify import pierced_triples, zero_pierced_bruteforce
from ..geometry import side_signs
from ..processes import SeedSpec, broken_stick_proposals, broken_stick_sample, rejection_sample_batch, sample_lines, sample_overlay
from .experiments import N_SIGMA, run_filled_experiment, run_pierced_experiment, run_t00_experiment
from .report import Target, VerificationReport
from .stats import build_histogram, gof_compare

PI = math.pi

# Decimals as printed in the source; they are truncated at 10 places.
PAPER_CONSTANTS = {
    "mean_alpha": 1.0471975511,
    "second_moment_j4": 1.8355176945,
    "cross_moment_j4": 0.7271752195,
    "p_acute_j4": 0.2169249267,
    "p_well_conditioned_j4": 0.2393922701,
    "second_moment_j2": 1.4611131303,
    "p_acute_j2": 0.3903338870,
    "cross_moment_j2": 0.9143775016,
    "intensity_pierced": 0.9399623239,
}
PAPER_P_WC_J2 = 0.4190489201
PAPER_INTENSITY_T00 = 0.6554010386
CONSTANT_TOL = 1e-9
P_WC_J2_TOL = 1e-8
T00_TOL = 1e-7
S_INTEGRAL_POINTS = (0.0, 0.5, 1.0, 2.0, 5.0)
S_INTEGRAL_TOL = 1e-9
PHI_TOL = 1e-10
PHI_LIMIT_STEP = 1e-13
DERIVATIVE_STEP = 1e-6
DERIVATIVE_RTOL = 1e-5
DERIVATIVE_POINTS = 100


def computed_constants() -> dict[str, float]:
    return {
        "mean_alpha": an.moment(4, "mean"),
        "second_moment_j4": an.moment(4, "second"),
        "cross_moment_j4": an.moment(4, "cross"),
        "p_acute_j4": an.prob_acute_closed(4),
        "p_well_conditioned_j4": an.prob_well_conditioned_closed(4),
        "second_moment_j2": an.moment(2, "second"),
        "p_acute_j2": an.prob_acute_closed(2),
        "cross_moment_j2": an.moment(2, "cross"),
        "intensity_pierced": an.intensity_pierced(),
    }


def check_constants() -> list[Target]:
    out = [Target(name, value, CONSTANT_TOL, "abs", PAPER_CONSTANTS[name])
           for name, value in computed_constants().items()]
    out.append(Target("p_well_conditioned_j2_quadrature", an.prob_min_above(2, PI / 6),
                      P_WC_J2_TOL, "abs", PAPER_P_WC_J2))
    return out


def check_intensity_t00() -> list[Target]:
    return [Target("intensity_t00_quadrature", an.intensity_t00(), T00_TOL, "abs", PAPER_INTENSITY_T00)]


def check_s_integral() -> list[Target]:
    return [
        Target(f"s_integral_{t:g}", an.s_integral(t, "closed"), S_INTEGRAL_TOL, "abs",
               an.s_integral(t, "numeric"), provenance="derived")
        for t in S_INTEGRAL_POINTS
    ]


def phi_derivative(x: float, h: float = DERIVATIVE_STEP) -> float:
    return (an.phi(x + h) - an.phi(x - h)) / (2.0 * h)


def derivative_grid(lo: float, hi: float, n: int = DERIVATIVE_POINTS) -> np.ndarray:
    # interior points, kept a little away from the ends so the stencil stays inside
    return np.linspace(lo, hi, n + 2)[1:-1]


def max_relative_residual(sign: float, which: str, lo: float, hi: float) -> float:
    """max |dphi/dx - sign * density| / |density| over the grid."""
    worst = 0.0
    for x in derivative_grid(lo, hi):
        d = an.filled_measure_density(which, float(x))
        worst = max(worst, abs(phi_derivative(float(x)) - sign * d) / abs(d))
    return worst


def check_phi() -> list[Target]:
    limit = an.phi(PI / 2 - PHI_LIMIT_STEP)
    return [
        Target("phi_limit_half_pi", limit, PHI_TOL, "abs", 2.0 * PI, provenance="derived"),
        Target("phi_limit_half_pi_printed", limit, 5e-4, "abs", 6.283),
        Target("phi_pi_over_6", an.phi(PI / 6), PHI_TOL, "abs",
               2.0 * (3.0 * an.SQRT3 * math.log(3.0) - PI), provenance="derived"),
        Target("phi_pi_over_6_printed", an.phi(PI / 6), 5e-4, "abs", 5.134),
        # phi counts {max <= x} above pi/3 (increasing) and {min > x} below (decreasing)
        Target("phi_derivative_max_branch", max_relative_residual(+1.0, "max", PI / 3, PI / 2),
               DERIVATIVE_RTOL, "max", provenance="derived"),
        Target("phi_derivative_min_branch", max_relative_residual(-1.0, "min", 0.0, PI / 3),
               DERIVATIVE_RTOL, "max", provenance="derived"),
    ]


def quick_report() -> VerificationReport:
    rep = VerificationReport("verify-quick", None, None, None)
    for group in (check_constants, check_intensity_t00, check_s_integral, check_phi):
        for t in group():
            rep.add(t)
    return rep


# ---------------------------------------------------------------------------
# Monte Carlo checks


def check_oracle_equivalence(seeds: int = 100, lambdas=(1.5, 2.0, 3.0), master_seed: int = 0) -> list[Target]:
    mismatches = 0
    for li, lam in enumerate(lambdas):
        for s in range(seeds):
            ov = sample_overlay(lam, SeedSpec(master_seed, li * seeds + s))
            fast = {tuple(map(int, r)) for r in pierced_triples(ov).triples}
            slow = {r.indices for r in zero_pierced_bruteforce(ov)}
            mismatches += fast != slow
    return [Target("pierced_oracle_mismatches", float(mismatches), 0.0, "abs", 0.0, provenance="derived")]


def equilateral_perimeter_3() -> np.ndarray:
    ang = np.array([PI / 2, PI / 2 + 2 * PI / 3, PI / 2 + 4 * PI / 3])
    r = 1.0 / math.sqrt(3.0)  # circumradius of the unit-side triangle
    return np.column_stack([r * np.cos(ang), r * np.sin(ang)])


def no_hit_fraction(realizations: int, master_seed: int = 0, lam: float = 5.0) -> float:
    """Share of line-process realizations in the disk missing a fixed perimeter-3 triangle."""
    tri = equilateral_perimeter_3()
    misses = 0
    for r in range(realizations):
        lines = sample_lines(lam, SeedSpec(master_seed, r))
        s = side_signs(tri, lines)
        misses += bool(np.all(s == s[0]))
    return misses / realizations


def check_line_calibration(realizations: int = 100_000, master_seed: int = 0) -> list[Target]:
    p = math.exp(-3.0)
    se = math.sqrt(p * (1.0 - p) / realizations)
    est = no_hit_fraction(realizations, master_seed)
    return [Target("line_no_hit_probability", est, N_SIGMA * se, "abs", p, se, "derived")]


def check_broken_stick(proposals: int = 1_000_000, samples: int = 100_000, bins: int = 30,
                       master_seed: int = 0) -> list[Target]:
    k = len(broken_stick_proposals(proposals, SeedSpec(master_seed, 0)))
    rate = k / proposals
    se = math.sqrt(0.25 * 0.75 / proposals)
    alpha = broken_stick_sample(samples, SeedSpec(master_seed, 1))[:, 0]
    h = build_histogram(alpha, bins, (0.0, PI))
    g = gof_compare(h, lambda x: an.marginal_density_numeric(3, x), vectorized=False)
    return [
        Target("broken_stick_acceptance", rate, N_SIGMA * se, "abs", 0.25, se, "derived"),
        Target("broken_stick_alpha_l1", g.l1, 0.05, "max", provenance="derived"),
    ]


def family_marginal(j: int):
    """(density, vectorized) for the alpha marginal of law j."""
    if j in an.CLOSED_FAMILY:
        return (lambda x: an.marginal_density(j, x)), True
    return (lambda x: an.marginal_density_numeric(j, x)), False


def check_rejection_sampler(draws: int = 100_000, bins: int = 30, master_seed: int = 0) -> list[Target]:
    out = []
    for j in an.FAMILY:
        alpha = rejection_sample_batch(j, draws, SeedSpec(master_seed, j))[:, 0]
        dens, vec = family_marginal(j)
        g = gof_compare(build_histogram(alpha, bins, (0.0, PI)), dens, vectorized=vec)
        out.append(Target(f"rejection_chi2_p_j{j}", g.p_value, 1e-3, "min", provenance="derived"))
    return out


def full_report(seed: int = 0, workers: int = 1) -> VerificationReport:
    rep = quick_report()
    rep.experiment = "verify-full"
    rep.seed = seed
    groups = [
        lambda: check_oracle_equivalence(master_seed=seed),
        lambda: check_line_calibration(master_seed=seed),
        lambda: run_pierced_experiment(6.0, 1000, 30, seed, workers).report.targets,
        lambda: run_t00_experiment(10.0, 500, 30, seed, 4.0, workers).report.targets,
        lambda: check_broken_stick(master_seed=seed),
        lambda: run_filled_experiment((2.0, 3.0, 4.0, 5.0), 200, 30, seed, workers).report.targets,
        lambda: check_rejection_sampler(master_seed=seed),
    ]
    t0 = time.perf_counter()
    for g in groups:
        for t in g():
            rep.add(t)
    rep.measure("runtime_seconds", time.perf_counter() - t0)
    return rep
