"""The eleven acceptance criteria, one test (or a small group) per criterion.

Each test records a PASS/FAIL line that the terminal summary prints at the end
of the run.  Monte Carlo criteria use master seed 0.
"""

import math
import time

import numpy as np
import pytest

from poisson_overlay import analytic as an
from poisson_overlay.harness import verify
from poisson_overlay.harness.experiments import run_filled_experiment, run_pierced_experiment, run_t00_experiment

SEED = 0
PI = math.pi


def _line(targets):
    return ", ".join(f"{t.name}={t.estimate!r}{'' if t.passed else ' (FAIL)'}" for t in targets)


def _check(acceptance, criterion, targets, elapsed, budget):
    ok = all(t.passed for t in targets) and elapsed < budget
    acceptance(criterion, ok, f"{_line(targets)} [{elapsed:.2f}s < {budget:g}s]")
    failed = [t.name for t in targets if not t.passed]
    assert not failed, failed
    assert elapsed < budget


def test_criterion_01_constants(acceptance):
    t0 = time.perf_counter()
    targets = verify.check_constants()
    _check(acceptance, 1, targets, time.perf_counter() - t0, 1.0)


def test_criterion_02_intensity_t00_quadrature(acceptance):
    t0 = time.perf_counter()
    targets = verify.check_intensity_t00()
    _check(acceptance, 2, targets, time.perf_counter() - t0, 5.0)


def test_criterion_03_s_integral(acceptance):
    t0 = time.perf_counter()
    targets = verify.check_s_integral()
    _check(acceptance, 3, targets, time.perf_counter() - t0, 60.0)


def test_criterion_04_measure_endpoints(acceptance):
    limit = an.phi(PI / 2 - verify.PHI_LIMIT_STEP)
    at_pi6 = an.phi(PI / 6)
    ref6 = 2.0 * (3.0 * math.sqrt(3.0) * math.log(3.0) - PI)
    ok = abs(limit - 2 * PI) <= 1e-10 and abs(at_pi6 - ref6) <= 1e-10
    acceptance(4, ok, f"endpoints phi(pi/2-)={limit!r}, phi(pi/6)={at_pi6!r}")
    assert abs(limit - 2 * PI) <= 1e-10
    assert abs(at_pi6 - ref6) <= 1e-10


@pytest.mark.xfail(strict=True, reason="dphi/dx equals +max-measure density on (pi/3, pi/2); "
                                       "the stated minus sign holds only for the min branch")
def test_criterion_04_derivative_as_stated(acceptance):
    # Literal statement: dphi/dx = -(max-measure density) at 100 grid points, 1e-5 relative.
    worst = verify.max_relative_residual(-1.0, "max", PI / 3, PI / 2)
    acceptance(4, worst <= verify.DERIVATIVE_RTOL,
               f"dphi/dx = -max density: worst relative residual {worst:.3g} (sign-corrected law: "
               f"{verify.max_relative_residual(+1.0, 'max', PI / 3, PI / 2):.3g})")
    assert worst <= verify.DERIVATIVE_RTOL


@pytest.mark.slow
def test_criterion_05_oracle_equivalence(acceptance):
    t0 = time.perf_counter()
    targets = verify.check_oracle_equivalence(100, (1.5, 2.0, 3.0), SEED)
    _check(acceptance, 5, targets, time.perf_counter() - t0, 30.0)


@pytest.mark.slow
def test_criterion_06_line_calibration(acceptance):
    t0 = time.perf_counter()
    targets = verify.check_line_calibration(100_000, SEED)
    _check(acceptance, 6, targets, time.perf_counter() - t0, 30.0)


@pytest.mark.slow
def test_criterion_07_pierced_vs_theory(acceptance):
    t0 = time.perf_counter()
    result = run_pierced_experiment(6.0, 1000, 30, SEED)
    assert result.report.counts["triangles"] > 0
    _check(acceptance, 7, result.report.targets, time.perf_counter() - t0, 600.0)


@pytest.mark.slow
def test_criterion_08_intensities(acceptance):
    t0 = time.perf_counter()
    result = run_t00_experiment(10.0, 500, 30, SEED, inner_margin=4.0)
    targets = [t for t in result.report.targets if t.name in ("intensity_pierced", "intensity_t00")]
    for t in targets:
        assert t.tolerance == pytest.approx(max(3 * t.stderr, 0.02))
    _check(acceptance, 8, targets, time.perf_counter() - t0, 1200.0)


@pytest.mark.slow
def test_criterion_09_broken_stick(acceptance):
    t0 = time.perf_counter()
    targets = verify.check_broken_stick(1_000_000, 100_000, 30, SEED)
    _check(acceptance, 9, targets, time.perf_counter() - t0, 600.0)


@pytest.mark.slow
def test_criterion_10_filled_trend(acceptance, tmp_path):
    t0 = time.perf_counter()
    result = run_filled_experiment((2.0, 3.0, 4.0, 5.0), 200, 30, SEED)
    written = result.write(tmp_path / "filled.csv")
    assert len(written) == 12
    for h in result.histograms.values():
        assert abs(float(np.sum(h.density() * h.widths)) - 1.0) < 1e-12
    _check(acceptance, 10, result.report.targets, time.perf_counter() - t0, 1200.0)


@pytest.mark.slow
def test_criterion_11_rejection_sampler(acceptance):
    t0 = time.perf_counter()
    targets = verify.check_rejection_sampler(100_000, 30, SEED)
    _check(acceptance, 11, targets, time.perf_counter() - t0, 600.0)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
