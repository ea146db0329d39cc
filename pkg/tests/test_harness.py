import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poisson_overlay import analytic as an
from poisson_overlay.harness import experiments as ex
from poisson_overlay.harness import report as rp
from poisson_overlay.harness import stats
from poisson_overlay.processes import SeedSpec, rejection_sample_batch

PI = math.pi


def f4(x):
    return an.marginal_density(4, x)


def test_histogram_half_open_bins():
    h = stats.build_histogram([0.1, 0.2, 0.3], 3, (0.0, 0.3))
    assert h.counts == (0, 1, 1)
    assert h.overflow == 1
    h = stats.build_histogram([0.0, 0.05, 0.15, 0.25], 3, (0.0, 0.3))
    assert h.counts == (2, 1, 1) and h.overflow == 0


def test_histogram_errors():
    with pytest.raises(ValueError):
        stats.build_histogram([], 3, (0, 1))
    with pytest.raises(ValueError):
        stats.build_histogram([0.5], 0, (0, 1))
    with pytest.raises(ValueError):
        stats.build_histogram([0.5], 3, (1, 0))
    with pytest.raises(ValueError):
        stats.Histogram((0.0, 1.0), (1, 2))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1, 4, allow_nan=False), min_size=1, max_size=300), st.integers(1, 40))
def test_histogram_properties(samples, bins):
    h = stats.build_histogram(samples, bins, (0.0, PI))
    assert h.total + h.overflow == len(samples)
    if h.total:
        assert abs(float(np.sum(h.density() * h.widths)) - 1.0) < 1e-12
    perm = list(reversed(samples))
    assert stats.build_histogram(perm, bins, (0.0, PI)) == h


def test_normalized_view():
    h = stats.build_histogram(np.linspace(0.01, 0.99, 50), 5, (0, 1))
    assert h.normalized().mode == "density"
    assert np.allclose(h.normalized().values(), 1.0)
    assert np.allclose(h.values(), 10.0)


def test_merge_sparse_bins():
    assert stats.merge_sparse_bins(np.array([1, 2, 3, 10, 1, 1])) == [[0, 1, 2], [3, 4, 5]]
    assert stats.merge_sparse_bins(np.array([1.0, 1.0])) == [[0, 1]]
    assert stats.merge_sparse_bins(np.array([6.0, 7.0])) == [[0], [1]]


def test_gof_self_consistency_l1_zero():
    rng = np.random.default_rng(0)
    h = stats.build_histogram(rng.random(1000) * PI, 30, (0.0, PI))
    g = stats.gof_compare(h, stats.piecewise_constant_density(h))
    assert g.l1 < 1e-12
    assert g.chi2 < 1e-12
    assert g.p_value == pytest.approx(1.0)


def test_gof_rejects_unnormalized_density():
    h = stats.build_histogram([0.5, 1.0, 2.0], 3, (0.0, PI))
    with pytest.raises(ValueError):
        stats.gof_compare(h, lambda x: np.full_like(x, 0.5))


def test_gof_discriminates_j4_from_j2():
    a = rejection_sample_batch(4, 100_000, SeedSpec(8, 4))[:, 0]
    h = stats.build_histogram(a, 30, (0.0, PI))
    assert stats.gof_compare(h, f4).p_value > 1e-3
    assert stats.gof_compare(h, lambda x: an.marginal_density(2, x)).p_value < 1e-6


@pytest.mark.slow
def test_gof_calibration_over_replications():
    # samples drawn from the density itself: p > 0.001 in at least 99 of 100 replications
    passes = 0
    for rep in range(100):
        a = rejection_sample_batch(4, 100_000, SeedSpec(1000 + rep, 4))[:, 0]
        passes += stats.gof_compare(stats.build_histogram(a, 30, (0.0, PI)), f4).p_value > 1e-3
    assert passes >= 99


def test_design_effect_is_one_for_independent_singletons():
    rng = np.random.default_rng(5)
    clusters = [rng.random(1) * PI for _ in range(4000)]
    h = stats.build_histogram(np.concatenate(clusters), 10, (0.0, PI))
    g = stats.gof_compare(h, lambda x: np.full_like(x, 1 / PI),
                          cluster_counts=stats.cluster_bin_counts(clusters, h))
    assert 0.9 < g.design_effect < 1.1


def test_design_effect_detects_duplication():
    # every value repeated 4 times within its cluster: design effect near 4
    rng = np.random.default_rng(6)
    clusters = [np.repeat(rng.random(1) * PI, 4) for _ in range(4000)]
    h = stats.build_histogram(np.concatenate(clusters), 10, (0.0, PI))
    cc = stats.cluster_bin_counts(clusters, h)
    g = stats.gof_compare(h, lambda x: np.full_like(x, 1 / PI), cluster_counts=cc)
    assert 3.5 < g.design_effect < 4.5
    assert g.p_value == pytest.approx(stats.gof_p_value(g.chi2, g.dof, g.design_effect))
    with pytest.raises(ValueError):
        stats.gof_compare(h, lambda x: np.full_like(x, 1 / PI), cluster_counts=cc[:10])


def test_clustered_mean():
    m, se, n = stats.clustered_mean([np.array([1.0, 1.0]), np.array([3.0])])
    assert m == pytest.approx(5 / 3) and n == 3 and se > 0
    m, se, n = stats.clustered_mean([np.array([2.0])])
    assert m == 2.0 and math.isnan(se)
    assert stats.clustered_mean([np.array([])])[2] == 0


def test_csv_round_trip():
    h = stats.build_histogram(np.random.default_rng(1).random(5000) * PI, 17, (0.0, PI))
    text = stats.histogram_to_csv(h, f4)
    assert text.splitlines()[0] == ",".join(stats.HEADER)
    assert "\r" not in text
    assert stats.histogram_from_csv(text) == h
    blank = stats.histogram_to_csv(h)
    assert blank.splitlines()[1].endswith(",")
    with pytest.raises(ValueError):
        stats.histogram_from_csv("a,b\n1,2\n")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 3.14, allow_nan=False), min_size=1, max_size=100), st.integers(1, 20))
def test_csv_round_trip_property(samples, bins):
    h = stats.build_histogram(samples, bins, (0.0, PI))
    assert stats.histogram_from_csv(stats.histogram_to_csv(h)) == h


# ---------------------------------------------------------------------------
# reports


def test_target_rules():
    assert rp.Target("a", 1.0, 0.1, "abs", 1.05).passed
    assert not rp.Target("a", 1.0, 0.01, "abs", 1.05).passed
    assert rp.Target("p", 0.01, 1e-3, "min").passed
    assert rp.Target("d", 0.01, 0.05, "max").passed
    assert not rp.Target("t", 0.0, 1.0, "true").passed
    assert not rp.Target("n", math.nan, 1.0, "max").passed
    with pytest.raises(ValueError):
        rp.Target("a", 1.0, 0.1, "abs")
    with pytest.raises(ValueError):
        rp.Target("a", 1.0, 0.1, "sometimes", 1.0)


def test_report_json_recheck():
    r = rp.VerificationReport("x", 2.0, 10, 3)
    r.add(rp.Target("a", 1.0, 0.1, "abs", 1.05, 0.03))
    r.add(rp.Target("b", 0.0005, 1e-3, "min", provenance="derived"))
    r.measure("m", math.inf)
    d = json.loads(r.to_json())
    assert set(d) >= {"experiment", "lambda", "trials", "seed", "targets"}
    assert set(d["targets"][0]) >= {"name", "paper_value", "estimate", "stderr", "tolerance", "pass"}
    assert d["targets"][1]["pass"] is False and d["pass"] is False
    assert d["measurements"][0]["estimate"] is None
    assert rp.recheck(d)
    d["targets"][1]["pass"] = True
    assert not rp.recheck(d)


# ---------------------------------------------------------------------------
# experiments (small sizes; the full sizes live in the acceptance tests)


def test_pierced_experiment_small_is_deterministic():
    a = ex.run_pierced_experiment(4.0, 40, 20, seed=9)
    b = ex.run_pierced_experiment(4.0, 40, 20, seed=9, workers=2)
    assert a.report.to_json() == b.report.to_json()
    assert set(a.histograms) == {"alpha", "max", "min"}
    names = [t.name for t in a.report.targets]
    assert names == ["chi2_p_alpha", "chi2_p_max", "chi2_p_min", "p_acute", "p_well_conditioned",
                     "mean_alpha", "second_moment", "cross_moment"]


def test_pierced_experiment_guards():
    with pytest.raises(ValueError):
        ex.run_pierced_experiment(1.5, 10)
    with pytest.raises(ValueError):
        ex.run_pierced_experiment(4.0, 1)


def test_empty_data_flag(monkeypatch):
    monkeypatch.setattr(ex, "_pierced_trial", lambda trial, lam, seed: np.zeros((0, 3)))
    r = ex.run_pierced_experiment(3.0, 3, 10, 0)
    assert r.report.empty_data and not r.report.passed
    assert r.histograms == {}


def test_filled_experiment_small(tmp_path):
    r = ex.run_filled_experiment((2.0, 3.0), 20, 15, seed=1)
    for key, h in r.histograms.items():
        assert abs(float(np.sum(h.density() * h.widths)) - 1.0) < 1e-12
    assert {t.name for t in r.report.targets} == {"p_acute_decreasing", "p_well_conditioned_decreasing"}
    paths = r.write(tmp_path / "f.csv", tmp_path / "f.json")
    assert (tmp_path / "f_lam2_alpha.csv").exists()
    assert len(paths) == 7
    text = (tmp_path / "f_lam3_min.csv").read_text()
    assert text.splitlines()[1].endswith(",")  # no analytic overlay for 0-filled


def test_filled_experiment_refuses_over_cap():
    from poisson_overlay.classify import FilledCapExceeded

    with pytest.raises(FilledCapExceeded):
        ex.run_filled_experiment((3.0,), 3, 10, 0, filled_cap=5)


def test_t00_experiment_small(tmp_path):
    r = ex.run_t00_experiment(6.0, 20, 15, seed=2, inner_margin=2.0)
    names = [t.name for t in r.report.targets]
    assert names[:3] == ["intensity_t00", "intensity_pierced", "t00_subset_of_pierced"]
    assert r.report.targets[2].passed
    r.write(tmp_path / "t.csv", tmp_path / "t.json")
    rows = (tmp_path / "t_alpha.csv").read_text().splitlines()
    assert all(row.endswith(",") for row in rows[1:])
    with pytest.raises(ValueError):
        ex.run_t00_experiment(3.0, 20, inner_margin=4.0)
