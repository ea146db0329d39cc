import itertools
import math

import numpy as np
import pytest

from poisson_overlay import classify as cl
from poisson_overlay.processes import Overlay, SeedSpec, sample_overlay


def overlay(points, lines=()):
    return Overlay(10.0, np.asarray(points, dtype=float).reshape(-1, 2),
                   np.asarray(lines, dtype=float).reshape(-1, 2))


def as_set(records):
    return {r.indices if hasattr(r, "indices") else tuple(r) for r in records}


def test_signatures_trivial_cases():
    ov = overlay([[0, 0], [1, 1], [2, 0]])
    assert cl.signatures(ov).shape == (3, 0)
    ov = overlay([[-1, 0], [1, 0]], [[0.0, 0.0]])  # the y axis
    s = cl.signatures(ov)
    assert s[0, 0] != s[1, 0]


def test_signatures_follow_point_permutation():
    ov = sample_overlay(3.0, SeedSpec(4))
    perm = np.random.default_rng(0).permutation(ov.n_points)
    assert np.array_equal(cl.signatures(ov.with_points(ov.points[perm])), cl.signatures(ov)[perm])


def test_no_lines_gives_every_triple():
    pts = np.random.default_rng(1).normal(size=(7, 2))
    recs = cl.zero_pierced_triangles(overlay(pts))
    assert as_set(recs) == set(itertools.combinations(range(7), 3))
    assert as_set(cl.zero_pierced_bruteforce(overlay(pts))) == as_set(recs)


def test_two_two_split_has_no_triangles():
    ov = overlay([[-1, 0], [-1, 1], [1, 0], [1, 1]], [[0.0, 0.0]])
    assert cl.zero_pierced_triangles(ov) == []


def test_line_through_triangle_removes_it():
    ov = overlay([[0, 0], [2, 0], [1, 2]], [[1.0, 0.0]])  # x = 1 cuts the triangle
    assert cl.zero_pierced_triangles(ov) == []
    assert cl.zero_pierced_bruteforce(ov) == []


def test_degenerate_triples_are_dropped():
    ov = overlay([[0, 0], [1, 1], [2, 2], [0, 1]])
    en = cl.pierced_triples(ov)
    assert en.n_degenerate == 1
    assert (0, 1, 2) not in as_set(en.triples)


def test_records_are_consistent():
    ov = sample_overlay(2.5, SeedSpec(8))
    for r in cl.zero_pierced_triangles(ov):
        assert r.i < r.j < r.k
        assert r.pierced_free
        assert abs(sum(r.angles.as_tuple()) - math.pi) < 1e-12
        assert r.filled_free == cl.is_zero_filled(ov, r)


def test_is_zero_filled_cases():
    tri = [[0, 0], [3, 0], [0, 3]]
    assert cl.is_zero_filled(overlay(tri), (0, 1, 2))
    assert not cl.is_zero_filled(overlay(tri + [[1, 1]]), (0, 1, 2))
    assert cl.is_zero_filled(overlay(tri + [[10, 10]]), (0, 1, 2))


@pytest.mark.parametrize("lam", [1.5, 2.0, 3.0])
def test_fast_pierced_equals_bruteforce(lam):
    for s in range(20):
        ov = sample_overlay(lam, SeedSpec(77, s))
        assert as_set(cl.zero_pierced_triangles(ov)) == as_set(cl.zero_pierced_bruteforce(ov))


@pytest.mark.parametrize("seed", range(10))
def test_fast_filled_equals_quartic_oracle(seed):
    ov = sample_overlay(2.0, SeedSpec(31, seed))
    fast = as_set(cl.filled_triples(ov).triples)
    assert fast == as_set(cl.zero_filled_bruteforce(ov))


def test_classify_all_relations():
    ov = sample_overlay(2.5, SeedSpec(12))
    out = cl.classify_all(ov, {"pierced", "filled", "t00"})
    assert as_set(out["t00"]) <= as_set(out["pierced"])
    assert as_set(out["t00"]) == as_set(out["pierced"]) & as_set(out["filled"])
    no_lines = ov.with_lines(np.zeros((0, 2)))
    out = cl.classify_all(no_lines, {"filled", "t00"})
    assert as_set(out["t00"]) == as_set(out["filled"])


def test_filled_cap_refuses():
    ov = sample_overlay(3.0, SeedSpec(0))
    with pytest.raises(cl.FilledCapExceeded) as info:
        cl.classify_all(ov, {"filled"}, filled_cap=5)
    assert info.value.n == ov.n_points
    with pytest.raises(ValueError):
        cl.classify_all(ov, {"bogus"})


def test_estimate_intensity_arguments():
    with pytest.raises(ValueError):
        cl.estimate_intensity("pierced", 3.0, inner_margin=4.0)
    with pytest.raises(ValueError):
        cl.estimate_intensity("filled", 10.0)
    est, se = cl.estimate_intensity("pierced", 6.0, 2.0, trials=1, seed=1)
    assert est >= 0 and math.isnan(se)


def test_estimate_intensity_independent_of_workers():
    a = cl.estimate_intensity("t00", 6.0, 2.0, trials=6, seed=3, workers=1)
    b = cl.estimate_intensity("t00", 6.0, 2.0, trials=6, seed=3, workers=2)
    assert a == b
