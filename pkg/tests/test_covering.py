import math

import numpy as np
import pytest

from spiralvis import (
    BudgetExceededError,
    covering_radius,
    direction_batch,
    direction_window,
    uniform_covering_parameter,
    uniform_orchard_criterion,
    visibility_from_covering,
)

GOLDEN_100_RADIUS = 0.04132959128021163  # exact gap scan, first 100 terms


def circle_points(angles):
    a = np.asarray(angles, dtype=np.float64)
    return np.column_stack([np.cos(a), np.sin(a)])


def test_covering_radius_examples():
    four = circle_points([0, math.pi / 2, math.pi, 3 * math.pi / 2])
    got = covering_radius(four, d=1)
    assert got.exact
    assert got.resolution == 0.0
    assert got.value == pytest.approx(math.pi / 4)
    single = covering_radius(circle_points([1.3]), d=1)
    assert single.value == pytest.approx(math.pi)


def test_covering_radius_golden_100(golden):
    pts = direction_batch(golden, np.arange(1, 101, dtype=np.int64))
    got = covering_radius(pts, d=1)
    assert got.value == pytest.approx(GOLDEN_100_RADIUS, abs=1e-12)


def test_covering_radius_invariances():
    rng = np.random.default_rng(0)
    angles = rng.uniform(0, 2 * math.pi, 40)
    pts = circle_points(angles)
    base = covering_radius(pts, d=1).value
    perm = covering_radius(pts[rng.permutation(40)], d=1).value
    assert perm == pytest.approx(base, abs=1e-15)
    rot = rng.uniform(0, 2 * math.pi)
    R = np.array([[math.cos(rot), -math.sin(rot)], [math.sin(rot), math.cos(rot)]])
    rotated = covering_radius(pts @ R.T, d=1).value
    assert rotated == pytest.approx(base, abs=1e-9)


def test_covering_radius_net_mode_agrees_with_exact():
    rng = np.random.default_rng(1)
    for _ in range(100):
        pts = circle_points(rng.uniform(0, 2 * math.pi, rng.integers(2, 50)))
        exact = covering_radius(pts, d=1).value
        approx = covering_radius(pts, d=1, mode="net", resolution=0.02)
        assert not approx.exact
        assert abs(approx.value - exact) <= approx.resolution


def test_covering_radius_errors():
    with pytest.raises(ValueError):
        covering_radius(np.zeros((0, 2)), d=1)
    with pytest.raises(ValueError):
        covering_radius(circle_points([0.0]), d=1, mode="sideways")
    with pytest.raises(ValueError):
        covering_radius(np.eye(3), d=2, mode="exact")
    with pytest.raises(ValueError):
        covering_radius(np.eye(3), d=2)  # needs net or resolution


def test_direction_window_examples(ladder, golden, fib_sphere):
    w = direction_window(ladder, 1, 3.0)
    assert w.indices.tolist() == [2, 3, 4]
    assert np.array_equal(w.members, direction_batch(ladder, w.indices))
    assert direction_window(golden, 2, 1.0).indices.tolist() == [5]
    assert direction_window(fib_sphere, 2, 2.0).indices.tolist() == [9, 10]


def test_direction_window_budget_refusal(golden):
    with pytest.raises(BudgetExceededError):
        direction_window(golden, 10**5, 10.0, index_budget=10**6)
    with pytest.raises(ValueError):
        direction_window(golden, 0, 3.0)
    with pytest.raises(ValueError):
        direction_window(golden, 1, 0.5)


def test_window_nesting_and_monotone_covering(golden):
    small = direction_window(golden, 3, 10.0)
    large = direction_window(golden, 3, 25.0)
    assert set(small.indices.tolist()) <= set(large.indices.tolist())
    r_small = covering_radius(small.members, d=1).value
    r_large = covering_radius(large.members, d=1).value
    assert r_large <= r_small + 1e-15


def test_ucp_constant_diverges(constant_seq):
    est = uniform_covering_parameter(constant_seq, 1.0, [0], [100, 1000, 10000])
    scaled = [s for _, _, _, s in est.rows]
    # distance to the antipode is pi, so the estimate grows like N * pi
    assert scaled == pytest.approx([math.pi * 100, math.pi * 1000, math.pi * 10000])


def test_ucp_single_window_reduction(golden):
    est = uniform_covering_parameter(golden, 1.0, [5], [1])
    w = direction_window(golden, 1, 1.0)  # any single direction covers at pi
    assert est.value == pytest.approx(math.pi)


def test_ucp_golden_bounded(golden):
    est = uniform_covering_parameter(golden, 1.0, [0, 1000, 10**6],
                                     [100, 1000, 10000])
    assert est.value < 8.0
    assert est.to_json()["grids"]["N"] == [100, 1000, 10000]


def test_criterion_cells_reproducible(golden):
    table = uniform_orchard_criterion(golden, lambda e: 1.0 / e, K=1.0,
                                      eps_grid=(0.1,), h_mults=(2,))
    row = table.rows[0]
    h, eps = row["h"], row["eps"]
    w = direction_window(golden, h, 1.0 * h * (1.0 / eps))
    again = covering_radius(w.members, d=1).value
    assert row["radius"] == pytest.approx(again, abs=0)
    assert row["value"] == pytest.approx(h / eps * again, abs=0)


def test_criterion_golden_bounded_constant_grows(golden, constant_seq):
    tab = uniform_orchard_criterion(golden, lambda e: 1.0 / e)
    assert tab.sup < 8.0
    tab_const = uniform_orchard_criterion(constant_seq, lambda e: 1.0 / e)
    for ratios in tab_const.growth_along_h().values():
        assert all(r >= 1.5 for r in ratios)


def test_criterion_skips_over_budget(golden):
    tab = uniform_orchard_criterion(golden, lambda e: 1.0 / e, eps_grid=(0.001,),
                                    h_mults=(1, 1024), index_budget=10**6)
    statuses = [row["status"] for row in tab.rows]
    assert "skipped" in statuses


def test_visibility_from_covering_monotone(golden):
    curve = visibility_from_covering(golden, (0.2, 0.1, 0.05),
                                     (1, 2, 4, 8, 16, 32, 64, 128, 256),
                                     h_cap=512)
    vals = dict(curve.entries)
    assert vals[0.05] <= vals[0.1] <= vals[0.2]
    assert vals[0.2] > 0
    inner = [s for _, s, _ in curve.inner]
    assert all(b <= a * 1.05 for a, b in zip(inner, inner[1:]))  # trajectory sinks


def test_visibility_from_covering_constant_zero(constant_seq):
    curve = visibility_from_covering(constant_seq, (0.2, 0.1), (1, 2, 4, 8),
                                     h_cap=64)
    assert all(v == 0.0 for _, v in curve.entries)
