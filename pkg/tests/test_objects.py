import json

import numpy as np
import pytest

from stochsep.esmengine import expected_separation_margin
from stochsep.model import parse_dataset
from stochsep.numeric import Q
from stochsep.objects import (BallInstanceOracle, UnsupportedDimension,
                              ball_expected_margin, ball_max_gap_2d,
                              ball_separability_check,
                              ball_separable_probability,
                              critical_extreme_separator, gen_balls,
                              reduce_polytopes, validate_ball_positions)
from stochsep.oracle import brute_esm, brute_sp, iter_instances
from stochsep.spengine import separable_probability


def make(doc):
    return parse_dataset(json.dumps(doc))


def ball(color, prob, center, radius):
    return {"color": color, "prob": prob,
            "shape": {"type": "ball", "center": list(center), "radius": radius}}


def test_reduce_polytopes():
    ds = make({"version": 1, "dimension": 2, "model": "unipoint",
               "objects": [{"color": "blue", "prob": "0.7",
                            "shape": {"type": "polytope",
                                      "vertices": [[0, 0], [1, 0], [0, 1]]}}]})
    red = reduce_polytopes(ds)
    assert len(red.locations) == 3
    group = [u for u in red.units if u.kind == "group"]
    assert len(group) == 1 and group[0].prob == Q(7, 10)
    assert reduce_polytopes(red) is red

    seg = make({"version": 1, "dimension": 2, "model": "unipoint",
                "objects": [{"color": "blue", "prob": "1",
                             "shape": {"type": "polytope",
                                       "vertices": [[0, 0], [1, 0]]}}]})
    red = reduce_polytopes(seg)
    assert all(u.kind == "point" for u in red.units)


def test_polytope_reduction_preserves_sp():
    ds = make({"version": 1, "dimension": 2, "model": "unipoint",
               "points": [{"color": "red", "coords": ["1/4", "1/4"],
                           "prob": "3/4"}],
               "objects": [{"color": "blue", "prob": "1/2",
                            "shape": {"type": "polytope",
                                      "vertices": [[0, 0], [1, 0], [0, 1]]}}]})
    reduced = reduce_polytopes(ds)
    engine = separable_probability(reduced, validate=False).sp
    assert engine == brute_sp(ds)
    assert engine == Q(5, 8)  # separable unless both the point and the triangle exist


def test_ball_separability_check_examples():
    assert ball_separability_check([((0, 0), 0.5)], [((2, 0), 0.5)])
    assert not ball_separability_check([((0, 0), 0.5)], [((0.6, 0), 0.5)])
    with pytest.raises(UnsupportedDimension):
        ball_separability_check([((0, 0, 0, 0), 1.0)], [((3, 0, 0, 0), 1.0)])


def test_zero_radius_check_agrees_with_point_predicate():
    import random

    from stochsep.geometry import check_separable

    rng = random.Random(31)
    for _ in range(100):
        reds = [((rng.randint(-9, 9), rng.randint(-9, 9)), 0)
                for _ in range(rng.randint(1, 4))]
        blues = [((rng.randint(-9, 9), rng.randint(-9, 9)), 0)
                 for _ in range(rng.randint(1, 4))]
        want = check_separable([tuple(Q(c) for c in b[0]) for b in reds],
                               [tuple(Q(c) for c in b[0]) for b in blues])[0]
        assert ball_separability_check(reds, blues) == want


def test_ball_max_gap_matches_known_geometry():
    gap, w = ball_max_gap_2d([((0.0, 0.0), 0.5)], [((3.0, 0.0), 0.5)])
    assert abs(gap - 2.0) < 1e-12
    assert abs(abs(w[0]) - 1.0) < 1e-12


def test_ball_sp_examples():
    ds = make({"version": 1, "dimension": 2, "model": "unipoint",
               "objects": [ball("red", "1", (0, 0), "0.5"),
                           ball("blue", "1/2", ("0.6", 0), "0.5"),
                           ball("blue", "1", (3, 0), "0.5")]})
    assert ball_separable_probability(ds) == Q(1, 2)
    apart = make({"version": 1, "dimension": 2, "model": "unipoint",
                  "objects": [ball("red", "1", (0, 0), "0.5"),
                              ball("blue", "1", (3, 0), "0.5")]})
    assert ball_separable_probability(apart) == 1
    overlap = make({"version": 1, "dimension": 2, "model": "unipoint",
                    "objects": [ball("red", "1", (0, 0), "0.5"),
                                ball("blue", "1", ("0.6", 0), "0.5")]})
    assert ball_separable_probability(overlap) == 0


def test_critical_separator_tangency_residuals():
    sep = critical_extreme_separator([((0.0, 0.0), 1.0)], [((4.0, 0.0), 1.0)], 2)
    assert sep is not None
    normal, offset, _ = sep
    for center, radius in (((0.0, 0.0), 1.0), ((4.0, 0.0), 1.0)):
        resid = abs(abs(float(np.dot(normal, center)) - offset) - radius)
        assert resid <= 1e-9 * (1 + radius)
    # overlapping and monochromatic sets have no canonical separator
    assert critical_extreme_separator([((0.0, 0.0), 1.0)],
                                      [((1.0, 0.0), 1.0)], 2) is None


@pytest.mark.parametrize("seed", range(8))
def test_ball_sp_oracle_d2(seed):
    ds = gen_balls(2, 3, 2, seed=seed)
    assert abs(float(ball_separable_probability(ds)) - brute_sp(ds)) <= 1e-7


@pytest.mark.parametrize("seed", range(5))
def test_ball_esm_oracle_d2(seed):
    ds = gen_balls(2, 3, 2, seed=200 + seed)
    assert abs(ball_expected_margin(ds) - brute_esm(ds)) <= 1e-7


def test_zero_radius_engines_match_point_engines():
    for seed in (0, 1, 2):
        ds = gen_balls(2, 3, 2, seed=300 + seed, zero_radius_share=1.0)
        assert ball_separable_probability(ds) == \
            separable_probability(ds, validate=False).sp
        assert abs(ball_expected_margin(ds)
                   - expected_separation_margin(ds).emar) <= 1e-9


@pytest.mark.slow
def test_ball_sp_oracle_d3():
    ds = gen_balls(2, 2, 3, seed=700, zero_radius_share=0.4)
    assert abs(float(ball_separable_probability(ds)) - brute_sp(ds)) <= 1e-6


def test_lambda_terms_stay_in_range():
    ds = gen_balls(2, 2, 2, seed=42)
    total = ball_separable_probability(ds)
    assert 0 <= total <= 1
    oracle = BallInstanceOracle(ds)
    for mask, _ in iter_instances(ds):
        gap = oracle.max_gap(mask)
        assert gap is None or abs(gap) > 1e-4  # generator kept decisions robust


def test_validate_ball_positions_rejects_tangent_pair():
    ds = make({"version": 1, "dimension": 2, "model": "unipoint",
               "objects": [ball("red", "1", (0, 0), "1"),
                           ball("blue", "1", (2, 0), "1")]})
    from stochsep.position import PositionError
    with pytest.raises(PositionError):
        validate_ball_positions(ds)


def test_ball_support_configs_stream():
    from stochsep.objects import ball_support_configs

    ds = gen_balls(2, 2, 2, seed=5)
    configs = list(ball_support_configs(ds))
    assert configs
    seen = set()
    xi_sum = Q(0)
    for cfg in configs:
        assert cfg.member_ids not in seen
        seen.add(cfg.member_ids)
        assert cfg.margin > 0
        assert abs(sum(x * x for x in cfg.omega) - 1.0) <= 1e-12
        assert 0 <= cfg.xi <= 1
        xi_sum += cfg.xi
    assert xi_sum <= 1
    total = sum(float(c.xi) * c.margin for c in configs)
    assert abs(total - ball_expected_margin(ds)) <= 1e-12


def test_mixed_polytope_and_ball_dataset():
    ds = make({"version": 1, "dimension": 2, "model": "unipoint",
               "objects": [
                   ball("red", "1", ("-2", 0), "0.4"),
                   {"color": "blue", "prob": "1/2",
                    "shape": {"type": "polytope",
                              "vertices": [[2, 0], [3, 1], [3, "-1"]]}},
                   ball("blue", "3/4", (0, 3), "0.3")]})
    got = float(ball_separable_probability(ds))
    want = brute_sp(ds)
    assert abs(got - want) <= 1e-7


def test_reduced_polytope_dataset_through_both_sp_strategies():
    ds = make({"version": 1, "dimension": 2, "model": "unipoint",
               "points": [{"color": "red", "coords": ["1/4", "1/4"],
                           "prob": "3/4"},
                          {"color": "red", "coords": [5, 6], "prob": "1/3"}],
               "objects": [
                   {"color": "blue", "prob": "1/2",
                    "shape": {"type": "polytope",
                              "vertices": [[0, 0], [1, 0], [0, 1]]}},
                   {"color": "blue", "prob": "2/3",
                    "shape": {"type": "polytope",
                              "vertices": [[8, 0], [9, 2]]}}]})
    reduced = reduce_polytopes(ds)
    want = brute_sp(ds)
    scan = separable_probability(reduced, strategy="scan", validate=False).sp
    radial = separable_probability(reduced, strategy="radial",
                                   validate=False).sp
    assert scan == want
    assert radial == want


def test_mixed_polytope_and_ball_esm():
    ds = make({"version": 1, "dimension": 2, "model": "unipoint",
               "objects": [
                   ball("red", "1", ("-2", 0), "0.4"),
                   {"color": "blue", "prob": "1/2",
                    "shape": {"type": "polytope",
                              "vertices": [[2, 0], [3, 1], [3, "-1"]]}},
                   ball("blue", "3/4", (0, 3), "0.3")]})
    assert abs(ball_expected_margin(ds) - brute_esm(ds)) <= 1e-7
