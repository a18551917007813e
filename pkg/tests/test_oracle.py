import json

import pytest

from stochsep.model import dataset_from_points, gen_random, parse_dataset
from stochsep.numeric import Q
from stochsep.oracle import (GuardExceeded, brute_esm, brute_sp,
                             brute_sch_membership, enumerate_margins,
                             iter_instances, separable_table)

from helpers import lp_separable, present_points


def test_brute_sp_examples():
    ds = dataset_from_points([((0,), "red", "1/2"), ((2,), "red", "1/2"),
                              ((1,), "blue", "1")])
    assert brute_sp(ds) == Q(3, 4)
    sep = dataset_from_points([((0, 0), "red", "1"), ((5, 5), "blue", "1")])
    assert brute_sp(sep) == 1
    sandwich = dataset_from_points([((0,), "red", "1"), ((2,), "red", "1"),
                                    ((1,), "blue", "1")])
    assert brute_sp(sandwich) == 0


def test_brute_esm_examples():
    ds = dataset_from_points([((0,), "red", "1"), ((1,), "blue", "1/2"),
                              ((3,), "blue", "1")])
    assert brute_esm(ds) == 1.0
    solo = dataset_from_points([((0, 0), "red", "1")])
    assert brute_esm(solo) == 0.0
    pair = dataset_from_points([((0, 0), "red", "1"), ((3, 4), "blue", "1")])
    assert brute_esm(pair) == 2.5


def test_enumerate_margins_examples():
    ds = dataset_from_points([((0,), "red", "1/2"), ((1,), "blue", "1/2"),
                              ((3,), "blue", "1/2")])
    census = enumerate_margins(ds)
    assert census.count == 2
    assert census.margins == (0.5, 1.5)
    assert census.tier == "exact-squared"
    one = dataset_from_points([((0,), "red", "1"), ((1,), "blue", "1")])
    assert enumerate_margins(one).count == 1
    mono = dataset_from_points([((0,), "blue", "1"), ((1,), "blue", "1/2")])
    assert enumerate_margins(mono).count == 0


def test_separable_table_matches_direct_checks():
    ds = gen_random(3, 3, 2, seed=21)
    table = separable_table(ds)
    for mask in range(1 << len(ds.locations)):
        reds, blues = present_points(ds, mask)
        assert table[mask] == lp_separable(reds, blues)


def test_probability_partition():
    ds = gen_random(2, 3, 2, seed=8)
    table = separable_table(ds)
    sep = sum(p for mask, p in iter_instances(ds) if table[mask])
    insep = sum(p for mask, p in iter_instances(ds) if not table[mask])
    assert sep + insep == 1
    assert brute_sp(ds) == sep


def test_guard_rail():
    ds = gen_random(12, 11, 1, seed=0, level="gp")
    with pytest.raises(GuardExceeded):
        brute_sp(ds)


def test_polytope_oracle_uses_group_semantics():
    ds = parse_dataset(json.dumps({
        "version": 1, "dimension": 2, "model": "unipoint",
        "points": [{"color": "red", "coords": [5, 5], "prob": "1"}],
        "objects": [{"color": "blue", "prob": "1/2",
                     "shape": {"type": "polytope",
                               "vertices": [[0, 0], [1, 0], [0, 1]]}}]}))
    # polytope far from the red point: always separable
    assert brute_sp(ds) == 1
    inside = parse_dataset(json.dumps({
        "version": 1, "dimension": 2, "model": "unipoint",
        "points": [{"color": "red", "coords": ["1/4", "1/4"], "prob": "1"}],
        "objects": [{"color": "blue", "prob": "1/2",
                     "shape": {"type": "polytope",
                               "vertices": [[0, 0], [1, 0], [0, 1]]}}]}))
    # red point sits inside the triangle: separable only when it is absent
    assert brute_sp(inside) == Q(1, 2)


def test_sch_membership_oracle_triangle():
    tri = dataset_from_points([((0, 0), "blue", "1/2"), ((4, 0), "blue", "1/2"),
                               ((0, 4), "blue", "1/2")])
    assert brute_sch_membership(tri, (Q(1), Q(1))) == Q(1, 8)
