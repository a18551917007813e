import json

import pytest
from hypothesis import given, settings, strategies as st

from stochsep.model import (BLUE, RED, DatasetError, ProbOutOfRange, Scenario,
                            SchemaError, SumExceedsOne, UnknownId,
                            dataset_from_points, gen_cluster_stress,
                            gen_multipoint, gen_random, parse_dataset,
                            scenario_probability, serialize_dataset,
                            singleton_multipoint_as_unipoint)
from stochsep.numeric import Q


def test_parse_minimal():
    ds = parse_dataset(json.dumps({
        "version": 1, "dimension": 1, "model": "unipoint",
        "points": [{"color": "red", "coords": [0], "prob": "1/2"},
                   {"color": "blue", "coords": ["0.25"], "prob": "0.5"}]}))
    assert ds.n == ds.N == 1
    assert ds.loc(1).coords == (Q(1, 4),)
    assert ds.loc(1).prob == Q(1, 2)


def test_parse_errors():
    base = {"version": 1, "dimension": 1, "model": "unipoint"}
    with pytest.raises(ProbOutOfRange):
        parse_dataset(json.dumps(dict(base, points=[
            {"color": "red", "coords": [0], "prob": "1.5"}])))
    with pytest.raises(SumExceedsOne):
        parse_dataset(json.dumps({
            "version": 1, "dimension": 1, "model": "multipoint",
            "uncertain_points": [{"color": "red", "locations": [
                {"coords": [0], "prob": "0.7"}, {"coords": [1], "prob": "0.5"}]}]}))
    with pytest.raises(SchemaError):
        parse_dataset("not json{")
    with pytest.raises(SchemaError):
        parse_dataset(json.dumps(dict(base, points=[
            {"color": "red", "coords": [0, 1], "prob": "1/2"}])))
    with pytest.raises(SchemaError):
        parse_dataset(json.dumps({"version": 2, "dimension": 1,
                                  "model": "unipoint"}))


def test_roundtrip_every_flavor():
    docs = [
        {"version": 1, "dimension": 2, "model": "unipoint",
         "points": [{"color": "red", "coords": ["1/3", "0.1"], "prob": "3/7"}],
         "objects": [
             {"color": "blue", "prob": "1/2",
              "shape": {"type": "ball", "center": [1, 2], "radius": "0.75"}},
             {"color": "blue", "prob": "2/3",
              "shape": {"type": "polytope", "vertices": [[0, 0], [1, 0], [0, 1]]}}]},
        {"version": 1, "dimension": 1, "model": "multipoint",
         "uncertain_points": [{"color": "red", "locations": [
             {"coords": [0], "prob": "1/4"}, {"coords": [2], "prob": "1/4"}]}]},
    ]
    for doc in docs:
        ds = parse_dataset(json.dumps(doc))
        again = parse_dataset(serialize_dataset(ds))
        assert again == ds


def _two_location_uncertain():
    return parse_dataset(json.dumps({
        "version": 1, "dimension": 1, "model": "multipoint",
        "uncertain_points": [{"color": "red", "locations": [
            {"coords": [0], "prob": "0.3"}, {"coords": [2], "prob": "0.4"}]}]}))


def test_scenario_probability_cases():
    ds = _two_location_uncertain()
    assert scenario_probability(ds, Scenario(frozenset({0}), frozenset())) == Q(3, 10)
    assert scenario_probability(ds, Scenario(frozenset(), frozenset({0, 1}))) == Q(3, 10)
    assert scenario_probability(ds, Scenario(frozenset({0, 1}), frozenset())) == 0
    assert scenario_probability(ds, Scenario(frozenset(), frozenset())) == 1
    with pytest.raises(UnknownId):
        scenario_probability(ds, Scenario(frozenset({9}), frozenset()))
    with pytest.raises(DatasetError):
        Scenario(frozenset({0}), frozenset({0}))


def test_scenario_monotone_under_constraints():
    ds = gen_random(2, 2, 1, seed=1)
    ids = [l.id for l in ds.locations]
    base = scenario_probability(ds, Scenario(frozenset({ids[0]}), frozenset()))
    more = scenario_probability(
        ds, Scenario(frozenset({ids[0]}), frozenset({ids[1]})))
    assert more <= base


@pytest.mark.parametrize("maker,kwargs", [
    (gen_random, dict(n_red=2, n_blue=2, d=1)),
    (gen_multipoint, dict(n_red_units=2, n_blue_units=1, d=2)),
])
def test_full_scenarios_sum_to_one(maker, kwargs):
    from stochsep.oracle import iter_instances

    ds = maker(seed=5, **kwargs)
    total = sum(p for _, p in iter_instances(ds))
    assert total == 1


def test_generators_deterministic():
    a = serialize_dataset(gen_random(2, 3, 2, seed=42))
    b = serialize_dataset(gen_random(2, 3, 2, seed=42))
    assert a == b
    assert serialize_dataset(gen_random(2, 3, 2, seed=43)) != a


def test_gen_random_shapes():
    ds = gen_random(0, 3, 2, seed=1)
    assert not ds.reds() and len(ds.blues()) == 3
    ds = gen_random(4, 4, 3, prob_law="1", seed=2)
    assert all(l.prob == 1 for l in ds.locations)


def test_cluster_stress_layout():
    ds = gen_cluster_stress(2, 4, 2, "1/100", seed=7)
    reds, blues = ds.reds(), ds.blues()
    assert len(reds) == 2 and len(blues) == 4
    assert all(l.prob == Q(1, 2) for l in ds.locations)
    eps = Q(1, 100)
    for l in reds:
        assert sum(c * c for c in l.coords) <= eps * eps
    near_e1 = sum(1 for l in blues
                  if (l.coords[0] - 1) ** 2 + l.coords[1] ** 2 <= eps * eps)
    assert near_e1 == 2
    with pytest.raises(DatasetError):
        gen_cluster_stress(2, 3, 2, "0.01")


def test_singleton_multipoint_matches_unipoint():
    ds = gen_multipoint(2, 2, 2, max_locations=1, seed=3)
    uni = singleton_multipoint_as_unipoint(ds)
    assert uni.model == "unipoint"
    for loc in ds.locations:
        s = Scenario(frozenset({loc.id}), frozenset())
        assert scenario_probability(ds, s) == scenario_probability(uni, s)


@settings(deadline=None, max_examples=40)
@given(st.integers(1, 15), st.integers(1, 15))
def test_probability_strings_roundtrip(num, den):
    if num > den:
        num, den = den, num
    ds = dataset_from_points([((0,), RED, Q(num, den)), ((1,), BLUE, "1/2")])
    assert parse_dataset(serialize_dataset(ds)) == ds


def test_jitter_repairs_degeneracy_deterministically():
    from stochsep.model import jitter_dataset

    ds = dataset_from_points([((0, 0), RED, "1/2"), ((1, 1), BLUE, "1/2"),
                              ((2, 2), BLUE, "1/2")])
    assert not ds.validate_positions().ok
    moved = jitter_dataset(ds, "1/100", seed=4)
    assert moved.validate_positions().ok
    again = jitter_dataset(ds, "1/100", seed=4)
    assert moved == again
    for a, b in zip(ds.locations, moved.locations):
        assert all(abs(x - y) <= Q(1, 100) for x, y in zip(a.coords, b.coords))
        assert a.prob == b.prob
    with pytest.raises(DatasetError):
        jitter_dataset(ds, 0)
