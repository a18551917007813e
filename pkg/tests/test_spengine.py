import random

import pytest

from stochsep.model import (dataset_from_points, gen_multipoint, gen_random,
                            singleton_multipoint_as_unipoint)
from stochsep.numeric import FLOAT, Q
from stochsep.oracle import brute_sp, iter_instances, separable_table
from stochsep.position import PositionError
from stochsep.spengine import (AT_INFINITY, coincidence_witness,
                               enumerate_candidates, extreme_separator,
                               orientation_indicator, resolve_candidate,
                               separable_probability, sp_base_1d, tau,
                               trivial_term)


def triangle():
    return dataset_from_points([((0, 0), "red", "1/2"), ((2, 0), "blue", "1/2"),
                                ((1, 1), "blue", "1/2")])


def test_trivial_term_examples():
    ds = dataset_from_points([((0,), "red", "1/2"), ((1,), "blue", "1/2")])
    assert trivial_term(ds) == Q(3, 4)
    sure = dataset_from_points([((0,), "red", "1"), ((1,), "blue", "1")])
    assert trivial_term(sure) == 0
    empty = dataset_from_points([], dimension=1)
    assert trivial_term(empty) == 1


def test_sp_base_1d_example_decomposition():
    ds = dataset_from_points([((0,), "red", "1/2"), ((2,), "red", "1/2"),
                              ((1,), "blue", "1")])
    assert sp_base_1d(ds) == Q(3, 4)
    always = dataset_from_points([((0,), "red", "1"), ((1,), "blue", "1")])
    assert sp_base_1d(always) == 1
    never = dataset_from_points([((0,), "red", "1"), ((2,), "red", "1"),
                                 ((1,), "blue", "1")])
    assert sp_base_1d(never) == 0


def test_sp_base_1d_rejects_coincident_coordinates():
    ds = dataset_from_points([((0,), "red", "1/2"), ((0,), "blue", "1/2")])
    with pytest.raises(PositionError):
        sp_base_1d(ds)


def test_triangle_decomposition():
    res = separable_probability(triangle())
    assert res.sp == 1
    (level,) = res.per_level
    assert level.dimension == 2
    assert level.trivial == Q(5, 8)
    assert level.tau_sum == Q(3, 8)
    assert level.candidates == 2


def test_enumerate_candidates_counts():
    assert sum(1 for _ in enumerate_candidates(triangle())) == 2
    ds = gen_random(2, 2, 3, seed=4)
    assert sum(1 for _ in enumerate_candidates(ds)) == 4
    mono = dataset_from_points([((0, 0), "blue", "1/2"), ((1, 0), "blue", "1/2")])
    assert sum(1 for _ in enumerate_candidates(mono)) == 0


def test_candidate_hyperplane_and_aux():
    cands = {c.e_red + c.e_blue: c for c in enumerate_candidates(triangle())}
    c = cands[(0, 1)]
    assert c.hyperplane.normal == (Q(0), Q(1)) and c.hyperplane.offset == 0
    a, b = c.aux
    assert a * c.hyperplane.normal[0] + b * c.hyperplane.normal[1] == 0


def test_coincidence_witness_cases():
    def cand_for(reds, blues):
        ds = dataset_from_points(
            [(p, "red", "1/2") for p in reds] + [(p, "blue", "1/2") for p in blues])
        return next(iter(enumerate_candidates(ds)))

    # two-point tuple in the plane: the witness is the tuple itself
    c = cand_for([(0, 0)], [(2, 0)])
    assert coincidence_witness(c) == ((Q(0), Q(0)), (Q(2), Q(0)))
    # no convex combination matches the trailing coordinate
    c = cand_for([(0, 0, 0)], [(1, 0, 1), (0, 1, 2)])
    assert coincidence_witness(c) is None
    # interior solution
    c = cand_for([(0, 0, 1)], [(1, 0, 0), (0, 1, 2)])
    r_hat, b_hat = coincidence_witness(c)
    assert r_hat == (Q(0), Q(0), Q(1))
    assert b_hat == (Q(1, 2), Q(1, 2), Q(1))


def test_orientation_indicator_formula():
    assert orientation_indicator((Q(0), Q(0)), (Q(2), Q(0))) == (Q(0), Q(-2))
    assert orientation_indicator((Q(0), Q(0)), (Q(1), Q(1))) == (Q(1), Q(-1))
    o = orientation_indicator((Q(0), Q(0), Q(5)), (Q(1), Q(1), Q(5)))
    assert o == (Q(1), Q(-1), Q(5))


def test_tau_triangle_values():
    ds = triangle()
    taus = {c.e_red + c.e_blue: tau(ds, c) for c in enumerate_candidates(ds)}
    assert taus[(0, 1)] == Q(1, 4)
    assert taus[(0, 2)] == Q(1, 8)
    assert trivial_term(ds) + sum(taus.values()) == 1


def test_tau_zero_without_witness():
    ds = dataset_from_points([((0, 0, 0), "red", "1/2"),
                              ((1, 0, 1), "blue", "1/2"),
                              ((0, 1, 2), "blue", "1/2"),
                              ((4, 1, 1), "blue", "1/2")])
    for c in enumerate_candidates(ds):
        if set(c.e_red) == {0} and set(c.e_blue) == {1, 2}:
            assert resolve_candidate(c).witness is None
            assert tau(ds, c) == 0
            break
    else:
        pytest.fail("expected candidate not enumerated")


def test_on_plane_tie_raises():
    ds = dataset_from_points([((0, 0), "red", "1/2"), ((2, 0), "blue", "1/2"),
                              ((4, 0), "blue", "1/2"), ((1, 3), "blue", "1/2")])
    with pytest.raises(PositionError):
        separable_probability(ds)           # caught by up-front validation
    with pytest.raises(PositionError):
        separable_probability(ds, validate=False)   # caught at the tie itself
    with pytest.raises(PositionError):
        separable_probability(ds, strategy="radial", validate=False)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_oracle_equivalence_spot(d):
    for seed in range(6):
        rng = random.Random(1000 * d + seed)
        ds = gen_random(rng.randint(1, 3), rng.randint(1, 4), d, seed=seed + 31 * d)
        expected = brute_sp(ds)
        scan = separable_probability(ds, strategy="scan")
        radial = separable_probability(ds, strategy="radial")
        assert scan.sp == expected
        assert radial.sp == expected
        fl = separable_probability(ds, ctx=FLOAT)
        assert abs(fl.sp - float(expected)) <= 1e-9


def test_strategy_candidate_counts_match():
    ds = gen_random(3, 4, 3, seed=77)
    scan = separable_probability(ds, strategy="scan")
    radial = separable_probability(ds, strategy="radial")
    assert [lv.candidates for lv in scan.per_level] == \
        [lv.candidates for lv in radial.per_level]


def test_color_swap_symmetry():
    ds = gen_random(3, 4, 2, seed=5)
    swapped = dataset_from_points(
        [(l.coords, "blue" if l.color == "red" else "red", l.prob)
         for l in ds.locations])
    assert separable_probability(ds).sp == separable_probability(swapped).sp


def test_multipoint_equivalence_spot():
    for seed in range(4):
        ds = gen_multipoint(2, 2, 2, seed=seed)
        assert separable_probability(ds).sp == brute_sp(ds)
        assert separable_probability(ds, strategy="radial").sp == brute_sp(ds)
    singleton = gen_multipoint(3, 2, 2, max_locations=1, seed=9)
    uni = singleton_multipoint_as_unipoint(singleton)
    assert separable_probability(singleton).sp == separable_probability(uni).sp


def test_extreme_separator_examples():
    items = [(0, (Q(0), Q(0)), "red"), (1, (Q(2), Q(0)), "blue"),
             (2, (Q(1), Q(1)), "blue")]
    desc = extreme_separator(items, 2)
    assert desc.kind == "hyperplane" and desc.level == 0
    assert desc.on_set == (0, 1)
    assert desc.separator.normal == (Q(0), Q(1))

    assert extreme_separator([(0, (Q(1), Q(1)), "blue")], 2).kind == AT_INFINITY

    one_d = [(0, (Q(0),), "red"), (1, (Q(1),), "blue"), (2, (Q(3),), "blue")]
    desc = extreme_separator(one_d, 1)
    assert desc.kind == "point" and desc.separator == 0 and desc.on_set == (0,)

    with pytest.raises(ValueError):
        extreme_separator([(0, (Q(0),), "red"), (1, (Q(2),), "red"),
                           (2, (Q(1),), "blue")], 1)


def test_extreme_separator_agrees_with_charging():
    ds = gen_random(2, 3, 2, seed=12)
    table = separable_table(ds)
    locs = ds.locations
    charge_sets = {}
    for c in enumerate_candidates(ds):
        t = tau(ds, c)
        if t:
            charge_sets[tuple(sorted(c.e_red + c.e_blue))] = c
    for mask, _ in iter_instances(ds):
        if not table[mask]:
            continue
        items = [(l.id, l.coords, l.color) for i, l in enumerate(locs)
                 if mask >> i & 1]
        desc = extreme_separator(items, 2)
        if desc.kind == "hyperplane":
            assert desc.on_set in charge_sets


def test_invariance_under_rational_linear_map():
    from stochsep.position import sgpp_transform_points

    ds = gen_random(2, 3, 3, seed=3)
    base = separable_probability(ds).sp
    matrix = ((Q(2), Q(1), Q(0)), (Q(0), Q(1), Q(-1)), (Q(1), Q(0), Q(3)))
    mapped = [tuple(sum(row[k] * p[k] for k in range(3)) for row in matrix)
              for p in ds.coords_list()]
    _, fixed = sgpp_transform_points(mapped, ids=ds.ids())
    moved = ds.with_coords(fixed)
    assert separable_probability(moved).sp == base


from hypothesis import assume, given, settings, strategies as st

_coord = st.integers(-6, 6)
_prob = st.fractions(min_value="1/20", max_value=1)


@settings(deadline=None, max_examples=40)
@given(st.lists(st.tuples(_coord, _coord, _prob), min_size=1, max_size=3),
       st.lists(st.tuples(_coord, _coord, _prob), min_size=1, max_size=3))
def test_sp_matches_oracle_generatively(red_rows, blue_rows):
    entries = [((x, y), "red", Q(p.numerator, p.denominator))
               for x, y, p in red_rows]
    entries += [((x, y), "blue", Q(p.numerator, p.denominator))
                for x, y, p in blue_rows]
    ds = dataset_from_points(entries)
    assume(ds.validate_positions().ok)
    assert separable_probability(ds, validate=False).sp == brute_sp(ds)
    assert separable_probability(ds, strategy="radial",
                                 validate=False).sp == brute_sp(ds)


def test_high_dimension_nontrivial_sp():
    rng = random.Random(2)
    for d in (4, 5):
        while True:
            entries = []
            for k in range(d + 1):
                v = [Q(1000) if i == k else Q(rng.randint(-40, 40))
                     for i in range(d)]
                entries.append((tuple(v), "blue", Q(rng.randint(4, 16), 16)))
            for _ in range(2):
                c = tuple(Q(1000, d + 1) + Q(rng.randint(-30, 30))
                          for _ in range(d))
                entries.append((c, "red", Q(rng.randint(4, 16), 16)))
            ds = dataset_from_points(entries)
            if ds.validate_positions(max_violations=1).ok:
                break
        want = brute_sp(ds)
        assert 0 < want < 1
        assert separable_probability(ds, validate=False).sp == want
        assert separable_probability(ds, strategy="radial",
                                     validate=False).sp == want
