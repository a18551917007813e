"""Separable-probability engine.

The probability that the existent points admit a strong separator is summed
by charging every separable instance to a canonical separator: either a
hyperplane through exactly ``l`` points at some two-coordinate-projection
level, or the trivial at-infinity separator when a color is absent.  Each
candidate hyperplane contributes the probability that it is that canonical
separator, which factors into presence of its on-set and absence of the
points on the wrong sides.

Two evaluation strategies are provided: a per-candidate full scan, and a
radial sweep that fixes all but one spanning point, orders the remaining
points angularly around the fixed flat, and updates the side products
incrementally.  Both return identical exact rationals.
"""

from __future__ import annotations

import functools
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterator, Optional

from .geometry import Hyperplane, gauss_solve, nullspace, span_hyperplane, vsub
from .model import BLUE, RED, StochasticDataset, _scenario_prob
from .numeric import EXACT, NumericContext
from .position import PositionError, SGPP

AT_INFINITY = "at-infinity"


@dataclass(frozen=True)
class CandidateSeparator:
    """A spanning tuple at one projection level, with its derived data."""

    level_dim: int
    drop: int                    # leading coordinates dropped at this level
    e_red: tuple                 # location ids on the hyperplane
    e_blue: tuple
    red_points: tuple            # projected coordinates, aligned with e_red
    blue_points: tuple
    hyperplane: Hyperplane
    aux: tuple                   # (a, b) direction pair, axis of the auxiliary subspace
    witness: Optional[tuple] = None   # (r_hat, b_hat) in level coordinates
    o: Optional[tuple] = None
    tau: object = None


@dataclass(frozen=True)
class LevelStats:
    dimension: int
    trivial: object
    tau_sum: object
    candidates: int


@dataclass(frozen=True)
class SPResult:
    sp: object
    per_level: tuple
    strategy: str

    @property
    def candidate_count(self) -> int:
        """Spanning-tuple candidates only; the 1-D base charges are not
        hyperplane candidates."""
        return sum(lv.candidates for lv in self.per_level if lv.dimension >= 2)


@dataclass(frozen=True)
class ExtremeSeparatorDescriptor:
    level: int                   # recursion depth (two coordinates dropped per step)
    space_dim: int
    kind: str                    # "hyperplane" | "point" | AT_INFINITY
    separator: object            # Hyperplane, 1-D coordinate, or None
    on_set: tuple                # location ids
    aux: Optional[tuple] = None


def _require_points(dataset):
    if dataset.polytopes or dataset.max_radius() > 0:
        raise ValueError("point-dataset engine; reduce objects first")


# ---------------------------------------------------------------------------
# trivial term and the 1-D base case

def trivial_term(dataset: StochasticDataset, ctx: NumericContext = EXACT):
    """Probability that at least one color is entirely absent."""
    red_ids = frozenset(l.id for l in dataset.locations if l.color == RED)
    blue_ids = frozenset(l.id for l in dataset.locations if l.color == BLUE)
    no_red = _scenario_prob(dataset, frozenset(), red_ids, ctx)
    no_blue = _scenario_prob(dataset, frozenset(), blue_ids, ctx)
    none = _scenario_prob(dataset, frozenset(), red_ids | blue_ids, ctx)
    return no_red + no_blue - none


def sp_base_1d(dataset: StochasticDataset, ctx: NumericContext = EXACT):
    """Separable-probability in R^1 by charging the smallest weak separator."""
    _require_points(dataset)
    if dataset.dimension != 1:
        raise ValueError("1-D base case requires dimension 1")
    level = [(l.id, l.coords, l.color) for l in dataset.locations]
    return _base_1d(dataset, level, ctx)


def _base_1d(dataset, level, ctx):
    coords = {}
    for loc_id, point, _ in level:
        x = point[0]
        if x in coords:
            raise PositionError(
                f"coincident 1-D coordinates for locations {coords[x]} and {loc_id}")
        coords[x] = loc_id
    total = trivial_term(dataset, ctx)
    for loc_id, point, color in level:
        x = point[0]
        same_above = frozenset(i for i, p, c in level if c == color and p[0] > x)
        opp_below = frozenset(i for i, p, c in level if c != color and p[0] < x)
        opp_above = frozenset(i for i, p, c in level if c != color and p[0] > x)
        present = frozenset((loc_id,))
        left_ok = _scenario_prob(dataset, present, same_above | opp_below, ctx)
        all_gone = _scenario_prob(dataset, present, same_above | opp_below | opp_above, ctx)
        total += left_ok - all_gone
    return total


# ---------------------------------------------------------------------------
# candidate machinery

def enumerate_candidates(dataset: StochasticDataset, drop: int = 0,
                         ctx: NumericContext = EXACT) -> Iterator[CandidateSeparator]:
    """All bichromatic spanning tuples at the given projection level.

    Each candidate carries its hyperplane and the perpendicular auxiliary
    direction; the witness and tau fields stay unset.
    """
    _require_points(dataset)
    ell = dataset.dimension - drop
    if ell < 2:
        raise ValueError("candidates exist only in dimension >= 2")
    locs = dataset.locations
    for combo in itertools.combinations(locs, ell):
        reds = tuple(l for l in combo if l.color == RED)
        blues = tuple(l for l in combo if l.color == BLUE)
        if not reds or not blues:
            continue
        yield _make_candidate(reds, blues, drop, ell, ctx)


def _make_candidate(reds, blues, drop, ell, ctx):
    red_points = tuple(ctx.point(l.coords[drop:]) for l in reds)
    blue_points = tuple(ctx.point(l.coords[drop:]) for l in blues)
    h = span_hyperplane(red_points + blue_points, ctx)
    a, b = -h.normal[1], h.normal[0]
    if ctx.sign(a) == 0 and ctx.sign(b) == 0:
        raise PositionError(
            "candidate hyperplane parallel to the first two coordinate axes; "
            f"projection-level degeneracy at {tuple(l.id for l in reds + blues)}")
    return CandidateSeparator(
        level_dim=ell, drop=drop,
        e_red=tuple(l.id for l in reds), e_blue=tuple(l.id for l in blues),
        red_points=red_points, blue_points=blue_points,
        hyperplane=h, aux=(a, b))


def coincidence_witness(cand: CandidateSeparator, ctx: NumericContext = EXACT):
    """Unique pair (r_hat, b_hat) of hull points whose trailing coordinates
    coincide, or None when the convex coefficients leave the simplex."""
    ell = cand.level_dim
    reds, blues = cand.red_points, cand.blue_points
    if ell == 2:
        return reds[0], blues[0]
    p, q = len(reds), len(blues)
    n = p + q
    one, zero = ctx.one(), ctx.zero()
    rows = [[one] * p + [zero] * q, [zero] * p + [one] * q]
    rhs = [one, one]
    for c in range(2, ell):
        rows.append([r[c] for r in reds] + [-b[c] for b in blues])
        rhs.append(zero)
    sol = gauss_solve(rows, rhs, ctx)
    if sol is None:
        raise PositionError(
            f"degenerate projected tuple {cand.e_red + cand.e_blue}")
    signs = [ctx.sign(x) for x in sol]
    if any(s == 0 for s in signs):
        raise PositionError(
            f"witness on the hull boundary for tuple {cand.e_red + cand.e_blue}; "
            "projection-level degeneracy")
    if any(s < 0 for s in signs):
        return None
    alpha, beta = sol[:p], sol[p:]
    r_hat = tuple(sum(a * pt[c] for a, pt in zip(alpha, reds)) for c in range(ell))
    b_hat = tuple(sum(b * pt[c] for b, pt in zip(beta, blues)) for c in range(ell))
    return r_hat, b_hat


def orientation_indicator(r_hat, b_hat):
    """Reference point whose side of the candidate hyperplane fixes which
    color is allowed on which side."""
    o = [r_hat[0] + (b_hat[1] - r_hat[1]), r_hat[1] + (r_hat[0] - b_hat[0])]
    o.extend(r_hat[2:])
    return tuple(o)


def resolve_candidate(cand: CandidateSeparator,
                      ctx: NumericContext = EXACT) -> CandidateSeparator:
    """Fill in witness and orientation indicator (witness may be absent)."""
    if cand.o is not None or cand.witness is not None:
        return cand
    w = coincidence_witness(cand, ctx)
    if w is None:
        return cand
    return replace(cand, witness=w, o=orientation_indicator(*w))


def tau(dataset: StochasticDataset, cand: CandidateSeparator,
        ctx: NumericContext = EXACT):
    """Probability that this candidate is the canonical separator of the
    existent points: the on-set exists, and no point sits on a wrong side."""
    cand = resolve_candidate(cand, ctx)
    if cand.witness is None:
        return ctx.zero()
    h = cand.hyperplane
    o_side = h.side(cand.o, ctx)
    if o_side == 0:
        raise PositionError(
            f"orientation indicator on the hyperplane for {cand.e_red + cand.e_blue}")
    e_ids = set(cand.e_red) | set(cand.e_blue)
    forbidden = set()
    drop = cand.drop
    for loc in dataset.locations:
        if loc.id in e_ids:
            continue
        s = h.side(ctx.point(loc.coords[drop:]), ctx)
        if s == 0:
            raise PositionError(
                f"location {loc.id} lies on a candidate hyperplane outside its "
                "spanning tuple; projection-level degeneracy")
        if (loc.color == RED and s == -o_side) or (loc.color == BLUE and s == o_side):
            forbidden.add(loc.id)
    return _scenario_prob(dataset, frozenset(e_ids), frozenset(forbidden), ctx)


# ---------------------------------------------------------------------------
# scan strategy

_CHUNK = 512


def _level_sum_scan(dataset, drop, ctx, threads=1):
    candidates = list(enumerate_candidates(dataset, drop, ctx))
    if threads > 1 and len(candidates) > _CHUNK:
        chunks = [candidates[i:i + _CHUNK] for i in range(0, len(candidates), _CHUNK)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(
                lambda ch: functools.reduce(
                    lambda acc, c: acc + tau(dataset, c, ctx), ch, ctx.zero()),
                chunks))
        total = ctx.zero()
        for part in partials:  # fixed chunk partition and order: reproducible
            total += part
        return total, len(candidates)
    total = ctx.zero()
    for cand in candidates:
        total += tau(dataset, cand, ctx)
    return total, len(candidates)


# ---------------------------------------------------------------------------
# radial-sweep strategy

def _angular_rep(x, y, ctx):
    """Canonical direction mod pi: flip into {x > 0} union {x == 0, y > 0}."""
    sx, sy = ctx.sign(x), ctx.sign(y)
    if sx == 0 and sy == 0:
        return None
    if sx < 0 or (sx == 0 and sy < 0):
        return (-x, -y, True)
    return (x, y, False)


def _angle_cmp(ctx):
    def cmp(a, b):
        cross = a[1][0] * b[1][1] - a[1][1] * b[1][0]
        s = ctx.sign(cross)
        if s == 0:
            raise PositionError(
                f"locations {a[0]} and {b[0]} are angularly coincident around a "
                "spanning flat; projection-level degeneracy")
        return -s  # cross > 0 means a precedes b
    return cmp


class _SideProducts:
    """Product over units of 'none of this unit's locations on side s exist',
    kept per color and side with exact divisions and zero-factor counting."""

    def __init__(self, dataset, ctx, skip_units):
        self.ds = dataset
        self.ctx = ctx
        self.skip = skip_units
        one = ctx.one()
        # state per unit: {side: aggregate}; products keyed (color, side)
        self.sum_or_count = {}
        self.prod = {(RED, 1): one, (RED, -1): one, (BLUE, 1): one, (BLUE, -1): one}
        self.zeros = {(RED, 1): 0, (RED, -1): 0, (BLUE, 1): 0, (BLUE, -1): 0}
        self.side_of_loc = {}

    def _factor(self, unit_idx, side):
        unit = self.ds.units[unit_idx]
        ctx = self.ctx
        agg = self.sum_or_count.get((unit_idx, side))
        if not agg:
            return ctx.one()
        if unit.kind == "multipoint":
            return ctx.one() - agg
        p = unit.prob if ctx.exact else float(unit.prob)
        return ctx.one() - p

    def _mul(self, key, factor):
        if factor == 0:
            self.zeros[key] += 1
        else:
            self.prod[key] = self.prod[key] * factor

    def _div(self, key, factor):
        if factor == 0:
            self.zeros[key] -= 1
        else:
            self.prod[key] = self.prod[key] / factor

    def _update_unit(self, loc, side, delta):
        unit_idx = loc.unit
        unit = self.ds.units[unit_idx]
        tracked = unit_idx not in self.skip
        key = (loc.color, side)
        if tracked:
            old = self._factor(unit_idx, side)
        amount = (loc.prob if self.ctx.exact else float(loc.prob)) \
            if unit.kind == "multipoint" else 1
        cur = self.sum_or_count.get((unit_idx, side), 0)
        self.sum_or_count[(unit_idx, side)] = cur + delta * amount
        if tracked:
            self._div(key, old)
            self._mul(key, self._factor(unit_idx, side))

    def set_side(self, loc, side):
        prev = self.side_of_loc.get(loc.id)
        if prev == side:
            return
        if prev is not None:
            self._update_unit(loc, prev, -1)
        if side is not None:
            self._update_unit(loc, side, +1)
        self.side_of_loc[loc.id] = side

    def product(self, color, side, without_unit=None):
        key = (color, side)
        zeros = self.zeros[key]
        value = self.prod[key]
        if without_unit is not None and without_unit not in self.skip:
            unit = self.ds.units[without_unit]
            if self.ds.loc(unit.members[0]).color == color:
                f = self._factor(without_unit, side)
                if f == 0:
                    zeros -= 1
                else:
                    value = value / f
        if zeros:
            return self.ctx.zero()
        return value

    def occupied(self, unit_idx, side, ignore_loc=None):
        """Does the unit have a location currently on the given side?"""
        unit = self.ds.units[unit_idx]
        for m in unit.members:
            if m == ignore_loc:
                continue
            if self.side_of_loc.get(m) == side:
                return True
        return False


def _presence_factor(dataset, e_locs, ctx, forbidden_side_of, sides):
    """Probability that every on-set location exists, honoring dependence."""
    units_seen = set()
    value = ctx.one()
    for loc in e_locs:
        if loc.unit in units_seen:
            return ctx.zero()  # one uncertain point cannot exist twice
        units_seen.add(loc.unit)
        unit = dataset.units[loc.unit]
        if unit.kind == "point":
            value *= unit.prob if ctx.exact else float(unit.prob)
        elif unit.kind == "multipoint":
            value *= loc.prob if ctx.exact else float(loc.prob)
        else:  # group: every member comes along, none may be forbidden
            bad_side = forbidden_side_of[loc.color]
            if sides.occupied(loc.unit, bad_side):
                return ctx.zero()
            value *= unit.prob if ctx.exact else float(unit.prob)
    return value


def _level_sum_radial(dataset, drop, ctx):
    locs = dataset.locations
    ell = dataset.dimension - drop
    points = {l.id: ctx.point(l.coords[drop:]) for l in locs}
    total = ctx.zero()
    count = 0
    if ell == 2:
        reds = [l for l in locs if l.color == RED]
        blues = [l for l in locs if l.color == BLUE]
        pivots = reds if len(reds) <= len(blues) else blues
        fixed_sets = [(l,) for l in pivots]
    else:
        fixed_sets = [combo for combo in itertools.combinations(locs, ell - 1)
                      if any(l.color == RED for l in combo)
                      and any(l.color == BLUE for l in combo)]
    for fixed in fixed_sets:
        part, n_cands = _sweep_fixed(dataset, fixed, points, ell, ctx)
        total += part
        count += n_cands
    return total, count


def _valid_partner(fixed, cand_loc, ell):
    """Dedup rule: the moving point must be the highest-id location whose
    removal keeps the tuple bichromatic (opposite color of a lone pivot)."""
    if ell == 2:
        return cand_loc.color != fixed[0].color
    n_red = sum(1 for l in fixed if l.color == RED) + (cand_loc.color == RED)
    n_blue = (ell - n_red)
    counts = {RED: n_red, BLUE: n_blue}
    if counts[cand_loc.color] < 2:
        return False
    top = max((l.id for l in fixed if counts[l.color] >= 2), default=-1)
    return cand_loc.id > top


def _sweep_fixed(dataset, fixed, points, ell, ctx):
    fixed_ids = {l.id for l in fixed}
    fixed_units = {l.unit for l in fixed}
    base = points[fixed[0].id]
    dirs = [vsub(points[l.id], base) for l in fixed[1:]]
    comp = nullspace(dirs, ell, ctx)
    if len(comp) != 2:
        raise PositionError(
            f"spanning flat through {sorted(fixed_ids)} is degenerate")
    u, v = comp
    others = []
    for loc in dataset.locations:
        if loc.id in fixed_ids:
            continue
        w = vsub(points[loc.id], base)
        x = sum(a * b for a, b in zip(w, u))
        y = sum(a * b for a, b in zip(w, v))
        rep = _angular_rep(x, y, ctx)
        if rep is None:
            raise PositionError(
                f"location {loc.id} lies on the spanning flat {sorted(fixed_ids)}")
        others.append((loc.id, (rep[0], rep[1]), rep[2], (x, y)))
    others.sort(key=functools.cmp_to_key(_angle_cmp(ctx)))

    sides = _SideProducts(dataset, ctx, fixed_units)
    if not others:
        return ctx.zero(), 0
    g0 = others[0][1]
    for loc_id, _, _, actual in others[1:]:
        s = ctx.sign(g0[0] * actual[1] - g0[1] * actual[0])
        if s == 0:
            raise PositionError(f"location {loc_id} angularly coincident at startup")
        sides.set_side(dataset.loc(loc_id), s)

    total = ctx.zero()
    count = 0
    forbidden_side_of = {}
    for k, (loc_id, rep, _, actual) in enumerate(others):
        cand_loc = dataset.loc(loc_id)
        if k > 0:
            prev_id, _, _, prev_actual = others[k - 1]
            s_prev = ctx.sign(rep[0] * prev_actual[1] - rep[1] * prev_actual[0])
            if s_prev == 0:
                raise PositionError(f"angularly coincident locations near {prev_id}")
            sides.set_side(dataset.loc(prev_id), s_prev)
            sides.set_side(cand_loc, None)
        if _valid_partner(fixed, cand_loc, ell):
            count += 1
            total += _radial_tau(dataset, fixed, cand_loc, rep, base, u, v,
                                 points, ell, ctx, sides, forbidden_side_of)
    return total, count


def _radial_tau(dataset, fixed, cand_loc, rep, base, u, v, points, ell, ctx,
                sides, forbidden_side_of):
    reds = tuple(l for l in fixed + (cand_loc,) if l.color == RED)
    blues = tuple(l for l in fixed + (cand_loc,) if l.color == BLUE)
    cand = _make_candidate(reds, blues, dataset.dimension - ell, ell, ctx)
    cand = resolve_candidate(cand, ctx)
    if cand.witness is None:
        return ctx.zero()
    w_o = vsub(cand.o, base)
    xo = sum(a * b for a, b in zip(w_o, u))
    yo = sum(a * b for a, b in zip(w_o, v))
    o_side = ctx.sign(rep[0] * yo - rep[1] * xo)
    if o_side == 0:
        raise PositionError(
            f"orientation indicator on the hyperplane for {cand.e_red + cand.e_blue}")
    forbidden_side_of[RED] = -o_side
    forbidden_side_of[BLUE] = o_side
    presence = _presence_factor(dataset, fixed + (cand_loc,), ctx,
                                forbidden_side_of, sides)
    if presence == 0:
        return ctx.zero()
    red_prod = sides.product(RED, -o_side, without_unit=cand_loc.unit)
    blue_prod = sides.product(BLUE, o_side, without_unit=cand_loc.unit)
    return presence * red_prod * blue_prod


# ---------------------------------------------------------------------------
# assembled separable-probability

def separable_probability(dataset: StochasticDataset, strategy: str = "scan",
                          ctx: NumericContext = EXACT, threads: int = 1,
                          validate: bool = True, use_kernel: Optional[bool] = None
                          ) -> SPResult:
    """Recurse two coordinates at a time, summing candidate charges per level
    plus the base term where a whole color is absent."""
    _require_points(dataset)
    if strategy not in ("scan", "radial"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if dataset.dimension < 1:
        raise ValueError("dimension must be >= 1")
    if validate:
        dataset.validate_positions(SGPP, max_violations=8).raise_if_failed()

    from . import kernels
    per_level = []
    total = ctx.zero()
    ell = dataset.dimension
    drop = 0
    while ell >= 2:
        if use_kernel is None:
            kernel_ok = kernels.kernel_applicable(dataset, ctx, strategy, threads)
        else:
            kernel_ok = use_kernel and kernels.kernel_applicable(
                dataset, ctx, strategy, threads)
        if kernel_ok:
            tau_sum, count = kernels.level_tau_sum(dataset, drop, ctx.eps)
        elif strategy == "scan":
            tau_sum, count = _level_sum_scan(dataset, drop, ctx, threads)
        else:
            tau_sum, count = _level_sum_radial(dataset, drop, ctx)
        if ell == 2:
            t = trivial_term(dataset, ctx)
            total += t + tau_sum
            per_level.append(LevelStats(ell, t, tau_sum, count))
        else:
            total += tau_sum
            per_level.append(LevelStats(ell, ctx.zero(), tau_sum, count))
        ell -= 2
        drop += 2
    if ell == 1:
        level = [(l.id, l.coords[drop:] if ctx.exact
                  else tuple(float(c) for c in l.coords[drop:]), l.color)
                 for l in dataset.locations]
        t = trivial_term(dataset, ctx)
        base = _base_1d(dataset, level, ctx)
        total += base
        per_level.append(LevelStats(1, t, base - t, len(level)))
    return SPResult(sp=total, per_level=tuple(per_level), strategy=strategy)


# ---------------------------------------------------------------------------
# the canonical separator of one deterministic instance

def extreme_separator(instance, dimension: int) -> ExtremeSeparatorDescriptor:
    """Canonical separator of a deterministic bichromatic instance.

    ``instance`` is a sequence of (id, coords, color).  The instance must be
    strongly separable; one empty color maps to the at-infinity separator.
    """
    from .geometry import check_separable

    items = [(i, tuple(c), col) for i, c, col in instance]
    reds = [(i, c) for i, c, col in items if col == RED]
    blues = [(i, c) for i, c, col in items if col == BLUE]
    if not reds or not blues:
        return ExtremeSeparatorDescriptor(level=0, space_dim=dimension,
                                          kind=AT_INFINITY, separator=None, on_set=())
    ok, _ = check_separable([c for _, c in reds], [c for _, c in blues])
    if not ok:
        raise ValueError("instance is not strongly separable")

    level = 0
    drop = 0
    ell = dimension
    while ell >= 2:
        found = None
        for combo in itertools.combinations(items, ell):
            e_reds = tuple((i, c[drop:]) for i, c, col in combo if col == RED)
            e_blues = tuple((i, c[drop:]) for i, c, col in combo if col == BLUE)
            if not e_reds or not e_blues:
                continue
            cand = _instance_candidate(e_reds, e_blues, items, drop, ell)
            if cand is not None:
                if found is not None:
                    raise PositionError("multiple canonical separators; "
                                        "projection-level degeneracy")
                found = cand
        if found is not None:
            h, on_set, aux = found
            return ExtremeSeparatorDescriptor(level=level, space_dim=ell,
                                              kind="hyperplane", separator=h,
                                              on_set=on_set, aux=aux)
        level += 1
        drop += 2
        ell -= 2
    # 1-D or 0-D bottom: the smallest weak separator is the left color's maximum
    if ell == 0:
        raise PositionError("both colors present in the zero-dimensional projection")
    red_xs = [(c[drop], i) for i, c, col in items if col == RED]
    blue_xs = [(c[drop], i) for i, c, col in items if col == BLUE]
    if max(red_xs)[0] < min(blue_xs)[0]:
        x, i = max(red_xs)
    elif max(blue_xs)[0] < min(red_xs)[0]:
        x, i = max(blue_xs)
    else:
        raise PositionError("projected instance is not separable in R^1")
    return ExtremeSeparatorDescriptor(level=level, space_dim=1, kind="point",
                                      separator=x, on_set=(i,))


def _instance_candidate(e_reds, e_blues, items, drop, ell):
    red_pts = tuple(c for _, c in e_reds)
    blue_pts = tuple(c for _, c in e_blues)
    try:
        h = span_hyperplane(red_pts + blue_pts)
    except Exception:
        raise PositionError("degenerate spanning tuple in instance")
    fake = CandidateSeparator(
        level_dim=ell, drop=drop,
        e_red=tuple(i for i, _ in e_reds), e_blue=tuple(i for i, _ in e_blues),
        red_points=red_pts, blue_points=blue_pts, hyperplane=h,
        aux=(-h.normal[1], h.normal[0]))
    w = coincidence_witness(fake)
    if w is None:
        return None
    o = orientation_indicator(*w)
    o_side = h.side(o)
    if o_side == 0:
        raise PositionError("orientation indicator on the hyperplane")
    e_ids = set(fake.e_red) | set(fake.e_blue)
    for i, c, col in items:
        if i in e_ids:
            continue
        s = h.side(c[drop:])
        if s == 0:
            raise PositionError(f"instance point {i} on a spanning hyperplane")
        if (col == RED and s == -o_side) or (col == BLUE and s == o_side):
            return None
    d_vec = vsub(w[1], w[0])
    aux = (d_vec[0], d_vec[1])
    if aux[0] < 0 or (aux[0] == 0 and aux[1] < 0):
        aux = (-aux[0], -aux[1])
    return h, tuple(sorted(e_ids)), aux
