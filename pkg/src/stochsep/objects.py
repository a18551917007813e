"""Stochastic separability for general objects: polytopes reduce to grouped
vertices; balls get their own probability engines.

Ball geometry mixes exact and float arithmetic honestly: probabilities and
side tests against rational hyperplanes stay exact, while tangent
directions (inherently irrational) are solved numerically with documented
tolerances.  The directional workhorse is the support-function gap

    gap(w) = min over blue balls of (c.w - r)  -  max over red balls of (c.w + r)

whose maximum over unit directions equals the distance between the two
hulls; balls only enter through their interval extents along w.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import dot, norm_sq, vsub
from .model import (BLUE, RED, DatasetError, Location, StochasticDataset, Unit,
                    _scenario_prob)
from .numeric import Q, rat
from .position import GP, SGPP, PositionError, validate_points
from .spengine import (_make_candidate, coincidence_witness,
                       orientation_indicator, trivial_term)
from .numeric import EXACT

TANGENCY_TOL = 1e-9


class UnsupportedDimension(ValueError):
    pass


def _require_ball_dimension(d):
    if d not in (2, 3):
        raise UnsupportedDimension(f"ball engines support d in {{2, 3}}, got d={d}")


# ---------------------------------------------------------------------------
# polytopes

def reduce_polytopes(dataset: StochasticDataset) -> StochasticDataset:
    """Replace each polytope by its vertices as an all-or-none group.

    A probability-1 polytope degenerates to independent always-present
    vertices, so no group is created for it.
    """
    if not dataset.polytopes:
        return dataset
    locations = list(dataset.locations)
    units = list(dataset.units)
    for poly in dataset.polytopes:
        if not poly.vertices:
            raise DatasetError("polytope without vertices")
        if poly.prob == 1:
            for vid, v in zip(poly.vertex_ids, poly.vertices):
                locations.append(Location(id=vid, coords=v, color=poly.color,
                                          prob=poly.prob, unit=len(units)))
                units.append(Unit(kind="point", members=(vid,), prob=poly.prob))
        else:
            unit_idx = len(units)
            units.append(Unit(kind="group", members=tuple(poly.vertex_ids),
                              prob=poly.prob))
            for vid, v in zip(poly.vertex_ids, poly.vertices):
                locations.append(Location(id=vid, coords=v, color=poly.color,
                                          prob=poly.prob, unit=unit_idx))
    return StochasticDataset(dataset.dimension, dataset.model, locations, units)


# ---------------------------------------------------------------------------
# directional extents and hull gaps

def _ball_arrays(balls):
    centers = np.array([[float(c) for c in b[0]] for b in balls], dtype=float)
    radii = np.array([float(b[1]) for b in balls], dtype=float)
    return centers, radii


def _gap_profile(centers_r, radii_r, centers_b, radii_b, dirs):
    """gap(w) for each column direction w (not necessarily unit for d=2 grid)."""
    hi = centers_r @ dirs + radii_r[:, None]
    lo = centers_b @ dirs - radii_b[:, None]
    return lo.min(axis=0) - hi.max(axis=0)


def _gap_at(centers_r, radii_r, centers_b, radii_b, w):
    hi = centers_r @ w + radii_r
    lo = centers_b @ w - radii_b
    return lo.min() - hi.max()


def _candidate_angles_2d(cr, rr, cb, rb):
    """Angles that can carry the maximum directional gap: stationary
    directions of red-blue center differences plus envelope switch angles
    of same-color pairs."""
    angles = []
    for i in range(len(cr)):
        for j in range(len(cb)):
            v = cb[j] - cr[i]
            a = math.atan2(v[1], v[0])
            angles.append(a)
            angles.append(a + math.pi)
    for cs, rs in ((cr, rr), (cb, rb)):
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                v = cs[i] - cs[j]
                amp = math.hypot(v[0], v[1])
                if amp == 0.0:
                    continue
                phi = math.atan2(v[1], v[0])
                for b in (rs[j] - rs[i], rs[i] - rs[j]):
                    c = b / amp
                    if -1.0 <= c <= 1.0:
                        alpha = math.acos(c)
                        angles.append(phi + alpha)
                        angles.append(phi - alpha)
    return angles


def ball_max_gap_2d(red_balls, blue_balls):
    """Maximum directional gap between two hulls of disks, with direction.

    Positive iff the hulls are disjoint; equals twice the separation margin.
    The gap profile is a piecewise sinusoid, so its maximum sits at a
    stationary or switch angle, all of which are enumerated in closed form.
    """
    cr, rr = _ball_arrays(red_balls)
    cb, rb = _ball_arrays(blue_balls)
    angles = _candidate_angles_2d(cr, rr, cb, rb)
    dirs = np.vstack([np.cos(angles), np.sin(angles)])
    gaps = _gap_profile(cr, rr, cb, rb, dirs)
    k = int(np.argmax(gaps))
    return float(gaps[k]), dirs[:, k].copy()


def _fibonacci_sphere(n):
    k = np.arange(n)
    phi = math.pi * (3.0 - math.sqrt(5.0))
    y = 1.0 - 2.0 * (k + 0.5) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - y * y))
    theta = phi * k
    return np.vstack([r * np.cos(theta), y, r * np.sin(theta)])


def ball_max_gap_3d(red_balls, blue_balls, grid=1024):
    from scipy.optimize import minimize

    cr, rr = _ball_arrays(red_balls)
    cb, rb = _ball_arrays(blue_balls)
    dirs = _fibonacci_sphere(grid)
    gaps = _gap_profile(cr, rr, cb, rb, dirs)
    order = np.argsort(gaps)[::-1][:6]

    def neg(angles):
        t, p = angles
        w = np.array([math.sin(t) * math.cos(p), math.sin(t) * math.sin(p),
                      math.cos(t)])
        return -_gap_at(cr, rr, cb, rb, w)

    best_val = -math.inf
    best_w = dirs[:, order[0]]
    for k in order:
        w0 = dirs[:, k]
        t0 = math.acos(max(-1.0, min(1.0, w0[2])))
        p0 = math.atan2(w0[1], w0[0])
        res = minimize(neg, np.array([t0, p0]), method="Nelder-Mead",
                       options={"xatol": 1e-13, "fatol": 1e-14, "maxiter": 400})
        if -res.fun > best_val:
            best_val = -res.fun
            t, p = res.x
            best_w = np.array([math.sin(t) * math.cos(p),
                               math.sin(t) * math.sin(p), math.cos(t)])
    return best_val, best_w


def ball_max_gap(red_balls, blue_balls):
    d = len(red_balls[0][0]) if red_balls else len(blue_balls[0][0])
    _require_ball_dimension(d)
    if d == 2:
        return ball_max_gap_2d(red_balls, blue_balls)
    return ball_max_gap_3d(red_balls, blue_balls)


def ball_separability_check(red_balls, blue_balls) -> bool:
    """Do the convex hulls of the two ball families stay disjoint?

    Zero-radius-only input is confirmed with the exact point predicate.
    """
    if not red_balls or not blue_balls:
        return True
    if all(b[1] == 0 for b in itertools.chain(red_balls, blue_balls)):
        from .geometry import check_separable
        return check_separable([tuple(rat(c) for c in b[0]) for b in red_balls],
                               [tuple(rat(c) for c in b[0]) for b in blue_balls])[0]
    gap, _ = ball_max_gap(red_balls, blue_balls)
    return gap > 0


# ---------------------------------------------------------------------------
# per-instance ball oracle (shared by the brute-force module)

class BallInstanceOracle:
    """Per-instance separability and margin for one ball dataset."""

    def __init__(self, dataset: StochasticDataset):
        _require_ball_dimension(dataset.dimension)
        self.ds = dataset
        locs = dataset.locations
        self.is_red = np.array([l.color == RED for l in locs])
        self.centers = np.array([[float(c) for c in l.coords] for l in locs])
        self.radii = np.array([float(l.radius) for l in locs])
        self.d = dataset.dimension

    def _split(self, mask):
        idx = [i for i in range(len(self.is_red)) if mask >> i & 1]
        reds = [i for i in idx if self.is_red[i]]
        blues = [i for i in idx if not self.is_red[i]]
        return reds, blues

    def max_gap(self, mask):
        """Best directional gap for the instance; None if a color is absent."""
        reds, blues = self._split(mask)
        if not reds or not blues:
            return None
        red_balls = [(self.centers[i], self.radii[i]) for i in reds]
        blue_balls = [(self.centers[i], self.radii[i]) for i in blues]
        if self.d == 3:
            gap, _ = ball_max_gap_3d(red_balls, blue_balls)
            return gap
        gap, _ = ball_max_gap_2d(red_balls, blue_balls)
        return gap

    def separable(self, mask) -> bool:
        gap = self.max_gap(mask)
        return True if gap is None else gap > 0

    def margin(self, mask) -> float:
        gap = self.max_gap(mask)
        if gap is None or gap <= 0:
            return 0.0
        return gap / 2.0


def instance_ball_separable(dataset, mask) -> bool:
    return BallInstanceOracle(dataset).separable(mask)


def instance_ball_margin(dataset, mask) -> float:
    return BallInstanceOracle(dataset).margin(mask)


# ---------------------------------------------------------------------------
# ball general position validation (pragmatic, tolerance-based where needed)

def validate_ball_positions(dataset: StochasticDataset, tol=1e-7):
    """Reject the degeneracies the ball engines cannot answer through:
    coincident centers, (near-)tangent ball pairs, shared projected
    endpoints, and position failures of the 0-radius subset.

    Deeper coincidences (a ball tangent to a candidate separator, ties on a
    spanning hyperplane) are detected exactly where they matter and raise
    from inside the engines.
    """
    _require_ball_dimension(dataset.dimension)
    locs = dataset.locations
    for a, b in itertools.combinations(locs, 2):
        if a.coords == b.coords:
            raise PositionError(f"balls {a.id} and {b.id} share a center")
    zero = [l for l in locs if l.radius == 0]
    if zero:
        validate_points([l.coords for l in zero], SGPP,
                        ids=[l.id for l in zero]).raise_if_failed()
    for a, b in itertools.combinations(locs, 2):
        if a.radius == 0 and b.radius == 0:
            continue
        gap_sq = norm_sq(vsub(a.coords, b.coords))
        touch = (a.radius + b.radius) ** 2
        inner = (a.radius - b.radius) ** 2
        if abs(float(gap_sq) - float(touch)) < tol or \
           abs(float(gap_sq) - float(inner)) < tol:
            raise PositionError(f"balls {a.id} and {b.id} are (near-)tangent")
    if dataset.dimension == 3:
        ends = {}
        for l in locs:
            for e in (l.coords[2] - l.radius, l.coords[2] + l.radius):
                if e in ends and l.radius + dataset.loc(ends[e]).radius > 0:
                    raise PositionError(
                        f"balls {ends[e]} and {l.id} share a projected endpoint")
                ends[e] = l.id
    return True


# ---------------------------------------------------------------------------
# critical sets: the canonical tangent separator of a constant-size ball set

def _u_star_basis(phi, d):
    """Orthonormal basis of the subspace a*x1 + b*x2 = 0 for axis (a, b) =
    (cos phi, sin phi); first basis vector lies in the x1x2-plane."""
    s = np.array([-math.sin(phi), math.cos(phi)])
    if d == 2:
        return s.reshape(2, 1)
    basis = np.zeros((3, 2))
    basis[:2, 0] = s
    basis[2, 1] = 1.0
    return basis


def _projected_balls(balls, phi, d):
    basis = _u_star_basis(phi, d)
    return [(np.asarray(c, dtype=float) @ basis, r) for c, r in balls]


def _capsule_point_dist(c1, r1, c2, r2, x, rx):
    """Distance from disk (x, rx) to the hull of disks (c1,r1),(c2,r2)."""
    def f(t):
        ct = (1 - t) * c1 + t * c2
        rt = (1 - t) * r1 + t * r2
        return float(np.linalg.norm(x - ct)) - rt - rx
    # f is convex in t: ternary search
    lo, hi = 0.0, 1.0
    for _ in range(200):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if f(m1) <= f(m2):
            hi = m2
        else:
            lo = m1
    t = (lo + hi) / 2.0
    return f(t), t


def _dist_hulls_small(red_balls, blue_balls):
    reds = [(np.asarray(c, dtype=float), float(r)) for c, r in red_balls]
    blues = [(np.asarray(c, dtype=float), float(r)) for c, r in blue_balls]
    if len(reds) == 1 and len(blues) == 1:
        (c1, r1), (c2, r2) = reds[0], blues[0]
        return float(np.linalg.norm(c1 - c2)) - r1 - r2
    if len(reds) == 1:
        (x, rx) = reds[0]
        (c1, r1), (c2, r2) = blues
        return _capsule_point_dist(c1, r1, c2, r2, x, rx)[0]
    if len(blues) == 1:
        (x, rx) = blues[0]
        (c1, r1), (c2, r2) = reds
        return _capsule_point_dist(c1, r1, c2, r2, x, rx)[0]
    return ball_max_gap_2d(red_balls, blue_balls)[0]


def _boundary_gap(balls_red, balls_blue, phi, d):
    """Separation gap of the balls projected onto the subspace at axis angle
    phi: 1-D interval gap for d=2, small 2-D hull gap for d=3."""
    pr = _projected_balls(balls_red, phi, d)
    pb = _projected_balls(balls_blue, phi, d)
    if d == 2:
        hi_r = max(float(c[0]) + r for c, r in pr)
        lo_r = min(float(c[0]) - r for c, r in pr)
        hi_b = max(float(c[0]) + r for c, r in pb)
        lo_b = min(float(c[0]) - r for c, r in pb)
        return max(lo_b - hi_r, lo_r - hi_b)
    return _dist_hulls_small(pr, pb)


def critical_extreme_separator(red_balls, blue_balls, d,
                               grid=720) -> Optional[tuple]:
    """Canonical tangent separator of a constant-size bichromatic ball set.

    Scans the axis angle for the boundary where the projected hulls switch
    from strictly separated to overlapping as the angle increases, bisects
    it to ~1e-13, and reconstructs the unique weak separator there.  Returns
    (normal, offset, axis_phi) with |normal| = 1, or None when the set is
    never or always separable in projection (the separator is then trivial
    or recursively defined and the set cannot be a critical set).
    """
    _require_ball_dimension(d)
    if not red_balls or not blue_balls:
        return None
    if d == 2 and len(red_balls) == 1 and len(blue_balls) == 1:
        return _pair_critical_2d(red_balls[0], blue_balls[0])

    def g(phi):
        return _boundary_gap(red_balls, blue_balls, phi, d)

    phis = np.linspace(0.0, math.pi, grid, endpoint=False)
    vals = np.array([g(p) for p in phis])
    pos = vals > 0
    if pos.all() or (~pos).all():
        return None
    # downward crossings: separated at phi, overlapping at the next sample
    crossings = []
    for k in range(grid):
        nxt = (k + 1) % grid
        if pos[k] and not pos[nxt]:
            crossings.append(k)
    if len(crossings) != 1:
        raise PositionError("projected separability boundary is ambiguous; "
                            "near-degenerate ball configuration")
    k = crossings[0]
    lo = phis[k]
    hi = phis[k] + math.pi / grid
    for _ in range(100):
        mid = (lo + hi) / 2.0
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    phi_star = (lo + hi) / 2.0
    return _weak_separator_at(red_balls, blue_balls, phi_star, d)


def _pair_critical_2d(red, blue):
    """Closed-form canonical tangent line of one red and one blue disk.

    The projected intervals touch where the center-difference projection
    equals the radius sum; of the two internal tangents, the one where the
    projected gap is decreasing in the sweep angle is canonical.
    """
    c_r = np.asarray(red[0], dtype=float)
    c_b = np.asarray(blue[0], dtype=float)
    dsum = float(red[1]) + float(blue[1])
    v = c_r - c_b
    amp = math.hypot(v[0], v[1])
    if amp <= dsum:
        return None   # hulls overlap in every projection
    psi = math.atan2(v[1], v[0]) + math.acos(dsum / amp)
    phi_axis = (psi - math.pi / 2.0) % math.pi
    return _weak_separator_at([red], [blue], phi_axis, 2)


def _weak_separator_at(red_balls, blue_balls, phi, d):
    basis = _u_star_basis(phi, d)
    pr = _projected_balls(red_balls, phi, d)
    pb = _projected_balls(blue_balls, phi, d)
    if d == 2:
        hi_r = max(float(c[0]) + r for c, r in pr)
        lo_r = min(float(c[0]) - r for c, r in pr)
        hi_b = max(float(c[0]) + r for c, r in pb)
        lo_b = min(float(c[0]) - r for c, r in pb)
        if abs(lo_b - hi_r) <= abs(lo_r - hi_b):
            w2 = np.array([1.0])
            level = (hi_r + lo_b) / 2.0
        else:
            w2 = np.array([-1.0])
            level = -(hi_b + lo_r) / 2.0
    else:
        w2, level = _touch_line_2d(pr, pb)
    normal = basis @ w2
    return normal, level, phi


def _touch_line_2d(pr, pb):
    """Unit direction and level of the touching support line between two
    planar disk hulls with (near-)zero gap, blues on the positive side.

    The best-gap direction handles every touch structure uniformly,
    including touches on the straight tangent-segment parts of a
    mixed-radius hull boundary."""
    _, w = ball_max_gap_2d(pr, pb)
    hi = max(float(np.dot(w, np.asarray(c, dtype=float))) + r for c, r in pr)
    lo = min(float(np.dot(w, np.asarray(c, dtype=float))) - r for c, r in pb)
    return w, (hi + lo) / 2.0


# ---------------------------------------------------------------------------
# lambda terms and ball separable-probability

def _exact_plane_side_data(dataset, normal_q, offset_q, member_ids):
    """Exact classification of every off-tuple ball against a rational
    hyperplane: location id -> side sign, with 0 for a proper crossing."""
    nn = norm_sq(normal_q)
    sides = {}
    for loc in dataset.locations:
        if loc.id in member_ids:
            continue
        val = dot(normal_q, loc.coords) - offset_q
        cut_sq = loc.radius * loc.radius * nn
        if val * val < cut_sq:
            sides[loc.id] = 0          # properly intersects the hyperplane
        elif val * val == cut_sq:
            raise PositionError(f"ball {loc.id} tangent to a candidate separator")
        else:
            sides[loc.id] = 1 if val > 0 else -1
    return sides


def lambda_point_case(dataset: StochasticDataset, member_locs, ctx=EXACT):
    """Charge of an all-zero-radius spanning tuple: the point conditions plus
    absence of every ball properly cut by the tuple's hyperplane."""
    reds = tuple(l for l in member_locs if l.color == RED)
    blues = tuple(l for l in member_locs if l.color == BLUE)
    cand = _make_candidate(reds, blues, 0, dataset.dimension, ctx)
    w = coincidence_witness(cand, ctx)
    if w is None:
        return Q(0)
    o = orientation_indicator(*w)
    h = cand.hyperplane
    o_side = h.side(o, ctx)
    if o_side == 0:
        raise PositionError("orientation indicator on the candidate hyperplane")
    member_ids = {l.id for l in member_locs}
    sides = _exact_plane_side_data(dataset, h.normal, h.offset, member_ids)
    forbidden = set()
    for loc_id, s in sides.items():
        loc = dataset.loc(loc_id)
        if s == 0:
            forbidden.add(loc_id)
        elif (loc.color == RED and s == -o_side) or \
             (loc.color == BLUE and s == o_side):
            forbidden.add(loc_id)
    return _scenario_prob(dataset, frozenset(member_ids), frozenset(forbidden))


def lambda_critical(dataset: StochasticDataset, member_locs, normal, offset,
                    tol=TANGENCY_TOL):
    """Charge of a tangency-defined critical set: members exist, tangency
    residuals stay small, and every ball cut by or wrongly sided against the
    separator is absent."""
    n = np.asarray(normal, dtype=float)
    ref = next(l for l in member_locs if l.radius > 0)
    for l in member_locs:
        resid = abs(abs(float(np.dot(n, [float(c) for c in l.coords])) - offset)
                    - float(l.radius))
        if resid > tol * (1.0 + float(l.radius)):
            return Q(0)   # not all members tangent: not a critical set
    ref_side = 1 if float(np.dot(n, [float(c) for c in ref.coords])) - offset > 0 else -1
    member_ids = {l.id for l in member_locs}
    forbidden = set()
    for loc in dataset.locations:
        if loc.id in member_ids:
            continue
        val = float(np.dot(n, [float(c) for c in loc.coords])) - offset
        if abs(val) < float(loc.radius) - tol:
            forbidden.add(loc.id)       # properly cut by the separator
            continue
        if abs(abs(val) - float(loc.radius)) <= tol:
            raise PositionError(f"ball {loc.id} near-tangent to a critical separator")
        s = 1 if val > 0 else -1
        same_color = loc.color == ref.color
        if (same_color and s != ref_side) or (not same_color and s == ref_side):
            forbidden.add(loc.id)
    return _scenario_prob(dataset, frozenset(member_ids), frozenset(forbidden))


def _interval_sp_1d(dataset, coord_index):
    """Exact separable-probability of the 1-D interval projection, charging
    the left color's largest right endpoint."""
    level = []
    for l in dataset.locations:
        lo = l.coords[coord_index] - l.radius
        hi = l.coords[coord_index] + l.radius
        level.append((l.id, lo, hi, l.color))
    his = {}
    for loc_id, lo, hi, color in level:
        if hi in his:
            raise PositionError(
                f"locations {his[hi]} and {loc_id} share a projected endpoint")
        his[hi] = loc_id
    total = trivial_term(dataset)
    for loc_id, lo, hi, color in level:
        same_above = frozenset(i for i, l2, h2, c2 in level
                               if c2 == color and h2 > hi)
        opp_below = frozenset(i for i, l2, h2, c2 in level
                              if c2 != color and l2 < hi)
        opp_above = frozenset(i for i, l2, h2, c2 in level
                              if c2 != color and l2 > hi)
        if len(opp_below) + len(opp_above) != sum(1 for _, _, _, c2 in level
                                                  if c2 != color):
            raise PositionError(f"interval endpoint tie at location {loc_id}")
        present = frozenset((loc_id,))
        left_ok = _scenario_prob(dataset, present, same_above | opp_below)
        all_gone = _scenario_prob(dataset, present, same_above | opp_below | opp_above)
        total += left_ok - all_gone
    return total


def ball_separable_probability(dataset: StochasticDataset, validate=True):
    """Separable-probability of a ball dataset (d = 2 or 3), exact in the
    probability arithmetic; tangent separators are located numerically."""
    dataset = reduce_polytopes(dataset)
    d = dataset.dimension
    _require_ball_dimension(d)
    if validate:
        validate_ball_positions(dataset)
    locs = dataset.locations
    total = _interval_sp_1d(dataset, 2) if d == 3 else trivial_term(dataset)
    for size in range(2, d + 1):
        for combo in itertools.combinations(locs, size):
            reds = [l for l in combo if l.color == RED]
            blues = [l for l in combo if l.color == BLUE]
            if not reds or not blues:
                continue
            if all(l.radius == 0 for l in combo):
                if size == d:
                    total += lambda_point_case(dataset, combo)
                continue
            sep = critical_extreme_separator(
                [(l.coords, float(l.radius)) for l in reds],
                [(l.coords, float(l.radius)) for l in blues], d)
            if sep is None:
                continue
            normal, offset, _ = sep
            total += lambda_critical(dataset, combo, normal, offset)
    return total


# ---------------------------------------------------------------------------
# ball expected separation-margin

@dataclass(frozen=True)
class BallSupportConfig:
    member_ids: tuple
    omega: tuple          # unit normal, red side negative
    level_red: float      # omega . x on the red support plane
    level_blue: float
    margin: float
    xi: object = None


def _tangency_plane_pairs(t_reds, t_blues, d, tol=1e-12):
    """Solve for parallel planes tangent to the tuple (reds from below,
    blues from above): at most two unit normals."""
    rows = []
    rhs = []
    r0 = t_reds[0]
    for l in t_reds[1:]:
        rows.append([float(a) - float(b) for a, b in zip(l.coords, r0.coords)])
        rhs.append(-(float(l.radius) - float(r0.radius)))
    b0 = t_blues[0]
    for l in t_blues[1:]:
        rows.append([float(a) - float(b) for a, b in zip(l.coords, b0.coords)])
        rhs.append(float(l.radius) - float(b0.radius))
    a = np.array(rows, dtype=float)
    b = np.array(rhs, dtype=float)
    if a.shape[0] != d - 1:
        raise PositionError("tuple does not determine a plane direction")
    # particular solution and null direction of the (d-1) x d system
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    _, s, vt = np.linalg.svd(a)
    if s.min() < 1e-12 * max(1.0, s.max()):
        raise PositionError("degenerate tangency system")
    null = vt[-1]
    # |omega|^2 = 1: quadratic in t for omega = sol + t * null
    aa = float(null @ null)
    bb = 2.0 * float(sol @ null)
    cc = float(sol @ sol) - 1.0
    disc = bb * bb - 4.0 * aa * cc
    if disc < 0:
        return []
    if disc < tol * max(1.0, bb * bb):
        raise PositionError("tangency system has a (near-)double root")
    out = []
    for sgn in (1.0, -1.0):
        t = (-bb + sgn * math.sqrt(disc)) / (2.0 * aa)
        w = sol + t * null
        lr = float(w @ [float(c) for c in r0.coords]) + float(r0.radius)
        lb = float(w @ [float(c) for c in b0.coords]) - float(b0.radius)
        if lr < lb:   # reds end below the corridor, blues start above it
            out.append((w, lr, lb))
    return out


def _ball_self_supported(c_red, c_blue, d, tol=TANGENCY_TOL):
    """Max-margin data if the ball set supports itself: every member tangent
    to its side's support plane; returns (omega, level_r, level_b) or None."""
    gap, w = ball_max_gap([(l.coords, float(l.radius)) for l in c_red],
                          [(l.coords, float(l.radius)) for l in c_blue])
    if gap <= tol:
        return None
    tops = [float(np.dot(w, [float(c) for c in l.coords])) + float(l.radius)
            for l in c_red]
    bots = [float(np.dot(w, [float(c) for c in l.coords])) - float(l.radius)
            for l in c_blue]
    level_r = max(tops)
    level_b = min(bots)
    scale = 1.0 + max(abs(level_r), abs(level_b))
    if any(level_r - t > tol * scale for t in tops):
        return None
    if any(b - level_b > tol * scale for b in bots):
        return None
    return w, level_r, level_b


def _ball_xi(dataset, member_locs, w, level_r, level_b, tol=TANGENCY_TOL):
    member_ids = {l.id for l in member_locs}
    forbidden = set()
    scale = 1.0 + max(abs(level_r), abs(level_b))
    for loc in dataset.locations:
        if loc.id in member_ids:
            continue
        v = float(np.dot(w, [float(c) for c in loc.coords]))
        top = v + float(loc.radius)
        bot = v - float(loc.radius)
        if loc.color == RED:
            if top > level_r - tol * scale:
                forbidden.add(loc.id)
        else:
            if bot < level_b + tol * scale:
                forbidden.add(loc.id)
    return _scenario_prob(dataset, frozenset(member_ids), frozenset(forbidden))


def _enumerate_ball_configs(dataset):
    """Yield (member locations, unit normal, red level, blue level) for every
    possible ball support set, each exactly once.

    Same two-class scheme as the point engine: small sets that support
    themselves, then larger sets through the tangent plane pairs of their
    lowest-labelled tuple."""
    d = dataset.dimension
    locs = dataset.locations
    reds = [l for l in locs if l.color == RED]
    blues = [l for l in locs if l.color == BLUE]
    if not reds or not blues:
        return
    for size in range(2, d + 1):
        for r_count in range(1, size):
            for r_combo in itertools.combinations(reds, r_count):
                for b_combo in itertools.combinations(blues, size - r_count):
                    got = _ball_self_supported(r_combo, b_combo, d)
                    if got is not None:
                        w, lr, lb = got
                        yield list(r_combo) + list(b_combo), w, lr, lb
    for combo in itertools.combinations(locs, d + 1):
        t_reds = [l for l in combo if l.color == RED]
        t_blues = [l for l in combo if l.color == BLUE]
        if not t_reds or not t_blues:
            continue
        top = max(l.id for l in combo)
        for w, lr, lb in _tangency_plane_pairs(t_reds, t_blues, d):
            scale = 1.0 + max(abs(lr), abs(lb))
            extra_reds = [l for l in reds if l.id > top and abs(
                float(np.dot(w, [float(c) for c in l.coords]))
                + float(l.radius) - lr) <= TANGENCY_TOL * scale]
            extra_blues = [l for l in blues if l.id > top and abs(
                float(np.dot(w, [float(c) for c in l.coords]))
                - float(l.radius) - lb) <= TANGENCY_TOL * scale]
            for r_extra in _subsets(extra_reds):
                for b_extra in _subsets(extra_blues):
                    c_red = list(t_reds) + list(r_extra)
                    c_blue = list(t_blues) + list(b_extra)
                    got = _ball_self_supported(c_red, c_blue, d)
                    if got is None:
                        continue
                    w2, lr2, lb2 = got
                    if abs(lr2 - lr) > 1e-7 * scale or abs(lb2 - lb) > 1e-7 * scale:
                        continue
                    yield c_red + c_blue, w2, lr2, lb2


def ball_support_configs(dataset: StochasticDataset):
    """Possible ball support sets with their plane data and probabilities."""
    dataset = reduce_polytopes(dataset)
    _require_ball_dimension(dataset.dimension)
    for members, w, lr, lb in _enumerate_ball_configs(dataset):
        yield BallSupportConfig(
            member_ids=tuple(sorted(l.id for l in members)),
            omega=tuple(float(x) for x in w),
            level_red=lr, level_blue=lb, margin=(lb - lr) / 2.0,
            xi=_ball_xi(dataset, members, w, lr, lb))


def ball_expected_margin(dataset: StochasticDataset, validate=True):
    """Expected separation-margin of a ball dataset by support-set
    enumeration over tangent plane pairs."""
    dataset = reduce_polytopes(dataset)
    _require_ball_dimension(dataset.dimension)
    if validate:
        validate_ball_positions(dataset)
    total = 0.0
    for members, w, lr, lb in _enumerate_ball_configs(dataset):
        x = _ball_xi(dataset, members, w, lr, lb)
        total += float(x) * (lb - lr) / 2.0
    return total


def _subsets(items):
    for k in range(len(items) + 1):
        yield from itertools.combinations(items, k)


# ---------------------------------------------------------------------------
# seeded ball generator with robustness rejection

def gen_balls(n_red, n_blue, d, seed=0, zero_radius_share=0.3,
              decision_margin=1e-3) -> StochasticDataset:
    """Random ball dataset whose every instance decides separability with a
    directional-gap magnitude above decision_margin, so float engines and
    the oracle cannot disagree on the discrete structure."""
    import random as _random

    _require_ball_dimension(d)
    rng = _random.Random(seed)
    grid = 8192 if d == 2 else 4096
    for _ in range(500):
        locations = []
        units = []
        for k in range(n_red + n_blue):
            color = RED if k < n_red else BLUE
            coords = tuple(Q(rng.randint(-800, 800), 100) for _ in range(d))
            if rng.random() < zero_radius_share:
                radius = Q(0)
            else:
                radius = Q(rng.randint(30, 180), 100)
            prob = Q(rng.randint(1, 16), 16)
            locations.append(Location(id=k, coords=coords, color=color, prob=prob,
                                      radius=radius, unit=k,
                                      kind="ball" if radius > 0 else "point"))
            units.append(Unit(kind="point", members=(k,), prob=prob))
        ds = StochasticDataset(d, "unipoint", locations, units)
        try:
            validate_points([l.coords for l in locations], GP,
                            max_violations=1).raise_if_failed()
            validate_ball_positions(ds, tol=decision_margin)
        except PositionError:
            continue
        if _instances_decisive(ds, grid, decision_margin):
            return ds
    raise DatasetError("failed to draw a robust ball dataset")


def _instances_decisive(dataset, grid, margin):
    """Grid screen: every instance's best gap magnitude clears the margin.

    The grid maximum underestimates the true maximum by at most the
    Lipschitz bound times the step, which the screen adds on the overlap
    side, so acceptance is conservative."""
    locs = dataset.locations
    m = len(locs)
    centers = np.array([[float(c) for c in l.coords] for l in locs])
    radii = np.array([float(l.radius) for l in locs])
    is_red = np.array([l.color == RED for l in locs])
    if dataset.dimension == 2:
        thetas = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
        dirs = np.vstack([np.cos(thetas), np.sin(thetas)])
        step = 2 * math.pi / grid
    else:
        dirs = _fibonacci_sphere(grid)
        step = 4.0 / math.sqrt(grid)
    lip = float(np.abs(centers).sum(axis=1).max()) * 2.0 + 1.0
    proj = centers @ dirs
    highs = proj + radii[:, None]
    lows = proj - radii[:, None]
    for mask in range(1 << m):
        r = [i for i in range(m) if mask >> i & 1 and is_red[i]]
        b = [i for i in range(m) if mask >> i & 1 and not is_red[i]]
        if not r or not b:
            continue
        best = float((lows[b].min(axis=0) - highs[r].max(axis=0)).max())
        if -margin - lip * step < best < margin:
            return False
    return True
