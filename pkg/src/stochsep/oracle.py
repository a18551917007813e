"""Ground-truth brute force: enumerate every consistent instance and measure.

Separability of point instances is resolved once for the whole subset
lattice: minimal inseparable subsets have at most d+2 points, so marking the
inseparable "cores" and propagating upward classifies all 2^m instances with
a handful of exact hull tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import check_separable, hull_distance_sq, min_norm_point, vsub
from .model import BLUE, RED, StochasticDataset
from .numeric import Q

GUARD_LOCATIONS = 22


class GuardExceeded(RuntimeError):
    pass


def _check_guard(dataset, force):
    m = len(dataset.locations) + sum(len(p.vertices) for p in dataset.polytopes)
    if m > GUARD_LOCATIONS and not force:
        raise GuardExceeded(
            f"{m} locations exceed the brute-force guard of {GUARD_LOCATIONS}; "
            "pass force=True to override")


def _unit_choices(dataset, positions):
    """Per-unit (present-mask, probability) choices; zero-probability branches
    are dropped so every yielded instance has positive probability."""
    all_choices = []
    for unit in dataset.units:
        bits = [1 << positions[m] for m in unit.members]
        if unit.kind == "point":
            choices = [(bits[0], unit.prob)]
            stay = 1 - unit.prob
            if stay:
                choices.append((0, stay))
        elif unit.kind == "multipoint":
            choices = []
            total = Q(0)
            for b, m in zip(bits, unit.members):
                p = dataset.loc(m).prob
                total += p
                choices.append((b, p))
            stay = 1 - total
            if stay:
                choices.append((0, stay))
        elif unit.kind == "group":
            full = 0
            for b in bits:
                full |= b
            choices = [(full, unit.prob)]
            stay = 1 - unit.prob
            if stay:
                choices.append((0, stay))
        else:  # pragma: no cover
            raise ValueError(f"unknown unit kind {unit.kind}")
        all_choices.append(choices)
    return all_choices


def iter_instances(dataset: StochasticDataset):
    """Yield (present-location bitmask, exact probability) for every instance."""
    positions = {loc.id: i for i, loc in enumerate(dataset.locations)}
    choices = _unit_choices(dataset, positions)

    def rec(i, mask, prob):
        if i == len(choices):
            yield mask, prob
            return
        for cmask, cprob in choices[i]:
            yield from rec(i + 1, mask | cmask, prob * cprob)

    yield from rec(0, 0, Q(1))


def separable_table(dataset: StochasticDataset) -> np.ndarray:
    """Boolean array over all 2^m present-masks: is the instance separable?

    Inseparability is monotone under adding points and every minimal
    inseparable subset has at most d+2 points, so it suffices to test the
    small bichromatic subsets exactly and propagate upward in the lattice.
    """
    locs = dataset.locations
    m = len(locs)
    d = dataset.dimension
    red_bits = [i for i, l in enumerate(locs) if l.color == RED]
    blue_bits = [i for i, l in enumerate(locs) if l.color == BLUE]
    insep = np.zeros(1 << m, dtype=bool)
    cores = []
    import itertools
    for r_size in range(1, min(len(red_bits), d + 1) + 1):
        for b_size in range(1, min(len(blue_bits), d + 2 - r_size) + 1):
            for r_combo in itertools.combinations(red_bits, r_size):
                r_pts = [locs[i].coords for i in r_combo]
                r_mask = sum(1 << i for i in r_combo)
                for b_combo in itertools.combinations(blue_bits, b_size):
                    mask = r_mask + sum(1 << i for i in b_combo)
                    if any(core & mask == core for core in cores):
                        continue
                    b_pts = [locs[i].coords for i in b_combo]
                    if not check_separable(r_pts, b_pts)[0]:
                        cores.append(mask)
                        insep[mask] = True
    for i in range(m):
        block = insep.reshape(-1, 2, 1 << i)
        block[:, 1, :] |= block[:, 0, :]
    return ~insep


def brute_sp(dataset: StochasticDataset, force=False):
    """Separable-probability by full instance enumeration (exact for points)."""
    _check_guard(dataset, force)
    dataset = _reduced(dataset)
    if dataset.max_radius() > 0:
        from .objects import instance_ball_separable
        total = 0.0
        for mask, prob in iter_instances(dataset):
            if instance_ball_separable(dataset, mask):
                total += float(prob)
        return total
    sep = separable_table(dataset)
    total = Q(0)
    for mask, prob in iter_instances(dataset):
        if sep[mask]:
            total += prob
    return total


def brute_esm(dataset: StochasticDataset, force=False):
    """Expected separation-margin by full instance enumeration (float)."""
    _check_guard(dataset, force)
    dataset = _reduced(dataset)
    if dataset.max_radius() > 0:
        from .objects import instance_ball_margin
        total = 0.0
        for mask, prob in iter_instances(dataset):
            total += float(prob) * instance_ball_margin(dataset, mask)
        return total
    locs = dataset.locations
    total = 0.0
    for mask, prob in iter_instances(dataset):
        reds = [l.coords for i, l in enumerate(locs) if l.color == RED and mask >> i & 1]
        blues = [l.coords for i, l in enumerate(locs) if l.color == BLUE and mask >> i & 1]
        if not reds or not blues:
            continue
        dist_sq, _, _ = hull_distance_sq(reds, blues)
        if dist_sq:
            total += float(prob) * math.sqrt(float(dist_sq)) / 2.0
    return total


@dataclass(frozen=True)
class MarginCensus:
    margins: tuple       # sorted floats
    count: int
    tier: str            # "exact-squared" | "float-bucket"


def enumerate_margins(dataset: StochasticDataset, force=False) -> MarginCensus:
    """Distinct positive separation-margins over all instances."""
    _check_guard(dataset, force)
    dataset = _reduced(dataset)
    if dataset.max_radius() > 0:
        from .objects import instance_ball_margin
        seen = set()
        for mask, _ in iter_instances(dataset):
            margin = instance_ball_margin(dataset, mask)
            if margin > 0:
                seen.add(round(margin, 12))
        return MarginCensus(tuple(sorted(seen)), len(seen), "float-bucket")
    locs = dataset.locations
    seen = set()
    for mask, _ in iter_instances(dataset):
        reds = [l.coords for i, l in enumerate(locs) if l.color == RED and mask >> i & 1]
        blues = [l.coords for i, l in enumerate(locs) if l.color == BLUE and mask >> i & 1]
        if not reds or not blues:
            continue
        dist_sq, _, _ = hull_distance_sq(reds, blues)
        if dist_sq:
            seen.add(dist_sq / 4)
    margins = tuple(sorted(math.sqrt(float(v)) for v in seen))
    return MarginCensus(margins, len(seen), "exact-squared")


def _reduced(dataset):
    if dataset.polytopes:
        from .objects import reduce_polytopes
        return reduce_polytopes(dataset)
    return dataset


# ---------------------------------------------------------------------------
# ground truth for the convex-hull query applications

def point_in_hull(q, points) -> bool:
    """Exact closed-hull membership via the minimum-norm point of {p - q}."""
    if not points:
        return False
    diffs = [vsub(p, q) for p in points]
    x, _ = min_norm_point(diffs)
    return all(c == 0 for c in x)


def dist_sq_to_hull(q, points):
    """Exact squared distance from q to the convex hull (None if empty hull)."""
    if not points:
        return None
    diffs = [vsub(p, q) for p in points]
    x, _ = min_norm_point(diffs)
    return sum(c * c for c in x)


def brute_sch_membership(dataset: StochasticDataset, q, force=False):
    _check_guard(dataset, force)
    locs = dataset.locations
    total = Q(0)
    for mask, prob in iter_instances(dataset):
        pts = [l.coords for i, l in enumerate(locs) if mask >> i & 1]
        if point_in_hull(q, pts):
            total += prob
    return total


def brute_sch_intersection(dataset: StochasticDataset, polytope_vertices, force=False):
    _check_guard(dataset, force)
    locs = dataset.locations
    total = Q(0)
    for mask, prob in iter_instances(dataset):
        pts = [l.coords for i, l in enumerate(locs) if mask >> i & 1]
        if pts and not check_separable(list(polytope_vertices), pts)[0]:
            total += prob
    return total


def brute_sch_eps_distant(dataset: StochasticDataset, q, eps, force=False):
    _check_guard(dataset, force)
    eps_sq = eps * eps
    locs = dataset.locations
    total = Q(0)
    for mask, prob in iter_instances(dataset):
        pts = [l.coords for i, l in enumerate(locs) if mask >> i & 1]
        d_sq = dist_sq_to_hull(q, pts)
        if d_sq is None or d_sq > eps_sq:
            total += prob
    return total


def brute_sch_expected_distance(dataset: StochasticDataset, q, force=False):
    _check_guard(dataset, force)
    locs = dataset.locations
    total = 0.0
    for mask, prob in iter_instances(dataset):
        pts = [l.coords for i, l in enumerate(locs) if mask >> i & 1]
        d_sq = dist_sq_to_hull(q, pts)
        if d_sq:
            total += float(prob) * math.sqrt(float(d_sq))
    return total
