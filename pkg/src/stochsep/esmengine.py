"""Expected separation-margin engine.

Every separable instance with both colors present has a unique support set:
the points at exactly the minimum distance from its maximum-margin
separator.  The expectation is therefore a sum over possible support sets C
of xi(C) * margin(C), where xi(C) is the probability that C is that support
set.  Sets of size up to d are enumerated directly and validated by
checking they support themselves; larger sets are reached through their
lowest-labelled (d+1)-subset, which pins down the parallel support planes
and hence the at-most-2d on-plane points the set can draw from.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Iterator

from .geometry import Hyperplane, dot, max_margin_separator, nullspace, vsub
from .model import BLUE, RED, StochasticDataset, _scenario_prob
from .numeric import Q
from .position import GP, PositionError


@dataclass(frozen=True)
class SupportConfig:
    c_red: tuple                 # location ids on the red support plane
    c_blue: tuple
    normal: tuple                # shared normal, oriented red -> blue
    offset_red: object           # n.x = offset_red on the red plane
    offset_blue: object
    margin: float
    margin_sq: object            # exact rational
    xi: object = None

    @property
    def plane_red(self) -> Hyperplane:
        return Hyperplane(self.normal, self.offset_red)

    @property
    def plane_blue(self) -> Hyperplane:
        return Hyperplane(self.normal, self.offset_blue)

    @property
    def separator(self) -> Hyperplane:
        return Hyperplane(self.normal, (self.offset_red + self.offset_blue) / Q(2))

    @property
    def size(self) -> int:
        return len(self.c_red) + len(self.c_blue)


@dataclass(frozen=True)
class ESMResult:
    emar: float
    config_count: int
    xi_sum: object               # exact rational
    configs: tuple               # SupportConfig with xi set


def _require_points(dataset):
    if dataset.polytopes or dataset.max_radius() > 0:
        raise ValueError("point-dataset engine; use the object engine for balls")


def _self_supported(red_pts, blue_pts):
    """Margin data if the set is exactly its own support set, else None."""
    mm = max_margin_separator(list(red_pts), list(blue_pts))
    if mm is None:
        return None
    if len(mm.support_reds) != len(red_pts) or len(mm.support_blues) != len(blue_pts):
        return None
    return mm


def _oriented_planes(mm, red_pt, blue_pt):
    n = mm.separator.normal
    if dot(n, blue_pt) < dot(n, red_pt):
        n = tuple(-c for c in n)
    return n, dot(n, red_pt), dot(n, blue_pt)


def enumerate_support_configs(dataset: StochasticDataset) -> Iterator[SupportConfig]:
    """Every possible support set, each exactly once (xi unset).

    Labels are location ids (input file order); a set larger than d+1 is
    emitted only from its d+1 smallest labels, which keeps the enumeration
    duplicate-free.
    """
    _require_points(dataset)
    d = dataset.dimension
    locs = dataset.locations
    reds = [l for l in locs if l.color == RED]
    blues = [l for l in locs if l.color == BLUE]
    if not reds or not blues:
        return

    # sizes 2..d: sets that are their own support set
    for size in range(2, d + 1):
        for r_count in range(1, size):
            b_count = size - r_count
            for r_combo in itertools.combinations(reds, r_count):
                for b_combo in itertools.combinations(blues, b_count):
                    mm = _self_supported([l.coords for l in r_combo],
                                         [l.coords for l in b_combo])
                    if mm is None:
                        continue
                    n, c_r, c_b = _oriented_planes(mm, r_combo[0].coords,
                                                   b_combo[0].coords)
                    yield SupportConfig(
                        c_red=tuple(l.id for l in r_combo),
                        c_blue=tuple(l.id for l in b_combo),
                        normal=n, offset_red=c_r, offset_blue=c_b,
                        margin=mm.margin, margin_sq=mm.margin_sq)

    # sizes >= d+1 via their smallest-label (d+1)-tuple
    for combo in itertools.combinations(locs, d + 1):
        t_reds = [l for l in combo if l.color == RED]
        t_blues = [l for l in combo if l.color == BLUE]
        if not t_reds or not t_blues:
            continue
        planes = _parallel_planes(t_reds, t_blues, d)
        if planes is None:
            continue
        n, c_r, c_b = planes
        top = max(l.id for l in combo)
        extra_reds = [l for l in reds
                      if l.id > top and dot(n, l.coords) == c_r]
        extra_blues = [l for l in blues
                       if l.id > top and dot(n, l.coords) == c_b]
        if len(t_reds) + len(extra_reds) > d or len(t_blues) + len(extra_blues) > d:
            raise PositionError("more than d cohyperplanar points of one color")
        for r_extra in _subsets(extra_reds):
            for b_extra in _subsets(extra_blues):
                c_red = list(t_reds) + list(r_extra)
                c_blue = list(t_blues) + list(b_extra)
                mm = _self_supported([l.coords for l in c_red],
                                     [l.coords for l in c_blue])
                if mm is None:
                    continue
                n2, cr2, cb2 = _oriented_planes(mm, c_red[0].coords, c_blue[0].coords)
                yield SupportConfig(
                    c_red=tuple(sorted(l.id for l in c_red)),
                    c_blue=tuple(sorted(l.id for l in c_blue)),
                    normal=n2, offset_red=cr2, offset_blue=cb2,
                    margin=mm.margin, margin_sq=mm.margin_sq)


def _subsets(items):
    for k in range(len(items) + 1):
        yield from itertools.combinations(items, k)


def _parallel_planes(t_reds, t_blues, d):
    """The unique parallel plane pair through the tuple's color classes,
    oriented red -> blue; None when the colors are not strictly split."""
    rows = []
    for l in t_reds[1:]:
        rows.append(vsub(l.coords, t_reds[0].coords))
    for l in t_blues[1:]:
        rows.append(vsub(l.coords, t_blues[0].coords))
    basis = nullspace(rows, d)
    if len(basis) != 1:
        raise PositionError(
            f"degenerate support-plane tuple {[l.id for l in t_reds + t_blues]}")
    n = basis[0]
    c_r = dot(n, t_reds[0].coords)
    c_b = dot(n, t_blues[0].coords)
    if c_r == c_b:
        raise PositionError(
            f"support-plane tuple {[l.id for l in t_reds + t_blues]} is cohyperplanar")
    if c_r > c_b:
        n = tuple(-c for c in n)
        c_r, c_b = -c_r, -c_b
    return n, c_r, c_b


def xi(dataset: StochasticDataset, cfg: SupportConfig):
    """Probability that the existent points have exactly this support set."""
    n, c_r, c_b = cfg.normal, cfg.offset_red, cfg.offset_blue
    in_c = set(cfg.c_red) | set(cfg.c_blue)
    forbidden = set()
    for loc in dataset.locations:
        if loc.id in in_c:
            continue
        val = dot(n, loc.coords)
        if loc.color == RED:
            if val >= c_r:   # between the planes, beyond, or on the plane but not in C
                forbidden.add(loc.id)
        else:
            if val <= c_b:
                forbidden.add(loc.id)
    return _scenario_prob(dataset, frozenset(in_c), frozenset(forbidden))


def expected_separation_margin(dataset: StochasticDataset, validate=True,
                               collect=True) -> ESMResult:
    """Sum xi * margin over all possible support sets.

    Probabilities are exact rationals; only the margin lengths and the final
    sum are floats.
    """
    _require_points(dataset)
    if validate:
        dataset.validate_positions(GP, max_violations=8).raise_if_failed()
    total = 0.0
    xi_sum = Q(0)
    configs = []
    count = 0
    for cfg in enumerate_support_configs(dataset):
        x = xi(dataset, cfg)
        count += 1
        xi_sum += x
        total += float(x) * cfg.margin
        if collect:
            configs.append(replace(cfg, xi=x))
    return ESMResult(emar=total, config_count=count, xi_sum=xi_sum,
                     configs=tuple(configs))


def margin_census_hint(dataset: StochasticDataset):
    """Exact emitted-config count, checked against the closed-form bound."""
    _require_points(dataset)
    d = dataset.dimension
    nr = len(dataset.reds())
    nb = len(dataset.blues())
    bound = 0
    for size in range(2, d + 1):
        bound += _bichromatic_subsets(nr, nb, size)
    bound += _bichromatic_subsets(nr, nb, d + 1) * (1 << (d - 1))
    count = sum(1 for _ in enumerate_support_configs(dataset))
    if count > bound:  # pragma: no cover - enumeration classes are exhaustive
        raise AssertionError(f"emitted {count} configs above the bound {bound}")
    return count, bound


def _bichromatic_subsets(nr, nb, size) -> int:
    return (math.comb(nr + nb, size) - math.comb(nr, size) - math.comb(nb, size))
