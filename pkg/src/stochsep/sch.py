"""Stochastic convex-hull queries, expressed as separability computations.

Each query builds a bichromatic dataset whose red side is the (certain)
query object and whose blue side is the stochastic point set, then hands it
to the matching probability engine.  A projection-level degeneracy of the
built dataset is repaired by the exact orthogonal transform, which leaves
every answer unchanged; genuine affine degeneracies (the query point on a
span of data points) are reported as errors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .esmengine import expected_separation_margin
from .model import (BLUE, RED, Location, StochasticDataset, Unit)
from .numeric import Q, rat
from .objects import ball_separable_probability
from .position import SGPP
from .spengine import separable_probability


@dataclass(frozen=True)
class SCHQuery:
    kind: str               # membership | intersection | eps-distant | expected-distance
    query_points: tuple     # one point, or polytope vertices
    eps: object = Q(0)

    def __post_init__(self):
        if self.kind not in ("membership", "intersection", "eps-distant",
                             "expected-distance"):
            raise ValueError(f"unknown query kind {self.kind!r}")
        if self.eps < 0:
            raise ValueError("query radius must be >= 0")
        if not self.query_points:
            raise ValueError("query needs at least one point")

    def evaluate(self, dataset: StochasticDataset):
        if self.kind == "membership":
            return sch_membership_probability(dataset, self.query_points[0])
        if self.kind == "intersection":
            return sch_intersection_probability(dataset, self.query_points)
        if self.kind == "eps-distant":
            return sch_epsilon_distant_probability(dataset,
                                                   self.query_points[0], self.eps)
        return sch_expected_distance(dataset, self.query_points[0])


def _query_dataset(points_dataset: StochasticDataset, red_entries):
    """Red query locations (probability 1) in front of the stochastic set.

    The input dataset is a plain stochastic point set; any colors it carries
    are irrelevant to the query and all its locations become blue.
    """
    locations = []
    units = []
    for coords, radius in red_entries:
        i = len(locations)
        locations.append(Location(id=i, coords=tuple(rat(c) for c in coords),
                                  color=RED, prob=Q(1), radius=rat(radius),
                                  unit=len(units),
                                  kind="ball" if radius else "point"))
        units.append(Unit(kind="point", members=(i,), prob=Q(1)))
    offset = len(locations)
    id_map = {}
    for loc in points_dataset.locations:
        new_id = offset + len(id_map)
        id_map[loc.id] = new_id
        locations.append(Location(id=new_id, coords=loc.coords, color=BLUE,
                                  prob=loc.prob, radius=loc.radius,
                                  unit=loc.unit + len(red_entries), kind=loc.kind))
    for unit in points_dataset.units:
        units.append(Unit(kind=unit.kind,
                          members=tuple(id_map[m] for m in unit.members),
                          prob=unit.prob))
    return StochasticDataset(points_dataset.dimension, points_dataset.model,
                             locations, units)


def _sp_with_transform(dataset, ctx_kwargs=None):
    """Separable-probability, applying the exact orthogonal repair transform
    when only the projection levels degenerate."""
    from .position import GP, sgpp_transform_points

    report = dataset.validate_positions(SGPP, max_violations=1)
    if not report.ok:
        gp = dataset.validate_positions(GP, max_violations=4)
        gp.raise_if_failed()   # genuine affine degeneracy: report, do not repair
        _, transformed = sgpp_transform_points(dataset.coords_list(),
                                               ids=dataset.ids())
        dataset = dataset.with_coords(transformed)
    return separable_probability(dataset, validate=False, **(ctx_kwargs or {}))


def sch_membership_probability(dataset: StochasticDataset, q):
    """Probability that q lies inside the convex hull of the existent points."""
    built = _query_dataset(dataset, [(q, Q(0))])
    return 1 - _sp_with_transform(built).sp


def sch_intersection_probability(dataset: StochasticDataset, polytope_vertices):
    """Probability that a constant-size polytope meets the stochastic hull."""
    vertices = list(polytope_vertices)
    if not vertices:
        raise ValueError("query polytope needs at least one vertex")
    built = _query_dataset(dataset, [(v, Q(0)) for v in vertices])
    return 1 - _sp_with_transform(built).sp


def sch_epsilon_distant_probability(dataset: StochasticDataset, q, eps):
    """Probability that q stays at distance greater than eps from the hull."""
    eps = rat(eps)
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if eps == 0:
        built = _query_dataset(dataset, [(q, Q(0))])
        return _sp_with_transform(built).sp
    built = _query_dataset(dataset, [(q, eps)])
    return ball_separable_probability(built)


def sch_expected_distance(dataset: StochasticDataset, q):
    """Expected distance from q to the hull of the existent points.

    The maximum-margin separator of {q} union the existent points bisects
    the segment realizing the hull distance, so the distance is twice the
    separation margin; empty-hull instances contribute zero.
    """
    built = _query_dataset(dataset, [(q, Q(0))])
    built.validate_positions("gp", max_violations=4).raise_if_failed()
    return 2.0 * expected_separation_margin(built, validate=False).emar
