"""Stochastic dataset model: locations, dependence-aware probability units,
scenario probability, JSON (de)serialization, and seeded generators.

A dataset is a flat list of *locations* (points or balls, each with a color)
wired to *units* that carry the probability semantics:

- ``point``       one location, independent existence probability
- ``multipoint``  several mutually exclusive locations of one uncertain point
- ``group``       all-or-none locations (polytope vertices share one fate)

Every probability is stored as an exact rational regardless of the numeric
mode engines later run in.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, replace
from .numeric import Q, rat, rat_str
from .position import GP, SGPP, validate_points

RED = "red"
BLUE = "blue"

SCHEMA_VERSION = 1


class DatasetError(ValueError):
    pass


class SchemaError(DatasetError):
    pass


class ProbOutOfRange(DatasetError):
    pass


class SumExceedsOne(DatasetError):
    pass


class UnknownId(DatasetError):
    pass


@dataclass(frozen=True)
class Location:
    id: int
    coords: tuple
    color: str
    prob: object            # rational; for group members this is the group prob
    radius: object = Q(0)   # rational; 0 for plain points
    unit: int = -1          # index into dataset.units
    kind: str = "point"     # "point" | "ball" (serialization category)


@dataclass(frozen=True)
class Unit:
    kind: str               # "point" | "multipoint" | "group"
    members: tuple          # location ids
    prob: object = None     # point/group probability; None for multipoint


@dataclass(frozen=True)
class PolytopeRecord:
    color: str
    prob: object
    vertices: tuple         # tuple of coordinate tuples
    vertex_ids: tuple       # reserved location ids, assigned at parse time


@dataclass(frozen=True)
class Scenario:
    present: frozenset
    absent: frozenset

    def __post_init__(self):
        if self.present & self.absent:
            raise DatasetError("scenario requires a location both present and absent")


class StochasticDataset:
    """Immutable bichromatic stochastic dataset."""

    def __init__(self, dimension, model, locations, units, polytopes=()):
        self.dimension = dimension
        self.model = model
        self.locations = tuple(sorted(locations, key=lambda l: l.id))
        self.units = tuple(units)
        self.polytopes = tuple(polytopes)
        self._by_id = {loc.id: loc for loc in self.locations}
        if len(self._by_id) != len(self.locations):
            raise DatasetError("duplicate location ids")
        for loc in self.locations:
            if len(loc.coords) != dimension:
                raise DatasetError(
                    f"location {loc.id} has dimension {len(loc.coords)}, expected {dimension}")

    def loc(self, loc_id) -> Location:
        try:
            return self._by_id[loc_id]
        except KeyError:
            raise UnknownId(f"unknown location id {loc_id}") from None

    def reds(self):
        return [l for l in self.locations if l.color == RED]

    def blues(self):
        return [l for l in self.locations if l.color == BLUE]

    def color_counts(self):
        nr = sum(1 for l in self.locations if l.color == RED)
        nb = len(self.locations) - nr
        for poly in self.polytopes:
            if poly.color == RED:
                nr += len(poly.vertices)
            else:
                nb += len(poly.vertices)
        return nr, nb

    @property
    def n(self):
        nr, nb = self.color_counts()
        return min(nr, nb)

    @property
    def N(self):
        nr, nb = self.color_counts()
        return max(nr, nb)

    def is_point_dataset(self) -> bool:
        return not self.polytopes and all(l.radius == 0 for l in self.locations)

    def max_radius(self):
        return max((l.radius for l in self.locations), default=Q(0))

    def coords_list(self):
        return [l.coords for l in self.locations]

    def ids(self):
        return [l.id for l in self.locations]

    def validate_positions(self, level=SGPP, max_violations=32):
        return validate_points(self.coords_list(), level,
                               ids=self.ids(), max_violations=max_violations)

    def with_coords(self, new_coords) -> "StochasticDataset":
        """Same probability structure over replaced coordinates (id order)."""
        if len(new_coords) != len(self.locations):
            raise DatasetError("coordinate count mismatch")
        locs = [replace(l, coords=tuple(c)) for l, c in zip(self.locations, new_coords)]
        return StochasticDataset(len(new_coords[0]) if new_coords else self.dimension,
                                 self.model, locs, self.units, self.polytopes)

    def __eq__(self, other):
        if not isinstance(other, StochasticDataset):
            return NotImplemented
        return (self.dimension == other.dimension and self.model == other.model
                and self.locations == other.locations and self.units == other.units
                and self.polytopes == other.polytopes)

    def __repr__(self):
        return (f"StochasticDataset(d={self.dimension}, model={self.model}, "
                f"locations={len(self.locations)}, units={len(self.units)}, "
                f"polytopes={len(self.polytopes)})")


# ---------------------------------------------------------------------------
# scenario probability

def scenario_probability(dataset: StochasticDataset, scenario: Scenario, ctx=None):
    """Probability that every ``present`` location exists and every ``absent``
    one does not, under the dataset's dependence structure."""
    for loc_id in itertools.chain(scenario.present, scenario.absent):
        dataset.loc(loc_id)
    return _scenario_prob(dataset, scenario.present, scenario.absent, ctx)


def _scenario_prob(dataset, present, absent, ctx=None):
    one = Q(1) if ctx is None or ctx.exact else 1.0
    result = one
    for unit in dataset.units:
        members = unit.members
        hit = [m for m in members if m in present]
        if unit.kind == "point":
            p = unit.prob if ctx is None or ctx.exact else float(unit.prob)
            if hit:
                result *= p
            elif members[0] in absent:
                result *= one - p
        elif unit.kind == "multipoint":
            if len(hit) >= 2:
                return one - one  # an uncertain point exists in one place only
            if len(hit) == 1:
                p = dataset.loc(hit[0]).prob
                result *= p if ctx is None or ctx.exact else float(p)
            else:
                gone = Q(0)
                for m in members:
                    if m in absent:
                        gone += dataset.loc(m).prob
                if gone:
                    result *= (one - (gone if ctx is None or ctx.exact else float(gone)))
        elif unit.kind == "group":
            banned = any(m in absent for m in members)
            if hit and banned:
                return one - one
            p = unit.prob if ctx is None or ctx.exact else float(unit.prob)
            if hit:
                result *= p
            elif banned:
                result *= one - p
        else:  # pragma: no cover
            raise DatasetError(f"unknown unit kind {unit.kind}")
        if result == 0:
            return result
    return result


# ---------------------------------------------------------------------------
# construction helpers

def dataset_from_points(entries, dimension=None, model="unipoint") -> StochasticDataset:
    """Build a unipoint dataset from (coords, color, prob) triples."""
    locations = []
    units = []
    for i, (coords, color, prob) in enumerate(entries):
        coords = tuple(rat(c) for c in coords)
        prob = rat(prob)
        _check_prob(prob)
        locations.append(Location(id=i, coords=coords, color=color, prob=prob, unit=i))
        units.append(Unit(kind="point", members=(i,), prob=prob))
    if dimension is None:
        if not locations:
            raise DatasetError("dimension required for empty dataset")
        dimension = len(locations[0].coords)
    return StochasticDataset(dimension, model, locations, units)


def _check_prob(p, what="existence probability"):
    if not (0 < p <= 1):
        raise ProbOutOfRange(f"{what} {rat_str(p)} outside (0, 1]")


# ---------------------------------------------------------------------------
# JSON schema

def parse_dataset(data) -> StochasticDataset:
    """Parse the versioned JSON schema; all numbers are read exactly."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            doc = json.loads(data, parse_float=rat, parse_int=int)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed JSON: {exc}") from None
    else:
        doc = data
    if not isinstance(doc, dict):
        raise SchemaError("top-level document must be an object")
    if doc.get("version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {doc.get('version')!r}")
    dimension = doc.get("dimension")
    if not isinstance(dimension, int) or dimension < 1:
        raise SchemaError("dimension must be an integer >= 1")
    model = doc.get("model")
    if model not in ("unipoint", "multipoint"):
        raise SchemaError(f"model must be 'unipoint' or 'multipoint', got {model!r}")

    locations = []
    units = []
    polytopes = []
    next_id = itertools.count()

    def parse_coords(raw):
        if not isinstance(raw, list) or len(raw) != dimension:
            raise SchemaError(f"coords must be a list of {dimension} numbers")
        return tuple(rat(c) for c in raw)

    for entry in doc.get("points", []) or []:
        color = _parse_color(entry)
        coords = parse_coords(entry.get("coords"))
        prob = rat(entry.get("prob", "1"))
        _check_prob(prob)
        i = next(next_id)
        locations.append(Location(id=i, coords=coords, color=color, prob=prob,
                                  unit=len(units)))
        units.append(Unit(kind="point", members=(i,), prob=prob))

    for entry in doc.get("uncertain_points", []) or []:
        if model != "multipoint":
            raise SchemaError("uncertain_points require the multipoint model")
        color = _parse_color(entry)
        locs = entry.get("locations")
        if not locs:
            raise SchemaError("uncertain point needs at least one location")
        member_ids = []
        total = Q(0)
        for sub in locs:
            coords = parse_coords(sub.get("coords"))
            prob = rat(sub.get("prob", "1"))
            _check_prob(prob)
            total += prob
            i = next(next_id)
            member_ids.append(i)
            locations.append(Location(id=i, coords=coords, color=color, prob=prob,
                                      unit=len(units)))
        if total > 1:
            raise SumExceedsOne(
                f"location probabilities of an uncertain point sum to {rat_str(total)} > 1")
        units.append(Unit(kind="multipoint", members=tuple(member_ids)))

    for entry in doc.get("objects", []) or []:
        if model != "unipoint":
            raise SchemaError("objects are only supported under the unipoint model")
        color = _parse_color(entry)
        prob = rat(entry.get("prob", "1"))
        _check_prob(prob)
        shape = entry.get("shape") or {}
        stype = shape.get("type")
        if stype == "ball":
            center = parse_coords(shape.get("center"))
            radius = rat(shape.get("radius", "0"))
            if radius < 0:
                raise SchemaError("ball radius must be >= 0")
            i = next(next_id)
            locations.append(Location(id=i, coords=center, color=color, prob=prob,
                                      radius=radius, unit=len(units), kind="ball"))
            units.append(Unit(kind="point", members=(i,), prob=prob))
        elif stype == "polytope":
            raw_vertices = shape.get("vertices")
            if not raw_vertices:
                raise SchemaError("polytope needs at least one vertex")
            vertices = tuple(parse_coords(v) for v in raw_vertices)
            vertex_ids = tuple(next(next_id) for _ in vertices)
            polytopes.append(PolytopeRecord(color=color, prob=prob,
                                            vertices=vertices, vertex_ids=vertex_ids))
        else:
            raise SchemaError(f"unknown object shape {stype!r}")

    return StochasticDataset(dimension, model, locations, units, polytopes)


def _parse_color(entry):
    color = entry.get("color")
    if color not in (RED, BLUE):
        raise SchemaError(f"color must be 'red' or 'blue', got {color!r}")
    return color


def serialize_dataset(dataset: StochasticDataset) -> str:
    """Inverse of parse_dataset; exact string rendering, byte-stable output."""
    points = []
    objects = []
    uncertain = []
    claimed = set()
    for unit in dataset.units:
        if unit.kind == "multipoint":
            locs = [dataset.loc(m) for m in unit.members]
            uncertain.append({
                "color": locs[0].color,
                "locations": [{"coords": [rat_str(c) for c in l.coords],
                               "prob": rat_str(l.prob)} for l in locs],
            })
            claimed.update(unit.members)
        elif unit.kind == "group":
            raise SchemaError("reduced polytope groups are not serializable; "
                              "serialize the source dataset instead")
    for loc in dataset.locations:
        if loc.id in claimed:
            continue
        if loc.kind == "ball":
            objects.append({"color": loc.color, "prob": rat_str(loc.prob),
                            "shape": {"type": "ball",
                                      "center": [rat_str(c) for c in loc.coords],
                                      "radius": rat_str(loc.radius)}})
        else:
            points.append({"color": loc.color, "coords": [rat_str(c) for c in loc.coords],
                           "prob": rat_str(loc.prob)})
    for poly in dataset.polytopes:
        objects.append({"color": poly.color, "prob": rat_str(poly.prob),
                        "shape": {"type": "polytope",
                                  "vertices": [[rat_str(c) for c in v]
                                               for v in poly.vertices]}})
    doc = {"version": SCHEMA_VERSION, "dimension": dataset.dimension,
           "model": dataset.model}
    if points:
        doc["points"] = points
    if uncertain:
        doc["uncertain_points"] = uncertain
    if objects:
        doc["objects"] = objects
    return json.dumps(doc, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# generators (seeded, rejection-sampled to the requested position level)

_MAX_DRAWS = 500


def _draw_probability(rng, law):
    if law == "uniform":
        return Q(rng.randint(1, 16), 16)
    return rat(law)  # constant law, e.g. "1" or "1/2"


def gen_random(n_red, n_blue, d, prob_law="uniform", seed=0, level=SGPP,
               coord_limit=1000) -> StochasticDataset:
    """Uniform grid coordinates in a box, resampled until position checks pass."""
    if n_red < 0 or n_blue < 0 or d < 1:
        raise DatasetError("sizes must be >= 0 and dimension >= 1")
    rng = random.Random(seed)
    for _ in range(_MAX_DRAWS):
        entries = []
        for k in range(n_red + n_blue):
            coords = tuple(Q(rng.randint(-coord_limit, coord_limit)) for _ in range(d))
            color = RED if k < n_red else BLUE
            entries.append((coords, color, _draw_probability(rng, prob_law)))
        ds = dataset_from_points(entries, dimension=d)
        if ds.validate_positions(level, max_violations=1).ok:
            return ds
    raise DatasetError("failed to draw a dataset in general position")


def _rational_in_ball(rng, d, radius, grid=4096):
    while True:
        coords = tuple(radius * Q(rng.randint(-grid, grid), grid) for _ in range(d))
        if sum(c * c for c in coords) <= radius * radius:
            return coords


def gen_cluster_stress(n, N, d, eps, seed=0) -> StochasticDataset:
    """Clustered dataset whose instances realize many distinct margins.

    n red locations are drawn from a small ball at the origin and N blue
    locations, in d equal groups, from small balls at the coordinate unit
    points; every existence probability is 1/2.
    """
    if N % d != 0:
        raise DatasetError(f"blue count {N} must be a multiple of the dimension {d}")
    eps = rat(eps)
    if eps <= 0:
        raise DatasetError("cluster radius must be positive")
    rng = random.Random(seed)
    half = Q(1, 2)
    for _ in range(_MAX_DRAWS):
        entries = []
        for _ in range(n):
            entries.append((_rational_in_ball(rng, d, eps), RED, half))
        for axis in range(d):
            center = tuple(Q(1) if c == axis else Q(0) for c in range(d))
            for _ in range(N // d):
                offset = _rational_in_ball(rng, d, eps)
                entries.append((tuple(a + b for a, b in zip(center, offset)), BLUE, half))
        ds = dataset_from_points(entries, dimension=d)
        if ds.validate_positions(GP, max_violations=1).ok:
            return ds
    raise DatasetError("failed to draw a cluster dataset in general position")


def gen_multipoint(n_red_units, n_blue_units, d, max_locations=3, seed=0,
                   level=GP, coord_limit=1000) -> StochasticDataset:
    """Multipoint dataset with 1..max_locations mutually exclusive locations
    per uncertain point; location probabilities sum to at most 1."""
    rng = random.Random(seed)
    for _ in range(_MAX_DRAWS):
        locations = []
        units = []
        next_id = itertools.count()
        for k in range(n_red_units + n_blue_units):
            color = RED if k < n_red_units else BLUE
            count = rng.randint(1, max_locations)
            # probabilities in sixteenths leaving room for absence
            cuts = sorted(rng.sample(range(1, 16), count))
            probs = [Q(c, 16) for c in [cuts[0]] + [b - a for a, b in zip(cuts, cuts[1:])]]
            member_ids = []
            for p in probs:
                coords = tuple(Q(rng.randint(-coord_limit, coord_limit)) for _ in range(d))
                i = next(next_id)
                member_ids.append(i)
                locations.append(Location(id=i, coords=coords, color=color, prob=p,
                                          unit=len(units)))
            units.append(Unit(kind="multipoint", members=tuple(member_ids)))
        ds = StochasticDataset(d, "multipoint", locations, units)
        if ds.validate_positions(level, max_violations=1).ok:
            return ds
    raise DatasetError("failed to draw a multipoint dataset in general position")


def jitter_dataset(dataset: StochasticDataset, magnitude, seed=0,
                   level=SGPP, grid=4096) -> StochasticDataset:
    """User-directed perturbation of a degenerate point dataset.

    Engines never perturb silently because that changes the answer; this
    utility applies an explicit, seeded rational jitter of at most the given
    magnitude per coordinate and resamples until the requested position
    level passes.
    """
    magnitude = rat(magnitude)
    if magnitude <= 0:
        raise DatasetError("jitter magnitude must be positive")
    if not dataset.is_point_dataset():
        raise DatasetError("jitter applies to point datasets")
    rng = random.Random(seed)
    for _ in range(_MAX_DRAWS):
        coords = [tuple(c + magnitude * Q(rng.randint(-grid, grid), grid)
                        for c in loc.coords) for loc in dataset.locations]
        moved = dataset.with_coords(coords)
        if moved.validate_positions(level, max_violations=1).ok:
            return moved
    raise DatasetError("jitter failed to reach the requested position level")


def sgpp_transform(dataset: StochasticDataset):
    """Orthogonal repair transform of a point dataset.

    Returns (matrix, transformed dataset); the matrix rows are orthonormal
    floats taken exactly as rationals, so separability of every instance is
    preserved exactly.
    """
    from .position import sgpp_transform_points

    if not dataset.is_point_dataset():
        raise DatasetError("the transform applies to point datasets")
    matrix, moved = sgpp_transform_points(dataset.coords_list(),
                                          ids=dataset.ids())
    return matrix, dataset.with_coords(moved)


def singleton_multipoint_as_unipoint(dataset: StochasticDataset) -> StochasticDataset:
    """Unipoint counterpart of a multipoint dataset whose units are singletons."""
    units = []
    for unit in dataset.units:
        if unit.kind == "multipoint":
            if len(unit.members) != 1:
                raise DatasetError("dataset has non-singleton uncertain points")
            units.append(Unit(kind="point", members=unit.members,
                              prob=dataset.loc(unit.members[0]).prob))
        else:
            units.append(unit)
    return StochasticDataset(dataset.dimension, "unipoint", dataset.locations, units,
                             dataset.polytopes)
