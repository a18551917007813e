"""General-position validation (plain and projection-recursive) and the
orthogonal transform that repairs projection-level degeneracies.

The transform is computed in floats (orthonormality is irrational) but the
matrix is then taken as an exact rational map, so applying it never loses
information: separability of every sub-instance is preserved exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .geometry import DegenerateInput, nullspace, orient, vsub
from .numeric import Q, rat

GP = "gp"
SGPP = "sgpp"


@dataclass(frozen=True)
class Violation:
    space_dim: int          # dimension of the projected space the check ran in
    drop_prefix: int        # number of leading coordinates dropped (0 for GP)
    indices: tuple          # ids of the offending locations

    def describe(self) -> str:
        where = f"R^{self.space_dim}"
        if self.drop_prefix:
            where += f" (coords {self.drop_prefix + 1}..)"
        return f"affinely dependent {self.indices} in {where}"


@dataclass
class PositionReport:
    level: str
    ok: bool
    violations: list = field(default_factory=list)

    def raise_if_failed(self):
        if not self.ok:
            msgs = "; ".join(v.describe() for v in self.violations[:5])
            raise PositionError(f"{self.level} validation failed: {msgs}", self)


class PositionError(DegenerateInput):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def _gp_violations(points, ids, space_dim, drop_prefix, max_violations):
    out = []
    m = len(points)
    size = min(space_dim + 1, m)
    if size < 2:
        return out
    for combo in itertools.combinations(range(m), size):
        pts = [points[i] for i in combo]
        if size == space_dim + 1:
            dependent = orient(pts) == 0
        else:
            diffs = [vsub(p, pts[0]) for p in pts[1:]]
            dependent = len(nullspace(diffs, space_dim)) != space_dim - (size - 1)
        if dependent:
            out.append(Violation(space_dim, drop_prefix, tuple(ids[i] for i in combo)))
            if len(out) >= max_violations:
                return out
    return out


def validate_points(points, level=SGPP, ids=None, max_violations=32) -> PositionReport:
    """Check general position, recursing on coordinate-suffix projections for SGPP.

    Violations are data, not faults: the report lists offending id tuples and
    the projection depth at which they degenerate.
    """
    if level not in (GP, SGPP):
        raise ValueError(f"unknown validation level {level!r}")
    points = [tuple(p) for p in points]
    if ids is None:
        ids = list(range(len(points)))
    report = PositionReport(level=level, ok=True)
    if not points:
        return report
    d = len(points[0])
    drop = 0
    while True:
        space_dim = d - drop
        projected = [p[drop:] for p in points]
        found = _gp_violations(projected, ids, space_dim, drop,
                               max_violations - len(report.violations))
        report.violations.extend(found)
        if level == GP or space_dim <= 2 or len(report.violations) >= max_violations:
            break
        drop += 2
    report.ok = not report.violations
    return report


# ---------------------------------------------------------------------------
# orthogonal transform achieving projection-recursive general position

_TOL_IN_SPAN = 1e-9


def _span_basis(vectors, d):
    """Orthonormal basis (columns) of the span; rank-revealing via SVD."""
    if not vectors:
        return np.zeros((d, 0))
    m = np.array(vectors, dtype=float).T  # d x k
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    rank = int(np.sum(s > max(m.shape) * np.finfo(float).eps * (s[0] if len(s) else 1.0)))
    return u[:, :rank]


def _dist_to_span(c, basis):
    if basis.shape[1] == 0:
        return float(np.linalg.norm(c)), c.copy()
    proj = basis @ (basis.T @ c)
    resid = c - proj
    return float(np.linalg.norm(resid)), resid


def _shrink_ball(center, radius, basis, d):
    dist, _ = _dist_to_span(center, basis)
    if dist > _TOL_IN_SPAN * (1.0 + np.linalg.norm(center)):
        return center, min(radius, dist)
    # center sits on the subspace: step off it along the first axis vector
    # that leaves the span, by half the current radius
    for axis in range(d):
        e = np.zeros(d)
        e[axis] = 1.0
        resid_len, _ = _dist_to_span(e, basis)
        if resid_len > _TOL_IN_SPAN:
            new_center = center + (radius / 2.0) * e
            new_dist, _ = _dist_to_span(new_center, basis)
            return new_center, min(new_dist, radius / 2.0)
    raise DegenerateInput("no axis direction leaves the subspace")  # pragma: no cover


def _orthonormalize_against(vec, rows):
    v = vec.astype(float).copy()
    for _ in range(2):  # two passes keep residual orthogonality near machine eps
        for r in rows:
            v -= np.dot(v, r) * r
    n = np.linalg.norm(v)
    if n < 1e-12:
        raise DegenerateInput("candidate direction collapsed during orthonormalization")
    return v / n


def _complete_basis(rows, d):
    out = list(rows)
    for axis in range(d):
        if len(out) == d:
            break
        e = np.zeros(d)
        e[axis] = 1.0
        v = e.copy()
        for r in out:
            v -= np.dot(v, r) * r
        if np.linalg.norm(v) > 1e-6:
            out.append(_orthonormalize_against(e, out))
    if len(out) != d:  # pragma: no cover
        raise DegenerateInput("failed to complete orthonormal basis")
    return out


def _build_matrix(points_float, d, start_shift):
    rows = []
    n = len(points_float)
    pair = 0
    while 2 * pair <= d - 3:
        tuple_size = d - 2 * pair - 1
        for _ in range(2):
            center = np.ones(d)
            center[0] += start_shift
            radius = 0.5
            for combo in itertools.combinations(range(n), tuple_size):
                base = points_float[combo[0]]
                diffs = [points_float[i] - base for i in combo[1:]]
                basis = _span_basis(rows + diffs, d)
                center, radius = _shrink_ball(center, radius, basis, d)
            rows.append(_orthonormalize_against(center, rows))
        pair += 1
    rows = _complete_basis(rows, d)
    return np.array(rows)


def sgpp_transform_points(points, ids=None, max_attempts=8):
    """Matrix (rational rows) plus exactly transformed points passing SGPP.

    Requires plain general position; raises PositionError otherwise.  The
    matrix rows are orthonormal to ~1e-15 in floats; the exact validation of
    the transformed set is the authoritative check, with a deterministic
    retry ladder for the (unlikely) rounding failures.
    """
    points = [tuple(p) for p in points]
    if not points:
        return _identity_matrix(0), []
    d = len(points[0])
    validate_points(points, GP, ids=ids).raise_if_failed()
    if d <= 2:
        return _identity_matrix(d), list(points)
    pts_f = [np.array([float(c) for c in p]) for p in points]
    last_report = None
    for attempt in range(max_attempts):
        rows = _build_matrix(pts_f, d, start_shift=0.37 * attempt)
        matrix = tuple(tuple(rat(x) for x in row) for row in rows)
        transformed = [apply_matrix(matrix, p) for p in points]
        report = validate_points(transformed, SGPP, ids=ids, max_violations=1)
        if report.ok:
            return matrix, transformed
        last_report = report
    raise PositionError("transform failed to reach projection-recursive "
                        "general position", last_report)  # pragma: no cover


def _identity_matrix(d):
    return tuple(tuple(Q(1) if i == j else Q(0) for j in range(d)) for i in range(d))


def apply_matrix(matrix, point):
    return tuple(sum(row[c] * point[c] for c in range(len(point))) for row in matrix)


def matrix_orthonormality_error(matrix) -> float:
    a = np.array([[float(x) for x in row] for row in matrix])
    return float(np.max(np.abs(a @ a.T - np.eye(a.shape[0])))) if a.size else 0.0


def matrix_is_invertible(matrix) -> bool:
    d = len(matrix)
    if d == 0:
        return True
    rows = [list(r) for r in matrix]
    return len(nullspace(rows, d)) == 0
