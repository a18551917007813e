"""Exact low-level geometry: predicates, hyperplanes, hull distance, margins.

Points are plain tuples of scalars (rationals in exact mode, floats in float
mode).  Everything here is a pure function; the few operations that are
inherently irrational (reported margin lengths) return floats while their
squared values stay rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .numeric import EXACT, NumericContext, Q, sign

Point = tuple


class GeometryError(ValueError):
    pass


class DimensionMismatch(GeometryError):
    pass


class DegenerateInput(GeometryError):
    pass


# ---------------------------------------------------------------------------
# vector helpers

def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vscale(u, s):
    return tuple(a * s for a in u)


def norm_sq(u):
    return sum(a * a for a in u)


def check_common_dimension(points: Sequence[Point]) -> int:
    dims = {len(p) for p in points}
    if len(dims) != 1:
        raise DimensionMismatch(f"mixed point dimensions {sorted(dims)}")
    return dims.pop()


# ---------------------------------------------------------------------------
# dense linear algebra (works for exact rationals and floats alike)

def gauss_solve(matrix, rhs, ctx: NumericContext = EXACT):
    """Solve a square linear system; returns None if singular."""
    n = len(matrix)
    aug = [list(row) + [r] for row, r in zip(matrix, rhs)]
    for col in range(n):
        pivot_row = None
        if ctx.exact:
            for r in range(col, n):
                if aug[r][col] != 0:
                    pivot_row = r
                    break
        else:
            best = 0.0
            for r in range(col, n):
                if abs(aug[r][col]) > best:
                    best = abs(aug[r][col])
                    pivot_row = r
            if best <= ctx.eps:
                pivot_row = None
        if pivot_row is None:
            return None
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        piv = aug[col][col]
        for r in range(col + 1, n):
            f = aug[r][col] / piv
            if f:
                for c in range(col, n + 1):
                    aug[r][c] -= f * aug[col][c]
    x = [None] * n
    for r in range(n - 1, -1, -1):
        acc = aug[r][n]
        for c in range(r + 1, n):
            acc -= aug[r][c] * x[c]
        x[r] = acc / aug[r][r]
    return x


def nullspace(rows, width, ctx: NumericContext = EXACT):
    """Basis of the null space of a (k x width) row matrix."""
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(width):
        pivot_row = None
        if ctx.exact:
            for rr in range(r, len(mat)):
                if mat[rr][col] != 0:
                    pivot_row = rr
                    break
        else:
            best = 0.0
            for rr in range(r, len(mat)):
                if abs(mat[rr][col]) > best:
                    best = abs(mat[rr][col])
                    pivot_row = rr
            if best <= ctx.eps:
                pivot_row = None
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        piv = mat[r][col]
        for rr in range(len(mat)):
            if rr != r and mat[rr][col]:
                f = mat[rr][col] / piv
                for cc in range(col, width):
                    mat[rr][cc] -= f * mat[r][cc]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(width) if c not in pivots]
    one = ctx.one()
    zero = ctx.zero()
    basis = []
    for fc in free:
        vec = [zero] * width
        vec[fc] = one
        for prow, pcol in enumerate(pivots):
            vec[pcol] = -mat[prow][fc] / mat[prow][pcol]
        basis.append(tuple(vec))
    return basis


# ---------------------------------------------------------------------------
# predicates

def orient(points: Sequence[Point], ctx: NumericContext = EXACT) -> int:
    """Sign of the homogeneous orientation determinant of d+1 points in R^d."""
    d = check_common_dimension(points)
    if len(points) != d + 1:
        raise DimensionMismatch(f"orient needs {d + 1} points in R^{d}, got {len(points)}")
    base = points[0]
    mat = [list(vsub(p, base)) for p in points[1:]]
    # triangularize, tracking row-swap parity
    det_sign = 1
    n = d
    for col in range(n):
        pivot_row = None
        if ctx.exact:
            for r in range(col, n):
                if mat[r][col] != 0:
                    pivot_row = r
                    break
        else:
            best = 0.0
            for r in range(col, n):
                if abs(mat[r][col]) > best:
                    best = abs(mat[r][col])
                    pivot_row = r
            if best <= ctx.eps:
                pivot_row = None
        if pivot_row is None:
            return 0
        if pivot_row != col:
            mat[col], mat[pivot_row] = mat[pivot_row], mat[col]
            det_sign = -det_sign
        piv = mat[col][col]
        for r in range(col + 1, n):
            f = mat[r][col] / piv
            if f:
                for c in range(col, n):
                    mat[r][c] -= f * mat[col][c]
    for i in range(n):
        det_sign *= ctx.sign(mat[i][i])
    return det_sign


@dataclass(frozen=True)
class Hyperplane:
    """Oriented hyperplane {x : normal . x = offset}; positive side is normal . x > offset."""

    normal: tuple
    offset: object

    def __post_init__(self):
        if all(c == 0 for c in self.normal):
            raise DegenerateInput("hyperplane normal is zero")

    @property
    def dim(self) -> int:
        return len(self.normal)

    def eval(self, x: Point):
        if len(x) != self.dim:
            raise DimensionMismatch(f"point in R^{len(x)} vs hyperplane in R^{self.dim}")
        return dot(self.normal, x) - self.offset

    def side(self, x: Point, ctx: NumericContext = EXACT) -> int:
        return ctx.sign(self.eval(x))

    def canonical(self) -> "Hyperplane":
        """Rescale so the first nonzero normal coordinate is exactly 1.

        Gives a unique representative per oriented-plane equivalence class,
        which makes hyperplanes directly comparable and hashable for dedup.
        """
        for c in self.normal:
            if c != 0:
                if c == 1:
                    return self
                return Hyperplane(tuple(a / c for a in self.normal), self.offset / c)
        raise DegenerateInput("hyperplane normal is zero")


def side_of(h: Hyperplane, x: Point, ctx: NumericContext = EXACT) -> int:
    return h.side(x, ctx)


def span_hyperplane(points: Sequence[Point], ctx: NumericContext = EXACT) -> Hyperplane:
    """The unique hyperplane through d affinely independent points in R^d."""
    d = check_common_dimension(points)
    if len(points) != d:
        raise DimensionMismatch(f"need exactly {d} points in R^{d}, got {len(points)}")
    if d == 1:
        return Hyperplane((ctx.one(),), points[0][0])
    diffs = [vsub(p, points[0]) for p in points[1:]]
    basis = nullspace(diffs, d, ctx)
    if len(basis) != 1:
        raise DegenerateInput("points are affinely dependent")
    h = Hyperplane(basis[0], dot(basis[0], points[0]))
    return h.canonical()


def project(points: Sequence[Point], indices: Sequence[int]) -> list:
    """Coordinate-subset images; indices are 1-based, strictly increasing."""
    idx = list(indices)
    if not idx:
        raise ValueError("projection index set must be nonempty")
    if any(i2 <= i1 for i1, i2 in zip(idx, idx[1:])):
        raise ValueError("projection indices must be strictly increasing")
    if idx[0] < 1:
        raise IndexError("projection indices are 1-based")
    out = []
    for p in points:
        if idx[-1] > len(p):
            raise IndexError(f"index {idx[-1]} out of range for point in R^{len(p)}")
        out.append(tuple(p[i - 1] for i in idx))
    return out


# ---------------------------------------------------------------------------
# minimum-norm point in a convex hull (exact); the workhorse behind hull
# distance, separability and maximum-margin computations.

_MAX_WOLFE_ITERS = 10_000


def min_norm_point(points: Sequence[Point]):
    """Exact minimum-norm point of the convex hull of rational points.

    Returns (x, weights) where x = sum(weights[i] * points[i]) minimizes
    |x|^2 over the hull and weights is a dict index -> positive rational.
    Runs the classic corral-maintenance scheme; exact arithmetic makes every
    comparison decisive so no tolerances appear.
    """
    if not points:
        raise ValueError("empty point set")
    d = check_common_dimension(points)
    norms = [norm_sq(p) for p in points]
    start = min(range(len(points)), key=lambda i: norms[i])
    corral = [start]
    weights = {start: Q(1)}
    x = points[start]
    xx = norms[start]

    for _ in range(_MAX_WOLFE_ITERS):
        if xx == 0:
            return x, weights
        best_j, best_dot = None, None
        for j, p in enumerate(points):
            dj = dot(x, p)
            if best_dot is None or dj < best_dot:
                best_j, best_dot = j, dj
        if best_dot >= xx:
            return x, weights  # no vertex improves: optimal
        corral = corral + [best_j] if best_j not in corral else list(corral)
        # minor cycle: project onto the affine hull of the corral, walk back
        # to the feasible segment, dropping points whose weight hits zero
        for _ in range(_MAX_WOLFE_ITERS):
            mu = _affine_min_norm(points, corral, d)
            if all(m > 0 for m in mu.values()):
                weights = mu
                x = _combine(points, weights, d)
                xx = norm_sq(x)
                break
            theta = None
            for i in corral:
                mi = mu.get(i, Q(0))
                if mi <= 0:
                    li = weights.get(i, Q(0))
                    t = li / (li - mi)
                    if theta is None or t < theta:
                        theta = t
            new_w = {}
            for i in corral:
                w = (1 - theta) * weights.get(i, Q(0)) + theta * mu.get(i, Q(0))
                if w > 0:
                    new_w[i] = w
            weights = new_w
            corral = [i for i in corral if i in new_w]
        else:  # pragma: no cover
            raise RuntimeError("minor cycle failed to converge")
    raise RuntimeError("corral iteration failed to converge")  # pragma: no cover


def _affine_min_norm(points, corral, d):
    """Min-norm point of the affine hull of the corral, as barycentric weights.

    Solves on a maximal linearly independent subset of difference vectors so
    affinely dependent corrals (which arise for difference point sets) are
    handled exactly.
    """
    base = points[corral[0]]
    dirs = []
    dir_ids = []
    rows = []  # echelon copy for independence testing
    for i in corral[1:]:
        v = vsub(points[i], base)
        cand = rows + [list(v)]
        if _rank(cand, d) > len(rows):
            rows = _reduce(cand, d)
            dirs.append(v)
            dir_ids.append(i)
    if not dirs:
        return {corral[0]: Q(1)}
    k = len(dirs)
    gram = [[dot(dirs[a], dirs[b]) for b in range(k)] for a in range(k)]
    rhs = [-dot(dirs[a], base) for a in range(k)]
    t = gauss_solve(gram, rhs)
    if t is None:  # pragma: no cover - dirs are independent by construction
        raise RuntimeError("singular normal equations")
    mu = {corral[0]: Q(1) - sum(t)}
    for i, ti in zip(dir_ids, t):
        mu[i] = ti
    for i in corral:
        mu.setdefault(i, Q(0))
    return mu


def _rank(rows, width):
    return width - len(nullspace(rows, width))


def _reduce(rows, width):
    return [list(r) for r in rows]


def _combine(points, weights, d):
    acc = [Q(0)] * d
    for i, w in weights.items():
        p = points[i]
        for c in range(d):
            acc[c] += w * p[c]
    return tuple(acc)


def hull_distance_sq(reds: Sequence[Point], blues: Sequence[Point]):
    """Squared distance between the two convex hulls plus the realizing pair.

    Returns (dist_sq, r_hat, b_hat); dist_sq == 0 means the hulls intersect.
    """
    if not reds or not blues:
        raise ValueError("both colors required")
    check_common_dimension(list(reds) + list(blues))
    diffs = []
    tags = []
    for i, r in enumerate(reds):
        for j, b in enumerate(blues):
            diffs.append(vsub(r, b))
            tags.append((i, j))
    x, weights = min_norm_point(diffs)
    d = len(reds[0])
    alpha = {}
    beta = {}
    for k, w in weights.items():
        i, j = tags[k]
        alpha[i] = alpha.get(i, Q(0)) + w
        beta[j] = beta.get(j, Q(0)) + w
    r_hat = tuple(sum(alpha[i] * reds[i][c] for i in alpha) for c in range(d))
    b_hat = tuple(sum(beta[j] * blues[j][c] for j in beta) for c in range(d))
    return norm_sq(x), r_hat, b_hat


def check_separable(reds: Sequence[Point], blues: Sequence[Point]):
    """Strong separability test; returns (separable, witness hyperplane or None).

    Either color may be empty, in which case the instance is trivially
    separable and no witness is produced.
    """
    if not reds or not blues:
        return True, None
    dist_sq, r_hat, b_hat = hull_distance_sq(reds, blues)
    if dist_sq == 0:
        return False, None
    return True, _bisector(r_hat, b_hat)


def _bisector(r_hat: Point, b_hat: Point) -> Hyperplane:
    n = vsub(b_hat, r_hat)
    c = dot(n, vadd(r_hat, b_hat)) / Q(2)
    return Hyperplane(n, c).canonical()


@dataclass(frozen=True)
class MarginResult:
    """Maximum-margin separator with its margin and the support structure."""

    separator: Hyperplane
    margin: float
    margin_sq: object  # exact rational
    closest_pair: tuple  # (r_hat, b_hat), rational points
    support_reds: tuple
    support_blues: tuple

    @property
    def support_set(self):
        return self.support_reds + self.support_blues


def max_margin_separator(reds: Sequence[Point], blues: Sequence[Point]) -> Optional[MarginResult]:
    """Unique maximum-margin separator, or None when inseparable.

    The separator is the bisector of a closest hull pair; support points are
    recovered by exact squared-distance comparison against the margin.
    """
    if not reds or not blues:
        raise ValueError("both colors must be nonempty")
    dist_sq, r_hat, b_hat = hull_distance_sq(reds, blues)
    if dist_sq == 0:
        return None
    h = _bisector(r_hat, b_hat)
    margin_sq = dist_sq / Q(4)
    nn = norm_sq(h.normal)
    bound = margin_sq * nn
    support_reds = tuple(p for p in reds if h.eval(p) ** 2 == bound)
    support_blues = tuple(p for p in blues if h.eval(p) ** 2 == bound)
    return MarginResult(
        separator=h,
        margin=math.sqrt(float(margin_sq)),
        margin_sq=margin_sq,
        closest_pair=(r_hat, b_hat),
        support_reds=support_reds,
        support_blues=support_blues,
    )
