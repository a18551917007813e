"""Shared test utilities, including an independent exact separability oracle.

The simplex below is deliberately written from scratch against the textbook
phase-1 formulation so it shares no code path with the package's hull
machinery.
"""

from stochsep.numeric import Q


def simplex_feasible(A, b):
    """Exact phase-1 simplex with Bland's rule: is {Ax = b, x >= 0} feasible?"""
    m = len(A)
    n = len(A[0]) if m else 0
    rows = []
    for i in range(m):
        row = [Q(x) for x in A[i]]
        rhs = Q(b[i])
        if rhs < 0:
            row = [-x for x in row]
            rhs = -rhs
        rows.append(row + [Q(1) if j == i else Q(0) for j in range(m)] + [rhs])
    cost = [Q(0)] * n + [Q(1)] * m + [Q(0)]
    for i in range(m):
        for j in range(n + m + 1):
            cost[j] -= rows[i][j]
    basis = list(range(n, n + m))
    while True:
        enter = next((j for j in range(n + m) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if rows[i][enter] > 0:
                ratio = rows[i][-1] / rows[i][enter]
                if best is None or ratio < best[0] or \
                        (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise RuntimeError("unbounded phase-1 problem")
        _, leave = best
        piv = rows[leave][enter]
        rows[leave] = [x / piv for x in rows[leave]]
        for i in range(m):
            if i != leave and rows[i][enter]:
                f = rows[i][enter]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[leave])]
        if cost[enter]:
            f = cost[enter]
            cost = [x - f * y for x, y in zip(cost, rows[leave])]
        basis[leave] = enter
    return -cost[-1] == 0


def lp_separable(reds, blues):
    """Strong separability via exact hull-intersection feasibility."""
    if not reds or not blues:
        return True
    d = len(reds[0])
    nr, nb = len(reds), len(blues)
    A = []
    b = []
    for c in range(d):
        A.append([reds[i][c] for i in range(nr)] + [-blues[j][c] for j in range(nb)])
        b.append(Q(0))
    A.append([Q(1)] * nr + [Q(0)] * nb)
    b.append(Q(1))
    A.append([Q(0)] * nr + [Q(1)] * nb)
    b.append(Q(1))
    return not simplex_feasible(A, b)


def present_points(dataset, mask):
    reds, blues = [], []
    for i, loc in enumerate(dataset.locations):
        if mask >> i & 1:
            (reds if loc.color == "red" else blues).append(loc.coords)
    return reds, blues


def random_rational_rotation(rng, d):
    """Exact rational matrix close to a rotation (orthonormal to ~1e-15)."""
    import numpy as np
    from stochsep.numeric import rat

    a = np.array([[rng.gauss(0, 1) for _ in range(d)] for _ in range(d)])
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    return tuple(tuple(rat(x) for x in row) for row in q)
