# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan loop for float-mode, independent-point candidate charges.

Mirrors the generic engine path: enumerate bichromatic spanning tuples at
one projection level, solve the on-plane witness, orient by the indicator
point, and multiply absence probabilities over the wrong-side points.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF LMAX = 8          # dimensions above 6 are CLI-gated; 8 leaves headroom


cdef int _solve(double* a, double* b, int n, double eps) noexcept nogil:
    """In-place Gaussian elimination with partial pivoting; 0 on success."""
    cdef int col, row, piv, k
    cdef double best, f, tmp
    for col in range(n):
        piv = -1
        best = eps
        for row in range(col, n):
            if a[row * n + col] > best or -a[row * n + col] > best:
                best = a[row * n + col] if a[row * n + col] > 0 else -a[row * n + col]
                piv = row
        if piv < 0:
            return 1
        if piv != col:
            for k in range(n):
                tmp = a[col * n + k]; a[col * n + k] = a[piv * n + k]; a[piv * n + k] = tmp
            tmp = b[col]; b[col] = b[piv]; b[piv] = tmp
        for row in range(col + 1, n):
            f = a[row * n + col] / a[col * n + col]
            if f != 0.0:
                for k in range(col, n):
                    a[row * n + k] -= f * a[col * n + k]
                b[row] -= f * b[col]
    for row in range(n - 1, -1, -1):
        tmp = b[row]
        for k in range(row + 1, n):
            tmp -= a[row * n + k] * b[k]
        b[row] = tmp / a[row * n + row]
    return 0


cdef int _normal_of(double* pts, int ell, double* normal, double eps) noexcept nogil:
    """Unit-free normal of the hyperplane through ell points in R^ell via the
    null vector of the difference rows; 0 on success."""
    cdef double mat[LMAX * LMAX]
    cdef int piv_col[LMAX]
    cdef int i, j, r, col, piv, k
    cdef double best, f, tmp
    cdef int rows = ell - 1
    for i in range(rows):
        for j in range(ell):
            mat[i * ell + j] = pts[(i + 1) * ell + j] - pts[j]
    r = 0
    for col in range(ell):
        piv = -1
        best = eps
        for i in range(r, rows):
            tmp = mat[i * ell + col]
            if tmp < 0:
                tmp = -tmp
            if tmp > best:
                best = tmp
                piv = i
        if piv < 0:
            piv_col[col] = -1
            continue
        if piv != r:
            for k in range(ell):
                tmp = mat[r * ell + k]; mat[r * ell + k] = mat[piv * ell + k]
                mat[piv * ell + k] = tmp
        for i in range(rows):
            if i != r and mat[i * ell + col] != 0.0:
                f = mat[i * ell + col] / mat[r * ell + col]
                for k in range(col, ell):
                    mat[i * ell + k] -= f * mat[r * ell + k]
        piv_col[col] = r
        r += 1
    if r != ell - 1:
        return 1   # affinely dependent tuple
    # single free column: set it to 1, back out the pivot coordinates
    cdef int free_col = -1
    for col in range(ell):
        if piv_col[col] < 0:
            free_col = col
    for col in range(ell):
        normal[col] = 0.0
    normal[free_col] = 1.0
    for col in range(ell):
        if piv_col[col] >= 0:
            normal[col] = -mat[piv_col[col] * ell + free_col] / mat[piv_col[col] * ell + col]
    return 0


def level_tau_sum(cnp.float64_t[:, ::1] coords, cnp.float64_t[:] probs,
                  cnp.uint8_t[:] is_red, double eps):
    """(status, sum of candidate charges, candidate count) for one level.

    status: 0 ok, 1 a degeneracy was met (caller raises).
    """
    cdef int m = coords.shape[0]
    cdef int ell = coords.shape[1]
    cdef int idx[LMAX]
    cdef double pts[LMAX * LMAX]
    cdef double normal[LMAX]
    cdef double wit_a[LMAX * LMAX]
    cdef double wit_b[LMAX]
    cdef double o_pt[LMAX]
    cdef double r_hat[LMAX]
    cdef double b_hat[LMAX]
    cdef int red_idx[LMAX]
    cdef int blue_idx[LMAX]
    cdef int i, j, k, p, q, pos, nred, nblue, o_side, s, status
    cdef double offset, val, tau, total
    cdef long count
    cdef bint bad

    if ell < 2 or ell > LMAX or m < ell:
        return 0, 0.0, 0
    total = 0.0
    count = 0
    status = 0
    for i in range(ell):
        idx[i] = i
    with nogil:
        while True:
            # classify colors of the tuple
            nred = 0
            nblue = 0
            for i in range(ell):
                if is_red[idx[i]]:
                    red_idx[nred] = idx[i]
                    nred += 1
                else:
                    blue_idx[nblue] = idx[i]
                    nblue += 1
            if nred > 0 and nblue > 0:
                count += 1
                tau = 1.0
                # gather points, reds first (witness layout expects it)
                for i in range(nred):
                    for j in range(ell):
                        pts[i * ell + j] = coords[red_idx[i], j]
                for i in range(nblue):
                    for j in range(ell):
                        pts[(nred + i) * ell + j] = coords[blue_idx[i], j]
                if _normal_of(pts, ell, normal, eps):
                    status = 1
                    break
                offset = 0.0
                for j in range(ell):
                    offset += normal[j] * pts[j]
                if ell == 2:
                    for j in range(2):
                        r_hat[j] = pts[j]
                        b_hat[j] = pts[2 + j]
                    bad = 0
                else:
                    # witness system: convex weights on each color whose
                    # trailing coordinates coincide
                    for i in range(ell):
                        for j in range(ell):
                            wit_a[i * ell + j] = 0.0
                    for j in range(nred):
                        wit_a[j] = 1.0
                    for j in range(nblue):
                        wit_a[ell + nred + j] = 1.0
                    wit_b[0] = 1.0
                    wit_b[1] = 1.0
                    for k in range(2, ell):
                        for j in range(nred):
                            wit_a[k * ell + j] = pts[j * ell + k]
                        for j in range(nblue):
                            wit_a[k * ell + nred + j] = -pts[(nred + j) * ell + k]
                        wit_b[k] = 0.0
                    if _solve(wit_a, wit_b, ell, eps):
                        status = 1
                        break
                    bad = 0
                    for j in range(ell):
                        if wit_b[j] <= eps:
                            if wit_b[j] >= -eps:
                                status = 1   # witness on the hull boundary
                            bad = 1
                            break
                    if status:
                        break
                    if not bad:
                        for j in range(ell):
                            r_hat[j] = 0.0
                            b_hat[j] = 0.0
                        for i in range(nred):
                            for j in range(ell):
                                r_hat[j] += wit_b[i] * pts[i * ell + j]
                        for i in range(nblue):
                            for j in range(ell):
                                b_hat[j] += wit_b[nred + i] * pts[(nred + i) * ell + j]
                if not bad:
                    o_pt[0] = r_hat[0] + (b_hat[1] - r_hat[1])
                    o_pt[1] = r_hat[1] + (r_hat[0] - b_hat[0])
                    for j in range(2, ell):
                        o_pt[j] = r_hat[j]
                    val = -offset
                    for j in range(ell):
                        val += normal[j] * o_pt[j]
                    if val > eps:
                        o_side = 1
                    elif val < -eps:
                        o_side = -1
                    else:
                        status = 1
                        break
                    # scan every off-tuple point
                    for p in range(m):
                        pos = 0
                        for q in range(ell):
                            if idx[q] == p:
                                pos = 1
                                break
                        if pos:
                            tau *= probs[p]
                            continue
                        val = -offset
                        for j in range(ell):
                            val += normal[j] * coords[p, j]
                        if val > eps:
                            s = 1
                        elif val < -eps:
                            s = -1
                        else:
                            status = 1
                            break
                        if is_red[p]:
                            if s == -o_side:
                                tau *= 1.0 - probs[p]
                        else:
                            if s == o_side:
                                tau *= 1.0 - probs[p]
                    if status:
                        break
                    total += tau
            # advance the combination odometer
            i = ell - 1
            while i >= 0 and idx[i] == m - ell + i:
                i -= 1
            if i < 0:
                break
            idx[i] += 1
            for j in range(i + 1, ell):
                idx[j] = idx[j - 1] + 1
    if status:
        return 1, 0.0, 0
    return 0, total, count
