"""Fixed-point linear solves of the form ``x = r + alpha * A x``.

Every score in the package (PageRank, contributions, kernel scores) is the
solution of such a system with ``A`` sparse and substochastic.  The direct
solver decomposes the dependency graph into strongly connected components,
so acyclic parts cost one pass and only genuine cycles are eliminated.  It
works unchanged over ``float`` and ``Fraction``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp


class BlockTooLarge(ValueError):
    """A cyclic block exceeds the configured elimination cap."""


def strongly_connected_components(succ: Sequence[Sequence[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative.

    Components are emitted so that every component appears after all the
    components reachable from it.
    """
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            node, i = work[-1]
            nbrs = succ[node]
            if i < len(nbrs):
                work[-1] = (node, i + 1)
                nxt = nbrs[i]
                if index[nxt] == -1:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack[nxt] = True
                    work.append((nxt, 0))
                elif on_stack[nxt] and index[nxt] < low[node]:
                    low[node] = index[nxt]
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[node] < low[parent]:
                    low[parent] = low[node]
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == node:
                        break
                out.append(comp)
    return out


def solve_fixed_point(coeffs, rhs, alpha, max_block=None):
    """Solve ``x[i] = rhs[h][i] + alpha * sum_j coeffs[i][j] * x[j]`` exactly.

    Parameters
    ----------
    coeffs : list of dict
        ``coeffs[i]`` maps column ``j`` to the weight ``A[i, j]``.
    rhs : list of list
        One or more right-hand sides, each of length ``len(coeffs)``.
    alpha : float or Fraction
        Damping factor; arithmetic follows its type.
    max_block : int, optional
        Refuse to eliminate a cyclic block larger than this.

    Returns
    -------
    list of list
        One solution vector per right-hand side.
    """
    n = len(coeffs)
    nrhs = len(rhs)
    succ = [list(row) for row in coeffs]
    x = [[None] * n for _ in range(nrhs)]
    one = alpha ** 0
    for comp in strongly_connected_components(succ):
        if len(comp) == 1:
            i = comp[0]
            diag = one - alpha * coeffs[i].get(i, 0)
            for h in range(nrhs):
                acc = rhs[h][i]
                xs = x[h]
                for j, a in coeffs[i].items():
                    if j != i:
                        acc += alpha * a * xs[j]
                x[h][i] = acc / diag
            continue
        if max_block is not None and len(comp) > max_block:
            raise BlockTooLarge(
                f"cyclic block of {len(comp)} nodes exceeds max_block={max_block}"
            )
        _solve_block(comp, coeffs, rhs, alpha, x)
    return x


def _solve_block_exact(rows, b, size, nrhs):
    """Fraction-free (Bareiss) elimination on integer-scaled rows."""
    mat = []
    for row, bb in zip(rows, b):
        den = 1
        for val in list(row.values()) + bb:
            den = den * val.denominator // math.gcd(den, val.denominator)
        dense = [0] * (size + nrhs)
        for k, val in row.items():
            dense[k] = val.numerator * (den // val.denominator)
        for h, val in enumerate(bb):
            dense[size + h] = val.numerator * (den // val.denominator)
        mat.append(dense)
    width = size + nrhs
    prev = 1
    for col in range(size):
        if not mat[col][col]:
            piv = next(r for r in range(col + 1, size) if mat[r][col])
            mat[col], mat[piv] = mat[piv], mat[col]
        prow = mat[col]
        p = prow[col]
        for r in range(col + 1, size):
            row = mat[r]
            f = row[col]
            if f:
                for k in range(col + 1, width):
                    row[k] = (p * row[k] - f * prow[k]) // prev
            else:
                for k in range(col + 1, width):
                    row[k] = p * row[k] // prev
            row[col] = 0
        prev = p
    # By Cramer's rule det * x is integral, so back substitution stays in
    # integers and every division below is exact.
    det = mat[size - 1][size - 1]
    sol = []
    for h in range(nrhs):
        scaled = [0] * size
        for col in range(size - 1, -1, -1):
            row = mat[col]
            acc = det * row[size + h]
            for k in range(col + 1, size):
                if row[k]:
                    acc -= row[k] * scaled[k]
            scaled[col] = acc // row[col]
        sol.append([Fraction(v, det) for v in scaled])
    return sol


def _solve_block(comp, coeffs, rhs, alpha, x):
    pos = {node: k for k, node in enumerate(comp)}
    size = len(comp)
    nrhs = len(rhs)
    one = alpha ** 0
    exact = isinstance(one, Fraction)
    # Sparse rows of (I - alpha A) restricted to the block; outside terms
    # are already solved and get folded into the right-hand sides.
    rows = []
    b = []
    for node in comp:
        row = {}
        bb = [rhs[h][node] for h in range(nrhs)]
        for j, a in coeffs[node].items():
            k = pos.get(j)
            if k is None:
                for h in range(nrhs):
                    bb[h] += alpha * a * x[h][j]
            else:
                row[k] = row.get(k, 0) - alpha * a
        row[pos[node]] = row.get(pos[node], 0) + one
        rows.append(row)
        b.append(bb)
    if exact:
        sol = _solve_block_exact(rows, b, size, nrhs)
        for h in range(nrhs):
            for k, node in enumerate(comp):
                x[h][node] = sol[h][k]
        return
    for col in range(size):
        piv = col
        if not exact:
            best = abs(rows[col].get(col, 0.0))
            for r in range(col + 1, size):
                val = abs(rows[r].get(col, 0.0))
                if val > best:
                    best, piv = val, r
        elif not rows[col].get(col):
            piv = next(r for r in range(col + 1, size) if rows[r].get(col))
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            b[col], b[piv] = b[piv], b[col]
        prow = rows[col]
        pval = prow[col]
        pb = b[col]
        for r in range(col + 1, size):
            f = rows[r].get(col)
            if not f:
                continue
            f = f / pval
            target = rows[r]
            for k, val in prow.items():
                nv = target.get(k, 0) - f * val
                if nv:
                    target[k] = nv
                else:
                    target.pop(k, None)
            tb = b[r]
            for h in range(nrhs):
                tb[h] -= f * pb[h]
    sol = [[0] * size for _ in range(nrhs)]
    for col in range(size - 1, -1, -1):
        row = rows[col]
        for h in range(nrhs):
            acc = b[col][h]
            for k, val in row.items():
                if k > col:
                    acc -= val * sol[h][k]
            sol[h][col] = acc / row[col]
    for h in range(nrhs):
        for k, node in enumerate(comp):
            x[h][node] = sol[h][k]


def series_fixed_point(coeffs, rhs, alpha, tol, norm="l1"):
    """Float solve by accumulating the Neumann series ``sum_t (alpha A)^t r``.

    The iteration count is fixed in advance from the geometric tail bound.
    ``norm`` names the norm in which ``A`` is non-expansive: ``"l1"`` for
    column-substochastic ``A`` (PageRank direction), ``"inf"`` for
    row-substochastic ``A`` (contribution direction).
    """
    n = len(coeffs)
    rows, cols, vals = [], [], []
    for i, row in enumerate(coeffs):
        for j, a in row.items():
            rows.append(i)
            cols.append(j)
            vals.append(float(a))
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    a = float(alpha)
    out = []
    for r in rhs:
        x = np.asarray(r, dtype=float)
        scale = np.abs(x).sum() if norm == "l1" else np.abs(x).max(initial=0.0)
        steps = tail_steps(a, tol / max(scale, 1e-300) * (1 - a))
        total = x.copy()
        for _ in range(steps):
            x = a * (mat @ x)
            total += x
        out.append(total.tolist())
    return out


def tail_steps(alpha: float, tol: float) -> int:
    """Smallest ``T >= 0`` with ``alpha ** (T + 1) <= tol``."""
    if tol >= 1:
        return 0
    t = 0
    p = alpha
    while p > tol:
        p *= alpha
        t += 1
    return t
