"""Phase-1 revised simplex for ``A x = b, x >= 0`` with ``b >= 0``.

Artificial variables start as the basis; Bland's rule (lowest index
entering, lowest basic index leaving among ratio ties) prevents cycling.
The basis system is re-solved from scratch every iteration, which is cheap
at the sizes used here and avoids drift from product-form updates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9


@dataclass
class Phase1Result:
    x: np.ndarray          # values of the original variables
    infeasibility: float   # sum of artificial variables at the optimum
    dual: np.ndarray       # y with y @ A <= ~0 and y @ b = infeasibility
    iterations: int


def phase1(A, b, tol=PIVOT_TOL, max_iter=100000) -> Phase1Result:
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if np.any(b < 0):
        raise ValueError("right-hand side must be nonnegative")
    M = np.hstack([A, np.eye(m)])
    cost = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    it = 0
    while True:
        B = M[:, basis]
        xb = np.linalg.solve(B, b)
        y = np.linalg.solve(B.T, cost[basis])
        reduced = cost - y @ M
        reduced[basis] = 0.0
        cand = np.flatnonzero(reduced < -tol)
        if len(cand) == 0 or it >= max_iter:
            break
        j = int(cand[0])
        u = np.linalg.solve(B, M[:, j])
        rows = np.flatnonzero(u > tol)
        if len(rows) == 0:
            # unbounded direction cannot occur for a phase-1 objective
            raise RuntimeError("phase-1 objective unbounded")
        ratios = np.maximum(xb[rows], 0.0) / u[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, abs(best))]
        leave = min(ties, key=lambda r: basis[r])
        basis[leave] = j
        it += 1
    x = np.zeros(n + m)
    x[basis] = xb
    return Phase1Result(x[:n].copy(), float(x[n:].sum()), y, it)
