"""Dense revised simplex for pointwise norming constants.

Given an orthonormal basis ``Q`` (rows = mesh points) of a discrete
polynomial space and the basis vector ``q`` at a point ``x``, the norming
constant at ``x`` is

    max { q . y : |Q y| <= 1 }  =  min { ||w||_1 : Q^T w = q }.

The solver works on the right-hand (dual) form in standard shape with
``w = u - v``: variables ``u_i`` and ``v_i`` carry the columns ``+Q_i`` and
``-Q_i``. A basis is a set of ``r`` mesh rows with signs; its simplex
multipliers are exactly a primal coefficient vector ``y`` with
``Q_S y = signs``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import DeterminingSetError, NumericalError

PRICING_TOL = 1e-12
PIVOT_TOL = 1e-11
DEGENERATE_LIMIT = 50
PERTURBATION = 1e-9


@dataclass
class LPResult:
    """Optimal basis and both bounds of one pointwise LP.

    ``lower`` is ``q . y`` scaled by ``max(1, max|Q y|)`` so that it is the
    value of a feasible polynomial; ``upper`` is ``||w||_1`` of the final
    feasible dual vector. They agree to rounding at optimality.
    """

    lower: float
    upper: float
    y: np.ndarray
    rows: np.ndarray
    signs: np.ndarray
    iterations: int
    bland_steps: int
    optimal: bool = True

    @property
    def value(self) -> float:
        return self.lower


def _initial_basis(Q, q, rows):
    rows = np.asarray(rows, dtype=int)
    QS = Q[rows]
    try:
        w = np.linalg.solve(QS.T, q)
    except np.linalg.LinAlgError:
        raise NumericalError("warm-start rows are singular") from None
    signs = np.where(w < 0, -1.0, 1.0)
    return rows.copy(), signs


def _perturbation(r: int) -> np.ndarray:
    # fixed pattern, so results do not depend on any random state
    k = np.arange(1, r + 1)
    return np.sin(k * 1.6180339887498949 + 0.5) / np.sqrt(r)


def solve_pointwise(Q: np.ndarray, q: np.ndarray, start_rows,
                    max_iter: Optional[int] = None,
                    perturbation: float = PERTURBATION,
                    stop_below: Optional[float] = None) -> LPResult:
    """Solve ``min ||w||_1`` s.t. ``Q^T w = q`` by the revised simplex method.

    Parameters
    ----------
    Q : (N, r) array
        Full column rank.
    q : (r,) array
    start_rows : sequence of r ints
        Rows of ``Q`` forming a nonsingular square block (for instance
        approximate Fekete rows); they give a feasible starting basis.
    stop_below : float, optional
        Every iterate is a feasible ``w``, so its l1 norm bounds the optimum
        from above. Stop as soon as that bound at the true ``q`` drops to
        ``stop_below``; the result then has ``optimal=False`` and ``upper``
        is the certified bound.

    Notes
    -----
    Probe points on symmetry lines make these programs highly degenerate,
    and rounding then defeats the classical anti-cycling rules. The
    iteration therefore runs on ``q + perturbation * |q| * delta`` with a
    fixed direction ``delta``. The multipliers ``y`` only depend on the
    basis, so ``lower`` is still the value of a feasible polynomial at the
    true ``q``, and for a small enough perturbation the optimal vertex of
    the perturbed program is optimal for ``q`` too; ``upper`` is evaluated
    at the true ``q`` and bounds the error.

    Pricing is Dantzig's rule (largest violation ``|Q_i y| - 1``) with ties
    to the lowest index. After ``DEGENERATE_LIMIT`` consecutive zero-length
    steps the entering rule switches to Bland's (lowest eligible index)
    until a step makes progress; the ratio test breaks ties by the lowest
    variable index.
    """
    Q = np.asarray(Q, dtype=float)
    q_true = np.asarray(q, dtype=float)
    N, r = Q.shape
    q = q_true + perturbation * float(np.abs(q_true).max()) * _perturbation(r)
    rows, signs = _initial_basis(Q, q, start_rows)
    if max_iter is None:
        max_iter = 50 * (N + r)
    in_basis = np.zeros(N, dtype=bool)
    in_basis[rows] = True
    degenerate = 0
    bland = 0
    optimal = True
    for it in range(max_iter + 1):
        B = (Q[rows] * signs[:, None]).T
        try:
            lu = lu_factor(B, check_finite=False)
        except (np.linalg.LinAlgError, ValueError):
            raise NumericalError("simplex basis became singular") from None
        xB = lu_solve(lu, q, check_finite=False)
        if stop_below is not None and xB.sum() <= stop_below:
            w = lu_solve(lu, q_true, check_finite=False)
            if np.abs(w).sum() <= stop_below:
                optimal = False
                break
        # multipliers: B^T y = 1
        y = lu_solve(lu, np.ones(r), trans=1, check_finite=False)
        Qy = Q @ y
        viol = np.abs(Qy) - 1.0
        viol[in_basis] = -np.inf
        tol = PRICING_TOL * max(1.0, float(np.abs(y).sum()))
        if degenerate >= DEGENERATE_LIMIT:
            eligible = np.flatnonzero(viol > tol)
            # Bland: lowest variable index, u_i (< N) before v_i (>= N)
            if len(eligible) == 0:
                break
            cand_u = eligible[Qy[eligible] > 0]
            cand_v = eligible[Qy[eligible] < 0]
            if len(cand_u):
                enter, s_enter = int(cand_u[0]), 1.0
            else:
                enter, s_enter = int(cand_v[0]), -1.0
            bland += 1
        else:
            enter = int(np.argmax(viol))
            if not viol[enter] > tol:
                break
            s_enter = 1.0 if Qy[enter] > 0 else -1.0
        if it == max_iter:
            raise NumericalError(f"simplex did not converge in {max_iter} iterations")
        d = lu_solve(lu, s_enter * Q[enter], check_finite=False)
        pos = d > PIVOT_TOL * max(1.0, float(np.abs(d).max()))
        if not np.any(pos):
            raise DeterminingSetError(
                "pointwise LP is unbounded: the point set does not determine the space")
        ratios = np.full(r, np.inf)
        ratios[pos] = np.maximum(xB[pos], 0.0) / d[pos]
        tmin = ratios.min()
        ties = np.flatnonzero(ratios <= tmin + 1e-15 * max(1.0, tmin))
        # lowest variable index among ties (u_i -> i, v_i -> N + i)
        var_index = rows[ties] + np.where(signs[ties] > 0, 0, N)
        leave = int(ties[np.argmin(var_index)])
        degenerate = degenerate + 1 if tmin <= 1e-14 else 0
        in_basis[rows[leave]] = False
        rows[leave] = enter
        signs[leave] = s_enter
        in_basis[enter] = True
    QS = Q[rows]
    y = np.linalg.solve(QS, signs)
    scale = max(1.0, float(np.abs(Q @ y).max()))
    lower = float(q_true @ y) / scale
    w = np.linalg.solve(QS.T, q_true)
    upper = float(np.abs(w).sum())
    return LPResult(lower, upper, y, rows.copy(), signs.copy(), it, bland, optimal)
