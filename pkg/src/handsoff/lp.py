"""Bounded-variable linear programming by a two-phase revised simplex.

Problems have the fixed form

    minimize    c @ z
    subject to  Aeq @ z = beq,    0 <= z <= 1.

The equality-row count equals the state dimension of the control problems
this package builds (single digits), so the basis is refactorized from
scratch at every pivot rather than updated; at that scale the dense solve is
cheaper than bookkeeping.  Because every variable is boxed the problem is
never unbounded, and every optimum returned is a vertex: at most one basic
variable per row sits strictly between its bounds.

Phase 1 starts from signed artificial columns and minimizes their sum; a
positive optimum is returned as the infeasibility certificate.  Pricing is
most-negative-reduced-cost with first-index tie-breaking, switching to
Bland's smallest-index rule after a run of degenerate pivots, which makes the
pivot sequence (and therefore the output bytes) reproducible.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, ParameterError
from .linalg import as_matrix, as_vector

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
NUMERICAL_FAILURE = "numerical_failure"

_LOWER, _UPPER, _BASIC = 0, 1, 2
_PIVOT_TOL = 1e-11
_DEGEN_TOL = 1e-12


@dataclass
class LpProblem:
    """min c @ z  s.t.  Aeq @ z = beq, 0 <= z <= 1."""

    c: np.ndarray
    Aeq: np.ndarray
    beq: np.ndarray

    def __post_init__(self):
        self.Aeq = as_matrix(self.Aeq, "Aeq")
        self.c = as_vector(self.c, "c")
        self.beq = as_vector(self.beq, "beq")
        n, q = self.Aeq.shape
        if self.c.shape[0] != q:
            raise DimensionError(f"c has length {self.c.shape[0]}, expected {q}")
        if self.beq.shape[0] != n:
            raise DimensionError(f"beq has length {self.beq.shape[0]}, expected {n}")


@dataclass
class LpSolution:
    z: np.ndarray
    objective: float
    status: str
    eq_residual: float
    kkt_residual: float
    iterations: int
    duals: np.ndarray
    phase1_value: float


def kkt_residual(problem: LpProblem, z, duals, bound_window: float = 1e-6) -> float:
    """Max violation of the optimality system at (z, duals).

    Components: equality residual, box violation, and the reduced-cost signs
    (nonnegative at the lower bound, nonpositive at the upper bound, zero for
    interior coordinates).  Coordinates within ``bound_window`` of a bound are
    classified as sitting on it.
    """
    z = as_vector(z, "z")
    duals = as_vector(duals, "duals")
    n, q = problem.Aeq.shape
    if z.shape[0] != q or duals.shape[0] != n:
        raise DimensionError("z/duals lengths do not match the problem")
    eq = float(np.max(np.abs(problem.Aeq @ z - problem.beq)))
    box = float(max(0.0, np.max(-z, initial=0.0), np.max(z - 1.0, initial=0.0)))
    d = problem.c - duals @ problem.Aeq
    at_lower = z <= bound_window
    at_upper = z >= 1.0 - bound_window
    interior = ~(at_lower | at_upper)
    viol = np.zeros(q)
    viol[at_lower] = np.maximum(0.0, -d[at_lower])
    viol[at_upper] = np.maximum(0.0, d[at_upper])
    viol[interior] = np.abs(d[interior])
    return float(max(eq, box, viol.max(initial=0.0)))


def _simplex(A, b, c, lower, upper, basis, status, dual_tol, max_iter):
    """Pivot the current basis to optimality for objective c.

    Mutates ``basis`` and ``status`` in place.  Returns
    ``(outcome, x, duals, iterations)`` with outcome one of ``"optimal"``,
    ``"singular"``, ``"iteration_limit"``.
    """
    n, qt = A.shape
    free = upper > lower
    bland = False
    degen_run = 0
    bland_after = 3 * qt
    iters = 0
    while True:
        B = A[:, basis]
        x = np.where(status == _UPPER, upper, lower)
        x[basis] = 0.0
        try:
            x_basic = np.linalg.solve(B, b - A @ x)
            duals = np.linalg.solve(B.T, c[basis])
        except np.linalg.LinAlgError:
            return "singular", None, None, iters
        x[basis] = x_basic
        d = c - duals @ A
        cand = (free & (status == _LOWER) & (d < -dual_tol)) | (
            free & (status == _UPPER) & (d > dual_tol)
        )
        if not cand.any():
            return "optimal", x, duals, iters
        if bland:
            j = int(np.flatnonzero(cand)[0])
        else:
            viol = np.where(cand, np.abs(d), 0.0)
            j = int(np.argmax(viol))
        if iters >= max_iter:
            return "iteration_limit", x, duals, iters
        iters += 1
        from_lower = status[j] == _LOWER
        w = np.linalg.solve(B, A[:, j])
        dirw = w if from_lower else -w  # basic values move by -t * dirw
        ratios = np.full(n, np.inf)
        blo = lower[basis]
        bup = upper[basis]
        pos = dirw > _PIVOT_TOL
        neg = dirw < -_PIVOT_TOL
        ratios[pos] = (x_basic[pos] - blo[pos]) / dirw[pos]
        ratios[neg] = (bup[neg] - x_basic[neg]) / (-dirw[neg])
        ratios = np.maximum(ratios, 0.0)
        t_basic = float(ratios.min()) if n else np.inf
        t_box = upper[j] - lower[j]
        if t_box <= t_basic:
            status[j] = _UPPER if from_lower else _LOWER
            step = t_box
        else:
            tie = ratios <= t_basic + _DEGEN_TOL
            tied = np.flatnonzero(tie)
            r = int(tied[np.argmin(basis[tied])])  # smallest variable index leaves
            status[basis[r]] = _LOWER if dirw[r] > 0 else _UPPER
            basis[r] = j
            status[j] = _BASIC
            step = t_basic
        if step > _DEGEN_TOL:
            degen_run = 0
        else:
            degen_run += 1
            if degen_run >= bland_after:
                bland = True


def solve_lp(problem: LpProblem, tol: float = 1e-9) -> LpSolution:
    """Solve the boxed LP; statuses: optimal, infeasible, numerical_failure.

    An ``optimal`` solution is a vertex with equality residual and KKT
    residual at most ``tol`` (verified, not assumed).  ``infeasible`` carries
    the phase-1 optimum in ``phase1_value`` together with the closest point
    found, whose equality residual it bounds.
    """
    if not np.isfinite(tol) or tol <= 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    n, q = problem.Aeq.shape
    r = problem.beq
    signs = np.where(r < 0, -1.0, 1.0)
    A = np.hstack([problem.Aeq, np.diag(signs)])
    art_ub = float(np.sum(np.abs(r))) + 1.0
    lower = np.zeros(q + n)
    upper = np.concatenate([np.ones(q), np.full(n, art_ub)])
    status = np.full(q + n, _LOWER, dtype=np.int8)
    status[q:] = _BASIC
    basis = np.arange(q, q + n)
    max_iter = 50 * (q + n) + 1000
    dual_tol = 0.5 * tol

    def _failure(x, duals, iters, phase1):
        z = x[:q] if x is not None else np.zeros(q)
        y = duals if duals is not None else np.zeros(n)
        eq = float(np.max(np.abs(problem.Aeq @ z - problem.beq)))
        return LpSolution(z, float(problem.c @ z), NUMERICAL_FAILURE, eq,
                          float("inf"), iters, y, phase1)

    c1 = np.concatenate([np.zeros(q), np.ones(n)])
    out, x, duals, it1 = _simplex(A, r, c1, lower, upper, basis, status, dual_tol, max_iter)
    if out != "optimal":
        return _failure(x, duals, it1, float("inf"))
    phase1 = float(c1 @ x)
    if phase1 > tol:
        z = x[:q].copy()
        eq = float(np.max(np.abs(problem.Aeq @ z - problem.beq)))
        return LpSolution(z, float(problem.c @ z), INFEASIBLE, eq, float("inf"),
                          it1, duals.copy(), phase1)

    upper[q:] = 0.0  # artificials pinned for phase 2
    c2 = np.concatenate([problem.c, np.zeros(n)])
    out, x, duals, it2 = _simplex(A, r, c2, lower, upper, basis, status, dual_tol, max_iter)
    if out != "optimal":
        return _failure(x, duals, it1 + it2, phase1)
    z = x[:q].copy()
    eq = float(np.max(np.abs(problem.Aeq @ z - problem.beq)))
    kkt = kkt_residual(problem, z, duals)
    status_final = OPTIMAL if (eq <= tol and kkt <= tol) else NUMERICAL_FAILURE
    return LpSolution(z, float(problem.c @ z), status_final, eq, kkt,
                      it1 + it2, duals.copy(), phase1)
