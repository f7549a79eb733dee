"""Difference-of-convex iteration for minimum-support control.

On the discretized feasible set the objective splits as g - h with
g(z) = sum(z) (the l1 norm on the nonnegative box) and
h(z) = sum of the concave gaps phi(z_i).  Each iteration linearizes h at the
current point with a subgradient s and minimizes g - s @ z, which is a boxed
LP with cost vector 1 - s; successive costs never increase.  The loop stops
on a cost stall, a step stall, or the iteration cap, whichever fires first.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AssumptionViolationError,
    DimensionError,
    DomainError,
    InfeasibleProblemError,
    NumericalError,
    ParameterError,
)
from .lp import INFEASIBLE, NUMERICAL_FAILURE, LpProblem, solve_lp
from .penalty import Penalty, phi, phi_subgradient, validate_assumption
from .system import DiscreteProblem

_BOX_SLACK = 1e-6


@dataclass
class ControlSignal:
    """Piecewise-constant control: samples[k] holds on [k*delta, (k+1)*delta)."""

    delta: float
    samples: np.ndarray  # (N, m)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 2 or self.samples.shape[0] < 1 or self.samples.shape[1] < 1:
            raise DimensionError(f"samples must be (N, m), got {self.samples.shape}")
        if not np.all(np.isfinite(self.samples)):
            raise DomainError("samples contain non-finite entries")
        if np.max(np.abs(self.samples)) > 1.0 + _BOX_SLACK:
            raise DomainError("samples exceed the unit amplitude bound")
        if not np.isfinite(self.delta) or self.delta <= 0:
            raise DomainError(f"delta must be positive, got {self.delta}")

    @property
    def N(self) -> int:
        return self.samples.shape[0]

    @property
    def m(self) -> int:
        return self.samples.shape[1]


@dataclass
class SplitControl:
    """Stacked nonnegative split z = [v[0]; w[0]; ...; v[N-1]; w[N-1]]."""

    delta: float
    N: int
    m: int
    z: np.ndarray  # (2*m*N,)

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float)
        if self.N < 1 or self.m < 1:
            raise DimensionError(f"need N, m >= 1, got N={self.N}, m={self.m}")
        if self.z.shape != (2 * self.m * self.N,):
            raise DimensionError(
                f"z has shape {self.z.shape}, expected ({2 * self.m * self.N},)"
            )
        if not np.all(np.isfinite(self.z)):
            raise DomainError("z contains non-finite entries")
        if self.z.size and (self.z.min() < -_BOX_SLACK or self.z.max() > 1.0 + _BOX_SLACK):
            raise DomainError("z leaves the unit box beyond tolerance")
        if not np.isfinite(self.delta) or self.delta <= 0:
            raise DomainError(f"delta must be positive, got {self.delta}")

    @property
    def v(self) -> np.ndarray:
        return self.z.reshape(self.N, 2 * self.m)[:, : self.m]

    @property
    def w(self) -> np.ndarray:
        return self.z.reshape(self.N, 2 * self.m)[:, self.m :]


@dataclass(frozen=True)
class DcaConfig:
    cost_tol: float = 1e-8
    step_tol: float = 1e-9
    max_iter: int = 50
    lp_tol: float = 1e-9
    l0_threshold: float = 1e-6
    lp_epsilon: float = 1e-8
    warm_start: str = "zero"

    def __post_init__(self):
        for name in ("cost_tol", "step_tol", "lp_tol", "l0_threshold", "lp_epsilon"):
            val = getattr(self, name)
            if not np.isfinite(val) or val <= 0:
                raise ParameterError(f"{name} must be positive, got {val}")
        if self.max_iter < 1:
            raise ParameterError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.warm_start not in ("zero", "l1"):
            raise ParameterError(
                f"warm_start must be 'zero' or 'l1', got {self.warm_start!r}"
            )


@dataclass
class DcaResult:
    z_star: SplitControl
    u_star: ControlSignal
    cost_history: list[float]
    iterations: int
    lp_solves: int
    l0: float
    feas_residual: float
    complementarity_violation: float
    bob_deviation: float
    stop_reason: str
    feas_history: list[float] = field(default_factory=list)
    max_kkt_residual: float = 0.0


def split_control(u: ControlSignal) -> SplitControl:
    """Positive/negative split: v = max(u, 0), w = max(-u, 0), interleaved."""
    v = np.maximum(u.samples, 0.0)
    w = np.maximum(-u.samples, 0.0)
    z = np.hstack([v, w]).reshape(-1)
    return SplitControl(u.delta, u.N, u.m, z)


def recombine(sc: SplitControl) -> ControlSignal:
    """Inverse of the split: u = v - w samplewise."""
    return ControlSignal(sc.delta, sc.v - sc.w)


def cost_jd(pen: Penalty, sc: SplitControl, tol: float = 1e-6) -> float:
    """Discrete objective: sum(z) minus the summed gaps, per sample (no delta factor)."""
    z = sc.z
    if z.size and (z.min() < -tol or z.max() > 1.0 + tol):
        raise DomainError("split control leaves [0, 1] beyond tol")
    zc = np.clip(z, 0.0, 1.0)
    return float(np.sum(zc) - np.sum(phi(pen, zc)))


def l0_measure(u: ControlSignal, theta: float = 1e-6) -> float:
    """Support measure: delta times the number of samples with |u| > theta."""
    if not np.isfinite(theta) or theta <= 0:
        raise ParameterError(f"theta must be positive, got {theta}")
    return float(u.delta * np.count_nonzero(np.abs(u.samples) > theta))


def bang_off_bang_deviation(u: ControlSignal) -> float:
    """Max samplewise distance to the three-point set {-1, 0, 1}."""
    a = np.abs(u.samples)
    return float(np.max(np.minimum(a, np.abs(a - 1.0))))


def run_dca(dp: DiscreteProblem, pen: Penalty, cfg: DcaConfig = DcaConfig()) -> DcaResult:
    """Iterate linearize-and-solve from the configured warm start.

    Warm starts: ``"zero"`` seeds only the first subgradient (the first LP
    already lands on a feasible vertex); ``"l1"`` first minimizes sum(z) over
    the feasible box, i.e. the plain l1-optimal discretized control.

    Raises ``AssumptionViolationError`` for an inadmissible penalty,
    ``InfeasibleProblemError`` (with the phase-1 certificate) when no
    admissible control reaches the origin, and ``NumericalError`` if an LP
    subproblem fails.
    """
    report = validate_assumption(pen)
    if not report.passed:
        raise AssumptionViolationError(
            f"{pen.kind}: structural conditions violated: {report.violated}"
            f" (worst margin {report.worst_margin:.3e} at u={report.witness_u})",
            report=report,
        )
    m, N = dp.m, dp.N
    q = 2 * m * N
    Aeq = dp.Phi
    beq = -dp.zeta
    feas_gate = 1e-8

    def _solve(c, what):
        sol = solve_lp(LpProblem(c, Aeq, beq), tol=cfg.lp_tol)
        if sol.status == INFEASIBLE:
            raise InfeasibleProblemError(
                f"no admissible control reaches the origin "
                f"(phase-1 certificate {sol.phase1_value:.6e})",
                certificate=sol.phase1_value,
            )
        if sol.status == NUMERICAL_FAILURE:
            raise NumericalError(f"LP failure in {what} "
                                 f"(equality residual {sol.eq_residual:.3e})")
        return sol

    lp_solves = 0
    max_kkt = 0.0
    cost_history: list[float] = []
    feas_history: list[float] = []

    if cfg.warm_start == "l1":
        sol = _solve(np.ones(q), "the l1 warm start")
        lp_solves += 1
        max_kkt = max(max_kkt, sol.kkt_residual)
        z = sol.z
        resid = sol.eq_residual
    else:
        z = np.zeros(q)
        resid = float(np.max(np.abs(Aeq @ z - beq)))

    prev_cost = None
    if resid <= feas_gate:  # track costs only along feasible iterates
        prev_cost = cost_jd(pen, SplitControl(dp.delta, N, m, z))
        cost_history.append(prev_cost)
        feas_history.append(resid)

    stop_reason = "max_iter"
    iterations = 0
    for _ in range(cfg.max_iter):
        s = phi_subgradient(pen, np.clip(z, 0.0, 1.0), eps=cfg.lp_epsilon)
        sol = _solve(1.0 - s, f"iteration {iterations + 1}")
        lp_solves += 1
        iterations += 1
        max_kkt = max(max_kkt, sol.kkt_residual)
        z_new = sol.z
        cost_new = cost_jd(pen, SplitControl(dp.delta, N, m, z_new))
        cost_history.append(cost_new)
        feas_history.append(sol.eq_residual)
        step = float(np.max(np.abs(z_new - z)))
        done_cost = prev_cost is not None and abs(cost_new - prev_cost) <= cfg.cost_tol
        z = z_new
        prev_cost = cost_new
        if done_cost:
            stop_reason = "cost_stall"
            break
        if step <= cfg.step_tol:
            stop_reason = "step_stall"
            break

    z_star = SplitControl(dp.delta, N, m, z)
    u_star = recombine(z_star)
    comp = float(np.max(np.minimum(z_star.v, z_star.w), initial=0.0))
    return DcaResult(
        z_star=z_star,
        u_star=u_star,
        cost_history=cost_history,
        iterations=iterations,
        lp_solves=lp_solves,
        l0=l0_measure(u_star, cfg.l0_threshold),
        feas_residual=float(np.max(np.abs(Aeq @ z - beq))),
        complementarity_violation=comp,
        bob_deviation=bang_off_bang_deviation(u_star),
        stop_reason=stop_reason,
        feas_history=feas_history,
        max_kkt_residual=max_kkt,
    )
