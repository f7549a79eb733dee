"""Continuous-time problem data and its zero-order-hold discretization.

The control enters through the stacked nonnegative split: each sample k
contributes a block [v[k]; w[k]] with u[k] = v[k] - w[k], so the one-step
input matrix is built for [B, -B] and the reachability map ``Phi`` has one
n x 2m block per sample.  Steering to the origin is the single equality
constraint ``Phi @ z + zeta = 0`` over the box [0, 1]^(2mN).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, NumericalError, ParameterError
from .linalg import as_matrix, as_vector, zoh_discretize
from .lp import INFEASIBLE, NUMERICAL_FAILURE, LpProblem, solve_lp


@dataclass
class LinearSystem:
    """Constant dx/dt = A x + B u with n states and m inputs."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        self.A = as_matrix(self.A, "A")
        self.B = as_matrix(self.B, "B")
        if self.A.shape[0] != self.A.shape[1]:
            raise DimensionError(f"A must be square, got {self.A.shape}")
        if self.B.shape[0] != self.A.shape[0]:
            raise DimensionError(
                f"B must have {self.A.shape[0]} rows, got {self.B.shape}"
            )

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]


def double_integrator() -> LinearSystem:
    """The canonical benchmark plant: position/velocity chain with one input."""
    return LinearSystem(np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0], [1.0]]))


@dataclass
class ControlProblem:
    """Steer ``system`` from ``x0`` to the origin within horizon ``T``."""

    system: LinearSystem
    x0: np.ndarray
    T: float

    def __post_init__(self):
        self.x0 = as_vector(self.x0, "x0")
        if self.x0.shape[0] != self.system.n:
            raise DimensionError(
                f"x0 has length {self.x0.shape[0]}, expected {self.system.n}"
            )
        if not np.isfinite(self.T) or self.T <= 0:
            raise DomainError(f"T must be positive and finite, got {self.T}")


@dataclass
class DiscreteProblem:
    """Grid data: step, sample count, one-step maps, reachability map, drift.

    ``Bd`` covers the split input [B, -B]; ``Phi`` stacks
    Ad^(N-1) Bd, ..., Ad Bd, Bd left to right; ``zeta = Ad^N x0`` is where the
    state drifts with zero input, so feasibility means Phi @ z = -zeta.
    """

    delta: float
    N: int
    Ad: np.ndarray
    Bd: np.ndarray
    Phi: np.ndarray
    zeta: np.ndarray

    def __post_init__(self):
        self.Ad = as_matrix(self.Ad, "Ad")
        self.Bd = as_matrix(self.Bd, "Bd")
        self.Phi = as_matrix(self.Phi, "Phi")
        self.zeta = as_vector(self.zeta, "zeta")
        n = self.Ad.shape[0]
        if self.Ad.shape != (n, n) or self.Bd.shape[0] != n or self.Bd.shape[1] % 2:
            raise DimensionError("Ad/Bd shapes are inconsistent")
        if self.N < 1:
            raise ParameterError(f"N must be at least 1, got {self.N}")
        if not np.isfinite(self.delta) or self.delta <= 0:
            raise DomainError(f"delta must be positive, got {self.delta}")
        if self.Phi.shape != (n, self.Bd.shape[1] * self.N) or self.zeta.shape[0] != n:
            raise DimensionError("Phi/zeta shapes do not match Ad, Bd, N")

    @property
    def n(self) -> int:
        return self.Ad.shape[0]

    @property
    def m(self) -> int:
        return self.Bd.shape[1] // 2


def build_discrete(problem: ControlProblem, N: int) -> DiscreteProblem:
    """Discretize over N equal steps of length T/N."""
    if N < 1:
        raise ParameterError(f"N must be at least 1, got {N}")
    sys_ = problem.system
    delta = problem.T / N
    Ad, Bd = zoh_discretize(sys_.A, np.hstack([sys_.B, -sys_.B]), delta)
    blocks = [np.empty(0)] * N
    blocks[N - 1] = Bd
    for k in range(N - 2, -1, -1):
        blocks[k] = Ad @ blocks[k + 1]
    Phi = np.hstack(blocks)
    zeta = np.linalg.matrix_power(Ad, N) @ problem.x0
    return DiscreteProblem(delta, N, Ad, Bd, Phi, zeta)


def simulate(dp: DiscreteProblem, x0, z) -> np.ndarray:
    """Roll the discrete recursion forward; returns states of shape (N+1, n)."""
    x0 = as_vector(x0, "x0")
    z = as_vector(z, "z")
    n, m, N = dp.n, dp.m, dp.N
    if x0.shape[0] != n:
        raise DimensionError(f"x0 has length {x0.shape[0]}, expected {n}")
    if z.shape[0] != 2 * m * N:
        raise DimensionError(f"z has length {z.shape[0]}, expected {2 * m * N}")
    states = np.empty((N + 1, n))
    states[0] = x0
    x = x0
    for k in range(N):
        x = dp.Ad @ x + dp.Bd @ z[2 * m * k : 2 * m * (k + 1)]
        states[k + 1] = x
    return states


def check_feasible(dp: DiscreteProblem, tol: float = 1e-8) -> tuple[bool, np.ndarray | None]:
    """Whether any boxed split control steers to the origin within ``tol``.

    Solves the phase-1 problem behind a zero-objective LP; returns the
    feasible witness when the minimal artificial mass is at most ``tol``.
    """
    if tol <= 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    q = 2 * dp.m * dp.N
    sol = solve_lp(LpProblem(np.zeros(q), dp.Phi, -dp.zeta), tol=min(tol, 1e-9))
    if sol.status == NUMERICAL_FAILURE:
        raise NumericalError(
            f"feasibility LP failed (equality residual {sol.eq_residual:.3e})"
        )
    if sol.status == INFEASIBLE and sol.phase1_value > tol:
        return False, None
    return True, sol.z
