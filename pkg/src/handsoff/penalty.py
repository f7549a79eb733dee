"""Sparsity-promoting penalty catalog and the concave-gap transform.

Each catalog entry is a scalar penalty ``psi`` applied coordinatewise to a
control value in [-1, 1].  The solver never uses ``psi`` directly; it works
with the gap ``phi(u) = |u| - psi(u)``, which is convex on [0, 1] for every
valid parameter choice and is the part the DC iteration linearizes.

A penalty is admissible for the support-measure equivalence when, on top of
its parameter ranges, it satisfies four structural conditions: the penalty
acts coordinatewise (by construction here), the gap is even, the gap is zero
at the origin and strictly below its chord ``phi(1)|u|`` inside the unit
interval, and ``phi(1) < 1``.  ``validate_assumption`` checks the non-trivial
parts on a grid; ``equivalence_constant`` returns ``1 - phi(1)``, the factor
that converts the discrete objective into a support count on bang-off-bang
signals.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import AssumptionViolationError, DomainError, ParameterError

KINDS = ("lp", "mcp", "scad", "lsp", "capped_l1", "l1l2")

_PSI_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class Penalty:
    """One catalog entry: a kind tag plus its numeric parameters.

    ``lam`` is the weight common to all kinds; ``alpha`` is the shape/knee
    parameter (unused by ``l1l2``); ``p`` is the exponent used only by
    ``lp``.
    """

    kind: str
    lam: float
    alpha: float | None = None
    p: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown penalty kind {self.kind!r}; expected one of {KINDS}")
        lam = self.lam
        if not np.isfinite(lam):
            raise ParameterError(f"{self.kind}: lambda must be finite, got {lam}")
        if self.kind == "lp":
            if lam <= 0:
                raise ParameterError(f"lp: lambda must satisfy lambda > 0, got {lam}")
            if self.p is None or not np.isfinite(self.p) or not 0 < self.p < 1:
                raise ParameterError(f"lp: p must lie in (0, 1), got {self.p}")
        elif self.kind == "mcp":
            if lam <= 0:
                raise ParameterError(f"mcp: lambda must satisfy lambda > 0, got {lam}")
            self._need_alpha(lambda a: a > 0, "alpha > 0")
        elif self.kind == "scad":
            if not 0 < lam < 1:
                raise ParameterError(f"scad: lambda must lie in (0, 1), got {lam}")
            self._need_alpha(lambda a: a > 1, "alpha > 1")
        elif self.kind == "lsp":
            if lam <= 0:
                raise ParameterError(f"lsp: lambda must satisfy lambda > 0, got {lam}")
            self._need_alpha(lambda a: a > 0, "alpha > 0")
        elif self.kind == "capped_l1":
            if lam <= 0:
                raise ParameterError(f"capped_l1: lambda must satisfy lambda > 0, got {lam}")
            # alpha = 1 is constructible so the degenerate gap shows up as a
            # structural violation rather than a range error.
            self._need_alpha(lambda a: 0 < a <= 1, "alpha in (0, 1]")
        elif self.kind == "l1l2":
            # same reasoning for lambda = 1: phi(1) hits 1 and the report says so.
            if not 0 < lam <= 1:
                raise ParameterError(f"l1l2: lambda must lie in (0, 1], got {lam}")

    def _need_alpha(self, ok, desc: str):
        if self.alpha is None or not np.isfinite(self.alpha) or not ok(self.alpha):
            raise ParameterError(f"{self.kind}: alpha must satisfy {desc}, got {self.alpha}")


def _check_unit_box(u: np.ndarray, lo: float, hi: float, what: str):
    if u.size and (u.min() < lo - _PSI_DOMAIN_SLACK or u.max() > hi + _PSI_DOMAIN_SLACK):
        raise DomainError(f"{what}: values must lie in [{lo}, {hi}]")
    if u.size and not np.all(np.isfinite(u)):
        raise DomainError(f"{what}: values must be finite")


def _psi_abs(pen: Penalty, a: np.ndarray) -> np.ndarray:
    """psi evaluated on a = |u| (array, entries in [0, 1])."""
    lam = pen.lam
    if pen.kind == "lp":
        return lam * a ** pen.p
    if pen.kind == "mcp":
        alpha = pen.alpha
        knee = alpha * lam
        return np.where(a <= knee, lam * a - a * a / (2.0 * alpha), knee * lam / 2.0)
    if pen.kind == "scad":
        alpha = pen.alpha
        mid = -(a * a - 2.0 * alpha * lam * a + lam * lam) / (2.0 * (alpha - 1.0))
        top = (alpha + 1.0) * lam * lam / 2.0
        return np.where(a <= lam, lam * a, np.where(a <= alpha * lam, mid, top))
    if pen.kind == "lsp":
        return lam * np.log1p(a / pen.alpha)
    if pen.kind == "capped_l1":
        return lam * np.minimum(a, pen.alpha)
    # l1l2
    return a - lam * a * a


def psi(pen: Penalty, u):
    """Penalty value at u (scalar or array), defined for |u| <= 1."""
    arr = np.asarray(u, dtype=float)
    _check_unit_box(np.abs(arr), 0.0, 1.0, "psi")
    out = _psi_abs(pen, np.abs(arr))
    return float(out) if arr.ndim == 0 else out


def phi(pen: Penalty, u):
    """Concave-gap value |u| - psi(u)."""
    arr = np.asarray(u, dtype=float)
    _check_unit_box(np.abs(arr), 0.0, 1.0, "phi")
    out = np.abs(arr) - _psi_abs(pen, np.abs(arr))
    return float(out) if arr.ndim == 0 else out


def phi_subgradient(pen: Penalty, u, eps: float = 1e-8):
    """A deterministic subgradient of phi on [0, 1].

    Smooth points use the derivative, kinks the left derivative, and the
    origin the right derivative.  For the ``lp`` kind, whose right derivative
    at 0 diverges, the derivative is evaluated no closer to 0 than ``eps``.
    """
    arr = np.asarray(u, dtype=float)
    _check_unit_box(arr, 0.0, 1.0, "phi_subgradient")
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    a = np.clip(arr, 0.0, 1.0)
    lam = pen.lam
    if pen.kind == "lp":
        out = 1.0 - lam * pen.p * np.maximum(a, eps) ** (pen.p - 1.0)
    elif pen.kind == "mcp":
        out = np.where(a <= pen.alpha * lam, 1.0 - lam + a / pen.alpha, 1.0)
    elif pen.kind == "scad":
        alpha = pen.alpha
        mid = 1.0 - (alpha * lam - a) / (alpha - 1.0)
        out = np.where(a <= lam, 1.0 - lam, np.where(a <= alpha * lam, mid, 1.0))
    elif pen.kind == "lsp":
        out = 1.0 - lam / (pen.alpha + a)
    elif pen.kind == "capped_l1":
        out = np.where(a <= pen.alpha, 1.0 - lam, 1.0)
    else:  # l1l2
        out = 2.0 * lam * a
    return float(out) if arr.ndim == 0 else out


@dataclass
class AssumptionReport:
    """Outcome of the grid check of the structural conditions."""

    passed: bool
    violated: list[str] = field(default_factory=list)
    worst_margin: float = float("inf")
    witness_u: float = float("nan")
    grid_size: int = 0
    note: str = "grid-verified"


def validate_assumption(pen: Penalty, grid_size: int = 1000, margin: float = 1e-12) -> AssumptionReport:
    """Check the structural conditions on a uniform grid of (0, 1].

    Coordinatewise action and a shared gap across channels (conditions A1 and
    A4) hold by construction: a single scalar penalty is applied to every
    input channel.  Evenness (A2) and the strict chord bounds (A3) are
    verified numerically; the report records the worst margin and the grid
    point attaining it.
    """
    if grid_size < 100:
        raise ParameterError(f"grid_size must be at least 100, got {grid_size}")
    if not np.isfinite(margin) or margin < 0:
        raise ParameterError(f"margin must be nonnegative, got {margin}")
    grid = np.arange(1, grid_size + 1, dtype=float) / grid_size  # (0, 1]
    violated = []

    sym_gap = float(np.max(np.abs(phi(pen, grid) - phi(pen, -grid))))
    if sym_gap > 1e-14:
        violated.append("A2")

    phi_vals = phi(pen, grid)
    phi_one = float(phi_vals[-1])
    worst = 1.0 - phi_one
    witness = 1.0
    interior = grid[:-1]
    chord_slack = phi_one * interior - phi_vals[:-1]
    if interior.size:
        k = int(np.argmin(chord_slack))
        if chord_slack[k] < worst:
            worst = float(chord_slack[k])
            witness = float(interior[k])
    origin_ok = phi(pen, 0.0) == 0.0
    if (not origin_ok) or worst <= margin:
        violated.append("A3")

    return AssumptionReport(
        passed=not violated,
        violated=violated,
        worst_margin=float(worst),
        witness_u=float(witness),
        grid_size=grid_size,
    )


def equivalence_constant(pen: Penalty) -> float:
    """Factor c = 1 - phi(1) converting the discrete objective to a support count."""
    c = 1.0 - phi(pen, 1.0)
    if c <= 0.0:
        raise AssumptionViolationError(
            f"{pen.kind}: equivalence constant {c} is not positive; the gap at 1 reaches 1"
        )
    return float(c)
