"""
Bounded Levenberg-Marquardt least squares with finite-difference Jacobians
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional

import numpy as np

from ..errors import BadStartError, InsufficientDataError, JacobianError

logger = logging.getLogger(__name__)

Residual = Callable[[np.ndarray], np.ndarray]

INITIAL_DAMPING = 1e-3
DAMPING_FACTOR = 10.0
MAX_DAMPING = 1e16
DEFAULT_STEP_SCALE = 6e-6
FTOL_STREAK = 2


class FitStatus(Enum):
    CONVERGED = "converged"
    MAX_ITER = "max-iter"
    STALLED = "stalled"


@dataclass
class FitProblem:
    """
    Least-squares problem min 0.5 * ||residual(p)||^2 subject to box bounds.

    Attributes:
        residual: maps a parameter vector to a residual vector
        initial: starting parameters (must lie within the bounds)
        lower: lower bounds, -inf where unbounded
        upper: upper bounds, +inf where unbounded
        max_iterations: iteration cap
        xtol: relative step-norm tolerance
        gtol: max-abs gradient tolerance
        ftol: relative cost-decrease tolerance
    """

    residual: Residual
    initial: np.ndarray
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    max_iterations: int = 500
    xtol: float = 1e-10
    gtol: float = 1e-8
    ftol: float = 1e-10

    def __post_init__(self):
        self.initial = np.array(self.initial, dtype=float).reshape(-1)
        size = self.initial.size
        self.lower = (
            np.full(size, -np.inf)
            if self.lower is None
            else np.array(self.lower, dtype=float).reshape(-1)
        )
        self.upper = (
            np.full(size, np.inf)
            if self.upper is None
            else np.array(self.upper, dtype=float).reshape(-1)
        )
        if self.lower.size != size or self.upper.size != size:
            raise ValueError("bounds must match the number of parameters")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bounds exceed upper bounds")
        if np.any(self.initial < self.lower) or np.any(self.initial > self.upper):
            raise ValueError("initial parameters lie outside the bounds")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class FitResult:
    """Outcome of a least-squares run; cost is 0.5 * ||r||^2"""

    params: np.ndarray
    cost: float
    uncertainty: np.ndarray
    iterations: int
    status: FitStatus
    cost_history: List[float] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status is FitStatus.CONVERGED

    def to_dict(self) -> dict:
        return {
            "params": [float(v) for v in self.params],
            "cost": float(self.cost),
            "uncertainty": [float(v) for v in self.uncertainty],
            "iterations": self.iterations,
            "status": self.status.value,
        }


def _evaluate(residual: Residual, params: np.ndarray) -> np.ndarray:
    return np.asarray(residual(params), dtype=float).reshape(-1)


def finite_difference_jacobian(
    residual: Residual,
    params: np.ndarray,
    step_scale: float = DEFAULT_STEP_SCALE,
    lower: Optional[np.ndarray] = None,
    upper: Optional[np.ndarray] = None,
    base: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Jacobian of the residual by central differences.

    The step for parameter j is step_scale * max(|p_j|, 1). A side that
    would cross a bound is dropped in favour of a one-sided difference.

    Args:
        residual: residual function
        params: evaluation point
        step_scale: relative step size
        lower: lower bounds (optional)
        upper: upper bounds (optional)
        base: residual at params, if already known

    Returns:
        (m, n) matrix of partial derivatives

    Raises:
        JacobianError: any non-finite entry
    """
    p = np.array(params, dtype=float).reshape(-1)
    n = p.size
    lower = np.full(n, -np.inf) if lower is None else np.asarray(lower, dtype=float)
    upper = np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=float)
    r0 = _evaluate(residual, p) if base is None else base
    jac = np.empty((r0.size, n))

    for j in range(n):
        h = step_scale * max(abs(p[j]), 1.0)
        span = upper[j] - lower[j]
        if span == 0:
            jac[:, j] = 0.0
            continue
        if np.isfinite(span):
            h = min(h, 0.5 * span)
        forward_ok = p[j] + h <= upper[j]
        backward_ok = p[j] - h >= lower[j]

        shifted = p.copy()
        if forward_ok and backward_ok:
            shifted[j] = p[j] + h
            r_plus = _evaluate(residual, shifted)
            shifted[j] = p[j] - h
            r_minus = _evaluate(residual, shifted)
            jac[:, j] = (r_plus - r_minus) / (2 * h)
        elif forward_ok:
            shifted[j] = p[j] + h
            jac[:, j] = (_evaluate(residual, shifted) - r0) / h
        else:
            shifted[j] = p[j] - h
            jac[:, j] = (r0 - _evaluate(residual, shifted)) / h

    if not np.all(np.isfinite(jac)):
        bad = sorted({int(j) for j in np.argwhere(~np.isfinite(jac))[:, 1]})
        raise JacobianError(f"non-finite Jacobian columns {bad}")
    return jac


def _uncertainty(jac: np.ndarray, cost: float) -> np.ndarray:
    m, n = jac.shape
    dof = max(m - n, 1)
    covariance = np.linalg.pinv(jac.T @ jac) * (2 * cost / dof)
    return np.sqrt(np.clip(np.diag(covariance), 0.0, None))


def _damped_step(jac: np.ndarray, gradient: np.ndarray, damping: float) -> np.ndarray:
    normal = jac.T @ jac
    scale = np.diag(normal).copy()
    floor = 1e-12 * scale.max() if scale.max() > 0 else 1e-12
    scale = np.maximum(scale, floor)
    try:
        return np.linalg.solve(normal + damping * np.diag(scale), -gradient)
    except np.linalg.LinAlgError:
        damped = normal + damping * np.diag(scale)
        return np.linalg.lstsq(damped, -gradient, rcond=None)[0]


def least_squares(problem: FitProblem, step_scale: float = DEFAULT_STEP_SCALE) -> FitResult:
    """
    Solve a bounded nonlinear least-squares problem by Levenberg-Marquardt.

    Damping starts at 1e-3 and is divided by 10 on every accepted step and
    multiplied by 10 on every rejected one. Trial points are projected onto
    the bounds. Accepted costs never increase.

    Convergence: max |gradient| < gtol; a step shorter than xtol while the
    damping is at or below its starting value; two consecutive accepted
    steps at that damping whose relative cost decrease is below ftol; or a
    step shorter than xtol that fails to lower the cost.

    Args:
        problem: the problem definition
        step_scale: relative finite-difference step

    Returns:
        FitResult with status converged, max-iter or stalled

    Raises:
        BadStartError: residual not finite at the initial parameters
        InsufficientDataError: fewer residuals than parameters
    """
    lower, upper = problem.lower, problem.upper
    params = np.clip(problem.initial.copy(), lower, upper)
    residuals = _evaluate(problem.residual, params)
    if not np.all(np.isfinite(residuals)):
        raise BadStartError("residual is not finite at the initial parameters")
    if residuals.size < params.size:
        raise InsufficientDataError(
            f"{residuals.size} residuals for {params.size} parameters"
        )

    cost = 0.5 * float(residuals @ residuals)
    history = [cost]
    jac = finite_difference_jacobian(
        problem.residual, params, step_scale, lower, upper, base=residuals
    )
    if cost == 0.0:
        return FitResult(
            params, 0.0, np.zeros(params.size), 0, FitStatus.CONVERGED, history
        )

    damping = INITIAL_DAMPING
    status = FitStatus.MAX_ITER
    iteration = 0
    small_decreases = 0
    while iteration < problem.max_iterations:
        iteration += 1
        gradient = jac.T @ residuals
        if np.max(np.abs(gradient)) < problem.gtol:
            status = FitStatus.CONVERGED
            break

        trial = np.clip(params + _damped_step(jac, gradient, damping), lower, upper)
        step = trial - params
        tiny_step = np.linalg.norm(step) < problem.xtol * (
            np.linalg.norm(params) + problem.xtol
        )
        # under heavy damping a short step says nothing about the minimum
        if tiny_step and damping <= INITIAL_DAMPING:
            status = FitStatus.CONVERGED
            break

        trial_residuals = _evaluate(problem.residual, trial)
        trial_cost = (
            0.5 * float(trial_residuals @ trial_residuals)
            if np.all(np.isfinite(trial_residuals))
            else np.inf
        )
        if trial_cost < cost:
            decrease = (cost - trial_cost) / cost
            undamped = damping <= INITIAL_DAMPING
            params, residuals, cost = trial, trial_residuals, trial_cost
            history.append(cost)
            damping /= DAMPING_FACTOR
            jac = finite_difference_jacobian(
                problem.residual, params, step_scale, lower, upper, base=residuals
            )
            if cost == 0.0:
                status = FitStatus.CONVERGED
                break
            # ftol only counts on consecutive lightly damped steps
            if decrease < problem.ftol and undamped:
                small_decreases += 1
            else:
                small_decreases = 0
            if small_decreases >= FTOL_STREAK:
                status = FitStatus.CONVERGED
                break
        elif tiny_step:
            # a vanishing steepest-descent step that still fails: numerical minimum
            status = FitStatus.CONVERGED
            break
        else:
            damping *= DAMPING_FACTOR
            if damping > MAX_DAMPING:
                status = FitStatus.STALLED
                break

    logger.debug(
        "least squares %s after %d iterations, cost %.3e",
        status.value,
        iteration,
        cost,
    )
    return FitResult(
        params=params,
        cost=cost,
        uncertainty=_uncertainty(jac, cost),
        iterations=iteration,
        status=status,
        cost_history=history,
    )
