"""
Damped Newton solver for unregularized (or ridge) logistic regression

Each agent's problem is low dimensional (|S_i| + |Pa(A_i)| columns), so a
full Newton step with a backtracking line search is cheap and drives the
gradient down to near machine precision, which the orthogonality and
decomposition checks rely on.
"""
import logging
from typing import NamedTuple, Optional

import numpy as np

import network_aggregation.globals as GV
from network_aggregation.errors import (
    DimensionMismatch, InvalidLabels, LengthMismatch, NonFinite)
from network_aggregation.solver.logistic_utils import (
    bce_loss, bce_objective, predict_logits, sigmoid)

logger = logging.getLogger(__name__)

DIAGNOSTIC_NORM_CAP = "weight norm cap"
DIAGNOSTIC_STALLED = "line search stalled"
DIAGNOSTIC_MAX_ITERS = "max iterations"


class FitOptions(NamedTuple):
    """
    Solver configuration

    grad_tol is the sup-norm of the gradient at which the fit counts as
    converged, ridge adds ridge * |w|^2 / 2 to the objective and the line
    search starts at `initial_step` shrinking by `backtrack`.
    """
    grad_tol: float = GV.DEFAULT_GRAD_TOL
    max_iters: int = GV.DEFAULT_MAX_ITERS
    ridge: float = 0.0
    backtrack: float = GV.DEFAULT_BACKTRACK
    initial_step: float = GV.DEFAULT_INITIAL_STEP
    armijo: float = GV.DEFAULT_ARMIJO
    min_step: float = GV.DEFAULT_MIN_STEP
    fit_intercept: bool = False
    weight_norm_cap: float = GV.WEIGHT_NORM_CAP

    def validate(self) -> "FitOptions":
        """
        Check option ranges

        Raises:
            ValueError: grad_tol <= 0, max_iters < 1, ridge < 0 or a line
                search parameter outside its range

        Returns:
            FitOptions: self, for chaining
        """
        if not self.grad_tol > 0:
            raise ValueError(f"grad_tol must be > 0, got {self.grad_tol}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.ridge < 0:
            raise ValueError(f"ridge must be >= 0, got {self.ridge}")
        if not 0 < self.backtrack < 1:
            raise ValueError(
                f"backtrack must lie in (0, 1), got {self.backtrack}")
        if not self.initial_step > 0:
            raise ValueError(
                f"initial_step must be > 0, got {self.initial_step}")
        return self

    def to_dict(self) -> dict:
        return dict(self._asdict())


class FitResult(NamedTuple):
    """
    Output of fit_logistic, `loss` is the empirical BCE at the solution
        without the ridge term
    """
    weights: np.ndarray
    loss: float
    grad_norm: float
    iterations: int
    converged: bool
    intercept: float = 0.0
    diagnostic: Optional[str] = None

    def logits(self, design: np.ndarray) -> np.ndarray:
        """
        Logits of this fit on `design`
        """
        return predict_logits(self.weights, design) + self.intercept

    def to_dict(self) -> dict:
        return {"weights": [float(weight) for weight in self.weights],
                "loss": self.loss,
                "grad_norm": self.grad_norm,
                "iterations": self.iterations,
                "converged": self.converged,
                "intercept": self.intercept,
                "diagnostic": self.diagnostic}


def _validate_inputs(design: np.ndarray, labels: np.ndarray):
    design_matrix = np.asarray(design, dtype=np.float64)
    label_vector = np.asarray(labels, dtype=np.float64)
    if design_matrix.ndim != 2:
        raise DimensionMismatch(
            f"design must be 2-D, got shape {design_matrix.shape}")
    if label_vector.ndim != 1 or \
            label_vector.shape[0] != design_matrix.shape[0]:
        raise LengthMismatch(
            f"{design_matrix.shape[0]} design rows for labels of shape "
            f"{label_vector.shape}")
    if design_matrix.shape[0] < 1:
        raise LengthMismatch("fit_logistic needs at least one sample")
    if not np.all(np.isfinite(design_matrix)):
        raise NonFinite("design contains non-finite values")
    if not np.all(np.isfinite(label_vector)):
        raise NonFinite("labels contain non-finite values")
    if not np.all((label_vector == 0) | (label_vector == 1)):
        raise InvalidLabels("labels must only contain 0 and 1")
    return design_matrix, label_vector


def _newton_direction(design: np.ndarray, weights: np.ndarray,
                      gradient: np.ndarray, ridge: float) -> np.ndarray:
    probabilities = sigmoid(design @ weights)
    curvature = probabilities * (1.0 - probabilities)
    hessian = (design.T * curvature) @ design / design.shape[0]
    if ridge > 0:
        hessian += ridge * np.eye(hessian.shape[0])
    # Minimum norm step, collinear columns (ex. a duplicated parent logit)
    # leave the Hessian singular
    direction, _residuals, rank, _singular = np.linalg.lstsq(
        hessian, -gradient, rcond=None)
    if rank < hessian.shape[0]:
        logger.debug("Hessian rank %d < %d, using minimum norm step", rank,
                     hessian.shape[0])
    return direction


def fit_logistic(design: np.ndarray, labels: np.ndarray,
                 opts: FitOptions = FitOptions(),
                 initial_weights: Optional[np.ndarray] = None) -> FitResult:
    """
    Minimize the empirical BCE (plus optional ridge) of a linear logit
        model over the columns of `design` with damped Newton steps

    The fit never raises on degenerate data: separable data stops once the
    weight norm passes `opts.weight_norm_cap`, a line search that cannot
    decrease the objective stops the fit, both with converged=False and a
    diagnostic.

    Args:
        design (np.ndarray): n x m design matrix, m may be 0
        labels (np.ndarray): length n labels in {0, 1}
        opts (FitOptions, optional): solver options. Defaults to FitOptions().
        initial_weights (np.ndarray, optional): warm start over the m design
            columns, used only when its objective is no worse than the zero
            vector. Defaults to None.

    Raises:
        NonFinite: design or labels contain nan/inf
        InvalidLabels: labels are not all 0/1
        LengthMismatch: rows and labels disagree

    Returns:
        FitResult: weights, loss and convergence diagnostics
    """
    opts.validate()
    design_matrix, label_vector = _validate_inputs(design, labels)
    column_count = design_matrix.shape[1]

    if column_count == 0 and not opts.fit_intercept:
        return FitResult(np.zeros(0),
                         bce_loss(np.zeros(design_matrix.shape[0]),
                                  label_vector),
                         0.0, 0, True)

    if opts.fit_intercept:
        design_matrix = np.hstack(
            [design_matrix, np.ones((design_matrix.shape[0], 1))])

    def objective(weights: np.ndarray):
        return bce_objective(weights, design_matrix, label_vector, opts.ridge)

    weights = np.zeros(design_matrix.shape[1])
    objective_value, gradient = objective(weights)

    if initial_weights is not None:
        warm_start = np.asarray(initial_weights, dtype=np.float64)
        if warm_start.shape != (column_count,):
            raise DimensionMismatch(
                f"initial_weights of shape {warm_start.shape} for "
                f"{column_count} design columns")
        if opts.fit_intercept:
            warm_start = np.append(warm_start, 0.0)
        warm_value, warm_gradient = objective(warm_start)
        if warm_value <= objective_value:
            weights, objective_value, gradient = (
                warm_start, warm_value, warm_gradient)

    iterations = 0
    converged = False
    diagnostic = None
    while True:
        grad_norm = float(np.max(np.abs(gradient)))
        if grad_norm <= opts.grad_tol:
            converged = True
            break
        if iterations >= opts.max_iters:
            diagnostic = DIAGNOSTIC_MAX_ITERS
            break

        direction = _newton_direction(design_matrix, weights, gradient,
                                      opts.ridge)
        slope = float(gradient @ direction)
        if not slope < 0:
            direction = -gradient
            slope = -float(gradient @ gradient)

        # Rounding slack so steps taken at the optimum are not rejected
        slack = 8 * np.finfo(np.float64).eps * max(1.0, abs(objective_value))
        step = opts.initial_step
        while True:
            candidate = weights + step * direction
            candidate_value, candidate_gradient = objective(candidate)
            if candidate_value <= (objective_value + opts.armijo * step * slope
                                   + slack):
                break
            step *= opts.backtrack
            if step < opts.min_step:
                candidate = None
                break
        if candidate is None:
            diagnostic = DIAGNOSTIC_STALLED
            break

        weights, objective_value, gradient = (
            candidate, candidate_value, candidate_gradient)
        iterations += 1
        logger.debug("newton iteration %d objective %.17g grad %.3e step %g",
                     iterations, objective_value,
                     float(np.max(np.abs(gradient))), step)

        if np.linalg.norm(weights) > opts.weight_norm_cap:
            grad_norm = float(np.max(np.abs(gradient)))
            diagnostic = DIAGNOSTIC_NORM_CAP
            break

    if diagnostic is not None:
        logger.debug("fit stopped after %d iterations: %s (grad %.3e)",
                     iterations, diagnostic, grad_norm)

    intercept = 0.0
    if opts.fit_intercept:
        intercept = float(weights[-1])
        weights = weights[:-1]
    loss = bce_loss(predict_logits(weights, design_matrix[:, :column_count])
                    + intercept, label_vector)
    return FitResult(weights, loss, grad_norm, iterations, converged,
                     intercept, diagnostic)
