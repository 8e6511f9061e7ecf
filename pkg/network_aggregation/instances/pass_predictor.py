"""
Closed forms for the best predictor at the end of pass p on the hard instance

A pass-p logit z = sum_{j<p} c_j x_{k-j} can be rewritten as
z = c Z_k + eta with c = c_0, alpha_j = c_j - c_{j-1} and
Var(eta) = sum alpha_j^2 + (sum alpha_j + c)^2. For fixed c the variance is
minimized by equal alphas summing to S = -c (p - 1) / p, which leaves
Var(eta) = c^2 / p, i.e. z = c (Z_k + xi / sqrt(p)) with Var(xi) = V_p = 1.
"""
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize

from network_aggregation.errors import InvalidDimension

BRUTE_FORCE_GRID = 41


class PassPredictor(NamedTuple):
    """
    Pass-p predictor: `coefficients` are c_0..c_{p-1} over the features
        x_k, x_{k-1}, ..., x_{k-p+1}, `alphas` their consecutive differences
        and `residual_variance` is Var(eta). `noise_variance_scaled` is
        V_p = p Var(eta) / c^2.
    """
    p: int
    c: float
    coefficients: np.ndarray
    alphas: np.ndarray
    residual_variance: float
    noise_variance_scaled: float

    @property
    def alpha_sum(self) -> float:
        return float(np.sum(self.alphas))

    def feature_weights(self, k: int) -> np.ndarray:
        """
        Length k weight vector over x_1..x_k

        Raises:
            InvalidDimension: p > k
        """
        if self.p > k:
            raise InvalidDimension(f"Pass p={self.p} needs k >= p, got {k}")
        weights = np.zeros(k)
        for offset, coefficient in enumerate(self.coefficients):
            weights[k - 1 - offset] = coefficient
        return weights

    def to_dict(self) -> dict:
        return {"p": self.p,
                "c": self.c,
                "coefficients": [float(value) for value in self.coefficients],
                "alphas": [float(value) for value in self.alphas],
                "alpha_sum": self.alpha_sum,
                "residual_variance": self.residual_variance,
                "noise_variance_scaled": self.noise_variance_scaled}


def variance_of_residual(alphas: Sequence[float], c: float) -> float:
    """
    Var(eta) = sum alpha_j^2 + (sum alpha_j + c)^2 for i.i.d. N(0, 1)
        latents
    """
    alpha_vector = np.asarray(alphas, dtype=np.float64)
    return float(alpha_vector @ alpha_vector
                 + (np.sum(alpha_vector) + c) ** 2)


def _check_pass(p: int):
    if p < 1:
        raise InvalidDimension(f"Pass index must be >= 1, got {p}")


def pass_predictor_from_alphas(p: int, c: float,
                               alphas: Sequence[float]) -> PassPredictor:
    """
    Build the PassPredictor with scaling c and coefficient differences
        `alphas` (p - 1 values)

    Raises:
        InvalidDimension: p < 1 or len(alphas) != p - 1
    """
    _check_pass(p)
    alpha_vector = np.asarray(alphas, dtype=np.float64).reshape(-1)
    if alpha_vector.shape[0] != p - 1:
        raise InvalidDimension(
            f"Pass p={p} needs {p - 1} alphas, got {alpha_vector.shape[0]}")
    coefficients = c + np.concatenate([[0.0], np.cumsum(alpha_vector)])
    residual_variance = variance_of_residual(alpha_vector, c)
    if c == 0:
        # Limit of the minimizing family as c -> 0
        noise_variance = 1.0 if residual_variance == 0 else np.inf
    else:
        noise_variance = p * residual_variance / c ** 2
    return PassPredictor(p, float(c), coefficients, alpha_vector,
                         residual_variance, float(noise_variance))


def optimal_pass_coefficients(p: int, c: float) -> PassPredictor:
    """
    Variance minimizing pass-p predictor for a fixed scaling c

    Args:
        p (int): pass index, >= 1
        c (float): scaling factor c = c_0

    Raises:
        InvalidDimension: p < 1

    Returns:
        PassPredictor: equal alphas -c / p, so c_j = c (1 - j / p),
            Var(eta) = c^2 / p and V_p = 1
    """
    _check_pass(p)
    return pass_predictor_from_alphas(p, c, np.full(p - 1, -c / p))


def brute_force_pass_coefficients(p: int, c: float) -> PassPredictor:
    """
    Numerical minimization of Var(eta) over alpha in R^{p-1}

    A grid over equal alphas picks the starting point, then scipy's
    trust-exact method refines it with the analytic gradient and Hessian.
    """
    _check_pass(p)
    if p == 1:
        return pass_predictor_from_alphas(p, c, [])
    dimension = p - 1

    def objective(alphas: np.ndarray) -> float:
        return variance_of_residual(alphas, c)

    def gradient(alphas: np.ndarray) -> np.ndarray:
        return 2.0 * alphas + 2.0 * (np.sum(alphas) + c)

    def hessian(_alphas: np.ndarray) -> np.ndarray:
        return 2.0 * np.eye(dimension) + 2.0 * np.ones((dimension, dimension))

    span = abs(c) + 1.0
    grid = np.linspace(-span, span, BRUTE_FORCE_GRID)
    start_value = min(grid,
                      key=lambda value: objective(np.full(dimension, value)))
    result = minimize(objective, np.full(dimension, start_value),
                      jac=gradient, hess=hessian, method="trust-exact",
                      options={"gtol": 1e-14})
    return pass_predictor_from_alphas(p, c, result.x)
