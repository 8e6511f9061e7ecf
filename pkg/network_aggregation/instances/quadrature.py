"""
One dimensional Gaussian expectations by Gauss-Hermite quadrature and the
scaling factor analytics of the lower bound

For X ~ N(0, s^2):
    E[f(X)] ~= 1 / sqrt(pi) * sum_i w_i f(sqrt(2) s t_i)
with (t_i, w_i) the Gauss-Hermite nodes and weights.

The pass-p predictor z_c = c (Z + xi / sqrt(p)) has population loss
    g(c) = -c E[Z sigma(Z)] + E[softplus(c S)],  S ~ N(0, 1 + 1/p)
and derivative
    g'(c) = -E[Z sigma(Z)] + E[S sigma(c S)].
"""
import functools
import logging
import math
from typing import Callable, Tuple

import numpy as np
from scipy.optimize import bisect

import network_aggregation.globals as GV
from network_aggregation.errors import InvalidDimension, QuadratureFailure
from network_aggregation.solver.logistic_utils import (
    sigmoid, stable_softplus)

logger = logging.getLogger(__name__)


@functools.lru_cache(maxsize=8)
def hermite_nodes(node_count: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Hermite nodes and weights for the weight function e^{-t^2}

    Raises:
        InvalidDimension: node_count < 1
    """
    if node_count < 1:
        raise InvalidDimension(f"Quadrature needs >= 1 node, got {node_count}")
    nodes, weights = np.polynomial.hermite.hermgauss(node_count)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gaussian_expectation(function: Callable[[np.ndarray], np.ndarray],
                         variance: float = 1.0,
                         node_count: int = GV.QUADRATURE_NODES) -> float:
    """
    E[f(X)] for X ~ N(0, variance)

    Args:
        function (Callable): vectorized integrand
        variance (float, optional): variance of X. Defaults to 1.
        node_count (int, optional): number of quadrature nodes.
            Defaults to GV.QUADRATURE_NODES.

    Raises:
        InvalidDimension: negative variance

    Returns:
        float: quadrature estimate of the expectation
    """
    if variance < 0:
        raise InvalidDimension(f"Variance must be >= 0, got {variance}")
    nodes, weights = hermite_nodes(node_count)
    points = math.sqrt(2.0 * variance) * nodes
    return float(weights @ function(points) / math.sqrt(math.pi))


def h_function(scale: float, node_count: int = GV.QUADRATURE_NODES
               ) -> float:
    """
    h(u) = E[X sigma(X)] for X ~ N(0, u^2), strictly increasing for u > 0
    """
    return gaussian_expectation(lambda x: x * sigmoid(x), scale ** 2,
                                node_count)


def _check_pass(p: float):
    if not p >= 1:
        raise InvalidDimension(f"Pass index must be >= 1, got {p}")


def signal_variance(p: float) -> float:
    """
    Var(S) = 1 + 1/p of the noisy signal S = Z + xi / sqrt(p)
    """
    _check_pass(p)
    return 1.0 + 1.0 / p


def scaling_gradient(c: float, p: float,
                     node_count: int = GV.QUADRATURE_NODES) -> float:
    """
    g'(c) = -E[Z sigma(Z)] + E[S sigma(c S)]
    """
    return (-h_function(1.0, node_count)
            + gaussian_expectation(lambda s: s * sigmoid(c * s),
                                   signal_variance(p), node_count))


def scaling_loss(c: float, p: float,
                 node_count: int = GV.QUADRATURE_NODES) -> float:
    """
    g(c), population BCE of c (Z + xi / sqrt(p))
    """
    return (-c * h_function(1.0, node_count)
            + gaussian_expectation(lambda s: stable_softplus(c * s),
                                   signal_variance(p), node_count))


def bayes_loss(node_count: int = GV.QUADRATURE_NODES) -> float:
    """
    Population BCE of the optimal logit Z_k,
        E[-sigma(Z) Z + softplus(Z)]
    """
    return (-h_function(1.0, node_count)
            + gaussian_expectation(stable_softplus, 1.0, node_count))


def optimal_scaling_factor(p: float, node_count: int = GV.QUADRATURE_NODES,
                           xtol: float = GV.BISECTION_XTOL) -> float:
    """
    Root of g'(c) on (0, 1) by bisection

    Args:
        p (float): pass index, >= 1
        node_count (int, optional): quadrature nodes.
            Defaults to GV.QUADRATURE_NODES.
        xtol (float, optional): final bracket width.
            Defaults to GV.BISECTION_XTOL.

    Raises:
        InvalidDimension: p < 1
        QuadratureFailure: g'(0) < 0 < g'(1) does not hold

    Returns:
        float: c*(p) in (0, 1)
    """
    _check_pass(p)

    def gradient(c: float) -> float:
        return scaling_gradient(c, p, node_count)

    lower_value, upper_value = gradient(0.0), gradient(1.0)
    if not lower_value < 0 < upper_value:
        raise QuadratureFailure(
            f"g'(0)={lower_value:.3e} and g'(1)={upper_value:.3e} do not "
            f"bracket a root for p={p}")
    try:
        root = bisect(gradient, 0.0, 1.0, xtol=xtol)
    except ValueError as exception_handle:
        raise QuadratureFailure(
            f"Bisection failed for p={p}: {exception_handle}"
        ) from exception_handle
    logger.debug("c*(%s) = %.15f, g'(c*) = %.3e", p, root, gradient(root))
    return float(root)


def predicted_pass_excess(p: float, node_count: int = GV.QUADRATURE_NODES
                          ) -> float:
    """
    Population excess loss g(c*(p)) - L(Z_k) of the best end-of-pass-p
        predictor
    """
    return (scaling_loss(optimal_scaling_factor(p, node_count), p,
                         node_count)
            - bayes_loss(node_count))
