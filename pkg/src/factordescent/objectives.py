"""Convex objectives on symmetric matrices and their factored form.

The optimization variable is a PSD matrix X written as U @ U.T. For an
objective f on X the factored problem minimizes g(U) = f(U U^T), and the
descent direction used throughout this package is

    grad f(U U^T) @ U.

For symmetric grad f (true of every objective shipped here) the chain-rule
gradient of g is exactly twice that product; the factor of two is absorbed
by the step-size constants, so m and M always refer to f as a function of X,
not to g. The strong-convexity constant m is the plain global one - no
rank-restricted variant is defined or used.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import as_factor, as_matrix, require_same_shape

__all__ = [
    "Objective",
    "mf_value",
    "mf_grad",
    "mf_constants",
    "matrix_factorization",
    "g_value",
    "factored_gradient",
]


@dataclass(frozen=True)
class Objective:
    """Differentiable objective on symmetric matrices with curvature bounds.

    value(X) and grad(X) take the full matrix variable. m and M are the
    strong-convexity and smoothness constants of f, with kappa = M / m.
    """

    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    m: float
    M: float

    def __post_init__(self):
        if not 0.0 < self.m <= self.M:
            raise ValueError(f"need 0 < m <= M, got m={self.m}, M={self.M}")

    @property
    def kappa(self) -> float:
        return self.M / self.m


def mf_value(a, x) -> float:
    """Squared Frobenius misfit ||X - A||_F^2."""
    a = as_matrix(a)
    x = as_matrix(x)
    require_same_shape(a, x)
    d = x - a
    return float(np.sum(d * d))


def mf_grad(a, x) -> np.ndarray:
    """Gradient 2 (X - A) of the squared misfit."""
    a = as_matrix(a)
    x = as_matrix(x)
    require_same_shape(a, x)
    return 2.0 * (x - a)


def mf_constants(a=None) -> tuple[float, float]:
    """(m, M) for the squared misfit.

    Its Hessian is twice the identity on matrix space, so both constants
    equal 2 exactly and kappa = 1; they are fixed analytically rather than
    estimated, which keeps the contraction checks sharp.
    """
    return 2.0, 2.0


def matrix_factorization(a) -> Objective:
    """The objective ||X - A||_F^2 for a symmetric target A."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"target must be square, got shape {a.shape}")
    if float(np.max(np.abs(a - a.T))) > 1e-9:
        raise ValueError("target must be symmetric (max-abs asymmetry above 1e-9)")
    a = a.copy()
    m, big_m = mf_constants(a)

    def value(x):
        d = x - a
        return float(np.sum(d * d))

    def grad(x):
        return 2.0 * (x - a)

    return Objective(value=value, grad=grad, m=m, M=big_m)


def g_value(objective: Objective, u) -> float:
    """g(U) = f(U U^T)."""
    u = as_factor(u)
    return float(objective.value(u @ u.T))


def factored_gradient(objective: Objective, u) -> np.ndarray:
    """Descent direction grad f(U U^T) @ U.

    Note this is half the chain-rule gradient of g whenever grad f is
    symmetric; the convention matters when interpreting m and M.
    """
    u = as_factor(u)
    return objective.grad(u @ u.T) @ u
