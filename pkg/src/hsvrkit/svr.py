"""Epsilon-insensitive support vector regression with a Gaussian kernel."""
from dataclasses import dataclass, field
import json
import math

import numpy as np

from . import _kernels
from .errors import InvalidTrainingSet
from .numerics import svr_dual_objective

# coefficients with |beta| at or below this fraction of C are treated as zero
ZERO_BETA_RTOL = 1e-8


@dataclass(frozen=True)
class SvrConfig:
    C: float
    epsilon: float
    gamma: float
    kkt_tol: float = 1e-3
    max_passes: int | None = None  # None -> 10 * n

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError(f"C must be positive, got {self.C}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.kkt_tol > 0:
            raise ValueError(f"kkt_tol must be positive, got {self.kkt_tol}")
        if self.max_passes is not None and self.max_passes < 1:
            raise ValueError("max_passes must be a positive integer")


@dataclass(frozen=True, eq=False)
class SvrModel:
    """One trained layer: ``f(x) = sum_i beta_i k(x, sv_i) + bias``."""

    support_x: np.ndarray  # (m, d)
    beta: np.ndarray  # (m,)
    bias: float
    gamma: float
    C: float = math.nan
    epsilon: float = math.nan
    converged: bool = True
    n_iter: int = 0
    dual_objective: float = math.nan
    # full coefficient vector over the training set, kept for diagnostics
    train_beta: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_support(self):
        return int(self.beta.size)

    def to_dict(self):
        sx = self.support_x
        support = sx[:, 0].tolist() if sx.shape[1] == 1 else sx.tolist()
        return {
            "gamma": float(self.gamma),
            "bias": float(self.bias),
            "support_x": support,
            "beta": self.beta.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        sx = np.asarray(d["support_x"], dtype=float)
        sx = sx.reshape(-1, 1) if sx.ndim == 1 else sx.reshape(len(d["beta"]), -1)
        return cls(
            support_x=sx,
            beta=np.asarray(d["beta"], dtype=float),
            bias=float(d["bias"]),
            gamma=float(d["gamma"]),
        )

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def as_points(x):
    """Coerce inputs to an ``(n, d)`` float array; 1-D input means ``d = 1``."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1, 1)
    elif x.ndim == 1:
        x = x.reshape(-1, 1)
    return np.ascontiguousarray(x)


def gaussian_kernel(x, x_prime, gamma):
    """``exp(-gamma * ||x - x'||^2)``."""
    d = np.atleast_1d(np.asarray(x, dtype=float)) - np.atleast_1d(np.asarray(x_prime, dtype=float))
    return math.exp(-gamma * float(d @ d))


def kernel_matrix(a, b, gamma):
    return _kernels.rbf_matrix(as_points(a), as_points(b), float(gamma))


def fit(x, y, config):
    """Solve the dual with SMO and return the support-vector expansion.

    Non-convergence within the iteration budget is reported through
    ``model.converged`` rather than raised.
    """
    x = as_points(x)
    y = np.ascontiguousarray(np.asarray(y, dtype=float).ravel())
    n = y.size
    if n == 0 or x.shape[0] != n:
        raise InvalidTrainingSet(f"x has {x.shape[0]} points but y has {n} targets")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidTrainingSet("training data contains non-finite values")

    passes = config.max_passes if config.max_passes is not None else 10 * n
    # one pass is n pair updates
    max_iter = int(min(passes * n, 2**62))
    K = _kernels.rbf_matrix(x, x, float(config.gamma))
    alpha, rho, n_iter, converged = _kernels.smo_solve(
        K, y, float(config.C), float(config.epsilon), float(config.kkt_tol), max_iter
    )
    beta = alpha[:n] - alpha[n:]
    keep = np.abs(beta) > ZERO_BETA_RTOL * config.C
    return SvrModel(
        support_x=x[keep].copy(),
        beta=beta[keep].copy(),
        bias=float(-rho),
        gamma=float(config.gamma),
        C=float(config.C),
        epsilon=float(config.epsilon),
        converged=bool(converged),
        n_iter=int(n_iter),
        dual_objective=svr_dual_objective(K, y, beta, config.epsilon),
        train_beta=beta,
    )


def predict(model, x):
    q = as_points(x)
    return _kernels.kernel_expansion(q, model.support_x, model.beta, float(model.gamma), float(model.bias))


def kkt_violations(model, x, y, kkt_tol=None):
    """Indices of training points breaking the three-case tube conditions.

    Uses the model's full ``train_beta``. Returns an empty array when the
    solution is KKT-consistent within ``kkt_tol``.
    """
    if model.train_beta is None:
        raise ValueError("model does not carry training coefficients")
    tol = 1e-3 if kkt_tol is None else kkt_tol
    y = np.asarray(y, dtype=float).ravel()
    resid = np.abs(y - predict(model, x))
    beta = np.abs(model.train_beta)
    zero = beta <= ZERO_BETA_RTOL * model.C
    at_bound = beta >= model.C * (1.0 - 1e-12)
    inside = resid < model.epsilon - tol
    bad = (inside & ~zero) | (at_bound & (resid < model.epsilon - tol))
    # free coefficients sit on the tube edge
    free = ~zero & ~at_bound
    bad |= free & (np.abs(resid - model.epsilon) > tol)
    return np.flatnonzero(bad)
