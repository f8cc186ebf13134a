"""Dense numerical kernels: DFT, SVD, eigendecomposition and a brute-force SVR dual oracle.

The transforms and factorizations are thin validated wrappers over
``numpy.fft`` and ``numpy.linalg``. :func:`naive_dft` and
:func:`qp_oracle_svr` are deliberately slow reference implementations used
to check the fast paths.
"""
from dataclasses import dataclass
import itertools

import numpy as np

from .errors import InvalidMatrix, InvalidSignal, OracleTooLarge

ORACLE_MAX_N = 6


@dataclass(frozen=True)
class SvdResult:
    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    def reconstruct(self):
        return (self.U * self.singular_values) @ self.V.conj().T


@dataclass(frozen=True)
class EigResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_signal(y):
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise InvalidSignal(f"need a 1-D signal with at least 2 samples, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise InvalidSignal("signal contains non-finite values")
    return y


def _as_matrix(a, square=False):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidMatrix(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix contains non-finite entries")
    return a


def dft(y):
    """Full complex DFT, ``C[k] = sum_j y[j] exp(-2 pi i j k / n)``."""
    return np.fft.fft(_as_signal(y))


def idft(c):
    return np.fft.ifft(np.asarray(c, dtype=complex))


def naive_dft(y):
    """O(n^2) DFT by direct summation; the oracle for :func:`dft`."""
    y = np.asarray(y, dtype=float)
    n = y.size
    jk = np.outer(np.arange(n), np.arange(n))
    # reduce the phase index mod n before scaling so large products stay exact
    return np.exp(-2j * np.pi * (jk % n) / n) @ y


def dft_frequencies(n, dx=1.0):
    """One-sided per-sample frequency grid ``k/n`` for ``k = 0..n//2``.

    Multiply by ``1/dx`` for physical frequencies.
    """
    if n < 2:
        raise InvalidSignal("need at least 2 samples")
    if not dx > 0:
        raise InvalidSignal("dx must be positive")
    return np.arange(n // 2 + 1) / n


def svd(a):
    a = _as_matrix(a)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return SvdResult(U=u, singular_values=s, V=vh.conj().T)


def eig(a):
    a = _as_matrix(a, square=True)
    w, v = np.linalg.eig(a)
    v = v / np.linalg.norm(v, axis=0)
    return EigResult(eigenvalues=w, eigenvectors=v)


# ---------------------------------------------------------------------------
# SVR dual oracle
# ---------------------------------------------------------------------------


def svr_dual_objective(K, y, beta, epsilon):
    """Dual objective written in ``beta = alpha_plus - alpha_minus``.

    At an optimum ``alpha_plus * alpha_minus == 0``, so the epsilon term is
    ``epsilon * sum|beta|``.
    """
    beta = np.asarray(beta, dtype=float)
    return float(-0.5 * beta @ K @ beta - epsilon * np.abs(beta).sum() + y @ beta)


def _patterns(values, k):
    rows = list(itertools.product(values, repeat=k))
    return np.array(rows, dtype=float).reshape(len(rows), k)


def qp_oracle_svr(K, y, C, epsilon):
    """Maximise the epsilon-SVR dual by exhaustive active-set enumeration.

    Every coordinate ``beta_i`` is either at ``-C``, ``0``, ``+C`` or free with a
    fixed sign. For each free set the KKT system of the equality-constrained
    problem is factored once and solved for all fixed/sign patterns; the best
    feasible candidate is returned as ``(alpha_plus, alpha_minus)``.
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.size
    if n > ORACLE_MAX_N:
        raise OracleTooLarge(f"oracle handles n <= {ORACLE_MAX_N}, got {n}")
    if n == 0:
        return np.zeros(0), np.zeros(0)
    feas_tol = 1e-11 * max(1.0, C)

    best_obj = -np.inf
    best_beta = np.zeros(n)
    for free_mask in itertools.product((False, True), repeat=n):
        free = np.flatnonzero(free_mask)
        fixed = np.flatnonzero(~np.array(free_mask))
        m = free.size
        fixed_vals = _patterns((-C, 0.0, C), fixed.size)
        signs = _patterns((-1.0, 1.0), m)

        if m == 0:
            ok = np.abs(fixed_vals.sum(axis=1)) <= feas_tol
            for fv in fixed_vals[ok]:
                beta = np.zeros(n)
                beta[fixed] = fv
                obj = svr_dual_objective(K, y, beta, epsilon)
                if obj > best_obj:
                    best_obj, best_beta = obj, beta
            continue

        # stationarity on the free block plus the equality constraint:
        # K_FF b_F + mu 1 = y_F - eps s_F - K_FX b_X ;  1'b_F = -1'b_X
        kkt = np.zeros((m + 1, m + 1))
        kkt[:m, :m] = K[np.ix_(free, free)]
        kkt[:m, m] = 1.0
        kkt[m, :m] = 1.0
        kfx = K[np.ix_(free, fixed)]
        # all (fixed pattern, sign pattern) combinations as RHS columns
        fv_rep = np.repeat(fixed_vals, signs.shape[0], axis=0)
        sg_rep = np.tile(signs, (fixed_vals.shape[0], 1))
        rhs = np.empty((m + 1, fv_rep.shape[0]))
        rhs[:m] = (y[free][:, None] - epsilon * sg_rep.T - kfx @ fv_rep.T)
        rhs[m] = -fv_rep.sum(axis=1)
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
        bf = sol[:m].T
        ok = np.all(bf * sg_rep >= -feas_tol, axis=1) & np.all(np.abs(bf) <= C + feas_tol, axis=1)
        for r in np.flatnonzero(ok):
            beta = np.zeros(n)
            beta[fixed] = fv_rep[r]
            beta[free] = np.clip(bf[r], -C, C)
            obj = svr_dual_objective(K, y, beta, epsilon)
            if obj > best_obj:
                best_obj, best_beta = obj, beta
    return np.maximum(best_beta, 0.0), np.maximum(-best_beta, 0.0)
