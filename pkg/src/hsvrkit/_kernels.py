"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba versions are used when numba imports cleanly and the environment
variable ``HSVRKIT_NUMBA`` is not set to ``0``/``false``/``off``. Both paths are
always importable as ``*_nb`` / ``*_np`` so they can be compared directly.
"""
import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("HSVRKIT_NUMBA", "1").strip().lower() not in (
    "0",
    "false",
    "off",
    "no",
)

# libsvm's guard for a non-positive curvature along the working pair
TAU = 1e-12


def _njit(func):
    if numba is None:
        return None
    return numba.njit(cache=True, nogil=True)(func)


# ---------------------------------------------------------------------------
# Gaussian kernel matrix
# ---------------------------------------------------------------------------


def rbf_matrix_np(a, b, gamma):
    sq = (
        np.sum(a * a, axis=1)[:, None]
        + np.sum(b * b, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    # exact differences for 1-D inputs avoid cancellation in the expansion above
    if a.shape[1] == 1:
        d = a[:, 0][:, None] - b[:, 0][None, :]
        sq = d * d
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def _rbf_matrix_loop(a, b, gamma):
    m, dim = a.shape
    k = b.shape[0]
    out = np.empty((m, k))
    for i in range(m):
        for j in range(k):
            s = 0.0
            for t in range(dim):
                d = a[i, t] - b[j, t]
                s += d * d
            out[i, j] = math.exp(-gamma * s)
    return out


rbf_matrix_nb = _njit(_rbf_matrix_loop)


def kernel_expansion_np(query, support, beta, gamma, bias):
    if support.shape[0] == 0:
        return np.full(query.shape[0], bias)
    out = np.empty(query.shape[0])
    # chunk to bound the temporary kernel block at ~8 MB
    step = max(1, 1_000_000 // max(1, support.shape[0]))
    for start in range(0, query.shape[0], step):
        block = rbf_matrix_np(query[start:start + step], support, gamma)
        out[start:start + step] = block @ beta + bias
    return out


def _kernel_expansion_loop(query, support, beta, gamma, bias):
    m, dim = query.shape
    k = support.shape[0]
    out = np.empty(m)
    for i in range(m):
        acc = 0.0
        for j in range(k):
            s = 0.0
            for t in range(dim):
                d = query[i, t] - support[j, t]
                s += d * d
            acc += beta[j] * math.exp(-gamma * s)
        out[i] = acc + bias
    return out


kernel_expansion_nb = _njit(_kernel_expansion_loop)


# ---------------------------------------------------------------------------
# SMO for the epsilon-SVR dual
# ---------------------------------------------------------------------------
#
# Variables are alpha = [alpha_plus; alpha_minus] (length 2n) with signs
# z = [+1]*n + [-1]*n. The solver minimises 0.5 a'Qa + p'a subject to
# z'a = 0 and 0 <= a <= C, where Q_st = z_s z_t K[s mod n, t mod n] and
# p = [eps - y; eps + y]. Returns (alpha, rho, iterations, converged); the
# regression bias is -rho.


def _smo_loop(K, y, C, eps, tol, max_iter):
    n = y.shape[0]
    l = 2 * n
    alpha = np.zeros(l)
    G = np.empty(l)
    z = np.empty(l)
    for t in range(n):
        G[t] = eps - y[t]
        G[t + n] = eps + y[t]
        z[t] = 1.0
        z[t + n] = -1.0

    converged = False
    it = 0
    while it < max_iter:
        # first index: maximal violation in I_up
        gmax = -np.inf
        i = -1
        for t in range(l):
            if z[t] > 0.0:
                if alpha[t] < C and -G[t] >= gmax:
                    gmax = -G[t]
                    i = t
            else:
                if alpha[t] > 0.0 and G[t] >= gmax:
                    gmax = G[t]
                    i = t
        # second index: largest second-order decrease in I_low
        gmax2 = -np.inf
        j = -1
        obj_min = np.inf
        if i >= 0:
            ki = i % n
            kii = K[ki, ki]
            for t in range(l):
                kt = t % n
                if z[t] > 0.0:
                    if alpha[t] > 0.0:
                        diff = gmax + G[t]
                        if G[t] >= gmax2:
                            gmax2 = G[t]
                        if diff > 0.0:
                            quad = kii + K[kt, kt] - 2.0 * K[ki, kt]
                            if quad <= 0.0:
                                quad = TAU
                            obj = -(diff * diff) / quad
                            if obj <= obj_min:
                                obj_min = obj
                                j = t
                else:
                    if alpha[t] < C:
                        diff = gmax - G[t]
                        if -G[t] >= gmax2:
                            gmax2 = -G[t]
                        if diff > 0.0:
                            quad = kii + K[kt, kt] - 2.0 * K[ki, kt]
                            if quad <= 0.0:
                                quad = TAU
                            obj = -(diff * diff) / quad
                            if obj <= obj_min:
                                obj_min = obj
                                j = t
        if i < 0 or j < 0 or gmax + gmax2 < tol:
            converged = True
            break
        it += 1

        ki = i % n
        kj = j % n
        zi = z[i]
        zj = z[j]
        qij = zi * zj * K[ki, kj]
        old_i = alpha[i]
        old_j = alpha[j]
        if zi != zj:
            quad = K[ki, ki] + K[kj, kj] + 2.0 * qij
            if quad <= 0.0:
                quad = TAU
            delta = (-G[i] - G[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0.0:
                if alpha[j] < 0.0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0.0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0.0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            quad = K[ki, ki] + K[kj, kj] - 2.0 * qij
            if quad <= 0.0:
                quad = TAU
            delta = (G[i] - G[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            else:
                if alpha[j] < 0.0:
                    alpha[j] = 0.0
                    alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[i] < 0.0:
                    alpha[i] = 0.0
                    alpha[j] = total

        da_i = alpha[i] - old_i
        da_j = alpha[j] - old_j
        if da_i != 0.0 or da_j != 0.0:
            ci = zi * da_i
            cj = zj * da_j
            for t in range(l):
                kt = t % n
                G[t] += z[t] * (ci * K[ki, kt] + cj * K[kj, kt])

    rho = _rho(alpha, G, z, C)
    return alpha, rho, it, converged


def _rho_loop(alpha, G, z, C):
    ub = np.inf
    lb = -np.inf
    free_sum = 0.0
    n_free = 0
    for t in range(alpha.shape[0]):
        yg = z[t] * G[t]
        if alpha[t] >= C:
            if z[t] < 0.0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        elif alpha[t] <= 0.0:
            if z[t] > 0.0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        else:
            n_free += 1
            free_sum += yg
    if n_free > 0:
        return free_sum / n_free
    return 0.5 * (ub + lb)


# the jitted solver resolves this global at compile time, so it must be jitted too
_rho = _njit(_rho_loop) or _rho_loop
smo_solve_nb = _njit(_smo_loop)


def _rho_np(alpha, G, z, C):
    yg = z * G
    at_upper = alpha >= C
    at_lower = alpha <= 0.0
    free = ~(at_upper | at_lower)
    if free.any():
        return float(yg[free].mean())
    ub_mask = (at_upper & (z < 0)) | (at_lower & (z > 0))
    lb_mask = (at_upper & (z > 0)) | (at_lower & (z < 0))
    ub = yg[ub_mask].min() if ub_mask.any() else np.inf
    lb = yg[lb_mask].max() if lb_mask.any() else -np.inf
    return 0.5 * (ub + lb)


def smo_solve_np(K, y, C, eps, tol, max_iter):
    n = y.shape[0]
    l = 2 * n
    z = np.concatenate([np.ones(n), -np.ones(n)])
    idx = np.concatenate([np.arange(n), np.arange(n)])
    alpha = np.zeros(l)
    G = np.concatenate([eps - y, eps + y])
    diagK = np.diag(K)[idx]

    converged = False
    it = 0
    while it < max_iter:
        up = np.where(z > 0, alpha < C, alpha > 0.0)
        low = np.where(z > 0, alpha > 0.0, alpha < C)
        mzg = -z * G
        if not up.any():
            converged = True
            break
        cand = np.where(up, mzg, -np.inf)
        # ties resolve to the last index, as in the loop version
        i = l - 1 - int(np.argmax(cand[::-1]))
        gmax = cand[i]
        low_vals = np.where(low, -mzg, -np.inf)
        gmax2 = low_vals.max() if low.any() else -np.inf
        if gmax + gmax2 < tol:
            converged = True
            break
        diff = gmax - mzg
        ok = low & (diff > 0.0)
        if not ok.any():
            converged = True
            break
        ki = idx[i]
        quad = K[ki, ki] + diagK - 2.0 * K[ki, idx]
        quad = np.where(quad <= 0.0, TAU, quad)
        obj = np.where(ok, -(diff * diff) / quad, np.inf)
        j = l - 1 - int(np.argmin(obj[::-1]))
        it += 1

        kj = idx[j]
        zi, zj = z[i], z[j]
        qij = zi * zj * K[ki, kj]
        old_i, old_j = alpha[i], alpha[j]
        ai, aj = old_i, old_j
        if zi != zj:
            q = K[ki, ki] + K[kj, kj] + 2.0 * qij
            q = TAU if q <= 0.0 else q
            delta = (-G[i] - G[j]) / q
            d = ai - aj
            ai += delta
            aj += delta
            if d > 0.0:
                if aj < 0.0:
                    aj, ai = 0.0, d
            elif ai < 0.0:
                ai, aj = 0.0, -d
            if d > 0.0:
                if ai > C:
                    ai, aj = C, C - d
            elif aj > C:
                aj, ai = C, C + d
        else:
            q = K[ki, ki] + K[kj, kj] - 2.0 * qij
            q = TAU if q <= 0.0 else q
            delta = (G[i] - G[j]) / q
            s = ai + aj
            ai -= delta
            aj += delta
            if s > C:
                if ai > C:
                    ai, aj = C, s - C
            elif aj < 0.0:
                aj, ai = 0.0, s
            if s > C:
                if aj > C:
                    aj, ai = C, s - C
            elif ai < 0.0:
                ai, aj = 0.0, s
        alpha[i], alpha[j] = ai, aj
        da_i, da_j = ai - old_i, aj - old_j
        if da_i != 0.0 or da_j != 0.0:
            G += z * (zi * da_i * K[ki, idx] + zj * da_j * K[kj, idx])

    rho = _rho_np(alpha, G, z, C)
    return alpha, rho, it, converged


# ---------------------------------------------------------------------------
# RK4 for the Lorenz system
# ---------------------------------------------------------------------------


def _lorenz_rhs(x, y, z, sigma, rho, beta):
    return sigma * (y - x), x * (rho - z) - y, x * y - beta * z


def _rk4_loop(times, state0, max_step, sigma, rho, beta):
    m = times.shape[0]
    out = np.empty((m, 3))
    x, y, z = state0[0], state0[1], state0[2]
    out[0, 0] = x
    out[0, 1] = y
    out[0, 2] = z
    for k in range(1, m):
        span = times[k] - times[k - 1]
        steps = int(math.ceil(span / max_step - 1e-9))
        if steps < 1:
            steps = 1
        h = span / steps
        for _ in range(steps):
            a1, b1, c1 = sigma * (y - x), x * (rho - z) - y, x * y - beta * z
            x2, y2, z2 = x + 0.5 * h * a1, y + 0.5 * h * b1, z + 0.5 * h * c1
            a2, b2, c2 = sigma * (y2 - x2), x2 * (rho - z2) - y2, x2 * y2 - beta * z2
            x3, y3, z3 = x + 0.5 * h * a2, y + 0.5 * h * b2, z + 0.5 * h * c2
            a3, b3, c3 = sigma * (y3 - x3), x3 * (rho - z3) - y3, x3 * y3 - beta * z3
            x4, y4, z4 = x + h * a3, y + h * b3, z + h * c3
            a4, b4, c4 = sigma * (y4 - x4), x4 * (rho - z4) - y4, x4 * y4 - beta * z4
            x += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            y += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            z += h / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
        out[k, 0] = x
        out[k, 1] = y
        out[k, 2] = z
    return out


rk4_lorenz_nb = _njit(_rk4_loop)


def rk4_lorenz_np(times, state0, max_step, sigma, rho, beta):
    params = np.array([sigma, rho, beta])

    def rhs(s):
        return np.array([
            params[0] * (s[1] - s[0]),
            s[0] * (params[1] - s[2]) - s[1],
            s[0] * s[1] - params[2] * s[2],
        ])

    out = np.empty((times.shape[0], 3))
    s = np.asarray(state0, dtype=float).copy()
    out[0] = s
    for k in range(1, times.shape[0]):
        span = times[k] - times[k - 1]
        steps = max(1, int(math.ceil(span / max_step - 1e-9)))
        h = span / steps
        for _ in range(steps):
            k1 = rhs(s)
            k2 = rhs(s + 0.5 * h * k1)
            k3 = rhs(s + 0.5 * h * k2)
            k4 = rhs(s + h * k3)
            s = s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k] = s
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

if USE_NUMBA:
    rbf_matrix = rbf_matrix_nb
    kernel_expansion = kernel_expansion_nb
    smo_solve = smo_solve_nb
    rk4_lorenz = rk4_lorenz_nb
else:
    rbf_matrix = rbf_matrix_np
    kernel_expansion = kernel_expansion_np
    smo_solve = smo_solve_np
    rk4_lorenz = rk4_lorenz_np


def backend():
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"
