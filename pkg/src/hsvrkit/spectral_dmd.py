"""Kernel scales from a Hankel (delay-embedded) dynamic mode decomposition.

The scalar series is lifted into a Hankel matrix, a compressed linear
operator is fit between consecutive columns and its Ritz pairs are screened
by residual and by energy. Eigenvalues are projected onto the unit circle,
so only the oscillation frequency of each pair is used; growth and decay
rates are discarded.
"""
from dataclasses import dataclass, replace
import json

import numpy as np

from . import numerics
from .errors import DegenerateData, InvalidEmbedding, InvalidSignal, NoOscillatoryContent
from .spectral_fft import DEFAULT_DECAY, scales_from_frequencies

# residual screen; 1e-2 already drops the second oscillation band of Lorenz data
DEFAULT_TOL = 5e-2
DEFAULT_ETA = 0.01
# singular values below this fraction of the largest are dropped by dmd_scales
DEFAULT_RANK_TOL = 1e-3
CONJUGATE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class HankelPair:
    H: np.ndarray
    X: np.ndarray
    Y: np.ndarray

    @property
    def rows(self):
        return self.H.shape[0]


@dataclass(frozen=True, eq=False)
class DmdSpectrum:
    ritz_values: np.ndarray
    residuals: np.ndarray
    modes: np.ndarray  # unit-norm columns
    energies: np.ndarray | None = None
    total_power: float | None = None
    frequencies: np.ndarray | None = None  # per-sample, in (-0.5, 0.5]

    def to_dict(self):
        n = self.ritz_values.size
        energies = self.energies if self.energies is not None else np.full(n, np.nan)
        freqs = self.frequencies if self.frequencies is not None else unit_circle_frequencies(self.ritz_values)
        return {
            "ritz_re": self.ritz_values.real.tolist(),
            "ritz_im": self.ritz_values.imag.tolist(),
            "residual": self.residuals.tolist(),
            "energy": [float(e) for e in energies],
            "frequency": [float(f) for f in freqs],
        }

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent)


def default_rows(n):
    """Smallest tall embedding: ``n // 2 + 1`` rows."""
    return n // 2 + 1


def build_hankel(f, M=None):
    """Delay embedding with ``M`` rows and ``N - M + 1`` columns, ``H[i, j] = f[i + j]``."""
    f = np.asarray(f, dtype=float).ravel()
    n = f.size
    if n < 4:
        raise InvalidSignal("need at least 4 samples")
    if M is None:
        M = default_rows(n)
    if not (n / 2 < M <= n - 2):
        raise InvalidEmbedding(f"rows M={M} outside ({n / 2}, {n - 2}] for N={n}")
    H = np.lib.stride_tricks.sliding_window_view(f, n - M + 1).copy()
    return HankelPair(H=H, X=H[:, :-1], Y=H[:, 1:])


def unit_circle_frequencies(ritz_values):
    """Per-sample frequency of each eigenvalue after scaling it onto the unit circle."""
    return np.angle(np.asarray(ritz_values)) / (2.0 * np.pi)


def dmd_rrr(X, Y, rank_tol=1e-10):
    """Ritz pairs of the compressed operator ``U* Y V Sigma^+`` with data residuals.

    For each pair ``(lam, w)`` the residual is
    ``|| Y V Sigma^+ w - lam U w ||_2`` with ``||w|| = 1``, which measures how
    well the unit-norm Ritz vector ``U w`` satisfies the data relation.
    """
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.shape != Y.shape or X.ndim != 2:
        raise ValueError("X and Y must be 2-D with equal shapes")
    if X.shape[1] < 2:
        raise ValueError("need at least 2 snapshot columns")
    dec = numerics.svd(X)
    s = dec.singular_values
    if s.size == 0 or not s[0] > 0:
        raise DegenerateData("snapshot matrix has rank 0")
    r = int(np.count_nonzero(s > rank_tol * s[0]))
    U = dec.U[:, :r]
    B = (Y @ dec.V[:, :r]) / s[:r]
    A_tilde = U.conj().T @ B
    eg = numerics.eig(A_tilde)
    W = eg.eigenvectors
    lam = eg.eigenvalues
    Z = U @ W
    Z = Z / np.linalg.norm(Z, axis=0)
    residuals = np.linalg.norm(B @ W - Z * lam, axis=0)
    return DmdSpectrum(ritz_values=lam, residuals=residuals, modes=Z)


def mode_energies(spectrum, Y):
    """Least-squares coefficient magnitude of each unit mode against ``Y[:, 0]``, and their RSS."""
    y0 = np.asarray(Y)[:, 0]
    energies = np.abs(spectrum.modes.conj().T @ y0)
    return energies, float(np.sqrt(np.sum(energies**2)))


def dmd_spectrum(f, M=None, rank_tol=DEFAULT_RANK_TOL):
    pair = build_hankel(f, M)
    spectrum = dmd_rrr(pair.X, pair.Y, rank_tol=rank_tol)
    energies, total = mode_energies(spectrum, pair.Y)
    return replace(spectrum, energies=energies, total_power=total,
                   frequencies=unit_circle_frequencies(spectrum.ritz_values))


def dmd_support(spectrum, n_samples, tol=DEFAULT_TOL, eta=DEFAULT_ETA):
    """Distinct ``|omega|`` passing the residual, energy and minimum-frequency screens."""
    omega = np.abs(spectrum.frequencies)
    keep = (
        (spectrum.residuals < tol)
        & (spectrum.energies > eta * spectrum.total_power)
        & (omega >= 1.0 / n_samples)
    )
    vals = np.sort(omega[keep])
    if vals.size == 0:
        return vals
    # collapse conjugate pairs
    distinct = [vals[0]]
    for v in vals[1:]:
        if v - distinct[-1] > CONJUGATE_TOL:
            distinct.append(v)
    return np.array(distinct)


def dmd_scales(f, dx, M=None, tol=DEFAULT_TOL, eta=DEFAULT_ETA, decay=DEFAULT_DECAY,
               *, rank_tol=DEFAULT_RANK_TOL):
    """Scale schedule from the Hankel DMD frequency support."""
    if not dx > 0:
        raise ValueError("dx must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    f = np.asarray(f, dtype=float).ravel()
    spectrum = dmd_spectrum(f, M, rank_tol)
    support = dmd_support(spectrum, f.size, tol, eta)
    if support.size == 0:
        raise NoOscillatoryContent("DMD: no accurate, energetic, non-zero frequency")
    return scales_from_frequencies(support, dx, decay, "DMD", eta)
