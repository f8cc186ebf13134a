"""Kernel scales from the support of the Fourier spectrum, plus geometric filtering."""
from dataclasses import dataclass
import json

import numpy as np

from . import numerics
from .errors import InvalidSignal, NoOscillatoryContent, NonUniformGrid

DEFAULT_DECAY = 2.0
DEFAULT_THRESHOLD = 0.01
GRID_RTOL = 1e-6


@dataclass(frozen=True)
class ScaleEstimate:
    method: str  # "FFT" or "DMD"
    scales: tuple
    support_frequencies: tuple  # per-sample, aligned with scales
    coefficient_threshold: float
    decay: float

    def __len__(self):
        return len(self.scales)

    def to_dict(self):
        return {
            "method": self.method,
            "decay": float(self.decay),
            "threshold": float(self.coefficient_threshold),
            "support_frequencies": [float(f) for f in self.support_frequencies],
            "scales": [float(s) for s in self.scales],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            method=d["method"],
            scales=tuple(float(s) for s in d["scales"]),
            support_frequencies=tuple(float(f) for f in d["support_frequencies"]),
            coefficient_threshold=float(d["threshold"]),
            decay=float(d["decay"]),
        )

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def filter_scales(scales, decay=DEFAULT_DECAY):
    """Greedy pass keeping a scale only if the last kept one is ``decay`` times larger."""
    if not decay > 1:
        raise ValueError("decay must exceed 1")
    scales = list(scales)
    if not scales:
        return []
    kept = [scales[0]]
    for s in scales[1:]:
        if kept[-1] / s >= decay:
            kept.append(s)
    return kept


def _filter_indices(scales, decay):
    kept = [0]
    for i in range(1, len(scales)):
        if scales[kept[-1]] / scales[i] >= decay:
            kept.append(i)
    return kept


def grid_spacing(x, rtol=GRID_RTOL):
    """Uniform spacing of ``x`` or :class:`NonUniformGrid`."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 2:
        raise InvalidSignal("need at least 2 samples")
    steps = np.diff(x)
    dx = (x[-1] - x[0]) / (x.size - 1)
    if not dx > 0 or np.max(np.abs(steps - dx)) > rtol * dx:
        raise NonUniformGrid("samples are not uniformly spaced")
    return float(dx)


def scales_from_frequencies(freqs, dx, decay, method, threshold):
    """Map per-sample frequencies to ``dx / (6 nu)``, sort descending and filter."""
    freqs = np.asarray(freqs, dtype=float)
    if freqs.size == 0:
        raise NoOscillatoryContent(f"{method}: empty frequency support")
    order = np.argsort(freqs, kind="stable")  # ascending nu == descending sigma
    freqs = freqs[order]
    scales = dx / (6.0 * freqs)
    keep = _filter_indices(scales, decay)
    return ScaleEstimate(
        method=method,
        scales=tuple(float(scales[i]) for i in keep),
        support_frequencies=tuple(float(freqs[i]) for i in keep),
        coefficient_threshold=float(threshold),
        decay=float(decay),
    )


def fft_support(y, threshold=DEFAULT_THRESHOLD, include_dc_in_norm=True):
    """Per-sample frequencies of the one-sided spectrum above ``threshold``.

    Moduli are normalised by their maximum. The zero-frequency bin never
    enters the support; it only takes part in the normalisation when
    ``include_dc_in_norm`` is set.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    mag = np.abs(numerics.dft(y)[: n // 2 + 1])
    freq = numerics.dft_frequencies(n)
    ref = mag.max() if include_dc_in_norm else mag[1:].max()
    if not ref > 0:
        return np.zeros(0)
    rel = mag[1:] / ref
    return freq[1:][rel > threshold]


def fft_scales(x, y, decay=DEFAULT_DECAY, threshold=DEFAULT_THRESHOLD, *, include_dc_in_norm=True):
    """Scales ``dx / (6 nu)`` for every significant DFT bin, thinned by :func:`filter_scales`."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise InvalidSignal("x and y differ in length")
    if y.size < 4:
        raise InvalidSignal("need at least 4 samples")
    if not decay > 1:
        raise ValueError("decay must exceed 1")
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    dx = grid_spacing(x)
    support = fft_support(y, threshold, include_dc_in_norm)
    if support.size == 0:
        raise NoOscillatoryContent("FFT: no frequency bin exceeds the threshold")
    return scales_from_frequencies(support, dx, decay, "FFT", threshold)
