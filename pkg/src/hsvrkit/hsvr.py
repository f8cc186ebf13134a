"""Hierarchical SVR: a coarse-to-fine cascade of SVR layers fit on residuals."""
from dataclasses import dataclass, asdict
import csv
import io
import json
import math

import numpy as np

from . import svr
from .errors import EmptyScales, InvalidTrainingSet, LayerTrainingError

# stand-in for C when the residual is constant and the range rule gives 0
DEGENERATE_C = 1e-3

LAYER_REPORT_FIELDS = ("layer", "sigma", "c_used", "n_support", "residual_max", "test_error")


@dataclass(frozen=True, eq=False)
class HsvrModel:
    layers: tuple
    scales: tuple
    epsilon: float
    training_range: float = math.nan

    def __post_init__(self):
        if len(self.layers) != len(self.scales):
            raise ValueError("one layer per scale is required")

    def __len__(self):
        return len(self.layers)

    def truncated(self, n_layers):
        """Model made of the first ``n_layers`` layers (the partial sum S_i)."""
        return HsvrModel(
            layers=tuple(self.layers[:n_layers]),
            scales=tuple(self.scales[:n_layers]),
            epsilon=self.epsilon,
            training_range=self.training_range,
        )

    def to_dict(self):
        return {
            "epsilon": float(self.epsilon),
            "scales": [float(s) for s in self.scales],
            "layers": [layer.to_dict() for layer in self.layers],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            layers=tuple(svr.SvrModel.from_dict(layer) for layer in d["layers"]),
            scales=tuple(float(s) for s in d["scales"]),
            epsilon=float(d["epsilon"]),
            training_range=float(d.get("training_range", math.nan)),
        )

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class LayerReport:
    layer_index: int
    sigma: float
    c_used: float
    n_support: int
    residual_max: float
    test_error: float = math.nan
    converged: bool = True


def epsilon_rule(y):
    """Tube half-width: 1% of the target range."""
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise InvalidTrainingSet("cannot compute epsilon of an empty signal")
    return 0.01 * float(y.max() - y.min())


def c_rule(residual):
    """Box bound: five times the range of the current residual."""
    r = np.asarray(residual, dtype=float)
    if r.size == 0:
        raise InvalidTrainingSet("cannot compute C of an empty residual")
    c = 5.0 * float(r.max() - r.min())
    return c if c > 0 else DEGENERATE_C


def _check_scales(scales):
    scales = [float(s) for s in scales]
    if not scales:
        raise EmptyScales("at least one kernel scale is required")
    if any(not s > 0 for s in scales):
        raise ValueError("scales must be positive")
    if any(b >= a for a, b in zip(scales, scales[1:])):
        raise ValueError("scales must be strictly decreasing")
    return scales


def train(x, y, scales, epsilon=None, *, x_test=None, y_test=None, kkt_tol=1e-3,
          max_passes=None, stop_below_epsilon=False):
    """Train one SVR layer per scale on successive residuals.

    ``epsilon`` defaults to :func:`epsilon_rule` of ``y`` and stays fixed for
    every layer. When a test set is given, each report carries the max-abs
    test error of the partial model. With ``stop_below_epsilon`` the cascade
    ends early once the training residual is inside the tube; it is off by
    default so the layer count always equals ``len(scales)``.

    Returns ``(model, reports)``.
    """
    scales = _check_scales(scales)
    xp = svr.as_points(x)
    y = np.asarray(y, dtype=float).ravel()
    if y.size == 0 or xp.shape[0] != y.size:
        raise InvalidTrainingSet(f"x has {xp.shape[0]} points but y has {y.size} targets")
    if xp.shape[1] == 1 and np.any(np.diff(xp[:, 0]) <= 0):
        raise InvalidTrainingSet("x must be strictly increasing")
    eps = epsilon_rule(y) if epsilon is None else float(epsilon)

    have_test = x_test is not None and y_test is not None
    if have_test:
        xt = svr.as_points(x_test)
        yt = np.asarray(y_test, dtype=float).ravel()
        test_pred = np.zeros(yt.size)

    residual = y.copy()
    layers, reports = [], []
    for idx, sigma in enumerate(scales):
        c = c_rule(residual)
        try:
            config = svr.SvrConfig(C=c, epsilon=eps, gamma=1.0 / sigma**2,
                                   kkt_tol=kkt_tol, max_passes=max_passes)
            layer = svr.fit(xp, residual, config)
        except Exception as exc:
            raise LayerTrainingError(idx, exc) from exc
        residual = residual - svr.predict(layer, xp)
        test_error = math.nan
        if have_test:
            test_pred = test_pred + svr.predict(layer, xt)
            test_error = float(np.max(np.abs(yt - test_pred)))
        layers.append(layer)
        reports.append(LayerReport(
            layer_index=idx,
            sigma=sigma,
            c_used=c,
            n_support=layer.n_support,
            residual_max=float(np.max(np.abs(residual))),
            test_error=test_error,
            converged=layer.converged,
        ))
        # the solver only enforces the tube up to its stopping tolerance
        if stop_below_epsilon and reports[-1].residual_max <= eps + kkt_tol:
            break

    model = HsvrModel(
        layers=tuple(layers),
        scales=tuple(scales[:len(layers)]),
        epsilon=eps,
        training_range=float(y.max() - y.min()),
    )
    return model, reports


def predict(model, x):
    if not model.layers:
        raise ValueError("model has no layers")
    xp = svr.as_points(x)
    out = np.zeros(xp.shape[0])
    for layer in model.layers:
        out += svr.predict(layer, xp)
    return out


def partial_predictions(model, x):
    """Array of shape ``(L, n)`` whose row ``i`` is the partial sum of layers ``0..i``."""
    xp = svr.as_points(x)
    rows = np.array([svr.predict(layer, xp) for layer in model.layers])
    return np.cumsum(rows, axis=0)


def layerwise_errors(model, x_test, y_test):
    """Max-abs test error of every partial model, coarsest first."""
    y_test = np.asarray(y_test, dtype=float).ravel()
    if y_test.size == 0:
        raise ValueError("empty test set")
    partial = partial_predictions(model, x_test)
    return [float(v) for v in np.max(np.abs(y_test[None, :] - partial), axis=1)]


def sweep_scales(sigma0, decay, n_layers):
    """Geometric schedule ``sigma0 / sqrt(decay)**l`` for ``l = 0..n_layers-1``."""
    if not sigma0 > 0:
        raise ValueError("sigma0 must be positive")
    if not decay > 1:
        raise ValueError("decay must exceed 1")
    if n_layers < 1:
        raise ValueError("n_layers must be at least 1")
    ratio = math.sqrt(decay)
    return [sigma0 / ratio**l for l in range(n_layers)]


def phase_sweep(x, y, x_test, y_test, sigma0, decay=2.0, n_layers=12, *, epsilon=None, kkt_tol=1e-3):
    """Train a geometric cascade and return ``[(sigma_l, r_l), ...]``."""
    scales = sweep_scales(sigma0, decay, n_layers)
    _, reports = train(x, y, scales, epsilon, x_test=x_test, y_test=y_test, kkt_tol=kkt_tol)
    return [(r.sigma, r.test_error) for r in reports]


def _fmt(v):
    return "" if isinstance(v, float) and math.isnan(v) else format(v, ".17g")


def reports_to_csv(reports, path=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LAYER_REPORT_FIELDS)
    for r in reports:
        w.writerow([r.layer_index, _fmt(r.sigma), _fmt(r.c_used), r.n_support,
                    _fmt(r.residual_max), _fmt(r.test_error)])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def reports_from_csv(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for row in rows:
        out.append(LayerReport(
            layer_index=int(row["layer"]),
            sigma=float(row["sigma"]),
            c_used=float(row["c_used"]),
            n_support=int(row["n_support"]),
            residual_max=float(row["residual_max"]),
            test_error=float(row["test_error"]) if row["test_error"] else math.nan,
        ))
    return out


def report_dict(report):
    return asdict(report)
