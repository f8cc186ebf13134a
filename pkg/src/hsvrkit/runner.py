"""End-to-end pipeline: scale estimation, cascade training, evaluation and suites."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
import csv
import io
import json
import math
import os
import time

import numpy as np

from . import hsvr, signals, spectral_dmd, spectral_fft
from .errors import NoOscillatoryContent, UnknownFunction

METHODS = ("FFT", "DMD")

# Reference rows: (slug, epsilon, layers FFT, error FFT, layers DMD, error DMD).
# None marks the entry where the DMD support was empty.
TABLE1_REFERENCE = (
    ("sin-2pi-x", 0.02, 1, 0.02, 1, 0.02),
    ("sin-20pi-x", 0.0199, 1, 0.021, 1, 0.02),
    ("sin-200pi-x", 0.019, 1, 0.093, 1, 0.097),
    ("100sin-20pi-x", 1.99, 1, 2.0, 1, 2.01),
    ("40cos-2pi-x", 0.8, 1, 0.8, 1, 0.8),
    ("100cos-20pi-x", 2.0, 1, 2.03, 1, 2.0),
    ("sin-2pi-x2", 0.0199, 5, 0.02, 1, 0.02),
    ("x-plus-x2-plus-x3", 0.14, 2, 0.14, 1, 8.0),
    ("e-x", 0.063, 1, 0.064, None, None),
    ("sin-2pi-x4-plus-x", 0.03, 7, 0.037, 1, 0.034),
    ("cos-2pi-x-plus-sin-20pi-x", 0.0397, 2, 0.0404, 2, 0.042),
    ("cos-20pi-x-sin-15pi-x", 0.02, 2, 0.021, 2, 0.022),
    ("cos-32pi-x-cubed", 0.0199, 1, 0.022, 2, 0.022),
    ("four-sines", 0.076, 1, 0.077, 1, 0.077),
    ("sin-50pi-x-sin-20pi-x-cos-15pi-x", 0.0187, 3, 0.02, 2, 0.02),
    ("sin-40pi-x-cos-10pi-x-plus-3sin-20x-sin-40x", 0.064, 5, 0.065, 3, 0.066),
    ("sin-2x-cos-32x", 0.0198, 5, 0.02, 1, 0.02),
)

LORENZ_REFERENCE = (
    ("lorenz-x", 0.314, 6, 0.325, 2, 0.324),
    ("lorenz-y", 0.408, 6, 0.469, 2, 0.469),
    ("lorenz-z", 0.468, 5, 0.485, 2, 0.494),
)

SUITES = {"table1": TABLE1_REFERENCE, "lorenz": LORENZ_REFERENCE}

SUMMARY_FIELDS = ("function", "epsilon", "layers_fft", "error_fft", "layers_dmd", "error_dmd")
BATCH_FIELDS = ("series", "method", "epsilon", "layers", "final_error", "error_over_epsilon", "status")


@dataclass
class ScaleOptions:
    decay: float = spectral_fft.DEFAULT_DECAY
    threshold: float = spectral_fft.DEFAULT_THRESHOLD
    tol: float = spectral_dmd.DEFAULT_TOL
    eta: float = spectral_dmd.DEFAULT_ETA
    rows: int | None = None
    rank_tol: float = spectral_dmd.DEFAULT_RANK_TOL


@dataclass
class RunReport:
    dataset: str
    method: str
    epsilon: float
    predicted_layers: int
    final_error: float
    error_over_epsilon: float
    final_rmse: float = math.nan
    scales: list = field(default_factory=list)
    layers: list = field(default_factory=list)
    wall_time: float = 0.0
    status: str = "ok"

    def to_dict(self):
        d = asdict(self)
        d["layers"] = [dict(r) if isinstance(r, dict) else asdict(r) for r in self.layers]
        return d

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, allow_nan=True)


def resolve_input(source, domain=signals.DEFAULT_DOMAIN, points=signals.DEFAULT_POINTS):
    """``(train, test)`` Signals for a CSV path, a function slug or a Lorenz coordinate."""
    if os.path.isfile(source):
        return signals.split_alternating(signals.load_csv(source))
    if source in signals.LORENZ_SLUGS:
        train, test = signals.lorenz_train_test()
        k = signals.LORENZ_SLUGS.index(source)
        return train[k], test[k]
    if source in signals.FUNCTIONS:
        return signals.split_alternating(signals.generate_named(source, domain, points))
    raise UnknownFunction(f"{source!r} is neither a file nor a known signal")


def estimate_scales(train, method, options=None):
    options = options or ScaleOptions()
    method = method.upper()
    if method == "FFT":
        return spectral_fft.fft_scales(train.x, train.y, options.decay, options.threshold)
    if method == "DMD":
        dx = train.dx if train.dx > 0 else spectral_fft.grid_spacing(train.x)
        return spectral_dmd.dmd_scales(train.y, dx, options.rows, options.tol, options.eta,
                                       options.decay, rank_tol=options.rank_tol)
    raise ValueError(f"unknown method {method!r}")


def evaluate_model(dataset, method, model, reports, test, wall_time):
    errors = hsvr.layerwise_errors(model, test.x, test.y)
    final = errors[-1]
    pred = hsvr.predict(model, test.x)
    eps = model.epsilon
    return RunReport(
        dataset=dataset,
        method=method,
        epsilon=eps,
        predicted_layers=len(model),
        final_error=final,
        error_over_epsilon=final / eps if eps > 0 else math.inf,
        final_rmse=float(np.sqrt(np.mean((test.y - pred) ** 2))),
        scales=list(model.scales),
        layers=[asdict(r) for r in reports],
        wall_time=wall_time,
    )


def run_pipeline(dataset, train, test, method="FFT", options=None, kkt_tol=1e-3, scales=None):
    """Estimate scales (unless given), train the cascade and score it on ``test``.

    Returns ``(model, estimate, report)``; ``estimate`` is ``None`` when
    ``scales`` were supplied. Raises :class:`NoOscillatoryContent` from the
    estimator.
    """
    t0 = time.perf_counter()
    estimate = None
    if scales is None:
        estimate = estimate_scales(train, method, options)
        scales = estimate.scales
    model, reports = hsvr.train(train.x, train.y, scales, x_test=test.x, y_test=test.y, kkt_tol=kkt_tol)
    report = evaluate_model(dataset, method.upper(), model, reports, test, time.perf_counter() - t0)
    return model, estimate, report


def empty_support_report(dataset, method, train):
    eps = hsvr.epsilon_rule(train.y)
    return RunReport(dataset=dataset, method=method.upper(), epsilon=eps, predicted_layers=0,
                     final_error=math.nan, error_over_epsilon=math.nan, status="no-support")


def _run_one(args):
    dataset, train, test, method, options, kkt_tol = args
    try:
        return run_pipeline(dataset, train, test, method, options, kkt_tol)
    except NoOscillatoryContent:
        return None, None, empty_support_report(dataset, method, train)


def run_suite(name, methods=METHODS, options=None, kkt_tol=1e-3):
    """Run a reference suite; returns ``{(slug, method): (model, estimate, report)}``."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    out = {}
    for row in SUITES[name]:
        slug = row[0]
        train, test = resolve_input(slug)
        for method in methods:
            out[(slug, method.upper())] = _run_one((slug, train, test, method, options, kkt_tol))
    return out


def _num(v):
    return "*" if v is None or (isinstance(v, float) and math.isnan(v)) else format(v, ".17g")


def suite_summary_rows(name, results):
    rows = []
    for ref in SUITES[name]:
        slug = ref[0]
        row = {"function": slug}
        eps = None
        for method in METHODS:
            got = results.get((slug, method))
            key = method.lower()
            if got is None:
                row[f"layers_{key}"] = ""
                row[f"error_{key}"] = ""
                continue
            report = got[2]
            eps = report.epsilon
            if report.status != "ok":
                row[f"layers_{key}"] = "*"
                row[f"error_{key}"] = "*"
            else:
                row[f"layers_{key}"] = str(report.predicted_layers)
                row[f"error_{key}"] = _num(report.final_error)
        row["epsilon"] = _num(eps)
        rows.append(row)
    return rows


def summary_csv(rows, fields=SUMMARY_FIELDS):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r.get(k, "") for k in fields})
    return buf.getvalue()


def run_batch(paths, method="FFT", options=None, kkt_tol=1e-3, jobs=1):
    """Train one cascade per CSV series; parallel across series, ordered like ``paths``.

    Returns a list of :class:`RunReport`.
    """
    tasks = []
    for p in paths:
        train, test = signals.split_alternating(signals.load_csv(p))
        tasks.append((os.path.splitext(os.path.basename(p))[0], train, test, method, options, kkt_tol))
    if jobs is None or jobs <= 1 or len(tasks) <= 1:
        results = [_run_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, tasks))
    return [r[2] for r in results]


def batch_rows(reports):
    rows = []
    for r in reports:
        rows.append({
            "series": r.dataset,
            "method": r.method,
            "epsilon": _num(r.epsilon),
            "layers": str(r.predicted_layers),
            "final_error": _num(r.final_error),
            "error_over_epsilon": _num(r.error_over_epsilon),
            "status": r.status,
        })
    return rows


def surrogate_series(seed, n_samples=1201, dt=0.03125):
    """Random multiscale test series: 3-6 sinusoids plus a linear trend.

    Stands in for per-point vorticity records. The highest frequency keeps
    at least six training samples per period after the alternating split.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(n_samples) * dt
    y = rng.normal() * 0.3 * t / t[-1] + rng.normal() * 0.1
    for _ in range(int(rng.integers(3, 7))):
        amp = rng.uniform(0.2, 1.0)
        freq = rng.uniform(0.02, 2.5)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        y = y + amp * np.sin(2.0 * np.pi * freq * t + phase)
    return signals.Signal(x=t, y=y, dx=dt)
