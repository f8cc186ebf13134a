"""Benchmark signals, Lorenz trajectories, train/test splitting and CSV I/O."""
from dataclasses import dataclass
import csv

import numpy as np

from . import _kernels
from .errors import InvalidSignal, ParseError, UnknownFunction

LORENZ_SIGMA = 10.0
LORENZ_RHO = 28.0
LORENZ_BETA = 8.0 / 3.0
LORENZ_MAX_STEP = 1e-3

DEFAULT_DOMAIN = (0.0, 2.0)
DEFAULT_POINTS = 2001


@dataclass(frozen=True, eq=False)
class Signal:
    x: np.ndarray
    y: np.ndarray
    dx: float = 0.0  # 0 when the grid is not uniform

    def __len__(self):
        return self.x.size

    def __eq__(self, other):
        if not isinstance(other, Signal):
            return NotImplemented
        return (np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)
                and abs(self.dx - other.dx) <= 1e-12 * max(abs(self.dx), abs(other.dx)))


@dataclass(frozen=True)
class LorenzState:
    x: float
    y: float
    z: float
    t: float = 0.0


def make_signal(x, y):
    """Build a :class:`Signal`, detecting uniform spacing."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise InvalidSignal(f"x has {x.size} samples but y has {y.size}")
    if x.size and not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidSignal("signal contains non-finite values")
    if x.size > 1 and np.any(np.diff(x) <= 0):
        raise InvalidSignal("x must be strictly increasing")
    dx = 0.0
    if x.size > 1:
        h = (x[-1] - x[0]) / (x.size - 1)
        if np.max(np.abs(np.diff(x) - h)) <= 1e-9 * h:
            dx = float(h)
    return Signal(x=x, y=y, dx=dx)


# slug -> (formula text, callable)
FUNCTIONS = {
    "sin-2pi-x": ("sin(2πx)", lambda x: np.sin(2 * np.pi * x)),
    "sin-20pi-x": ("sin(20πx)", lambda x: np.sin(20 * np.pi * x)),
    "sin-200pi-x": ("sin(200πx)", lambda x: np.sin(200 * np.pi * x)),
    "100sin-20pi-x": ("100 sin(20πx)", lambda x: 100 * np.sin(20 * np.pi * x)),
    "40cos-2pi-x": ("40 cos(2πx)", lambda x: 40 * np.cos(2 * np.pi * x)),
    "100cos-20pi-x": ("100 cos(20πx)", lambda x: 100 * np.cos(20 * np.pi * x)),
    "sin-2pi-x2": ("sin(2πx²)", lambda x: np.sin(2 * np.pi * x**2)),
    "x-plus-x2-plus-x3": ("x + x² + x³", lambda x: x + x**2 + x**3),
    "e-x": ("e^x", np.exp),
    "sin-2pi-x4-plus-x": ("x + sin(2πx⁴)", lambda x: x + np.sin(2 * np.pi * x**4)),
    "cos-2pi-x-plus-sin-20pi-x": ("cos(2πx) + sin(20πx)",
                                  lambda x: np.cos(2 * np.pi * x) + np.sin(20 * np.pi * x)),
    "cos-20pi-x-sin-15pi-x": ("cos(20πx) sin(15πx)",
                              lambda x: np.cos(20 * np.pi * x) * np.sin(15 * np.pi * x)),
    "cos-32pi-x-cubed": ("cos(32πx)³", lambda x: np.cos(32 * np.pi * x) ** 3),
    "four-sines": ("sin(13πx) + sin(17πx) + sin(19πx) + sin(23πx)",
                   lambda x: (np.sin(13 * np.pi * x) + np.sin(17 * np.pi * x)
                              + np.sin(19 * np.pi * x) + np.sin(23 * np.pi * x))),
    "sin-50pi-x-sin-20pi-x-cos-15pi-x": ("sin(50πx) sin(20πx) cos(15πx)",
                                         lambda x: (np.sin(50 * np.pi * x) * np.sin(20 * np.pi * x)
                                                    * np.cos(15 * np.pi * x))),
    "sin-40pi-x-cos-10pi-x-plus-3sin-20x-sin-40x": (
        "sin(40πx) cos(10πx) + 3 sin(20x) sin(40x)",
        lambda x: np.sin(40 * np.pi * x) * np.cos(10 * np.pi * x) + 3 * np.sin(20 * x) * np.sin(40 * x)),
    "sin-2x-cos-32x": ("sin(2x) cos(32x)", lambda x: np.sin(2 * x) * np.cos(32 * x)),
    "sin-20pi-x2": ("sin(20πx²)", lambda x: np.sin(20 * np.pi * x**2)),
}

LORENZ_SLUGS = ("lorenz-x", "lorenz-y", "lorenz-z")


def function_names():
    return list(FUNCTIONS)


def evaluate(name, x):
    try:
        _, fn = FUNCTIONS[name]
    except KeyError:
        raise UnknownFunction(f"unknown function {name!r}; known: {', '.join(FUNCTIONS)}") from None
    return fn(np.asarray(x, dtype=float))


def equidistant_grid(a, b, n):
    # closed form per index, no accumulated drift
    return a + np.arange(n) * ((b - a) / (n - 1))


def generate_named(name, domain=DEFAULT_DOMAIN, n=DEFAULT_POINTS):
    a, b = map(float, domain)
    if n < 2:
        raise InvalidSignal("need at least 2 points")
    if not a < b:
        raise InvalidSignal("domain must satisfy a < b")
    x = equidistant_grid(a, b, n)
    y = evaluate(name, x)
    return Signal(x=x, y=y, dx=(b - a) / (n - 1))


def lorenz_rhs(state, sigma=LORENZ_SIGMA, rho=LORENZ_RHO, beta=LORENZ_BETA):
    x, y, z = state
    return np.array([sigma * (y - x), x * (rho - z) - y, x * y - beta * z])


def integrate_lorenz(times, initial=None, max_step=LORENZ_MAX_STEP):
    """Lorenz states at the increasing ``times`` (first entry is the initial time).

    Fixed-step RK4 with at most ``max_step`` per internal step; each interval
    between requested times is split evenly.
    """
    if initial is None:
        initial = LorenzState(1.0, 1.0, 1.0)
    times = np.ascontiguousarray(times, dtype=float)
    if times.size < 1 or np.any(np.diff(times) < 0):
        raise InvalidSignal("times must be non-decreasing")
    state0 = np.array([initial.x, initial.y, initial.z], dtype=float)
    return _kernels.rk4_lorenz(times, state0, float(max_step), LORENZ_SIGMA, LORENZ_RHO, LORENZ_BETA)


def lorenz_trajectory(t_end, n_points, initial=None, max_step=LORENZ_MAX_STEP):
    """Three Signals x(t), y(t), z(t) sampled at ``n_points`` equidistant times."""
    if initial is None:
        initial = LorenzState(1.0, 1.0, 1.0)
    if not t_end > initial.t:
        raise InvalidSignal("t_end must exceed the initial time")
    if n_points < 2:
        raise InvalidSignal("need at least 2 points")
    t = equidistant_grid(initial.t, float(t_end), n_points)
    states = integrate_lorenz(t, initial, max_step)
    dx = (t_end - initial.t) / (n_points - 1)
    return tuple(Signal(x=t.copy(), y=states[:, k].copy(), dx=dx) for k in range(3))


def lorenz_train_test(t_end=10.0, n_train=500, n_test=2000, initial=None, max_step=LORENZ_MAX_STEP):
    """Train and test trajectories cut from one integration over the union of both grids.

    Returns ``(train, test)``, each a tuple of three Signals (x, y, z).
    """
    if initial is None:
        initial = LorenzState(1.0, 1.0, 1.0)
    t_train = equidistant_grid(initial.t, float(t_end), n_train)
    t_test = equidistant_grid(initial.t, float(t_end), n_test)
    union, inverse = np.unique(np.concatenate([t_train, t_test]), return_inverse=True)
    states = integrate_lorenz(union, initial, max_step)
    tr = states[inverse[:n_train]]
    te = states[inverse[n_train:]]
    dtr = (t_end - initial.t) / (n_train - 1)
    dte = (t_end - initial.t) / (n_test - 1)
    train = tuple(Signal(x=t_train, y=tr[:, k].copy(), dx=dtr) for k in range(3))
    test = tuple(Signal(x=t_test, y=te[:, k].copy(), dx=dte) for k in range(3))
    return train, test


def split_alternating(signal):
    """Even-index samples train, odd-index samples test."""
    if len(signal) < 4:
        raise InvalidSignal("need at least 4 samples to split")
    train = Signal(x=signal.x[::2].copy(), y=signal.y[::2].copy(), dx=2 * signal.dx)
    test = Signal(x=signal.x[1::2].copy(), y=signal.y[1::2].copy(), dx=2 * signal.dx)
    return train, test


def save_csv(signal, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y"])
        for xv, yv in zip(signal.x.tolist(), signal.y.tolist()):
            # repr() is the shortest string that round-trips the double
            w.writerow([repr(xv), repr(yv)])


def load_csv(path):
    xs, ys = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", 1) from None
        if [h.strip().lower() for h in header] != ["x", "y"]:
            raise ParseError(f"expected header 'x,y', got {','.join(header)!r}", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 columns, got {len(row)}", lineno)
            try:
                xv, yv = float(row[0]), float(row[1])
            except ValueError:
                raise ParseError(f"non-numeric value in {row!r}", lineno) from None
            if not (np.isfinite(xv) and np.isfinite(yv)):
                raise ParseError("non-finite value", lineno)
            xs.append(xv)
            ys.append(yv)
    return make_signal(xs, ys)
