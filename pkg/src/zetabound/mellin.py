"""Numerical Mellin analysis on vertical lines and geometric grids.

Inverse transforms are trapezoidal quadrature over a truncated vertical
contour (exponentially accurate for analytic integrands with gamma-type
decay); forward transforms are log-grid quadrature with endpoint tail
estimates.  Everything sums in a fixed order so CSV outputs are bit-stable
across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ContourSpec",
    "GridFunction",
    "geometric_grid",
    "symmetric_grid",
    "default_contour",
    "inverse_mellin",
    "inverse_mellin_grid",
    "forward_mellin",
    "MellinValue",
    "ForwardValue",
    "InsufficientDecayError",
    "TailDominatedError",
    "IncompatibleGridError",
]


class InsufficientDecayError(ValueError):
    """Integrand tail at the truncation height exceeds the tolerance."""


class TailDominatedError(ValueError):
    """A grid endpoint contributes more than the tolerance to the integral."""


class IncompatibleGridError(ValueError):
    """Grids do not share the log step required for convolution."""


@dataclass(frozen=True)
class ContourSpec:
    """Vertical line Re(s) = c truncated at |Im(s)| <= T, quadrature step in Im."""

    c: float
    T: float
    step: float

    def __post_init__(self):
        if not (self.T > 0 and self.step > 0 and self.step <= self.T):
            raise ValueError("need 0 < step <= T")

    def nodes(self) -> np.ndarray:
        m = int(math.floor(self.T / self.step))
        t = self.step * np.arange(-m, m + 1)
        return self.c + 1j * t


@dataclass
class GridFunction:
    """Complex samples on the geometric grid x_j = x0 * r^j, j = 0..n-1."""

    x0: float
    ratio: float
    values: np.ndarray

    def __post_init__(self):
        if not (self.x0 > 0 and self.ratio > 1.0):
            raise ValueError("need x0 > 0 and ratio > 1")
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim != 1 or len(self.values) < 1:
            raise ValueError("values must be a nonempty 1-d array")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def log_step(self) -> float:
        return math.log(self.ratio)

    def xs(self) -> np.ndarray:
        return self.x0 * self.ratio ** np.arange(self.n)

    def logxs(self) -> np.ndarray:
        return math.log(self.x0) + self.log_step * np.arange(self.n)

    def compatible_with(self, other: "GridFunction", tol: float = 1e-12) -> bool:
        return abs(self.log_step - other.log_step) <= tol * self.log_step

    def is_symmetric_about_one(self, tol: float = 1e-9) -> bool:
        """x_j * x_{n-1-j} = 1 for all j, i.e. x0^2 r^{n-1} = 1."""
        return abs(math.log(self.x0**2) + (self.n - 1) * self.log_step) < tol

    def mirror_index(self, j: int) -> int:
        return self.n - 1 - j

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.x0, self.ratio, np.asarray(values, dtype=complex))

    def to_csv(self, path) -> None:
        xs = self.xs()
        with open(path, "w") as fh:
            fh.write("x,re,im\n")
            for x, v in zip(xs, self.values):
                fh.write(f"{x!r},{v.real!r},{v.imag!r}\n")

    @classmethod
    def from_csv(cls, path) -> "GridFunction":
        xs, re, im = [], [], []
        with open(path) as fh:
            header = fh.readline()
            if not header.startswith("x,"):
                raise ValueError("bad GridFunction CSV header")
            for line in fh:
                sx, sr, si = line.strip().split(",")
                xs.append(float(sx))
                re.append(float(sr))
                im.append(float(si))
        if len(xs) < 2:
            raise ValueError("need at least two samples")
        ratio = xs[1] / xs[0]
        return cls(xs[0], ratio, np.array(re) + 1j * np.array(im))


def geometric_grid(x0: float, ratio: float, n: int) -> GridFunction:
    return GridFunction(x0, ratio, np.zeros(n, dtype=complex))


def symmetric_grid(half_efolds: float = 3.0, per_efold: int = 64) -> GridFunction:
    """Grid symmetric about 1 spanning [e^-half, e^half]; reflection x -> 1/x
    lands exactly on nodes.  Default: x0 = e^-3, r = e^{1/64}, n = 385."""
    n = 2 * int(round(half_efolds * per_efold)) + 1
    x0 = math.exp(-half_efolds)
    ratio = math.exp(1.0 / per_efold)
    return geometric_grid(x0, ratio, n)


def default_contour(c: float, T: float = 60.0, grid: GridFunction | None = None,
                    safety: float = math.e**8) -> ContourSpec:
    """Step rule linking grid extent to aliasing: step <= pi / log(x_max/x0 * safety),
    capped at 0.05 so gamma-decay integrands are always oversampled."""
    if grid is not None:
        span = (grid.n - 1) * grid.log_step
    else:
        span = 6.0
    step = min(0.05, math.pi / (span + math.log(safety)))
    return ContourSpec(c=c, T=T, step=step)


@dataclass(frozen=True)
class MellinValue:
    value: complex
    truncation_error: float


@dataclass(frozen=True)
class ForwardValue:
    value: complex
    tail_low: float
    tail_high: float


# --------------------------------------------------------------------------
# Inverse transform
# --------------------------------------------------------------------------


def _tail_estimate(fvals: np.ndarray, contour: ContourSpec, xpows: np.ndarray) -> float:
    """Estimated contribution beyond +-T from the last sampled lobe.

    Assumes the gamma-type exponential decay seen across the last decade of
    samples continues; reported as an estimate, not a bound.
    """
    m = len(fvals) // 2
    k = max(4, int(0.1 * m))
    top = np.abs(fvals[-k:])
    bot = np.abs(fvals[:k][::-1])
    edge = max(float(top[-1]), float(bot[-1]), 1e-300)
    ref = max(float(top[0]), float(bot[0]), 1e-300)
    decay = max(1e-6, (edge / ref) ** (1.0 / max(k - 1, 1)))
    if decay >= 0.999:
        geom = edge * contour.step * 1000.0
    else:
        geom = edge * contour.step / (1.0 - decay)
    return float(geom * np.max(xpows) / (2.0 * math.pi))


def inverse_mellin(F, contour: ContourSpec, x: float, tol: float = 1e-9) -> MellinValue:
    """(1/2 pi) int_{-T}^{T} F(c + it) x^{-c-it} dt by the trapezoid rule."""
    res = inverse_mellin_grid(
        F, contour, GridFunction(float(x), math.e, np.zeros(1, dtype=complex)), tol=tol
    )
    return MellinValue(complex(res[0].values[0]), res[1])


def inverse_mellin_grid(F, contour: ContourSpec, grid: GridFunction, tol: float = 1e-9):
    """Vectorized inverse Mellin: one pass over the contour serves every x.

    Returns (GridFunction, truncation_error_estimate).  F must accept a
    numpy array of contour nodes.
    """
    s = contour.nodes()
    fvals = np.asarray(F(s), dtype=complex)
    if fvals.shape != s.shape:
        raise ValueError("contour evaluator returned wrong shape")
    logx = grid.logxs()
    xpow_c = np.exp(-contour.c * logx)
    err = _tail_estimate(fvals, contour, xpow_c)
    if err > tol:
        raise InsufficientDecayError(
            f"contour tail estimate {err:.3e} exceeds tol {tol:.3e}; "
            "raise T or add smoothing"
        )
    # value(x) = (step / 2 pi) * sum_j F(c + i t_j) e^{-i t_j log x} * x^{-c}
    t = s.imag
    phase = np.exp(-1j * np.outer(t, logx))
    w = np.full(len(t), contour.step)
    w[0] *= 0.5
    w[-1] *= 0.5
    vals = (w * fvals) @ phase
    vals = vals * xpow_c / (2.0 * math.pi)
    return grid.with_values(vals), err


# --------------------------------------------------------------------------
# Forward transform
# --------------------------------------------------------------------------


def forward_mellin(f: GridFunction, s: complex, tol: float | None = None) -> ForwardValue:
    """log-grid quadrature sum_j f(x_j) x_j^s log r, with endpoint tail estimates.

    Tail estimates extrapolate the observed geometric decay of |f(x) x^s| at
    each end; TailDominatedError when an endpoint contributes above tol.
    """
    logx = f.logxs()
    s = complex(s)
    integrand = f.values * np.exp(s * logx)
    h = f.log_step
    value = complex(h * np.sum(integrand))

    mags = np.abs(integrand)
    floor = 1e-300

    def end_tail(edge_slice) -> float:
        m = mags[edge_slice]
        last, prev = max(m[-1], floor), max(m[0], floor)
        k = len(m) - 1
        decay = (last / prev) ** (1.0 / max(k, 1))
        if decay >= 0.999:
            return float(last * h * 1000.0)
        return float(last * h * decay / (1.0 - decay))

    k = max(4, f.n // 16)
    tail_high = end_tail(slice(f.n - k, f.n))
    # low end: reversed slice runs inward-to-edge like the high end
    tail_low = end_tail(slice(k - 1, None, -1))
    if tol is not None and max(tail_low, tail_high) > tol:
        raise TailDominatedError(
            f"endpoint tails ({tail_low:.3e}, {tail_high:.3e}) exceed tol {tol:.3e}"
        )
    return ForwardValue(value, tail_low, tail_high)
