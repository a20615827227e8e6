"""Boundary functions h(x) = f(x) - eps x^{-1} f(1/x) of zeta products.

Three independent routes compute h on a geometric grid symmetric about 1:

  A (contour)  -- f by inverse Mellin quadrature of the product evaluator;
  B (series)   -- f as a Dirichlet-coefficient sum of kappa atoms,
                  kappa = inverse Mellin of xi(Q,s)^2 = divisor-sum of K_0;
  C (spectral) -- the truncated expansion over poles of the product,
                  sum_lambda sum_m C_{m+1}(lambda) (-1)^m/m! x^{-lambda} log^m x.

Laurent data at poles comes from circle quadrature (principal_part); the
phi/omega split of the Mellin transform lives here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lfunc import PoleDatum
from .mellin import (
    ContourSpec,
    GridFunction,
    inverse_mellin_grid,
)
from .specfun import DEFAULT_POLICY, PrecisionPolicy, bessel_k0_many, divisor_sigma

__all__ = [
    "BoundaryFunction",
    "ZeroList",
    "load_zero_file",
    "kappa_eval",
    "kappa_many",
    "kappa_atom_constants",
    "boundary_route_contour",
    "boundary_route_series",
    "boundary_route_spectral",
    "principal_part",
    "omega_phi_split",
    "TruncationInsufficientError",
    "RadiusEnclosesSingularityError",
]

K0_PREFACTOR = 4.0       # c_K: InvMellin(pi^{-s} Gamma(s/2)^2)(x) = 4 K_0(2 pi x)
K0_ARG_SCALE = 2.0 * math.pi  # c_A
_K0_CUTOFF = 45.0        # K_0 argument beyond which atoms are below 1e-18


class TruncationInsufficientError(ValueError):
    """Coefficient support too short for the requested grid."""


class RadiusEnclosesSingularityError(ValueError):
    """principal_part circle contains a second singularity."""


class MissingPrincipalPartError(ValueError):
    """Spectral route received a pole without Laurent data."""


# --------------------------------------------------------------------------
# Zero lists (ingested, never computed here)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroList:
    """Increasing positive ordinates gamma_k; zeros at fe_center +- i gamma."""

    ordinates: tuple
    source: str = ""

    def __post_init__(self):
        if any(g <= 0 for g in self.ordinates):
            raise ValueError("ordinates must be positive")
        if any(b <= a for a, b in zip(self.ordinates, self.ordinates[1:])):
            raise ValueError("ordinates must be strictly increasing")

    @property
    def count(self) -> int:
        return len(self.ordinates)


def load_zero_file(path) -> ZeroList:
    """Plain text: optional '# source: ...' header lines, one ordinate per line."""
    source_lines = []
    ordinates = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.lower().startswith("# source:"):
                    source_lines.append(line[9:].strip())
                continue
            ordinates.append(float(line))
    return ZeroList(tuple(ordinates), "; ".join(source_lines))


# --------------------------------------------------------------------------
# The kappa kernel: inverse Mellin of xi(Q,s)^2 on a contour right of 1
# --------------------------------------------------------------------------


def kappa_atom_constants() -> tuple:
    """(c_K, c_A) with InvMellin(pi^{-s} Gamma(s/2)^2)(x) = c_K K_0(c_A x).

    Fixed from the exact pair  int_0^inf K_0(t) t^{s-1} dt = 2^{s-2}
    Gamma(s/2)^2  and the shift law; validated against contour quadrature
    in the tests.
    """
    return K0_PREFACTOR, K0_ARG_SCALE


def kappa_many(x, n_terms: int | None = None, policy: PrecisionPolicy = DEFAULT_POLICY):
    """kappa(x) = 4 sum_{n>=1} sigma_0(n) K_0(2 pi n x), vectorized over x.

    This is the inverse Mellin transform of xi(Q,s)^2 along any contour
    Re(s) = c > 1 (no pole terms: the contour stays right of 0 and 1).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise ValueError("kappa requires x > 0")
    out = np.zeros_like(x)
    nmax_global = int(_K0_CUTOFF / (K0_ARG_SCALE * float(np.min(x)))) + 1
    if n_terms is not None:
        nmax_global = min(nmax_global, n_terms)
    if nmax_global < 1:
        return out
    sig = np.array([divisor_sigma(0, n) for n in range(1, nmax_global + 1)], dtype=float)
    for j, xv in enumerate(x):
        nmax = int(_K0_CUTOFF / (K0_ARG_SCALE * xv)) + 1
        if n_terms is not None:
            nmax = min(nmax, n_terms)
        if nmax < 1:
            continue
        args = K0_ARG_SCALE * xv * np.arange(1, nmax + 1)
        out[j] = K0_PREFACTOR * float(np.dot(sig[:nmax], bessel_k0_many(args, policy)))
    return out


def kappa_eval(x: float, n_terms: int | None = None,
               policy: PrecisionPolicy = DEFAULT_POLICY) -> float:
    """Scalar kappa(x); see kappa_many."""
    return float(kappa_many(np.array([float(x)]), n_terms, policy)[0])


# --------------------------------------------------------------------------
# Boundary function container
# --------------------------------------------------------------------------


@dataclass
class BoundaryFunction:
    """Samples of h on a grid symmetric about 1, with provenance."""

    grid: GridFunction
    epsilon: float
    provenance: str  # contour | series | spectral
    source: str = ""

    def values(self) -> np.ndarray:
        return self.grid.values

    def xs(self) -> np.ndarray:
        return self.grid.xs()

    def reflection_residual(self) -> float:
        """max_j | h(x_j) + eps x_j^{-1} h(1/x_j) | over paired nodes."""
        h = self.grid.values
        xs = self.grid.xs()
        mirrored = h[::-1]
        return float(np.max(np.abs(h + self.epsilon * mirrored / xs)))

    def imag_residual(self) -> float:
        return float(np.max(np.abs(self.grid.values.imag)))

    def to_csv(self, path) -> None:
        xs = self.grid.xs()
        with open(path, "w") as fh:
            fh.write("x,h_re,h_im,route\n")
            for x, v in zip(xs, self.grid.values):
                fh.write(f"{x!r},{v.real!r},{v.imag!r},{self.provenance}\n")


def _require_symmetric(grid: GridFunction) -> None:
    if not grid.is_symmetric_about_one():
        raise ValueError(
            "boundary routes need a grid symmetric about x = 1 so that the "
            "reflection x -> 1/x lands on nodes"
        )


def _pair_reflect(fvals: np.ndarray, xs: np.ndarray, epsilon: float) -> np.ndarray:
    """h_j = f_j - eps * x_j^{-1} * f at the mirrored node."""
    return fvals - epsilon * fvals[::-1] / xs


# --------------------------------------------------------------------------
# Route A: contour
# --------------------------------------------------------------------------


def boundary_route_contour(
    evaluator,
    epsilon: float,
    contour: ContourSpec,
    grid: GridFunction,
    tol: float = 1e-9,
    source: str = "",
) -> BoundaryFunction:
    """h from f = inverse Mellin of the product evaluator."""
    _require_symmetric(grid)
    fgrid, _err = inverse_mellin_grid(evaluator, contour, grid, tol=tol)
    h = _pair_reflect(fgrid.values, grid.xs(), epsilon)
    return BoundaryFunction(grid.with_values(h), epsilon, "contour", source)


# --------------------------------------------------------------------------
# Route B: kappa / K_0 series
# --------------------------------------------------------------------------


def boundary_route_series(
    b_support,
    b_values,
    epsilon: float,
    grid: GridFunction,
    kappa=None,
    source: str = "",
) -> BoundaryFunction:
    """h(x) = sum_m b_m [kappa(m x) - eps x^{-1} kappa(m / x)].

    b_support holds the Dirichlet indices m (every affine rescale of s is
    already folded into this support), b_values the coefficients.  With the
    default (pure K_0) kappa atom the double sum is collapsed through the
    divisor identity into combined coefficients B_K = sum_{m | K} b_m
    sigma_0(K/m), which is the paper-shaped final formula.
    """
    _require_symmetric(grid)
    support = np.asarray(b_support, dtype=float)
    coeffs = np.asarray(b_values, dtype=float)
    if support.shape != coeffs.shape:
        raise ValueError("b_support and b_values must align")
    xs = grid.xs()
    xmin = float(xs[0])

    needed = _K0_CUTOFF / (K0_ARG_SCALE * xmin)
    if float(np.max(support)) < min(needed, 1.0 / xmin * 7.5):
        raise TruncationInsufficientError(
            f"coefficient support reaches {int(np.max(support))} but the grid "
            f"needs ~{int(needed) + 1} for its smallest x"
        )

    if kappa is None:
        fvals = _f_series_pure_k0(support, coeffs, xs)
    else:
        fvals = np.zeros_like(xs, dtype=complex)
        for m, b in zip(support, coeffs):
            if b == 0:
                continue
            fvals = fvals + b * np.asarray(kappa(m * xs), dtype=complex)
    h = _pair_reflect(fvals, xs, epsilon)
    return BoundaryFunction(grid.with_values(h), epsilon, "series", source)


def _f_series_pure_k0(support: np.ndarray, coeffs: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """f(x) = sum_K B_K * 4 K_0(2 pi K x), B_K = sum_{m | K} b_m sigma_0(K/m)."""
    xmin = float(np.min(xs))
    kmax = int(_K0_CUTOFF / (K0_ARG_SCALE * xmin)) + 1
    B = np.zeros(kmax + 1)
    int_support = support.astype(int)
    for m, b in zip(int_support, coeffs):
        if b == 0 or m > kmax:
            continue
        for mult in range(1, kmax // m + 1):
            B[m * mult] += b * divisor_sigma(0, mult)
    out = np.zeros_like(xs, dtype=float)
    for j, xv in enumerate(xs):
        klim = min(kmax, int(_K0_CUTOFF / (K0_ARG_SCALE * xv)) + 1)
        if klim < 1:
            continue
        ks = np.arange(1, klim + 1)
        live = B[1 : klim + 1] != 0
        if not np.any(live):
            continue
        args = K0_ARG_SCALE * xv * ks[live]
        out[j] = K0_PREFACTOR * float(np.dot(B[1 : klim + 1][live], bessel_k0_many(args)))
    return out.astype(complex)


# --------------------------------------------------------------------------
# Laurent data by circle quadrature
# --------------------------------------------------------------------------


def principal_part(
    evaluator,
    lam: complex,
    max_m: int,
    radius: float = 0.05,
    nodes: int = 64,
    other_singularities=(),
    noise_floor: float = 1e-9,
) -> PoleDatum:
    """C_m(lambda) = (1/2 pi i) oint F(s) (s-lambda)^{m-1} ds, m = 1..max_m.

    Trapezoid on the circle (spectrally accurate).  The multiplicity is the
    largest m whose |C_m| stays above noise_floor * max_m' |C_m'|.
    """
    lam = complex(lam)
    for other in other_singularities:
        if other != lam and abs(complex(other) - lam) <= radius:
            raise RadiusEnclosesSingularityError(
                f"radius {radius} around {lam} encloses singularity {other}"
            )
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    ring = radius * np.exp(1j * theta)
    fvals = np.asarray(evaluator(lam + ring), dtype=complex)
    cs = []
    for m in range(1, max_m + 1):
        cs.append(complex(np.mean(fvals * ring**m)))
    cs = np.array(cs)
    scale = float(np.max(np.abs(cs))) if len(cs) else 0.0
    mult = 0
    for m in range(max_m, 0, -1):
        if abs(cs[m - 1]) > noise_floor * scale:
            mult = m
            break
    if mult == 0:
        raise ValueError(f"no pole detected at {lam} (all C_m below noise floor)")
    return PoleDatum(lam, mult, tuple(cs[:mult]))


# --------------------------------------------------------------------------
# Route C: spectral sum over poles
# --------------------------------------------------------------------------


def boundary_route_spectral(
    pole_data,
    grid: GridFunction,
    epsilon: float = 1.0,
    symmetrize: bool = True,
    source: str = "",
) -> BoundaryFunction:
    """Truncated expansion sum_lambda sum_m C_{m+1}(lambda) (-1)^m/m! x^-lambda log^m x.

    Poles with Im > 0 stand for a conjugate pair: their contribution is
    doubled through the real part so the output is real for real inputs.
    """
    logx = grid.logxs()
    total = np.zeros_like(logx, dtype=complex)
    for pd in pole_data:
        if not isinstance(pd, PoleDatum):
            raise MissingPrincipalPartError(
                "spectral route needs PoleDatum entries with Laurent data"
            )
        lam = complex(pd.location)
        term = np.zeros_like(total)
        for m in range(pd.multiplicity):
            cm = pd.principal_coeffs[m]
            term = term + cm * ((-1.0) ** m / math.factorial(m)) * logx**m
        term = term * np.exp(-lam * logx)
        if symmetrize and lam.imag > 0:
            total = total + 2.0 * term.real
        elif symmetrize and lam.imag < 0:
            raise ValueError("with symmetrize=True supply only Im >= 0 poles")
        else:
            total = total + term
    return BoundaryFunction(grid.with_values(total), epsilon, "spectral", source)


# --------------------------------------------------------------------------
# phi / omega split of the Mellin transform
# --------------------------------------------------------------------------


def omega_phi_split(
    f: GridFunction, epsilon: float, s: complex, tol: float | None = None
) -> tuple:
    """(phi, omega): phi = int_1^inf f(x)[x^s + eps x^{1-s}] dx/x,
    omega = int_0^1 h(x) x^s dx/x with h = f(x) - eps x^{-1} f(1/x).

    Log-grid trapezoid with the x = 1 node split between the two ranges;
    M(f)(s) = phi + omega wherever both converge.  Raises TailDominatedError
    through the reported tails when tol is given.
    """
    _require_symmetric(f)
    s = complex(s)
    xs = f.xs()
    logx = f.logxs()
    h = f.log_step
    n = f.n
    mid = (n - 1) // 2  # x = 1 node

    w = np.full(n, h)
    w[0] *= 0.5
    w[-1] *= 0.5

    upper = slice(mid, n)
    wu = w[upper].copy()
    wu[0] = 0.5 * h  # split weight at x = 1
    fu = f.values[upper]
    xu = xs[upper]
    phi = np.sum(wu * fu * (xu**s + epsilon * xu ** (1.0 - s)))

    lower = slice(0, mid + 1)
    wl = w[lower].copy()
    wl[-1] = 0.5 * h
    hvals = f.values[lower] - epsilon * f.values[::-1][lower] / xs[lower]
    omega = np.sum(wl * hvals * xs[lower] ** s)

    if tol is not None:
        tail_f = float(np.abs(fu[-1] * xu[-1] ** s.real))
        tail_h = float(np.abs(hvals[0] * xs[0] ** s.real))
        if max(tail_f, tail_h) > tol:
            from .mellin import TailDominatedError

            raise TailDominatedError(
                f"split tails ({tail_h:.2e}, {tail_f:.2e}) exceed {tol:.2e}"
            )
    return complex(phi), complex(omega)
