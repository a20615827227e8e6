"""Completed zeta and L-functions as evaluable analytic objects.

A CompletedSeries packs Dirichlet coefficients, a gamma factor, sign,
declared poles and the center of the functional equation s -> 2*center - s.
Two evaluation routes live here:

  * eval_dirichlet        -- truncated sum in the half-plane of convergence,
  * eval_completed_smoothed -- two-sided incomplete-gamma (theta) sums valid
                               in the whole strip for the shipped shapes
                               xi(Q,s) (Gamma_R) and Lambda(E,s) (Gamma_C).

For work on vertical lines deep in the convergence region there are also
numerically stable log-form helpers (Euler-Maclaurin zeta, Euler-product L)
that the contour quadrature uses; the smoothed sums lose all relative
accuracy above |Im s| ~ 22 because the completed functions decay like
exp(-pi |t| / 2) while their defining terms stay O(1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .arith import (
    DirichletCoefficients,
    EllipticCurveData,
    l_coefficients,
    primes_upto,
)
from .specfun import (
    DEFAULT_POLICY,
    GAMMA_C,
    GAMMA_R,
    GammaFactor,
    PoleError,
    PrecisionPolicy,
    incomplete_gamma_upper,
    log_gamma,
)

__all__ = [
    "PoleDatum",
    "CompletedSeries",
    "DirichletValue",
    "OutsideHalfPlaneError",
    "PoleProximityError",
    "PoleZeroCollisionWarning",
    "eval_dirichlet",
    "eval_completed_smoothed",
    "fe_residual",
    "fit_epsilon",
    "assemble_product",
    "ProductEvaluator",
    "shape_check",
    "AnalyticShapeReport",
    "riemann_xi_series",
    "curve_lambda_series",
    "zeta_em",
    "curve_l_evaluator",
    "GammaFactor",
    "GAMMA_R",
    "GAMMA_C",
]


class OutsideHalfPlaneError(ValueError):
    """Dirichlet evaluation requested left of the convergence abscissa."""


class PoleProximityError(ValueError):
    """Evaluation within 1e-6 of a declared pole."""


class PoleZeroCollisionWarning(UserWarning):
    """A pole of one product factor coincides with a declared zero of another."""


@dataclass(frozen=True)
class PoleDatum:
    """Location, multiplicity and Laurent principal part C_1..C_m at a pole."""

    location: complex
    multiplicity: int
    principal_coeffs: tuple

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")
        if len(self.principal_coeffs) != self.multiplicity:
            raise ValueError("need exactly multiplicity principal coefficients")
        if self.principal_coeffs[-1] == 0:
            raise ValueError("leading principal coefficient C_m must be nonzero")


@dataclass(frozen=True)
class CompletedSeries:
    """Dirichlet series together with its completion data.

    The functional equation is  Lhat(s) = epsilon * conj(Lhat(2*fe_center -
    conj(s))); shipped objects have real coefficients and epsilon in {+1,-1}.
    """

    coeffs: DirichletCoefficients
    gamma: GammaFactor
    epsilon: complex
    poles: tuple = ()
    convergence_abscissa: float = 1.0
    fe_center: float = 0.5
    description: str = ""

    def __post_init__(self):
        if abs(abs(self.epsilon) - 1.0) > 1e-12:
            raise ValueError("|epsilon| must be 1")

    @property
    def pole_strip_halfwidth(self) -> float:
        if not self.poles:
            return 0.0
        return max(abs(p.location.real - self.fe_center) for p in self.poles)


@dataclass(frozen=True)
class DirichletValue:
    value: complex
    tail_bound: float


# --------------------------------------------------------------------------
# Shipped series builders
# --------------------------------------------------------------------------


def riemann_xi_series(N: int = 64) -> CompletedSeries:
    """xi(Q, s) = pi^{-s/2} Gamma(s/2) zeta(s); simple poles at 0 and 1."""
    return CompletedSeries(
        coeffs=DirichletCoefficients([1] * N, "zeta"),
        gamma=GAMMA_R,
        epsilon=1.0,
        poles=(
            PoleDatum(0.0, 1, (-1.0,)),
            PoleDatum(1.0, 1, (1.0,)),
        ),
        convergence_abscissa=1.0,
        fe_center=0.5,
        description="xi(Q,s)",
    )


def curve_lambda_series(
    curve: EllipticCurveData, N: int = 256, epsilon: complex | None = None
) -> CompletedSeries:
    """Lambda(E, s) = A^{s/2} Gamma_C(s) L(E, s), entire, center 1.

    When epsilon is None the sign is fitted by minimizing the functional
    equation residual over {+1, -1} (the paper's equation holds only up to
    sign, so the artifact determines it from the data).
    """
    A = curve.conductor
    gamma_fac = GammaFactor(
        conductor=A / (4.0 * math.pi**2), factors=((1.0, 0.0),), prefactor=2.0
    )
    cs = CompletedSeries(
        coeffs=l_coefficients(curve, N),
        gamma=gamma_fac,
        epsilon=1.0,
        poles=(),
        convergence_abscissa=1.5,
        fe_center=1.0,
        description=f"Lambda({curve.label or 'E'},s)",
    )
    if epsilon is None:
        eps = fit_epsilon(cs)
        if eps != 1.0:
            cs = CompletedSeries(
                cs.coeffs, cs.gamma, eps, cs.poles,
                cs.convergence_abscissa, cs.fe_center, cs.description,
            )
    else:
        cs = CompletedSeries(
            cs.coeffs, cs.gamma, epsilon, cs.poles,
            cs.convergence_abscissa, cs.fe_center, cs.description,
        )
    return cs


# --------------------------------------------------------------------------
# Dirichlet-route evaluation
# --------------------------------------------------------------------------


def eval_dirichlet(
    cs: CompletedSeries, s: complex, margin: float = 0.5
) -> DirichletValue:
    """Truncated sum_{n <= N} a_n n^{-s} with a reported tail bound."""
    sigma = np.real(s)
    if sigma <= cs.convergence_abscissa + margin:
        raise OutsideHalfPlaneError(
            f"Re(s)={sigma} not beyond abscissa {cs.convergence_abscissa} + "
            f"margin {margin}"
        )
    n = np.arange(1, len(cs.coeffs) + 1, dtype=float)
    a = cs.coeffs.as_array()
    value = complex(np.sum(a * n ** (-complex(s))))
    # |a_n| <= K n^{abscissa - 1 + delta}; integrate the tail
    delta = 0.05
    theta = cs.convergence_abscissa - 1.0 + delta
    K = float(np.max(np.abs(a) / n**theta)) if len(a) else 0.0
    N = len(cs.coeffs)
    tail = K * N ** (theta + 1.0 - sigma) / (sigma - theta - 1.0)
    return DirichletValue(value, float(tail))


# --------------------------------------------------------------------------
# Smoothed (incomplete-gamma) evaluation in the strip
# --------------------------------------------------------------------------


def _is_gamma_r_shape(g: GammaFactor) -> bool:
    return len(g.factors) == 1 and abs(g.factors[0][0] - 0.5) < 1e-12 and g.factors[0][1] == 0


def _is_gamma_c_shape(g: GammaFactor) -> bool:
    return len(g.factors) == 1 and abs(g.factors[0][0] - 1.0) < 1e-12 and g.factors[0][1] == 0


def _atom_count(max_abs_s: float, xscale: float, tol: float) -> int:
    """Terms needed so exp(-x_n) atoms fall below tol with an |s| margin."""
    target = -math.log(tol) + 0.75 * max_abs_s + 12.0
    return max(4, int(math.ceil(target / xscale)))


def eval_completed_smoothed(cs: CompletedSeries, s, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Completed value gamma(s) * L(s) everywhere in the strip (vectorized).

    Two-sided incomplete-gamma expansion: every coefficient contributes an
    atom on both sides of the functional equation, plus explicit terms for
    the declared (simple) poles.  Implemented for the two shipped gamma
    shapes: Gamma_R (theta weight 1/2, xi(Q,s)) and Gamma_C (weight 1,
    Lambda(E,s)).
    """
    scalar = np.isscalar(s) or np.asarray(s).ndim == 0
    ss = np.atleast_1d(np.asarray(s, dtype=complex))

    for p in cs.poles:
        if np.any(np.abs(ss - p.location) < 1e-6):
            raise PoleProximityError(f"s within 1e-6 of declared pole {p.location}")

    a = cs.coeffs.as_array()
    q = cs.gamma.conductor
    eps = cs.epsilon
    smax = float(np.max(np.abs(ss)))
    tol = policy.tol

    if _is_gamma_r_shape(cs.gamma):
        if abs(cs.fe_center - 0.5) > 1e-12:
            raise NotImplementedError("Gamma_R smoothing assumes fe_center = 1/2")
        # atoms Gamma(s/2, n^2/q); x_n = n^2/q
        nmax = max(4, int(math.ceil(math.sqrt((12.0 + 0.75 * smax - math.log(tol)) * q))))
        nmax = min(nmax, len(cs.coeffs))
        n = np.arange(1, nmax + 1, dtype=float)
        x = (n * n) / q
        an = a[:nmax]

        def side(sv):
            # sum_n a_n q^{s/2} n^{-s} Gamma(s/2, n^2/q)
            inc = incomplete_gamma_upper(sv[:, None] / 2.0, x[None, :], policy)
            pw = np.exp(
                (sv[:, None] / 2.0) * math.log(q) - sv[:, None] * np.log(n)[None, :]
            )
            return np.sum(an[None, :] * pw * inc, axis=1)

        total = side(ss) + eps * side(1.0 - ss)
        for p in cs.poles:
            if p.multiplicity != 1:
                raise NotImplementedError("smoothed pole terms cover simple poles")
            total = total + p.principal_coeffs[0] / (ss - p.location)
        total = total * cs.gamma.prefactor
        return total[0] if scalar else total.reshape(np.shape(s))

    if _is_gamma_c_shape(cs.gamma):
        xscale = 1.0 / math.sqrt(q)
        nmax = min(_atom_count(smax, xscale, tol), len(cs.coeffs))
        n = np.arange(1, nmax + 1, dtype=float)
        x = n / math.sqrt(q)
        an = a[:nmax]
        two_center = 2.0 * cs.fe_center

        def side(sv):
            inc = incomplete_gamma_upper(sv[:, None], x[None, :], policy)
            pw = np.exp(
                (sv[:, None] / 2.0) * math.log(q) - sv[:, None] * np.log(n)[None, :]
            )
            return np.sum(an[None, :] * pw * inc, axis=1)

        total = side(ss) + eps * side(two_center - ss)
        if cs.poles:
            raise NotImplementedError("no pole terms implemented for Gamma_C shape")
        total = total * cs.gamma.prefactor
        return total[0] if scalar else total.reshape(np.shape(s))

    raise NotImplementedError(
        "smoothed evaluation is implemented for the shipped shapes "
        "Gamma_R (xi) and Gamma_C (Lambda)"
    )


def fe_residual(cs: CompletedSeries, s: complex, policy: PrecisionPolicy = DEFAULT_POLICY) -> float:
    """| Lhat(s) - epsilon * conj(Lhat(2 c - conj(s))) |."""
    left = eval_completed_smoothed(cs, s, policy)
    mirror = eval_completed_smoothed(cs, 2.0 * cs.fe_center - np.conj(s), policy)
    return float(np.abs(left - cs.epsilon * np.conj(mirror)))


def fit_epsilon(cs: CompletedSeries, probes=(0.37 + 1.3j, 0.11 + 2.6j)) -> float:
    """Pick epsilon in {+1, -1} minimizing the functional-equation residual."""
    base = CompletedSeries(
        cs.coeffs, cs.gamma, 1.0, cs.poles,
        cs.convergence_abscissa, cs.fe_center, cs.description,
    )
    sc = cs.fe_center
    pts = [sc + p for p in probes]
    left = np.array([eval_completed_smoothed(base, s) for s in pts])
    mirror = np.array(
        [np.conj(eval_completed_smoothed(base, 2 * sc - np.conj(s))) for s in pts]
    )
    r_plus = float(np.sum(np.abs(left - mirror)))
    r_minus = float(np.sum(np.abs(left + mirror)))
    return 1.0 if r_plus <= r_minus else -1.0


# --------------------------------------------------------------------------
# Stable log-form evaluators for contour work
# --------------------------------------------------------------------------

_BERNOULLI = [
    1.0 / 6,
    -1.0 / 30,
    1.0 / 42,
    -1.0 / 30,
    5.0 / 66,
    -691.0 / 2730,
    7.0 / 6,
    -3617.0 / 510,
    43867.0 / 798,
    -174611.0 / 330,
    854513.0 / 138,
    -236364091.0 / 2730,
]


def _zeta_em_right(ss: np.ndarray) -> np.ndarray:
    """Euler-Maclaurin sum for Re(s) >= -1 (array of complex)."""
    N = max(48, int(0.9 * float(np.max(np.abs(ss.imag)))) if len(ss) else 48)
    n = np.arange(1, N, dtype=float)
    total = np.sum(n[None, :] ** (-ss[:, None]), axis=1)
    total = total + N ** (1.0 - ss) / (ss - 1.0) + 0.5 * N ** (-ss)
    # correction sum_{k>=1} B_{2k}/(2k)! * (s)_{2k-1} * N^{-s-2k+1}
    poch = ss.copy()  # (s)_{1} = s
    fact = 1.0
    for k, B in enumerate(_BERNOULLI, start=1):
        fact *= (2 * k - 1) * (2 * k)
        total = total + (B / fact) * poch * N ** (-ss - 2 * k + 1)
        poch = poch * (ss + 2 * k - 1) * (ss + 2 * k)
    return total


def zeta_em(s):
    """Riemann zeta, vectorized: Euler-Maclaurin on Re(s) >= -1, reflected
    through the functional equation on the left.  ~1e-13 for |Im s| <~ 200.

    The N^{1-s}/(s-1) term carries the pole exactly, so evaluation near
    s = 1 is stable; s = 1 itself raises PoleError.
    """
    scalar = np.isscalar(s) or np.asarray(s).ndim == 0
    ss = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(np.abs(ss - 1.0) < 1e-14):
        raise PoleError("zeta pole at s = 1")
    out = np.empty_like(ss)
    right = ss.real >= -1.0
    if np.any(right):
        out[right] = _zeta_em_right(ss[right])
    if np.any(~right):
        # zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1-s) zeta(1-s)
        from .specfun import _log_sin_pi  # stable log of sin

        zl = ss[~right]
        chi = np.exp(
            zl * math.log(2.0)
            + (zl - 1.0) * math.log(math.pi)
            + _log_sin_pi(zl / 2.0)
            + log_gamma(1.0 - zl)
        )
        out[~right] = chi * _zeta_em_right(1.0 - zl)
    return out[0] if scalar else out.reshape(np.shape(s))


def curve_l_evaluator(curve: EllipticCurveData, prime_bound: int = 10**4, coeff_len: int = 256):
    """Stable L(E, u) valid on Re(u) >= 3 for any height (Euler product) and
    in the band |Im u| <= ~22 for any Re(u) (smoothed completed quotient)."""
    lam = curve_lambda_series(curve, coeff_len)
    plist = np.array(primes_upto(prime_bound), dtype=float)
    ap_arr = []
    from .arith import count_points_ap

    for p in primes_upto(prime_bound):
        if curve.conductor % p == 0:
            ap_arr.append(0.0)
        else:
            ap_arr.append(float(count_points_ap(curve, p)))
    ap_arr = np.array(ap_arr)
    good = np.array([curve.conductor % int(p) != 0 for p in plist])
    bad_terms = [
        (float(p), [float(c) for c in curve.bad_factors[int(p)]])
        for p in plist[~good]
    ]
    gp = plist[good]
    gap = ap_arr[good]

    def euler(u):
        uu = np.atleast_1d(np.asarray(u, dtype=complex))
        x = gp[None, :] ** (-uu[:, None])
        local = 1.0 - gap[None, :] * x + gp[None, :] * x * x
        logl = -np.sum(np.log(local), axis=1)
        for p, poly in bad_terms:
            xb = p ** (-uu)
            fac = poly[0] + (poly[1] * xb if len(poly) > 1 else 0.0)
            logl = logl - np.log(fac)
        return np.exp(logl)

    def smoothed(u):
        uu = np.atleast_1d(np.asarray(u, dtype=complex))
        lam_val = eval_completed_smoothed(lam, uu)
        return lam_val / np.exp(lam.gamma.log_eval(uu))

    def evaluate(u):
        scalar = np.isscalar(u) or np.asarray(u).ndim == 0
        uu = np.atleast_1d(np.asarray(u, dtype=complex))
        out = np.empty_like(uu)
        right = uu.real >= 3.0
        if np.any(right):
            out[right] = euler(uu[right])
        if np.any(~right):
            out[~right] = smoothed(uu[~right])
        return out[0] if scalar else out.reshape(np.shape(u))

    evaluate.lambda_series = lam
    return evaluate


# --------------------------------------------------------------------------
# Product assembly
# --------------------------------------------------------------------------


class ProductEvaluator:
    """Evaluator s -> prod_i f_i(scale_i s + shift_i)^{power_i}.

    Declared poles of the factors are transported through the affine maps
    and merged (multiplicities scaled by the powers, summed on collision).
    Zero-induced poles of negative-power factors are not declared here;
    they are ingested via zero lists downstream.
    """

    def __init__(self, factors, fe_center=None, epsilon=None, known_zeros=()):
        self.factors = list(factors)
        self.fe_center = fe_center
        merged: dict = {}
        eps = 1.0
        for cs, shift, scale, power in self.factors:
            if power == 0 or scale <= 0:
                raise ValueError("power must be nonzero and scale positive")
            eps *= cs.epsilon ** abs(power)
            for p in cs.poles:
                loc = (p.location - shift) / scale
                key = complex(np.round(loc.real, 12) + 1j * np.round(loc.imag, 12))
                merged[key] = merged.get(key, 0) + p.multiplicity * power
        self.epsilon = epsilon if epsilon is not None else eps
        self.pole_markers = tuple(
            (loc, m) for loc, m in sorted(merged.items(), key=lambda kv: kv[0].real)
            if m > 0
        )
        for z in known_zeros:
            for loc, _m in self.pole_markers:
                if abs(z - loc) < 1e-9:
                    warnings.warn(
                        f"pole at {loc} collides with declared zero {z}; "
                        "resolution is the caller's responsibility",
                        PoleZeroCollisionWarning,
                    )

    @property
    def pole_strip_halfwidth(self) -> float:
        if not self.pole_markers:
            return 0.0
        c = self.fe_center if self.fe_center is not None else 0.5
        return max(abs(loc.real - c) for loc, _ in self.pole_markers)

    def __call__(self, s, policy: PrecisionPolicy = DEFAULT_POLICY):
        scalar = np.isscalar(s) or np.asarray(s).ndim == 0
        ss = np.atleast_1d(np.asarray(s, dtype=complex))
        out = np.ones_like(ss)
        for cs, shift, scale, power in self.factors:
            vals = eval_completed_smoothed(cs, scale * ss + shift, policy)
            out = out * vals**power
        return out[0] if scalar else out.reshape(np.shape(s))


def assemble_product(factors, fe_center=None, epsilon=None, known_zeros=()) -> ProductEvaluator:
    """Build the evaluator for prod f_i(scale_i s + shift_i)^{power_i}.

    factors: iterable of (CompletedSeries, shift, scale, power).  An empty
    list yields the constant-1 evaluator.
    """
    return ProductEvaluator(factors, fe_center, epsilon, known_zeros)


# --------------------------------------------------------------------------
# Expected-analytic-shape diagnostics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalyticShapeReport:
    abscissa_estimate: float
    nominal_abscissa: float
    pole_strip_halfwidth: float
    epsilon_modulus: float
    logderiv_bounded: bool
    logderiv_max_ratio: float
    vertical_growth_slope: float
    notes: str


def shape_check(cs: CompletedSeries) -> AnalyticShapeReport:
    """Empirical convergence abscissa, pole strip, sign modulus and the
    log-derivative growth check; the vertical growth number is heuristic
    (one line only) and says nothing rigorous about order-one growth."""
    a = cs.coeffs.as_array()
    n = np.arange(1, len(a) + 1, dtype=float)
    nz = (np.abs(a) > 0) & (n > 1)
    if not np.any(nz):
        absc = float("-inf")
    else:
        absc = 1.0 + float(np.max(np.log(np.abs(a[nz])) / np.log(n[nz])))
        absc = max(absc, 1.0)
    nominal = round(2 * absc) / 2 if math.isfinite(absc) else absc

    # von-Mangoldt-type coefficients of -L'/L via a_n log n = sum_{d|n} c_d a_{n/d}
    N = min(len(a), 512)
    c = np.zeros(N + 1)
    for m in range(2, N + 1):
        acc = a[m - 1] * math.log(m)
        for d in range(2, m):
            if m % d == 0:
                acc -= c[d] * a[m // d - 1]
        c[m] = acc
    theta = (absc if math.isfinite(absc) else 1.0) - 1.0
    grid = np.arange(2, N + 1, dtype=float)
    bound = 2.0 * grid**theta * np.log(grid) + 1e-9
    ratios = np.abs(c[2:]) / bound
    logderiv_max = float(np.max(ratios)) if len(ratios) else 0.0
    logderiv_ok = logderiv_max <= 1.0 + 1e-6

    # heuristic growth along one vertical line
    try:
        ts = np.array([4.0, 8.0, 12.0, 16.0])
        vals = np.abs(
            eval_completed_smoothed(cs, cs.convergence_abscissa + 1.0 + 1j * ts)
        )
        vals = np.maximum(vals, 1e-290)
        slope = float(np.polyfit(ts * np.log(ts + 1), np.log(vals), 1)[0])
    except Exception:
        slope = float("nan")
    return AnalyticShapeReport(
        abscissa_estimate=absc,
        nominal_abscissa=nominal,
        pole_strip_halfwidth=cs.pole_strip_halfwidth,
        epsilon_modulus=float(abs(cs.epsilon)),
        logderiv_bounded=logderiv_ok,
        logderiv_max_ratio=logderiv_max,
        vertical_growth_slope=slope,
        notes="vertical growth sampled on one line only (heuristic)",
    )
