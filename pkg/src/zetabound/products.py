"""Assembled zeta products of an elliptic curve over Q.

Two working products are shipped, both centered at s = 1/2:

* paper_product:  xi(Q,s)^2 * D(s)  with  D(s) = sum_m c2_m (m^2)^{-s}
  the Dirichlet series of zeta(C,2s)^2.  This is the product whose inverse
  Mellin transform has the divisor-sum K_0 expansion with atoms K_0(2 pi n x)
  starting at n = 1, so its boundary function carries O(1) structure on the
  window [e^-3, e^3].  The trade-off: its functional equation is broken by
  the multiplicative defect A(E)^{2-4s} (conductor and rational gamma-quotient
  of the completion are dropped).  The Dirichlet support is folded onto the
  squares m^2, which is the self-consistent resolution of the m-vs-m^2
  scaling ambiguity (route B then equals route A exactly by the Mellin
  shift law).

* completed_product:  xi(Q,s)^2 xi(Q,2s)^2 xi(Q,2s-1)^2 / Lambda(E,2s)^2,
  the honest completion with Z(s) = Z(1-s) exactly.  Its boundary structure
  lives at the conductor scales x ~ A^{-2} and A^{+2}; the spectral
  expansion and the convolution identities are exact for this product.

Pole markers (location, multiplicity): paper {0:4, 1/2:2, 1:4},
completed {0:4, 1/2:4, 1:4}; both gain double poles at (1 +- i gamma)/2
for every zero 1 +- i gamma of Lambda(E, .).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import (
    EllipticCurveData,
    dirichlet_square,
    zeta_C_coefficients,
)
from .lfunc import (
    CompletedSeries,
    assemble_product,
    curve_l_evaluator,
    curve_lambda_series,
    eval_completed_smoothed,
    riemann_xi_series,
    zeta_em,
)
from .specfun import GAMMA_C, GAMMA_R, log_gamma

__all__ = [
    "AssembledProduct",
    "paper_product",
    "completed_product",
    "convolutor_mellin_literal",
    "convolutor_mellin_exact",
    "w0_mellin",
]


@dataclass
class AssembledProduct:
    """Evaluator bundle for one assembled product.

    contour_eval(s)   -- stable on vertical lines with Re(s) >= 1.6 (any height)
    analytic_eval(s)  -- valid near the real axis anywhere in the strip
                         (|Im s| <= ~10), used for principal parts
    b_support, b_values -- Dirichlet coefficients of the non-gamma part,
                         every affine rescale folded into the support
    """

    name: str
    curve: EllipticCurveData
    epsilon: float
    fe_center: float
    pole_markers: tuple  # ((location, multiplicity), ...)
    b_support: np.ndarray
    b_values: np.ndarray
    contour_eval: object
    analytic_eval: object
    coeff_len: int

    def __call__(self, s):
        return self.contour_eval(s)


def _xi_log_stable(s):
    """log xi(Q,s) = log Gamma_R(s) + log zeta(s); stable on vertical lines."""
    return GAMMA_R.log_eval(s) + np.log(zeta_em(s))


def paper_product(curve: EllipticCurveData, coeff_len: int = 10**4) -> AssembledProduct:
    """xi(Q,s)^2 * sum_m c2_m (m^2)^{-s}, truncated at support <= coeff_len."""
    M = int(math.isqrt(coeff_len))
    c2 = dirichlet_square(zeta_C_coefficients(curve, M))
    support = np.arange(1, M + 1, dtype=float) ** 2
    values = c2.as_array()
    xi = riemann_xi_series(64)
    log_support = np.log(support)
    lev = curve_l_evaluator(curve)

    def dirichlet_part(ss):
        return np.sum(
            values[None, :] * np.exp(-ss[:, None] * log_support[None, :]), axis=1
        )

    def contour_eval(s):
        scalar = np.isscalar(s) or np.asarray(s).ndim == 0
        ss = np.atleast_1d(np.asarray(s, dtype=complex))
        out = np.exp(2.0 * _xi_log_stable(ss)) * dirichlet_part(ss)
        return out[0] if scalar else out.reshape(np.shape(s))

    def analytic_eval(s):
        # xi(Q,s)^2 * zeta(C,2s)^2 with the quotient evaluated analytically
        scalar = np.isscalar(s) or np.asarray(s).ndim == 0
        ss = np.atleast_1d(np.asarray(s, dtype=complex))
        xi2 = eval_completed_smoothed(xi, ss) ** 2
        u = 2.0 * ss
        zc = zeta_em(u) * zeta_em(u - 1.0) / lev(u)
        out = xi2 * zc**2
        return out[0] if scalar else out.reshape(np.shape(s))

    return AssembledProduct(
        name="paper",
        curve=curve,
        epsilon=1.0,
        fe_center=0.5,
        pole_markers=((0.0, 4), (0.5, 2), (1.0, 4)),
        b_support=support,
        b_values=values,
        contour_eval=contour_eval,
        analytic_eval=analytic_eval,
        coeff_len=coeff_len,
    )


def completed_product(curve: EllipticCurveData, coeff_len: int = 10**4) -> AssembledProduct:
    """xi(Q,s)^2 xi(Q,2s)^2 xi(Q,2s-1)^2 / Lambda(E,2s)^2 (exact FE)."""
    A = float(curve.conductor)
    M = int(math.isqrt(max(1, coeff_len // curve.conductor**2)))
    M = max(M, 4)
    c2 = dirichlet_square(zeta_C_coefficients(curve, M))
    support = (A * np.arange(1, M + 1, dtype=float)) ** 2
    values = c2.as_array()

    lev = curve_l_evaluator(curve)
    lam = lev.lambda_series
    xi = riemann_xi_series(64)

    def log_lambda_gamma(u):
        return 0.5 * u * math.log(A) + GAMMA_C.log_eval(u)

    def contour_eval(s):
        scalar = np.isscalar(s) or np.asarray(s).ndim == 0
        ss = np.atleast_1d(np.asarray(s, dtype=complex))
        u = 2.0 * ss
        logs = (
            2.0 * _xi_log_stable(ss)
            + 2.0 * _xi_log_stable(u)
            + 2.0 * _xi_log_stable(u - 1.0)
            - 2.0 * log_lambda_gamma(u)
        )
        out = np.exp(logs) / lev(u) ** 2
        return out[0] if scalar else out.reshape(np.shape(s))

    def analytic_eval(s):
        scalar = np.isscalar(s) or np.asarray(s).ndim == 0
        ss = np.atleast_1d(np.asarray(s, dtype=complex))
        u = 2.0 * ss
        xi_s = eval_completed_smoothed(xi, ss)
        xi_u = eval_completed_smoothed(xi, u)
        xi_um1 = eval_completed_smoothed(xi, u - 1.0)
        lam_u = eval_completed_smoothed(lam, u)
        out = (xi_s * xi_u * xi_um1 / lam_u) ** 2
        return out[0] if scalar else out.reshape(np.shape(s))

    return AssembledProduct(
        name="completed",
        curve=curve,
        epsilon=1.0,
        fe_center=0.5,
        pole_markers=((0.0, 4), (0.5, 4), (1.0, 4)),
        b_support=support,
        b_values=values,
        contour_eval=contour_eval,
        analytic_eval=analytic_eval,
        coeff_len=coeff_len,
    )


def completed_product_smoothed(curve: EllipticCurveData):
    """The same completed product via lfunc.assemble_product (smoothed
    factors); cross-checks contour_eval at small heights."""
    xi = riemann_xi_series(128)
    lam = curve_lambda_series(curve, 512)
    return assemble_product(
        [(xi, 0.0, 1.0, 2), (xi, 0.0, 2.0, 2), (xi, -1.0, 2.0, 2), (lam, 0.0, 2.0, -2)],
        fe_center=0.5,
    )


# --------------------------------------------------------------------------
# Mellin transforms of the convolutors (section "v * h_C = 0" machinery)
# --------------------------------------------------------------------------


def convolutor_mellin_literal(curve: EllipticCurveData):
    """M(v)(s) = Lambda(E, 2s) * s (s - 1), the paper's printed convolutor.

    Its zeros kill the transported outer Dedekind poles {0, 1} and (through
    Lambda) every zero-induced pole to first order; it does NOT vanish at
    the center pole s = 1/2 of the assembled products (Lambda(E,1) != 0 for
    a rank-0 curve), which is a documented defect of the printed formula.
    """
    lev = curve_l_evaluator(curve)
    A = float(curve.conductor)

    def mellin(s):
        scalar = np.isscalar(s) or np.asarray(s).ndim == 0
        ss = np.atleast_1d(np.asarray(s, dtype=complex))
        poly = ss * (ss - 1.0)
        out = np.zeros_like(ss)
        live = np.abs(poly) > 1e-14  # Lambda is finite wherever we evaluate
        if np.any(live):
            u = 2.0 * ss[live]
            lam = np.exp(0.5 * u * math.log(A) + GAMMA_C.log_eval(u)) * lev(u)
            out[live] = lam * poly[live]
        return out[0] if scalar else out.reshape(np.shape(s))

    return mellin


def convolutor_mellin_exact(curve: EllipticCurveData):
    """M(v)(s) = Lambda(E,2s)^2 * s^4 (s-1/2)^4 (s-1)^4 * [extra pairs].

    Against the completed product Z(s) = N(s)/Lambda(E,2s)^2 this makes
    M(v) * Z entire: the polynomial kills the Dedekind poles {0,1/2,1} to
    their full multiplicity 4 and Lambda^2 matches the double zero-induced
    poles, so v * h = 0 holds exactly (not only formally).

    The extra symmetric pairs (s+1/2)(s-3/2) and (s+1)(s-2), squared, cancel
    the first poles of Gamma_C(2s)^2 left of the strip; without them v would
    decay only like x^{1/2} as x -> 0 and the discrete convolution would
    drag a long tail.  Any symmetric polynomial with the required zeros is
    an equally valid convolutor; this one is chosen for grid economy.
    """
    lev = curve_l_evaluator(curve)
    A = float(curve.conductor)

    def mellin(s):
        scalar = np.isscalar(s) or np.asarray(s).ndim == 0
        ss = np.atleast_1d(np.asarray(s, dtype=complex))
        poly = (
            ss**4
            * (ss - 0.5) ** 4
            * (ss - 1.0) ** 4
            * ((ss + 0.5) * (ss - 1.5)) ** 2
            * ((ss + 1.0) * (ss - 2.0)) ** 2
        )
        out = np.zeros_like(ss)
        live = np.abs(poly) > 1e-30
        if np.any(live):
            u = 2.0 * ss[live]
            lam = np.exp(0.5 * u * math.log(A) + GAMMA_C.log_eval(u)) * lev(u)
            out[live] = lam**2 * poly[live]
        return out[0] if scalar else out.reshape(np.shape(s))

    return mellin


def w0_mellin(curve: EllipticCurveData):
    """M(w0)(s) = A^s Gamma_C(s)^2 s^4 (s-2)^4 (s-1)^2 (centered at 1).

    Vanishes identically at s in {0, 1, 2}: the s^4 overkills the double
    pole of Gamma_C(s)^2 at 0, and the polynomial zeros handle 1 and 2.
    """
    A = float(curve.conductor)

    def mellin(s):
        scalar = np.isscalar(s) or np.asarray(s).ndim == 0
        ss = np.atleast_1d(np.asarray(s, dtype=complex))
        out = np.empty_like(ss)
        # Gamma_C(s)^2 has poles at nonpositive integers; the polynomial
        # makes the product vanish at 0 (and analytic elsewhere on our paths)
        near0 = np.abs(ss) < 1e-9
        ok = ~near0
        if np.any(ok):
            sv = ss[ok]
            out[ok] = (
                np.exp(sv * math.log(A) + 2.0 * GAMMA_C.log_eval(sv))
                * sv**4
                * (sv - 2.0) ** 4
                * (sv - 1.0) ** 2
            )
        out[near0] = 0.0
        return out[0] if scalar else out.reshape(np.shape(s))

    return mellin


# --------------------------------------------------------------------------
# Laurent data at the zero-induced poles (1 +- i gamma)/2
#
# The completed values near a high zero are ~exp(-pi gamma / 2), far below
# double precision noise, so the Laurent coefficients are computed with
# mpmath at a gamma-adaptive precision via Cauchy-circle derivatives; the
# results themselves are tiny floats and perfectly representable.
# --------------------------------------------------------------------------

import mpmath as mp

from .arith import l_coefficients
from .lfunc import PoleDatum

_MP_CACHE: dict = {}


def _mp_lambda_factory(curve: EllipticCurveData, dps: int, nterms: int):
    """mpmath Lambda(E, s) via the two-sided incomplete-gamma sums."""
    key = ("lam", curve.label, dps, nterms)
    if key in _MP_CACHE:
        return _MP_CACHE[key]
    coeffs = l_coefficients(curve, nterms)
    a = [int(coeffs[n]) for n in range(1, nterms + 1)]
    A = mp.mpf(curve.conductor)
    root = mp.sqrt(A)

    def lam(s):
        s = mp.mpc(s)
        total = mp.mpc(0)
        for n in range(1, nterms + 1):
            if a[n - 1] == 0:
                continue
            x = 2 * mp.pi * n / root
            sc = root / (2 * mp.pi * n)
            total += a[n - 1] * (
                sc**s * mp.gammainc(s, x, mp.inf)
                + sc ** (2 - s) * mp.gammainc(2 - s, x, mp.inf)
            )
        return 2 * total

    _MP_CACHE[key] = lam
    return lam


def _mp_xi(s):
    s = mp.mpc(s)
    return mp.pi ** (-s / 2) * mp.gamma(s / 2) * mp.zeta(s)


def _cauchy_derivs(func, center, radius, nodes=24):
    """(f(c), f'(c), f''(c)) by trapezoid on a circle (no cancellation)."""
    f0 = mp.mpc(0)
    f1 = mp.mpc(0)
    f2 = mp.mpc(0)
    for k in range(nodes):
        w = mp.expjpi(2 * mp.mpf(k) / nodes)
        fv = func(center + radius * w)
        f0 += fv
        f1 += fv / w
        f2 += fv / w**2
    f0 /= nodes
    f1 /= nodes * radius
    f2 = 2 * f2 / (nodes * radius**2)
    return f0, f1, f2


def zero_pole_datum(product: AssembledProduct, gamma_ord: float) -> PoleDatum:
    """PoleDatum at s0 = (1 + i gamma)/2 for either assembled product.

    Writing Z = N(s)/g(s)^2 with g the denominator vanishing simply at s0:
      C_2 = N0 / g'(s0)^2,   C_1 = (N0' - N0 g''(s0)/g'(s0)) / g'(s0)^2.
    """
    key = ("zp", product.name, product.curve.label, round(float(gamma_ord), 11))
    if key in _MP_CACHE:
        return _MP_CACHE[key]
    curve = product.curve
    dps = max(25, int(15 + 0.75 * gamma_ord))
    nterms = max(64, int((dps * 2.31 + 1.6 * gamma_ord) / (2 * math.pi / math.sqrt(curve.conductor))) + 8)
    with mp.workdps(dps):
        lam = _mp_lambda_factory(curve, dps, nterms)
        A = mp.mpf(curve.conductor)
        rho = mp.mpc(1, gamma_ord)
        s0 = rho / 2

        if product.name == "completed":
            def numer(s):
                return (_mp_xi(s) * _mp_xi(2 * s) * _mp_xi(2 * s - 1)) ** 2

            def denom(s):
                return lam(2 * s)

        elif product.name == "paper":
            def gamma_c(u):
                return 2 * (2 * mp.pi) ** (-u) * mp.gamma(u)

            def lfun(u):
                return lam(u) / (A ** (u / 2) * gamma_c(u))

            def numer(s):
                return (_mp_xi(s) * mp.zeta(2 * s) * mp.zeta(2 * s - 1)) ** 2

            def denom(s):
                return lfun(2 * s)

        else:
            raise ValueError(f"unknown product {product.name!r}")

        n0, n1, _ = _cauchy_derivs(numer, s0, mp.mpf(1) / 16, nodes=24)
        _, g1, g2 = _cauchy_derivs(denom, s0, mp.mpf(1) / 16, nodes=24)
        c2 = n0 / g1**2
        c1 = (n1 - n0 * g2 / g1) / g1**2
        return PoleDatum(complex(s0), 2, (complex(c1), complex(c2)))


def spectral_pole_data(product: AssembledProduct, zeros, count: int,
                       dedekind_radius: float = 0.04) -> list:
    """Route-C input: Dedekind-part poles (circle quadrature on the analytic
    evaluator) plus the first `count` zero-induced poles (Im > 0 only; the
    spectral route symmetrizes conjugate pairs)."""
    from .boundary import principal_part

    key = ("poles", product.name, product.curve.label, count, tuple(zeros.ordinates[:count]))
    if key in _MP_CACHE:
        return _MP_CACHE[key]
    out = []
    locations = [loc for loc, _m in product.pole_markers]
    for loc, mult in product.pole_markers:
        others = [l for l in locations if l != loc]
        out.append(
            principal_part(
                product.analytic_eval, loc, mult,
                radius=dedekind_radius, nodes=64, other_singularities=others,
            )
        )
    for g in zeros.ordinates[:count]:
        out.append(zero_pole_datum(product, float(g)))
    _MP_CACHE[key] = out
    return out
