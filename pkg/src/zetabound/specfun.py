"""Gamma-family and Bessel-family special functions with quantified accuracy.

Everything here is a pure function of its arguments.  The gamma and
incomplete-gamma routines broadcast over numpy arrays because the
completed-zeta evaluators upstream feed them whole contours at once.

Accuracy is governed by a PrecisionPolicy; the default (1e-12 abs / 1e-12
rel) leaves several orders of headroom over the 1e-6 .. 1e-4 tolerances
used by the verification suites.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PrecisionPolicy",
    "DEFAULT_POLICY",
    "PoleError",
    "PrecisionError",
    "DecayUnderflow",
    "GammaFactor",
    "GAMMA_R",
    "GAMMA_C",
    "log_gamma",
    "gamma",
    "gamma_factor_eval",
    "bessel_k",
    "bessel_k0_many",
    "incomplete_gamma_upper",
    "divisor_sigma",
]

EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class PrecisionPolicy:
    """Error goals for series/quadrature truncation.

    target_abs_tol / target_rel_tol are goals, not certified bounds; the
    routines raise PrecisionError when their term budget is exhausted
    before the stopping criterion is met.
    """

    target_abs_tol: float = 1e-12
    target_rel_tol: float = 1e-12
    max_terms: int = 10**6

    def __post_init__(self):
        if not (self.target_abs_tol > 0 and self.target_rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")

    @property
    def tol(self) -> float:
        return min(self.target_abs_tol, self.target_rel_tol)


DEFAULT_POLICY = PrecisionPolicy()


class PoleError(ValueError):
    """Evaluation requested at (or too close to) a pole of the function."""


class PrecisionError(RuntimeError):
    """Term budget exhausted before the accuracy goal was met."""


class DecayUnderflow(UserWarning):
    """Result decayed below the representable range and was returned as exact 0."""


# --------------------------------------------------------------------------
# log Gamma: fixed-coefficient rational (Lanczos) approximation on Re >= 1/2,
# extended by the reflection formula.  Coefficients frozen here; they can be
# regenerated with tools/regen_lanczos.py (Godfrey's method, mpmath).
# --------------------------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS_C = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
# Empirical relative accuracy floor of the frozen coefficient set.
_LANCZOS_FLOOR = 5e-14

_LOG_SQRT_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _is_nonpositive_integer(z: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    near = np.round(z.real)
    return (np.abs(z - near) < tol) & (near <= 0)


def _log_gamma_lanczos(z):
    """Principal log Gamma for Re(z) >= 0.5 (vectorized)."""
    zm1 = z - 1.0
    x = np.full_like(z, _LANCZOS_C[0])
    for i in range(1, len(_LANCZOS_C)):
        x = x + _LANCZOS_C[i] / (zm1 + i)
    t = zm1 + _LANCZOS_G + 0.5
    return _LOG_SQRT_TWO_PI + (zm1 + 0.5) * np.log(t) - t + np.log(x)


def _log_sin_pi(z):
    """log sin(pi z), stable for large |Im z| (vectorized).

    Branch is chosen so the value is real on the real interval (0, 1) and
    conjugate-symmetric; exp() of the result is always exact.
    """
    z = np.asarray(z, dtype=complex)
    upper = z.imag >= 0
    zu = np.where(upper, z, np.conj(z))
    # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}), |e^{2 i pi z}| <= 1 here
    val = (
        (-math.log(2.0) + 0.5j * math.pi)
        - 1j * math.pi * zu
        + np.log1p(-np.exp(2j * math.pi * zu))
    )
    return np.where(upper, val, np.conj(val))


def log_gamma(z, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Principal branch of log Gamma(z).

    Accurate to ~5e-14 relative on Re(z) >= 1/2; continued elsewhere by the
    reflection formula.  Accepts scalars or arrays.
    """
    if policy.tol < _LANCZOS_FLOOR:
        raise PrecisionError(
            f"log_gamma: frozen rational approximation is limited to "
            f"{_LANCZOS_FLOOR:g} relative accuracy"
        )
    scalar = np.isscalar(z) or np.asarray(z).ndim == 0
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    bad = _is_nonpositive_integer(zz)
    if np.any(bad):
        raise PoleError(f"log_gamma pole at nonpositive integer z={zz[bad][0]}")

    out = np.empty_like(zz)
    right = zz.real >= 0.5
    if np.any(right):
        out[right] = _log_gamma_lanczos(zz[right])
    if np.any(~right):
        zl = zz[~right]
        out[~right] = (
            math.log(math.pi) - _log_sin_pi(zl) - _log_gamma_lanczos(1.0 - zl)
        )
    return out[0] if scalar else out.reshape(np.shape(z))


def gamma(z, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Gamma(z) = exp(log_gamma(z))."""
    return np.exp(log_gamma(z, policy))


# --------------------------------------------------------------------------
# Gamma factors q^{s/2} prod_j Gamma(lambda_j s + mu_j)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaFactor:
    """Archimedean factor q^{s/2} * prefactor * prod_j Gamma(lambda_j s + mu_j).

    The two standard atoms:
      Gamma_R(s) = pi^{-s/2} Gamma(s/2)      -> GammaFactor(1/pi, ((0.5, 0),))
      Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s)    -> GammaFactor(1/(4 pi^2), ((1, 0),), 2)
    """

    conductor: float
    factors: tuple  # of (lambda_j, mu_j)
    prefactor: float = 1.0

    def __post_init__(self):
        if self.conductor <= 0:
            raise ValueError("conductor q must be positive")
        for lam, _mu in self.factors:
            if not lam > 0:
                raise ValueError("every lambda_j must be positive")

    def log_eval(self, s, policy: PrecisionPolicy = DEFAULT_POLICY):
        """log of the factor (principal combination), vectorized."""
        s = np.asarray(s, dtype=complex)
        total = 0.5 * s * math.log(self.conductor) + math.log(self.prefactor)
        for j, (lam, mu) in enumerate(self.factors):
            arg = lam * s + mu
            argc = np.atleast_1d(arg)
            if np.any(_is_nonpositive_integer(argc)):
                raise PoleError(f"gamma factor {j}: Gamma pole at argument {arg}")
            total = total + log_gamma(arg, policy)
        return total


GAMMA_R = GammaFactor(1.0 / math.pi, ((0.5, 0.0),))
GAMMA_C = GammaFactor(1.0 / (4.0 * math.pi**2), ((1.0, 0.0),), prefactor=2.0)


def gamma_factor_eval(descriptor: GammaFactor, s, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Evaluate q^{s/2} prod_j Gamma(lambda_j s + mu_j) (vectorized)."""
    return np.exp(descriptor.log_eval(s, policy))


# --------------------------------------------------------------------------
# Modified Bessel K_nu on the positive axis, real order.
#
# Branch plan (see ledger): ascending series for x <= 2; the cosh-integral
# quadrature on 2 < x < 30 (the divergent asymptotic series cannot reach
# 1e-12 there for moderate orders); asymptotic series with first-omitted-term
# bound for x >= 30.  The quadrature doubles as the test oracle everywhere.
# --------------------------------------------------------------------------

_K_SERIES_MAX_X = 2.0
_K_ASYM_MIN_X = 30.0
_K_UNDERFLOW_X = 740.0  # exp(-x) below the denormal range


def _bessel_i_series(nu: float, x: float, policy: PrecisionPolicy) -> float:
    """I_nu(x) by the ascending series, x small, nu real non-negative-ish."""
    xh2 = 0.25 * x * x
    # (x/2)^nu / Gamma(nu+1); reciprocal via exp(-log_gamma) keeps the sign
    # of Gamma(nu+1) for negative non-integer nu.
    rgamma = float(np.real(np.exp(-log_gamma(nu + 1.0))))
    term = math.exp(nu * math.log(0.5 * x)) * rgamma
    total = term
    for k in range(1, policy.max_terms):
        term *= xh2 / (k * (nu + k))
        total += term
        if abs(term) < policy.tol * abs(total):
            return total
    raise PrecisionError("bessel I series did not converge")


def _bessel_k_series_noninteger(nu: float, x: float, policy: PrecisionPolicy) -> float:
    anu = abs(nu)
    i_plus = _bessel_i_series(anu, x, policy)
    i_minus = _bessel_i_series(-anu, x, policy)
    return 0.5 * math.pi * (i_minus - i_plus) / math.sin(math.pi * anu)


def _bessel_k_series_integer(n: int, x: float, policy: PrecisionPolicy) -> float:
    """Ascending series for integer order (Abramowitz-Stegun 9.6.11 shape)."""
    n = abs(n)
    xh = 0.5 * x
    xh2 = xh * xh
    log_xh = math.log(xh)

    # finite part: (1/2) sum_{k=0}^{n-1} (-1)^k (n-k-1)!/k! (x/2)^{2k-n}
    finite = 0.0
    for k in range(n):
        finite += ((-1) ** k) * math.factorial(n - k - 1) / math.factorial(k) * xh2**k
    finite *= 0.5 * xh ** (-n) if n > 0 else 0.0

    # log term and psi series
    psi1 = -EULER_GAMMA  # psi(1)
    psi2 = -EULER_GAMMA + sum(1.0 / j for j in range(1, n + 1))  # psi(n+1)
    term = xh**n / math.factorial(n)  # (x/2)^n / (0! n!)
    total = (psi1 + psi2) * term
    ilike = term
    k = 0
    for k in range(1, policy.max_terms):
        term *= xh2 / (k * (n + k))
        psi1 += 1.0 / k
        psi2 += 1.0 / (n + k)
        contrib = (psi1 + psi2) * term
        total += contrib
        ilike += term
        if abs(contrib) < policy.tol * max(abs(total), 1e-300):
            break
    else:
        raise PrecisionError("bessel K integer series did not converge")

    i_n = _bessel_i_series(float(n), x, policy)
    return ((-1) ** (n + 1)) * log_xh * i_n + finite + ((-1) ** n) * 0.5 * total


def _bessel_k_quad(nu: float, x, policy: PrecisionPolicy, step: float = 0.05):
    """K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt by trapezoid.

    The integrand is even and analytic; trapezoid with step 0.05 is accurate
    to ~exp(-pi^2/step).  Vectorized over x (1-d array).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xmin = float(np.min(x))
    # truncate where x*(cosh T - 1) - |nu| T > -log(tol) + margin
    target = -math.log(policy.tol) + 8.0 + abs(nu) * 4.0
    tcut = math.acosh(1.0 + target / xmin)
    nsteps = int(math.ceil(tcut / step))
    t = step * np.arange(nsteps + 1)
    w = np.full(nsteps + 1, step)
    w[0] *= 0.5
    kernel = np.exp(-np.outer(x, np.cosh(t))) * np.cosh(nu * t)
    return kernel @ w


def _bessel_k_asym(nu: float, x: float, policy: PrecisionPolicy) -> float:
    """Asymptotic expansion with first-omitted-term remainder bound."""
    mu = 4.0 * nu * nu
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (8.0 * x * k)
        if abs(term) < policy.tol:
            break
        if k > 60 or abs(term) > 1.0:
            raise PrecisionError(
                f"bessel K asymptotic series stalls at x={x}, nu={nu}"
            )
        total += term
    return math.sqrt(0.5 * math.pi / x) * math.exp(-x) * total


def bessel_k(nu: float, x: float, policy: PrecisionPolicy = DEFAULT_POLICY) -> float:
    """Modified Bessel K_nu(x), real order, x > 0.

    K is even in nu by construction in every branch.  When x exceeds the
    representable decay range the function returns exact 0.0 and emits a
    DecayUnderflow warning.
    """
    if x <= 0:
        raise ValueError("bessel_k requires x > 0")
    nu = abs(float(nu))
    if x > _K_UNDERFLOW_X:
        warnings.warn(
            f"bessel_k({nu}, {x}): value underflows to zero", DecayUnderflow
        )
        return 0.0
    if x <= _K_SERIES_MAX_X:
        if abs(nu - round(nu)) < 1e-9:
            return _bessel_k_series_integer(int(round(nu)), x, policy)
        return _bessel_k_series_noninteger(nu, x, policy)
    if x >= _K_ASYM_MIN_X:
        try:
            return _bessel_k_asym(nu, x, policy)
        except PrecisionError:
            pass
    return float(_bessel_k_quad(nu, np.array([x]), policy)[0])


def bessel_k0_many(x, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Vectorized K_0 over a positive 1-d array (hot path of the K0 route).

    Underflowing entries come back as exact 0.0 without a warning storm.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("bessel_k0_many requires x > 0")
    out = np.zeros_like(x)
    small = x <= _K_SERIES_MAX_X
    mid = (~small) & (x <= _K_UNDERFLOW_X)
    for i in np.nonzero(small)[0]:
        out[i] = _bessel_k_series_integer(0, float(x[i]), policy)
    if np.any(mid):
        out[mid] = _bessel_k_quad(0.0, x[mid], policy)
    return out


# --------------------------------------------------------------------------
# Upper incomplete gamma for complex s, real x > 0 (broadcasting).
# Series for gamma(s,x) when x is small against |s|; Lentz continued
# fraction otherwise.
# --------------------------------------------------------------------------


def incomplete_gamma_upper(s, x, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt, complex s, x > 0.

    Broadcasts over s and x.  Raises PoleError when the series branch needs
    Gamma(s) at a nonpositive integer.
    """
    s_in, x_in = s, x
    S, X = np.broadcast_arrays(
        np.atleast_1d(np.asarray(s_in, dtype=complex)),
        np.atleast_1d(np.asarray(x_in, dtype=float)),
    )
    if np.any(X <= 0):
        raise ValueError("incomplete_gamma_upper requires x > 0")
    S = S.astype(complex).copy()
    X = X.astype(float).copy()
    out = np.empty(S.shape, dtype=complex)

    use_cf = X >= np.abs(S) + 1.0
    if np.any(use_cf):
        out[use_cf] = _upper_gamma_cf(S[use_cf], X[use_cf], policy)
    if np.any(~use_cf):
        ser = ~use_cf
        out[ser] = _upper_gamma_series(S[ser], X[ser], policy)

    if np.isscalar(s_in) and np.isscalar(x_in):
        return complex(out.reshape(-1)[0])
    return out.reshape(np.broadcast_shapes(np.shape(s_in), np.shape(x_in)))


def _upper_gamma_cf(S, X, policy: PrecisionPolicy):
    """Continued fraction (modified Lentz), valid x >~ |s|."""
    tiny = 1e-290
    b = X + 1.0 - S
    c = np.full(S.shape, 1.0 / tiny, dtype=complex)
    d = 1.0 / np.where(b == 0, tiny, b)
    h = d.copy()
    done = np.zeros(S.shape, dtype=bool)
    max_iter = min(policy.max_terms, 4000)
    for i in range(1, max_iter + 1):
        an = i * (S - i)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done = done | (np.abs(delta - 1.0) < policy.tol)
        if np.all(done):
            break
    else:
        raise PrecisionError("incomplete gamma continued fraction stalled")
    return np.exp(-X + S * np.log(X)) * h


def _upper_gamma_series(S, X, policy: PrecisionPolicy):
    """Gamma(s) - gamma(s,x) with the lower gamma power series."""
    if np.any(_is_nonpositive_integer(S)):
        raise PoleError("incomplete_gamma_upper series branch hit Gamma pole")
    term = 1.0 / S
    total = term.copy()
    done = np.zeros(S.shape, dtype=bool)
    max_iter = min(policy.max_terms, 10000)
    for k in range(1, max_iter + 1):
        term = term * (X / (S + k))
        total = np.where(done, total, total + term)
        done = done | (np.abs(term) < policy.tol * np.maximum(np.abs(total), 1e-300))
        if np.all(done):
            break
    else:
        raise PrecisionError("incomplete gamma series stalled")
    lower = np.exp(-X + S * np.log(X)) * total
    return np.exp(log_gamma(S, policy)) - lower


# --------------------------------------------------------------------------
# Divisor sums
# --------------------------------------------------------------------------


def _factorize(n: int):
    """Trial-division factorization, returns list of (p, e)."""
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out


def divisor_sigma(a, n: int):
    """sigma_a(n) = sum_{d | n} d^a.

    Exact integer arithmetic when a is a nonnegative integer; float otherwise.
    """
    if n < 1:
        raise ValueError("divisor_sigma requires n >= 1")
    if n == 1:
        return 1 if _is_int_exponent(a) else 1.0
    if _is_int_exponent(a):
        ai = int(a)
        result = 1
        for p, e in _factorize(n):
            result *= sum(p ** (i * ai) for i in range(e + 1))
        return result
    result = 1.0
    for p, e in _factorize(n):
        result *= sum(float(p) ** (i * a) for i in range(e + 1))
    return result


def _is_int_exponent(a) -> bool:
    if isinstance(a, (int, np.integer)):
        return a >= 0
    return float(a).is_integer() and a >= 0
