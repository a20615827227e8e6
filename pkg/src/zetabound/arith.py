"""Exact integer arithmetic for L-function data.

Point counting over F_p, Euler-product sieves for Dirichlet coefficients,
the coefficients of the Hasse-Weil zeta quotient zeta(s)zeta(s-1)/L(E,s),
and Gaussian-integer Hecke coefficients.  No floating arithmetic enters
this module: downstream tolerances should reflect only analytic truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EllipticCurveData",
    "DirichletCoefficients",
    "GaussianInteger",
    "CURVES",
    "get_curve",
    "primes_upto",
    "count_points_ap",
    "l_coefficients",
    "zeta_C_coefficients",
    "dirichlet_convolve",
    "dirichlet_inverse",
    "dirichlet_square",
    "hecke_ap",
    "hecke_l_coefficients",
    "BadPrimeError",
    "BoundExceededError",
    "NormalizationError",
]

DEFAULT_COUNT_BOUND = 10**6


class BadPrimeError(ValueError):
    """a_p at a prime of bad reduction must come from bad_factors."""


class BoundExceededError(ValueError):
    """Point counting requested beyond the configured prime bound."""


class NormalizationError(RuntimeError):
    """No primary associate exists (even norm)."""


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return [int(p) for p in np.nonzero(sieve)[0]]


# --------------------------------------------------------------------------
# Curve data
# --------------------------------------------------------------------------


def _weierstrass_invariants(a1, a2, a3, a4, a6):
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return b2, b4, b6, b8, disc


@dataclass(frozen=True)
class EllipticCurveData:
    """Integral Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.

    bad_factors maps each prime dividing the conductor to the coefficient
    tuple of the local Euler polynomial of L (degree <= 1, ascending powers
    of p^{-s}); e.g. (1,) for trivial factor, (1, -1) for 1 - p^{-s}.
    """

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    conductor: int
    bad_factors: dict = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        *_, disc = _weierstrass_invariants(self.a1, self.a2, self.a3, self.a4, self.a6)
        if disc == 0:
            raise ValueError("singular Weierstrass equation (discriminant 0)")
        bad = {p for p, _ in _factorize_int(self.conductor)}
        if bad != set(self.bad_factors):
            raise ValueError(
                f"bad_factors primes {sorted(self.bad_factors)} do not match "
                f"conductor primes {sorted(bad)}"
            )
        for p, poly in self.bad_factors.items():
            if len(poly) > 2 or poly[0] != 1:
                raise ValueError(f"bad factor at {p} must be 1 or 1 + c*X")

    @property
    def discriminant(self) -> int:
        *_, disc = _weierstrass_invariants(self.a1, self.a2, self.a3, self.a4, self.a6)
        return disc


def _factorize_int(n: int):
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


CURVES = {
    # CM curve, conductor 32, rank 0; trivial Euler factor at 2
    "32a": EllipticCurveData(0, 0, 0, -1, 0, 32, {2: (1,)}, "32a"),
    # conductor 11, rank 0; split multiplicative at 11 (a_11 = 1)
    "11a": EllipticCurveData(0, -1, 1, -10, -20, 11, {11: (1, -1)}, "11a"),
}


def get_curve(label: str) -> EllipticCurveData:
    try:
        return CURVES[label]
    except KeyError:
        raise KeyError(f"unknown curve label {label!r}; known: {sorted(CURVES)}")


# --------------------------------------------------------------------------
# Point counting
# --------------------------------------------------------------------------


def count_points_ap(curve: EllipticCurveData, p: int, bound: int = DEFAULT_COUNT_BOUND) -> int:
    """Trace of Frobenius a_p = p + 1 - #E(F_p) at a good prime.

    Naive O(p) count with a quadratic-residue table; auditable and plenty
    fast below the configured bound.
    """
    if curve.conductor % p == 0:
        raise BadPrimeError(f"p={p} divides the conductor; use bad_factors")
    if p > bound:
        raise BoundExceededError(f"p={p} exceeds the counting bound {bound}")
    if p == 2:
        count = 1  # point at infinity
        for x in range(2):
            for y in range(2):
                lhs = (y * y + curve.a1 * x * y + curve.a3 * y) % 2
                rhs = (x**3 + curve.a2 * x * x + curve.a4 * x + curve.a6) % 2
                if lhs == rhs:
                    count += 1
        return 2 + 1 - count

    # complete the square: (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    b2, b4, b6, _, _ = _weierstrass_invariants(
        curve.a1, curve.a2, curve.a3, curve.a4, curve.a6
    )
    x = np.arange(p, dtype=np.int64)
    g = (4 * ((x * x % p) * x % p) + (b2 % p) * (x * x % p) + (2 * b4 % p) * x + b6) % p
    chi = np.full(p, -1, dtype=np.int64)
    chi[(x * x) % p] = 1
    chi[0] = 0
    return int(-chi[g].sum())


# --------------------------------------------------------------------------
# Dirichlet coefficient containers and sieves
# --------------------------------------------------------------------------


class DirichletCoefficients:
    """Exact integer sequence a_1..a_N, 1-based indexing via [] access."""

    def __init__(self, values, description: str = ""):
        self._values = list(values)  # a_1 .. a_N
        self.description = description

    @property
    def length(self) -> int:
        return len(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __getitem__(self, n: int):
        if not 1 <= n <= len(self._values):
            raise IndexError(f"index {n} outside 1..{len(self._values)}")
        return self._values[n - 1]

    def to_list(self) -> list:
        return list(self._values)

    def as_array(self) -> np.ndarray:
        return np.array(self._values, dtype=float)

    def __iter__(self):
        return iter(self._values)

    def __repr__(self):
        head = ", ".join(str(v) for v in self._values[:8])
        return f"DirichletCoefficients({self.description!r}, n={self.length}: {head}, ...)"


def _smallest_prime_factors(n: int) -> np.ndarray:
    spf = np.zeros(n + 1, dtype=np.int64)
    for i in range(2, n + 1):
        if spf[i] == 0:
            spf[i::i][spf[i::i] == 0] = i
    return spf


def _multiplicative_fill(local_coeff, N: int, description: str) -> DirichletCoefficients:
    """Assemble a multiplicative sequence from local prime-power values.

    local_coeff(p, k) must return the coefficient at p^k as an exact int.
    """
    values = [0] * (N + 1)
    values[1] = 1
    spf = _smallest_prime_factors(N)
    for n in range(2, N + 1):
        p = int(spf[n])
        m = n
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        values[n] = values[m] * local_coeff(p, k)
    return DirichletCoefficients(values[1:], description)


def _lpoly_power_coeffs(curve: EllipticCurveData, p: int, kmax: int, ap_cache: dict) -> list:
    """Coefficients of 1/L_p(X) up to X^kmax (the a_{p^k} sequence)."""
    if curve.conductor % p == 0:
        poly = curve.bad_factors[p]
        c1 = -poly[1] if len(poly) == 2 else 0
        return [c1**k for k in range(kmax + 1)]  # 1/(1 - c1 X)
    if p not in ap_cache:
        ap_cache[p] = count_points_ap(curve, p)
    ap = ap_cache[p]
    out = [1, ap]
    for _ in range(2, kmax + 1):
        out.append(ap * out[-1] - p * out[-2])
    return out[: kmax + 1]


def l_coefficients(curve: EllipticCurveData, N: int) -> DirichletCoefficients:
    """Dirichlet coefficients a_n of L(E, s) for n <= N, exact integers."""
    if N < 1:
        raise ValueError("N must be >= 1")
    ap_cache: dict = {}
    tables = {}
    for p in primes_upto(N):
        kmax = int(math.log(N) / math.log(p)) + 1
        tables[p] = _lpoly_power_coeffs(curve, p, kmax, ap_cache)
    return _multiplicative_fill(
        lambda p, k: tables[p][k], N, f"L({curve.label or 'E'},s) coefficients"
    )


def zeta_C_coefficients(curve: EllipticCurveData, N: int) -> DirichletCoefficients:
    """Coefficients c_m of zeta(C,s) = zeta(s) zeta(s-1) / L(E,s) over Q.

    Locally (1 - a_p X + p X^2) / ((1 - X)(1 - pX)) at good p; at bad p the
    declared Euler polynomial of L replaces the quadratic.  Exact integers
    via the convolution of the polynomial against sum_{i<=k} p^i.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    ap_cache: dict = {}

    tables = {}
    for p in primes_upto(N):
        kmax = int(math.log(N) / math.log(p)) + 1
        if curve.conductor % p == 0:
            poly = list(curve.bad_factors[p])
        else:
            if p not in ap_cache:
                ap_cache[p] = count_points_ap(curve, p)
            poly = [1, -ap_cache[p], p]
        # sigma_tilde[k] = 1 + p + ... + p^k, the zeta(s)zeta(s-1) local row
        sig = [1]
        for _ in range(kmax):
            sig.append(sig[-1] * p + 1)
        row = []
        for k in range(kmax + 1):
            row.append(sum(poly[i] * sig[k - i] for i in range(len(poly)) if k - i >= 0))
        tables[p] = row

    return _multiplicative_fill(
        lambda p, k: tables[p][k], N, f"zeta(C,s) coefficients for {curve.label or 'E'}"
    )


def dirichlet_convolve(a: DirichletCoefficients, b: DirichletCoefficients) -> DirichletCoefficients:
    """Dirichlet convolution (a * b)_n = sum_{d | n} a_d b_{n/d}, length preserved."""
    N = min(len(a), len(b))
    out = [0] * (N + 1)
    for d in range(1, N + 1):
        ad = a[d]
        if ad == 0:
            continue
        for m in range(1, N // d + 1):
            out[d * m] += ad * b[m]
    return DirichletCoefficients(out[1:], f"({a.description}) * ({b.description})")


def dirichlet_square(coeffs: DirichletCoefficients) -> DirichletCoefficients:
    """Dirichlet convolution of the sequence with itself."""
    return dirichlet_convolve(coeffs, coeffs)


def dirichlet_inverse(a: DirichletCoefficients) -> DirichletCoefficients:
    """Dirichlet-convolution inverse; requires a_1 = 1 (exact integers then)."""
    if a[1] != 1:
        raise ValueError("dirichlet_inverse requires a_1 = 1")
    N = len(a)
    inv = [0] * (N + 1)
    inv[1] = 1
    for n in range(2, N + 1):
        acc = 0
        for d in range(2, n + 1):
            if n % d == 0:
                acc += a[d] * inv[n // d]
        inv[n] = -acc
    return DirichletCoefficients(inv[1:], f"inverse of ({a.description})")


# --------------------------------------------------------------------------
# Gaussian integers and the Hecke character of the CM curve 32a
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianInteger:
    re: int
    im: int

    @property
    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def __mul__(self, other: "GaussianInteger") -> "GaussianInteger":
        return GaussianInteger(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def conj(self) -> "GaussianInteger":
        return GaussianInteger(self.re, -self.im)

    def is_primary(self) -> bool:
        """Primary normalization: re odd and re + im = 1 (mod 4)."""
        return self.re % 2 != 0 and (self.re + self.im) % 4 == 1


def primary_associate(z: GaussianInteger) -> GaussianInteger:
    """The unique primary associate among z, iz, -z, -iz (odd norm only)."""
    if z.norm % 2 == 0:
        raise NormalizationError(f"{z} has even norm; no primary associate")
    candidates = [
        z,
        GaussianInteger(-z.im, z.re),
        GaussianInteger(-z.re, -z.im),
        GaussianInteger(z.im, -z.re),
    ]
    primary = [c for c in candidates if c.is_primary()]
    if len(primary) != 1:
        raise NormalizationError(f"primary associate of {z} not unique: {primary}")
    return primary[0]


def _sum_two_squares(p: int) -> GaussianInteger:
    """Some a+bi with a^2+b^2 = p (p = 1 mod 4), by direct search."""
    for a in range(1, int(math.isqrt(p)) + 1):
        b2 = p - a * a
        b = int(math.isqrt(b2))
        if b * b == b2:
            return GaussianInteger(a, b)
    raise NormalizationError(f"{p} is not a sum of two squares")


def hecke_ap(p: int) -> int:
    """2a from the primary writing p = a^2 + b^2 (p = 1 mod 4).

    Equals the trace of Frobenius of y^2 = x^3 - x at p.
    """
    if p % 4 != 1:
        raise ValueError("hecke_ap requires p = 1 (mod 4)")
    pi = primary_associate(_sum_two_squares(p))
    return 2 * pi.re


def psi_value(z: GaussianInteger) -> GaussianInteger:
    """Hecke character of 32a on the ideal (z): the primary generator.

    Zero (represented as GaussianInteger(0, 0)) on ideals meeting the
    conductor (even norm).  Multiplicative on coprime ideals because the
    primary elements are closed under multiplication.
    """
    if z.norm % 2 == 0:
        return GaussianInteger(0, 0)
    return primary_associate(z)


def hecke_l_coefficients(N: int) -> DirichletCoefficients:
    """b_n = sum over ideals of Z[i] of norm n of psi (weight-1 character of 32a).

    Organized as an Euler product over Gaussian primes; all arithmetic exact.
    Entrywise equal to l_coefficients(32a, N).
    """
    if N < 1:
        raise ValueError("N must be >= 1")

    tables = {}
    for p in primes_upto(N):
        kmax = int(math.log(N) / math.log(p)) + 1
        if p == 2:
            tables[p] = [1] + [0] * kmax  # ramified, conductor-supported
        elif p % 4 == 3:
            # inert: single prime of norm p^2, psi((p)) = primary associate of p
            psi_p = primary_associate(GaussianInteger(p, 0)).re  # = -p for p=3 mod 4
            row = [0] * (kmax + 1)
            for k in range(0, kmax + 1, 2):
                row[k] = psi_p ** (k // 2)
            tables[p] = row
        else:
            # split: psi(pi) + psi(pi bar) = 2a; powers via the Hecke recursion
            twoa = hecke_ap(p)
            row = [1, twoa]
            for _ in range(2, kmax + 1):
                row.append(twoa * row[-1] - p * row[-2])
            tables[p] = row

    return _multiplicative_fill(
        lambda p, k: tables[p][k], N, "Hecke L-series coefficients for Q(i), curve 32a"
    )


# --------------------------------------------------------------------------
# Checks used by tests and the acceptance suite
# --------------------------------------------------------------------------


def multiplicativity_violations(coeffs: DirichletCoefficients, limit: int | None = None):
    """Exhaustive a_{mn} = a_m a_n check over coprime pairs with mn <= limit."""
    N = limit or len(coeffs)
    bad = []
    for m in range(2, N + 1):
        for n in range(2, N // m + 1):
            if math.gcd(m, n) == 1 and coeffs[m * n] != coeffs[m] * coeffs[n]:
                bad.append((m, n))
    return bad
