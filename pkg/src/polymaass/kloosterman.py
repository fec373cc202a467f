"""Kloosterman sums and the Bessel-weighted Dirichlet series built from them.

K(m, n, c) sums e^{2 pi i (m a + n d)/c} over units d mod c with a the inverse
of d.  The series L_{m,n}(s) attach J- or I-Bessel weights (or c^{-2s} when
n = 0) and are summed in ascending c with exact compensated summation, with a
heuristic geometric tail estimate reported alongside the partial sum.

Unit inverses are produced in bulk by vectorized exponentiation d^{phi(c)-1}
mod c, and rows K(m, n, c) for many n share one enumeration sweep per modulus;
rows are cached per (m, n).  The n = 0 rows are Ramanujan sums, computed
exactly by the divisor-Moebius formula (identical values, far cheaper than
enumeration at large cutoffs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from mpmath import mp
from scipy import special as sps

from .special import SpecialFunctionError


class KloostermanError(ValueError):
    pass


# ------------------------------------------------------------- direct sums


def _modpow_vec(base: np.ndarray, e: int, c: int) -> np.ndarray:
    result = np.ones_like(base)
    b = base % c
    while e:
        if e & 1:
            result = (result * b) % c
        b = (b * b) % c
        e >>= 1
    return result


@lru_cache(maxsize=4096)
def _units_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (d, d^{-1} mod c) over the units of Z/cZ."""
    if c == 1:
        d = np.zeros(1, dtype=np.int64)
        return d, d.copy()
    r = np.arange(1, c, dtype=np.int64)
    units = r[np.gcd(r, c) == 1]
    inv = _modpow_vec(units, len(units) - 1, c)
    for arr in (units, inv):
        arr.setflags(write=False)
    return units, inv


def kloosterman_sum(m: int, n: int, c: int) -> float:
    """K(m, n, c) by direct enumeration over units; the value is real."""
    if c <= 0:
        raise KloostermanError(f"modulus must be positive, got {c}")
    d, a = _units_inverses(c)
    theta = 2.0 * np.pi * ((m * a + n * d) % c) / c
    total = complex(np.cos(theta).sum(), np.sin(theta).sum())
    if abs(total.imag) >= 1e-10 * c:
        raise KloostermanError(f"K({m},{n},{c}) failed the real-value check: {total}")
    return float(total.real)


def moebius_sieve(limit: int) -> np.ndarray:
    mu = np.ones(limit + 1, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    if limit >= 0:
        is_prime[:2] = False
    for p in range(2, limit + 1):
        if is_prime[p]:
            is_prime[2 * p:: p] = False
            mu[p::p] *= -1
            sq = p * p
            if sq <= limit:
                mu[sq::sq] = 0
    return mu


def ramanujan_sum_row(m: int, c_max: int) -> np.ndarray:
    """K(m, 0, c) for c = 1..c_max via sum_{d | gcd(m,c)} d mu(c/d)."""
    if m == 0:
        raise KloostermanError("use totients directly for m = 0")
    am = abs(m)
    mu = moebius_sieve(c_max)
    row = np.zeros(c_max, dtype=np.float64)
    for d in range(1, am + 1):
        if am % d:
            continue
        k = c_max // d
        row[d - 1:: d] += d * mu[1: k + 1]
    return row


# ---------------------------------------------------------------- row cache

_ROW_CACHE: dict[tuple[int, int], np.ndarray] = {}


def kloosterman_rows(m: int, ns: tuple[int, ...] | list[int], c_max: int) -> dict[int, np.ndarray]:
    """Rows {n: [K(m,n,1), ..., K(m,n,c_max)]}, sharing one enumeration sweep."""
    ns = sorted(set(int(n) for n in ns))
    out: dict[int, np.ndarray] = {}
    missing: list[int] = []
    for n in ns:
        cached = _ROW_CACHE.get((m, n))
        if cached is not None and len(cached) >= c_max:
            out[n] = cached[:c_max]
        elif n == 0:
            row = ramanujan_sum_row(m, c_max)
            row.setflags(write=False)
            _ROW_CACHE[(m, 0)] = row
            out[0] = row
        else:
            missing.append(n)
    if not missing:
        return out
    pos = [n for n in missing if n > 0]
    neg = [-n for n in missing if n < 0]
    rows = {n: np.zeros(c_max) for n in missing}
    for c in range(1, c_max + 1):
        d, a = _units_inverses(c)
        w = np.exp(2j * np.pi * ((m * a) % c) / c)
        if pos:
            x = np.exp(2j * np.pi * (d % c) / c)
            v = w.copy()
            prev = 0
            for n in pos:
                v = v * x ** (n - prev) if n - prev > 1 else v * x
                prev = n
                rows[n][c - 1] = _assert_real(v.sum(), c, m, n)
        if neg:
            xbar = np.exp(-2j * np.pi * (d % c) / c)
            v = w.copy()
            prev = 0
            for n in neg:
                v = v * xbar ** (n - prev) if n - prev > 1 else v * xbar
                prev = n
                rows[-n][c - 1] = _assert_real(v.sum(), c, m, -n)
    for n, row in rows.items():
        row.setflags(write=False)
        _ROW_CACHE[(m, n)] = row
        out[n] = row
    return out


def _assert_real(total: complex, c: int, m: int, n: int) -> float:
    if abs(total.imag) >= 1e-10 * c:
        raise KloostermanError(f"K({m},{n},{c}) failed the real-value check: {total}")
    return total.real


def clear_row_cache() -> None:
    _ROW_CACHE.clear()


# ------------------------------------------------------------------ L series


@dataclass(frozen=True)
class LSeriesSpec:
    m: int
    n: int
    s: complex
    c_max: int

    def __post_init__(self):
        if self.m == 0:
            raise KloostermanError("series index m must be nonzero")
        if self.c_max < 1:
            raise KloostermanError("cutoff must be at least 1")


@dataclass(frozen=True)
class LSeriesResult:
    value: float | complex
    tail_estimate: float
    abs_sum: float
    c_max: int
    case: str


def _tail_estimate(terms: list[float]) -> float:
    n = len(terms)
    if n == 0:
        return 0.0
    if n < 16:
        return abs(terms[-1])
    s1 = math.fsum(terms[: n // 4])
    s2 = math.fsum(terms[: n // 2])
    s3 = math.fsum(terms)
    d1, d2 = s2 - s1, s3 - s2
    if abs(d2) < 1e-300:
        return 0.0
    if abs(d1) <= abs(d2):
        return abs(d2)
    rho = min(abs(d2) / abs(d1), 0.95)
    return abs(d2) * rho / (1.0 - rho)


def l_series(spec: LSeriesSpec) -> LSeriesResult:
    """Partial sum of the Kloosterman-Bessel series with a reported tail estimate.

    Case selection: J-Bessel weights for n*m > 0, I-Bessel for n*m < 0, and
    plain c^{-2s} for n = 0.  The n = 0 case at Re(s) = 1 converges only
    conditionally and is allowed as a special path requiring c_max >= 10^4.
    """
    m, n, s, c_max = spec.m, spec.n, spec.s, spec.c_max
    s = complex(s)
    cs = np.arange(1, c_max + 1, dtype=np.float64)
    if n == 0:
        if s.real < 1 - 1e-12:
            raise KloostermanError(f"n=0 series diverges for Re(s) < 1, got s={s}")
        if s.real < 1 + 1e-12 and c_max < 10_000:
            raise KloostermanError("the conditionally convergent n=0 evaluation at Re(s)=1 needs c_max >= 10^4")
        row = kloosterman_rows(m, [0], c_max)[0]
        case = "dirichlet"
        if s.imag == 0:
            terms = row / cs ** (2 * s.real)
        else:
            terms = row * np.exp(-2 * s * np.log(cs))
    else:
        if s.real < 0.9:
            raise KloostermanError(f"Bessel series used outside its convergence region, s={s}")
        x = 4.0 * np.pi * math.sqrt(abs(m * n)) / cs
        row = kloosterman_rows(m, [n], c_max)[n]
        if n * m > 0:
            case = "bessel-J"
            bess = _bessel_row("J", 2 * s - 1, x)
        else:
            case = "bessel-I"
            bess = _bessel_row("I", 2 * s - 1, x)
        terms = row / cs * bess
    if np.iscomplexobj(terms):
        value = complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))
        rlist = np.abs(terms).tolist()
        tail = _tail_estimate(terms.real.tolist())
    else:
        tl = terms.tolist()
        value = math.fsum(tl)
        rlist = np.abs(terms).tolist()
        tail = _tail_estimate(tl)
    return LSeriesResult(value, tail, math.fsum(rlist), c_max, case)


def _bessel_row(kind: str, order: complex, x: np.ndarray) -> np.ndarray:
    order = complex(order)
    if order.imag == 0:
        fn = sps.jv if kind == "J" else sps.iv
        vals = fn(order.real, x)
        if not np.all(np.isfinite(vals)):
            raise SpecialFunctionError(f"Bessel {kind} overflowed along the series")
        return vals
    fn = mpmath.besselj if kind == "J" else mpmath.besseli
    with mp.workdps(20):
        return np.array([complex(fn(order, float(t))) for t in x])


def l_series_zero_exact(m: int, s: complex) -> complex:
    """Exact closed form sigma_{1-2s}(|m|) / zeta(2s) of the n = 0 series.

    Valid by analytic continuation for Re(s) >= 1/2 + eps; used for the
    analytic s-derivatives of expansion coefficients.
    """
    if m == 0:
        raise KloostermanError("index m must be nonzero")
    am = abs(m)
    with mp.workdps(30):
        sig = mpmath.fsum(mpmath.mpf(d) ** (1 - 2 * mpmath.mpmathify(s)) for d in range(1, am + 1) if am % d == 0)
        v = sig / mpmath.zeta(2 * mpmath.mpmathify(s))
        return float(v) if complex(s).imag == 0 else complex(v)


# ------------------------------------------------------------- g coefficients


def g_coeff(k: int, m: int, n: int, s: complex) -> complex:
    """The gamma-factor coefficient multiplying L_{m,n}(s) in the Fourier expansion.

    Zeros of the reciprocal gamma factors are perfectly fine (they encode the
    vanishing coefficients); poles of Gamma(2s) or of 1/(2s-1) raise.
    """
    if m == 0:
        raise KloostermanError("index m must be nonzero")
    s = complex(s)
    two_s = 2 * s
    if abs(two_s.imag) < 1e-12 and two_s.real < 0.5 and abs(two_s.real - round(two_s.real)) < 1e-12:
        raise SpecialFunctionError(f"gamma pole of Gamma(2s) at s={s}")
    with mp.workdps(30):
        s_mp = mpmath.mpmathify(s)
        if n != 0:
            sign = 1 if n > 0 else -1
            val = (mpmath.gamma(2 * s_mp) * 2 * mpmath.pi * mpmath.sqrt(abs(m / n))
                   * mpmath.rgamma(s_mp + sign * k / 2))
        else:
            if abs(two_s.real - 1) < 1e-12 and abs(two_s.imag) < 1e-12:
                raise SpecialFunctionError(f"pole of the n=0 coefficient at s={s} (2s-1 vanishing)")
            val = (mpmath.gamma(2 * s_mp) * 4 * mpmath.pi ** (1 + s_mp) * mpmath.mpf(abs(m)) ** s_mp
                   / (2 * s_mp - 1) * mpmath.rgamma(s_mp + k / 2) * mpmath.rgamma(s_mp - k / 2))
        return complex(val)


def weil_bound_ratio(m: int, n: int, c: int) -> float:
    """|K(m,n,c)| divided by the square-root bound d(c) sqrt(c) sqrt(gcd(m,n,c))."""
    val = abs(kloosterman_sum(m, n, c))
    divisors = sum(1 for d in range(1, c + 1) if c % d == 0)
    g = math.gcd(math.gcd(abs(m), abs(n)), c)
    return val / (divisors * math.sqrt(c) * math.sqrt(g))
