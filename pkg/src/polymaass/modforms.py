"""Exact q-expansions of classical level-one modular forms.

Covers the discriminant, Eisenstein series, the elliptic j-function, Faber
polynomials, the canonical (Duke-Jenkins) basis of weakly holomorphic forms
f_{k,m} = q^{-m} + O(q^{ell_k + 1}), and numerical evaluation of the handful
of closed-form real-analytic coefficient functions built from them.

All series arithmetic is exact over the rationals; floats appear only in the
pointwise evaluators at the end of the module.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .qseries import QSeries, QSeriesError

# Euler-Mascheroni constant, 30 digits.
EULER_GAMMA = float("0.577215664901532860606512090082")

ALLOWED_KPRIME = (0, 4, 6, 8, 10, 14)


class ModularFormError(ValueError):
    pass


def divisor_sigma(n: int, power: int = 1) -> int:
    """Sum of the ``power``-th powers of the positive divisors of n."""
    if n <= 0:
        raise ModularFormError(f"divisor sum needs n >= 1, got {n}")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d**power
            e = n // d
            if e != d:
                total += e**power
        d += 1
    return total


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """Exact Bernoulli number B_n (B_1 = -1/2) by the defining recurrence."""
    if n < 0:
        raise ModularFormError("Bernoulli index must be nonnegative")
    if n == 0:
        return Fraction(1)
    if n > 1 and n % 2 == 1:
        return Fraction(0)
    acc = Fraction(0)
    for j in range(n):
        acc += Fraction(math.comb(n + 1, j)) * bernoulli_number(j)
    return -acc / (n + 1)


@lru_cache(maxsize=None)
def _euler_product(order: int) -> QSeries:
    # prod_{n>=1} (1 - q^n) via the pentagonal number expansion
    terms: dict[int, Fraction] = {0: Fraction(1)}
    j = 1
    while True:
        e1 = j * (3 * j - 1) // 2
        e2 = j * (3 * j + 1) // 2
        if e1 > order and e2 > order:
            break
        sgn = Fraction(-1 if j % 2 else 1)
        if e1 <= order:
            terms[e1] = sgn
        if e2 <= order:
            terms[e2] = sgn
        j += 1
    return QSeries.from_terms(terms, order)


@lru_cache(maxsize=None)
def delta_qexp(order: int) -> QSeries:
    """The discriminant form q prod (1 - q^n)^24, exact through q^order."""
    if order < 1:
        raise ModularFormError("order must be >= 1")
    p24 = _euler_product(order - 1) ** 24
    return (QSeries.monomial(1, 1, order) * p24).truncate(order)


@lru_cache(maxsize=None)
def eisenstein_qexp(k: int, order: int) -> QSeries:
    """Weight-k Eisenstein series, constant term 1: 1 - (2k/B_k) sum sigma_{k-1}(n) q^n."""
    if k % 2 or k < 4:
        raise ModularFormError(f"Eisenstein weight must be even and >= 4, got {k}")
    factor = Fraction(-2 * k) / bernoulli_number(k)
    terms: dict[int, Fraction] = {0: Fraction(1)}
    for n in range(1, order + 1):
        terms[n] = factor * divisor_sigma(n, k - 1)
    return QSeries.from_terms(terms, order)


def e2star_qpart(order: int) -> QSeries:
    """Holomorphic q-part sum_{n>=1} sigma_1(n) q^n of the weight-2 completion."""
    if order < 1:
        raise ModularFormError("order must be >= 1")
    return QSeries.from_terms({n: Fraction(divisor_sigma(n)) for n in range(1, order + 1)}, order)


@lru_cache(maxsize=None)
def j_qexp(order: int) -> QSeries:
    """The elliptic modular j-function E_4^3 / Delta, exact through q^order."""
    work = order + 4
    e4 = eisenstein_qexp(4, work)
    return ((e4**3) * delta_qexp(work).inv()).truncate(order)


@dataclass(frozen=True)
class WeightProfile:
    """Decomposition k = 12*ell + k_prime with k_prime in {0,4,6,8,10,14}."""

    k: int
    ell: int
    k_prime: int


def ell_index(k: int) -> WeightProfile:
    if k % 2:
        raise ModularFormError(f"weight must be even, got {k}")
    for kp in ALLOWED_KPRIME:
        if (k - kp) % 12 == 0:
            return WeightProfile(k, (k - kp) // 12, kp)
    raise ModularFormError(f"no valid decomposition for weight {k}")  # pragma: no cover


@dataclass(frozen=True)
class BasisElement:
    """One canonical basis form q^{-index} + sum_{n > ell_k} a(index, n) q^n."""

    weight: int
    index: int
    expansion: QSeries


@lru_cache(maxsize=None)
def _weight_seed(k: int, order: int) -> QSeries:
    # Delta^ell * E_{k'}; the lowest-index basis element before reduction.
    prof = ell_index(k)
    out = QSeries.one(order) if prof.k_prime == 0 else eisenstein_qexp(prof.k_prime, order)
    if prof.ell != 0:
        out = out * delta_qexp(order) ** prof.ell
    return out


@lru_cache(maxsize=None)
def _duke_jenkins_raw(k: int, m: int, work: int) -> QSeries:
    prof = ell_index(k)
    ell = prof.ell
    if m < -ell:
        raise ModularFormError(f"no such basis element: weight {k} needs index >= {-ell}, got {m}")
    if m == -ell:
        return _weight_seed(k, work)
    cand = _duke_jenkins_raw(k, m - 1, work) * j_qexp(work)
    # clear every stored exponent in the gap (-m, ell]
    for e in range(-m + 1, ell + 1):
        c = cand.coeff(e)
        if c != 0:
            cand = cand - _duke_jenkins_raw(k, -e, work).scale(c)
    return cand


def duke_jenkins(k: int, m: int, order: int) -> BasisElement:
    """The unique weakly holomorphic form of weight k with expansion q^{-m} + O(q^{ell_k+1})."""
    prof = ell_index(k)
    work = order + max(0, m + prof.ell) + 2 * abs(prof.ell) + 8
    exp = _duke_jenkins_raw(k, m, work).truncate(order)
    if exp.coeff(-m) != 1:
        raise ModularFormError("basis normalization failed")  # pragma: no cover
    for e in range(-m + 1, min(prof.ell, order) + 1):
        if exp.coeff(e) != 0:
            raise ModularFormError("gap property violated")  # pragma: no cover
    return BasisElement(k, m, exp)


def basis_coefficient(k: int, m: int, n: int) -> Fraction:
    """Exact Fourier coefficient a_k(m, n) of the canonical basis form."""
    order = max(n, ell_index(k).ell + 1, 1) + 1
    return duke_jenkins(k, m, order).expansion.coeff(n)


@lru_cache(maxsize=None)
def _faber_raw(m: int, work: int) -> QSeries:
    if m > 0:
        raise ModularFormError(f"Faber polynomial index must be <= 0, got {m}")
    if m == 0:
        return QSeries.one(work)
    cand = _faber_raw(m + 1, work) * j_qexp(work)
    for e in range(m + 1, 1):
        c = cand.coeff(e)
        if c != 0:
            cand = cand - _faber_raw(e, work).scale(c)
    # clear the constant term (j_m = q^m + O(q) for m < 0)
    c0 = cand.coeff(0)
    if c0 != 0:
        cand = cand - QSeries(0, [c0], cand.known_through)
    return cand


def faber_poly(m: int, order: int) -> QSeries:
    """The monic polynomial in j whose q-expansion is q^m + O(q), for m <= 0."""
    work = order + abs(m) + 8
    return _faber_raw(m, work).truncate(order)


# --------------------------------------------------------------------------
# pointwise evaluation helpers (floats from here on)
# --------------------------------------------------------------------------


def _check_upper_half(z: complex) -> complex:
    z = complex(z)
    if z.imag <= 0:
        raise ModularFormError(f"point must lie in the upper half plane, got {z}")
    return z


def eta_log_abs(z: complex, terms: int | None = None) -> float:
    """log|eta(z)| via the absolutely convergent product logarithm."""
    z = _check_upper_half(z)
    y = z.imag
    if terms is None:
        terms = max(8, int(46.0 / y) + 4)
    q = cmath.exp(2j * math.pi * z)
    total = (1j * math.pi * z / 12.0).real
    qn = 1.0 + 0j
    for _ in range(1, terms + 1):
        qn *= q
        total += cmath.log(1.0 - qn).real
    return total


def j_value(z: complex, order: int = 32) -> complex:
    z = _check_upper_half(z)
    return j_qexp(order).evaluate(cmath.exp(2j * math.pi * z))


def _zeta_even_fraction(k: int) -> Fraction:
    # zeta(k) / pi^k for even k >= 2, exactly
    if k % 2 or k < 2:
        raise ModularFormError("Bernoulli closed form needs even k >= 2")
    b = bernoulli_number(k)
    return Fraction((-1) ** (k // 2 + 1), 1) * b * Fraction(2 ** (k - 1)) / Fraction(math.factorial(k))


CLOSED_FORM_NAMES = ("F01", "G21", "Gk0", "F0_neg_m_0", "F0_neg1_0")


def closed_form_eval(name: str, z: complex, k: int | None = None, m: int | None = None,
                     order: int = 40) -> complex:
    """Evaluate one of the named closed-form coefficient functions at z.

    F01        : gamma + 1 - log(4 pi) - log(y |eta(z)|^4)
    G21        : pi/3 - 1/y - 8 pi sum sigma_1(n) q^n
    Gk0        : (k/2 - 1) k! pi^{-k/2} zeta(k) E_k(z)      (needs k >= 4)
    F0_neg_m_0 : j_{-m}(z) + 24 sigma_1(m)                  (needs m >= 1)
    F0_neg1_0  : j(z) - 720
    """
    z = _check_upper_half(z)
    y = z.imag
    q = cmath.exp(2j * math.pi * z)
    if name == "F01":
        return complex(EULER_GAMMA + 1.0 - math.log(4.0 * math.pi) - math.log(y) - 4.0 * eta_log_abs(z))
    if name == "G21":
        qpart = e2star_qpart(order).evaluate(q)
        return math.pi / 3.0 - 1.0 / y - 8.0 * math.pi * qpart
    if name == "Gk0":
        if k is None or k < 4 or k % 2:
            raise ModularFormError("Gk0 needs an even weight k >= 4")
        zeta_k = float(_zeta_even_fraction(k)) * math.pi**k
        ek = eisenstein_qexp(k, order).evaluate(q)
        return (k / 2.0 - 1.0) * math.factorial(k) * math.pi ** (-k / 2.0) * zeta_k * ek
    if name == "F0_neg_m_0":
        if m is None or m < 1:
            raise ModularFormError("F0_neg_m_0 needs m >= 1")
        return faber_poly(-m, order).evaluate(q) + 24.0 * divisor_sigma(m)
    if name == "F0_neg1_0":
        return j_value(z, order) - 720.0
    raise ModularFormError(f"unknown closed form {name!r}; valid names: {', '.join(CLOSED_FORM_NAMES)}")
