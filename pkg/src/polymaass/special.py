"""Numerical special functions: gamma family, Bessel J/I, the Whittaker pair,
the rotated-argument second solution, and their parameter derivatives.

The Whittaker solutions are evaluated through mpmath (with exact elementary
fast paths at the half-integer parameters where they degenerate to closed
forms); Bessel functions go through scipy for vectorizable speed.  The second
exponentially-growing solution is recovered by solving the classical
connection formula linking it to the M and W functions, with a short
extrapolation in the order parameter at the degenerate points where that
formula's gamma factors blow up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
from mpmath import mp
from scipy import special as sps

from .modforms import bernoulli_number


class SpecialFunctionError(ValueError):
    pass


@dataclass(frozen=True)
class WhittakerParams:
    """Parameter/argument bundle (mu, nu, y) for the Whittaker equation, y > 0."""

    mu: complex
    nu: complex
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise SpecialFunctionError(f"Whittaker argument must be positive, got y={self.y}")


@dataclass(frozen=True)
class StepPolicy:
    """Finite-difference policy for parameter derivatives."""

    base_step: float = 1e-3
    richardson_levels: int = 2


def _near_int(x: complex, limit: float | None = None) -> int | None:
    """Round x to the nearest integer if it is one to machine tolerance (optionally <= limit)."""
    x = complex(x)
    if abs(x.imag) > 1e-12:
        return None
    n = round(x.real)
    if abs(x.real - n) > 1e-12:
        return None
    if limit is not None and n > limit:
        return None
    return n


def gamma_fn(s: complex) -> complex:
    """Gamma function; raises at the poles."""
    if _near_int(s, limit=0) is not None:
        raise SpecialFunctionError(f"gamma pole at s={s}")
    with mp.workdps(25):
        v = mpmath.gamma(s)
        return complex(v) if isinstance(s, complex) and s.imag else float(v)


def inc_gamma_upper(s: float, y: float) -> float:
    """Upper incomplete gamma integral from y to infinity, any real s, y > 0."""
    if not y > 0:
        raise SpecialFunctionError(f"incomplete gamma needs y > 0, got {y}")
    n = _near_int(s)
    if n is not None and n >= 1:
        # Gamma(n, y) = (n-1)! e^{-y} sum_{j<n} y^j / j!
        acc = 0.0
        term = 1.0
        for j in range(n):
            if j:
                term *= y / j
            acc += term
        return math.factorial(n - 1) * math.exp(-y) * acc
    with mp.workdps(25):
        return float(mpmath.gammainc(s, a=y))


def bessel(kind: str, order: float, x: float) -> float:
    """Bessel function of the first kind (J) or modified first kind (I)."""
    if not x > 0:
        raise SpecialFunctionError(f"Bessel argument must be positive, got {x}")
    if kind == "J":
        v = float(sps.jv(order, x))
    elif kind == "I":
        v = float(sps.iv(order, x))
    else:
        raise SpecialFunctionError(f"Bessel kind must be 'J' or 'I', got {kind!r}")
    if not math.isfinite(v):
        raise SpecialFunctionError(f"Bessel {kind}_{order}({x}) overflowed")
    return v


def zeta_even(k: int) -> float:
    """zeta(k) for even k >= 2 via the Bernoulli closed form."""
    if k % 2 or k < 2:
        raise SpecialFunctionError(f"zeta_even needs even k >= 2, got {k}")
    b = bernoulli_number(k)
    val = (-1) ** (k // 2 + 1) * b * 2 ** (k - 1) / math.factorial(k)
    return float(val) * math.pi**k


# --------------------------------------------------------------------- M / W


def _whitm_mp(mu, nu, y):
    return mpmath.whitm(mu, nu, y)


def _whitw_mp(mu, nu, y):
    return mpmath.whitw(mu, nu, y)


def whittaker_M(p: WhittakerParams) -> float:
    """The recessive-at-zero Whittaker solution M_{mu,nu}(y)."""
    two_nu = _near_int(2 * complex(p.nu))
    if two_nu is not None and two_nu < 0:
        raise SpecialFunctionError(f"parameter singularity: M undefined at 2*nu={two_nu}")
    mu, nu = complex(p.mu), complex(p.nu)
    if mu.imag == 0 and nu.imag == 0:
        v = _hyp1f1_fast(mu.real, nu.real, p.y)
        if v is not None:
            return v
        with mp.workdps(25):
            return float(_whitm_mp(mu.real, nu.real, p.y))
    with mp.workdps(25):
        return complex(_whitm_mp(mu, nu, p.y))


def _hyp1f1_fast(mu: float, nu: float, y: float) -> float | None:
    # M_{mu,nu}(y) = e^{-y/2} y^{nu+1/2} 1F1(nu - mu + 1/2; 2 nu + 1; y)
    b = 2 * nu + 1
    if b < 0.5 or y > 600.0:
        return None
    v = sps.hyp1f1(nu - mu + 0.5, b, y)
    if not math.isfinite(v):
        return None
    return math.exp(-y / 2) * y ** (nu + 0.5) * v


def whittaker_W(p: WhittakerParams) -> float:
    """The exponentially decaying Whittaker solution W_{mu,nu}(y)."""
    mu, nu = complex(p.mu), complex(p.nu)
    if mu.imag == 0 and nu.imag == 0:
        a = nu.real - mu.real + 0.5
        if abs(a) < 1e-13:
            # Kummer U(0, b, y) = 1
            return y_pow_exp(mu.real, p.y)
        with mp.workdps(25):
            return float(_whitw_mp(mu.real, nu.real, p.y))
    with mp.workdps(25):
        return complex(_whitw_mp(mu, nu, p.y))


def y_pow_exp(mu: float, y: float) -> float:
    return y**mu * math.exp(-y / 2)


# ----------------------------------------------------------- second solution


def _mplus_degenerate_distance(mu, nu) -> float:
    """Distance to the nearest parameter where the connection formula degenerates."""
    d1 = abs(2 * nu - round((2 * nu).real)) if abs((2 * nu).imag) < 1e-9 and round((2 * nu).real) <= -1 else math.inf
    a = nu - mu + 0.5
    d2 = abs(a - round(a.real)) if abs(a.imag) < 1e-9 and round(a.real) <= 0 else math.inf
    return min(d1, d2)


def _mplus_formula_mp(mu, nu, y):
    # solve the M = (...) Mplus + (...) W connection formula for Mplus
    half = mpmath.mpf(1) / 2
    M = _whitm_mp(mu, nu, y)
    W = _whitw_mp(mu, nu, y)
    g = mpmath.gamma
    phase = mpmath.exp(-1j * mpmath.pi * mu)
    t1 = phase * g(nu - mu + half) / g(1 + 2 * nu) * M
    t2 = phase * mpmath.exp(-1j * mpmath.pi * (nu - mu + half)) * g(nu - mu + half) / g(nu + mu + half) * W
    return t1 - t2


def mplus(p: WhittakerParams) -> complex:
    """The rotated-argument second solution, exponentially growing as y grows.

    Generic parameters use the connection-formula solve; at the degenerate
    parameters (gamma poles in that formula) the value is recovered as a
    Richardson limit in nu, at a documented ~3 digit accuracy cost.
    """
    mu, nu = complex(p.mu), complex(p.nu)
    dist = _mplus_degenerate_distance(mu, nu)
    if dist > 1e-8:
        extra = max(0, int(-math.log10(min(dist, 1.0)))) + 5
        with mp.workdps(25 + 2 * extra):
            return complex(_mplus_formula_mp(mu, nu, p.y))
    # degenerate point: symmetric limit nu +- h with one Richardson level
    h = 1e-4
    with mp.workdps(60):
        hh = mpmath.mpf(h)
        def avg(step):
            return (_mplus_formula_mp(mu, nu + step, p.y) + _mplus_formula_mp(mu, nu - step, p.y)) / 2
        a1 = avg(hh)
        a2 = avg(hh / 2)
        return complex((4 * a2 - a1) / 3)


# ------------------------------------------------------ parameter derivatives

_CENTRAL_STENCILS = {
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
}


def _central_derivative(f, x0, j: int, h: float):
    """j-th central difference of f at x0 with step h (f returns mpmath values)."""
    acc = mpmath.mpc(0)
    for offset, w in _CENTRAL_STENCILS[j]:
        acc += w * f(x0 + offset * h)
    return acc / mpmath.mpf(h) ** j


def _richardson_derivative(f, x0, j: int, fd: StepPolicy):
    vals = []
    h = fd.base_step
    for i in range(fd.richardson_levels + 1):
        vals.append(_central_derivative(f, x0, j, h / 2**i))
    # central stencils have h^2 error expansions: eliminate successively
    for level in range(1, len(vals)):
        factor = 4**level
        vals = [(factor * vals[i + 1] - vals[i]) / (factor - 1) for i in range(len(vals) - 1)]
    return vals[0]


def whittaker_s_deriv(p: WhittakerParams, j: int, which: str = "W", fd: StepPolicy = StepPolicy()) -> complex:
    """d^j/ds^j of W_{mu, s-1/2}(y) or of the second solution, at s = nu + 1/2.

    Central differences in s with Richardson extrapolation; arithmetic stays
    in extended precision so the stencil cancellation costs no accuracy.
    """
    if j < 0:
        raise SpecialFunctionError("derivative order must be nonnegative")
    if fd.base_step <= 1e-12:
        raise SpecialFunctionError("step underflow in parameter derivative")
    mu, nu = complex(p.mu), complex(p.nu)
    if which == "W":
        base = lambda v: _whitw_mp(mu, v, p.y)
    elif which == "Mplus":
        base = lambda v: _mplus_formula_mp(mu, v, p.y)
    else:
        raise SpecialFunctionError(f"which must be 'W' or 'Mplus', got {which!r}")

    def f(v):
        if which == "Mplus" and _mplus_degenerate_distance(mu, v) < 1e-8:
            # nudge off the measure-zero degenerate set
            v = v + mpmath.mpf(1e-9)
        return base(v)

    if j == 0:
        return complex(whittaker_W(p)) if which == "W" else mplus(p)
    with mp.workdps(40):
        if j <= 3:
            val = _richardson_derivative(f, mpmath.mpf(nu.real) if nu.imag == 0 else mpmath.mpc(nu), j, fd)
        else:
            # deeper depths by outer differencing of the j-1 derivative (reduced accuracy)
            h = fd.base_step * 10
            upper = whittaker_s_deriv(WhittakerParams(p.mu, complex(nu + h), p.y), j - 1, which, fd)
            lower = whittaker_s_deriv(WhittakerParams(p.mu, complex(nu - h), p.y), j - 1, which, fd)
            return (upper - lower) / (2 * h)
        return complex(val)


# --------------------------------------------------------- building blocks u


@lru_cache(maxsize=200_000)
def u_eval(k: int, n: int, j: int, sign: str, y: float) -> complex:
    """Fourier-Whittaker basis function u^{[j],+/-}_{k,n}(y).

    The minus family decays as y grows (for n != 0), the plus family grows;
    at n = 0 they are the elementary powers (-log y)^j y^{1-k} and (log y)^j.
    Derivative order j differentiates the order parameter at its half-integer
    base point.
    """
    if sign not in ("-", "+"):
        raise SpecialFunctionError(f"sign must be '-' or '+', got {sign!r}")
    if not y > 0:
        raise SpecialFunctionError("u functions need y > 0")
    if n == 0:
        if sign == "-":
            return (-math.log(y)) ** j * y ** (1 - k)
        return math.log(y) ** j + 0j
    t = 4 * math.pi * abs(n) * y
    mu = (1 if n > 0 else -1) * k / 2.0
    nu0 = (k - 1) / 2.0
    if j == 0:
        if sign == "-":
            if n > 0:
                return (4 * math.pi * n) ** (k // 2) * math.exp(-2 * math.pi * n * y) + 0j
            return (4 * math.pi * abs(n)) ** (k // 2) * inc_gamma_upper(1 - k, t) * math.exp(2 * math.pi * abs(n) * y) + 0j
        if n < 0:
            # (4 pi n)^{k/2} with n < 0 and integral k/2: real, sign (-1)^{k/2}
            return (-1) ** ((k // 2) % 2) * (4 * math.pi * abs(n)) ** (k // 2) * math.exp(2 * math.pi * abs(n) * y) + 0j
        return y ** (-k / 2.0) * mplus(WhittakerParams(mu, nu0, t))
    which = "W" if sign == "-" else "Mplus"
    d = whittaker_s_deriv(WhittakerParams(mu, nu0, t), j, which)
    return y ** (-k / 2.0) * d
