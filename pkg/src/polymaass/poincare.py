"""Maass-Poincare series of even weight for the full modular group.

Three independent evaluation routes are provided and cross-checked by the
test suite: the direct sum over cosets of the stabilizer of infinity, the
Kloosterman-Bessel Fourier expansion, and stored coefficient tables for the
Taylor coefficients of the series in s around its harmonic point.  The tables
are FourierWhittakerExpansion objects: coefficient maps over the decaying (-)
and growing (+) basis functions u^{[j],+/-}_{k,n}, evaluable anywhere on the
upper half plane.

Real-analytic Eisenstein lattice sums and their double completion live here
too, restricted to the region of absolute convergence.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from mpmath import mp
from scipy import special as sps

from . import kloosterman as kl
from .modforms import basis_coefficient, ell_index
from .special import SpecialFunctionError, WhittakerParams, u_eval, whittaker_M, whittaker_W


class PoincareError(ValueError):
    pass


@dataclass(frozen=True)
class EvalPoint:
    """A point x + iy in the upper half plane."""

    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise PoincareError(f"evaluation point must have y > 0, got y={self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "EvalPoint":
        return cls(z.real, z.imag)


@dataclass(frozen=True)
class TruncationPolicy:
    """All numerical cutoffs in one place; every field must be positive."""

    c_max: int = 10_000
    n_max: int = 30
    fd_step_s: float = 1e-3
    fd_step_z: float = 1e-4
    target_tol: float = 1e-6

    def __post_init__(self):
        for name in ("c_max", "n_max", "fd_step_s", "fd_step_z", "target_tol"):
            if not getattr(self, name) > 0:
                raise PoincareError(f"policy field {name} must be positive")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class PoincareSpec:
    """Weight, index, Taylor order and (optional) spectral parameter."""

    k: int
    m: int
    r: int = 0
    s: complex | None = None

    def __post_init__(self):
        if self.k % 2:
            raise PoincareError(f"weight must be even, got {self.k}")
        if self.r < 0:
            raise PoincareError("Taylor order must be nonnegative")

    @property
    def base_point(self) -> Fraction:
        """Harmonic point of the weight: k/2 for k >= 2, 1 - k/2 for k <= 0."""
        if self.k >= 2:
            return Fraction(self.k, 2)
        return 1 - Fraction(self.k, 2)


@dataclass
class FourierWhittakerExpansion:
    """Coefficient table {c^-_{n,j}, c^+_{n,j}} over the u-basis functions."""

    k: int
    depth_bound: int
    window: tuple[int, int]
    cminus: dict[tuple[int, int], complex] = field(default_factory=dict)
    cplus: dict[tuple[int, int], complex] = field(default_factory=dict)
    exact_plus_support: frozenset[int] = frozenset()

    def __post_init__(self):
        for table in (self.cminus, self.cplus):
            for (n, j) in table:
                if not (0 <= j <= self.depth_bound - 1):
                    raise PoincareError(f"entry depth j={j} outside [0, {self.depth_bound - 1}]")

    def max_abs(self) -> float:
        vals = [abs(c) for c in self.cminus.values()] + [abs(c) for c in self.cplus.values()]
        return max(vals, default=0.0)

    def scaled(self, factor: complex) -> "FourierWhittakerExpansion":
        return FourierWhittakerExpansion(
            self.k, self.depth_bound, self.window,
            {key: factor * c for key, c in self.cminus.items()},
            {key: factor * c for key, c in self.cplus.items()},
            self.exact_plus_support,
        )

    def __add__(self, other: "FourierWhittakerExpansion") -> "FourierWhittakerExpansion":
        if self.k != other.k:
            raise PoincareError("cannot add expansions of different weights")
        out_minus = dict(self.cminus)
        for key, c in other.cminus.items():
            out_minus[key] = out_minus.get(key, 0j) + c
        out_plus = dict(self.cplus)
        for key, c in other.cplus.items():
            out_plus[key] = out_plus.get(key, 0j) + c
        win = (min(self.window[0], other.window[0]), max(self.window[1], other.window[1]))
        return FourierWhittakerExpansion(
            self.k, max(self.depth_bound, other.depth_bound), win, out_minus, out_plus,
            frozenset(n for n in self.exact_plus_support | other.exact_plus_support),
        )

    def to_json_dict(self) -> dict:
        def rows(table):
            return [[n, j, c.real, c.imag] for (n, j), c in sorted(table.items())]
        return {
            "k": self.k,
            "r": self.depth_bound,
            "window": list(self.window),
            "cminus": rows(self.cminus),
            "cplus": rows(self.cplus),
            "exact_plus_support": sorted(self.exact_plus_support),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "FourierWhittakerExpansion":
        cminus = {(int(n), int(j)): complex(re, im) for n, j, re, im in d["cminus"]}
        cplus = {(int(n), int(j)): complex(re, im) for n, j, re, im in d["cplus"]}
        return cls(int(d["k"]), int(d["r"]), tuple(d["window"]), cminus, cplus,
                   frozenset(int(n) for n in d.get("exact_plus_support", [])))


def _minus4pi_pow(k: int) -> float:
    """(-4 pi)^{-k/2} for even k, with the real branch (-1)^{k/2}."""
    sign = -1.0 if (k // 2) % 2 else 1.0
    return sign * (4 * math.pi) ** (-(k // 2))


# ----------------------------------------------------------------- seed term


def phi_eval(k: int, m: int, z: EvalPoint, s: complex) -> complex:
    """Whittaker seed (4 pi y)^{-k/2} M_{sgn(m) k/2, s-1/2}(4 pi |m| y) e^{2 pi i m x}."""
    if m == 0:
        raise PoincareError("seed index m must be nonzero")
    y = z.y
    mu = (1 if m > 0 else -1) * k / 2.0
    s = complex(s)
    nu = s - 0.5 if s.imag else s.real - 0.5
    mval = whittaker_M(WhittakerParams(mu, nu, 4 * math.pi * abs(m) * y))
    return (4 * math.pi * y) ** (-k / 2.0) * mval * cmath.exp(2j * math.pi * m * z.x)


# ----------------------------------------------------------------- direct sum


def _coset_bound(s_re: float, policy: TruncationPolicy) -> int:
    decay = 2.0 * s_re - 2.0
    if decay <= 0.05:
        raise PoincareError("direct sum needs Re(s) > 1")
    bound = int(math.ceil(policy.target_tol ** (-1.0 / decay)))
    return max(40, min(bound, 1500))


def poincare_direct(spec: PoincareSpec, z: EvalPoint, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Sum over cosets: coprime pairs (c, d) with c >= 1 plus the identity.

    Requires Re(s) > 1 (region of absolute convergence).  The truncation
    bound on |c|, |d| is derived from policy.target_tol and capped at 1500.
    """
    k, m = spec.k, spec.m
    if m == 0:
        raise PoincareError("index m must be nonzero")
    s = complex(spec.s)
    if s.real <= 1:
        raise PoincareError(f"outside direct-sum region: Re(s)={s.real} <= 1")
    bound = _coset_bound(s.real, policy)
    total_terms = [phi_eval(k, m, z, s)]
    zc = z.z
    pairs = []
    for c in range(1, bound + 1):
        for d in range(-bound, bound + 1):
            if math.gcd(c, abs(d)) == 1:
                pairs.append((c, d))
    a_vals = np.array([pow(d % c, -1, c) if c > 1 else 0 for c, d in pairs], dtype=np.int64)
    c_arr = np.array([p[0] for p in pairs], dtype=np.int64)
    d_arr = np.array([p[1] for p in pairs], dtype=np.int64)
    b_vals = (a_vals * d_arr - 1) // c_arr
    w = c_arr * zc + d_arr
    gz = (a_vals * zc + b_vals) / w
    yp = gz.imag
    xp = gz.real
    t = 4 * math.pi * abs(m) * yp
    mu = (1 if m > 0 else -1) * k / 2.0
    if s.imag == 0:
        mvals = np.exp(-t / 2) * t ** s.real * sps.hyp1f1(s.real - mu, 2 * s.real, t)
        if not np.all(np.isfinite(mvals)):
            raise PoincareError("Whittaker overflow in the direct sum")
    else:
        with mp.workdps(20):
            mvals = np.array([complex(mpmath.whitm(mu, s - 0.5, float(tt))) for tt in t])
    terms = (4 * math.pi * yp) ** (-k / 2.0) * mvals * np.exp(2j * math.pi * m * xp) * w ** (-k)
    total_terms.extend(terms.tolist())
    return complex(math.fsum(v.real for v in total_terms), math.fsum(v.imag for v in total_terms))


# ------------------------------------------------------------ Fourier route


def poincare_fourier(spec: PoincareSpec, z: EvalPoint, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Pointwise value from the Kloosterman-Bessel Fourier expansion.

    Valid at the spectral parameters where the expansion converges; the
    expansion itself provides the continuation down to s = 1 for weights 0
    and 2.
    """
    k, m = spec.k, spec.m
    if m == 0:
        raise PoincareError("index m must be nonzero")
    s = complex(spec.s)
    y, x = z.y, z.x
    pref = _minus4pi_pow(k) * z.y ** (-k / 2.0)
    terms = [phi_eval(k, m, z, s)]
    g0 = kl.g_coeff(k, m, 0, s)
    if g0 != 0:
        l0 = kl.l_series(kl.LSeriesSpec(m, 0, s, policy.c_max)).value
        terms.append(g0 * l0 * pref * y ** (1 - s))
    for n in range(-policy.n_max, policy.n_max + 1):
        if n == 0:
            continue
        g = kl.g_coeff(k, m, n, s)
        if g == 0:
            continue
        lval = kl.l_series(kl.LSeriesSpec(m, n, s, policy.c_max)).value
        mu = (1 if n > 0 else -1) * k / 2.0
        wv = whittaker_W(WhittakerParams(mu, s.real - 0.5 if s.imag == 0 else s - 0.5, 4 * math.pi * abs(n) * y))
        terms.append(g * lval * pref * wv * cmath.exp(2j * math.pi * n * x))
    return complex(math.fsum(complex(v).real for v in terms), math.fsum(complex(v).imag for v in terms))


# ----------------------------------------------------- Taylor coefficient map


def _mpf_of_fraction(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def _prefactor_derivs(k: int, sgn_m: int, s0: Fraction, r: int, growing_side: bool) -> list[complex]:
    """Derivatives 0..r of the gamma-ratio prefactor of the seed's W or growing part."""
    with mp.workdps(40):
        if growing_side:
            f = lambda s: mpmath.gamma(2 * s) * mpmath.rgamma(s - sgn_m * mpmath.mpf(k) / 2)
        else:
            f = lambda s: (mpmath.gamma(2 * s) * mpmath.exp(-1j * mpmath.pi * s)
                           * mpmath.rgamma(s + sgn_m * mpmath.mpf(k) / 2))
        tay = mpmath.taylor(f, _mpf_of_fraction(s0), r)
        return [complex(t * math.factorial(i)) for i, t in enumerate(tay)]


def _zero_mode_derivs(k: int, m: int, s0: Fraction, r: int) -> list[complex]:
    """Derivatives 0..r of g_{k,m,0}(s) L_{m,0}(s), using the exact Dirichlet closed form."""
    am = abs(m)
    divisors = [d for d in range(1, am + 1) if am % d == 0]
    with mp.workdps(40):
        half_k = mpmath.mpf(k) / 2

        def f(s):
            g = (mpmath.gamma(2 * s) * 4 * mpmath.pi ** (1 + s) * mpmath.mpf(am) ** s
                 / (2 * s - 1) * mpmath.rgamma(s + half_k) * mpmath.rgamma(s - half_k))
            lval = mpmath.fsum(mpmath.mpf(d) ** (1 - 2 * s) for d in divisors) / mpmath.zeta(2 * s)
            return g * lval

        tay = mpmath.taylor(f, _mpf_of_fraction(s0), r)
        return [complex(t * math.factorial(i)) for i, t in enumerate(tay)]


def _g_derivs(k: int, m: int, n: int, s0: Fraction, r: int) -> list[complex]:
    sign = 1 if n > 0 else -1
    with mp.workdps(40):
        f = lambda s: (mpmath.gamma(2 * s) * 2 * mpmath.pi * mpmath.sqrt(mpmath.mpf(abs(m)) / abs(n))
                       * mpmath.rgamma(s + sign * mpmath.mpf(k) / 2))
        tay = mpmath.taylor(f, _mpf_of_fraction(s0), r)
        return [complex(t * math.factorial(i)) for i, t in enumerate(tay)]


def _l_value(m: int, n: int, s: float, c_max: int) -> float:
    return kl.l_series(kl.LSeriesSpec(m, n, s, c_max)).value


def _l_derivs(m: int, n: int, s0: float, r: int, policy: TruncationPolicy) -> list[float]:
    """Derivatives 0..r of L_{m,n}(s) at s0 by central differences with one Richardson level."""
    out = [_l_value(m, n, s0, policy.c_max)]
    if r == 0:
        return out
    h0 = policy.fd_step_s
    memo: dict[float, float] = {}

    def f(s):
        if s not in memo:
            memo[s] = _l_value(m, n, s, policy.c_max)
        return memo[s]

    stencils = {
        1: ((-1, -0.5), (1, 0.5)),
        2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
        3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
    }
    for t in range(1, r + 1):
        if t > 3:
            raise PoincareError("Taylor orders above 3 are not supported for the Bessel series")
        ds = []
        for h in (h0, h0 / 2):
            acc = 0.0
            for offset, wgt in stencils[t]:
                acc += wgt * f(s0 + offset * h)
            ds.append(acc / h**t)
        out.append((4 * ds[1] - ds[0]) / 3)
    return out


def taylor_expansion(spec: PoincareSpec, policy: TruncationPolicy = DEFAULT_POLICY) -> FourierWhittakerExpansion:
    """Coefficient table of the r-th Taylor coefficient of the series at its harmonic point.

    Weights k <= 0 expand around s = 1 - k/2, weights k >= 2 around s = k/2.
    Prefactor gamma-ratio derivatives are taken analytically; derivatives of
    the Bessel-weighted series use central differences in s.  The n = 0 mode
    uses the exact Dirichlet closed form of its series, so its derivatives
    are analytic as well.
    """
    k, m, r = spec.k, spec.m, spec.r
    if m == 0:
        raise PoincareError("Taylor tables for the Eisenstein index m=0 are limited to "
                            "the provided closed forms; general orders are out of scope")
    s0 = spec.base_point
    s0f = float(s0)
    sgn_m = 1 if m > 0 else -1
    f_branch = k <= 0
    pref = _minus4pi_pow(k) / math.factorial(r)
    n_min, n_max = -policy.n_max, policy.n_max
    window = (min(n_min, m), max(n_max, m))

    a_minus = _prefactor_derivs(k, sgn_m, s0, r, growing_side=False)
    a_plus = _prefactor_derivs(k, sgn_m, s0, r, growing_side=True)
    b_zero = _zero_mode_derivs(k, m, s0, r)
    ns = [n for n in range(window[0], window[1] + 1) if n != 0]
    kl.kloosterman_rows(m, ns, policy.c_max)  # one shared sweep
    gl_derivs: dict[int, list[complex]] = {}
    for n in ns:
        gd = _g_derivs(k, m, n, s0, r)
        ld = _l_derivs(m, n, s0f, r, policy)
        gl_derivs[n] = [
            sum(math.comb(t, i) * gd[i] * ld[t - i] for i in range(t + 1))
            for t in range(r + 1)
        ]

    cminus: dict[tuple[int, int], complex] = {}
    cplus: dict[tuple[int, int], complex] = {}

    def put(table, n, j, value):
        if value != 0:
            key = (n, j)
            table[key] = table.get(key, 0j) + value

    for j in range(r + 1):
        w = math.comb(r, j) * pref * ((-1) ** j if f_branch else 1)
        put(cminus, m, j, w * a_minus[r - j])
        put(cplus, m, j, w * a_plus[r - j])
        if f_branch:
            put(cplus, 0, j, w * b_zero[r - j])
        else:
            put(cminus, 0, j, w * b_zero[r - j])
        for n in ns:
            put(cminus, n, j, w * gl_derivs[n][r - j])

    return FourierWhittakerExpansion(
        k, r + 1, window, cminus, cplus,
        frozenset(n for n in {m} if any(abs(cplus.get((n, j), 0j)) > 0 for j in range(r + 1))),
    )


# -------------------------------------------------------------- table usage


def expansion_eval(e: FourierWhittakerExpansion, z: EvalPoint) -> complex:
    """Sum the stored coefficient table against the u-basis at z."""
    y, x = z.y, z.x
    terms = []
    for (n, j), c in sorted(e.cminus.items()):
        terms.append(c * u_eval(e.k, n, j, "-", y) * cmath.exp(2j * math.pi * n * x))
    for (n, j), c in sorted(e.cplus.items()):
        terms.append(c * u_eval(e.k, n, j, "+", y) * cmath.exp(2j * math.pi * n * x))
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def weakly_holomorphic_coefficient(e: FourierWhittakerExpansion, n: int) -> complex:
    """The pure q^n coefficient carried by a depth-one table.

    Reads the j = 0 entries that multiply exact q-powers: the decaying side
    for n > 0, the growing side for n < 0, the constant for n = 0.
    """
    k = e.k
    if n > 0:
        return e.cminus.get((n, 0), 0j) * (4 * math.pi * n) ** (k // 2)
    if n < 0:
        sign = -1.0 if (k // 2) % 2 else 1.0
        return e.cplus.get((n, 0), 0j) * sign * (4 * math.pi * abs(n)) ** (k // 2)
    return e.cplus.get((0, 0), 0j)


def tilde_combination(kind: str, k: int, m: int, r: int,
                      policy: TruncationPolicy = DEFAULT_POLICY) -> FourierWhittakerExpansion:
    """Basis-adapted combination of Taylor tables with exact rational coefficients.

    kind 'F' (weights k <= 0, index m <= ell_k):
        |m|^{-k/2} T_{k,m,r} + sum_{ell_k < n < 0} a_k(-m, n) |n|^{-k/2} T_{k,n,r}
    kind 'G' (weights k >= 2, index m > ell_k):
        m^{k/2-1} T_{k,m,r} - sum_{0 < n <= ell_k} a_k(-n, m) n^{k/2-1} T_{k,n,r}
    """
    ell = ell_index(k).ell
    if kind == "F":
        if k > 0:
            raise PoincareError("kind 'F' requires weight k <= 0")
        if m == 0:
            raise PoincareError("the m = 0 Eisenstein branch is out of numerical scope")
        if m > ell:
            raise PoincareError(f"kind 'F' needs m <= ell_k = {ell}, got m={m}")
        out = taylor_expansion(PoincareSpec(k, m, r), policy).scaled(abs(m) ** (-(k // 2)))
        for n in range(ell + 1, 0):
            a = basis_coefficient(k, -m, n)
            if a != 0:
                out = out + taylor_expansion(PoincareSpec(k, n, r), policy).scaled(float(a) * abs(n) ** (-(k // 2)))
        return out
    if kind == "G":
        if k < 2:
            raise PoincareError("kind 'G' requires weight k >= 2")
        if m == 0:
            raise PoincareError("the m = 0 Eisenstein branch is out of numerical scope")
        if m <= ell:
            raise PoincareError(f"kind 'G' needs m > ell_k = {ell}, got m={m}")
        out = taylor_expansion(PoincareSpec(k, m, r), policy).scaled(float(m) ** (k // 2 - 1))
        for n in range(1, ell + 1):
            a = basis_coefficient(k, -n, m)
            if a != 0:
                out = out + taylor_expansion(PoincareSpec(k, n, r), policy).scaled(-float(a) * float(n) ** (k // 2 - 1))
        return out
    raise PoincareError(f"kind must be 'F' or 'G', got {kind!r}")


# ------------------------------------------------------- Eisenstein lattices


def _lattice_bound(k: int, s_re: float, policy: TruncationPolicy) -> int:
    decay = k + 2 * s_re - 2.0
    if decay <= 0.05:
        raise PoincareError("requires continuation (out of scope): need Re(2s + k) > 2")
    bound = int(math.ceil((policy.target_tol / 4.0) ** (-1.0 / decay)))
    return max(20, min(bound, 600))


def eisenstein_lattice(k: int, z: EvalPoint, s: complex, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Absolutely convergent lattice sum sum_{(m,n) != 0} y^s (mz+n)^{-k} |mz+n|^{-2s}."""
    if k % 2:
        raise PoincareError("weight must be even")
    s = complex(s)
    bound = _lattice_bound(k, s.real, policy)
    zc = z.z
    mm, nn = np.meshgrid(np.arange(-bound, bound + 1), np.arange(-bound, bound + 1), indexing="ij")
    mask = (mm != 0) | (nn != 0)
    mm, nn = mm[mask], nn[mask]
    w = mm * zc + nn
    absw2 = (w * w.conjugate()).real
    if s.imag == 0:
        weight = absw2 ** (-s.real)
        ys = z.y ** s.real
    else:
        weight = np.exp(-s * np.log(absw2))
        ys = z.y ** s
    terms = ys * w ** (-k) * weight
    order = np.lexsort((nn, mm, np.maximum(np.abs(mm), np.abs(nn))))
    tl = terms[order].tolist()
    return complex(math.fsum(t.real for t in tl), math.fsum(t.imag for t in tl))


def complete_eisenstein(k: int, z: EvalPoint, s: complex, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Doubly completed lattice sum: the gamma-pi prefactor times the raw sum."""
    s = complex(s)
    with mp.workdps(25):
        half_k = mpmath.mpf(k) / 2
        pre = ((s + half_k) * (s + half_k - 1) * mpmath.pi ** (-(s + half_k))
               * mpmath.gamma(s + half_k + abs(k) / 2))
        pre = complex(pre)
    return pre * eisenstein_lattice(k, z, s, policy)
