"""The weight-k antiholomorphic derivative operator xi_k and hyperbolic
Laplacian, as finite-difference operators on sampled functions and as exact
index maps on stored Fourier-Whittaker coefficient tables.

xi_k = 2 i y^k conj(d/dzbar) sends weight k to weight 2-k and is
conjugate-linear; the Laplacian factors as -xi_{2-k} o xi_k.  On tables these
act by sign flips of the Fourier index, shifts of the derivative depth j, and
complex conjugation of the coefficients, so polyharmonic depth is decidable
exactly from the table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .poincare import EvalPoint, FourierWhittakerExpansion, PoincareError


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class SampledForm:
    """A pure pointwise evaluator tagged with its modular weight."""

    weight: int
    evaluator: Callable[[EvalPoint], complex]


def _derivs_first(f: Callable[[EvalPoint], complex], z: EvalPoint, h: float) -> tuple[complex, complex]:
    """Fourth-order central first derivatives (d/dx, d/dy)."""
    x, y = z.x, z.y
    fx = (-f(EvalPoint(x + 2 * h, y)) + 8 * f(EvalPoint(x + h, y))
          - 8 * f(EvalPoint(x - h, y)) + f(EvalPoint(x - 2 * h, y))) / (12 * h)
    fy = (-f(EvalPoint(x, y + 2 * h)) + 8 * f(EvalPoint(x, y + h))
          - 8 * f(EvalPoint(x, y - h)) + f(EvalPoint(x, y - 2 * h))) / (12 * h)
    return fx, fy


def _check_step(z: EvalPoint, h: float) -> None:
    if not h > 0:
        raise OperatorError("step must be positive")
    if h >= z.y / 4:
        raise OperatorError(f"stencil would leave the upper half plane: h={h} >= y/4={z.y / 4}")


def xi_numeric(f: SampledForm, z: EvalPoint, h: float) -> complex:
    """2 i y^k conj(d f / d zbar) by fourth-order central differences."""
    _check_step(z, h)
    fx, fy = _derivs_first(f.evaluator, z, h)
    return 1j * z.y**f.weight * (fx + 1j * fy).conjugate()


def laplacian_numeric(f: SampledForm, z: EvalPoint, h: float) -> complex:
    """-y^2 (f_xx + f_yy) + i k y (f_x + i f_y) by central differences."""
    _check_step(z, h)
    x, y = z.x, z.y
    g = f.evaluator
    center = g(z)
    fxx = (g(EvalPoint(x + h, y)) - 2 * center + g(EvalPoint(x - h, y))) / h**2
    fyy = (g(EvalPoint(x, y + h)) - 2 * center + g(EvalPoint(x, y - h))) / h**2
    fx, fy = _derivs_first(g, z, h)
    k = f.weight
    return -(y**2) * (fxx + fyy) + 1j * k * y * (fx + 1j * fy)


# ------------------------------------------------------------- table algebra


def xi_on_expansion(e: FourierWhittakerExpansion) -> FourierWhittakerExpansion:
    """Exact image of a coefficient table under xi: weight flips to 2-k.

    The operator is conjugate-linear, negates the Fourier index, and shifts
    the depth j on the side where the basis function is annihilated at j = 0.
    """
    k = e.k
    out = FourierWhittakerExpansion(2 - k, e.depth_bound, (-e.window[1], -e.window[0]))

    def put(table, n, j, value):
        if value != 0 and j >= 0:
            key = (n, j)
            table[key] = table.get(key, 0j) + value

    for (n, j), c in e.cminus.items():
        cb = c.conjugate()
        if n > 0:
            put(out.cminus, -n, j - 1, cb * j * (1 - k))
            put(out.cminus, -n, j - 2, -cb * j * (j - 1))
        elif n < 0:
            put(out.cminus, -n, j, -cb)
        else:
            sign = (-1) ** (j % 2)
            put(out.cplus, 0, j - 1, cb * sign * j)
            put(out.cplus, 0, j, cb * sign * (1 - k))
    for (n, j), c in e.cplus.items():
        cb = c.conjugate()
        if n > 0:
            put(out.cplus, -n, j, -cb)
        elif n < 0:
            put(out.cplus, -n, j - 1, cb * j * (1 - k))
            put(out.cplus, -n, j - 2, -cb * j * (j - 1))
        else:
            sign = (-1) ** ((j - 1) % 2)
            put(out.cminus, 0, j - 1, cb * sign * j)
    out.exact_plus_support = frozenset(n for (n, j) in out.cplus if n != 0)
    return out


def laplacian_on_expansion(e: FourierWhittakerExpansion) -> FourierWhittakerExpansion:
    """Exact table image under the weight-k Laplacian -xi_{2-k} o xi_k."""
    return xi_on_expansion(xi_on_expansion(e)).scaled(-1.0)


def depth_classify(e: FourierWhittakerExpansion, rel_tol: float = 0.0) -> float:
    """Smallest half-integer depth of the table.

    Returns the least r with the r-fold Laplacian image vanishing, lowered by
    1/2 when the level-r coefficients satisfy the half-depth criterion:
    c^-_{n,r-1} = 0 for all n <= 0 and c^+_{n,r-1} = 0 for all n > 0.
    Zero tables have depth 0 by convention.

    Structural zeros produced by the table algebra are exact, so the default
    is an exact emptiness test; rel_tol (relative to the input table's largest
    entry) is available for tables reloaded through lossy channels.
    """
    scale = e.max_abs()
    if scale == 0.0:
        return 0.0
    thresh = rel_tol * scale

    def vanished(t: FourierWhittakerExpansion) -> bool:
        return t.max_abs() <= thresh

    r = 0
    cur = e
    while not vanished(cur):
        cur = laplacian_on_expansion(cur)
        r += 1
        if r > e.depth_bound + 2:
            raise OperatorError("table does not stabilize under the Laplacian")  # pragma: no cover
    half = all(abs(c) <= thresh for (n, j), c in e.cminus.items() if j == r - 1 and n <= 0) and \
           all(abs(c) <= thresh for (n, j), c in e.cplus.items() if j == r - 1 and n > 0)
    return r - 0.5 if half else float(r)
