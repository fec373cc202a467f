"""Exact truncated Laurent series in q with arbitrary-precision rational coefficients.

A QSeries stores finitely many coefficients of a formal Laurent series in
q = e^{2 pi i z} together with a validity order ``known_through``: the series
is correct modulo q^{known_through + 1}.  All arithmetic tracks the tightest
provable validity order, so results never silently report coefficients that a
truncated input could not determine.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

Rational = Union[int, Fraction]


class QSeriesError(ValueError):
    """Raised on invalid q-series operations (division by zero series, reading beyond truncation)."""


def _frac(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class QSeries:
    """A truncated Laurent series sum_{e >= leading} c_e q^e, exact through q^known_through.

    Invariants: a nonzero series has ``coeffs[0] != 0`` and
    ``known_through >= leading``; no coefficient beyond ``known_through`` is
    stored.  The zero series has empty ``coeffs``.  Instances are immutable.
    """

    __slots__ = ("leading", "coeffs", "known_through")

    def __init__(self, leading: int, coeffs: Iterable[Rational], known_through: int):
        cs = [_frac(c) for c in coeffs]
        # strip anything beyond the validity order
        if leading + len(cs) - 1 > known_through:
            cs = cs[: known_through - leading + 1]
        # normalize: leading coefficient nonzero
        while cs and cs[0] == 0:
            cs.pop(0)
            leading += 1
        while cs and cs[-1] == 0:
            cs.pop()
        if not cs:
            leading = 0
        elif known_through < leading:
            raise QSeriesError("known_through below leading exponent of a nonzero series")
        object.__setattr__(self, "leading", leading)
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "known_through", known_through)

    def __setattr__(self, *a):  # immutability
        raise AttributeError("QSeries is immutable")

    # ---------------------------------------------------------------- basics

    @classmethod
    def zero(cls, known_through: int = 0) -> "QSeries":
        return cls(0, [], known_through)

    @classmethod
    def one(cls, known_through: int) -> "QSeries":
        return cls(0, [1], known_through)

    @classmethod
    def monomial(cls, exponent: int, coefficient: Rational = 1, known_through: int | None = None) -> "QSeries":
        if known_through is None:
            known_through = exponent
        return cls(exponent, [coefficient], known_through)

    @classmethod
    def from_terms(cls, terms: Mapping[int, Rational], known_through: int) -> "QSeries":
        if not terms:
            return cls.zero(known_through)
        lead = min(terms)
        top = max(terms)
        cs = [Fraction(0)] * (top - lead + 1)
        for e, c in terms.items():
            cs[e - lead] = _frac(c)
        return cls(lead, cs, known_through)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, n: int) -> Fraction:
        """Exact coefficient of q^n; raises beyond the validity order."""
        if n > self.known_through:
            raise QSeriesError(f"coefficient of q^{n} is beyond truncation (known through q^{self.known_through})")
        i = n - self.leading
        if not self.coeffs or i < 0 or i >= len(self.coeffs):
            return Fraction(0)
        return self.coeffs[i]

    def truncate(self, known_through: int) -> "QSeries":
        """Restrict the validity order (never extends it)."""
        kt = min(known_through, self.known_through)
        return QSeries(self.leading, self.coeffs, kt)

    # ------------------------------------------------------------ arithmetic

    def __neg__(self) -> "QSeries":
        return QSeries(self.leading, [-c for c in self.coeffs], self.known_through)

    def __add__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            other = QSeries(0, [other], self.known_through)
        if not isinstance(other, QSeries):
            return NotImplemented
        kt = min(self.known_through, other.known_through)
        terms: dict[int, Fraction] = {}
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                e = s.leading + i
                if e <= kt:
                    terms[e] = terms.get(e, Fraction(0)) + c
        return QSeries.from_terms(terms, kt)

    __radd__ = __add__

    def __sub__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            other = QSeries(0, [other], self.known_through)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self) + other

    def scale(self, c: Rational) -> "QSeries":
        c = _frac(c)
        if c == 0:
            return QSeries.zero(self.known_through)
        return QSeries(self.leading, [c * a for a in self.coeffs], self.known_through)

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            a, b = (self, other) if self.is_zero() else (other, self)
            return QSeries.zero(a.known_through + (b.leading if not b.is_zero() else 0))
        # Cauchy product; the unknown tail of each factor contaminates orders
        # beyond known_through + other.leading.
        kt = min(self.known_through + other.leading, other.known_through + self.leading)
        lead = self.leading + other.leading
        n_out = kt - lead + 1
        if n_out <= 0:
            return QSeries.zero(kt)
        out = [Fraction(0)] * n_out
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            jmax = min(len(other.coeffs), n_out - i)
            for j in range(jmax):
                out[i + j] += a * other.coeffs[j]
        return QSeries(lead, out, kt)

    __rmul__ = __mul__

    def inv(self) -> "QSeries":
        """Multiplicative inverse; a * a.inv() == 1 up to the provable order."""
        if self.is_zero():
            raise QSeriesError("division by zero series")
        L = self.leading
        kt = self.known_through - 2 * L
        rel = self.known_through - 2 * L - (-L)  # relative order of the unit-part inverse
        c0 = self.coeffs[0]
        n_out = rel + 1
        if n_out <= 0:
            return QSeries.zero(kt)
        inv0 = 1 / c0
        out = [Fraction(0)] * n_out
        out[0] = inv0
        for n in range(1, n_out):
            acc = Fraction(0)
            for i in range(1, min(n, len(self.coeffs) - 1) + 1):
                acc += self.coeffs[i] * out[n - i]
            out[n] = -acc * inv0
        return QSeries(-L, out, kt)

    def __truediv__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / _frac(other))
        if not isinstance(other, QSeries):
            return NotImplemented
        return self * other.inv()

    def __pow__(self, n: int) -> "QSeries":
        if not isinstance(n, int):
            raise TypeError("only integer powers of a QSeries")
        if n < 0:
            return self.inv() ** (-n)
        if n == 0:
            return QSeries.one(self.known_through)
        result = None
        base = self
        while n > 0:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def qderiv(self) -> "QSeries":
        """Apply q d/dq: the coefficient of q^n is multiplied by n."""
        return QSeries(self.leading, [(self.leading + i) * c for i, c in enumerate(self.coeffs)], self.known_through)

    # -------------------------------------------------------------- equality

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QSeries(0, [other], self.known_through)
        if not isinstance(other, QSeries):
            return NotImplemented
        kt = min(self.known_through, other.known_through)
        lo = min((self.leading if not self.is_zero() else kt), (other.leading if not other.is_zero() else kt))
        return all(self.coeff(n) == other.coeff(n) for n in range(lo, kt + 1))

    def __hash__(self):
        return hash((self.leading, self.coeffs, self.known_through))

    # ---------------------------------------------------------------- output

    def __repr__(self) -> str:
        if self.is_zero():
            return f"QSeries(0 + O(q^{self.known_through + 1}))"
        parts = []
        for i, c in enumerate(self.coeffs[:6]):
            if c == 0:
                continue
            e = self.leading + i
            if e == 0:
                parts.append(f"{c}")
            elif e == 1:
                parts.append(f"{c}*q")
            else:
                parts.append(f"{c}*q^{e}")
        if len(self.coeffs) > 6:
            parts.append("...")
        return f"QSeries({' + '.join(parts)} + O(q^{self.known_through + 1}))"

    def to_json_dict(self) -> dict:
        return {
            "leading": self.leading,
            "known_through": self.known_through,
            "coeffs": [f"{c.numerator}/{c.denominator}" for c in self.coeffs],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "QSeries":
        coeffs = [Fraction(s) for s in d["coeffs"]]
        return cls(int(d["leading"]), coeffs, int(d["known_through"]))

    def evaluate(self, q: complex) -> complex:
        """Numerical value sum c_e q^e at a complex q with |q| < 1."""
        total = 0j
        for i, c in enumerate(self.coeffs):
            total += complex(c) * q ** (self.leading + i)
        return total
