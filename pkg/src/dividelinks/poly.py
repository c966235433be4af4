"""Exact integer Laurent polynomials in one variable.

Exponents are stored as integers scaled by ``exp_den`` so that half-integer
powers (Jones in t^(1/2), Conway-to-Alexander substitutions) stay exact: a
stored exponent e with exp_den d represents var^(e/d).  Polynomials with all
exponents divisible by d normalize back to d=1, making equality structural.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, Tuple


class ZeroPolynomial(Exception):
    pass


@dataclass(frozen=True)
class LaurentPolynomial:
    variable: str
    coeffs: Tuple[Tuple[int, int], ...]  # sorted (exponent, coefficient), no zeros
    exp_den: int = 1

    @classmethod
    def from_dict(cls, variable: str, data: Dict[int, int], exp_den: int = 1) -> "LaurentPolynomial":
        items = tuple(sorted((e, c) for e, c in data.items() if c != 0))
        return cls(variable, items, exp_den)._normalized()

    @classmethod
    def zero(cls, variable: str) -> "LaurentPolynomial":
        return cls(variable, ())

    @classmethod
    def one(cls, variable: str) -> "LaurentPolynomial":
        return cls(variable, ((0, 1),))

    @classmethod
    def term(cls, variable: str, coeff: int, exponent: int, exp_den: int = 1) -> "LaurentPolynomial":
        return cls.from_dict(variable, {exponent: coeff}, exp_den)

    @classmethod
    def var(cls, variable: str) -> "LaurentPolynomial":
        return cls.term(variable, 1, 1)

    def _normalized(self) -> "LaurentPolynomial":
        if self.exp_den == 1 or not self.coeffs:
            return LaurentPolynomial(self.variable, self.coeffs, 1) if not self.coeffs else self
        g = self.exp_den
        for e, _ in self.coeffs:
            g = gcd(g, e)
            if g == 1:
                return self
        items = tuple((e // g, c) for e, c in self.coeffs)
        return LaurentPolynomial(self.variable, items, self.exp_den // g)

    # -- helpers ----------------------------------------------------------
    def _aligned(self, other: "LaurentPolynomial") -> Tuple[Dict[int, int], Dict[int, int], int]:
        if self.variable != other.variable:
            raise ValueError(f"variable mismatch: {self.variable} vs {other.variable}")
        den = self.exp_den * other.exp_den // gcd(self.exp_den, other.exp_den)
        a = {e * (den // self.exp_den): c for e, c in self.coeffs}
        b = {e * (den // other.exp_den): c for e, c in other.coeffs}
        return a, b, den

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def exponents(self) -> Iterable[Fraction]:
        return [Fraction(e, self.exp_den) for e, _ in self.coeffs]

    def min_exponent(self) -> Fraction:
        if self.is_zero:
            raise ZeroPolynomial("zero polynomial has no exponents")
        return Fraction(self.coeffs[0][0], self.exp_den)

    def max_exponent(self) -> Fraction:
        if self.is_zero:
            raise ZeroPolynomial("zero polynomial has no exponents")
        return Fraction(self.coeffs[-1][0], self.exp_den)

    def coefficient(self, exponent) -> int:
        target = Fraction(exponent)
        for e, c in self.coeffs:
            if Fraction(e, self.exp_den) == target:
                return c
        return 0

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other) -> "LaurentPolynomial":
        other = self._coerce(other)
        a, b, den = self._aligned(other)
        for e, c in b.items():
            a[e] = a.get(e, 0) + c
        return LaurentPolynomial.from_dict(self.variable, a, den)

    def __sub__(self, other) -> "LaurentPolynomial":
        other = self._coerce(other)
        return self + (-other)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial(self.variable, tuple((e, -c) for e, c in self.coeffs), self.exp_den)

    def __mul__(self, other) -> "LaurentPolynomial":
        other = self._coerce(other)
        a, b, den = self._aligned(other)
        out: Dict[int, int] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPolynomial.from_dict(self.variable, out, den)

    __rmul__ = __mul__
    __radd__ = __add__

    def _coerce(self, other) -> "LaurentPolynomial":
        if isinstance(other, LaurentPolynomial):
            return other
        if isinstance(other, int):
            return LaurentPolynomial.from_dict(self.variable, {0: other})
        raise TypeError(f"cannot combine LaurentPolynomial with {type(other)}")

    def shift(self, exponent: int) -> "LaurentPolynomial":
        """Multiply by var**exponent (exponent counts in units of 1/exp_den)."""
        return LaurentPolynomial(
            self.variable, tuple((e + exponent, c) for e, c in self.coeffs), self.exp_den
        )._normalized()

    def scale(self, k: int) -> "LaurentPolynomial":
        if k == 0:
            return LaurentPolynomial.zero(self.variable)
        return LaurentPolynomial(
            self.variable, tuple((e, c * k) for e, c in self.coeffs), self.exp_den
        )

    def substitute_value(self, value: Fraction) -> Fraction:
        """Evaluate at a rational value (integer exponents only)."""
        if self.exp_den != 1:
            raise ValueError("cannot evaluate a polynomial with fractional exponents")
        total = Fraction(0)
        v = Fraction(value)
        for e, c in self.coeffs:
            total += c * v ** e
        return total

    def reversed_variable(self) -> "LaurentPolynomial":
        """The polynomial with var replaced by var^-1."""
        return LaurentPolynomial.from_dict(
            self.variable, {-e: c for e, c in self.coeffs}, self.exp_den
        )

    def with_variable(self, name: str) -> "LaurentPolynomial":
        return LaurentPolynomial(name, self.coeffs, self.exp_den)

    def is_palindromic(self) -> bool:
        """Delta(1/t) * t^(min+max) == Delta(t)."""
        if self.is_zero:
            return True
        lo = self.coeffs[0][0]
        hi = self.coeffs[-1][0]
        table = dict(self.coeffs)
        return all(table.get(lo + hi - e) == c for e, c in self.coeffs)

    # -- formatting -------------------------------------------------------
    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for e, c in sorted(self.coeffs, reverse=True):
            exp = Fraction(e, self.exp_den)
            if exp == 0:
                body = str(abs(c))
            else:
                exp_txt = str(exp) if exp.denominator == 1 else f"{exp.numerator}/{exp.denominator}"
                head = f"{self.variable}^{exp_txt}" if exp != 1 else self.variable
                body = head if abs(c) == 1 else f"{abs(c)}*{head}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self})"


def poly_divmod_exact(num: LaurentPolynomial, den: LaurentPolynomial) -> LaurentPolynomial:
    """Exact division of Laurent polynomials; raises when not divisible."""
    if den.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero:
        return LaurentPolynomial.zero(num.variable)
    if num.exp_den != 1 or den.exp_den != 1:
        raise ValueError("exact division expects integer exponents")
    n = dict(num.coeffs)
    d = dict(den.coeffs)
    d_hi = max(d)
    d_lead = d[d_hi]
    out: Dict[int, int] = {}
    guard = len(n) * (len(d) + 2) + 64
    while n:
        n_hi = max(n)
        c, rem = divmod(n[n_hi], d_lead)
        if rem != 0:
            raise ArithmeticError("polynomial division is not exact")
        e = n_hi - d_hi
        out[e] = out.get(e, 0) + c
        for de, dc in d.items():
            key = de + e
            val = n.get(key, 0) - dc * c
            if val == 0:
                n.pop(key, None)
            else:
                n[key] = val
        guard -= 1
        if guard < 0:
            raise ArithmeticError("polynomial division did not terminate")
    return LaurentPolynomial.from_dict(num.variable, out)
