"""Laurent polynomials with integer coefficients."""

from __future__ import annotations

import numbers
from collections import defaultdict
from typing import Iterable, Mapping

from .scalars import ComplexScalar, RootOfUnity, to_scalar


class LaurentPolynomial:
    """An element of Z[t, 1/t], stored as a sparse {exponent: coefficient} map.

    Coefficients must be integers; anything else raises TypeError.
    """

    __slots__ = ("_c", "var")

    def __init__(self, coefficients: Mapping[int, int] | None = None, var: str = "t"):
        c = {}
        for e, a in (coefficients or {}).items():
            if not isinstance(e, numbers.Integral):
                raise TypeError(f"exponent {e!r} is not an integer")
            if not isinstance(a, numbers.Integral):
                raise TypeError(f"coefficient {a!r} is not an integer")
            if a:
                c[int(e)] = int(a)
        self._c = c
        self.var = var

    @classmethod
    def from_list(cls, coeffs: Iterable[int], low: int = 0, var: str = "t") -> LaurentPolynomial:
        """Coefficients listed from exponent ``low`` upwards."""
        return cls({low + i: a for i, a in enumerate(coeffs)}, var)

    @classmethod
    def monomial(cls, exponent: int, coeff: int = 1, var: str = "t") -> LaurentPolynomial:
        return cls({exponent: coeff}, var)

    @classmethod
    def constant(cls, c: int, var: str = "t") -> LaurentPolynomial:
        return cls({0: c}, var)

    @property
    def coefficients(self) -> dict[int, int]:
        return dict(self._c)

    def __getitem__(self, e: int) -> int:
        return self._c.get(e, 0)

    def is_zero(self) -> bool:
        return not self._c

    def degree(self) -> int:
        if not self._c:
            raise ValueError("zero polynomial has no degree")
        return max(self._c)

    def valuation(self) -> int:
        if not self._c:
            raise ValueError("zero polynomial has no valuation")
        return min(self._c)

    def __eq__(self, other) -> bool:
        if isinstance(other, numbers.Integral):
            other = LaurentPolynomial.constant(other)
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def _lift(self, other) -> LaurentPolynomial:
        if isinstance(other, LaurentPolynomial):
            return other
        if isinstance(other, numbers.Integral):
            return LaurentPolynomial.constant(other, self.var)
        raise TypeError(f"cannot combine LaurentPolynomial with {type(other).__name__}")

    def __add__(self, other) -> LaurentPolynomial:
        other = self._lift(other)
        c = defaultdict(int, self._c)
        for e, a in other._c.items():
            c[e] += a
        return LaurentPolynomial(c, self.var)

    __radd__ = __add__

    def __neg__(self) -> LaurentPolynomial:
        return LaurentPolynomial({e: -a for e, a in self._c.items()}, self.var)

    def __sub__(self, other) -> LaurentPolynomial:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> LaurentPolynomial:
        return self._lift(other) - self

    def __mul__(self, other) -> LaurentPolynomial:
        other = self._lift(other)
        c = defaultdict(int)
        for e1, a1 in self._c.items():
            for e2, a2 in other._c.items():
                c[e1 + e2] += a1 * a2
        return LaurentPolynomial(c, self.var)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> LaurentPolynomial:
        if k < 0:
            if len(self._c) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, a), = self._c.items()
            if a not in (1, -1):
                raise ValueError("monomial with non-unit coefficient is not invertible over Z")
            return LaurentPolynomial({-e * -k: a ** -k}, self.var)
        result = LaurentPolynomial.constant(1, self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int) -> LaurentPolynomial:
        """Multiply by t^k."""
        return LaurentPolynomial({e + k: a for e, a in self._c.items()}, self.var)

    def reflect(self) -> LaurentPolynomial:
        """Substitute t -> 1/t."""
        return LaurentPolynomial({-e: a for e, a in self._c.items()}, self.var)

    def divmod(self, divisor: LaurentPolynomial) -> tuple[LaurentPolynomial, LaurentPolynomial]:
        """Long division of genuine polynomials over Z.

        The divisor must have leading coefficient +-1 so the quotient stays
        integral.  Both operands must have non-negative valuation.
        """
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if (self._c and self.valuation() < 0) or divisor.valuation() < 0:
            raise ValueError("divmod is defined for polynomials, not Laurent polynomials")
        lead_e = divisor.degree()
        lead = divisor[lead_e]
        if lead not in (1, -1):
            raise ValueError("divisor must be monic up to sign")
        rem = dict(self._c)
        quo: dict[int, int] = {}
        while rem and max(rem) >= lead_e:
            e = max(rem)
            q = rem[e] * lead  # lead is its own inverse
            quo[e - lead_e] = q
            for de, da in divisor._c.items():
                k = e - lead_e + de
                rem[k] = rem.get(k, 0) - q * da
                if rem[k] == 0:
                    del rem[k]
        return LaurentPolynomial(quo, self.var), LaurentPolynomial(rem, self.var)

    def __call__(self, z) -> ComplexScalar:
        return eval_laurent(self, z)

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self._c!r})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for e in sorted(self._c, reverse=True):
            a = self._c[e]
            sign = "-" if a < 0 else "+"
            mag = abs(a)
            if e == 0:
                body = str(mag)
            else:
                power = self.var if e == 1 else f"{self.var}^{e}"
                body = power if mag == 1 else f"{mag}{power}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def eval_laurent(p: LaurentPolynomial, z) -> ComplexScalar:
    """Evaluate ``p`` at a scalar or an exact root of unity.

    For a root of unity the monomials are first collected by their exact
    value, so only one floating-point embedding per distinct root happens.
    For a scalar, Horner's rule runs on t^(-valuation) * p.
    """
    if p.is_zero():
        return to_scalar(0)
    if isinstance(z, RootOfUnity):
        grouped: dict[RootOfUnity, int] = defaultdict(int)
        for e, a in p.coefficients.items():
            grouped[z ** e] += a
        total = to_scalar(0)
        for root in sorted(grouped, key=lambda r: (r.denom, r.numer)):
            a = grouped[root]
            if a:
                total = total + a * root.to_complex()
        return total
    z = to_scalar(z)
    low, high = p.valuation(), p.degree()
    acc = to_scalar(0)
    for e in range(high, low - 1, -1):
        acc = acc * z + p[e]
    if low:
        acc = acc * z ** low
    return acc
