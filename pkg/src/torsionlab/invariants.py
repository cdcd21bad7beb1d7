"""Closed-form knot invariants for twist knots K_n and torus knots T(2, 2n+1)."""

from __future__ import annotations

import math

from .algebra import LaurentPolynomial, RootOfUnity
from .reps import check_index, check_twist_parameter, index_range


def determinant_p(n: int) -> int:
    """|Delta_{K_n}(-1)| = |4n+1|."""
    return check_twist_parameter(n)


def alexander_twist(n: int) -> LaurentPolynomial:
    """-n t^2 + (2n+1) t - n."""
    if n == 0:
        raise ValueError("n = 0 gives the unknot")
    return LaurentPolynomial({2: -n, 1: 2 * n + 1, 0: -n})


def alexander_torus(n: int) -> LaurentPolynomial:
    """(t^m + 1)/(t + 1) with m = |2n+1|, i.e. 1 - t + t^2 - ... + t^(m-1).

    T(2, 2n+1) for negative n is the mirror of T(2, |2n+1|) and has the same
    Alexander polynomial.
    """
    m = abs(2 * n + 1)
    if m == 1:
        raise ValueError(f"T(2, {2 * n + 1}) is the unknot")
    num = LaurentPolynomial({m: 1, 0: 1})
    quo, rem = num.divmod(LaurentPolynomial({1: 1, 0: 1}))
    if not rem.is_zero():
        raise ArithmeticError(f"t^{m} + 1 is not divisible by t + 1")
    return quo


def a_poly_specialized(n: int) -> LaurentPolynomial:
    """A_{K_n}(M^-4, M) expanded in the meridian eigenvalue M.

    n > 0: M^(-8n) (M + 1/M)^(2n);  n < 0: M^(-8|n|+3) (M + 1/M)^(2|n|-1).
    """
    check_twist_parameter(n)
    trace = LaurentPolynomial({1: 1, -1: 1}, var="M")
    if n > 0:
        return (trace ** (2 * n)).shift(-8 * n)
    m = abs(n)
    return (trace ** (2 * m - 1)).shift(-8 * m + 3)


def eigenvalue_set(n: int) -> list[tuple[RootOfUnity, RootOfUnity]]:
    """Conjugate pairs (xi, 1/xi), xi = exp(i pi (2j-1)/p), j = 1..(p-1)/2."""
    p = check_twist_parameter(n)
    out = []
    for j in index_range(n):
        xi = RootOfUnity(2 * j - 1, p)
        out.append((xi, xi.inverse()))
    return out


def order_pk(n: int, j: int) -> int:
    """p_k = p / gcd(2j-1, p); the meridian image has order 2 p_k."""
    check_index(n, j, "j")
    p = abs(4 * n + 1)
    pk = p // math.gcd(2 * j - 1, p)
    xi = RootOfUnity(2 * j - 1, p)
    if xi.order() != 2 * pk:
        raise ArithmeticError(f"order of {xi} is {xi.order()}, expected {2 * pk}")
    return pk


def divisors(m: int) -> list[int]:
    m = abs(m)
    return sorted(d for d in range(1, m + 1) if m % d == 0)
