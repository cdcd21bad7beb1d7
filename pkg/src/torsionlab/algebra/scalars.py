"""Complex scalars at a configurable working precision, and exact roots of unity.

At the default precision (53 bits) scalars are plain Python ``complex``
values.  Above that they are ``mpmath.mpc`` values and every matrix built
while the higher precision is active carries ``object`` entries.
"""

from __future__ import annotations

import contextlib
import math
import os
from fractions import Fraction
from typing import Iterator, Union

import mpmath

ComplexScalar = Union[complex, mpmath.mpc]

DEFAULT_BITS = 53
ENV_VAR = "TORSIONLAB_PRECISION_BITS"


def bits_from_env() -> int:
    """Precision requested through the environment, or the default."""
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_BITS
    bits = int(raw)
    if bits < DEFAULT_BITS:
        raise ValueError(f"{ENV_VAR} must be at least {DEFAULT_BITS}, got {bits}")
    return bits


_precision_bits = DEFAULT_BITS


def get_precision() -> int:
    """Current working precision in bits."""
    return _precision_bits


def set_precision(bits: int) -> None:
    global _precision_bits
    if bits < DEFAULT_BITS:
        raise ValueError(f"precision must be at least {DEFAULT_BITS} bits, got {bits}")
    _precision_bits = int(bits)
    mpmath.mp.prec = max(int(bits), DEFAULT_BITS)


set_precision(bits_from_env())


@contextlib.contextmanager
def precision(bits: int) -> Iterator[int]:
    """Temporarily switch the working precision.

    >>> with precision(256):
    ...     pass
    """
    old_bits, old_mp = _precision_bits, mpmath.mp.prec
    set_precision(bits)
    try:
        yield bits
    finally:
        set_precision(old_bits)
        mpmath.mp.prec = old_mp


def is_extended() -> bool:
    return _precision_bits > DEFAULT_BITS


def to_scalar(z) -> ComplexScalar:
    """Coerce a number (or RootOfUnity) to a scalar at the working precision."""
    if isinstance(z, RootOfUnity):
        return z.to_complex()
    if is_extended():
        if isinstance(z, mpmath.mpc):
            return z
        if isinstance(z, complex):
            return mpmath.mpc(z.real, z.imag)
        return mpmath.mpc(z)
    if isinstance(z, mpmath.mpc):
        return complex(z)
    return complex(z)


def tolerance(dim: int = 1) -> float:
    """Relative tolerance: 1e-10 at binary64 for dim <= 64, linear in dim above.

    Extended precision tightens the base value by the extra bits, down to a
    floor of 1e-60.
    """
    base = 1e-10
    extra = _precision_bits - DEFAULT_BITS
    if extra > 0:
        base = max(base * 2.0 ** (-extra), 1e-60)
    return base * max(1.0, dim / 64.0)


def log_magnitude(z) -> float:
    """Natural log of ``|z|``; raises ValueError for zero."""
    if isinstance(z, RootOfUnity):
        return 0.0
    if isinstance(z, (mpmath.mpc, mpmath.mpf)):
        if z == 0:
            raise ValueError("log_magnitude of zero")
        return mpmath.log(abs(z))
    if z == 0:
        raise ValueError("log_magnitude of zero")
    return math.log(abs(z))


class RootOfUnity:
    """The exact value ``exp(i*pi*numer/denom)``.

    The exponent is kept as a reduced fraction taken modulo 2, stored as the
    integer pair (numer, denom) with 0 <= numer < 2*denom, so equality,
    products and powers are exact.
    """

    __slots__ = ("_n", "_d")

    def __init__(self, numer: int, denom: int = 1):
        if denom <= 0:
            raise ValueError("denominator must be positive")
        numer, denom = int(numer), int(denom)
        g = math.gcd(numer, denom)
        numer, denom = numer // g, denom // g
        self._n = numer % (2 * denom)
        self._d = denom

    @property
    def numer(self) -> int:
        return self._n

    @property
    def denom(self) -> int:
        return self._d

    @property
    def turn(self) -> Fraction:
        """The exponent numer/denom in [0, 2)."""
        return Fraction(self._n, self._d)

    def __repr__(self) -> str:
        return f"RootOfUnity({self._n}, {self._d})"

    def __str__(self) -> str:
        return f"exp({self._n}*i*pi/{self._d})"

    def __eq__(self, other) -> bool:
        if isinstance(other, RootOfUnity):
            return self._n == other._n and self._d == other._d
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("RootOfUnity", self._n, self._d))

    def __mul__(self, other):
        if isinstance(other, RootOfUnity):
            return RootOfUnity(self._n * other._d + other._n * self._d, self._d * other._d)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, RootOfUnity):
            return RootOfUnity(self._n * other._d - other._n * self._d, self._d * other._d)
        return NotImplemented

    def __pow__(self, k: int) -> RootOfUnity:
        return RootOfUnity(self._n * k, self._d)

    def inverse(self) -> RootOfUnity:
        return RootOfUnity(-self._n, self._d)

    def is_one(self) -> bool:
        return self._n == 0

    def order(self) -> int:
        """Multiplicative order: exp(2*pi*i * numer/(2*denom))."""
        return 2 * self.denom // math.gcd(self.numer, 2 * self.denom)

    def to_complex(self) -> ComplexScalar:
        # angle reduced to (-1, 1] so cos/sin see small arguments
        t = self.turn if self._n <= self._d else self.turn - 2
        if is_extended():
            return mpmath.expjpi(mpmath.mpf(t.numerator) / t.denominator)
        if t == 0:
            return 1 + 0j
        if t == 1:
            return -1 + 0j
        if t == Fraction(1, 2):
            return 1j
        if t == Fraction(-1, 2):
            return -1j
        x = math.pi * t.numerator / t.denominator
        return complex(math.cos(x), math.sin(x))

    def __complex__(self) -> complex:
        return complex(self.to_complex())


def primitive_root(order: int) -> RootOfUnity:
    """exp(2*pi*i/order)."""
    return RootOfUnity(2, order)


def close(a, b, rel: float | None = None, abs_tol: float = 0.0) -> bool:
    """Relative comparison of two scalars with an absolute floor."""
    rel = tolerance() if rel is None else rel
    diff = abs(to_scalar(a) - to_scalar(b))
    scale = max(abs(to_scalar(a)), abs(to_scalar(b)))
    return diff <= max(rel * scale, abs_tol)


__all__ = [
    "ComplexScalar",
    "RootOfUnity",
    "DEFAULT_BITS",
    "ENV_VAR",
    "close",
    "get_precision",
    "is_extended",
    "log_magnitude",
    "precision",
    "primitive_root",
    "set_precision",
    "to_scalar",
    "tolerance",
]
