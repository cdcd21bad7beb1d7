"""Leading-coefficient sequences log|Tor|/(2N), their limits and the limit set."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .invariants import alexander_torus, divisors, order_pk
from .reps import check_index, check_twist_parameter, index_range
from .torsion import graph_manifold_torsion

MULTIPLE_TOL = 1e-9


@dataclass(frozen=True, order=True)
class LimitValue:
    """(log m - log 2)/d held exactly as the integer pair (m, d)."""

    divisor: int
    log_arg: int

    @property
    def value(self) -> float:
        return (math.log(self.log_arg) - math.log(2)) / self.divisor

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return f"(log {self.log_arg} - log 2)/{self.divisor}"

    def to_json(self) -> dict[str, Any]:
        return {"exact": str(self), "log_arg": self.log_arg, "divisor": self.divisor, "value": self.value}


def predicted_limit(n: int, j: int) -> LimitValue:
    """(log|Delta_{T(2,2n+1)}(-1)| - log 2)/p_k."""
    delta = alexander_torus(n)
    delta_at_minus_one = sum(c * (-1) ** (e % 2) for e, c in delta.coefficients.items())
    return LimitValue(order_pk(n, j), abs(delta_at_minus_one))


@dataclass
class AsymptoticsReport:
    n: int
    j: int
    p_k: int
    limit: LimitValue
    N: list[int] = field(default_factory=list)
    sequence: list[float] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)
    decay_exponent: float | None = None

    @property
    def predicted_limit(self) -> float:
        return self.limit.value

    def multiples_ok(self, tol: float = MULTIPLE_TOL) -> bool:
        return all(e < tol for N, e in zip(self.N, self.errors) if N % self.p_k == 0)

    def rows(self) -> list[dict[str, Any]]:
        lim = self.limit.value
        return [
            {"N": N, "seq": s, "limit": lim, "abs_error": e}
            for N, s, e in zip(self.N, self.sequence, self.errors)
        ]

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "j": self.j,
            "p_k": self.p_k,
            "predicted_limit": self.limit.to_json(),
            "sequence": [[N, s] for N, s in zip(self.N, self.sequence)],
            "errors": list(self.errors),
            "decay_exponent": self.decay_exponent,
        }


def fit_decay_exponent(Ns, errors, p_k: int, floor: float = 1e-13) -> float | None:
    """Least-squares slope of -log(error) against log N over non-multiples of p_k."""
    pts = [(math.log(N), math.log(e)) for N, e in zip(Ns, errors) if N % p_k and e > floor]
    if len(pts) < 2:
        return None
    x, y = np.array(pts).T
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


def leading_coefficient_sequence(n: int, j: int, N_max: int, Ns=None) -> AsymptoticsReport:
    """log|Tor(M; sigma_2N o rho_bar)|/(2N) for N = 1..N_max (or the given Ns)."""
    check_index(n, j, "j")
    if N_max < 1:
        raise ValueError("N_max must be at least 1")
    Ns = list(range(1, N_max + 1)) if Ns is None else sorted(set(int(N) for N in Ns))
    if any(N < 1 or N > N_max for N in Ns):
        raise ValueError("sample points must lie in 1..N_max")
    report = AsymptoticsReport(n, j, order_pk(n, j), predicted_limit(n, j))
    lim = report.limit.value
    for N in Ns:
        tor = graph_manifold_torsion(n, j, N)
        s = float(tor.log_magnitude) / (2 * N)
        report.N.append(N)
        report.sequence.append(s)
        report.errors.append(abs(s - lim))
    report.decay_exponent = fit_decay_exponent(report.N, report.errors, report.p_k)
    return report


@dataclass(frozen=True)
class LimitSet:
    n: int
    values: frozenset[LimitValue]
    minimum: LimitValue
    realized: bool

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "limits": [v.to_json() for v in sorted(self.values)],
            "minimum": self.minimum.to_json(),
            "realized_over_j": self.realized,
        }


def limit_set(n: int) -> LimitSet:
    """{(log|2n+1| - log 2)/d : d | p, d > 1} with minimum at d = p.

    ``realized`` records whether every element is the predicted limit of
    some j in 1..(p-1)/2.
    """
    p = check_twist_parameter(n)
    m = abs(2 * n + 1)
    values = frozenset(LimitValue(d, m) for d in divisors(p) if d > 1)
    realized = frozenset(predicted_limit(n, j) for j in index_range(n))
    minimum = min(values, key=lambda v: v.value)
    if minimum != LimitValue(p, m):
        raise ArithmeticError(f"minimum {minimum} is not at divisor {p}")
    return LimitSet(n, values, minimum, realized == values)
