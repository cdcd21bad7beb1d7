"""Invariant checks for every module, run per twist parameter n."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .algebra import LaurentPolynomial, Matrix, RootOfUnity, eval_laurent
from .asymptotics import leading_coefficient_sequence, limit_set
from .groups import (
    GroupRingElement,
    Word,
    fox_derivative,
    graph_manifold_presentation,
    twist_knot_presentation,
)
from .invariants import a_poly_specialized, alexander_torus, alexander_twist, divisors, order_pk
from .reps import (
    check_twist_parameter,
    graph_manifold_reps,
    index_range,
    is_abelian,
    is_irreducible,
    jsj_torus_restriction,
    klein_restriction,
    metabelian_classes,
    random_sl2,
    sym_power,
    torus_knot_restriction,
)
from .torsion import (
    AcyclicityError,
    DegenerateDenominatorError,
    TorsionUndefinedError,
    abelian_knot_torsion,
    detect_period,
    factor_log_terms,
    fox_oracle_torsion,
    generic_torsion,
    graph_manifold_torsion,
    klein_bottle_complex,
    klein_bottle_torsion,
    torus_torsion_check,
)

RESIDUAL_TOL = 1e-12
AGREE_TOL = 1e-10
ORACLE_TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    module: str
    check: str
    n: int | None
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"module": self.module, "check": self.check, "n": self.n, "passed": self.passed, "detail": self.detail}


Outcome = tuple[bool, str]


def _rel(a, b) -> float:
    return abs(a - b) / max(1.0, abs(b))


# algebra --------------------------------------------------------------------


def check_root_orders(rng) -> Outcome:
    for p in range(3, 40, 2):
        for odd in range(1, p, 2):
            xi = RootOfUnity(odd, p)
            order = xi.order()
            if order != 2 * p // math.gcd(odd, p) or not (xi ** order).is_one():
                return False, f"order of exp(i pi {odd}/{p}) is {order}"
            if abs(xi.to_complex() ** order - 1) > 1e-12:
                return False, f"embedding of exp(i pi {odd}/{p}) is not a root of unity"
    return True, "exact orders of exp(i pi a/p) for odd a, p < 40"


def check_laurent_division(rng) -> Outcome:
    for _ in range(20):
        a = LaurentPolynomial.from_list([int(c) for c in rng.integers(-5, 6, size=5)], int(rng.integers(0, 3)))
        b = LaurentPolynomial.from_list([int(c) for c in rng.integers(-5, 6, size=3)] + [1], 0)
        q, r = (a * b).divmod(b)
        if q != a or not r.is_zero():
            return False, f"({a})*({b}) / ({b}) gave {q} remainder {r}"
    return True, "20 seeded exact divisions"


def check_determinants(rng) -> Outcome:
    worst = 0.0
    for dim in (3, 6, 10):
        a = Matrix(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
        b = Matrix(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
        worst = max(worst, _rel((a @ b).det(), a.det() * b.det()))
        worst = max(worst, (a @ a.inverse() - Matrix.identity(dim)).max_norm())
    return worst < 1e-10, f"max deviation {worst:.2e}"


# groups ---------------------------------------------------------------------


def check_fox_fundamental(n: int) -> Outcome:
    for pres in (twist_knot_presentation(n), graph_manifold_presentation(n)):
        for r in pres.relators:
            total = GroupRingElement()
            for g in range(pres.rank):
                total = total + fox_derivative(r, g) * (GroupRingElement.of(Word.generator(g)) - GroupRingElement.one())
            if total != GroupRingElement.of(r) - GroupRingElement.one():
                return False, f"fundamental formula fails for {pres.format_word(r)}"
    return True, "sum_g (dr/dg)(g - 1) = r - 1 for all relators"


# reps -----------------------------------------------------------------------


def check_metabelian_reps(n: int) -> Outcome:
    reps = metabelian_classes(n)
    p = check_twist_parameter(n)
    if len(reps) != (p - 1) // 2:
        return False, f"{len(reps)} classes, expected {(p - 1) // 2}"
    worst = max(r.relation_report().max_residual for r in reps)
    if worst >= RESIDUAL_TOL:
        return False, f"relator residual {worst:.2e}"
    bad = [r.metadata["k"] for r in reps if not (r.is_irreducible and r.is_metabelian)]
    if bad:
        return False, f"k = {bad} not irreducible metabelian"
    return True, f"{len(reps)} classes, residual {worst:.1e}"


def check_graph_reps(n: int) -> Outcome:
    reps = graph_manifold_reps(n)
    p = check_twist_parameter(n)
    if len(reps) != (p - 1) // 2:
        return False, f"{len(reps)} reps, expected {(p - 1) // 2}"
    worst = max(r.relation_report().max_residual for r in reps)
    if worst >= RESIDUAL_TOL:
        return False, f"relator residual {worst:.2e}"
    for r in reps:
        j = r.metadata["j"]
        if not is_abelian(torus_knot_restriction(r)):
            return False, f"j = {j}: restriction to <a, b> not abelian"
        if not is_irreducible(klein_restriction(r)):
            return False, f"j = {j}: restriction to <x, y> not irreducible"
    return True, f"{len(reps)} reps, residual {worst:.1e}"


def check_sym_power_homomorphism(rng) -> Outcome:
    worst = 0.0
    for _ in range(100):
        a, b = random_sl2(rng), random_sl2(rng)
        for dim in range(2, 13, 2):
            lhs = sym_power(a @ b, dim)
            rhs = sym_power(a, dim) @ sym_power(b, dim)
            worst = max(worst, (lhs - rhs).max_norm() / max(1.0, rhs.max_norm()))
    return worst < AGREE_TOL, f"100 pairs, 2N <= 12, max relative error {worst:.2e}"


def check_sym_power_eigenvalues(rng) -> Outcome:
    for p in (5, 7, 9, 13):
        xi = RootOfUnity(1, p)
        a = Matrix.diag([xi.to_complex(), xi.inverse().to_complex()])
        for N in range(1, 7):
            got = np.diag(sym_power(a, 2 * N).entries).astype(complex)
            want = [(xi ** s).to_complex() for i in range(1, N + 1) for s in (2 * i - 1, 1 - 2 * i)]
            if not _same_multiset(got, want):
                return False, f"eigenvalues of sigma_{2 * N}(diag(xi, 1/xi)), p = {p}"
    return True, "diagonal inputs give {xi^(+-(2i-1))}"


def _same_multiset(a, b, tol=1e-10) -> bool:
    rest = list(b)
    for z in a:
        k = next((i for i, w in enumerate(rest) if abs(z - w) < tol), None)
        if k is None:
            return False
        rest.pop(k)
    return not rest


# torsion --------------------------------------------------------------------


def check_klein_torsion(n: int) -> Outcome:
    worst = 0.0
    for rep in graph_manifold_reps(n):
        kr = klein_restriction(rep)
        for N in range(1, 11):
            kb = klein_bottle_torsion(kr, N)
            worst = max(worst, abs(kb.value - 1))
    return worst < AGREE_TOL, f"2N = 2..20, max |Tor - 1| = {worst:.2e}"


def check_klein_engine(n: int) -> Outcome:
    worst = 0.0
    for rep in graph_manifold_reps(n):
        kr = klein_restriction(rep)
        for N in (1, 2, 3):
            c = klein_bottle_complex(kr, N)
            if c.chain_residual() > RESIDUAL_TOL:
                return False, f"chain condition fails, residual {c.chain_residual():.2e}"
            eng = generic_torsion(c)
            worst = max(worst, _rel(eng.value, klein_bottle_torsion(kr, N).value))
    return worst < AGREE_TOL, f"2N <= 6, max relative deviation {worst:.2e}"


def check_lift_independence(n: int, rng) -> Outcome:
    kr = klein_restriction(graph_manifold_reps(n)[0])
    c = klein_bottle_complex(kr, 2)
    ref = generic_torsion(c).value
    worst = max(_rel(generic_torsion(c, rng).value, ref) for _ in range(10))
    return worst < AGREE_TOL, f"10 random lifts, max deviation {worst:.2e}"


def fox_with_swap(pres, rep, N):
    try:
        return fox_oracle_torsion(pres, rep, N, denominator=1)
    except DegenerateDenominatorError:
        return fox_oracle_torsion(pres, rep, N, denominator=0)


def check_oracle_pair(n: int) -> Outcome:
    delta = alexander_torus(n)
    worst = 0.0
    for rep in graph_manifold_reps(n):
        tr = torus_knot_restriction(rep)
        xi = rep.metadata["xi"]
        for N in (1, 2, 3):
            try:
                ab = abelian_knot_torsion(delta, xi, N)
            except TorsionUndefinedError:
                try:
                    fox_with_swap(tr.presentation, tr, N)
                except (AcyclicityError, DegenerateDenominatorError):
                    continue
                return False, f"j = {rep.metadata['j']}, N = {N}: closed form undefined but Fox oracle defined"
            fox = fox_with_swap(tr.presentation, tr, N)
            worst = max(worst, abs(fox.value - ab.value) / abs(ab.value))
    return worst < ORACLE_TOL, f"N <= 3, max relative deviation {worst:.2e}"


def check_gluing(n: int) -> Outcome:
    delta = alexander_torus(n)
    for rep in graph_manifold_reps(n):
        j = rep.metadata["j"]
        for N in (1, 2, 5, 8):
            glued = graph_manifold_torsion(n, j, N)
            piece = abelian_knot_torsion(delta, rep.metadata["xi"], N)
            if glued.log_magnitude != piece.log_magnitude:
                return False, f"j = {j}, N = {N}: log {glued.log_magnitude} vs {piece.log_magnitude}"
    return True, "Klein factor contributes exactly 0"


def check_periodicity(n: int) -> Outcome:
    for j in index_range(n):
        pk = order_pk(n, j)
        period = detect_period(factor_log_terms(n, j, 3 * pk))
        if period != pk:
            return False, f"j = {j}: period {period}, expected p_k = {pk}"
    return True, "factor sequence has period p_k"


def check_torus_torsion(n: int) -> Outcome:
    worst = 0.0
    for rep in graph_manifold_reps(n):
        tr = jsj_torus_restriction(rep)
        for N in (1, 2):
            try:
                worst = max(worst, abs(torus_torsion_check(tr, N).value - 1))
            except TorsionUndefinedError:
                continue
    return worst < AGREE_TOL, f"JSJ torus, max |Tor - 1| = {worst:.2e}"


# invariants and asymptotics ----------------------------------------------------


def check_alexander_values(n: int) -> Outcome:
    p = check_twist_parameter(n)
    tw = alexander_twist(n)
    tw_minus = sum(c * (-1) ** (e % 2) for e, c in tw.coefficients.items())
    if tw_minus != -(4 * n + 1) or abs(tw_minus) != p:
        return False, f"Delta_K(-1) = {tw_minus}"
    if tw.reflect().shift(2) != tw:
        return False, "twist-knot polynomial not palindromic"
    to = alexander_torus(n)
    to_minus = sum(c * (-1) ** (e % 2) for e, c in to.coefficients.items())
    if abs(to_minus) != abs(2 * n + 1):
        return False, f"Delta_T(-1) = {to_minus}"
    return True, f"|Delta_K(-1)| = {p}, |Delta_T(-1)| = {abs(2 * n + 1)}"


def a_poly_oracle(n: int) -> dict[int, int]:
    """Binomial expansion of the factored specialised A-polynomial."""
    e, shift = (2 * n, -8 * n) if n > 0 else (2 * abs(n) - 1, -8 * abs(n) + 3)
    out: dict[int, int] = {}
    for i in range(e + 1):
        out[e - 2 * i + shift] = out.get(e - 2 * i + shift, 0) + math.comb(e, i)
    return out


def check_a_poly(n: int) -> Outcome:
    got = a_poly_specialized(n).coefficients
    want = a_poly_oracle(n)
    if got != want:
        return False, f"{got} != {want}"
    return True, f"{len(want)} coefficients match the binomial expansion"


def check_orders(n: int) -> Outcome:
    p = check_twist_parameter(n)
    orders = {order_pk(n, j) for j in index_range(n)}
    want = {d for d in divisors(p) if d > 1}
    if orders != want:
        return False, f"p_k values {sorted(orders)} vs divisors {sorted(want)}"
    for pk in orders:
        if math.gcd(2 * pk, 2 * n + 1) != 1:
            return False, f"gcd(2 p_k, 2n + 1) != 1 for p_k = {pk}"
    return True, f"p_k runs over divisors {sorted(want)}"


def check_cycle_identities(n: int) -> Outcome:
    delta = alexander_torus(n)
    for j in index_range(n):
        pk = order_pk(n, j)
        xi = RootOfUnity(2 * j - 1, check_twist_parameter(n))
        num = sum(math.log(abs(eval_laurent(delta, xi ** (2 * i - 1)))) for i in range(1, pk + 1))
        den = sum(math.log(abs((xi ** (2 * i - 1)).to_complex() - 1)) for i in range(1, pk + 1))
        if abs(math.exp(num) - abs(2 * n + 1)) > ORACLE_TOL or abs(math.exp(den) - 2) > ORACLE_TOL:
            return False, f"j = {j}: cycle products {math.exp(num)}, {math.exp(den)}"
    return True, "|prod Delta| = |2n+1| and |prod (xi - 1)| = 2 over a cycle"


def check_limits_at_multiples(n: int) -> Outcome:
    worst = 0.0
    for j in index_range(n):
        pk = order_pk(n, j)
        rep = leading_coefficient_sequence(n, j, 2 * pk, Ns=[pk, 2 * pk])
        worst = max(worst, max(rep.errors))
    return worst < ORACLE_TOL, f"N in {{p_k, 2 p_k}}, max error {worst:.2e}"


def check_limit_set(n: int) -> Outcome:
    ls = limit_set(n)
    p = check_twist_parameter(n)
    if not ls.realized:
        return False, "limit set not realised over j"
    want_min = (math.log(abs(2 * n + 1)) - math.log(2)) / p
    if abs(ls.minimum.value - want_min) > 1e-15:
        return False, f"minimum {ls.minimum.value} vs {want_min}"
    return True, f"{len(ls.values)} limits, minimum {ls.minimum}"


GLOBAL_CHECKS: list[tuple[str, str, Callable]] = [
    ("algebra", "root-of-unity-orders", check_root_orders),
    ("algebra", "laurent-exact-division", check_laurent_division),
    ("algebra", "determinant-multiplicative", check_determinants),
    ("reps", "sym-power-homomorphism", check_sym_power_homomorphism),
    ("reps", "sym-power-eigenvalues", check_sym_power_eigenvalues),
]

PER_N_CHECKS: list[tuple[str, str, Callable]] = [
    ("groups", "fox-fundamental-formula", lambda n, rng: check_fox_fundamental(n)),
    ("reps", "metabelian-representatives", lambda n, rng: check_metabelian_reps(n)),
    ("reps", "graph-manifold-representatives", lambda n, rng: check_graph_reps(n)),
    ("torsion", "klein-torsion-one", lambda n, rng: check_klein_torsion(n)),
    ("torsion", "klein-engine-agreement", lambda n, rng: check_klein_engine(n)),
    ("torsion", "lift-independence", check_lift_independence),
    ("torsion", "fox-vs-closed-form", lambda n, rng: check_oracle_pair(n)),
    ("torsion", "gluing", lambda n, rng: check_gluing(n)),
    ("torsion", "periodicity", lambda n, rng: check_periodicity(n)),
    ("torsion", "torus-torsion", lambda n, rng: check_torus_torsion(n)),
    ("invariants_asymptotics", "alexander-values", lambda n, rng: check_alexander_values(n)),
    ("invariants_asymptotics", "a-polynomial", lambda n, rng: check_a_poly(n)),
    ("invariants_asymptotics", "orders-are-divisors", lambda n, rng: check_orders(n)),
    ("invariants_asymptotics", "cycle-identities", lambda n, rng: check_cycle_identities(n)),
    ("invariants_asymptotics", "limit-at-multiples", lambda n, rng: check_limits_at_multiples(n)),
    ("invariants_asymptotics", "limit-set", lambda n, rng: check_limit_set(n)),
]


def _run(fn, *args) -> Outcome:
    try:
        return fn(*args)
    except Exception as exc:  # a crash is a failed check, reported by name
        return False, f"{type(exc).__name__}: {exc}"


def run_checks(ns: Iterable[int], seed: int = 0) -> list[CheckResult]:
    """Run every check; each draws randomness from its own seeded generator."""
    ns = list(ns)
    for n in ns:
        check_twist_parameter(n)
    results = []
    for module, name, fn in GLOBAL_CHECKS:
        ok, detail = _run(fn, np.random.default_rng(seed))
        results.append(CheckResult(module, name, None, bool(ok), detail))
    for n in ns:
        for module, name, fn in PER_N_CHECKS:
            ok, detail = _run(fn, n, np.random.default_rng([seed, n & 0xFFFFFFFF]))
            results.append(CheckResult(module, name, n, bool(ok), detail))
    return results
