"""Reidemeister torsion of twisted chain complexes.

The generic engine evaluates the alternating product of base-change
determinants directly.  The closed forms cover the Klein bottle, abelian
representations of knot exteriors and the surgered twist-knot manifold; the
Fox-calculus complex of a presentation serves as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import mpmath
import numpy as np

from .algebra import (
    LaurentPolynomial,
    Matrix,
    RootOfUnity,
    eval_laurent,
    log_magnitude,
    pivot_columns,
    slogdet,
    slogdet_checked,
    to_scalar,
    tolerance,
)
from .groups import (
    Presentation,
    _ImageTable,
    fox_derivative,
    klein_bottle_presentation,
    torus_presentation,
    verify_relations,
)
from .invariants import alexander_torus
from .reps import (
    RELATION_TOL,
    Rep,
    SymPowerLift,
    check_index,
    graph_manifold_rep,
    klein_restriction,
)

ENGINE_MAX_DIM = 512
VALUE_MAX_N = 16


class TorsionError(Exception):
    """Base class for torsion failures."""


class TorsionUndefinedError(TorsionError):
    """The torsion is not defined for this complex/representation."""


class AcyclicityError(TorsionUndefinedError):
    def __init__(self, degree: int, detail: str = ""):
        self.degree = degree
        msg = f"complex is not acyclic in degree {degree}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class PoleError(TorsionUndefinedError):
    def __init__(self, index: int, detail: str = ""):
        self.index = index
        super().__init__(f"pole at factor i = {index}" + (f": {detail}" if detail else ""))


class DegenerateDenominatorError(TorsionError):
    pass


@dataclass(frozen=True)
class TorsionValue:
    """A torsion with its log-magnitude; ``value`` is None when not materialised."""

    value: complex | None
    log_magnitude: float
    provenance: str
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {k: self.meta[k] for k in ("n", "j", "N") if k in self.meta}
        out["log_magnitude"] = float(self.log_magnitude)
        if self.value is not None:
            v = complex(self.value)
            out["value_re"] = v.real
            out["value_im"] = v.imag
        if isinstance(self.log_magnitude, mpmath.mpf):
            digits = int(mpmath.mp.prec * 0.30103)
            out["log_magnitude_str"] = mpmath.nstr(self.log_magnitude, digits)
            if self.value is not None:
                out["value_str"] = mpmath.nstr(mpmath.mpc(self.value), digits)
        out["provenance"] = self.provenance
        return out


def _combine(phase, logabs: float, materialise: bool = True) -> complex | None:
    if not materialise or not math.isfinite(float(logabs)) or abs(float(logabs)) > 700:
        return None
    if isinstance(phase, mpmath.mpc):
        return phase * mpmath.exp(logabs)
    return complex(phase) * math.exp(float(logabs))


# chain complexes --------------------------------------------------------------


@dataclass(frozen=True)
class TwistedChainComplex:
    """0 -> C_top -> ... -> C_0 -> 0 with ``boundaries[i-1]`` = d_i : C_i -> C_(i-1).

    ``dims[i]`` is the dimension of C_i in the equipped basis and
    ``labels[i]`` names its basis vectors ("cell (x) basis index").
    ``scale`` is the magnitude of the data the boundaries were built from;
    rank decisions never treat entries far below it as nonzero, so maps that
    cancel to round-off count as zero.
    """

    dims: tuple[int, ...]
    boundaries: tuple[Matrix, ...]
    labels: tuple[tuple[str, ...], ...] = ()
    scale: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        if len(self.boundaries) != len(self.dims) - 1:
            raise ValueError("need exactly one boundary map between consecutive degrees")
        for i, d in enumerate(self.boundaries, start=1):
            if d.shape != (self.dims[i - 1], self.dims[i]):
                raise ValueError(
                    f"d_{i} has shape {d.shape}, expected {(self.dims[i - 1], self.dims[i])}"
                )
        if self.labels:
            object.__setattr__(self, "labels", tuple(tuple(l) for l in self.labels))
            for i, lab in enumerate(self.labels):
                if len(lab) != self.dims[i]:
                    raise ValueError(f"degree {i} has {len(lab)} labels for dimension {self.dims[i]}")

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def boundary(self, i: int) -> Matrix:
        """d_i, with zero maps outside 1..top."""
        if 1 <= i <= self.top:
            return self.boundaries[i - 1]
        rows = self.dims[i - 1] if 1 <= i <= self.top + 1 else 0
        cols = self.dims[i] if 0 <= i <= self.top else 0
        return Matrix.zeros(rows, cols)

    def chain_residual(self) -> float:
        """max over i of ||d_(i-1) d_i||."""
        res = 0.0
        for i in range(2, self.top + 1):
            res = max(res, (self.boundaries[i - 2] @ self.boundaries[i - 1]).max_norm())
        return res

    def pivots(self) -> list[list[int]]:
        """pivots[i] = greedy pivot columns of d_i, for i = 0..top (d_0 = 0)."""
        return [[]] + [pivot_columns(d, scale=self.scale) for d in self.boundaries]

    def ranks(self) -> list[int]:
        return [len(p) for p in self.pivots()]

    def acyclicity_defects(self) -> list[int]:
        """dim C_i - rank d_i - rank d_(i+1) per degree; all zero iff acyclic."""
        r = self.ranks() + [0]
        return [self.dims[i] - r[i] - r[i + 1] for i in range(self.top + 1)]

    def is_acyclic(self) -> bool:
        return all(d == 0 for d in self.acyclicity_defects())

    def rebase(self, degree: int, change: Matrix) -> TwistedChainComplex:
        """New equipped basis c_i' = c_i * change in the given degree."""
        bds = list(self.boundaries)
        if degree >= 1:
            bds[degree - 1] = bds[degree - 1] @ change
        if degree + 1 <= self.top:
            bds[degree] = change.inverse() @ bds[degree]
        return TwistedChainComplex(self.dims, tuple(bds), self.labels, self.scale)


def _random_matrix(rng: np.random.Generator, rows: int, cols: int) -> Matrix:
    return Matrix(rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)))


def generic_torsion(c: TwistedChainComplex, rng: np.random.Generator | None = None) -> TorsionValue:
    """Torsion of an acyclic based complex from the alternating determinant product.

    For each degree a lift of Im d_i is taken from the greedy pivot columns;
    with ``rng`` the lift is replaced by a random admissible one (mixed by a
    random invertible matrix and shifted by boundaries), which must not change
    the answer.
    """
    if c.total_dim > ENGINE_MAX_DIM:
        raise ValueError(f"complex of total dimension {c.total_dim} exceeds engine cap {ENGINE_MAX_DIM}")
    pivots = c.pivots() + [[]]
    for i in range(c.top + 1):
        defect = c.dims[i] - len(pivots[i]) - len(pivots[i + 1])
        if defect != 0:
            raise AcyclicityError(i, f"dim {c.dims[i]}, ranks {len(pivots[i])} and {len(pivots[i + 1])}")
    lifts: list[Matrix] = []
    for i in range(c.top + 1):
        b = Matrix.identity(c.dims[i]).columns(pivots[i]) if c.dims[i] else Matrix.zeros(0, 0)
        if rng is not None and pivots[i]:
            r = len(pivots[i])
            while True:
                mix = _random_matrix(rng, r, r)
                if abs(mix.det()) > 1e-3:
                    break
            b = b @ mix
            if i + 1 <= c.top and c.dims[i + 1]:
                b = b + c.boundary(i + 1) @ _random_matrix(rng, c.dims[i + 1], r)
        lifts.append(b)
    lifts.append(Matrix.zeros(0, 0))
    phase = to_scalar(1)
    logabs = 0.0
    for i in range(c.top + 1):
        if c.dims[i] == 0:
            continue
        parts = []
        if pivots[i + 1]:
            parts.append(c.boundary(i + 1) @ lifts[i + 1])
        if pivots[i]:
            parts.append(lifts[i])
        base_change = Matrix.hstack(parts)
        ph, la = slogdet(base_change)
        if ph == 0:
            raise AcyclicityError(i, "singular base change")
        sign = -1 if i % 2 == 0 else 1  # exponent (-1)^(i+1)
        phase = phase * (ph if sign == 1 else 1 / ph)
        logabs = logabs + sign * la
    return TorsionValue(_combine(phase, logabs), logabs, "generic-engine")


# Klein bottle -----------------------------------------------------------------


def _klein_lift(rep: Rep, N: int) -> SymPowerLift:
    residual = verify_relations(rep, klein_bottle_presentation()).max_residual
    if residual > RELATION_TOL:
        raise ValueError(f"Klein-bottle relation violated (residual {residual:.3g})")
    return SymPowerLift(2 * N)


def klein_bottle_complex(rep: Rep, N: int) -> TwistedChainComplex:
    """C_2 = V -> C_1 = V + V -> C_0 = V for the one-vertex Klein bottle.

    d_2 = [1 - Y; -XY - 1] and d_1 = [X - 1, Y - 1] with X, Y the images of
    x, y under sigma_2N.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    lift = _klein_lift(rep, N)
    X, Y = lift(rep.image("x")), lift(rep.image("y"))
    one = Matrix.identity(2 * N)
    d1 = Matrix.hstack([X - one, Y - one])
    d2 = Matrix.vstack([one - Y, -(X @ Y) - one])
    k = range(2 * N)
    labels = (
        tuple(f"v(x)e{i}" for i in k),
        tuple(f"x(x)e{i}" for i in k) + tuple(f"y(x)e{i}" for i in k),
        tuple(f"f(x)e{i}" for i in k),
    )
    return TwistedChainComplex((2 * N, 4 * N, 2 * N), (d1, d2), labels, _klein_scale(X, Y))


def _klein_scale(X: Matrix, Y: Matrix) -> float:
    return float(1 + X.max_norm() * Y.max_norm() + X.max_norm() + Y.max_norm())


def _full_rank(m: Matrix, scale: float = 0.0) -> bool:
    return len(pivot_columns(m, scale=scale)) == m.shape[1]


def klein_bottle_torsion(rep: Rep, N: int) -> TorsionValue:
    """det(1 - Y)/det(Y - 1) when Y - 1 is invertible, else det(-XY - 1)/det(X - 1)."""
    if N == 0:
        return TorsionValue(to_scalar(1), 0.0, "closed-form", {"N": 0})
    lift = _klein_lift(rep, N)
    Y = lift(rep.image("y"))
    one = Matrix.identity(2 * N)
    pd, ld, ok = slogdet_checked(Y - one, scale=1 + Y.max_norm())
    if ok:
        num, scale = one - Y, 1 + Y.max_norm()
    else:
        X = lift(rep.image("x"))
        pd, ld, ok = slogdet_checked(X - one, scale=1 + X.max_norm())
        if not ok:
            raise TorsionUndefinedError("both det(Y - 1) and det(X - 1) vanish")
        num, scale = -(X @ Y) - one, 1 + X.max_norm() * Y.max_norm()
    pn, ln, ok = slogdet_checked(num, scale=scale)
    if not ok:
        raise AcyclicityError(1, "numerator determinant vanishes")
    return TorsionValue(_combine(pn / pd, ln - ld), ln - ld, "closed-form", {"N": N})


# abelian knot exteriors ---------------------------------------------------------


def _is_pole(z) -> bool:
    if isinstance(z, RootOfUnity):
        return z.is_one()
    return abs(to_scalar(z) - 1) < 1e-12


def _power(xi, m: int):
    if isinstance(xi, RootOfUnity):
        return xi ** m
    return to_scalar(xi) ** m


def _scalar(z):
    return z.to_complex() if isinstance(z, RootOfUnity) else to_scalar(z)


def abelian_knot_torsion(delta: LaurentPolynomial, xi, N: int) -> TorsionValue:
    """prod_{i=1..N} Delta(xi^(2i-1)) Delta(xi^-(2i-1)) / ((xi^(2i-1) - 1)(xi^-(2i-1) - 1)).

    ``xi`` is a RootOfUnity (exact pole detection) or a nonzero scalar.  The
    log-magnitude is accumulated term by term; the complex value is kept only
    for N <= 16.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    scale = sum(abs(c) for c in delta.coefficients.values())
    materialise = N <= VALUE_MAX_N
    value = to_scalar(1)
    logabs = 0.0
    for i in range(1, N + 1):
        m = 2 * i - 1
        for z in (_power(xi, m), _power(xi, -m)):
            if _is_pole(z):
                raise PoleError(i, f"xi^{m if z == _power(xi, m) else -m} = 1")
            zc = _scalar(z)
            num = eval_laurent(delta, z)
            if abs(num) <= 1e-10 * scale:
                raise AcyclicityError(1, f"Alexander polynomial vanishes at xi^{m} (factor i = {i})")
            den = zc - 1
            logabs = logabs + log_magnitude(num) - log_magnitude(den)
            if materialise:
                value = value * num / den
    return TorsionValue(value if materialise else None, logabs, "closed-form", {"N": N})


# Fox-calculus presentation complex ---------------------------------------------


def presentation_complex(pres: Presentation, rep: Rep, lift=None) -> TwistedChainComplex:
    """Twisted complex of the presentation 2-complex (one vertex).

    Built in the row-vector convention (d_2 block (r, g) = Phi(dr/dg),
    d_1 block g = Phi(g) - 1) and transposed to act on columns.
    """
    table = _ImageTable(rep, lift)
    d = table.dim
    gens, rels = pres.rank, len(pres.relators)
    one = table.identity
    d1 = Matrix.hstack([(table[(g, 1)] - one).T for g in range(gens)]) if gens else Matrix.zeros(d, 0)
    scale = max([1 + float(table[(g, 1)].max_norm()) for g in range(gens)], default=1.0)
    blocks = []
    for g in range(gens):
        row = []
        for r in pres.relators:
            acc, size = _fox_image(table, r, g)
            scale = max(scale, size)
            row.append(acc.T)
        blocks.append(row)
    d2 = Matrix.block(blocks) if gens and rels else Matrix.zeros(d * gens, d * rels)
    labels = (
        tuple(f"v(x)e{i}" for i in range(d)),
        tuple(f"{name}(x)e{i}" for name in pres.generators for i in range(d)),
        tuple(f"r{k}(x)e{i}" for k in range(rels) for i in range(d)),
    )
    return TwistedChainComplex((d, d * gens, d * rels), (d1, d2), labels, scale)


def _fox_image(table, r, g) -> tuple[Matrix, float]:
    """Image of dr/dg and the sum of the magnitudes of its terms."""
    acc = Matrix.zeros(table.dim)
    size = 0.0
    for w, coeff in fox_derivative(r, g).terms.items():
        img = table.word(w)
        acc = acc + coeff * img
        size += abs(coeff) * float(img.max_norm())
    return acc, size


def fox_oracle_torsion(pres: Presentation, rep: Rep, N: int, denominator: int = 1) -> TorsionValue:
    """det Phi(dr/dg_num) / det(Phi(g_den) - 1) for a two-generator, one-relator presentation.

    ``denominator`` picks the generator whose image enters the denominator;
    the numerator differentiates with respect to the other one.  The whole
    presentation complex is checked for acyclicity first.
    """
    if pres.rank != 2 or len(pres.relators) != 1:
        raise ValueError("Fox oracle needs two generators and one relator")
    if denominator not in (0, 1):
        raise ValueError("denominator must be generator index 0 or 1")
    lift = SymPowerLift(2 * N)
    c = presentation_complex(pres, rep, lift)
    defects = c.acyclicity_defects()
    for degree, defect in enumerate(defects):
        if defect:
            raise AcyclicityError(degree, f"presentation complex has defect {defect}")
    table = _ImageTable(rep, lift)
    den = table[(denominator, 1)] - table.identity
    if not _full_rank(den, scale=1 + float(table[(denominator, 1)].max_norm())):
        other = 1 - denominator
        raise DegenerateDenominatorError(
            f"det(Phi({pres.generators[denominator]}) - 1) vanishes; "
            f"swap generator roles (denominator={other})"
        )
    numer_idx = 1 - denominator
    num, size = _fox_image(table, pres.relators[0], numer_idx)
    pn, ln, ok = slogdet_checked(num, scale=size)
    if not ok:
        raise AcyclicityError(1, f"det Phi(dr/d{pres.generators[numer_idx]}) vanishes")
    pd, ld = slogdet(den)
    return TorsionValue(_combine(pn / pd, ln - ld), ln - ld, "fox-oracle", {"N": N})


def torus_torsion_check(rep: Rep, N: int) -> TorsionValue:
    """Generic-engine torsion of the one-vertex torus; 1 whenever acyclic."""
    c = presentation_complex(torus_presentation(), rep, SymPowerLift(2 * N))
    try:
        return generic_torsion(c)
    except AcyclicityError as exc:
        raise TorsionUndefinedError(f"torus complex is not acyclic: {exc}") from exc


# the surgered manifold -------------------------------------------------------------


def graph_manifold_torsion(n: int, j: int, N: int, x_sign: int = 1) -> TorsionValue:
    """Torsion of 4-surgery on K_n for the j-th irreducible representation.

    Product of the abelian torsion of the T(2, 2n+1) exterior and the
    Klein-bottle torsion.  The latter is computed and must equal 1 within
    tolerance; it then contributes exactly 0 to the log-magnitude.
    """
    check_index(n, j, "j")
    if N < 0:
        raise ValueError("N must be non-negative")
    rep = graph_manifold_rep(n, j, x_sign)
    xi: RootOfUnity = rep.metadata["xi"]
    meta = {"n": n, "j": j, "N": N}
    if N == 0:
        return TorsionValue(to_scalar(1), 0.0, "product-of-pieces", meta)
    piece = abelian_knot_torsion(alexander_torus(n), xi, N)
    kb = klein_bottle_torsion(klein_restriction(rep), N)
    if abs(kb.log_magnitude) > tolerance(2 * N) or (
        kb.value is not None and abs(kb.value - 1) > tolerance(2 * N)
    ):
        raise ArithmeticError(f"Klein-bottle factor {kb.value} differs from 1 at N = {N}")
    return TorsionValue(piece.value, piece.log_magnitude, "product-of-pieces", meta)


def factor_log_terms(n: int, j: int, count: int) -> list[float]:
    """log|Delta(z) Delta(1/z) / ((z - 1)(1/z - 1))| for z = xi^(2i-1), i = 1..count."""
    check_index(n, j, "j")
    xi = RootOfUnity(2 * j - 1, abs(4 * n + 1))
    delta = alexander_torus(n)
    out = []
    for i in range(1, count + 1):
        z, zi = xi ** (2 * i - 1), xi ** (1 - 2 * i)
        out.append(
            float(
                log_magnitude(eval_laurent(delta, z))
                + log_magnitude(eval_laurent(delta, zi))
                - log_magnitude(z.to_complex() - 1)
                - log_magnitude(zi.to_complex() - 1)
            )
        )
    return out


def detect_period(values: Sequence[float], tol: float = 1e-9) -> int | None:
    """Smallest P with values[i + P] == values[i] (within tol) over the whole sequence."""
    n = len(values)
    for p in range(1, n // 2 + 1):
        if all(abs(values[i + p] - values[i]) <= tol for i in range(n - p)):
            return p
    return None
