"""SL(2,C)-representations: symmetric powers, the twist-knot metabelian family,
the diagonal normal form on pi_1 of the surgered manifold, and the Klein-bottle
classification."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Mapping, Sequence

import mpmath
import numpy as np

from .algebra import (
    Matrix,
    RootOfUnity,
    is_extended,
    matrix_from_pairs,
    matrix_to_pairs,
    to_scalar,
)
from .groups import (
    Presentation,
    RelationReport,
    Word,
    commutator,
    evaluate_word,
    fiber_word,
    graph_manifold_presentation,
    klein_bottle_presentation,
    mu_word,
    torus_knot_presentation,
    torus_presentation,
    twist_knot_omega,
    twist_knot_presentation,
    verify_relations,
)

UNIMODULAR_TOL = 1e-8
EIGVEC_TOL = 1e-8
RELATION_TOL = 1e-8


class InvalidParameterError(ValueError):
    """A twist parameter or index outside the admissible range."""


def check_twist_parameter(n: int) -> int:
    """Return p = |4n+1| after rejecting the non-hyperbolic n = 0, -1."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise InvalidParameterError(f"twist parameter must be an integer, got {n!r}")
    if n in (0, -1):
        raise InvalidParameterError(f"n = {n} is excluded: K_0 is the unknot and K_-1 the trefoil")
    return abs(4 * n + 1)


def index_range(n: int) -> range:
    """Valid k (and j) indices 1 .. (|4n+1|-1)/2."""
    p = check_twist_parameter(n)
    return range(1, (p - 1) // 2 + 1)


def check_index(n: int, idx: int, label: str = "j") -> None:
    r = index_range(n)
    if idx not in r:
        raise InvalidParameterError(f"{label} = {idx} out of range 1..{r.stop - 1} for n = {n}")


# symmetric powers -------------------------------------------------------------


def _convolve(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    if p.dtype != object and q.dtype != object:
        return np.convolve(p, q)
    out = np.array([to_scalar(0)] * (len(p) + len(q) - 1), dtype=object)
    for k, c in enumerate(q):
        out[k:k + len(p)] = out[k:k + len(p)] + p * c
    return out


def sym_power(a: Matrix, n: int) -> Matrix:
    """Matrix of sigma_n(a) on the monomials x^(n-1), x^(n-2) y, ..., y^(n-1).

    sigma_n(a) sends p(x, y) to p(x', y') with (x', y') = a^-1 (x, y).  Column
    i holds the expansion of x'^(n-1-i) y'^i, read with x = 1, y = t.
    """
    if a.shape != (2, 2):
        raise ValueError(f"sym_power needs a 2x2 matrix, got {a.shape}")
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    d = a.det()
    if abs(d - 1) > UNIMODULAR_TOL:
        raise ValueError(f"matrix is not unimodular (det = {complex(d):.6g})")
    p, q, r, s = a[0, 0], a[0, 1], a[1, 0], a[1, 1]
    if q == 0 and r == 0:
        return Matrix.diag([s ** (n - 1 - i) * p ** i for i in range(n)])
    dtype = object if is_extended() else np.complex128
    xp = np.array([s, -q], dtype=dtype)  # x' = s x - q y
    yp = np.array([-r, p], dtype=dtype)  # y' = -r x + p y
    one = np.array([to_scalar(1)], dtype=dtype)
    pow_x, pow_y = [one], [one]
    for _ in range(n - 1):
        pow_x.append(_convolve(pow_x[-1], xp))
        pow_y.append(_convolve(pow_y[-1], yp))
    cols = [_convolve(pow_x[n - 1 - i], pow_y[i]) for i in range(n)]
    return Matrix(np.array(cols, dtype=dtype).T)


@dataclass(frozen=True)
class SymPowerLift:
    """Callable sigma_n used as the ``lift`` argument of word evaluation."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"lift dimension must be positive, got {self.n}")

    def __call__(self, a: Matrix) -> Matrix:
        return sym_power(a, self.n)


# representations --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Rep:
    """Generator images of a presentation; classification tags are cached."""

    presentation: Presentation
    images: tuple[Matrix, ...]
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != self.presentation.rank:
            raise ValueError(
                f"{len(self.images)} images for {self.presentation.rank} generators"
            )
        for name, m in zip(self.presentation.generators, self.images):
            if not m.is_square():
                raise ValueError(f"image of {name} is not square")
            if abs(m.det() - 1) > UNIMODULAR_TOL * max(1.0, m.max_norm() ** m.dim):
                raise ValueError(f"image of {name} does not have determinant 1")

    @classmethod
    def from_mapping(cls, presentation: Presentation, images: Mapping[str, Any], **metadata) -> Rep:
        mats = []
        for g in presentation.generators:
            m = images[g]
            mats.append(m if isinstance(m, Matrix) else Matrix(m))
        return cls(presentation, tuple(mats), metadata)

    @property
    def dim(self) -> int:
        return self.images[0].dim if self.images else 2

    def image(self, name: str) -> Matrix:
        return self.images[self.presentation.index(name)]

    def __call__(self, w: Word) -> Matrix:
        return evaluate_word(self, w)

    def relation_report(self) -> RelationReport:
        return verify_relations(self, self.presentation)

    def restrict(self, presentation: Presentation, words: Mapping[str, Word], **metadata) -> Rep:
        """Representation of ``presentation`` sending each generator to rep(words[g])."""
        images = tuple(evaluate_word(self, words[g]) for g in presentation.generators)
        return Rep(presentation, images, {**self.metadata, **metadata})

    def conjugate(self, p: Matrix) -> Rep:
        pinv = p.inverse()
        return Rep(self.presentation, tuple(p @ m @ pinv for m in self.images), dict(self.metadata))

    @cached_property
    def is_irreducible(self) -> bool:
        return is_irreducible(self)

    @cached_property
    def is_abelian(self) -> bool:
        return is_abelian(self)

    @cached_property
    def is_metabelian(self) -> bool:
        return is_metabelian(self)

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            g: matrix_to_pairs(m) for g, m in zip(self.presentation.generators, self.images)
        }
        meta = {}
        for key, val in self.metadata.items():
            if isinstance(val, RootOfUnity):
                meta[key] = {"numer": val.numer, "denom": val.denom}
            elif isinstance(val, (mpmath.mpf, np.floating)):
                meta[key] = float(val)
            else:
                meta[key] = val
        out["metadata"] = meta
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, Any], presentation: Presentation) -> Rep:
        images = tuple(matrix_from_pairs(data[g], 2) for g in presentation.generators)
        meta = dict(data.get("metadata", {}))
        if isinstance(meta.get("xi"), Mapping):
            meta["xi"] = RootOfUnity(meta["xi"]["numer"], meta["xi"]["denom"])
        return cls(presentation, images, meta)


def random_sl2(rng: np.random.Generator, scale: float = 1.0) -> Matrix:
    """A random SL(2,C) matrix: Gaussian entries rescaled by sqrt(det)."""
    while True:
        z = scale * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        d = z[0, 0] * z[1, 1] - z[0, 1] * z[1, 0]
        if abs(d) > 1e-3:
            return Matrix(z / np.sqrt(d))


def diagonal_sl2(z) -> Matrix:
    """diag(z, 1/z) for a scalar or exact root of unity."""
    if isinstance(z, RootOfUnity):
        return Matrix.diag([z.to_complex(), z.inverse().to_complex()])
    z = to_scalar(z)
    return Matrix.diag([z, 1 / z])


def _u_value(n: int, k: int):
    if is_extended():
        return -4 * mpmath.sin(k * mpmath.pi / (4 * n + 1)) ** 2
    return -4 * math.sin(k * math.pi / (4 * n + 1)) ** 2


def metabelian_rep(n: int, k: int) -> Rep:
    """Representative rho_k of the k-th irreducible metabelian class of K_n.

    rho_k(alpha) = [[i, -i], [0, -i]], rho_k(beta) = [[i, 0], [-u i, -i]] with
    u = -4 sin^2(k pi / (4n+1)).
    """
    check_index(n, k, "k")
    u = _u_value(n, k)
    i = to_scalar(1j)
    alpha = Matrix([[i, -i], [0, -i]])
    beta = Matrix([[i, 0], [-u * i, -i]])
    rep = Rep(twist_knot_presentation(n), (alpha, beta), {"n": n, "k": k, "u": u})
    return rep


def xi_root(n: int, j: int) -> RootOfUnity:
    """Meridian eigenvalue exp(i pi (2j-1)/|4n+1|) of the j-th normal form."""
    check_index(n, j, "j")
    return RootOfUnity(2 * j - 1, abs(4 * n + 1))


def graph_manifold_rep(n: int, j: int, x_sign: int = 1) -> Rep:
    """The irreducible representation of pi_1(M) in diagonal normal form.

    mu = b^-n a goes to diag(xi, 1/xi), y to its inverse, b to diag(xi^2, xi^-2),
    a to diag(xi^(2n+1), xi^-(2n+1)) and x to +-[[0, 1], [-1, 0]].
    """
    if x_sign not in (1, -1):
        raise ValueError("x_sign must be +1 or -1")
    xi = xi_root(n, j)
    p = abs(4 * n + 1)
    images = (
        diagonal_sl2(xi ** (2 * n + 1)),
        diagonal_sl2(xi ** 2),
        Matrix([[0, x_sign], [-x_sign, 0]]),
        diagonal_sl2(xi.inverse()),
    )
    p_k = p // math.gcd(2 * j - 1, p)
    return Rep(graph_manifold_presentation(n), images, {"n": n, "j": j, "xi": xi, "p_k": p_k})


def abelian_torus_knot_rep(n: int, xi) -> Rep:
    """Abelian representation of T(2, 2n+1) with meridian b^-n a -> diag(xi, 1/xi).

    ``xi`` is a RootOfUnity or a nonzero scalar.
    """
    if isinstance(xi, RootOfUnity):
        a, b = xi ** (2 * n + 1), xi ** 2
    else:
        xi = to_scalar(xi)
        a, b = xi ** (2 * n + 1), xi ** 2
    return Rep(torus_knot_presentation(n), (diagonal_sl2(a), diagonal_sl2(b)), {"n": n, "xi": xi})


def torus_knot_restriction(rep: Rep) -> Rep:
    """Restriction of a pi_1(M) representation to <a, b>."""
    n = rep.metadata["n"]
    pres = torus_knot_presentation(n)
    src = rep.presentation
    return rep.restrict(pres, {"a": src.gen("a"), "b": src.gen("b")}, piece="torus-knot")


def klein_restriction(rep: Rep) -> Rep:
    """Restriction of a pi_1(M) representation to <x, y>."""
    src = rep.presentation
    return rep.restrict(klein_bottle_presentation(), {"x": src.gen("x"), "y": src.gen("y")}, piece="klein")


def jsj_torus_restriction(rep: Rep) -> Rep:
    """Restriction to the splitting torus <mu, h>."""
    n = rep.metadata["n"]
    src = rep.presentation
    return rep.restrict(torus_presentation(), {"u": mu_word(src, n), "v": fiber_word(src)}, piece="jsj-torus")


def surgery_residual(rep: Rep, longitude: Word, meridian: Word | None = None, slope: int = 4) -> float:
    """||rep(m^slope l) - 1|| for a user-supplied longitude word."""
    if meridian is None:
        meridian = rep.presentation.gen("alpha")
    m = evaluate_word(rep, meridian ** slope * longitude)
    return (m - Matrix.identity(m.dim)).max_norm()


# classification ---------------------------------------------------------------


def _is_scalar(m: Matrix, tol: float) -> bool:
    return abs(m[0, 1]) < tol and abs(m[1, 0]) < tol and abs(m[0, 0] - m[1, 1]) < tol


def _kernel_vector(m: Matrix) -> np.ndarray:
    """A nonzero kernel vector of a (numerically) singular 2x2 matrix."""
    a = m.entries
    r0 = abs(a[0, 0]) + abs(a[0, 1])
    r1 = abs(a[1, 0]) + abs(a[1, 1])
    row = a[0] if r0 >= r1 else a[1]
    if abs(row[0]) + abs(row[1]) == 0:
        return np.array([to_scalar(1), to_scalar(0)], dtype=a.dtype)
    return np.array([row[1], -row[0]], dtype=a.dtype)


def _sqrt(z):
    return mpmath.sqrt(z) if isinstance(z, mpmath.mpc) else np.sqrt(complex(z))


def eigenvalues_2x2(m: Matrix) -> tuple:
    tr = m.trace()
    disc = tr * tr - 4 * m.det()
    root = _sqrt(disc)
    return (tr + root) / 2, (tr - root) / 2


def eigenvectors_2x2(m: Matrix) -> list[np.ndarray]:
    """Eigenvector directions of a non-scalar 2x2 matrix (one if defective)."""
    lam1, lam2 = eigenvalues_2x2(m)
    ident = Matrix.identity(2)
    vecs = [_kernel_vector(m - lam1 * ident)]
    if abs(lam1 - lam2) > EIGVEC_TOL * max(1.0, abs(lam1)):
        vecs.append(_kernel_vector(m - lam2 * ident))
    return vecs


def _is_eigenvector(m: Matrix, v: np.ndarray, tol: float = EIGVEC_TOL) -> bool:
    mv = m.entries @ v
    nv = math.sqrt(sum(abs(c) ** 2 for c in v))
    nmv = math.sqrt(sum(abs(c) ** 2 for c in mv))
    if nmv == 0:
        return True
    return abs(v[0] * mv[1] - v[1] * mv[0]) <= tol * nv * nmv


def common_eigenvector(images: Sequence[Matrix]) -> np.ndarray | None:
    """A vector that every image preserves as a line, or None."""
    noncentral = [m for m in images if not _is_scalar(m, EIGVEC_TOL * max(1.0, m.max_norm()))]
    if not noncentral:
        return np.array([1.0 + 0j, 0j])
    for v in eigenvectors_2x2(noncentral[0]):
        if all(_is_eigenvector(m, v) for m in images):
            return v
    return None


def is_irreducible(rep: Rep) -> bool:
    """True iff the images have no common eigenvector in C^2."""
    if rep.dim != 2:
        raise NotImplementedError("irreducibility test is implemented for SL(2) only")
    return common_eigenvector(rep.images) is None


def _commute(a: Matrix, b: Matrix, tol: float = 1e-8) -> bool:
    return (a @ b - b @ a).max_norm() <= tol * max(1.0, a.max_norm() * b.max_norm())


def is_abelian(rep: Rep) -> bool:
    return all(_commute(a, b) for a, b in itertools.combinations(rep.images, 2))


def _commutator_samples(pres: Presentation) -> list[Word]:
    g1, g2 = Word.generator(0), Word.generator(1)
    c = commutator(g1, g2)
    letters = [g1, g1.inverse(), g2, g2.inverse()]
    conjugators = {Word()}
    conjugators.update(letters)
    conjugators.update(u * v for u in letters for v in letters)
    samples = [c.conjugate(w) for w in sorted(conjugators, key=lambda w: (len(w), w.letters))]
    if pres.generators == ("alpha", "beta"):
        omega = twist_knot_omega(pres)
        samples += [omega, omega.conjugate(g1), omega.conjugate(g2)]
    depth1 = [commutator(c, g) for g in letters]
    samples += depth1
    samples += [commutator(d, g) for d in depth1 for g in letters]
    return samples


def is_metabelian(rep: Rep) -> bool:
    """Sampled test that the commutator subgroup has abelian image.

    Sound when it returns False; True means every sampled commutator-subgroup
    element (conjugates of [g1, g2] by words of length <= 2, and nested
    commutators to depth 2) commutes with every other.
    """
    if rep.presentation.rank != 2:
        raise ValueError("metabelian test needs a two-generator presentation")
    mats = [evaluate_word(rep, w) for w in _commutator_samples(rep.presentation)]
    return all(_commute(a, b) for a, b in itertools.combinations(mats, 2))


KLEIN_CASES = ("abelian", "irreducible", "reducible-non-abelian")


@dataclass(frozen=True)
class KleinCase:
    """Normal-form data of a Klein-bottle representation.

    ``case`` is one of "abelian" (rho(y) = +-1), "irreducible" (rho(y) ~
    diag(eta, 1/eta)) or "reducible-non-abelian" (rho(y) = +-unipotent).
    """

    case: str
    sign: int = 1
    eta: complex | None = None
    omega: complex | None = None
    omega_prime: complex | None = None


def classify_klein(rep: Rep) -> KleinCase:
    pres = rep.presentation
    if set(pres.generators) != {"x", "y"}:
        raise ValueError("expected a representation of <x, y | y x = x y^-1>")
    residual = verify_relations(rep, klein_bottle_presentation()).max_residual
    if residual > RELATION_TOL:
        raise ValueError(f"Klein-bottle relation violated (residual {residual:.3g})")
    x, y = rep.image("x"), rep.image("y")
    ident = Matrix.identity(2)
    for s in (1, -1):
        if (y - s * ident).max_norm() < RELATION_TOL:
            return KleinCase("abelian", sign=s)
    tr = y.trace()
    disc = tr * tr - 4
    if abs(disc) < RELATION_TOL:
        s = 1 if complex(tr).real > 0 else -1
        v = _kernel_vector(y - s * ident)
        if abs(v[0]) >= abs(v[1]):
            w = np.array([0, 1 / v[0]], dtype=v.dtype)
        else:
            w = np.array([-1 / v[1], 0], dtype=v.dtype)
        p = Matrix(np.column_stack([v, w]))
        pinv = p.inverse()
        yn, xn = pinv @ y @ p, pinv @ x @ p
        return KleinCase(
            "reducible-non-abelian",
            sign=s,
            omega=complex(yn[0, 1]),
            omega_prime=complex(xn[0, 1]),
        )
    if abs(y[0, 1]) < RELATION_TOL and abs(y[1, 0]) < RELATION_TOL:
        eta = y[0, 0]
    else:
        eta = (tr + _sqrt(disc)) / 2
    return KleinCase("irreducible", eta=complex(eta))


def klein_rep(case: str, **params) -> Rep:
    """Normal-form representative for each Klein-bottle case.

    abelian: ``x`` (any SL2 matrix) and ``sign``; irreducible: ``eta``;
    reducible-non-abelian: ``omega``, ``omega_prime``, ``sign`` (of y) and
    ``x_sign`` (of x, independent; defaults to ``sign``).
    """
    pres = klein_bottle_presentation()
    i = to_scalar(1j)
    if case == "abelian":
        s = params.get("sign", 1)
        x = params.get("x", Matrix.identity(2))
        return Rep(pres, (x, s * Matrix.identity(2)), {"case": case})
    if case == "irreducible":
        eta = params["eta"]
        return Rep(pres, (Matrix([[0, -1], [1, 0]]), diagonal_sl2(eta)), {"case": case})
    if case == "reducible-non-abelian":
        s = params.get("sign", 1)
        t = params.get("x_sign", s)
        om, omp = params["omega"], params.get("omega_prime", 0)
        return Rep(pres, (Matrix([[t * i, omp], [0, -t * i]]), Matrix([[s, om], [0, s]])), {"case": case})
    raise ValueError(f"unknown Klein-bottle case {case!r}; expected one of {KLEIN_CASES}")


def metabelian_classes(n: int) -> list[Rep]:
    return [metabelian_rep(n, k) for k in index_range(n)]


def graph_manifold_reps(n: int) -> list[Rep]:
    return [graph_manifold_rep(n, j) for j in index_range(n)]
