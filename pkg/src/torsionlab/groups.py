"""Finitely presented groups, word evaluation and Fox calculus.

Words are tuples of ``(generator_index, +1 | -1)`` letters, freely reduced on
construction.  A representation is anything with an ``images`` sequence of
matrices indexed by generator; a *lift* is any callable taking a matrix to a
matrix (typically :class:`torsionlab.reps.SymPowerLift`).
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .algebra import Matrix

Letter = tuple[int, int]
Lift = Callable[[Matrix], Matrix]


def _free_reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for g, e in letters:
        if e not in (1, -1):
            raise ValueError(f"letter exponent must be +1 or -1, got {e}")
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((int(g), int(e)))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word in the generators."""

    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _free_reduce(self.letters))

    @classmethod
    def generator(cls, g: int, power: int = 1) -> Word:
        e = 1 if power >= 0 else -1
        return cls(((g, e),) * abs(power))

    @classmethod
    def from_powers(cls, powers: Iterable[tuple[int, int]]) -> Word:
        """Build from (generator, integer power) pairs, e.g. [(1, -2), (0, 1)]."""
        letters: list[Letter] = []
        for g, k in powers:
            letters.extend(cls.generator(g, k).letters)
        return cls(tuple(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __mul__(self, other: Word) -> Word:
        if not isinstance(other, Word):
            return NotImplemented
        return Word(self.letters + other.letters)

    def inverse(self) -> Word:
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __invert__(self) -> Word:
        return self.inverse()

    def __pow__(self, k: int) -> Word:
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k))

    def reversed(self) -> Word:
        """The letters in reverse order, exponents unchanged."""
        return Word(tuple(reversed(self.letters)))

    def exponent_sum(self, g: int) -> int:
        return sum(e for h, e in self.letters if h == g)

    def generators(self) -> set[int]:
        return {g for g, _ in self.letters}

    def conjugate(self, by: Word) -> Word:
        """by * self * by^-1"""
        return by * self * by.inverse()


def commutator(u: Word, v: Word) -> Word:
    """u v u^-1 v^-1"""
    return u * v * u.inverse() * v.inverse()


_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class Presentation:
    """Generators and relators; every relator is a word equal to the identity."""

    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(self.relators))
        if len(set(self.generators)) != len(self.generators):
            raise ValueError(f"duplicate generator names in {self.generators}")
        for r in self.relators:
            bad = [g for g in r.generators() if not 0 <= g < len(self.generators)]
            if bad:
                raise ValueError(f"relator references undeclared generator index {bad[0]}")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def index(self, name: str) -> int:
        try:
            return self.generators.index(name)
        except ValueError:
            raise ValueError(f"unknown generator {name!r}; declared: {', '.join(self.generators)}") from None

    def gen(self, name: str) -> Word:
        return Word.generator(self.index(name))

    def word(self, text: str) -> Word:
        """Parse whitespace-separated tokens such as ``"a a b^-1"`` or ``"b^-3"``."""
        powers = []
        for tok in text.split():
            m = _TOKEN.match(tok)
            if m is None:
                raise ValueError(f"cannot parse word token {tok!r}")
            powers.append((self.index(m.group(1)), int(m.group(2) or 1)))
        return Word.from_powers(powers)

    def relation(self, lhs: str, rhs: str = "") -> Word:
        """The normalised relator lhs * rhs^-1."""
        return self.word(lhs) * self.word(rhs).inverse()

    def with_relators(self, relators: Sequence[Word]) -> Presentation:
        return Presentation(self.generators, tuple(relators), self.name)

    def format_word(self, w: Word) -> str:
        if not w.letters:
            return "1"
        return " ".join(self.generators[g] + ("" if e == 1 else "^-1") for g, e in w)

    def to_text(self) -> str:
        lines = ["gens: " + ",".join(self.generators)]
        lines += ["rel: " + self.format_word(r) for r in self.relators]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "") -> Presentation:
        """Parse the ``gens:`` / ``rel:`` line format.

        ``rel: lhs = rhs`` becomes the relator lhs * rhs^-1; a line without
        ``=`` is taken as a relator equal to the identity.
        """
        gens: tuple[str, ...] | None = None
        rel_lines: list[str] = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, rest = line.partition(":")
            key = key.strip().lower()
            if not sep:
                raise ValueError(f"line {lineno}: expected 'gens:' or 'rel:'")
            if key == "gens":
                if gens is not None:
                    raise ValueError(f"line {lineno}: generators declared twice")
                gens = tuple(g.strip() for g in rest.split(",") if g.strip())
                for g in gens:
                    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", g):
                        raise ValueError(f"line {lineno}: bad generator name {g!r}")
            elif key == "rel":
                rel_lines.append(rest)
            else:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
        if gens is None:
            raise ValueError("presentation has no 'gens:' line")
        pres = cls(gens, (), name)
        relators = []
        for rest in rel_lines:
            lhs, _, rhs = rest.partition("=")
            relators.append(pres.relation(lhs, rhs))
        return pres.with_relators(relators)


class GroupRingElement:
    """Finite integer combination of reduced words."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Word, int] | None = None):
        self._terms = {w: int(c) for w, c in (terms or {}).items() if c}

    @classmethod
    def one(cls) -> GroupRingElement:
        return cls({Word(): 1})

    @classmethod
    def of(cls, w: Word, c: int = 1) -> GroupRingElement:
        return cls({w: c})

    @property
    def terms(self) -> dict[Word, int]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: GroupRingElement) -> GroupRingElement:
        out = defaultdict(int, self._terms)
        for w, c in other._terms.items():
            out[w] += c
        return GroupRingElement(out)

    def __neg__(self) -> GroupRingElement:
        return GroupRingElement({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: GroupRingElement) -> GroupRingElement:
        return self + (-other)

    def __mul__(self, other) -> GroupRingElement:
        if isinstance(other, int):
            return GroupRingElement({w: c * other for w, c in self._terms.items()})
        if isinstance(other, Word):
            other = GroupRingElement.of(other)
        out: dict[Word, int] = defaultdict(int)
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                out[w1 * w2] += c1 * c2
        return GroupRingElement(out)

    def __rmul__(self, other) -> GroupRingElement:
        if isinstance(other, int):
            return self * other
        if isinstance(other, Word):
            return GroupRingElement.of(other) * self
        return NotImplemented

    def augmentation(self) -> int:
        return sum(self._terms.values())

    def __repr__(self) -> str:
        inner = ", ".join(f"{c}*{w.letters}" for w, c in self._terms.items())
        return f"GroupRingElement({inner})"


def fox_derivative(w: Word, g: int) -> GroupRingElement:
    """Free derivative of ``w`` with respect to generator ``g``.

    Uses dw/dg = sum over letters of (prefix) * d(letter)/dg with
    dg/dg = 1 and d(g^-1)/dg = -g^-1.
    """
    out: dict[Word, int] = defaultdict(int)
    prefix: tuple[Letter, ...] = ()
    for h, e in w.letters:
        if h == g:
            if e == 1:
                out[Word(prefix)] += 1
            else:
                out[Word(prefix + ((h, e),))] -= 1
        prefix = prefix + ((h, e),)
    return GroupRingElement(out)


class _ImageTable:
    """Lifted generator images and their inverses, computed once per call."""

    def __init__(self, rep, lift: Lift | None):
        self.rep = rep
        self.lift = lift
        self._cache: dict[Letter, Matrix] = {}
        base = rep.images[0] if len(rep.images) else Matrix.identity(2)
        ident = Matrix.identity(base.dim)
        self.identity = lift(ident) if lift is not None else ident

    @property
    def dim(self) -> int:
        return self.identity.dim

    def __getitem__(self, letter: Letter) -> Matrix:
        m = self._cache.get(letter)
        if m is None:
            g, e = letter
            if not 0 <= g < len(self.rep.images):
                raise ValueError(f"unknown generator index {g}")
            m = self.rep.images[g]
            if e == -1:
                m = m.inverse()
            if self.lift is not None:
                m = self.lift(m)
            self._cache[letter] = m
        return m

    def word(self, w: Word) -> Matrix:
        out = self.identity
        for letter in w.letters:
            out = out @ self[letter]
        return out


def evaluate_word(rep, w: Word, lift: Lift | None = None) -> Matrix:
    """Ordered product of the (lifted) generator images along ``w``."""
    return _ImageTable(rep, lift).word(w)


def eval_group_ring(e: GroupRingElement, rep, lift: Lift | None = None) -> Matrix:
    table = _ImageTable(rep, lift)
    out = Matrix.zeros(table.dim)
    for w, c in e.terms.items():
        out = out + c * table.word(w)
    return out


@dataclass(frozen=True)
class RelationReport:
    relators: tuple[str, ...]
    residuals: tuple[float, ...]

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    def ok(self, threshold: float = 1e-8) -> bool:
        return self.max_residual < threshold

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.relators, self.residuals))


def verify_relations(rep, pres: Presentation | None = None) -> RelationReport:
    """Max-norm residual ||rep(r) - 1|| for every relator r."""
    pres = rep.presentation if pres is None else pres
    table = _ImageTable(rep, None)
    names, residuals = [], []
    for r in pres.relators:
        residuals.append((table.word(r) - table.identity).max_norm())
        names.append(pres.format_word(r))
    return RelationReport(tuple(names), tuple(residuals))


# Standard presentations ------------------------------------------------------


def twist_knot_omega(pres: Presentation) -> Word:
    """The word alpha beta^-1 alpha^-1 beta in the twist-knot presentation."""
    return pres.word("alpha beta^-1 alpha^-1 beta")


def twist_knot_presentation(n: int) -> Presentation:
    """<alpha, beta | omega^n alpha = beta omega^n> for the twist knot K_n."""
    pres = Presentation(("alpha", "beta"), (), f"K_{n}")
    wn = twist_knot_omega(pres) ** n
    rel = wn * pres.gen("alpha") * (pres.gen("beta") * wn).inverse()
    return pres.with_relators([rel])


def mu_word(pres: Presentation, n: int) -> Word:
    """Meridian of the torus-knot piece, b^-n a."""
    return pres.gen("b") ** (-n) * pres.gen("a")


def fiber_word(pres: Presentation) -> Word:
    """Regular fibre of the torus-knot exterior, a^2 (= b^(2n+1))."""
    return pres.gen("a") ** 2


def graph_manifold_presentation(n: int) -> Presentation:
    """pi_1 of 4-surgery on K_n, generators a, b, x, y.

    Relators: a^2 = b^(2n+1), x^-1 y x = y^-1, mu = y^-1 and h = y^-1 x^2,
    where mu = b^-n a and h = a^2.
    """
    pres = Presentation(("a", "b", "x", "y"), (), f"M_{n}")
    a, b, x, y = (pres.gen(g) for g in "abxy")
    rels = [
        a ** 2 * (b ** (2 * n + 1)).inverse(),
        x.inverse() * y * x * y,
        mu_word(pres, n) * y,
        fiber_word(pres) * (y.inverse() * x ** 2).inverse(),
    ]
    return pres.with_relators(rels)


def klein_bottle_presentation() -> Presentation:
    """<x, y | y x = x y^-1>."""
    pres = Presentation(("x", "y"), (), "Kb")
    return pres.with_relators([pres.relation("y x", "x y^-1")])


def torus_knot_presentation(n: int) -> Presentation:
    """<a, b | a^2 = b^(2n+1)> for the torus knot T(2, 2n+1)."""
    pres = Presentation(("a", "b"), (), f"T(2,{2 * n + 1})")
    return pres.with_relators([pres.gen("a") ** 2 * (pres.gen("b") ** (2 * n + 1)).inverse()])


def torus_presentation() -> Presentation:
    """<u, v | u v u^-1 v^-1>."""
    pres = Presentation(("u", "v"), (), "T^2")
    return pres.with_relators([commutator(pres.gen("u"), pres.gen("v"))])


def free_presentation(names: Sequence[str]) -> Presentation:
    return Presentation(tuple(names), (), "free")
