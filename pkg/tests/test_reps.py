import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsionlab.algebra import Matrix, RootOfUnity, precision
from torsionlab.groups import free_presentation, twist_knot_presentation
from torsionlab.reps import (
    InvalidParameterError,
    Rep,
    check_index,
    check_twist_parameter,
    classify_klein,
    graph_manifold_rep,
    graph_manifold_reps,
    index_range,
    is_abelian,
    is_irreducible,
    is_metabelian,
    jsj_torus_restriction,
    klein_rep,
    klein_restriction,
    metabelian_classes,
    metabelian_rep,
    random_sl2,
    surgery_residual,
    sym_power,
    torus_knot_restriction,
)
from torsionlab.torsion import graph_manifold_torsion

TEST_NS = (1, 2, 3, -2, -3)


def sym_power_oracle(a: np.ndarray, n: int) -> np.ndarray:
    """Column i = coefficients of x'^(n-1-i) y'^i, (x', y') = a^-1 (x, y), fitted from samples at y = 1."""
    ainv = np.linalg.inv(a)
    ts = np.exp(2j * np.pi * np.arange(n) / n)  # sample x on the unit circle, y = 1
    cols = []
    for i in range(n):
        xs = ainv[0, 0] * ts + ainv[0, 1]
        ys = ainv[1, 0] * ts + ainv[1, 1]
        vals = xs ** (n - 1 - i) * ys ** i
        # vals = sum_m c_m t^(n-1-m); DFT inversion on roots of unity
        coeffs = np.fft.fft(vals) / n  # coefficient of t^k at index k
        col = [coeffs[n - 1 - m] for m in range(n)]
        cols.append(col)
    return np.array(cols).T


# parameters -------------------------------------------------------------------


@pytest.mark.parametrize("n", [0, -1, 1.5, "2", True])
def test_excluded_parameters(n):
    with pytest.raises(InvalidParameterError):
        check_twist_parameter(n)


def test_index_ranges():
    assert list(index_range(1)) == [1, 2]
    assert list(index_range(-2)) == [1, 2, 3]
    with pytest.raises(InvalidParameterError):
        check_index(1, 3)
    with pytest.raises(InvalidParameterError):
        check_index(1, 0)


# symmetric powers ---------------------------------------------------------------


def test_sym_power_identity():
    assert sym_power(Matrix.identity(2), 4).allclose(Matrix.identity(4), 0)


def test_sym_power_diagonal_order():
    xi = RootOfUnity(1, 5)
    got = sym_power(Matrix.diag([xi.to_complex(), xi.inverse().to_complex()]), 4)
    want = [(xi ** e).to_complex() for e in (-3, -1, 1, 3)]
    assert got.allclose(Matrix.diag(want), 1e-14)


def test_sym_power_sigma2_is_conjugate_to_input():
    rng = np.random.default_rng(1)
    a = random_sl2(rng)
    s = sym_power(a, 2)
    assert abs(s.trace() - a.trace()) < 1e-12
    assert abs(s.det() - 1) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8])
def test_sym_power_against_sampling_oracle(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        a = random_sl2(rng)
        want = sym_power_oracle(a.entries, n)
        got = sym_power(a, n).entries
        assert np.max(np.abs(got - want)) <= 1e-9 * max(1.0, np.max(np.abs(want)))


def test_sym_power_sigma3_homomorphism():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a, b = random_sl2(rng), random_sl2(rng)
        diff = sym_power(a @ b, 3) - sym_power(a, 3) @ sym_power(b, 3)
        assert diff.max_norm() < 1e-12 * max(1.0, sym_power(a @ b, 3).max_norm())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6))
def test_sym_power_homomorphism_property(seed, N):
    rng = np.random.default_rng(seed)
    a, b = random_sl2(rng), random_sl2(rng)
    lhs = sym_power(a @ b, 2 * N)
    rhs = sym_power(a, 2 * N) @ sym_power(b, 2 * N)
    assert (lhs - rhs).max_norm() <= 1e-10 * max(1.0, rhs.max_norm())
    assert abs(lhs.det() - 1) < 1e-6 * max(1.0, rhs.max_norm()) ** (2 * N)


def test_sym_power_rejects_non_unimodular():
    with pytest.raises(ValueError):
        sym_power(Matrix([[2, 0], [0, 1]]), 3)


def test_sym_power_extended_precision():
    with precision(160):
        rng = np.random.default_rng(5)
        a = random_sl2(rng)
        b = random_sl2(rng)
        diff = sym_power(a @ b, 6) - sym_power(a, 6) @ sym_power(b, 6)
        assert diff.max_norm() < 1e-35


# metabelian family -----------------------------------------------------------------


def test_u_value_example():
    rep = metabelian_rep(1, 1)
    assert rep.metadata["u"] == pytest.approx(-4 * math.sin(math.pi / 5) ** 2)
    assert rep.metadata["u"] == pytest.approx(-1.3819660, abs=1e-7)


@pytest.mark.parametrize("n", TEST_NS)
def test_metabelian_family(n):
    reps = metabelian_classes(n)
    p = abs(4 * n + 1)
    assert len(reps) == (p - 1) // 2
    assert len({round(r.metadata["u"], 12) for r in reps}) == (p - 1) // 2
    for r in reps:
        assert abs(r.image("alpha").trace()) < 1e-15
        assert r.relation_report().max_residual < 1e-12
        assert r.is_irreducible
        assert r.is_metabelian


def test_metabelian_residual_n2_k3():
    assert metabelian_rep(2, 3).relation_report().max_residual < 1e-12


def test_meridian_order_four():
    for n in TEST_NS:
        for r in metabelian_classes(n):
            a = r.image("alpha")
            assert (a @ a @ a @ a).allclose(Matrix.identity(2), 1e-14)


def test_longitude_residual_hook():
    rep = metabelian_rep(1, 1)
    pres = rep.presentation
    alpha = pres.gen("alpha")
    # alpha^-4 is a placeholder longitude that trivially closes m^4 l
    assert surgery_residual(rep, alpha ** -4) < 1e-14


# graph-manifold normal forms ------------------------------------------------------------


def test_graph_rep_example_n1_j1():
    rep = graph_manifold_rep(1, 1)
    xi = RootOfUnity(1, 5)
    assert rep.image("b").allclose(Matrix.diag([(xi ** 2).to_complex(), (xi ** -2).to_complex()]), 1e-15)
    assert rep.image("a").allclose(Matrix.diag([(xi ** 3).to_complex(), (xi ** -3).to_complex()]), 1e-15)
    assert (rep.image("a") ** 5).allclose(-Matrix.identity(2), 1e-14)


def test_graph_rep_b_power_n2_j2():
    rep = graph_manifold_rep(2, 2)
    assert (rep.image("b") ** 9).allclose(Matrix.identity(2), 1e-13)


@pytest.mark.parametrize("n", TEST_NS)
def test_graph_reps_certified(n):
    reps = graph_manifold_reps(n)
    assert len(reps) == (abs(4 * n + 1) - 1) // 2
    for r in reps:
        assert r.relation_report().max_residual < 1e-12
        assert is_abelian(torus_knot_restriction(r))
        assert not is_irreducible(torus_knot_restriction(r))
        assert is_irreducible(klein_restriction(r))
        assert is_abelian(jsj_torus_restriction(r))
        assert r.metadata["xi"].order() == 2 * r.metadata["p_k"]


@pytest.mark.parametrize("n, j, N", [(1, 1, 3), (2, 2, 4), (-2, 3, 5), (3, 5, 2)])
def test_x_sign_does_not_change_torsion(n, j, N):
    plus = graph_manifold_torsion(n, j, N)
    minus = graph_manifold_torsion(n, j, N, x_sign=-1)
    assert minus.log_magnitude == pytest.approx(plus.log_magnitude, abs=1e-12)
    assert abs(minus.value - plus.value) < 1e-10 * abs(plus.value)
    assert graph_manifold_rep(n, j, x_sign=-1).relation_report().max_residual < 1e-12


def test_json_roundtrip():
    rep = graph_manifold_rep(2, 3)
    data = json.loads(json.dumps(rep.to_json()))
    back = Rep.from_json(data, rep.presentation)
    assert back.metadata["xi"] == rep.metadata["xi"]
    for a, b in zip(back.images, rep.images):
        assert a.allclose(b, 0)


def test_rep_rejects_non_unimodular():
    with pytest.raises(ValueError):
        Rep(free_presentation("a"), (Matrix([[2, 0], [0, 1]]),))
    with pytest.raises(ValueError):
        Rep(free_presentation("ab"), (Matrix.identity(2),))


# classification ---------------------------------------------------------------------


def test_classify_abelian():
    rng = np.random.default_rng(0)
    kr = klein_rep("abelian", x=random_sl2(rng))
    assert classify_klein(kr).case == "abelian"
    assert classify_klein(klein_rep("abelian", sign=-1)).sign == -1


def test_classify_restriction_irreducible():
    kr = klein_restriction(graph_manifold_rep(1, 1))
    c = classify_klein(kr)
    assert c.case == "irreducible"
    xi = RootOfUnity(1, 5).to_complex()
    assert abs(c.eta - 1 / xi) < 1e-15


def test_classify_reducible_non_abelian():
    pres_rep = Rep.from_mapping(
        klein_rep("irreducible", eta=1).presentation,
        {"x": [[1j, 0], [0, -1j]], "y": [[1, 1], [0, 1]]},
    )
    c = classify_klein(pres_rep)
    assert c.case == "reducible-non-abelian"
    assert c.sign == 1
    assert abs(c.omega - 1) < 1e-12 and abs(c.omega_prime) < 1e-12


def test_classify_reducible_after_conjugation():
    rng = np.random.default_rng(4)
    kr = klein_rep("reducible-non-abelian", omega=2.0, omega_prime=0.5, sign=-1, x_sign=-1)
    assert kr.relation_report().max_residual < 1e-14
    c = classify_klein(kr.conjugate(random_sl2(rng)))
    assert c.case == "reducible-non-abelian" and c.sign == -1


def test_classify_rejects_relation_violation():
    bad = Rep.from_mapping(
        klein_rep("irreducible", eta=1).presentation,
        {"x": [[1, 1], [0, 1]], "y": [[2, 0], [0, 0.5]]},
    )
    with pytest.raises(ValueError):
        classify_klein(bad)


def test_irreducible_examples():
    trivial = Rep(twist_knot_presentation(1), (Matrix.identity(2),) * 2)
    assert not is_irreducible(trivial)
    assert metabelian_rep(1, 1).is_irreducible
    assert not is_irreducible(torus_knot_restriction(graph_manifold_rep(1, 1)))
    # case (3) Klein reps are reducible although non-abelian
    kr = klein_rep("reducible-non-abelian", omega=1.0)
    assert not is_irreducible(kr) and not is_abelian(kr)


def test_metabelian_examples():
    abelian = Rep(free_presentation("ab"), (Matrix.diag([2, 0.5]), Matrix.diag([3j, -1j / 3])))
    assert is_metabelian(abelian)
    assert metabelian_rep(1, 2).is_metabelian
    # parabolic holonomy-type rep of the figure-eight group: irreducible, not metabelian
    z = cmath.exp(1j * math.pi / 3)
    rep = Rep(twist_knot_presentation(1), (Matrix([[1, 1], [0, 1]]), Matrix([[1, 0], [z, 1]])))
    assert rep.relation_report().max_residual < 1e-12
    assert rep.is_irreducible
    assert not rep.is_metabelian


def test_random_pair_not_metabelian():
    rng = np.random.default_rng(9)
    rep = Rep(free_presentation("ab"), (random_sl2(rng), random_sl2(rng)))
    assert not is_metabelian(rep)
