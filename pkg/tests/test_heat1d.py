import math

import numpy as np
import pytest

from aprioristep import Case, GridVector, Heat1DProblem, f_test, inner_product, norm, p_test, paper_problem
from aprioristep.heat1d import dirichlet_eigenvalue
from aprioristep.linalg import DimensionError
from oracles import dense_operator


def zero(t):
    return 0.0


@pytest.mark.parametrize(
    "t, expected",
    [(0.05, 5.0), (0.075, 7.5), (0.0750001, 0.0), (0.08, 0.0), (0.1, 0.0), (0.13, 0.0), (1e-6, 1e-4)],
)
def test_p_test(t, expected):
    assert p_test(t) == pytest.approx(expected, rel=1e-15, abs=0.0)


@pytest.mark.parametrize("t, expected", [(0.04, 0.0), (0.05, 0.0), (0.06, 10 * math.exp(-0.01)), (0.1, 10 * math.exp(-0.05))])
def test_f_test(t, expected):
    assert f_test(t) == pytest.approx(expected, rel=1e-15, abs=0.0)


def test_f_test_value_and_extension():
    assert f_test(0.06) == pytest.approx(9.90050, abs=5e-6)
    # past the horizon the second branch continues
    assert f_test(0.12) == pytest.approx(10 * math.exp(-0.07), rel=1e-15)


def test_mesh():
    prob = paper_problem("sine", 100)
    assert prob.h * prob.M == 1.0
    assert len(prob.nodes()) == 99
    assert prob.node_index(0.5) == 49
    with pytest.raises(ValueError):
        prob.node_index(0.505)
    with pytest.raises(ValueError):
        prob.node_index(1.0)
    with pytest.raises(ValueError):
        Heat1DProblem(M=1, p=zero, f=zero, u0=np.sin)


def test_reaction_nonnegative_on_extended_window():
    prob = paper_problem("sine", 100)
    assert prob.min_reaction(0.1 * 1.5) >= 0.0


def test_sine_eigenfunction_m4():
    prob = Heat1DProblem(M=4, p=zero, f=zero, u0=np.sin)
    x = prob.nodes()
    u = GridVector(np.sin(np.pi * x), prob.h)
    lam = 4 / 0.25**2 * math.sin(math.pi * 0.25 / 2) ** 2
    assert lam == pytest.approx(9.37258, abs=5e-6)
    np.testing.assert_allclose(prob.apply_A(0.0, u).values, lam * u.values, rtol=1e-12)


def test_constant_vector_m4_against_dense():
    prob = Heat1DProblem(M=4, p=lambda t: 2.0, f=zero, u0=np.sin)
    u = GridVector([1.0, 1.0, 1.0], prob.h)
    out = prob.apply_A(0.0, u).values
    np.testing.assert_allclose(out, [18.0, 2.0, 18.0], rtol=1e-15)
    np.testing.assert_allclose(out, dense_operator(4, 2.0) @ np.ones(3), rtol=1e-15)


def test_apply_zero_and_mismatch():
    prob = paper_problem("sine", 10)
    assert norm(prob.apply_A(0.01, GridVector.zeros(9, 0.1))) == 0.0
    with pytest.raises(DimensionError):
        prob.apply_A(0.01, GridVector.zeros(8, 0.1))


@pytest.mark.parametrize("M", [4, 16, 100])
def test_all_eigenmodes(M):
    prob = Heat1DProblem(M=M, p=zero, f=zero, u0=np.sin)
    x = prob.nodes()
    for k in range(1, M):
        u = GridVector(np.sin(k * np.pi * x), prob.h)
        Au = prob.apply_A(0.0, u)
        lam = dirichlet_eigenvalue(k, prob.h)
        err = np.max(np.abs(Au.values - lam * u.values)) / np.max(np.abs(lam * u.values))
        assert err <= 1e-10


def test_matches_dense_operator(rng):
    prob = paper_problem("hat", 20)
    for t in (0.01, 0.07, 0.09):
        u = rng.normal(size=19)
        np.testing.assert_allclose(
            prob.apply_A(t, GridVector(u, prob.h)).values, dense_operator(20, p_test(t)) @ u, rtol=1e-12, atol=1e-9
        )
        np.testing.assert_allclose(prob.operator(t).to_dense(), dense_operator(20, p_test(t)))


def test_self_adjoint(rng):
    prob = paper_problem("sine", 100)
    for t in rng.uniform(0, 0.1, 20):
        u, v = (GridVector(rng.normal(size=99), prob.h) for _ in range(2))
        a = inner_product(prob.apply_A(t, u), v)
        b = inner_product(u, prob.apply_A(t, v))
        assert a == pytest.approx(b, rel=1e-10)


def test_positive_definite(rng):
    prob = paper_problem("sine", 100)
    lam1 = dirichlet_eigenvalue(1, prob.h)
    for t in rng.uniform(0, 0.1, 20):
        u = GridVector(rng.normal(size=99), prob.h)
        assert inner_product(prob.apply_A(t, u), u) >= lam1 * norm(u) ** 2 * (1 - 1e-12)


def test_initial_states():
    np.testing.assert_allclose(
        paper_problem(Case.SINE, 4).initial_state().values, [math.sin(math.pi / 4), 1.0, math.sin(3 * math.pi / 4)]
    )
    np.testing.assert_allclose(paper_problem(Case.HAT, 4).initial_state().values, [0.5, 1.0, 0.5])
    np.testing.assert_array_equal(paper_problem("const", 7).initial_state().values, np.ones(6))


def test_source_is_spatially_constant():
    prob = paper_problem("sine", 10)
    np.testing.assert_array_equal(prob.source(0.06).values, np.full(9, f_test(0.06)))
    np.testing.assert_array_equal(prob.source(0.02).values, np.zeros(9))


def test_nonfinite_coefficient_rejected():
    prob = Heat1DProblem(M=4, p=lambda t: math.inf, f=zero, u0=np.sin)
    with pytest.raises(ValueError):
        prob.apply_A(0.0, GridVector([1, 1, 1], 0.25))
