import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ssaroots.errors import RankDeficient, WindowOutOfRange, WindowTooSmall
from ssaroots.polynomial import ComplexPoly
from ssaroots.series import SignalModel, Term, char_poly, generate, real_to_complex, satisfies_lrf
from ssaroots.trajectory import (hankel, is_continuable, minimal_relation, numerical_rank,
                                 principal_angles, relations_basis, relations_space,
                                 trajectory_basis, vandermonde_basis)


def two_cosines():
    return real_to_complex([(0.9, 1 / 8, 0, [1]), (0.9, math.sin(0.25), 0, [1])])


def same_up_to_phase(u, v):
    return abs(abs(np.vdot(u, v)) - np.linalg.norm(u) * np.linalg.norm(v)) < 1e-12


class TestHankel:
    def test_small(self):
        X = hankel([1, 2, 3, 4], 2)
        assert np.array_equal(X.data, [[1, 2, 3], [2, 3, 4]])
        assert X.K == 3 and X.N == 4

    def test_constant(self):
        X = hankel(np.full(8, 3.0), 4)
        assert np.all(X.data == 3.0)
        assert numerical_rank(X) == 1

    def test_geometric(self):
        X = hankel([1, 2, 4, 8, 16], 3)
        assert np.array_equal(X.data, [[1, 2, 4], [2, 4, 8], [4, 8, 16]])

    @pytest.mark.parametrize("L", [1, 5, 7])
    def test_window_bounds(self, L):
        with pytest.raises(WindowOutOfRange):
            hankel(np.ones(5), L)


class TestRank:
    def test_constant(self):
        assert numerical_rank(hankel(np.ones(20), 5)) == 1

    def test_two_exponents(self):
        assert numerical_rank(hankel(generate(SignalModel.of(0.5, 2.0), 20), 6)) == 2

    def test_window_below_dimension(self):
        F = generate(SignalModel.of(0.5, 1.0, -0.8), 20)
        assert numerical_rank(hankel(F, 2)) == 2


class TestTrajectoryBasis:
    def test_constant(self):
        u = trajectory_basis(hankel(np.ones(6), 3), 1).vectors[:, 0]
        assert same_up_to_phase(u, np.ones(3) / math.sqrt(3))

    def test_exponent(self):
        u = trajectory_basis(hankel(generate(SignalModel.of(2.0), 6), 3), 1).vectors[:, 0]
        assert same_up_to_phase(u, np.array([1, 2, 4]) / math.sqrt(21))

    def test_matches_vandermonde_span(self):
        m = two_cosines()
        U = trajectory_basis(hankel(generate(m, 60), 20), 4).vectors
        assert np.allclose(U.conj().T @ U, np.eye(4), atol=1e-10)
        assert np.max(principal_angles(U, vandermonde_basis(m, 20))) < 1e-8

    def test_rank_deficient(self):
        with pytest.raises(RankDeficient):
            trajectory_basis(hankel(np.ones(10), 4), 2)
        assert trajectory_basis(hankel(np.ones(10), 4), 2, exact=False).dim == 2


class TestRelationsBasis:
    def test_first_difference(self):
        M = relations_basis(ComplexPoly([-1, 1]), 3)
        assert np.array_equal(M, [[-1, 0], [1, -1], [0, 1]])

    def test_quadratic(self):
        M = relations_basis(ComplexPoly([1, -2.5, 1]), 4)
        assert np.array_equal(M, [[1, 0], [-2.5, 1], [1, -2.5], [0, 1]])

    def test_annihilates_lagged_vectors(self):
        m = SignalModel.of(0.5, 2.0, (1j, [1, 1]))
        X = hankel(generate(m, 30), 8).data
        M = relations_basis(char_poly(m), 8)
        ip = np.abs(M.T @ X)  # conj(conj(M)) . X
        norms = np.outer(np.linalg.norm(M, axis=0), np.linalg.norm(X, axis=0))
        assert np.max(ip / norms) < 1e-10

    def test_window_too_small(self):
        with pytest.raises(WindowTooSmall):
            relations_basis(ComplexPoly([1, -2.5, 1]), 2)


class TestVandermonde:
    def test_plain(self):
        lam = 0.7 + 0.2j
        V = vandermonde_basis(SignalModel.of(lam), 3)
        assert np.allclose(V[:, 0], [1, lam, lam ** 2])

    def test_derivative_column(self):
        lam = 0.7 + 0.2j
        V = vandermonde_basis(SignalModel.of((lam, [1, 1])), 3)
        assert np.allclose(V[:, 1], [0, 1, 2 * lam])

    def test_span_for_multiple_root(self):
        m = SignalModel.of((0.9, [1, 0.5, 0.1]))
        U = trajectory_basis(hankel(generate(m, 40), 10), 3).vectors
        assert np.max(principal_angles(U, vandermonde_basis(m, 10))) < 1e-8


class TestContinuable:
    def test_constant(self):
        F = np.ones(10)
        assert is_continuable(F, 3, "forward") and is_continuable(F, 3, "backward")

    def test_border_series(self):
        F = np.zeros(10)
        F[-1] = 1.0
        assert not is_continuable(F, 3, "forward")
        assert is_continuable(F, 3, "backward")

    def test_geometric(self):
        F = 2.0 ** np.arange(10)
        assert is_continuable(F, 4, "forward") and is_continuable(F, 4, "backward")

    def test_window_limit(self):
        with pytest.raises(WindowOutOfRange):
            is_continuable(np.ones(10), 6)


def tame_model(rng, d_max=5, lo=0.7, hi=1.3, min_sep=0.3):
    """Simple-root model with well separated roots (keeps sigma_d away from 0)."""
    d = int(rng.integers(1, d_max + 1))
    roots = []
    while len(roots) < d:
        z = rng.uniform(lo, hi) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        if all(abs(z - r) >= min_sep for r in roots):
            roots.append(z)
    coeffs = rng.uniform(0.5, 1.5, d) * np.exp(1j * rng.uniform(-np.pi, np.pi, d))
    return SignalModel(tuple(Term(r, ComplexPoly([c])) for r, c in zip(roots, coeffs)))


@settings(max_examples=40)
@given(st.integers(0, 2 ** 32 - 1))
def test_rank_theorem(seed):
    m = tame_model(np.random.default_rng(seed))
    N, d = 40, m.d
    F = generate(m, N)
    for L in range(2, N):
        r = numerical_rank(hankel(F, L))
        if d <= L <= N - d + 1:
            assert r == d, (L, r)
        elif L < d:
            assert r == L


@settings(max_examples=40)
@given(st.integers(0, 2 ** 32 - 1))
def test_relations_basis_dual_to_vandermonde(seed):
    rng = np.random.default_rng(seed)
    m = tame_model(rng)
    L = m.d + int(rng.integers(1, 8))
    M = relations_basis(char_poly(m), L)
    V = vandermonde_basis(m, L)
    ip = np.abs(M.T @ V) / np.outer(np.linalg.norm(M, axis=0), np.linalg.norm(V, axis=0))
    assert np.max(ip) < 1e-10


@settings(max_examples=30)
@given(st.integers(0, 2 ** 32 - 1))
def test_dimensions_add_up(seed):
    rng = np.random.default_rng(seed)
    m = tame_model(rng)
    N = 30
    F = generate(m, N)
    for L in range(m.d + 1, min(N, N - m.d + 2)):
        assert numerical_rank(hankel(F, L)) + relations_space(F, L).shape[1] == L


@settings(max_examples=30)
@given(st.integers(0, 2 ** 32 - 1))
def test_continuable_both_ways_yields_lrf(seed):
    rng = np.random.default_rng(seed)
    m = tame_model(rng, 4)
    N = 30
    F = generate(m, N)
    L = int(rng.integers(m.d + 1, N // 2 + 1))
    if is_continuable(F, L, "forward") and is_continuable(F, L, "backward"):
        lrf = minimal_relation(F, L)
        assert lrf.order <= min(L - 1, N - L + 1)
        assert satisfies_lrf(F, lrf, 1e-8)
        assert lrf.order == m.d
