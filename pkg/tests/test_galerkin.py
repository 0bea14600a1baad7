"""Intrusive reduction and reduced-model evaluation against dense oracles."""

import numpy as np
import pytest

from exactopinf.fom import from_dense_operators, simulate, eval_rhs
from exactopinf.galerkin import (
    AggregatedOperator,
    MissingMultilinearAccess,
    as_fom,
    intrusive_reduce,
    rom_rhs,
    rom_simulate,
)
from exactopinf.fom import PolynomialFOM
from exactopinf.tensor_poly import MonomialBasis, compress_state, monomial_count


class TestAggregatedOperator:
    def test_block_access(self, rng):
        basis = MonomialBasis(n=2, degree_set=(1, 2), n_u=2)
        M = rng.standard_normal((2, basis.n_f))
        op = AggregatedOperator(basis=basis, matrix=M)
        np.testing.assert_array_equal(op.degree_block(1), M[:, 0:2])
        np.testing.assert_array_equal(op.degree_block(2), M[:, 2:5])
        np.testing.assert_array_equal(op.input_block, M[:, 5:7])

    def test_shape_and_finiteness_validation(self):
        basis = MonomialBasis(n=2, degree_set=(1,))
        with pytest.raises(ValueError):
            AggregatedOperator(basis=basis, matrix=np.zeros((2, 3)))
        bad = np.zeros((2, 2))
        bad[0, 0] = np.nan
        with pytest.raises(ValueError):
            AggregatedOperator(basis=basis, matrix=bad)


class TestIntrusiveReduce:
    def test_identity_basis_diagonal_linear(self, rng):
        N = 5
        A1 = rng.standard_normal((N, N))
        fom = from_dense_operators({1: A1})
        V = np.eye(N)[:, :3]
        red = intrusive_reduce(fom, V)
        np.testing.assert_allclose(red.degree_block(1), A1[:3, :3], rtol=1e-13)

    def test_dimension_one_scalar_operators(self, rng):
        N = 6
        fom, = (from_dense_operators(
            {i: rng.standard_normal((N, monomial_count(N, i))) for i in (1, 2)}
        ),)
        v = rng.standard_normal(N)
        v /= np.linalg.norm(v)
        red = intrusive_reduce(fom, v.reshape(N, 1))
        # n=1: each block is the scalar v^T H_i(v, ..., v), multiplicity 1
        for i in (1, 2):
            expected = v @ fom.multilinear[i](*([v] * i))
            np.testing.assert_allclose(red.degree_block(i)[0, 0], expected, rtol=1e-12)

    def test_quadratic_action_oracle(self, rng):
        # reduced block applied to compressed reduced squares must equal the
        # projected full-order quadratic action: the multiplicity bookkeeping
        N, n = 6, 3
        A2 = rng.standard_normal((N, monomial_count(N, 2)))
        fom = from_dense_operators({2: A2})
        V = np.linalg.qr(rng.standard_normal((N, n)))[0]
        red = intrusive_reduce(fom, V)
        for _ in range(20):
            xt = rng.standard_normal(n)
            lhs = red.degree_block(2) @ compress_state(xt, 2)
            rhs = V.T @ (A2 @ compress_state(V @ xt, 2))
            np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-12)

    def test_input_block(self, rng):
        N = 5
        B = rng.standard_normal((N, 2))
        fom = from_dense_operators({1: rng.standard_normal((N, N))}, B)
        V = np.linalg.qr(rng.standard_normal((N, 2)))[0]
        red = intrusive_reduce(fom, V)
        np.testing.assert_allclose(red.input_block, V.T @ B, rtol=1e-12)

    def test_missing_multilinear(self):
        fom = PolynomialFOM(dimension=2, degree_set=(1,), n_u=0, rhs=lambda x, u: x)
        with pytest.raises(MissingMultilinearAccess):
            intrusive_reduce(fom, np.eye(2))

    def test_pod_basis_argument(self, burgers_data):
        a = intrusive_reduce(burgers_data["fom"], burgers_data["pod"], 3)
        b = intrusive_reduce(burgers_data["fom"], burgers_data["pod"].matrix(3))
        np.testing.assert_array_equal(a.matrix, b.matrix)


class TestRomRhs:
    def test_zero_state_no_constant(self, rng):
        basis = MonomialBasis(n=2, degree_set=(1, 2))
        op = AggregatedOperator(basis=basis, matrix=rng.standard_normal((2, 5)))
        np.testing.assert_array_equal(rom_rhs(op, np.zeros(2)), np.zeros(2))

    def test_unit_features_pick_columns(self):
        basis = MonomialBasis(n=2, degree_set=(1,), n_u=1)
        M = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        op = AggregatedOperator(basis=basis, matrix=M)
        np.testing.assert_array_equal(rom_rhs(op, np.array([1.0, 0.0])), M[:, 0])
        np.testing.assert_array_equal(
            rom_rhs(op, np.zeros(2), np.array([1.0])), M[:, 2]
        )

    def test_matches_projected_rhs(self, rng):
        N, n = 6, 3
        fom = from_dense_operators(
            {i: rng.standard_normal((N, monomial_count(N, i))) for i in (1, 2)}
        )
        V = np.linalg.qr(rng.standard_normal((N, n)))[0]
        red = intrusive_reduce(fom, V)
        for _ in range(10):
            xt = rng.standard_normal(n)
            np.testing.assert_allclose(
                rom_rhs(red, xt),
                V.T @ eval_rhs(fom, V @ xt, None),
                rtol=1e-11,
                atol=1e-12,
            )


class TestRomSimulate:
    def test_zero_operator_constant(self):
        basis = MonomialBasis(n=2, degree_set=(1,))
        op = AggregatedOperator(basis=basis, matrix=np.zeros((2, 2)))
        snaps = rom_simulate(op, np.array([1.0, -1.0]), None, 0.1, 4)
        assert np.all(snaps.states == snaps.states[:, :1])

    def test_full_basis_reproduces_fom(self, rng):
        N = 4
        A1 = rng.standard_normal((N, N))
        fom = from_dense_operators({1: A1})
        red = intrusive_reduce(fom, np.eye(N))
        x0 = rng.standard_normal(N)
        a = simulate(fom, x0, None, 0.01, 50)
        b = rom_simulate(red, x0, None, 0.01, 50)
        np.testing.assert_allclose(a.states, b.states, atol=1e-10)

    def test_as_fom_wraps_operator(self, rng):
        basis = MonomialBasis(n=2, degree_set=(1, 2), n_u=1)
        op = AggregatedOperator(basis=basis, matrix=rng.standard_normal((2, 6)))
        wrapped = as_fom(op)
        x = rng.standard_normal(2)
        u = rng.standard_normal(1)
        np.testing.assert_allclose(
            eval_rhs(wrapped, x, u), rom_rhs(op, x, u), rtol=1e-14
        )
