"""
Tests for the dense matrix kernel
"""

import numpy as np
import pytest
from scipy.stats import unitary_group

from qbroadcast import linalg
from qbroadcast.bloch import standard_basis
from qbroadcast.exceptions import ContractViolationError, ShapeError
from qbroadcast.states import bell_pair, haar_random_state, mems

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


class TestKron:
    """Kronecker products"""

    def test_identity(self):
        assert np.allclose(linalg.kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_sigma_z_identity(self):
        assert np.allclose(linalg.kron(SIGMA_Z, np.eye(3)), np.diag([1, 1, 1, -1, -1, -1]))

    def test_sigma_x_gell_mann_matches_elementwise(self):
        g1 = standard_basis(3).ops[0]
        result = linalg.kron(SIGMA_X, g1)
        expected = np.zeros((6, 6), dtype=complex)
        for a in range(2):
            for b in range(2):
                for i in range(3):
                    for j in range(3):
                        expected[3 * a + i, 3 * b + j] = SIGMA_X[a, b] * g1[i, j]
        assert np.array_equal(result, expected)
        assert np.allclose(result[:3, 3:], g1)
        assert np.allclose(result[:3, :3], 0)


class TestPartialTrace:
    """Partial trace over tensor factors"""

    def test_bell_marginal(self):
        reduced = linalg.partial_trace(bell_pair().matrix, (2, 2), keep=[0])
        assert np.allclose(reduced, np.eye(2) / 2)

    def test_product_state(self):
        a = haar_random_state(2, seed=1).matrix
        b = haar_random_state(3, seed=2).matrix
        assert np.allclose(linalg.partial_trace(np.kron(a, b), (2, 3), keep=[0]), a)
        assert np.allclose(linalg.partial_trace(np.kron(a, b), (2, 3), keep=[1]), b)

    def test_mems_pure_marginal(self):
        reduced = linalg.partial_trace(mems(1.0).matrix, (2, 3), keep=[0])
        assert np.allclose(reduced, np.diag([0.5, 0.5]), atol=1e-14)

    def test_brute_force_summation(self):
        rho = haar_random_state((2, 3), seed=7).matrix
        expected = np.zeros((3, 3), dtype=complex)
        for a in range(2):
            expected += rho[3 * a:3 * a + 3, 3 * a:3 * a + 3]
        assert np.allclose(linalg.partial_trace(rho, (2, 3), keep=[1]), expected)

    def test_trace_and_hermiticity_preserved(self):
        rho = haar_random_state((2, 3, 2), seed=3).matrix
        reduced = linalg.partial_trace(rho, (2, 3, 2), keep=[0, 2])
        assert reduced.shape == (4, 4)
        assert abs(np.trace(reduced) - 1) < 1e-10
        assert np.max(np.abs(reduced - reduced.conj().T)) < 1e-12

    def test_sequential_equals_single_shot(self):
        dims = (2, 3, 2)
        rho = haar_random_state(dims, seed=11).matrix
        single = linalg.partial_trace(rho, dims, keep=[1])
        step = linalg.partial_trace(rho, dims, keep=[0, 1])
        sequential = linalg.partial_trace(step, (2, 3), keep=[1])
        other = linalg.partial_trace(linalg.partial_trace(rho, dims, keep=[1, 2]), (3, 2), keep=[0])
        assert np.max(np.abs(single - sequential)) < 1e-12
        assert np.max(np.abs(single - other)) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            linalg.partial_trace(np.eye(6) / 6, (2, 2), keep=[0])

    def test_empty_keep(self):
        with pytest.raises(ShapeError):
            linalg.partial_trace(np.eye(6) / 6, (2, 3), keep=[])


class TestPartialTranspose:
    """Partial transposition"""

    def test_bell_min_eigenvalue(self):
        pt = linalg.partial_transpose(bell_pair().matrix, (2, 2), 1)
        assert linalg.min_eigenvalue(pt) == pytest.approx(-0.5, abs=1e-12)

    def test_product_state_stays_positive(self):
        a = haar_random_state(2, seed=4).matrix
        b = haar_random_state(3, seed=5).matrix
        pt = linalg.partial_transpose(np.kron(a, b), (2, 3), 1)
        assert np.allclose(pt, np.kron(a, b.T))
        assert linalg.min_eigenvalue(pt) >= -1e-12

    def test_involution(self):
        rho = haar_random_state((2, 3), seed=6).matrix
        twice = linalg.partial_transpose(linalg.partial_transpose(rho, (2, 3), 0), (2, 3), 0)
        assert np.array_equal(twice, rho)

    def test_index_relation(self):
        rho = haar_random_state((2, 3), seed=8).matrix
        pt = linalg.partial_transpose(rho, (2, 3), 1)
        for m in range(2):
            for mu in range(3):
                for eta in range(2):
                    for v in range(3):
                        assert pt[3 * m + mu, 3 * eta + v] == rho[3 * m + v, 3 * eta + mu]

    def test_trace_preserved_and_spectrum_real(self):
        rho = haar_random_state((3, 3), seed=9).matrix
        pt = linalg.partial_transpose(rho, (3, 3), 0)
        assert np.trace(pt) == pytest.approx(np.trace(rho))
        assert np.max(np.abs(np.linalg.eigvals(pt).imag)) < 1e-10

    def test_invalid_subsystem(self):
        with pytest.raises(ShapeError):
            linalg.partial_transpose(np.eye(4) / 4, (2, 2), 2)


class TestPermuteSubsystems:
    """Reordering of tensor factors"""

    def test_swap_of_product(self):
        a = haar_random_state(2, seed=12).matrix
        b = haar_random_state(3, seed=13).matrix
        swapped, dims = linalg.permute_subsystems(np.kron(a, b), (2, 3), (1, 0))
        assert dims == (3, 2)
        assert np.allclose(swapped, np.kron(b, a))

    def test_rejects_non_permutation(self):
        with pytest.raises(ShapeError):
            linalg.permute_subsystems(np.eye(4), (2, 2), (0, 0))


class TestEigHermitian:
    """Hermitian eigendecomposition"""

    def test_maximally_mixed(self):
        values, _ = linalg.eig_hermitian(np.eye(4) / 4)
        assert np.allclose(values, [0.25] * 4)

    def test_descending_and_reconstructs(self):
        a = np.random.default_rng(0).standard_normal((6, 6)) + 1j * np.random.default_rng(1).standard_normal((6, 6))
        m = a + a.conj().T
        values, vectors = linalg.eig_hermitian(m)
        assert np.all(np.diff(values) <= 0)
        assert np.max(np.abs(m - vectors @ np.diag(values) @ vectors.conj().T)) < 1e-10

    def test_matches_characteristic_polynomial_roots(self):
        a = np.random.default_rng(2).standard_normal((6, 6)) + 1j * np.random.default_rng(3).standard_normal((6, 6))
        m = a + a.conj().T
        roots = np.sort(np.roots(np.poly(m)).real)[::-1]
        assert np.allclose(linalg.eig_hermitian(m).values, roots, atol=1e-6)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ContractViolationError):
            linalg.eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


class TestNorms:
    """Trace and Ky-Fan norms"""

    def test_identity(self):
        assert linalg.trace_norm(np.eye(3)) == pytest.approx(3)

    def test_density_matrix(self):
        assert linalg.trace_norm(haar_random_state((2, 3), seed=14).matrix) == pytest.approx(1, abs=1e-12)

    def test_ky_fan_diagonal(self):
        assert linalg.ky_fan_norm(np.diag([3.0, -4.0])) == pytest.approx(7)

    def test_ky_fan_isotropic_correlation(self):
        assert linalg.ky_fan_norm(np.eye(3) / 3) == pytest.approx(1)

    def test_ky_fan_rectangular_oracle(self):
        a = np.random.default_rng(15).standard_normal((3, 8))
        oracle = np.sum(np.sqrt(np.clip(np.linalg.eigvalsh(a @ a.T), 0, None)))
        assert linalg.ky_fan_norm(a) == pytest.approx(oracle, abs=1e-10)

    def test_unitary_invariance(self):
        m = haar_random_state((2, 3), seed=16).matrix
        u = unitary_group.rvs(6, random_state=17)
        v = unitary_group.rvs(6, random_state=18)
        assert linalg.trace_norm(u @ m @ v) == pytest.approx(linalg.trace_norm(m), abs=1e-9)


class TestRealign:
    """Realignment map"""

    def test_bell_trace_norm(self):
        assert linalg.trace_norm(linalg.realign(bell_pair().matrix, (2, 2))) == pytest.approx(2)

    def test_maximally_mixed(self):
        assert linalg.trace_norm(linalg.realign(np.eye(4) / 4, (2, 2))) == pytest.approx(0.5)

    def test_product_state_bounded(self):
        a = haar_random_state(2, seed=19).matrix
        b = haar_random_state(3, seed=20).matrix
        norm = linalg.trace_norm(linalg.realign(np.kron(a, b), (2, 3)))
        assert norm <= 1 + 1e-12

    def test_shape_and_elementary_tensor(self):
        m, n = 2, 3
        i, j, k, l = 1, 0, 2, 1
        rho = np.zeros((m * n, m * n))
        rho[i * n + k, j * n + l] = 1  # |i><j| (x) |k><l|
        r = linalg.realign(rho, (m, n))
        assert r.shape == (m * m, n * n)
        assert r[i * m + j, k * n + l] == 1
        assert np.count_nonzero(r) == 1

    def test_inverse(self):
        rho = haar_random_state((2, 3), seed=21).matrix
        assert np.array_equal(linalg.unrealign(linalg.realign(rho, (2, 3)), (2, 3)), rho)

    def test_non_bipartite(self):
        with pytest.raises(ShapeError):
            linalg.realign(np.eye(8) / 8, (2, 2, 2))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
