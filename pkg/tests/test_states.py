"""
Tests for the MEMS and TPCS families and random state generation
"""

import numpy as np
import pytest

from qbroadcast import linalg
from qbroadcast.exceptions import DomainError
from qbroadcast.states import (
    MemsBranch,
    bell_states,
    haar_random_ket,
    haar_random_state,
    mems,
    mems_branch_i,
    mems_branch_ii,
    mems_params,
    sample_rng,
    tpcs,
    tpcs_params,
)


def assert_physical(rho, tol=1e-12):
    linalg.validate_physical(rho, tol, 1e-12, tol)


class TestMems:
    """Maximally entangled mixed states"""

    @pytest.mark.parametrize("r", [0.0, 0.1, 0.25, 0.5, 0.51, 0.75, 1.0])
    def test_physical(self, r):
        rho = mems(r)
        assert rho.dims == (2, 3)
        assert_physical(rho)

    def test_branch_selection(self):
        assert mems_params(0.5).subclass is MemsBranch.I
        assert mems_params(0.5000001).subclass is MemsBranch.II

    def test_continuous_at_branch_point(self):
        assert mems_branch_i(0.5).max_abs_diff(mems_branch_ii(0.5)) < 1e-15

    def test_branch_formulas_match_dispatch(self):
        assert mems(0.3).max_abs_diff(mems_branch_i(0.3)) == 0
        assert mems(0.7).max_abs_diff(mems_branch_ii(0.7)) == 0

    def test_endpoints(self):
        zero = mems(0.0).matrix
        assert np.allclose(zero, np.diag([0.2, 0.2, 0.2, 0.0, 0.2, 0.2]))
        one = mems(1.0)
        assert one.purity() == pytest.approx(1.0)
        assert one.matrix[0, 5] == pytest.approx(0.5)

    def test_coherence_entry(self):
        assert mems(0.4).matrix[5, 0] == pytest.approx(0.2)

    @pytest.mark.parametrize("r", [-0.01, 1.01])
    def test_out_of_domain(self, r):
        with pytest.raises(DomainError) as exc_info:
            mems(r)
        assert exc_info.value.parameter == "r"


class TestTpcs:
    """Two-parameter class built from Bell projectors"""

    @pytest.mark.parametrize(
        "alpha,gamma", [(0.0, 0.0), (0.0, 1.0), (0.5, 0.0), (0.2, 0.3), (0.1, 0.8), (0.25, 0.5)]
    )
    def test_physical(self, alpha, gamma):
        assert_physical(tpcs(alpha, gamma))

    def test_beta(self):
        assert tpcs_params(0.1, 0.2).beta == pytest.approx(0.6 / 3)

    def test_singlet_corner(self):
        rho = tpcs(0.0, 1.0)
        psi_minus = bell_states()["psi-"]
        assert np.allclose(rho.matrix, np.outer(psi_minus, psi_minus.conj()))

    def test_qutrit_level_two_corner(self):
        rho = tpcs(0.5, 0.0)
        assert np.allclose(rho.matrix, np.diag([0, 0, 0.5, 0, 0, 0.5]))

    def test_bell_states_orthonormal(self):
        vectors = np.array(list(bell_states().values()))
        assert np.allclose(vectors @ vectors.conj().T, np.eye(4))

    @pytest.mark.parametrize(
        "alpha,gamma,parameter",
        [(-0.1, 0.5, "alpha"), (0.6, 0.0, "alpha"), (0.1, 1.2, "gamma"), (0.4, 0.5, "beta")],
    )
    def test_out_of_domain(self, alpha, gamma, parameter):
        with pytest.raises(DomainError) as exc_info:
            tpcs(alpha, gamma)
        assert exc_info.value.parameter == parameter

    def test_boundary_slack(self):
        """Points on the 2 alpha + gamma = 1 edge are admissible"""
        assert_physical(tpcs(0.3, 0.4))


class TestRandomStates:
    """Induced-measure random states"""

    def test_physical(self):
        assert_physical(haar_random_state((2, 3), seed=0))

    def test_reproducible(self):
        a = haar_random_state((2, 3), 64, seed=123)
        b = haar_random_state((2, 3), 64, seed=123)
        assert np.array_equal(a.matrix, b.matrix)

    def test_seeds_differ(self):
        assert haar_random_state((2, 3), seed=1).max_abs_diff(haar_random_state((2, 3), seed=2)) > 1e-3

    def test_rank_envelope_one_is_pure(self):
        assert haar_random_state((2, 3), 1, seed=9).purity() == pytest.approx(1.0)

    def test_rank_limited_by_envelope(self):
        rho = haar_random_state((2, 4), 3, seed=10)
        assert np.linalg.matrix_rank(rho.matrix, tol=1e-10) == 3

    def test_larger_environment_is_more_mixed(self):
        small = np.mean([haar_random_state((2, 3), 6, seed=s).purity() for s in range(200)])
        large = np.mean([haar_random_state((2, 3), 64, seed=s).purity() for s in range(200)])
        assert large < small
        # E[Tr rho^2] = (D + K) / (D K + 1) for the induced measure
        assert small == pytest.approx(12 / 37, abs=0.02)

    def test_invalid_envelope(self):
        with pytest.raises(DomainError):
            haar_random_state((2, 3), 0, seed=1)

    def test_ket_normalized(self):
        assert np.linalg.norm(haar_random_ket(5, seed=4)) == pytest.approx(1.0)

    def test_sample_streams(self):
        assert np.array_equal(sample_rng(42, 3).standard_normal(4), np.random.default_rng(45).standard_normal(4))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
