import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gramspec import (
    InputError,
    KernelSpec,
    PointSet,
    eigenvalues_sym,
    gram_matrix,
    kernel_eval,
    sample_uniform,
)

GAUSS = KernelSpec("gaussian", 1000.0)


class TestSampleUniform:
    def test_single_point_in_unit_cube(self):
        p = sample_uniform(1, 1, seed=3)
        assert p.n == 1 and p.d == 1
        assert 0.0 <= p.points[0, 0] <= 1.0

    def test_distinct_scalars(self):
        p = sample_uniform(49, 1, seed=5)
        assert len(np.unique(p.points)) == 49

    def test_law_of_large_numbers(self):
        # direct computation: coordinate means of 1000 uniform draws sit near 1/2
        p = sample_uniform(1000, 3, seed=11)
        assert np.all(np.abs(p.points.mean(axis=0) - 0.5) < 0.05)

    def test_bitwise_reproducible(self):
        a = sample_uniform(64, 2, seed=123).points
        b = sample_uniform(64, 2, seed=123).points
        assert np.array_equal(a, b)

    def test_rejects_bad_shape(self):
        with pytest.raises(InputError):
            sample_uniform(0, 1, seed=1)


class TestKernelEval:
    def test_zero_distance(self):
        assert kernel_eval(GAUSS, [0.3], [0.3]) == 1.0

    def test_gaussian_value(self):
        assert kernel_eval(GAUSS, [0.0], [0.1]) == pytest.approx(np.exp(-10.0), rel=1e-12)

    def test_cauchy_value(self):
        cauchy = KernelSpec("cauchy", 10000.0)
        assert kernel_eval(cauchy, [0.0], [0.01]) == pytest.approx(0.5, rel=1e-12)

    def test_symmetric_in_arguments(self):
        x, y = [0.12, 0.7], [0.4, 0.2]
        assert kernel_eval(GAUSS, x, y) == kernel_eval(GAUSS, y, x)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            kernel_eval(GAUSS, [0.0], [0.0, 1.0])

    def test_unknown_family(self):
        with pytest.raises(InputError):
            KernelSpec("triangle", 1.0)

    def test_custom_radial_needs_profile(self):
        with pytest.raises(InputError):
            KernelSpec("custom-radial", 1.0)


class TestGramMatrix:
    def test_single_point(self):
        K = gram_matrix(GAUSS, [[0.5]])
        assert K.shape == (1, 1) and K[0, 0] == 1.0

    def test_two_identical_points(self):
        K = gram_matrix(GAUSS, [[0.3], [0.3]])
        assert np.array_equal(K, np.ones((2, 2)))
        eigs = eigenvalues_sym(K).eigenvalues
        assert eigs == pytest.approx([2.0, 0.0], abs=1e-12)

    def test_sharp_gaussian_config(self):
        X = sample_uniform(49, 1, seed=9)
        K = gram_matrix(GAUSS, X)
        assert K.shape == (49, 49)
        assert np.all(np.diag(K) == 1.0)
        assert np.array_equal(K, K.T)

    def test_psd_within_tolerance(self):
        X = sample_uniform(60, 2, seed=21)
        for fam, lam in (("gaussian", 100.0), ("cauchy", 500.0)):
            spec = eigenvalues_sym(gram_matrix(KernelSpec(fam, lam), X))
            assert spec.eigenvalues[-1] >= -1e-10 * spec.eigenvalues[0]


class TestEigenvaluesSym:
    def test_identity(self):
        spec = eigenvalues_sym(np.eye(3))
        assert np.array_equal(spec.eigenvalues, np.ones(3))

    def test_rank_one(self):
        spec = eigenvalues_sym(np.ones((2, 2)))
        assert spec.eigenvalues == pytest.approx([2.0, 0.0], abs=1e-14)

    def test_trace_identity(self):
        X = sample_uniform(5, 1, seed=2)
        K = gram_matrix(KernelSpec("gaussian", 50.0), X)
        spec = eigenvalues_sym(K)
        assert spec.trace() == pytest.approx(np.trace(K), rel=1e-10)

    def test_reconstruction_residual(self):
        # independent probe through the full eigh decomposition
        X = sample_uniform(30, 2, seed=8)
        K = gram_matrix(KernelSpec("cauchy", 200.0), X)
        vals, vecs = np.linalg.eigh(K)
        resid = np.linalg.norm(K @ vecs - vecs * vals) / np.linalg.norm(K)
        assert resid <= 1e-8
        assert np.sort(vals)[::-1] == pytest.approx(eigenvalues_sym(K).eigenvalues)

    def test_rejects_nonsymmetric(self):
        with pytest.raises(InputError):
            eigenvalues_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))


@settings(max_examples=25, deadline=None)
@given(
    st.integers(min_value=1, max_value=12),
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=0, max_value=10_000),
)
def test_gram_properties(n, d, seed):
    X = sample_uniform(n, d, seed)
    K = gram_matrix(KernelSpec("gaussian", 37.0), X)
    assert np.array_equal(K, K.T)
    assert np.all(np.diag(K) == 1.0)
    eigs = eigenvalues_sym(K).eigenvalues
    assert eigs[-1] >= -1e-10 * max(eigs[0], 1.0)
    assert eigs.sum() == pytest.approx(n, rel=1e-10)


def test_point_set_validation():
    with pytest.raises(InputError):
        PointSet(np.array([[np.nan]]))
    p = PointSet([1.0, 2.0, 3.0])
    assert p.n == 3 and p.d == 1
