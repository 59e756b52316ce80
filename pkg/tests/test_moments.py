import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gramspec import (
    InfeasibleMomentsError,
    InputError,
    KernelSpec,
    gram_matrix,
    eigenvalues_sym,
    moment_match_set,
    moments_from_values,
    sample_uniform,
    spectral_moments,
)

# Matched values for the 15-element reference set at k=5.
REFERENCE_SET = [1, 2, 3, 4, 5, 7, 9, 12, 13, 14, 22, 23, 29, 30, 31]
REFERENCE_MATCHED = [30.1624, 20.5897, 9.54601, 6.52312, 1.51216]


class TestSpectralMoments:
    def test_constant_spectrum(self):
        m = spectral_moments(np.array([1.0, 1.0]), 3)
        assert m.values == (1.0, 1.0, 1.0, 1.0)

    def test_rank_one_spectrum(self):
        m = spectral_moments(np.array([2.0, 0.0]), 2)
        assert m.values == (1.0, 1.0, 2.0)

    def test_frobenius_identity(self):
        K = gram_matrix(KernelSpec("gaussian", 25.0), sample_uniform(6, 1, seed=4))
        m = spectral_moments(eigenvalues_sym(K), 2)
        assert m.values[2] == pytest.approx(np.linalg.norm(K, "fro") ** 2 / 6, rel=1e-10)

    def test_mean_normalization_enforced(self):
        m = moments_from_values([3.0, 5.0], 4)
        assert m.values[0] == 1.0
        raw = moments_from_values([3.0, 5.0], 2, normalization="raw")
        assert raw.values[0] == 2.0


class TestMomentMatchSet:
    def test_constant_set(self):
        out = moment_match_set([2.5] * 8, 4)
        assert out == pytest.approx([2.5] * 4, rel=1e-12)

    def test_quadratic_case(self):
        # hand oracle: p1 = (2/4)*10 = 5, p2 = (2/4)*30 = 15, so e1 = 5,
        # e2 = (25 - 15)/2 = 5 and the roots are (5 +/- sqrt(5))/2
        out = moment_match_set([1, 2, 3, 4], 2)
        expected = [(5 + math.sqrt(5)) / 2, (5 - math.sqrt(5)) / 2]
        assert out == pytest.approx(expected, rel=1e-12)

    def test_reference_set(self):
        out = moment_match_set(REFERENCE_SET, 5)
        assert out == pytest.approx(REFERENCE_MATCHED, rel=1e-3)

    def test_round_trip_power_sums(self):
        rng = np.random.default_rng(4)
        S = rng.random(12) * 10
        k = 4
        out = moment_match_set(S, k)
        for r in range(1, k + 1):
            target = (k / S.size) * np.sum(S**r)
            assert np.sum(out**r) == pytest.approx(target, rel=1e-8)

    def test_infeasible_set(self):
        # one spike among zeros cannot be represented by 2 nonnegative
        # values with uniform weights (n*sum(a^2) > 2*(sum a)^2)
        with pytest.raises(InfeasibleMomentsError):
            moment_match_set([1.0, 0.0, 0.0, 0.0], 2)

    def test_validation(self):
        with pytest.raises(InputError):
            moment_match_set([1.0, 2.0], 3)
        with pytest.raises(InputError):
            moment_match_set([-1.0, 2.0], 1)


@settings(max_examples=25, deadline=None)
@given(
    st.integers(min_value=1, max_value=5),
    st.integers(min_value=1, max_value=4),
    st.lists(st.floats(min_value=0.0, max_value=50.0), min_size=20, max_size=20),
    st.data(),
)
def test_round_trip_property(k, q, pool, data):
    n = k * q
    S = np.asarray(pool[:n])
    assume(S.sum() > 0)
    try:
        out = moment_match_set(S, k)
    except InfeasibleMomentsError:
        assume(False)
    for r in range(1, k + 1):
        target = (k / n) * float(np.sum(S**r))
        assert float(np.sum(out**r)) == pytest.approx(target, rel=1e-8, abs=1e-10)
