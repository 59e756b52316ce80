import json
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from gramspec import (
    HankelPair,
    InputError,
    ScalingDistribution,
    UnsupportedParityError,
    check_stieltjes_solvable,
    hankel_matrices,
    load_distribution,
    sample_scaling,
    save_distribution,
    scaling_moments,
    solve_scaling,
)
from gramspec.rng import substream

# Right-hand sides of the k=7, n=49 moment system.
RHS_7_49 = [Fraction(1), Fraction(8), Fraction(376, 5), Fraction(4324, 5),
            Fraction(12972), Fraction(285384), Fraction(12271512)]

# A published 5-digit solution of the same system.
KNOWN_ATOMS = [4.8651, 9.6827, 24.519, 130.90]
KNOWN_WEIGHTS = [0.41166, 0.56810, 0.020241, 1.4709e-6]


class TestScalingMoments:
    def test_first_moment_is_one(self):
        for k, n in ((3, 6), (5, 25), (9, 81)):
            assert scaling_moments(k, n).mu[0] == 1

    def test_reference_values(self):
        m = scaling_moments(7, 49)
        assert m.mu == tuple(RHS_7_49)

    def test_strictly_increasing(self):
        m = scaling_moments(9, 729)
        assert all(a < b for a, b in zip(m.mu, m.mu[1:]))

    def test_parity_and_divisibility(self):
        with pytest.raises(UnsupportedParityError):
            scaling_moments(4, 8)
        with pytest.raises(InputError):
            scaling_moments(1, 5)
        with pytest.raises(InputError):
            scaling_moments(7, 50)


class TestHankelMatrices:
    def test_small_case_layout(self):
        m = scaling_moments(3, 6)
        pair = hankel_matrices(m)
        assert pair.h == ((m.mu[0], m.mu[1]), (m.mu[1], m.mu[2]))
        assert pair.h_shifted == ((m.mu[1],),)

    def test_reference_layout(self):
        pair = hankel_matrices(scaling_moments(7, 49))
        assert len(pair.h) == 4 and len(pair.h[0]) == 4
        assert len(pair.h_shifted) == 3
        assert pair.h[0][0] == 1
        assert pair.h[0][1] == 8

    def test_symmetry(self):
        pair = hankel_matrices(scaling_moments(9, 27))
        h = np.array([[float(v) for v in row] for row in pair.h])
        hs = np.array([[float(v) for v in row] for row in pair.h_shifted])
        assert np.array_equal(h, h.T)
        assert np.array_equal(hs, hs.T)


class TestStieltjesCheck:
    def test_reference_pair_solvable(self):
        chk = check_stieltjes_solvable(hankel_matrices(scaling_moments(7, 49)))
        assert chk.solvable
        assert chk.min_eigenvalue > 0 and chk.min_eigenvalue_shifted > 0

    def test_full_sweep(self):
        for k in range(3, 16, 2):
            for q in range(2, 11):
                assert check_stieltjes_solvable(hankel_matrices(scaling_moments(k, k * q))).solvable

    def test_non_moment_sequence_rejected(self):
        bad = HankelPair(
            h=((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))),
            h_shifted=((Fraction(0),),),
        )
        assert not check_stieltjes_solvable(bad).solvable


class TestSolve:
    def test_small_case_by_substitution(self):
        dist = solve_scaling(3, 6)
        assert len(dist.atoms) == 2
        assert sum(dist.weights) == pytest.approx(1.0, abs=1e-12)
        mu = scaling_moments(3, 6).float_values()
        for l in range(3):
            assert dist.moment(l) == pytest.approx(mu[l], rel=1e-10)

    def test_reference_case_residuals(self):
        dist = solve_scaling(7, 49)
        assert len(dist.atoms) == 4
        with mp.workdps(60):
            for l, rhs in enumerate(RHS_7_49):
                got = mp.fsum(mp.mpf(w) * mp.mpf(z) ** l for z, w in zip(dist.atoms, dist.weights))
                rel = abs(got - mp.mpf(rhs.numerator) / rhs.denominator) / float(rhs)
                assert float(rel) <= 1e-8

    def test_known_solution_satisfies_system(self):
        # 5-digit rounding of the inputs limits the residual, not the model
        for l, rhs in enumerate(RHS_7_49):
            got = sum(w * z**l for z, w in zip(KNOWN_ATOMS, KNOWN_WEIGHTS))
            assert abs(got - float(rhs)) / float(rhs) <= 5e-3

    def test_deterministic(self):
        a = solve_scaling(5, 40)
        b = solve_scaling(5, 40)
        assert a.atoms == b.atoms and a.weights == b.weights

    def test_positivity_across_range(self):
        for k, q in ((3, 2), (7, 7), (11, 3), (15, 2)):
            dist = solve_scaling(k, k * q)
            assert len(dist.atoms) == (k + 1) // 2
            assert min(dist.atoms) > 0 and min(dist.weights) > 0
            assert dist.moment_residual <= 1e-8


class TestSampleScaling:
    def test_single_atom(self):
        dist = ScalingDistribution(atoms=(2.5,), weights=(1.0,), k=1, n=1)
        rng = substream(3, 0)
        assert all(sample_scaling(dist, rng) == 2.5 for _ in range(10))

    def test_frequencies_within_binomial_bands(self):
        dist = solve_scaling(7, 49)
        rng = substream(99, 1)
        draws = sample_scaling(dist, rng, size=1_000_000)
        m = draws.size
        for atom, w in zip(dist.atoms, dist.weights):
            count = int(np.sum(draws == atom))
            sigma = np.sqrt(m * w * (1 - w))
            assert abs(count - m * w) <= 3 * sigma + 1

    def test_mean_matches_first_moment(self):
        dist = solve_scaling(7, 49)
        rng = substream(7, 2)
        draws = sample_scaling(dist, rng, size=1_000_000)
        assert draws.mean() == pytest.approx(8.0, rel=0.01)


class TestPersistence:
    def test_round_trip(self, tmp_path):
        dist = solve_scaling(3, 12)
        path = tmp_path / "dist.json"
        save_distribution(dist, path)
        doc = json.loads(path.read_text())
        assert set(doc) == {"k", "n", "atoms", "weights", "moment_residual", "closure_rule"}
        back = load_distribution(path)
        assert back.atoms == dist.atoms and back.weights == dist.weights
        assert back.k == 3 and back.n == 12

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            load_distribution(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(InputError):
            load_distribution(p)


def test_distribution_validation():
    with pytest.raises(InputError):
        ScalingDistribution(atoms=(0.0, 1.0), weights=(0.5, 0.5), k=3, n=6)
    with pytest.raises(InputError):
        ScalingDistribution(atoms=(1.0, 2.0), weights=(0.7, 0.4), k=3, n=6)
