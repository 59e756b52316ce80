import numpy as np
import pytest

from gramspec import (
    DegenerateMomentsError,
    InputError,
    cdf_bounds,
    christoffel,
    moment_match_set,
    moments_from_values,
    orthopoly_from_moments,
)

REFERENCE_SET = [1, 2, 3, 4, 5, 7, 9, 12, 13, 14, 22, 23, 29, 30, 31]


def basis_of(values, k):
    return orthopoly_from_moments(moments_from_values(values, 2 * k), k)


class TestConstruction:
    def test_two_point_set_linear_term(self):
        # for {0, 2} the degree-1 polynomial must vanish at the mean
        basis = basis_of([0.0, 2.0], 2)
        assert basis.alpha[0] == pytest.approx(1.0, abs=1e-12)
        assert basis.evaluate(1.0)[0, 1] == pytest.approx(0.0, abs=1e-12)
        assert sorted(basis.nodes) == pytest.approx([0.0, 2.0], abs=1e-10)

    def test_degenerate_support_detected(self):
        # three requested degrees but only two distinct support points
        with pytest.raises(DegenerateMomentsError):
            basis_of([1.0, 1.0, 1.0, 2.0], 3)

    def test_insufficient_moments(self):
        m = moments_from_values([1.0, 2.0, 3.0], 3)
        with pytest.raises(InputError):
            orthopoly_from_moments(m, 2)

    def test_requires_mean_normalization(self):
        m = moments_from_values([1.0, 2.0], 4, normalization="raw")
        with pytest.raises(InputError):
            orthopoly_from_moments(m, 2)


class TestNodeProperties:
    @pytest.mark.parametrize("atoms", [
        [0.5, 1.5, 4.0],
        [1.51216, 6.52312, 9.54601, 20.5897, 30.1624],
        [0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.4],
    ])
    def test_roots_orthonormality_christoffel(self, atoms):
        k = len(atoms)
        basis = basis_of(atoms, k)
        pts = np.asarray(sorted(atoms))
        vals = basis.evaluate(pts)
        # roots of the top polynomial are the support points
        hull = np.linspace(pts.min(), pts.max(), 257)
        top_scale = np.max(np.abs(basis.evaluate(hull)[:, k]))
        assert np.max(np.abs(vals[:, k])) <= 1e-6 * top_scale
        # discrete orthonormality: sum_l P_i(b_l) P_j(b_l) = k * delta_ij
        G = vals[:, :k].T @ vals[:, :k]
        assert np.max(np.abs(G - k * np.eye(k))) <= 1e-6
        # Christoffel value 1/k at every node
        for b in atoms:
            assert christoffel(basis, b) == pytest.approx(1.0 / k, abs=1e-8)

    def test_single_atom(self):
        basis = basis_of([0.7], 1)
        assert christoffel(basis, 0.7) == pytest.approx(1.0, abs=1e-12)
        assert basis.nodes == pytest.approx([0.7])

    def test_far_from_support_is_smaller(self):
        atoms = moment_match_set(REFERENCE_SET, 5)
        basis = basis_of(atoms, 5)
        at_nodes = min(christoffel(basis, b) for b in atoms)
        span = max(atoms) - min(atoms)
        for x in (min(atoms) - span, max(atoms) + span, max(atoms) + 3 * span):
            assert christoffel(basis, x) < at_nodes


class TestCdfBounds:
    def test_uniform_support_staircase(self):
        k = 4
        basis = basis_of([1.0, 2.0, 5.0, 9.0], k)
        bounds = cdf_bounds(basis)
        for i in range(k):
            assert bounds.lower[i] == pytest.approx(i / k, abs=1e-9)
            assert bounds.upper[i] == pytest.approx((i + 1) / k, abs=1e-9)

    def test_single_node(self):
        bounds = cdf_bounds(basis_of([3.0], 1))
        assert bounds.lower == pytest.approx([0.0], abs=1e-12)
        assert bounds.upper == pytest.approx([1.0], abs=1e-12)

    def test_reference_set_sandwich(self):
        # the distribution function of the large set is pinched at each node
        # of the basis built from its moment-matched representative
        k = 5
        matched = moment_match_set(REFERENCE_SET, k)
        bounds = cdf_bounds(basis_of(matched, k))
        srt = np.sort(np.asarray(REFERENCE_SET, dtype=float))
        for x, lo, up in zip(bounds.nodes, bounds.lower, bounds.upper):
            F = np.mean(srt <= x + 1e-12 * max(abs(x), 1.0))
            assert lo - 1e-9 <= F <= up + 1e-9


def test_richer_measure_has_top_term():
    # six support points, degree-3 basis: the top Hankel block is regular
    basis = basis_of([0.5, 1.0, 2.0, 3.5, 5.0, 8.0], 3)
    assert basis.top_scale is not None
    assert all(d > 0 for d in basis.hankel_determinants)
    # k-atom input instead leaves the top determinant at zero
    flat = basis_of([1.0, 2.0, 4.0], 3)
    assert flat.top_scale is None
    assert flat.hankel_determinants[-1] == pytest.approx(0.0, abs=1e-20)
