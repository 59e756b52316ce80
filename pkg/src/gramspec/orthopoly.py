"""Orthonormal polynomials of a discrete measure, built from its moments.

The basis is constructed through a Cholesky factorization of the Hankel
moment matrix and the associated symmetric tridiagonal (Jacobi) matrix,
which is mathematically equivalent to the classical determinant formulas
but does not overflow or cancel for useful degrees.  The degree-k
polynomial's roots and the Christoffel weights at those roots come out of
the Jacobi eigendecomposition, and they feed the distribution-function
bounds used by the interlacing machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import mpmath as mp
import numpy as np

from .errors import DegenerateMomentsError, InputError, NumericalError
from .moments import MomentSequence, working_dps

# Relative pivot threshold below which a Hankel block counts as singular,
# i.e. the measure has fewer distinct support points than requested.
_PIVOT_REL_TOL = 1e-12


@dataclass(frozen=True)
class OrthoPolyBasis:
    """Recurrence data for the orthonormal polynomials P_0..P_k of a measure.

    ``alpha`` and ``beta`` are the three-term recurrence coefficients
    (beta are the positive off-diagonal entries of the Jacobi matrix).
    ``top_scale`` normalizes the degree-k polynomial; it is None when the
    measure has exactly k support points, in which case the top Hankel
    determinant vanishes and only the root locations of P_k are defined.
    """

    degree: int
    alpha: tuple
    beta: tuple
    hankel_determinants: tuple
    nodes: tuple
    node_weights: tuple
    mu0: float = 1.0
    top_scale: Optional[float] = None

    def evaluate(self, x) -> np.ndarray:
        """Values of P_0..P_k at x (vectorized); column j holds P_j.

        When ``top_scale`` is None the last column is the (well-defined)
        unnormalized remainder whose roots are the nodes.
        """
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        k = self.degree
        out = np.empty(xa.shape + (k + 1,))
        out[..., 0] = 1.0 / np.sqrt(self.mu0)
        prev = np.zeros_like(xa)
        cur = out[..., 0]
        for j in range(k):
            b_next = self.beta[j] if j < len(self.beta) else (self.top_scale if self.top_scale else 1.0)
            nxt = ((xa - self.alpha[j]) * cur - (self.beta[j - 1] if j > 0 else 0.0) * prev) / b_next
            out[..., j + 1] = nxt
            prev, cur = cur, nxt
        return out

    def christoffel_values(self, x) -> np.ndarray:
        """Empirical Christoffel function 1 / sum_j P_j(x)^2, vectorized.

        The degree-k term participates only when the measure has more than
        k support points; at the nodes it vanishes either way.
        """
        vals = self.evaluate(x)
        sq = vals[..., :-1] ** 2
        total = sq.sum(axis=-1)
        if self.top_scale is not None:
            total = total + vals[..., -1] ** 2
        return 1.0 / total


@dataclass(frozen=True)
class CdfBounds:
    """Two-sided bounds on a distribution function at the basis nodes."""

    nodes: tuple
    lower: tuple
    upper: tuple

    def __post_init__(self):
        for lo, up in zip(self.lower, self.upper):
            if not (-1e-12 <= lo <= up <= 1 + 1e-12):
                raise NumericalError(f"invalid bound pair ({lo}, {up})")


def _ldl_pivots(M: mp.matrix) -> list:
    """Pivots of the LDL^T factorization of a symmetric mp matrix.

    Stops with DegenerateMomentsError if an interior pivot is nonpositive;
    the final pivot is returned as-is (it legitimately hits zero when the
    measure has exactly k atoms).
    """
    p = M.rows
    A = mp.matrix(M)
    pivots = []
    for i in range(p):
        d = A[i, i]
        pivots.append(d)
        if i == p - 1:
            break
        if d <= _PIVOT_REL_TOL * abs(M[i, i]):
            raise DegenerateMomentsError(
                f"Hankel pivot {i} is not positive: the measure has fewer than "
                f"{p - 1} distinct support points"
            )
        for r in range(i + 1, p):
            f = A[r, i] / d
            for c in range(i, p):
                A[r, c] -= f * A[i, c]
    return pivots


def _solve_lower(L: mp.matrix, B: mp.matrix) -> mp.matrix:
    """Forward substitution: X with L X = B for lower-triangular L."""
    p, q = L.rows, B.cols
    X = mp.matrix(p, q)
    for c in range(q):
        for i in range(p):
            acc = B[i, c]
            for j in range(i):
                acc -= L[i, j] * X[j, c]
            X[i, c] = acc / L[i, i]
    return X


def jacobi_from_moments(mu: list, p: int) -> tuple:
    """Jacobi matrix data (alpha, beta) from moments mu_0..mu_{2p-1} (mpmath).

    alpha has length p, beta length p-1.  Requires the p x p Hankel moment
    matrix to be positive definite.
    """
    if len(mu) < 2 * p:
        raise InputError(f"need at least {2 * p} moments for a {p}-point rule")
    H = mp.matrix([[mu[i + j] for j in range(p)] for i in range(p)])
    H1 = mp.matrix([[mu[i + j + 1] for j in range(p)] for i in range(p)])
    try:
        L = mp.cholesky(H)
    except ValueError:
        raise DegenerateMomentsError(
            f"{p} x {p} Hankel moment matrix is not positive definite"
        ) from None
    A1 = _solve_lower(L, H1)
    J = _solve_lower(L, A1.T).T
    J = (J + J.T) / 2
    alpha = [J[i, i] for i in range(p)]
    beta = [J[i + 1, i] for i in range(p - 1)]
    return alpha, beta, J


def gauss_rule_from_jacobi(J: mp.matrix, mu0) -> tuple:
    """Nodes and weights of the quadrature rule attached to a Jacobi matrix."""
    E, Q = mp.eigsy(J)
    order = sorted(range(J.rows), key=lambda i: E[i])
    nodes = [E[i] for i in order]
    weights = [mu0 * Q[0, i] ** 2 for i in order]
    return nodes, weights


def orthopoly_from_moments(m: MomentSequence, k: int) -> OrthoPolyBasis:
    """Build the orthonormal basis of degree k from mean-normalized moments.

    Needs mu_0..mu_2k.  Raises DegenerateMomentsError when the measure has
    fewer than k distinct support points.
    """
    k = int(k)
    if k < 1:
        raise InputError("k must be >= 1")
    if m.normalization != "mean":
        raise InputError("orthopoly construction expects mean-normalized moments")
    if len(m) < 2 * k + 1:
        raise InputError(f"need at least {2 * k + 1} moments (mu_0..mu_{2 * k}), got {len(m)}")
    with mp.workdps(working_dps(k)):
        mu = m.mp_values()
        M = mp.matrix([[mu[i + j] for j in range(k + 1)] for i in range(k + 1)])
        pivots = _ldl_pivots(M)
        dets = []
        acc = mp.mpf(1)
        for d in pivots:
            acc *= d
            dets.append(acc)
        alpha, beta, J = jacobi_from_moments(mu, k)
        nodes, weights = gauss_rule_from_jacobi(J, mu[0])
        # Orthonormal P_k exists only when D_k > 0; its recurrence scale is
        # sqrt(h_k / h_{k-1}) with h_j = D_j / D_{j-1}.
        top_scale = None
        last = pivots[-1]
        if last > _PIVOT_REL_TOL * abs(M[k, k]):
            top_scale = float(mp.sqrt(last / pivots[-2]))
        return OrthoPolyBasis(
            degree=k,
            alpha=tuple(float(a) for a in alpha),
            beta=tuple(float(b) for b in beta),
            hankel_determinants=tuple(float(d) for d in dets),
            nodes=tuple(float(x) for x in nodes),
            node_weights=tuple(float(w) for w in weights),
            mu0=float(mu[0]),
            top_scale=top_scale,
        )


def christoffel(basis: OrthoPolyBasis, x: float) -> float:
    """Empirical Christoffel function of the basis at a point."""
    return float(basis.christoffel_values(float(x))[0])


def cdf_bounds(basis: OrthoPolyBasis) -> CdfBounds:
    """Distribution-function bounds at the nodes x_1 <= ... <= x_k.

    With Christoffel weights w_j at the nodes, the distribution function of
    any measure sharing the basis moments satisfies, at node i,
    ``sum_{j<i} w_j <= F(x_i) <= sum_{j<=i} w_j``.
    """
    w = np.asarray(basis.node_weights, dtype=float)
    if np.any(w <= 0):
        raise NumericalError("node weights must be positive")
    upper = np.minimum(np.cumsum(w), 1.0)
    lower = np.maximum(upper - w, 0.0)
    return CdfBounds(tuple(basis.nodes), tuple(lower), tuple(upper))
