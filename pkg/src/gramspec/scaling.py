"""The scaling distribution used by the randomized trial sampler.

For subsample size k and full size n (k odd, k | n) the common scalar z
drawn once per trial must satisfy the prescribed moments

    E(z^l) = (k/n) * C(n, l+1) / C(k, l+1),   l = 0..k-1.

These are exact rationals (big-integer binomials).  Solvability is the
classical Stieltjes moment problem: both Hankel moment matrices must be
positive definite.  The k moments underdetermine a (k+1)/2-atom rule by
one parameter, which is closed by appending a pseudo-moment just above the
smallest value that keeps the extended Hankel matrix positive semidefinite.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath as mp
import numpy as np

from .errors import InputError, SolverFailureError, UnsupportedParityError
from .orthopoly import gauss_rule_from_jacobi, jacobi_from_moments

# Closure slack for the underdetermined moment system.  A slack this large
# keeps the smallest atom well away from zero; tiny slacks put a near-zero
# atom with a few percent weight into the distribution, and the resulting
# hugely expanded trials wreck the small quantile estimates.
CLOSURE_RULE = "min-psd-slack-1e-1"
_CLOSURE_SLACK = 1e-1
MOMENT_RESIDUAL_TOL = 1e-8


def _solver_dps(k: int) -> int:
    return max(60, 10 * int(k))


@dataclass(frozen=True)
class ScalingMoments:
    """Exact prescribed moments mu_0..mu_{k-1} for a (k, n) pair."""

    k: int
    n: int
    mu: tuple  # of Fraction

    def mp_values(self) -> list:
        return [mp.mpf(f.numerator) / mp.mpf(f.denominator) for f in self.mu]

    def float_values(self) -> np.ndarray:
        return np.array([float(f) for f in self.mu])


def _validate_kn(k: int, n: int) -> tuple:
    k, n = int(k), int(n)
    if k % 2 == 0:
        raise UnsupportedParityError(f"k={k} is even; only odd subsample sizes are supported")
    if k < 3:
        raise InputError(f"k={k} is too small; need k >= 3")
    if n < k or n % k != 0:
        raise InputError(f"n={n} must be a positive multiple of k={k}")
    return k, n


def scaling_moments(k: int, n: int) -> ScalingMoments:
    """Exact rational moments (k/n) * C(n, l+1) / C(k, l+1) for l = 0..k-1."""
    k, n = _validate_kn(k, n)
    mu = tuple(
        Fraction(k, n) * Fraction(math.comb(n, l + 1), math.comb(k, l + 1))
        for l in range(k)
    )
    return ScalingMoments(k, n, mu)


@dataclass(frozen=True)
class HankelPair:
    """The two Hankel moment matrices whose positive definiteness settles solvability."""

    h: tuple  # ((k+1)/2)-square, entries mu_{i+j}
    h_shifted: tuple  # ((k-1)/2)-square, entries mu_{i+j+1}

    def mp_matrices(self) -> tuple:
        to_mp = lambda f: mp.mpf(f.numerator) / mp.mpf(f.denominator)
        H = mp.matrix([[to_mp(v) for v in row] for row in self.h])
        Hs = mp.matrix([[to_mp(v) for v in row] for row in self.h_shifted])
        return H, Hs


def hankel_matrices(m: ScalingMoments) -> HankelPair:
    """Assemble the Hankel pair from a prescribed moment sequence."""
    half = (m.k - 1) // 2
    h = tuple(tuple(m.mu[i + j] for j in range(half + 1)) for i in range(half + 1))
    hs = tuple(tuple(m.mu[i + j + 1] for j in range(half)) for i in range(half))
    return HankelPair(h, hs)


@dataclass(frozen=True)
class StieltjesCheck:
    solvable: bool
    min_eigenvalue: float
    min_eigenvalue_shifted: float


def check_stieltjes_solvable(pair: HankelPair) -> StieltjesCheck:
    """True iff both Hankel matrices are positive definite (extended precision)."""
    k_half = len(pair.h)
    with mp.workdps(_solver_dps(2 * k_half)):
        H, Hs = pair.mp_matrices()
        min_h = min(float(e) for e in mp.eigsy(H, eigvals_only=True))
        if Hs.rows > 0:
            min_hs = min(float(e) for e in mp.eigsy(Hs, eigvals_only=True))
        else:
            min_hs = float("inf")
    return StieltjesCheck(min_h > 0 and min_hs > 0, min_h, min_hs)


@dataclass(frozen=True)
class ScalingDistribution:
    """Discrete distribution of the per-trial scaling variable z."""

    atoms: tuple
    weights: tuple
    k: int
    n: int
    moment_residual: float = 0.0
    closure_rule: str = CLOSURE_RULE

    def __post_init__(self):
        atoms = tuple(float(a) for a in self.atoms)
        weights = tuple(float(w) for w in self.weights)
        if len(atoms) != len(weights) or not atoms:
            raise InputError("atoms and weights must be non-empty and equal length")
        if any(a <= 0 for a in atoms):
            raise InputError("all atoms must be strictly positive (points are scaled by (1/z)^(1/d))")
        if any(w <= 0 for w in weights):
            raise InputError("all weights must be strictly positive")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise InputError("weights must sum to 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def max_atom(self) -> float:
        return max(self.atoms)

    def moment(self, l: int) -> float:
        return float(sum(w * a**l for a, w in zip(self.atoms, self.weights)))


def _shifted_with_closure(mu: list, p: int, mu_top):
    """The p x p shifted Hankel matrix with the pseudo-moment in its corner."""
    rows = []
    for i in range(p):
        row = []
        for j in range(p):
            idx = i + j + 1
            row.append(mu[idx] if idx < len(mu) else mu_top)
        rows.append(row)
    return mp.matrix(rows)


def _is_pd(M: mp.matrix) -> bool:
    try:
        mp.cholesky(M)
        return True
    except ValueError:
        return False


def solve_scaling(k: int, n: int) -> ScalingDistribution:
    """Solve for the (k+1)/2-atom scaling distribution of a (k, n) pair.

    Deterministic: the pseudo-moment closing the underdetermined system is
    the bisection infimum of the positive-semidefinite region times
    (1 + 1e-6), so identical inputs give bitwise identical output.
    """
    m = scaling_moments(k, n)
    check = check_stieltjes_solvable(hankel_matrices(m))
    if not check.solvable:
        raise SolverFailureError(
            f"Hankel matrices for (k={k}, n={n}) are not positive definite: "
            f"min eigenvalues {check.min_eigenvalue:.3e}, {check.min_eigenvalue_shifted:.3e}"
        )
    p = (m.k + 1) // 2
    with mp.workdps(_solver_dps(m.k)):
        mu = m.mp_values()
        # Bracket the PSD boundary for the pseudo-moment mu_k.  The 2x2 trailing
        # minor forces mu_k >= mu_{k-1}^2 / mu_{k-2}, so lo=0 always fails.
        lo = mp.mpf(0)
        hi = 2 * mu[-1] ** 2 / mu[-2]
        doublings = 0
        while not _is_pd(_shifted_with_closure(mu, p, hi)):
            hi *= 2
            doublings += 1
            if doublings > 500:
                raise SolverFailureError("could not bracket the PSD boundary for the pseudo-moment")
        target_width = hi * mp.mpf(10) ** (-(mp.mp.dps - 10))
        while hi - lo > target_width:
            mid = (lo + hi) / 2
            if _is_pd(_shifted_with_closure(mu, p, mid)):
                hi = mid
            else:
                lo = mid
        mu_top = hi * (1 + mp.mpf(_CLOSURE_SLACK))
        mu_ext = mu + [mu_top]
        try:
            alpha, beta, J = jacobi_from_moments(mu_ext, p)
        except Exception as exc:
            raise SolverFailureError(f"Jacobi construction failed: {exc}") from None
        nodes, weights = gauss_rule_from_jacobi(J, mu_ext[0])
        if any(z <= 0 for z in nodes):
            raise SolverFailureError(f"non-positive atom in solution: {[float(z) for z in nodes]}")
        if any(w <= -1e-12 for w in weights) or any(float(w) <= 0.0 for w in weights):
            raise SolverFailureError(f"non-positive weight in solution: {[float(w) for w in weights]}")
        residual = mp.mpf(0)
        for l in range(m.k):
            got = mp.fsum(w * z**l for z, w in zip(nodes, weights))
            residual = max(residual, abs(got - mu[l]) / mu[l])
        if residual > MOMENT_RESIDUAL_TOL:
            raise SolverFailureError(f"moment residual {float(residual):.3e} exceeds {MOMENT_RESIDUAL_TOL}")
        return ScalingDistribution(
            atoms=tuple(float(z) for z in nodes),
            weights=tuple(float(w) for w in weights),
            k=m.k,
            n=m.n,
            moment_residual=float(residual),
            closure_rule=CLOSURE_RULE,
        )


def sample_scaling(dist: ScalingDistribution, rng: np.random.Generator, size: Optional[int] = None):
    """Draw atoms according to their weights; one scalar unless ``size`` is given.

    A single draw scales every coordinate of every point of one trial (the
    coordinates of the scaling vector are all equal by construction).
    """
    cum = np.cumsum(dist.weights)
    cum[-1] = 1.0
    atoms = np.asarray(dist.atoms)
    if size is None:
        return float(atoms[int(np.searchsorted(cum, rng.random(), side="right"))])
    idx = np.searchsorted(cum, rng.random(int(size)), side="right")
    return atoms[idx]


def save_distribution(dist: ScalingDistribution, path) -> None:
    """Persist a solved distribution to its JSON interchange format."""
    doc = {
        "k": dist.k,
        "n": dist.n,
        "atoms": list(dist.atoms),
        "weights": list(dist.weights),
        "moment_residual": dist.moment_residual,
        "closure_rule": dist.closure_rule,
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_distribution(path) -> ScalingDistribution:
    """Load a distribution previously written by :func:`save_distribution`."""
    if not os.path.exists(path):
        raise InputError(f"no such distribution file: {path}")
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid distribution file {path}: {exc}") from None
    try:
        return ScalingDistribution(
            atoms=tuple(doc["atoms"]),
            weights=tuple(doc["weights"]),
            k=int(doc["k"]),
            n=int(doc["n"]),
            moment_residual=float(doc.get("moment_residual", 0.0)),
            closure_rule=str(doc.get("closure_rule", CLOSURE_RULE)),
        )
    except KeyError as exc:
        raise InputError(f"distribution file {path} is missing field {exc}") from None
