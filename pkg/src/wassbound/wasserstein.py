"""Empirical squared 2-Wasserstein distances and debiased bound estimators.

Between two n-point empirical measures the squared 2-Wasserstein distance is
the optimal mean squared pairing cost over permutations, i.e. a balanced
linear assignment problem on the squared Euclidean distance matrix. On top
of that plug-in quantity sit three estimators built from samples nu_hat,
mu_hat, mu_prime_hat (mu_hat independent of the other two):

* upper (squared scale):   w2sq(nu_hat, mu_hat) - w2sq(mu_prime_hat, mu_hat)
* lower (unsquared scale): w2(nu_hat, mu_hat)   - w2(mu_prime_hat, mu_hat)
* signed-squared lower:    sign(lower) * lower^2

The subtraction removes the bulk of the plug-in bias; the result is an upper
bound in expectation when nu is suitably overdispersed relative to mu, and
the unsquared difference is a lower bound in expectation unconditionally.
No absolute values are taken anywhere: a negative upper estimate is a
useful diagnostic, not a defect.

Leave-one-out replicates use paired deletion (observation i leaves every
measure at once), computed by the warm-start repair in the assignment
module rather than n fresh solves.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist

from .assignment import AssignmentSolution, LeaveOneOutCosts, flapjack, solve_assignment
from .jackknife import chebyshev_ci, gaussian_ci, jackknife_variance, signed_square_ci

UPPER_SQUARED = "upper_squared"
LOWER_UNSQUARED = "lower_unsquared"
LOWER_SQUARED_SIGNED = "lower_squared_signed"


@dataclass(frozen=True)
class EmpiricalMeasure:
    """An n-point equally weighted sample in d dimensions."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"points must be an (n, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("sample coordinates must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


def as_points(x) -> np.ndarray:
    """Coerce an EmpiricalMeasure or array-like into a validated (n, d) array."""
    if isinstance(x, EmpiricalMeasure):
        return x.points
    return EmpiricalMeasure(x).points


@dataclass
class BoundEstimate:
    """A bound point estimate with its jackknife ingredients.

    loo_values[i] is the same estimator recomputed with observation i
    removed from every measure. Confidence limits stay None until a CI
    method is applied.
    """

    kind: str
    value: float
    loo_values: np.ndarray
    jackknife_variance: float
    ci_low: float | None = None
    ci_high: float | None = None


def squared_distance_matrix(a, b) -> np.ndarray:
    """Pairwise squared Euclidean distances between two samples."""
    pa, pb = as_points(a), as_points(b)
    if pa.shape[1] != pb.shape[1]:
        raise ValueError(f"dimension mismatch: {pa.shape[1]} vs {pb.shape[1]}")
    return cdist(pa, pb, "sqeuclidean")


def w2_squared(a, b) -> tuple[float, AssignmentSolution]:
    """Empirical squared 2-Wasserstein distance between equal-size samples.

    Returns the optimal mean squared pairing cost together with the full
    assignment solution (permutation and duals).
    """
    pa, pb = as_points(a), as_points(b)
    if pa.shape[0] != pb.shape[0]:
        raise ValueError(f"sample sizes differ: {pa.shape[0]} vs {pb.shape[0]}")
    sol = solve_assignment(squared_distance_matrix(pa, pb))
    return sol.objective, sol


def w2_squared_1d(a, b) -> float:
    """One-dimensional fast path: pair order statistics, O(n log n)."""
    pa, pb = as_points(a), as_points(b)
    if pa.shape[1] != 1 or pb.shape[1] != 1:
        raise ValueError("w2_squared_1d requires 1-dimensional samples")
    if pa.shape[0] != pb.shape[0]:
        raise ValueError(f"sample sizes differ: {pa.shape[0]} vs {pb.shape[0]}")
    xa = np.sort(pa[:, 0])
    xb = np.sort(pb[:, 0])
    return float(np.mean((xa - xb) ** 2))


def _check_triple(nu, mu, mu_prime) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    pn, pm, pp = as_points(nu), as_points(mu), as_points(mu_prime)
    if not (pn.shape == pm.shape == pp.shape):
        raise ValueError(
            f"all three samples must share (n, d); got {pn.shape}, {pm.shape}, {pp.shape}"
        )
    if pn.shape[0] < 2:
        raise ValueError("bound estimators need n >= 2 for leave-one-out replicates")
    return pn, pm, pp


def _bounds_from_loo(
    fj_nu: LeaveOneOutCosts, fj_pr: LeaveOneOutCosts, alpha: float | None
) -> tuple[BoundEstimate, BoundEstimate, BoundEstimate]:
    u_val = fj_nu.full_cost - fj_pr.full_cost
    u_loo = fj_nu.loo_costs - fj_pr.loo_costs
    upper = BoundEstimate(UPPER_SQUARED, u_val, u_loo, jackknife_variance(u_loo).variance)

    l_val = float(np.sqrt(fj_nu.full_cost) - np.sqrt(fj_pr.full_cost))
    l_loo = np.sqrt(fj_nu.loo_costs) - np.sqrt(fj_pr.loo_costs)
    lower = BoundEstimate(LOWER_UNSQUARED, l_val, l_loo, jackknife_variance(l_loo).variance)

    lsq_val = float(np.sign(l_val) * l_val**2)
    lsq_loo = np.sign(l_loo) * l_loo**2
    lower_sq = BoundEstimate(
        LOWER_SQUARED_SIGNED, lsq_val, lsq_loo, jackknife_variance(lsq_loo).variance
    )

    if alpha is not None:
        upper, lower, lower_sq = attach_cis(upper, lower, lower_sq, alpha)
    return upper, lower, lower_sq


def attach_cis(
    upper: BoundEstimate, lower: BoundEstimate, lower_sq: BoundEstimate, alpha: float
) -> tuple[BoundEstimate, BoundEstimate, BoundEstimate]:
    """Attach the interval each estimator calls for.

    Gaussian for the upper bound (it has a central limit), Chebyshev for the
    unsquared lower bound, and the signed-square image of the Chebyshev
    interval for the squared-scale lower bound.
    """
    jk_u = jackknife_variance(upper.loo_values)
    jk_l = jackknife_variance(lower.loo_values)
    u_lo, u_hi = gaussian_ci(upper.value, jk_u, alpha)
    l_lo, l_hi = chebyshev_ci(lower.value, jk_l, alpha)
    s_lo, s_hi = signed_square_ci((l_lo, l_hi))
    return (
        replace(upper, ci_low=u_lo, ci_high=u_hi),
        replace(lower, ci_low=l_lo, ci_high=l_hi),
        replace(lower_sq, ci_low=s_lo, ci_high=s_hi),
    )


def estimate_bounds(
    nu, mu, mu_prime, alpha: float | None = None
) -> tuple[BoundEstimate, BoundEstimate, BoundEstimate]:
    """All three bound estimators from one pair of assignment solves.

    The two cost matrices and leave-one-out sweeps are shared between the
    estimators, so the lower bounds come essentially for free once the
    upper bound is computed. ``mu`` must be sampled independently of ``nu``
    and ``mu_prime`` (the caller's statistical responsibility; dependence
    between ``nu`` and ``mu_prime`` is harmless).
    """
    pn, pm, pp = _check_triple(nu, mu, mu_prime)
    fj_nu = flapjack(squared_distance_matrix(pn, pm))
    fj_pr = flapjack(squared_distance_matrix(pp, pm))
    return _bounds_from_loo(fj_nu, fj_pr, alpha)


def estimate_upper(nu, mu, mu_prime, alpha: float | None = None) -> BoundEstimate:
    """Debiased upper-bound estimator on the squared-distance scale."""
    return estimate_bounds(nu, mu, mu_prime, alpha)[0]


def estimate_lower(nu, mu, mu_prime, alpha: float | None = None) -> BoundEstimate:
    """Lower-bound estimator on the unsquared distance scale."""
    return estimate_bounds(nu, mu, mu_prime, alpha)[1]


def estimate_lower_squared(nu, mu, mu_prime, alpha: float | None = None) -> BoundEstimate:
    """Signed square of the lower bound, for comparison on the squared scale."""
    return estimate_bounds(nu, mu, mu_prime, alpha)[2]


def decay_constant(mu_samples, nu_samples) -> float:
    """Plug-in constant 3 * sqrt(mean ||X||^2) + sqrt(mean ||Y||^2).

    Scales the worst-case size of the expected upper bound relative to the
    true distance.
    """
    pm, pn = as_points(mu_samples), as_points(nu_samples)
    mx = float(np.mean(np.sum(pm**2, axis=1)))
    my = float(np.mean(np.sum(pn**2, axis=1)))
    return 3.0 * np.sqrt(mx) + np.sqrt(my)
