"""Closed-form Gaussian transport quantities and exact Gaussian chain dynamics.

Everything here is an oracle: squared 2-Wasserstein distances between
Gaussians, overdispersion (Loewner / quantile-gap) checks, the biased
stationary law of the unadjusted Langevin discretization, and the exact
Gaussian marginals of deterministic-scan Gibbs and Langevin chains via
linear recurrences. These feed tests and the exact reference curves in the
experiment driver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_EIG_CLAMP = -1e-10
_SYM_RTOL = 1e-10


@dataclass(frozen=True)
class GaussianDist:
    """Mean vector plus symmetric positive-definite covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=np.float64))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=np.float64))
        if mean.ndim != 1 or cov.shape != (mean.shape[0], mean.shape[0]):
            raise ValueError(f"incompatible shapes: mean {mean.shape}, cov {cov.shape}")
        scale = np.abs(cov).max()
        if scale > 0 and np.abs(cov - cov.T).max() > _SYM_RTOL * scale:
            raise ValueError("covariance is not symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.linalg.eigvalsh(cov).min() <= 0:
            raise ValueError("covariance must be positive definite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def _clamped_sqrt_eigvals(eigvals: np.ndarray) -> np.ndarray:
    if eigvals.min() < _EIG_CLAMP:
        raise ValueError(
            f"matrix has eigenvalue {eigvals.min():.3e} below the clamp threshold"
        )
    return np.sqrt(np.clip(eigvals, 0.0, None))


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    w, q = np.linalg.eigh(0.5 * (mat + mat.T))
    return (q * _clamped_sqrt_eigvals(w)) @ q.T


def w2_squared_gaussian(a: GaussianDist, b: GaussianDist) -> float:
    """Exact squared 2-Wasserstein distance between two Gaussians.

    ||mean_a - mean_b||^2 + tr(S_a) + tr(S_b) - 2 tr[(S_a^{1/2} S_b S_a^{1/2})^{1/2}],
    evaluated through symmetric eigendecompositions with tiny negative
    eigenvalues clamped to zero.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    root_a = _psd_sqrt(a.cov)
    inner = root_a @ b.cov @ root_a
    w = np.linalg.eigvalsh(0.5 * (inner + inner.T))
    cross = _clamped_sqrt_eigvals(w).sum()
    mean_term = float(np.sum((a.mean - b.mean) ** 2))
    return mean_term + float(np.trace(a.cov) + np.trace(b.cov)) - 2.0 * float(cross)


def check_cot_gaussian(nu: GaussianDist, mu: GaussianDist) -> bool:
    """Is nu overdispersed relative to mu, i.e. cov(nu) - cov(mu) PSD?

    For Gaussians the contractive-transport-map ordering reduces to the
    Loewner ordering of covariances.
    """
    if nu.dim != mu.dim:
        raise ValueError(f"dimension mismatch: {nu.dim} vs {mu.dim}")
    diff = nu.cov - mu.cov
    scale = float(np.abs(np.linalg.eigvalsh(nu.cov)).max())
    return bool(np.linalg.eigvalsh(diff).min() >= -1e-10 * scale)


def check_cot_1d_quantiles(nu_quantiles, mu_quantiles, tol: float = 1e-12) -> bool:
    """Empirical dispersive-ordering check for scalar distributions.

    Both vectors must be quantiles of the respective laws on the same
    probability grid, sorted ascending. True iff every adjacent quantile
    gap of nu is at least the corresponding gap of mu (up to tol).
    """
    qn = np.asarray(nu_quantiles, dtype=np.float64).ravel()
    qm = np.asarray(mu_quantiles, dtype=np.float64).ravel()
    if qn.shape != qm.shape or qn.shape[0] < 2:
        raise ValueError("quantile vectors must share a length of at least 2")
    if np.any(np.diff(qn) < 0) or np.any(np.diff(qm) < 0):
        raise ValueError("quantile vectors must be sorted ascending")
    return bool(np.all(np.diff(qn) >= np.diff(qm) - tol))


def ula_stationary(target: GaussianDist, h: float) -> GaussianDist:
    """Stationary law of the unadjusted Langevin chain on a Gaussian target.

    With update matrix M = I - h^2 S^{-1} / 2 (spectral radius must be < 1),
    the chain converges to N(mean, (I - h^2 S^{-1} / 4)^{-1} S), which always
    dominates the target covariance in the Loewner order.
    """
    if h <= 0:
        raise ValueError("step size must be positive")
    w, q = np.linalg.eigh(target.cov)
    m_eigs = 1.0 - h**2 / (2.0 * w)
    if np.abs(m_eigs).max() >= 1.0:
        raise ValueError(
            f"step size {h} too large: update matrix spectral radius "
            f"{np.abs(m_eigs).max():.6f} >= 1"
        )
    w_inf = w / (1.0 - h**2 / (4.0 * w))
    cov_inf = (q * w_inf) @ q.T
    return GaussianDist(target.mean.copy(), cov_inf)


@dataclass
class GaussianChainDynamics:
    """Affine-Gaussian chain: X_{t+1} - m_inf = A (X_t - m_inf) + noise.

    kind is "gibbs" (A is the scan matrix, stationary is the target) or
    "ula" (A = I - h^2 S^{-1} / 2, stationary is the discretization-biased
    law). Powers of A accumulate in a squaring cache shared by repeated
    marginal queries.
    """

    kind: str
    update_matrix: np.ndarray
    stationary: GaussianDist
    _pow2: list = field(default_factory=list, repr=False, init=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("gibbs", "ula"):
            raise ValueError(f"unknown dynamics kind {self.kind!r}")
        a = np.asarray(self.update_matrix, dtype=np.float64)
        d = self.stationary.dim
        if a.shape != (d, d):
            raise ValueError(f"update matrix shape {a.shape} does not match dim {d}")
        rho = float(np.abs(np.linalg.eigvals(a)).max())
        if rho >= 1.0:
            raise ValueError(f"update matrix spectral radius {rho:.6f} >= 1; dynamics diverge")
        self.update_matrix = a
        self._pow2.append(a)

    def matrix_power(self, t: int) -> np.ndarray:
        """A^t by repeated squaring, O(log t) multiplications."""
        if t < 0:
            raise ValueError("iteration must be nonnegative")
        d = self.update_matrix.shape[0]
        if t == 0:
            return np.eye(d)
        while (1 << len(self._pow2)) <= t:
            last = self._pow2[-1]
            self._pow2.append(last @ last)
        result = None
        bit = 0
        while (1 << bit) <= t:
            if t & (1 << bit):
                sq = self._pow2[bit]
                result = sq if result is None else result @ sq
            bit += 1
        return result


def gibbs_update_matrix(target_precision, blocks=None) -> np.ndarray:
    """Deterministic-scan Gibbs sweep matrix from block conditional means.

    One sweep of a blocked Gibbs sampler on N(mu, Q^{-1}) is the affine map
    X -> B X + b plus Gaussian noise; B composes, in scan order, the maps
    that replace each block by its conditional mean given the rest. Built
    from first principles: block k's rows become -Q_kk^{-1} Q_{k,rest}.
    Defaults to single-coordinate blocks in index order.
    """
    q = np.atleast_2d(np.asarray(target_precision, dtype=np.float64))
    d = q.shape[0]
    if q.shape != (d, d):
        raise ValueError("precision must be square")
    if np.linalg.eigvalsh(0.5 * (q + q.T)).min() <= 0:
        raise ValueError("precision must be positive definite")
    if blocks is None:
        blocks = [[k] for k in range(d)]
    seen = sorted(idx for block in blocks for idx in block)
    if seen != list(range(d)):
        raise ValueError("blocks must partition the coordinate indices 0..d-1")

    b = np.eye(d)
    for block in blocks:
        idx = np.asarray(block, dtype=np.intp)
        rest = np.setdiff1d(np.arange(d), idx)
        a_k = np.eye(d)
        a_k[np.ix_(idx, idx)] = 0.0
        if rest.size:
            coeff = -np.linalg.solve(q[np.ix_(idx, idx)], q[np.ix_(idx, rest)])
            a_k[np.ix_(idx, rest)] = coeff
        b = a_k @ b
    return b


def gibbs_dynamics(target: GaussianDist, blocks=None) -> GaussianChainDynamics:
    """Dynamics of the deterministic-scan Gibbs sampler for a Gaussian target."""
    precision = np.linalg.inv(target.cov)
    b = gibbs_update_matrix(precision, blocks)
    return GaussianChainDynamics(kind="gibbs", update_matrix=b, stationary=target)


def ula_dynamics(target: GaussianDist, h: float) -> GaussianChainDynamics:
    """Dynamics of the unadjusted Langevin chain for a Gaussian target."""
    stationary = ula_stationary(target, h)
    m = np.eye(target.dim) - (h**2 / 2.0) * np.linalg.inv(target.cov)
    return GaussianChainDynamics(kind="ula", update_matrix=m, stationary=stationary)


def gibbs_sweep_noise_cov(target: GaussianDist, b: np.ndarray) -> np.ndarray:
    """Noise covariance of one full Gibbs sweep, S - B S B^T."""
    s = target.cov
    cov = s - b @ s @ b.T
    return 0.5 * (cov + cov.T)


def marginal_at(dynamics: GaussianChainDynamics, pi0: GaussianDist, t: int) -> GaussianDist:
    """Exact Gaussian marginal at iteration t from the linear recurrences.

    mean_t - mean_inf = A^t (mean_0 - mean_inf) and
    cov_t - cov_inf = A^t (cov_0 - cov_inf) (A^t)^T.
    """
    if pi0.dim != dynamics.stationary.dim:
        raise ValueError("initial distribution dimension does not match dynamics")
    if t == 0:
        return pi0
    at = dynamics.matrix_power(t)
    sta = dynamics.stationary
    mean = sta.mean + at @ (pi0.mean - sta.mean)
    cov = sta.cov + at @ (pi0.cov - sta.cov) @ at.T
    return GaussianDist(mean, 0.5 * (cov + cov.T))


def cot_preservation_check(
    dynamics: GaussianChainDynamics, pi0: GaussianDist, horizon: int
) -> np.ndarray:
    """Overdispersion of each marginal against the stationary law, t = 0..horizon.

    For Gibbs and Langevin dynamics with Gaussian marginals the entries are
    all equal to the t = 0 entry: overdispersion at the start persists (and
    its absence persists too).
    """
    return np.array(
        [
            check_cot_gaussian(marginal_at(dynamics, pi0, t), dynamics.stationary)
            for t in range(horizon + 1)
        ],
        dtype=bool,
    )
