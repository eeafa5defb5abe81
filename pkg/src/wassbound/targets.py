"""Target distributions for the samplers and experiments.

A Target bundles a (batched) log density, its gradient, and optional exact
structure: Gaussian targets carry their mean/covariance so closed-form
oracles apply, and targets that can be sampled exactly carry a sampler.
``log_density`` maps an (m, d) array of states to (m,) values up to an
additive constant; ``grad_log_density`` maps (m, d) to (m, d).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .gaussian import GaussianDist


@dataclass(frozen=True)
class Target:
    dim: int
    log_density: Callable[[np.ndarray], np.ndarray]
    grad_log_density: Callable[[np.ndarray], np.ndarray] | None
    gaussian: GaussianDist | None = None
    exact_sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None


def _batch(x: np.ndarray, d: int) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != d:
        raise ValueError(f"states must have shape (m, {d}), got {arr.shape}")
    return arr


def gaussian_sampler(dist: GaussianDist) -> Callable[[np.random.Generator, int], np.ndarray]:
    """Exact sampler for a Gaussian, usable as an initial-state generator."""
    chol = np.linalg.cholesky(dist.cov)
    mean = dist.mean

    def sample(rng: np.random.Generator, size: int) -> np.ndarray:
        return mean + rng.standard_normal((size, dist.dim)) @ chol.T

    return sample


def scaled_gaussian(dist: GaussianDist, scale: float) -> GaussianDist:
    """Spread the distribution by ``scale``: N(mean, scale^2 * cov)."""
    return GaussianDist(dist.mean.copy(), scale**2 * dist.cov)


def gaussian_target(dist: GaussianDist, precision: np.ndarray | None = None) -> Target:
    """Wrap a Gaussian as a Target with dense-precision density and gradient."""
    q = np.linalg.inv(dist.cov) if precision is None else np.asarray(precision, float)
    q = 0.5 * (q + q.T)
    mean = dist.mean
    d = dist.dim

    def log_density(x):
        diff = _batch(x, d) - mean
        return -0.5 * np.einsum("ij,ij->i", diff, diff @ q)

    def grad_log_density(x):
        diff = _batch(x, d) - mean
        return -(diff @ q)

    return Target(
        dim=d,
        log_density=log_density,
        grad_log_density=grad_log_density,
        gaussian=dist,
        exact_sampler=gaussian_sampler(dist),
    )


def ar1_circulant_precision(d: int, rho: float) -> np.ndarray:
    """Precision of the AR(1) chain with periodic boundary: circulant,
    (1 + rho^2) on the diagonal and -rho on the cyclic off-diagonals."""
    q = (1.0 + rho**2) * np.eye(d)
    for k in range(d):
        q[k, (k + 1) % d] -= rho
        q[k, (k - 1) % d] -= rho
    return q


def target_ar1_circulant(d: int, rho: float) -> Target:
    """Zero-mean Gaussian whose precision is the periodic-AR(1) circulant.

    The gradient uses the O(d) cyclic band structure directly.
    """
    if not abs(rho) < 1:
        raise ValueError("autocorrelation must satisfy |rho| < 1")
    if d < 1:
        raise ValueError("dimension must be positive")
    q = ar1_circulant_precision(d, rho)
    cov = np.linalg.inv(q)
    dist = GaussianDist(np.zeros(d), 0.5 * (cov + cov.T))
    diag = 1.0 + rho**2

    def qx(x):
        return diag * x - rho * (np.roll(x, 1, axis=1) + np.roll(x, -1, axis=1))

    def log_density(x):
        xb = _batch(x, d)
        return -0.5 * np.einsum("ij,ij->i", xb, qx(xb))

    def grad_log_density(x):
        return -qx(_batch(x, d))

    return Target(
        dim=d,
        log_density=log_density,
        grad_log_density=grad_log_density,
        gaussian=dist,
        exact_sampler=gaussian_sampler(dist),
    )


def target_ar1_covariance(d: int, rho: float = 0.5) -> Target:
    """Zero-mean Gaussian with covariance rho^{|i-j|} (default rho = 0.5).

    The precision is tridiagonal with a simple closed form, so the gradient
    costs O(d). For rho = 0.5 the covariance eigenvalues stay within
    [1/3, 3] at every dimension.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    if not abs(rho) < 1:
        raise ValueError("|rho| < 1 required")
    idx = np.arange(d)
    cov = rho ** np.abs(idx[:, None] - idx[None, :])
    dist = GaussianDist(np.zeros(d), cov)
    s = 1.0 / (1.0 - rho**2)
    diag = np.full(d, (1.0 + rho**2) * s)
    if d == 1:
        diag[:] = 1.0
    else:
        diag[0] = s
        diag[-1] = s
    off = -rho * s

    def qx(x):
        out = diag * x
        if d > 1:
            out[:, :-1] += off * x[:, 1:]
            out[:, 1:] += off * x[:, :-1]
        return out

    def log_density(x):
        xb = _batch(x, d)
        return -0.5 * np.einsum("ij,ij->i", xb, qx(xb))

    def grad_log_density(x):
        return -qx(_batch(x, d))

    return Target(
        dim=d,
        log_density=log_density,
        grad_log_density=grad_log_density,
        gaussian=dist,
        exact_sampler=gaussian_sampler(dist),
    )


def _check_svm_params(beta: float, phi: float, sigma: float) -> None:
    if not abs(phi) < 1:
        raise ValueError("|phi| < 1 required for a stationary latent process")
    if beta <= 0 or sigma <= 0:
        raise ValueError("beta and sigma must be positive")


def svm_simulate_data(
    t_len: int, beta: float, phi: float, sigma: float, seed: int = 0
) -> np.ndarray:
    """Observations from the stochastic volatility generative model.

    Latent X is a stationary AR(1); observations are Y_t = beta * eps_t *
    exp(X_t / 2) with standard normal eps.
    """
    _check_svm_params(beta, phi, sigma)
    rng = np.random.default_rng(seed)
    x = _svm_prior_paths(rng, 1, t_len, phi, sigma)[0]
    return beta * rng.standard_normal(t_len) * np.exp(x / 2.0)


def _svm_prior_paths(
    rng: np.random.Generator, size: int, t_len: int, phi: float, sigma: float
) -> np.ndarray:
    x = np.empty((size, t_len))
    x[:, 0] = rng.standard_normal(size) * sigma / np.sqrt(1.0 - phi**2)
    for t in range(1, t_len):
        x[:, t] = phi * x[:, t - 1] + sigma * rng.standard_normal(size)
    return x


def svm_prior_sampler(
    t_len: int, phi: float, sigma: float
) -> Callable[[np.random.Generator, int], np.ndarray]:
    """Sampler for the latent AR(1) prior, the usual overdispersed start."""

    def sample(rng: np.random.Generator, size: int) -> np.ndarray:
        return _svm_prior_paths(rng, size, t_len, phi, sigma)

    return sample


def target_stochastic_volatility(
    t_len: int,
    beta: float,
    phi: float,
    sigma: float,
    data: np.ndarray | None = None,
    data_seed: int = 0,
) -> Target:
    """Posterior of the latent volatility path given observations.

    Up to a constant, the log posterior of X_{1:T} | Y_{1:T} is

        -0.5 * [ sum_t X_t + beta^{-2} sum_t Y_t^2 exp(-X_t)
                 + sigma^{-2} sum_{t<T} (phi X_t - X_{t+1})^2
                 + (1 - phi^2) sigma^{-2} X_1^2 ].

    Density and gradient share the exp(-X) and (phi X_t - X_{t+1}) vectors,
    computed once per evaluation point. If ``data`` is omitted a series is
    simulated from the generative model with ``data_seed``.
    """
    _check_svm_params(beta, phi, sigma)
    if data is None:
        y = svm_simulate_data(t_len, beta, phi, sigma, seed=data_seed)
    else:
        y = np.asarray(data, dtype=np.float64).ravel()
        if y.shape[0] != t_len:
            raise ValueError(f"data length {y.shape[0]} does not match t_len {t_len}")
    y2 = y**2
    inv_b2 = 1.0 / beta**2
    inv_s2 = 1.0 / sigma**2
    head = (1.0 - phi**2) * inv_s2

    def _logp_grad(x, want_grad):
        xb = _batch(x, t_len)
        e = np.exp(-xb)
        r = phi * xb[:, :-1] - xb[:, 1:]
        y2e = y2 * e
        logp = -0.5 * (
            xb.sum(axis=1)
            + inv_b2 * y2e.sum(axis=1)
            + inv_s2 * np.einsum("ij,ij->i", r, r)
            + head * xb[:, 0] ** 2
        )
        if not want_grad:
            return logp, None
        g = 0.5 * inv_b2 * y2e - 0.5
        g[:, :-1] -= phi * inv_s2 * r
        g[:, 1:] += inv_s2 * r
        g[:, 0] -= head * xb[:, 0]
        return logp, g

    def log_density(x):
        return _logp_grad(x, False)[0]

    def grad_log_density(x):
        return _logp_grad(x, True)[1]

    return Target(
        dim=t_len,
        log_density=log_density,
        grad_log_density=grad_log_density,
    )
