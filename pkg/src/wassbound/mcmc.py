"""Parallel i.i.d. chain ensembles and the asymptote-averaged bound procedure.

Many independent copies of one Markov chain are run from an overdispersed
start; snapshots of all chains at recorded iterations form per-iteration
empirical measures. With a late snapshot pi_hat_T standing in for the
stationary distribution and a window A of post-convergence iterations as
the debiasing baseline, the per-iteration upper bound on the squared
2-Wasserstein distance to stationarity is

    w2sq(pi_hat_t, pi_hat_T) - mean_{T' in A} w2sq(pi_hat_{T'}, pi_hat_T)

and the lower bound is the same construction on the unsquared scale,
squared back with its sign kept. Leave-one-out replicates delete one chain
from every snapshot at once, so jackknife variances and intervals come from
the same assignment solves.

Chain i draws from a counter-based stream that is a pure function of
(seed, i): results are reproducible and schedule-independent.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist

from .assignment import LeaveOneOutCosts, flapjack
from .gaussian import gibbs_sweep_noise_cov, gibbs_update_matrix
from .jackknife import chebyshev_ci, gaussian_ci, jackknife_variance, signed_square_ci
from .targets import Target
from .wasserstein import (
    LOWER_SQUARED_SIGNED,
    LOWER_UNSQUARED,
    UPPER_SQUARED,
    BoundEstimate,
)
from .workers import env_workers

KERNELS = ("rwm", "mala", "ula", "gibbs")


class NumericalError(RuntimeError):
    """Simulation produced non-finite states (e.g. a divergent ULA step)."""


@dataclass(frozen=True)
class ChainEnsemble:
    """States of n independent chains at the recorded iterations.

    states[k] holds the (n_chains, dim) snapshot at recorded_iterations[k].
    """

    n_chains: int
    dim: int
    recorded_iterations: np.ndarray
    states: np.ndarray
    rng_seed: int | None
    acceptance_rate: float | None
    kernel: str

    def measure_at(self, t: int) -> np.ndarray:
        idx = np.searchsorted(self.recorded_iterations, t)
        if idx >= len(self.recorded_iterations) or self.recorded_iterations[idx] != t:
            raise ValueError(f"iteration {t} was not recorded")
        return self.states[idx]


def _seed_sequence(seed) -> np.random.SeedSequence:
    return seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)


def _chain_generators(seed, n_chains: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.Philox(s)) for s in _seed_sequence(seed).spawn(n_chains)]


def _block_normals(gens, k: int, d: int) -> np.ndarray:
    out = np.empty((len(gens), k, d))
    for i, g in enumerate(gens):
        out[i] = g.standard_normal((k, d))
    return out


def _block_uniforms(gens, k: int) -> np.ndarray:
    out = np.empty((len(gens), k))
    for i, g in enumerate(gens):
        out[i] = g.random(k)
    return out


def run_ensemble(
    target: Target,
    kernel: str,
    step: float | None,
    pi0_sampler: Callable[[np.random.Generator, int], np.ndarray],
    n_chains: int,
    horizon: int,
    thin: int = 1,
    seed=0,
    gibbs_blocks=None,
) -> ChainEnsemble:
    """Simulate n independent chains, recording every ``thin``-th iteration.

    Kernels: "rwm" and "mala" are Metropolis-adjusted (acceptance rate
    reported); "ula" is the unadjusted Langevin discretization; "gibbs" is
    the exact one-sweep deterministic-scan update for Gaussian targets,
    drawn via the collapsed affine-Gaussian form. Iteration 0 (the initial
    states) is always recorded.
    """
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}, expected one of {KERNELS}")
    if kernel in ("mala", "ula") and target.grad_log_density is None:
        raise ValueError(f"kernel {kernel!r} needs a target gradient")
    if kernel == "gibbs" and target.gaussian is None:
        raise ValueError("the Gibbs kernel needs a Gaussian target")
    if kernel != "gibbs":
        if step is None or step <= 0:
            raise ValueError("step size must be positive")
    if n_chains < 1 or horizon < 0 or thin < 1:
        raise ValueError("need n_chains >= 1, horizon >= 0, thin >= 1")

    d = target.dim
    gens = _chain_generators(seed, n_chains)
    x = np.empty((n_chains, d))
    for i, g in enumerate(gens):
        x[i] = pi0_sampler(g, 1)[0]
    if not np.all(np.isfinite(x)):
        raise NumericalError("initial states are not finite")

    recorded = np.arange(0, horizon + 1, thin, dtype=np.int64)
    states = np.empty((len(recorded), n_chains, d))
    states[0] = x
    next_rec = 1

    uses_uniforms = kernel in ("rwm", "mala")
    h = float(step) if step is not None else 0.0
    n_accept = 0

    if kernel in ("rwm", "mala"):
        lp = target.log_density(x)
    if kernel in ("mala", "ula"):
        grad = target.grad_log_density(x)
    if kernel == "gibbs":
        dist = target.gaussian
        b_mat = gibbs_update_matrix(np.linalg.inv(dist.cov), gibbs_blocks)
        noise_chol = np.linalg.cholesky(gibbs_sweep_noise_cov(dist, b_mat))
        mean = dist.mean

    block = max(1, min(512, (1 << 24) // max(1, n_chains * d)))
    it = 0
    while it < horizon:
        k = min(block, horizon - it)
        z = _block_normals(gens, k, d)
        u = _block_uniforms(gens, k) if uses_uniforms else None
        for s in range(k):
            zs = z[:, s, :]
            if kernel == "rwm":
                prop = x + h * zs
                lp_prop = target.log_density(prop)
                acc = np.log(u[:, s]) < lp_prop - lp
                x[acc] = prop[acc]
                lp[acc] = lp_prop[acc]
                n_accept += int(acc.sum())
            elif kernel == "mala":
                drift = 0.5 * h * h
                prop = x + drift * grad + h * zs
                lp_prop = target.log_density(prop)
                grad_prop = target.grad_log_density(prop)
                back = x - prop - drift * grad_prop
                log_ratio = (
                    lp_prop
                    - lp
                    - (np.einsum("ij,ij->i", back, back) - h * h * np.einsum("ij,ij->i", zs, zs))
                    / (2.0 * h * h)
                )
                acc = np.log(u[:, s]) < log_ratio
                x[acc] = prop[acc]
                lp[acc] = lp_prop[acc]
                grad[acc] = grad_prop[acc]
                n_accept += int(acc.sum())
            elif kernel == "ula":
                # overflow here is the anticipated divergence path, not a bug
                with np.errstate(over="ignore", invalid="ignore"):
                    x = x + 0.5 * h * h * grad + h * zs
                    if not np.all(np.isfinite(x)):
                        raise NumericalError(f"ULA diverged at iteration {it + 1}")
                    grad = target.grad_log_density(x)
            else:  # gibbs
                x = mean + (x - mean) @ b_mat.T + zs @ noise_chol.T
            it += 1
            if next_rec < len(recorded) and it == recorded[next_rec]:
                states[next_rec] = x
                next_rec += 1

    acceptance = n_accept / (n_chains * horizon) if uses_uniforms and horizon > 0 else None
    return ChainEnsemble(
        n_chains=n_chains,
        dim=d,
        recorded_iterations=recorded,
        states=states,
        rng_seed=seed if isinstance(seed, int) else None,
        acceptance_rate=acceptance,
        kernel=kernel,
    )


@dataclass
class ConvergenceBoundTrajectory:
    """Per-iteration bound estimates against the reference snapshot."""

    iterations: np.ndarray
    upper: list[BoundEstimate]
    lower: list[BoundEstimate]
    lower_sq: list[BoundEstimate]
    reference_iteration: int
    asymptote_set: np.ndarray

    def column(self, which: str, field: str = "value") -> np.ndarray:
        estimates = {"upper": self.upper, "lower": self.lower, "lower_sq": self.lower_sq}[which]
        return np.array([getattr(e, field) for e in estimates], dtype=np.float64)


def convergence_bounds(
    ensemble: ChainEnsemble,
    reference_iteration: int,
    asymptote_set,
    alpha: float = 0.05,
    iterations=None,
    n_workers: int | None = None,
) -> ConvergenceBoundTrajectory:
    """Asymptote-averaged upper/lower bounds for every reported iteration.

    ``asymptote_set`` lists the recorded iterations T' < T whose distances
    to the reference are averaged into the debiasing baseline; a singleton
    reduces the construction exactly to the three-measure estimators. By
    default every recorded iteration strictly before T is reported (at
    t = T the statistic degenerates to a pure self-comparison).

    Gaussian intervals are attached to the upper bounds, Chebyshev
    intervals (signed-squared) to the lower bounds.
    """
    asym = np.asarray(list(asymptote_set), dtype=np.int64)
    if asym.size == 0:
        raise ValueError("asymptote set must not be empty")
    rec = ensemble.recorded_iterations
    t_ref = int(reference_iteration)
    for t in np.concatenate((asym, [t_ref])):
        if t not in rec:
            raise ValueError(f"iteration {t} was not recorded")
    if np.any(asym >= t_ref):
        raise ValueError("all asymptote iterations must precede the reference iteration")
    if iterations is None:
        reported = rec[rec < t_ref]
    else:
        reported = np.asarray(list(iterations), dtype=np.int64)
        for t in reported:
            if t not in rec:
                raise ValueError(f"iteration {t} was not recorded")

    ref = ensemble.measure_at(t_ref)
    need = sorted(set(reported.tolist()) | set(asym.tolist()))

    def loo_at(t: int) -> LeaveOneOutCosts:
        return flapjack(cdist(ensemble.measure_at(t), ref, "sqeuclidean"))

    n_workers = env_workers() if n_workers is None else n_workers
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = dict(zip(need, pool.map(loo_at, need)))
    else:
        results = {t: loo_at(t) for t in need}

    base_sq = float(np.mean([results[t].full_cost for t in asym]))
    base_w = float(np.mean([np.sqrt(results[t].full_cost) for t in asym]))
    base_loo_sq = np.mean([results[t].loo_costs for t in asym], axis=0)
    base_loo_w = np.mean([np.sqrt(results[t].loo_costs) for t in asym], axis=0)

    uppers, lowers, lowers_sq = [], [], []
    for t in reported:
        fj = results[t]
        u_val = fj.full_cost - base_sq
        u_loo = fj.loo_costs - base_loo_sq
        jk_u = jackknife_variance(u_loo)
        u_lo, u_hi = gaussian_ci(u_val, jk_u, alpha)
        uppers.append(BoundEstimate(UPPER_SQUARED, u_val, u_loo, jk_u.variance, u_lo, u_hi))

        l_val = float(np.sqrt(fj.full_cost)) - base_w
        l_loo = np.sqrt(fj.loo_costs) - base_loo_w
        jk_l = jackknife_variance(l_loo)
        l_lo, l_hi = chebyshev_ci(l_val, jk_l, alpha)
        lowers.append(BoundEstimate(LOWER_UNSQUARED, l_val, l_loo, jk_l.variance, l_lo, l_hi))

        s_val = float(np.sign(l_val) * l_val**2)
        s_loo = np.sign(l_loo) * l_loo**2
        s_lo, s_hi = signed_square_ci((l_lo, l_hi))
        lowers_sq.append(
            BoundEstimate(
                LOWER_SQUARED_SIGNED, s_val, s_loo, jackknife_variance(s_loo).variance, s_lo, s_hi
            )
        )

    return ConvergenceBoundTrajectory(
        iterations=reported,
        upper=uppers,
        lower=lowers,
        lower_sq=lowers_sq,
        reference_iteration=t_ref,
        asymptote_set=asym,
    )
