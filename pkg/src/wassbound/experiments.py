"""Experiment assembly behind the command-line driver.

Each runner builds its target and schedule from a validated config, runs
the chain ensemble and the bound procedure, and writes plot-ready CSV
trajectories. Exact reference curves are added for Gaussian targets, where
the marginal distances are available in closed form.

Trajectory CSV columns (fixed names, one row per recorded iteration):
t, upper, upper_ci_lo, upper_ci_hi, lower_sq, lower_ci_lo, lower_ci_hi,
then exact (Gaussian targets) and coupling (when configured; reported on
the squared scale to match the other columns).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .coupling import UnmetPairsError, coupling_bound_curve, run_coupled_ensemble
from .gaussian import GaussianDist, gibbs_dynamics, marginal_at, ula_dynamics, w2_squared_gaussian
from .mcmc import ConvergenceBoundTrajectory, convergence_bounds, run_ensemble
from .samplefile import read_samples
from .targets import (
    Target,
    gaussian_sampler,
    gaussian_target,
    scaled_gaussian,
    svm_prior_sampler,
    target_ar1_circulant,
    target_ar1_covariance,
    target_stochastic_volatility,
)
from .wasserstein import decay_constant, estimate_bounds


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _domain_seed(seed: int, domain: int) -> np.random.SeedSequence:
    """Disjoint stream roots for the sub-tasks of one seeded experiment."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(domain,))


def write_trajectory_csv(
    path,
    traj: ConvergenceBoundTrajectory,
    exact: np.ndarray | None = None,
    coupling_sq: np.ndarray | None = None,
) -> None:
    header = ["t", "upper", "upper_ci_lo", "upper_ci_hi",
              "lower_sq", "lower_ci_lo", "lower_ci_hi"]
    if exact is not None:
        header.append("exact")
    if coupling_sq is not None:
        header.append("coupling")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k, t in enumerate(traj.iterations):
            up, lo = traj.upper[k], traj.lower_sq[k]
            row = [str(int(t)), _fmt(up.value), _fmt(up.ci_low), _fmt(up.ci_high),
                   _fmt(lo.value), _fmt(lo.ci_low), _fmt(lo.ci_high)]
            if exact is not None:
                row.append(_fmt(exact[k]))
            if coupling_sq is not None:
                row.append(_fmt(coupling_sq[k]))
            writer.writerow(row)


def _asymptote_iterations(window: dict) -> np.ndarray:
    return np.arange(window["start"], window["end"] + 1, window["stride"], dtype=np.int64)


def estimate_from_files(nu_path, mu_path, mu_prime_path, alpha: float, out_path) -> dict:
    """Bound estimates from three sample files, written as JSON."""
    nu = read_samples(nu_path)
    mu = read_samples(mu_path)
    mu_prime = read_samples(mu_prime_path)
    upper, lower, lower_sq = estimate_bounds(nu, mu, mu_prime, alpha=alpha)
    result = {
        "n": int(nu.shape[0]),
        "d": int(nu.shape[1]),
        "alpha": alpha,
        "upper": {
            "value": upper.value,
            "jackknife_variance": upper.jackknife_variance,
            "ci": [upper.ci_low, upper.ci_high],
        },
        "lower": {
            "value": lower.value,
            "jackknife_variance": lower.jackknife_variance,
            "ci": [lower.ci_low, lower.ci_high],
        },
        "lower_squared": {
            "value": lower_sq.value,
            "jackknife_variance": lower_sq.jackknife_variance,
            "ci": [lower_sq.ci_low, lower_sq.ci_high],
        },
        "decay_constant": decay_constant(mu, nu),
    }
    Path(out_path).write_text(json.dumps(result, indent=2) + "\n")
    return result


def _exact_curve(dynamics, pi0: GaussianDist, iterations) -> np.ndarray:
    return np.array(
        [w2_squared_gaussian(marginal_at(dynamics, pi0, int(t)), dynamics.stationary)
         for t in iterations]
    )


def run_gibbs_ar1(cfg: ExperimentConfig, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = target_ar1_circulant(cfg["d"], cfg["rho"])
    pi0_dist = scaled_gaussian(target.gaussian, cfg["pi0_scale"])
    pi0 = gaussian_sampler(pi0_dist)
    ensemble = run_ensemble(
        target, "gibbs", None, pi0, cfg["n_chains"], cfg["horizon"], cfg["thin"],
        seed=_domain_seed(cfg["seed"], 0),
    )
    traj = convergence_bounds(
        ensemble, cfg["reference_iteration"], _asymptote_iterations(cfg["asymptote"]),
        alpha=cfg["alpha"],
    )
    exact = _exact_curve(gibbs_dynamics(target.gaussian), pi0_dist, traj.iterations)

    coupling_sq = None
    if cfg["coupling"] is not None:
        blk = cfg["coupling"]
        traces = run_coupled_ensemble(
            target, "gibbs", None, pi0, blk["lag"], blk["cap"], blk["n_pairs"],
            seed=_domain_seed(cfg["seed"], 1),
        )
        coupling_sq = coupling_bound_curve(traces, traj.iterations) ** 2

    path = out_dir / "trajectory.csv"
    write_trajectory_csv(path, traj, exact=exact, coupling_sq=coupling_sq)
    return [path]


def mala_step_rule(d: int) -> float:
    return float(d) ** (-1.0 / 6.0)


def ula_step_rule(d: int) -> float:
    return 0.2 * float(d) ** (-0.25)


def mixing_time(traj: ConvergenceBoundTrajectory, threshold: float) -> int | None:
    """First reported iteration where the upper bound drops to the threshold."""
    values = traj.column("upper")
    hit = np.nonzero(values <= threshold)[0]
    return int(traj.iterations[hit[0]]) if hit.size else None


def run_ula_mala_scaling(cfg: ExperimentConfig, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    summary_rows = []
    for domain, d in enumerate(cfg["dims"]):
        target = target_ar1_covariance(d)
        pi0 = gaussian_sampler(GaussianDist(np.zeros(d), cfg["pi0_variance"] * np.eye(d)))
        for which, kernel, h in (
            ("mala", "mala", mala_step_rule(d)),
            ("ula", "ula", ula_step_rule(d)),
        ):
            sched = cfg[which]
            ensemble = run_ensemble(
                target, kernel, h, pi0, cfg["n_chains"], sched["horizon"], sched["thin"],
                seed=_domain_seed(cfg["seed"], 2 * domain + (0 if kernel == "mala" else 1)),
            )
            traj = convergence_bounds(
                ensemble, sched["reference_iteration"],
                _asymptote_iterations(sched["asymptote"]), alpha=cfg["alpha"],
            )
            # ULA has exact Gaussian marginals; MALA's accept-reject breaks them.
            exact = None
            if kernel == "ula":
                exact = _exact_curve(
                    ula_dynamics(target.gaussian, h),
                    GaussianDist(np.zeros(d), cfg["pi0_variance"] * np.eye(d)),
                    traj.iterations,
                )
            path = out_dir / f"{kernel}_d{d}.csv"
            write_trajectory_csv(path, traj, exact=exact)
            written.append(path)
            accept = ensemble.acceptance_rate
            summary_rows.append(
                [kernel, str(d), _fmt(h),
                 "" if accept is None else _fmt(accept),
                 "" if (mt := mixing_time(traj, cfg["threshold"])) is None else str(mt)]
            )
    summary = out_dir / "mixing_times.csv"
    with open(summary, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kernel", "d", "step", "acceptance_rate", "mixing_time"])
        writer.writerows(summary_rows)
    written.append(summary)
    return written


def svm_step_rule(kernel: str, t_len: int) -> float:
    if kernel == "mala":
        return 0.13 * float(t_len) ** (-1.0 / 6.0)
    return 0.25 * float(t_len) ** (-0.5)


def run_stochastic_volatility(cfg: ExperimentConfig, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = target_stochastic_volatility(
        cfg["t_len"], cfg["beta"], cfg["phi"], cfg["sigma"], data_seed=cfg["data_seed"]
    )
    pi0 = svm_prior_sampler(cfg["t_len"], cfg["phi"], cfg["sigma"])
    h = cfg["step"] if cfg["step"] is not None else svm_step_rule(cfg["kernel"], cfg["t_len"])
    ensemble = run_ensemble(
        target, cfg["kernel"], h, pi0, cfg["n_chains"], cfg["horizon"], cfg["thin"],
        seed=_domain_seed(cfg["seed"], 0),
    )
    traj = convergence_bounds(
        ensemble, cfg["reference_iteration"], _asymptote_iterations(cfg["asymptote"]),
        alpha=cfg["alpha"],
    )
    coupling_sq = None
    if cfg["coupling"] is not None:
        blk = cfg["coupling"]
        traces = run_coupled_ensemble(
            target, cfg["kernel"], h, pi0, blk["lag"], blk["cap"], blk["n_pairs"],
            seed=_domain_seed(cfg["seed"], 1),
        )
        coupling_sq = coupling_bound_curve(traces, traj.iterations) ** 2
    path = out_dir / "trajectory.csv"
    write_trajectory_csv(path, traj, coupling_sq=coupling_sq)
    return [path]


def _coupling_target(cfg: ExperimentConfig) -> tuple[Target, object, float | None]:
    tgt = cfg["target"]
    kind = tgt["type"]
    if kind == "gibbs_ar1":
        target = target_ar1_circulant(tgt["d"], tgt["rho"])
    elif kind == "ar1_covariance":
        target = target_ar1_covariance(tgt["d"])
    elif kind == "standard_gaussian":
        target = gaussian_target(GaussianDist(np.zeros(tgt["d"]), np.eye(tgt["d"])))
    else:
        target = target_stochastic_volatility(
            tgt["t_len"], tgt["beta"], tgt["phi"], tgt["sigma"], data_seed=tgt["data_seed"]
        )
        pi0 = svm_prior_sampler(tgt["t_len"], tgt["phi"], tgt["sigma"])
        return target, pi0, cfg["step"]
    pi0 = gaussian_sampler(scaled_gaussian(target.gaussian, cfg["pi0_scale"]))
    return target, pi0, cfg["step"]


def run_coupling_baseline(cfg: ExperimentConfig, out_dir) -> list[Path]:
    """Coupled-pair baseline: refuses to emit unless every pair has met."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    target, pi0, step = _coupling_target(cfg)
    traces = run_coupled_ensemble(
        target, cfg["kernel"], step, pi0, cfg["lag"], cfg["cap"], cfg["n_pairs"],
        seed=_domain_seed(cfg["seed"], 1),
    )
    unmet = [k for k, tr in enumerate(traces) if not tr.met]
    if unmet:
        met_times = sorted(tr.meeting_time for tr in traces if tr.met)
        raise UnmetPairsError(
            f"{len(unmet)} of {len(traces)} pairs unmet at cap {cfg['cap']} "
            f"(met meeting times: {met_times if met_times else 'none'})"
        )
    grid = cfg["t_grid"]
    ts = np.arange(grid["start"], grid["end"] + 1, grid["stride"], dtype=np.int64)
    curve = coupling_bound_curve(traces, ts)
    path = out_dir / "coupling.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "coupling", "coupling_sq"])
        for t, value in zip(ts, curve):
            writer.writerow([str(int(t)), _fmt(value), _fmt(value**2)])
    meetings = out_dir / "meeting_times.csv"
    with open(meetings, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair", "meeting_time"])
        for k, tr in enumerate(traces):
            writer.writerow([str(k), str(tr.meeting_time)])
    return [path, meetings]
