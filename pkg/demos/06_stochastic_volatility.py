"""Bounding MCMC convergence on a latent stochastic volatility posterior.

A year of observations drives a 360-dimensional latent AR(1) volatility
path; the posterior is non-Gaussian with an explicit gradient. Chains start
from the prior, the standard way to get an overdispersed initialization.
No closed-form distance exists here, which is precisely when the empirical
bounds earn their keep.

Scaled down ~10x from a full production run so it finishes in about a
minute; raise the horizons for sharper curves.
"""

import numpy as np

import wassbound as wb

t_len, beta, phi, sig = 360, 0.65, 0.98, 0.15
n_chains = 60
horizon, thin, t_ref = 6000, 50, 6000
asymptote = np.arange(2000, 5001, 50)

target = wb.target_stochastic_volatility(t_len, beta, phi, sig, data_seed=4)
prior = wb.svm_prior_sampler(t_len, phi, sig)
step = 0.13 * t_len ** (-1 / 6)

ensemble = wb.run_ensemble(target, "mala", step, prior, n_chains, horizon, thin, seed=31)
print(f"MALA on the volatility posterior: step {step:.4f}, "
      f"acceptance {ensemble.acceptance_rate:.0%}")

traj = wb.convergence_bounds(ensemble, t_ref, asymptote, alpha=0.05)
print()
print(f"{'t':>6} {'upper':>10} {'ci_hi':>10} {'lower_sq':>10}")
for t in (0, 200, 500, 1000, 1500, 2000, 3000):
    k = list(traj.iterations).index(t)
    up = traj.upper[k]
    print(f"{t:6d} {up.value:10.3f} {up.ci_high:10.3f} {traj.lower_sq[k].value:10.3f}")

upper = traj.column("upper")
for thr in (20.0, 5.0, 1.0):
    hit = np.nonzero(upper <= thr)[0]
    when = int(traj.iterations[hit[0]]) if hit.size else "not reached"
    print(f"first iteration with upper bound <= {thr:4.0f}: {when}")
