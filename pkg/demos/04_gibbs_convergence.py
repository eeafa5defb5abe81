"""Quantifying Gibbs sampler convergence against the exact answer.

A deterministic-scan Gibbs sampler on a correlated periodic-AR(1) Gaussian
target has exactly Gaussian marginals, so the squared distance to
stationarity is available in closed form at every iteration. Running many
independent chains from an overdispersed start, the debiased empirical
upper bound tracks that exact curve from above, the signed-squared lower
bound from below, and the coupling baseline sits above everything.
"""

import numpy as np

import wassbound as wb
from wassbound.targets import gaussian_sampler

d, rho, n_chains = 16, 0.9, 120
horizon, thin, t_ref = 600, 5, 600
asymptote = np.arange(300, 501, 5)

target = wb.target_ar1_circulant(d, rho)
start = wb.scaled_gaussian(target.gaussian, 2.0)  # density of pi(x / 2)
pi0 = gaussian_sampler(start)

ensemble = wb.run_ensemble(target, "gibbs", None, pi0, n_chains, horizon, thin, seed=11)
traj = wb.convergence_bounds(ensemble, t_ref, asymptote, alpha=0.05)

dynamics = wb.gibbs_dynamics(target.gaussian)
print("overdispersed start stays overdispersed:",
      wb.cot_preservation_check(dynamics, start, 50).all())

traces = wb.run_coupled_ensemble(
    target, "gibbs", None, pi0, lag=400, cap=100000, n_pairs=25, seed=12
)
print(f"coupled pairs met by iteration {max(tr.meeting_time for tr in traces)}")
print()

print(f"{'t':>5} {'exact':>10} {'upper':>10} {'lower_sq':>10} {'coupling':>10}")
for t in (0, 25, 50, 100, 150, 200, 300):
    k = list(traj.iterations).index(t)
    exact = wb.w2_squared_gaussian(wb.marginal_at(dynamics, start, t), target.gaussian)
    coupling = wb.coupling_bound(traces, t) ** 2
    print(f"{t:5d} {exact:10.4f} {traj.upper[k].value:10.4f} "
          f"{traj.lower_sq[k].value:10.4f} {coupling:10.4f}")
