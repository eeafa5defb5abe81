"""Provable upper and lower bounds on squared 2-Wasserstein distances from
samples, with jackknife uncertainty quantification, applied to quantify the
convergence of Markov chain Monte Carlo against a coupling baseline."""

from .assignment import (
    AssignmentSolution,
    LeaveOneOutCosts,
    flapjack,
    repair_after_entry_change,
    solve_assignment,
)
from .coupling import (
    CoupledPairTrace,
    UnmetPairsError,
    coupling_bound,
    coupling_bound_curve,
    run_coupled_ensemble,
    run_coupled_pair,
    uncoupled_chain,
)
from .gaussian import (
    GaussianChainDynamics,
    GaussianDist,
    check_cot_1d_quantiles,
    check_cot_gaussian,
    cot_preservation_check,
    gibbs_dynamics,
    gibbs_update_matrix,
    marginal_at,
    ula_dynamics,
    ula_stationary,
    w2_squared_gaussian,
)
from .jackknife import (
    JackknifeResult,
    chebyshev_ci,
    gaussian_ci,
    jackknife_variance,
    normal_quantile,
    signed_square_ci,
)
from .mcmc import (
    ChainEnsemble,
    ConvergenceBoundTrajectory,
    NumericalError,
    convergence_bounds,
    run_ensemble,
)
from .targets import (
    Target,
    gaussian_sampler,
    gaussian_target,
    scaled_gaussian,
    svm_prior_sampler,
    svm_simulate_data,
    target_ar1_circulant,
    target_ar1_covariance,
    target_stochastic_volatility,
)
from .wasserstein import (
    BoundEstimate,
    EmpiricalMeasure,
    decay_constant,
    estimate_bounds,
    estimate_lower,
    estimate_lower_squared,
    estimate_upper,
    w2_squared,
    w2_squared_1d,
)

__version__ = "0.1.0"

__all__ = [
    "AssignmentSolution",
    "BoundEstimate",
    "ChainEnsemble",
    "ConvergenceBoundTrajectory",
    "CoupledPairTrace",
    "EmpiricalMeasure",
    "GaussianChainDynamics",
    "GaussianDist",
    "JackknifeResult",
    "LeaveOneOutCosts",
    "NumericalError",
    "Target",
    "UnmetPairsError",
    "chebyshev_ci",
    "check_cot_1d_quantiles",
    "check_cot_gaussian",
    "convergence_bounds",
    "cot_preservation_check",
    "coupling_bound",
    "coupling_bound_curve",
    "decay_constant",
    "estimate_bounds",
    "estimate_lower",
    "estimate_lower_squared",
    "estimate_upper",
    "flapjack",
    "gaussian_ci",
    "gaussian_sampler",
    "gaussian_target",
    "gibbs_dynamics",
    "gibbs_update_matrix",
    "jackknife_variance",
    "marginal_at",
    "normal_quantile",
    "repair_after_entry_change",
    "run_coupled_ensemble",
    "run_coupled_pair",
    "run_ensemble",
    "scaled_gaussian",
    "signed_square_ci",
    "solve_assignment",
    "svm_prior_sampler",
    "svm_simulate_data",
    "target_ar1_circulant",
    "target_ar1_covariance",
    "target_stochastic_volatility",
    "ula_dynamics",
    "ula_stationary",
    "uncoupled_chain",
    "w2_squared",
    "w2_squared_1d",
    "w2_squared_gaussian",
]
