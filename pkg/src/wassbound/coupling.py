"""L-lag coupled chain pairs and the coupling-based distance bound.

One chain is advanced ``lag`` iterations, then both advance jointly with
their Gaussian proposals coupled: first a maximal-coupling attempt (on
success the lagged chain's proposal is set bitwise equal to the leading
chain's), otherwise the noise is reflected across the normalized state
difference. Metropolis kernels share the acceptance uniform. Meeting is
exact floating-point equality of the state vectors, which the construction
produces directly; a tolerance would break faithfulness.

For Gaussian targets a deterministic-scan Gibbs pair is coupled the same
way coordinate by coordinate through each sweep.

The stored per-pair record is just the squared distances between the
offset chains before meeting, which is all the bound estimator needs:

    sum_j sqrt( mean_r ||X^(r)_{t+jL} - Y^(r)_{t+(j-1)L}||^2 )

with each pair contributing exact zeros once it has met.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from .targets import Target

COUPLING_KERNELS = ("rwm", "mala", "ula", "gibbs")


class UnmetPairsError(RuntimeError):
    """A coupled pair failed to meet within its iteration cap."""


@dataclass(frozen=True)
class CoupledPairTrace:
    """Outcome of one L-lag coupled pair.

    meeting_time is the leading-chain iteration tau at which the states
    first coincide (X_tau == Y_{tau-lag}), or None if the cap was reached
    first. distance_sq_trace[t] = ||X_{t+lag} - Y_t||^2 for t < tau - lag.
    """

    lag: int
    meeting_time: int | None
    distance_sq_trace: np.ndarray
    x_states: np.ndarray | None = None

    @property
    def met(self) -> bool:
        return self.meeting_time is not None


@njit(cache=True, nogil=True)
def _gibbs_solo_sweep(x, mu, q, cond_sd, z):  # pragma: no cover
    d = x.shape[0]
    for k in range(d):
        acc = 0.0
        for l in range(d):
            acc += q[k, l] * (x[l] - mu[l])
        acc -= q[k, k] * (x[k] - mu[k])
        x[k] = mu[k] - acc / q[k, k] + cond_sd[k] * z[k]


@njit(cache=True, nogil=True)
def _gibbs_pair_sweep(x, y, mu, q, cond_sd, z, logu):  # pragma: no cover
    """One coupled sweep: reflection-maximal coupling of each conditional."""
    d = x.shape[0]
    for k in range(d):
        ax = 0.0
        ay = 0.0
        for l in range(d):
            ax += q[k, l] * (x[l] - mu[l])
            ay += q[k, l] * (y[l] - mu[l])
        ax -= q[k, k] * (x[k] - mu[k])
        ay -= q[k, k] * (y[k] - mu[k])
        mx = mu[k] - ax / q[k, k]
        my = mu[k] - ay / q[k, k]
        sk = cond_sd[k]
        zk = z[k]
        xn = mx + sk * zk
        if mx == my:
            yn = xn
        else:
            delta = (mx - my) / sk
            if logu[k] < -0.5 * ((zk + delta) ** 2 - zk * zk):
                yn = xn
            else:
                yn = my - sk * zk
        x[k] = xn
        y[k] = yn


def _proposal_mean(kernel: str, h: float, state, grad):
    if kernel == "rwm":
        return state
    return state + 0.5 * h * h * grad


class _Stepper:
    """Per-kernel state advancement with a fixed randomness layout.

    The leading chain consumes, per iteration, exactly the draws an
    uncoupled chain would (proposal noise, then the acceptance uniform for
    Metropolis kernels), so its path is bit-identical with coupling on or
    off. Coupling events draw from a separate stream.
    """

    def __init__(self, target: Target, kernel: str, step: float | None):
        if kernel not in COUPLING_KERNELS:
            raise ValueError(f"unknown kernel {kernel!r}, expected one of {COUPLING_KERNELS}")
        if kernel in ("mala", "ula") and target.grad_log_density is None:
            raise ValueError(f"kernel {kernel!r} needs a target gradient")
        if kernel == "gibbs":
            if target.gaussian is None:
                raise ValueError("the Gibbs kernel needs a Gaussian target")
            dist = target.gaussian
            self.mu = dist.mean
            self.q = np.linalg.inv(dist.cov)
            self.q = 0.5 * (self.q + self.q.T)
            self.cond_sd = 1.0 / np.sqrt(np.diag(self.q))
        else:
            if step is None or step <= 0:
                raise ValueError("step size must be positive")
        self.target = target
        self.kernel = kernel
        self.h = float(step) if step is not None else 0.0
        self.d = target.dim

    def solo(self, x: np.ndarray, gen: np.random.Generator) -> np.ndarray:
        kernel, h = self.kernel, self.h
        if kernel == "gibbs":
            x = x.copy()
            _gibbs_solo_sweep(x, self.mu, self.q, self.cond_sd, gen.standard_normal(self.d))
            return x
        z = gen.standard_normal(self.d)
        if kernel == "ula":
            return x + 0.5 * h * h * self.target.grad_log_density(x)[0] + h * z
        u = gen.random()
        if kernel == "rwm":
            prop = x + h * z
            lp_x, lp_p = self.target.log_density(np.stack((x, prop)))
            return prop if np.log(u) < lp_p - lp_x else x
        # mala
        gx = self.target.grad_log_density(x)[0]
        prop = x + 0.5 * h * h * gx + h * z
        lp_x, lp_p = self.target.log_density(np.stack((x, prop)))
        gp = self.target.grad_log_density(prop)[0]
        back = x - prop - 0.5 * h * h * gp
        log_ratio = lp_p - lp_x - (back @ back - h * h * (z @ z)) / (2.0 * h * h)
        return prop if np.log(u) < log_ratio else x

    def joint(self, x, y, gen_x: np.random.Generator, gen_c: np.random.Generator):
        kernel, h = self.kernel, self.h
        if kernel == "gibbs":
            x = x.copy()
            y = y.copy()
            _gibbs_pair_sweep(
                x, y, self.mu, self.q, self.cond_sd,
                gen_x.standard_normal(self.d),
                np.log(gen_c.random(self.d)),
            )
            return x, y

        z = gen_x.standard_normal(self.d)
        u = gen_x.random() if kernel in ("rwm", "mala") else None
        if kernel == "rwm":
            gx = gy = None
        else:
            gx, gy = self.target.grad_log_density(np.stack((x, y)))
        mx = _proposal_mean(kernel, h, x, gx)
        my = _proposal_mean(kernel, h, y, gy)
        xp = mx + h * z
        delta = (mx - my) / h
        nd = np.sqrt(delta @ delta)
        if nd == 0.0:
            yp = xp.copy()
        else:
            logu_c = np.log(gen_c.random())
            if logu_c < -0.5 * ((z + delta) @ (z + delta) - z @ z):
                yp = xp.copy()
            else:
                e = delta / nd
                w = z - 2.0 * (e @ z) * e
                yp = my + h * w

        if kernel == "ula":
            return xp, yp
        lp_x, lp_y, lp_xp, lp_yp = self.target.log_density(np.stack((x, y, xp, yp)))
        if kernel == "rwm":
            log_ax = lp_xp - lp_x
            log_ay = lp_yp - lp_y
        else:
            gxp, gyp = self.target.grad_log_density(np.stack((xp, yp)))
            back_x = x - xp - 0.5 * h * h * gxp
            back_y = y - yp - 0.5 * h * h * gyp
            fwd_x = xp - mx
            fwd_y = yp - my
            log_ax = lp_xp - lp_x - (back_x @ back_x - fwd_x @ fwd_x) / (2.0 * h * h)
            log_ay = lp_yp - lp_y - (back_y @ back_y - fwd_y @ fwd_y) / (2.0 * h * h)
        log_u = np.log(u)
        x_new = xp if log_u < log_ax else x
        y_new = yp if log_u < log_ay else y
        return x_new, y_new


def _spawn_three(seed) -> tuple[np.random.Generator, ...]:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return tuple(np.random.Generator(np.random.Philox(c)) for c in ss.spawn(3))


def uncoupled_chain(
    target: Target,
    kernel: str,
    step: float | None,
    pi0_sampler: Callable[[np.random.Generator, int], np.ndarray],
    n_steps: int,
    seed,
) -> np.ndarray:
    """Reference single chain with the coupled run's leading-chain stream.

    Returns the (n_steps + 1, d) path. With the same seed this is
    bit-identical to the leading chain of :func:`run_coupled_pair`.
    """
    stepper = _Stepper(target, kernel, step)
    gen_x, _, _ = _spawn_three(seed)
    x = pi0_sampler(gen_x, 1)[0]
    path = np.empty((n_steps + 1, target.dim))
    path[0] = x
    for s in range(n_steps):
        x = stepper.solo(x, gen_x)
        path[s + 1] = x
    return path


def run_coupled_pair(
    target: Target,
    kernel: str,
    step: float | None,
    pi0_sampler: Callable[[np.random.Generator, int], np.ndarray],
    lag: int,
    cap: int,
    seed,
    y0: np.ndarray | None = None,
    record_states: bool = False,
) -> CoupledPairTrace:
    """Run one L-lag coupled pair until meeting or the iteration cap.

    Both chains start from ``pi0_sampler`` (``y0`` overrides the lagged
    chain's start); the leading chain advances ``lag`` iterations solo and
    the pair then advances jointly under the reflection-maximal proposal
    coupling with a shared acceptance uniform. Once met, the chains are
    identical forever, so the run stops. An unmet pair at the cap is
    returned with ``meeting_time=None`` for the caller to handle.
    """
    if lag < 1:
        raise ValueError("lag must be at least 1")
    if cap < lag:
        raise ValueError("cap must be at least the lag")
    stepper = _Stepper(target, kernel, step)
    gen_x, gen_y, gen_c = _spawn_three(seed)

    x = pi0_sampler(gen_x, 1)[0]
    y = pi0_sampler(gen_y, 1)[0] if y0 is None else np.asarray(y0, dtype=np.float64).copy()
    x_states = [x.copy()] if record_states else None
    for _ in range(lag):
        x = stepper.solo(x, gen_x)
        if record_states:
            x_states.append(x.copy())

    dists: list[float] = []
    m = 0
    meeting_time = None
    while True:
        if np.array_equal(x, y):
            meeting_time = lag + m
            break
        if lag + m >= cap:
            break
        diff = x - y
        dists.append(float(diff @ diff))
        x, y = stepper.joint(x, y, gen_x, gen_c)
        if record_states:
            x_states.append(x.copy())
        m += 1

    return CoupledPairTrace(
        lag=lag,
        meeting_time=meeting_time,
        distance_sq_trace=np.asarray(dists, dtype=np.float64),
        x_states=np.asarray(x_states) if record_states else None,
    )


def run_coupled_ensemble(
    target: Target,
    kernel: str,
    step: float | None,
    pi0_sampler,
    lag: int,
    cap: int,
    n_pairs: int,
    seed,
) -> list[CoupledPairTrace]:
    """Independent coupled pairs; pair r's streams are a function of (seed, r)."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = ss.spawn(n_pairs)
    return [
        run_coupled_pair(target, kernel, step, pi0_sampler, lag, cap, child)
        for child in children
    ]


def coupling_bound(traces: list[CoupledPairTrace], t: int) -> float:
    """Estimated coupling bound on the unsquared distance at iteration t.

    Sums, over the lag-spaced offsets j = 1, 2, ..., the root mean squared
    distance across pairs, with a pair contributing exact zeros once past
    its meeting. All traces must share the lag and have met.
    """
    if not traces:
        raise ValueError("need at least one coupled pair")
    if t < 0:
        raise ValueError("iteration must be nonnegative")
    lag = traces[0].lag
    for k, tr in enumerate(traces):
        if tr.lag != lag:
            raise ValueError("all traces must share the same lag")
        if not tr.met:
            raise UnmetPairsError(
                f"pair {k} never met within its cap; the bound would lose its meaning"
            )
    n_pairs = len(traces)
    total = 0.0
    j = 1
    while True:
        s = t + (j - 1) * lag
        acc = 0.0
        alive = False
        for tr in traces:
            if s < tr.distance_sq_trace.shape[0]:
                acc += tr.distance_sq_trace[s]
                alive = True
        if not alive:
            break
        total += np.sqrt(acc / n_pairs)
        j += 1
    return float(total)


def coupling_bound_curve(traces: list[CoupledPairTrace], iterations) -> np.ndarray:
    """coupling_bound evaluated at each requested iteration."""
    return np.array([coupling_bound(traces, int(t)) for t in iterations], dtype=np.float64)
