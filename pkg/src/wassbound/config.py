"""Experiment configuration: one JSON document, schema-validated.

Unknown keys are rejected at every level, and every referenced iteration
(reference point, asymptote window) must be consistent with the thinning
interval so it lands on a recorded snapshot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

EXPERIMENTS = (
    "estimate_from_samples",
    "gibbs_ar1",
    "ula_mala_scaling",
    "stochastic_volatility",
    "coupling_baseline",
)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    values: dict

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)


def _need(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise ConfigError(f"missing required key {where}{key}")
    return _typed(doc[key], key, kind, where)


def _opt(doc: dict, key: str, kind, default, where: str):
    if key not in doc:
        return default
    return _typed(doc[key], key, kind, where)


def _typed(value, key: str, kind, where: str):
    label = f"{where}{key}"
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{label} must be an integer")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{label} must be a number")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{label} must be a string")
        return value
    if kind is dict:
        if not isinstance(value, dict):
            raise ConfigError(f"{label} must be an object")
        return value
    if kind == "int_list":
        if not isinstance(value, list) or not value or any(
            isinstance(v, bool) or not isinstance(v, int) for v in value
        ):
            raise ConfigError(f"{label} must be a non-empty list of integers")
        return list(value)
    raise AssertionError(kind)


def _no_extras(doc: dict, allowed, where: str):
    extras = set(doc) - set(allowed)
    if extras:
        raise ConfigError(f"unknown key(s) {sorted(extras)} in {where or 'config'}")


def _window(doc: dict, key: str, where: str) -> dict:
    win = _need(doc, key, dict, where)
    inner = f"{where}{key}."
    out = {
        "start": _need(win, "start", int, inner),
        "end": _need(win, "end", int, inner),
        "stride": _need(win, "stride", int, inner),
    }
    _no_extras(win, out, f"{where}{key}")
    if out["stride"] < 1 or out["start"] < 0 or out["end"] < out["start"]:
        raise ConfigError(f"{where}{key} must satisfy 0 <= start <= end, stride >= 1")
    return out


def _check_schedule(horizon, thin, t_ref, window, where: str):
    if thin < 1 or horizon < 1:
        raise ConfigError(f"{where}thin and horizon must be positive")
    if horizon % thin != 0:
        raise ConfigError(f"{where}horizon must be a multiple of thin")
    for name, value in (("reference_iteration", t_ref),):
        if value % thin != 0:
            raise ConfigError(f"{where}{name} must be a multiple of thin")
        if not 0 < value <= horizon:
            raise ConfigError(f"{where}{name} must lie in (0, horizon]")
    for name in ("start", "end", "stride"):
        if window[name] % thin != 0:
            raise ConfigError(f"{where}asymptote {name} must be a multiple of thin")
    if window["stride"] < thin:
        raise ConfigError(f"{where}asymptote stride must be at least thin")
    if window["end"] >= t_ref:
        raise ConfigError(f"{where}asymptote window must end before the reference iteration")


def _coupling_block(doc: dict, where: str) -> dict | None:
    if "coupling" not in doc:
        return None
    blk = _typed(doc["coupling"], "coupling", dict, where)
    inner = f"{where}coupling."
    out = {
        "lag": _need(blk, "lag", int, inner),
        "n_pairs": _need(blk, "n_pairs", int, inner),
        "cap": _need(blk, "cap", int, inner),
    }
    _no_extras(blk, out, f"{where}coupling")
    if out["lag"] < 1 or out["n_pairs"] < 1 or out["cap"] < out["lag"]:
        raise ConfigError(f"{where}coupling needs lag >= 1, n_pairs >= 1, cap >= lag")
    return out


def _sampler_schedule(doc: dict, where: str) -> dict:
    out = {
        "horizon": _need(doc, "horizon", int, where),
        "thin": _opt(doc, "thin", int, 1, where),
        "reference_iteration": _need(doc, "reference_iteration", int, where),
        "asymptote": _window(doc, "asymptote", where),
    }
    _check_schedule(out["horizon"], out["thin"], out["reference_iteration"], out["asymptote"], where)
    return out


def validate_config(doc) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    experiment = _need(doc, "experiment", str, "")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")
    out = {
        "seed": _opt(doc, "seed", int, 0, ""),
        "alpha": _opt(doc, "alpha", float, 0.05, ""),
    }
    if not 0.0 < out["alpha"] < 1.0:
        raise ConfigError("alpha must lie strictly inside (0, 1)")
    common = {"experiment", "seed", "alpha"}

    if experiment == "estimate_from_samples":
        out["nu"] = _need(doc, "nu", str, "")
        out["mu"] = _need(doc, "mu", str, "")
        out["mu_prime"] = _need(doc, "mu_prime", str, "")
        _no_extras(doc, common | {"nu", "mu", "mu_prime"}, "")

    elif experiment == "gibbs_ar1":
        out["d"] = _need(doc, "d", int, "")
        out["rho"] = _need(doc, "rho", float, "")
        out["n_chains"] = _need(doc, "n_chains", int, "")
        out["pi0_scale"] = _opt(doc, "pi0_scale", float, 2.0, "")
        out.update(_sampler_schedule(doc, ""))
        out["coupling"] = _coupling_block(doc, "")
        _no_extras(
            doc,
            common
            | {"d", "rho", "n_chains", "pi0_scale", "horizon", "thin",
               "reference_iteration", "asymptote", "coupling"},
            "",
        )
        if out["d"] < 1 or not abs(out["rho"]) < 1 or out["n_chains"] < 2:
            raise ConfigError("gibbs_ar1 needs d >= 1, |rho| < 1, n_chains >= 2")

    elif experiment == "ula_mala_scaling":
        out["dims"] = _need(doc, "dims", "int_list", "")
        out["n_chains"] = _need(doc, "n_chains", int, "")
        out["threshold"] = _opt(doc, "threshold", float, 6.0, "")
        out["pi0_variance"] = _opt(doc, "pi0_variance", float, 3.0, "")
        for kernel in ("mala", "ula"):
            sub = _need(doc, kernel, dict, "")
            sched = _sampler_schedule(sub, f"{kernel}.")
            _no_extras(sub, sched, kernel)
            out[kernel] = sched
        _no_extras(
            doc,
            common | {"dims", "n_chains", "threshold", "pi0_variance", "mala", "ula"},
            "",
        )
        if any(d < 1 for d in out["dims"]) or out["n_chains"] < 2:
            raise ConfigError("ula_mala_scaling needs positive dims and n_chains >= 2")

    elif experiment == "stochastic_volatility":
        out["t_len"] = _need(doc, "t_len", int, "")
        out["beta"] = _need(doc, "beta", float, "")
        out["phi"] = _need(doc, "phi", float, "")
        out["sigma"] = _need(doc, "sigma", float, "")
        out["data_seed"] = _opt(doc, "data_seed", int, 0, "")
        out["kernel"] = _need(doc, "kernel", str, "")
        if out["kernel"] not in ("mala", "rwm"):
            raise ConfigError("stochastic_volatility kernel must be 'mala' or 'rwm'")
        out["step"] = _opt(doc, "step", float, None, "")
        out["n_chains"] = _need(doc, "n_chains", int, "")
        out.update(_sampler_schedule(doc, ""))
        out["coupling"] = _coupling_block(doc, "")
        _no_extras(
            doc,
            common
            | {"t_len", "beta", "phi", "sigma", "data_seed", "kernel", "step", "n_chains",
               "horizon", "thin", "reference_iteration", "asymptote", "coupling"},
            "",
        )
        if out["n_chains"] < 2:
            raise ConfigError("stochastic_volatility needs n_chains >= 2")

    else:  # coupling_baseline
        tgt = _need(doc, "target", dict, "")
        ttype = _need(tgt, "type", str, "target.")
        tout = {"type": ttype}
        if ttype == "gibbs_ar1":
            tout["d"] = _need(tgt, "d", int, "target.")
            tout["rho"] = _need(tgt, "rho", float, "target.")
            _no_extras(tgt, tout, "target")
        elif ttype == "ar1_covariance":
            tout["d"] = _need(tgt, "d", int, "target.")
            _no_extras(tgt, tout, "target")
        elif ttype == "standard_gaussian":
            tout["d"] = _need(tgt, "d", int, "target.")
            _no_extras(tgt, tout, "target")
        elif ttype == "stochastic_volatility":
            for key in ("beta", "phi", "sigma"):
                tout[key] = _need(tgt, key, float, "target.")
            tout["t_len"] = _need(tgt, "t_len", int, "target.")
            tout["data_seed"] = _opt(tgt, "data_seed", int, 0, "target.")
            _no_extras(tgt, tout, "target")
        else:
            raise ConfigError(f"unknown target type {ttype!r}")
        out["target"] = tout
        out["kernel"] = _need(doc, "kernel", str, "")
        if out["kernel"] not in ("rwm", "mala", "ula", "gibbs"):
            raise ConfigError("coupling kernel must be rwm, mala, ula, or gibbs")
        out["step"] = _opt(doc, "step", float, None, "")
        out["pi0_scale"] = _opt(doc, "pi0_scale", float, 2.0, "")
        out["lag"] = _need(doc, "lag", int, "")
        out["n_pairs"] = _need(doc, "n_pairs", int, "")
        out["cap"] = _need(doc, "cap", int, "")
        out["t_grid"] = _window(doc, "t_grid", "")
        _no_extras(
            doc,
            common
            | {"target", "kernel", "step", "pi0_scale", "lag", "n_pairs", "cap", "t_grid"},
            "",
        )
        if out["lag"] < 1 or out["n_pairs"] < 1 or out["cap"] < out["lag"]:
            raise ConfigError("coupling_baseline needs lag >= 1, n_pairs >= 1, cap >= lag")

    return ExperimentConfig(experiment=experiment, values=out)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return validate_config(doc)
