"""Config-driven experiment runner.

Reads a declarative YAML config, runs one of the library's experiment kinds
(single-spin, two-spin, mode-network, emitter, oracle-compare) and writes a
data table as CSV or JSON. Output is deterministic for a given config and
seed: floats are written with 17 significant digits and the only metadata is
the schema version and the config hash.

Exit codes: 0 success, 2 invalid config, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .emitter import EmitterParams, evolve_emitter
from .errors import ConfigError, SpinBosonError
from .network import build_random_coupling, decompose, fk_predictions
from .oracle import (
    default_timestep,
    integrate,
    joint_state,
    partial_trace_spin,
    single_spin_system,
    suggested_cutoff,
    thermal_product_state,
)
from .spectral import ModeSpec
from .spinmap import SpinDensityMatrix, coherence_magnitude, evolve_spin
from .twospin import (
    TwoSpinParams,
    antisymmetric_mode_spec,
    normal_mode_specs,
    symmetric_projector_population_from_mode,
)

SCHEMA_VERSION = 1
KINDS = ("single-spin", "two-spin", "mode-network", "emitter", "oracle-compare")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


@dataclass
class Table:
    """One experiment result: named columns plus metadata comment lines."""

    meta: dict
    columns: list
    trailer: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# config loading and validation

def _fail(path, message):
    raise ConfigError(message, field=path)


def _as_mapping(value, path):
    if not isinstance(value, dict):
        _fail(path, f"expected a mapping, got {type(value).__name__}")
    return value


def _check_keys(mapping, path, required, optional=()):
    for key in required:
        if key not in mapping:
            _fail(path, f"missing required key {key!r}")
    allowed = set(required) | set(optional)
    for key in mapping:
        if key not in allowed:
            _fail(f"{path}.{key}" if path else key, "unknown key")


def _check_number(value, where, minimum=None, maximum=None, allow_inf=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(where, f"expected a number, got {value!r}")
    if math.isnan(value):
        _fail(where, "must not be NaN")
    if integer and value != int(value):
        _fail(where, f"expected an integer, got {value!r}")
    if not allow_inf and math.isinf(value):
        _fail(where, "must be finite")
    if minimum is not None and value < minimum:
        _fail(where, f"must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        _fail(where, f"must be <= {maximum}, got {value}")
    return int(value) if integer else float(value)


def _number(mapping, key, path, **limits):
    where = f"{path}.{key}" if path else key
    return _check_number(mapping[key], where, **limits)


def _number_list(mapping, key, path, minimum=None, integer=False):
    where = f"{path}.{key}" if path else key
    values = mapping[key]
    if not isinstance(values, list) or not values:
        _fail(where, "expected a nonempty list")
    return [
        _check_number(v, f"{where}[{i}]", minimum=minimum, integer=integer)
        for i, v in enumerate(values)
    ]


def _mode_spec(mapping, path):
    _as_mapping(mapping, path)
    _check_keys(mapping, path, required=("omega", "eta"), optional=("gamma", "beta"))
    omega = _number(mapping, "omega", path)
    eta = _number(mapping, "eta", path)
    gamma = _number(mapping, "gamma", path, minimum=0.0) if "gamma" in mapping else 0.0
    beta = _number(mapping, "beta", path, allow_inf=True) if "beta" in mapping else math.inf
    try:
        return ModeSpec(omega, eta, gamma, beta)
    except ValueError as exc:
        _fail(path, str(exc))


def _element(mapping, path, j):
    where = f"{path}.element"
    pair = mapping.get("element")
    if pair is None:
        return -j, -j + 1.0
    if not isinstance(pair, list) or len(pair) != 2:
        _fail(where, "expected a pair [m, m']")
    m, mp = (float(v) for v in pair)
    for v in (m, mp):
        if abs((v + j) - round(v + j)) > 1e-9 or not -j <= v <= j:
            _fail(where, f"m={v} is not in the spin-{j} ladder")
    return m, mp


def _time_grid(config):
    if "time_grid" not in config:
        _fail("time_grid", "missing required key")
    grid = _as_mapping(config["time_grid"], "time_grid")
    _check_keys(grid, "time_grid", required=("start", "stop", "points"))
    start = _number(grid, "start", "time_grid", minimum=0.0)
    stop = _number(grid, "stop", "time_grid")
    points = _number(grid, "points", "time_grid", minimum=2, integer=True)
    if stop <= start:
        _fail("time_grid.stop", f"must exceed start={start}")
    return np.linspace(start, stop, points)


def load_config(path):
    """Parse a YAML config file; returns (raw dict, sha256 of the file bytes)."""
    raw = Path(path).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        config = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("top level must be a mapping")
    return config, digest


def validate_config(config):
    """Validate the raw config and return a normalised experiment description.

    Raises ConfigError (with a dotted field path) on the first violation.
    """
    _check_keys(
        config,
        "",
        required=("version", "kind", "params"),
        optional=("description", "time_grid", "seed", "output"),
    )
    version = _number(config, "version", "", integer=True)
    if version != SCHEMA_VERSION:
        _fail("version", f"unsupported schema version {version} (expected {SCHEMA_VERSION})")
    kind = config["kind"]
    if kind not in KINDS:
        _fail("kind", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")

    output = {"path": None, "format": "csv"}
    if "output" in config:
        out = _as_mapping(config["output"], "output")
        _check_keys(out, "output", required=(), optional=("path", "format"))
        if "path" in out:
            output["path"] = str(out["path"])
        if "format" in out:
            if out["format"] not in ("csv", "json"):
                _fail("output.format", f"expected csv or json, got {out['format']!r}")
            output["format"] = out["format"]

    if kind != "mode-network" and "seed" in config:
        _fail("seed", f"{kind} experiments are deterministic and take no seed")

    params = _as_mapping(config["params"], "params")
    validator = _VALIDATORS[kind]
    normalised = validator(params, config)
    return {
        "kind": kind,
        "description": config.get("description", ""),
        "output": output,
        **normalised,
    }


def _validate_single_spin(params, config):
    _check_keys(
        params, "params",
        required=("j", "omega", "eta"),
        optional=("beta", "gamma", "gamma_values", "element"),
    )
    j = _number(params, "j", "params", minimum=0.5)
    if round(2 * j) != 2 * j:
        _fail("params.j", f"2j must be an integer, got j={j}")
    if ("gamma" in params) == ("gamma_values" in params):
        _fail("params", "give exactly one of gamma or gamma_values")
    if "gamma" in params:
        gammas = [_number(params, "gamma", "params", minimum=0.0)]
    else:
        gammas = _number_list(params, "gamma_values", "params", minimum=0.0)
    beta = _number(params, "beta", "params", allow_inf=True) if "beta" in params else math.inf
    base = {"omega": _number(params, "omega", "params"), "eta": _number(params, "eta", "params")}
    modes = []
    for g in gammas:
        try:
            modes.append(ModeSpec(base["omega"], base["eta"], g, beta))
        except ValueError as exc:
            _fail("params", str(exc))
    return {
        "j": j,
        "modes": modes,
        "gammas": gammas,
        "element": _element(params, "params", j),
        "times": _time_grid(config),
    }


def _validate_two_spin(params, config):
    _check_keys(
        params, "params",
        required=("omega0", "eta"),
        optional=("beta", "kappa", "gamma_plus", "gamma_minus_values",
                  "debye_gamma0", "kappa_values"),
    )
    omega0 = _number(params, "omega0", "params")
    eta = _number(params, "eta", "params")
    beta = _number(params, "beta", "params", allow_inf=True) if "beta" in params else math.inf
    explicit = "gamma_minus_values" in params
    debye = "kappa_values" in params
    if explicit == debye:
        _fail("params", "give either gamma_minus_values (+ kappa, gamma_plus) "
                        "or kappa_values (+ debye_gamma0)")
    # Each sweep point reduces to the antisymmetric normal mode, the only one
    # entering the symmetric-state population.
    sweeps = []
    if explicit:
        kappa = _number(params, "kappa", "params") if "kappa" in params else 0.0
        gamma_plus = _number(params, "gamma_plus", "params", minimum=0.0) if "gamma_plus" in params else 0.0
        if "debye_gamma0" in params:
            _fail("params.debye_gamma0", "not valid together with gamma_minus_values")
        for gm in _number_list(params, "gamma_minus_values", "params", minimum=0.0):
            try:
                two = TwoSpinParams(omega0, kappa, eta, gamma_plus, gm, beta)
                sweeps.append((f"gamma_minus_{gm:g}", normal_mode_specs(two)[1]))
            except ValueError as exc:
                _fail("params", str(exc))
    else:
        if "debye_gamma0" not in params:
            _fail("params.debye_gamma0", "required with kappa_values")
        for bad in ("kappa", "gamma_plus"):
            if bad in params:
                _fail(f"params.{bad}", "not valid together with kappa_values")
        gamma0 = _number(params, "debye_gamma0", "params", minimum=0.0)
        for kappa in _number_list(params, "kappa_values", "params"):
            omega_minus = omega0 - 2.0 * kappa
            if omega_minus <= 0.0:
                _fail("params.kappa_values",
                      f"antisymmetric-mode frequency {omega_minus} is not positive")
            gamma_minus = gamma0 * (omega_minus / omega0) ** 3
            try:
                sweeps.append((f"kappa_{kappa:g}",
                               antisymmetric_mode_spec(omega0, kappa, eta, gamma_minus, beta)))
            except ValueError as exc:
                _fail("params.kappa_values", str(exc))
    return {"sweeps": sweeps, "times": _time_grid(config)}


def _validate_mode_network(params, config):
    if "time_grid" in config:
        _fail("time_grid", "mode-network experiments have no time axis")
    _check_keys(
        params, "params",
        required=("omega0", "kappa_max", "n_values", "realizations"),
    )
    omega0 = _number(params, "omega0", "params")
    if omega0 <= 0:
        _fail("params.omega0", f"must be positive, got {omega0}")
    return {
        "omega0": omega0,
        "kappa_max": _number(params, "kappa_max", "params", minimum=0.0),
        "n_values": _number_list(params, "n_values", "params", minimum=2, integer=True),
        "realizations": _number(params, "realizations", "params", minimum=1, integer=True),
        "seed": _number(config, "seed", "", minimum=0, integer=True) if "seed" in config else 0,
    }


def _validate_emitter(params, config):
    _check_keys(
        params, "params",
        required=("modes",),
        optional=("gamma_op", "gamma_dp", "excited_population"),
    )
    raw_modes = params["modes"]
    if not isinstance(raw_modes, list) or not raw_modes:
        _fail("params.modes", "expected a nonempty list of modes")
    modes = [_mode_spec(m, f"params.modes[{i}]") for i, m in enumerate(raw_modes)]
    gamma_op = _number(params, "gamma_op", "params", minimum=0.0) if "gamma_op" in params else 0.0
    gamma_dp = _number(params, "gamma_dp", "params", minimum=0.0) if "gamma_dp" in params else 0.0
    p_e = (_number(params, "excited_population", "params", minimum=0.0, maximum=1.0)
           if "excited_population" in params else 0.5)
    return {
        "params": EmitterParams(modes, gamma_op, gamma_dp),
        "excited_population": p_e,
        "times": _time_grid(config),
    }


def _validate_oracle_compare(params, config):
    _check_keys(
        params, "params",
        required=("j", "mode"),
        optional=("n_max", "element"),
    )
    j = _number(params, "j", "params", minimum=0.5)
    if round(2 * j) != 2 * j:
        _fail("params.j", f"2j must be an integer, got j={j}")
    mode = _mode_spec(params["mode"], "params.mode")
    n_max = (_number(params, "n_max", "params", minimum=1, integer=True)
             if "n_max" in params else suggested_cutoff(mode))
    return {
        "j": j,
        "mode": mode,
        "n_max": n_max,
        "element": _element(params, "params", j),
        "times": _time_grid(config),
    }


_VALIDATORS = {
    "single-spin": _validate_single_spin,
    "two-spin": _validate_two_spin,
    "mode-network": _validate_mode_network,
    "emitter": _validate_emitter,
    "oracle-compare": _validate_oracle_compare,
}


# ---------------------------------------------------------------------------
# experiment execution

def _run_single_spin(exp):
    times = exp["times"]
    rho0 = SpinDensityMatrix.uniform_superposition(exp["j"])
    m, mp = exp["element"]
    columns = [("t", list(times))]
    for gamma, mode in zip(exp["gammas"], exp["modes"]):
        values = [coherence_magnitude(evolve_spin(rho0, [mode], t), m, mp) for t in times]
        columns.append((f"abs_rho_gamma_{gamma:g}", values))
    return columns, {}


def _run_two_spin(exp):
    times = exp["times"]
    columns = [("t", list(times))]
    for label, mode_minus in exp["sweeps"]:
        values = [symmetric_projector_population_from_mode(mode_minus, t)[0] for t in times]
        columns.append((f"p_sym_{label}", values))
    return columns, {}


def _run_mode_network(exp):
    kappa_max = exp["kappa_max"]
    mu = -0.5 * kappa_max
    sigma = kappa_max / math.sqrt(12.0)
    rows = {name: [] for name in (
        "n", "realization", "lambda_min", "lambda_2", "lambda_max", "gap",
        "fidelity_error", "fk_lambda_min", "fk_gap", "fk_fidelity_error_bound",
    )}
    for n in exp["n_values"]:
        if kappa_max > 0.0:
            fk = fk_predictions(n, mu, sigma, exp["omega0"])
        else:
            fk = (exp["omega0"], 0.0, 0.0)
        for i in range(exp["realizations"]):
            seed = np.random.SeedSequence([exp["seed"], n, i])
            dec = decompose(build_random_coupling(n, kappa_max, exp["omega0"], seed))
            fidelity_error = (math.nan if dec.symmetric_fidelity is None
                              else 1.0 - dec.symmetric_fidelity)
            rows["n"].append(n)
            rows["realization"].append(i)
            rows["lambda_min"].append(float(dec.eigenvalues[0]))
            rows["lambda_2"].append(float(dec.eigenvalues[1]))
            rows["lambda_max"].append(float(dec.eigenvalues[-1]))
            rows["gap"].append(float(dec.gap))
            rows["fidelity_error"].append(fidelity_error)
            rows["fk_lambda_min"].append(fk[0])
            rows["fk_gap"].append(fk[1])
            rows["fk_fidelity_error_bound"].append(fk[2])
    return list(rows.items()), {}


def _run_emitter(exp):
    times = exp["times"]
    p_e = exp["excited_population"]
    psi = np.array([math.sqrt(1.0 - p_e), math.sqrt(p_e)])
    rho0 = np.outer(psi, psi)
    names = ("rho_ee", "rho_gg", "re_rho_ge", "im_rho_ge", "abs_rho_ge")
    series = {name: [] for name in names}
    for t in times:
        rho = evolve_emitter(rho0, exp["params"], t)
        series["rho_ee"].append(rho[1, 1].real)
        series["rho_gg"].append(rho[0, 0].real)
        series["re_rho_ge"].append(rho[0, 1].real)
        series["im_rho_ge"].append(rho[0, 1].imag)
        series["abs_rho_ge"].append(abs(rho[0, 1]))
    return [("t", list(times))] + [(n, series[n]) for n in names], {}


def _run_oracle_compare(exp):
    times = exp["times"]
    mode, n_max = exp["mode"], exp["n_max"]
    m, mp = exp["element"]
    rho0 = SpinDensityMatrix.uniform_superposition(exp["j"])
    spec = single_spin_system(exp["j"], [mode], [n_max])
    joint0 = joint_state(rho0.elements, thermal_product_state([mode], [n_max]))
    dt = default_timestep([mode], [n_max])
    trajectory = integrate(spec, joint0, times[-1], dt, sample_times=times)
    k_row, k_col = rho0.index_of(m), rho0.index_of(mp)
    analytic, numeric, diffs = [], [], []
    for t, joint in zip(times, trajectory.states):
        analytic.append(coherence_magnitude(evolve_spin(rho0, [mode], t), m, mp))
        reduced = partial_trace_spin(joint, spec)
        numeric.append(abs(reduced[k_row, k_col]))
        diffs.append(abs(analytic[-1] - numeric[-1]))
    columns = [("t", list(times)), ("analytic", analytic),
               ("oracle", numeric), ("abs_diff", diffs)]
    return columns, {"max_abs_diff": max(diffs)}


_RUNNERS = {
    "single-spin": _run_single_spin,
    "two-spin": _run_two_spin,
    "mode-network": _run_mode_network,
    "emitter": _run_emitter,
    "oracle-compare": _run_oracle_compare,
}


def run_experiment(exp, config_sha256):
    columns, trailer = _RUNNERS[exp["kind"]](exp)
    meta = {"version": SCHEMA_VERSION, "kind": exp["kind"], "config_sha256": config_sha256}
    return Table(meta, columns, trailer)


# ---------------------------------------------------------------------------
# output

def _format_value(value):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(table, path):
    lines = [f"# {key}: {value}" for key, value in table.meta.items()]
    names = [name for name, _ in table.columns]
    lines.append(",".join(names))
    length = len(table.columns[0][1])
    for i in range(length):
        lines.append(",".join(_format_value(col[i]) for _, col in table.columns))
    for key, value in table.trailer.items():
        lines.append(f"# {key}: {_format_value(value)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(table, path):
    payload = {
        "meta": {**table.meta, **{k: float(v) for k, v in table.trailer.items()}},
        "series": {name: [float(v) for v in col] for name, col in table.columns},
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


# ---------------------------------------------------------------------------
# entry points

def _preset_dir():
    return resources.files("spinboson") / "presets"


def list_presets():
    out = []
    for entry in sorted(_preset_dir().iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".yaml"):
            config = yaml.safe_load(entry.read_text())
            out.append((entry.name[: -len(".yaml")], config.get("description", "")))
    return out


def _resolve_config(argument):
    path = Path(argument)
    if path.is_file():
        return path
    candidate = _preset_dir() / f"{argument}.yaml"
    if candidate.is_file():
        return candidate
    raise ConfigError(f"no such config file or preset: {argument}")


def _load_and_validate(argument, seed_override=None):
    config, digest = load_config(_resolve_config(argument))
    if seed_override is not None:
        if config.get("kind") != "mode-network":
            raise ConfigError("--seed only applies to mode-network experiments", field="seed")
        config["seed"] = seed_override
    return validate_config(config), digest


def _cmd_run(args):
    exp, digest = _load_and_validate(args.config, args.seed)
    if args.format:
        exp["output"]["format"] = args.format
    if args.out:
        exp["output"]["path"] = args.out
    if exp["output"]["path"] is None:
        suffix = "json" if exp["output"]["format"] == "json" else "csv"
        exp["output"]["path"] = f"{exp['kind']}.{suffix}"
    table = run_experiment(exp, digest)
    writer = write_json if exp["output"]["format"] == "json" else write_csv
    writer(table, exp["output"]["path"])
    print(exp["output"]["path"])
    return EXIT_OK


def _cmd_validate(args):
    _load_and_validate(args.config)
    print(f"OK: {args.config}")
    return EXIT_OK


def _cmd_presets(args):
    if args.action == "list":
        for name, description in list_presets():
            print(f"{name}\t{description}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spinboson",
        description="Run dephasing, spin-preservation and mode-network experiments "
                    "from YAML configs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment config or preset")
    run_p.add_argument("config", help="path to a YAML config, or a preset name")
    run_p.add_argument("--out", help="output file path (overrides the config)")
    run_p.add_argument("--format", choices=("csv", "json"))
    run_p.add_argument("--seed", type=int, help="seed override (mode-network only)")
    run_p.set_defaults(func=_cmd_run)

    val_p = sub.add_parser("validate", help="validate a config without running it")
    val_p.add_argument("config")
    val_p.set_defaults(func=_cmd_validate)

    pre_p = sub.add_parser("presets", help="inspect bundled presets")
    pre_p.add_argument("action", choices=("list",))
    pre_p.set_defaults(func=_cmd_presets)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SpinBosonError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
