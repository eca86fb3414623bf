"""Command-line experiment runner.

Usage::

    lqrpid {tune,simulate,compare-p,fracdemo,ts-sweep} --config cfg.json --out outdir [--seed N]

Exit status is 0 on success, 2 for configuration errors and 3 for numeric
failures (the message names the failing stage).
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .analysis import compare_riccati, cost_of_control
from .cloop import Scenario, SimTrace
from .costfn import CostSpec, cost_trajectory, fractional_cost, integrand
from .errors import ConfigError, LqrPidError
from .ga import GaConfig, TuningObjective, tune_pid_restarts
from .pidmap import PidGains, gains_from_feedback
from .reference import CARE_GAINS, DARE_GAINS, PLANTS
from .riccati import LqrWeights, solve_care, solve_dare
from .ssmodel import SecondOrderPlant, build_plant_state_space, discretize_zoh, map_poles_to_z

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
SUBCOMMANDS = ("tune", "simulate", "compare-p", "fracdemo", "ts-sweep")

ASSUMPTIONS = {
    "cost_weights": "w1 and w2 default to 1 (equal weighting); absolute J values depend on them",
    "disturbance": "load step defaults to magnitude 0 at t = 50 s; tuning uses the set-point response only",
    "dare_ts": "ts defaults to 0.1 s for digital designs",
}


@dataclass
class PlantSection:
    k: float = 1.0
    xi: float = 0.2
    wn: float = 1.0


@dataclass
class CostSection:
    # "lambda" in the file
    order: float = 1.0
    w1: float = 1.0
    w2: float = 1.0
    horizon: float = 100.0
    eval_step: float = 0.01


@dataclass
class ScenarioSection:
    setpoint: float = 1.0
    disturbance_time: float | None = 50.0
    disturbance_magnitude: float = 0.0
    dt: float = 1e-3


@dataclass
class GaSection:
    population: int = 20
    elite: int = 2
    crossover_fraction: float = 0.8
    mutation_scale: float = 0.1
    bounds: list = field(default_factory=lambda: [[0.0, 100.0]] * 4)
    max_generations: int = 100
    stall_generations: int = 50
    stall_tolerance: float = 1e-6
    seed: int = 0
    restarts: int = 1


@dataclass
class GainsSection:
    kp: float
    ki: float
    kd: float


@dataclass
class WeightsSection:
    q1: float = 1.0
    q2: float = 1.0
    q3: float = 1.0
    r: float = 1.0


@dataclass
class CompareSection:
    p_a: list
    p_b: list


@dataclass
class FracdemoSection:
    lambdas: list = field(default_factory=lambda: [0.5, 1.0])


@dataclass
class TsSweepSection:
    ts_min: float = 0.1
    ts_max: float = 1.0
    ts_step: float = 0.1


@dataclass
class ExperimentConfig:
    plant: PlantSection = field(default_factory=PlantSection)
    mode: str = "care"
    ts: float = 0.1
    cost: CostSection = field(default_factory=CostSection)
    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    ga: GaSection = field(default_factory=GaSection)
    gains: GainsSection | None = None
    weights: WeightsSection | None = None
    compare: CompareSection | None = None
    fracdemo: FracdemoSection = field(default_factory=FracdemoSection)
    ts_sweep: TsSweepSection = field(default_factory=TsSweepSection)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cost"]["lambda"] = d["cost"].pop("order")
        return d

    # domain objects

    def plant_model(self) -> SecondOrderPlant:
        return SecondOrderPlant(self.plant.k, self.plant.xi, self.plant.wn)

    def cost_spec(self) -> CostSpec:
        c = self.cost
        return CostSpec(c.order, c.w1, c.w2, c.horizon, c.eval_step)

    def scenario_model(self, mode: str = "servo", x0=None) -> Scenario:
        s = self.scenario
        return Scenario(s.setpoint, s.disturbance_time, s.disturbance_magnitude,
                        self.cost.horizon, s.dt, mode, x0)

    def ga_config(self) -> GaConfig:
        g = self.ga
        return GaConfig(g.population, g.elite, g.crossover_fraction, g.mutation_scale,
                        tuple(tuple(b) for b in g.bounds), g.max_generations,
                        g.stall_generations, g.stall_tolerance, g.seed)


_SECTIONS = {
    "plant": PlantSection, "cost": CostSection, "scenario": ScenarioSection, "ga": GaSection,
    "gains": GainsSection, "weights": WeightsSection, "compare": CompareSection,
    "fracdemo": FracdemoSection, "ts_sweep": TsSweepSection,
}
_INT_FIELDS = {"population", "elite", "max_generations", "stall_generations", "seed", "restarts"}


def _build_section(name: str, raw) -> object:
    cls = _SECTIONS[name]
    if not isinstance(raw, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    raw = dict(raw)
    if name == "cost" and "lambda" in raw:
        raw["order"] = raw.pop("lambda")
    allowed = set(cls.__dataclass_fields__)
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")
    for key, value in raw.items():
        if key in _INT_FIELDS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{name}.{key} must be an integer")
        elif key in ("bounds", "p_a", "p_b", "lambdas"):
            if not isinstance(value, list):
                raise ConfigError(f"{name}.{key} must be a list")
        elif value is None and key == "disturbance_time":
            pass
        elif isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name}.{key} must be a number")
    try:
        return cls(**raw)
    except TypeError as exc:
        raise ConfigError(f"section {name!r}: {exc}") from exc


_OPTIONAL_SECTIONS = ("gains", "weights", "compare")


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    allowed = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    kwargs = {}
    for key, value in raw.items():
        if key == "mode":
            if value not in ("care", "dare"):
                raise ConfigError("mode must be 'care' or 'dare'")
            kwargs[key] = value
        elif key == "ts":
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
                raise ConfigError("ts must be a positive number")
            kwargs[key] = float(value)
        elif value is None and key in _OPTIONAL_SECTIONS:
            kwargs[key] = None
        else:
            kwargs[key] = _build_section(key, value)
    cfg = ExperimentConfig(**kwargs)
    # surface invariant violations as config errors before any computation
    try:
        cfg.plant_model()
        cfg.cost_spec()
        cfg.scenario_model()
        cfg.ga_config()
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.ga.restarts < 1:
        raise ConfigError("ga.restarts must be >= 1")
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(raw)


class StageFailure(Exception):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"numeric failure in stage '{stage}': {cause}")
        self.stage = stage


@contextlib.contextmanager
def stage(name: str):
    try:
        yield
    except ConfigError:
        raise
    except (LqrPidError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise StageFailure(name, exc) from exc


# output helpers

def fmt(value: float) -> str:
    """Positional decimal with 15 significant digits."""
    if not math.isfinite(value):
        return repr(float(value))
    return np.format_float_positional(value, precision=15, unique=False, fractional=False, trim="-")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def write_trace_csv(path: Path, trace: SimTrace) -> None:
    r = np.full(len(trace), trace.setpoint)
    cols = (trace.times, r, trace.y, trace.u, trace.e)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "r", "y", "u", "e"])
        for row in zip(*cols):
            w.writerow([fmt(v) for v in row])


def write_rows(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def _eigs(values) -> list:
    vals = sorted((complex(v) for v in values), key=lambda z: (z.real, z.imag))
    return [[v.real, v.imag] for v in vals]


def _design(cfg: ExperimentConfig, plant: SecondOrderPlant, weights: LqrWeights, mode: str):
    ss = build_plant_state_space(plant)
    if mode == "care":
        with stage("riccati"):
            return solve_care(ss.a, ss.b, weights.q, weights.r_matrix)
    with stage("discretize"):
        d = discretize_zoh(ss, cfg.ts)
    with stage("riccati"):
        return solve_dare(d.g, d.h, weights.q, weights.r_matrix)


def _reference_cell(cfg: ExperimentConfig, plant: SecondOrderPlant):
    for name, ref in PLANTS.items():
        if ref == plant:
            table = CARE_GAINS if cfg.mode == "care" else DARE_GAINS
            return name, table.get((name, float(cfg.cost.order)))
    return None, None


# subcommands

def cmd_tune(cfg: ExperimentConfig, out: Path) -> None:
    plant = cfg.plant_model()
    spec = cfg.cost_spec()
    scenario = cfg.scenario_model()
    with stage("tuning"):
        res = tune_pid_restarts(plant, cfg.mode, spec, scenario, cfg.ga_config(),
                                ts=cfg.ts, restarts=cfg.ga.restarts)
        objective = TuningObjective(plant, cfg.mode, spec, scenario, cfg.ts)
    with stage("simulation"):
        trace = objective.trace(res.gains, full_resolution=True)
    payload = {
        "config": cfg.to_dict(),
        "assumptions": ASSUMPTIONS,
        "mode": cfg.mode,
        "ts": res.ts,
        "gains": res.gains.as_dict(),
        "best_weights": {"q1": res.best_weights.q1, "q2": res.best_weights.q2,
                         "q3": res.best_weights.q3, "r": res.best_weights.r},
        "j_min": res.j_min,
        "p_matrix": [float(v) for v in res.p_matrix.p.ravel()],
        "riccati_residual": res.p_matrix.residual,
        "closed_loop_eigenvalues": _eigs(res.p_matrix.closed_loop_eigenvalues),
        "restart_costs": list(res.restart_costs),
        "best_seed": res.seed,
        "generations": res.generations,
        "evaluations": res.evaluations,
        "stop_reason": res.stop_reason,
        "history_file": "history.csv",
        "trace_file": "trace.csv",
    }
    name, cell = _reference_cell(cfg, plant)
    if cell is not None:
        j_pub, kp, ki, kd = cell
        with stage("reference"):
            j_ref = objective.cost_of_gains(PidGains(kp, ki, kd))
        caveats = ["published J values are not directly comparable: cost weights, horizon "
                   "handling and the fractional-integral realization are under-specified"]
        if cfg.mode == "dare":
            caveats.append("the sampling time behind the published digital gains is not stated; "
                           "the oscillatory digital gains are far from the analog scale")
        payload["reference"] = {
            "plant": name, "published_j": j_pub,
            "published_gains": {"kp": kp, "ki": ki, "kd": kd},
            "published_gains_cost": j_ref,
            "ratio_to_published_gains": res.j_min / j_ref,
            "caveats": caveats,
        }
    write_json(out / "results.json", payload)
    write_rows(out / "history.csv", ["generation", "best_cost"],
               ((i, float(v)) for i, v in enumerate(res.history)))
    write_trace_csv(out / "trace.csv", trace)


def cmd_simulate(cfg: ExperimentConfig, out: Path) -> None:
    plant = cfg.plant_model()
    spec = cfg.cost_spec()
    scenario = cfg.scenario_model()
    if cfg.gains is not None:
        gains = PidGains(cfg.gains.kp, cfg.gains.ki, cfg.gains.kd)
        source = "config"
    elif cfg.weights is not None:
        w = cfg.weights
        sol = _design(cfg, plant, LqrWeights(w.q1, w.q2, w.q3, w.r), cfg.mode)
        gains = gains_from_feedback(sol.feedback)
        source = "weights"
    else:
        raise ConfigError("simulate needs a 'gains' or 'weights' section")
    objective = TuningObjective(plant, cfg.mode, spec, scenario, cfg.ts)
    with stage("simulation"):
        trace = objective.trace(gains, full_resolution=True)
    metrics = {
        "config": cfg.to_dict(),
        "assumptions": ASSUMPTIONS,
        "gains": gains.as_dict(),
        "gains_source": source,
        "stable": trace.stable,
        "final_error": float(trace.e[-1]),
        "peak_output": float(np.max(trace.y)),
        "overshoot": float(max(0.0, np.max(trace.y) - scenario.setpoint)),
    }
    if trace.stable:
        with stage("cost"):
            metrics["cost"] = fractional_cost(trace, spec)
    write_json(out / "metrics.json", metrics)
    write_trace_csv(out / "trace.csv", trace)


def cmd_compare(cfg: ExperimentConfig, out: Path) -> None:
    if cfg.compare is None:
        raise ConfigError("compare-p needs a 'compare' section with p_a and p_b")
    try:
        p_a = np.array(cfg.compare.p_a, dtype=float)
        p_b = np.array(cfg.compare.p_b, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"P matrices must be numeric: {exc}") from exc
    with stage("eigenvalues"):
        cmp = compare_riccati(p_a, p_b)
    x0 = np.zeros(p_a.shape[0])
    x0[min(1, x0.size - 1)] = 1.0
    payload = {
        "config": cfg.to_dict(),
        **cmp.as_dict(decimals=4),
        "eigenvalues_full": [float(v) for v in cmp.eigenvalues],
        "trace_difference": float(np.trace(p_a - p_b)),
        "cost_of_control_unit_error": {"a": cost_of_control(p_a, x0), "b": cost_of_control(p_b, x0)},
    }
    write_json(out / "compare.json", payload)


def cmd_fracdemo(cfg: ExperimentConfig, out: Path) -> None:
    if cfg.gains is None:
        raise ConfigError("fracdemo needs a 'gains' section")
    lambdas = cfg.fracdemo.lambdas
    if not lambdas or any(isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0 for v in lambdas):
        raise ConfigError("fracdemo.lambdas must be a list of positive numbers")
    plant = cfg.plant_model()
    gains = PidGains(cfg.gains.kp, cfg.gains.ki, cfg.gains.kd)
    base = cfg.cost_spec()
    objective = TuningObjective(plant, cfg.mode, base, cfg.scenario_model(), cfg.ts)
    with stage("simulation"):
        trace = objective.trace(gains)
    if not trace.stable:
        raise StageFailure("simulation", ValueError("closed loop diverged"))
    columns = []
    with stage("fractional integral"):
        for lam in lambdas:
            t, j = cost_trajectory(trace, CostSpec(float(lam), base.w1, base.w2, base.horizon, base.eval_step))
            columns.append(j)
        _, phi = integrand(trace, base)
    header = ["t", "integrand"] + [f"lambda_{float(v):g}" for v in lambdas]
    write_rows(out / "fracdemo.csv", header, zip(t, phi, *columns))


def cmd_ts_sweep(cfg: ExperimentConfig, out: Path) -> None:
    sw = cfg.ts_sweep
    if not (0 < sw.ts_min <= sw.ts_max) or sw.ts_step <= 0:
        raise ConfigError("ts_sweep needs 0 < ts_min <= ts_max and ts_step > 0")
    plant = cfg.plant_model()
    w = cfg.weights or WeightsSection()
    weights = LqrWeights(w.q1, w.q2, w.q3, w.r)
    ss = build_plant_state_space(plant)
    with stage("riccati"):
        care = solve_care(ss.a, ss.b, weights.q, weights.r_matrix)
    n = int(math.floor((sw.ts_max - sw.ts_min) / sw.ts_step + 1e-9)) + 1
    rows = []
    for i in range(n):
        ts = round(sw.ts_min + i * sw.ts_step, 12)
        with stage("discretize"):
            d = discretize_zoh(ss, ts)
        with stage("riccati"):
            dare = solve_dare(d.g, d.h, weights.q, weights.r_matrix)
        sets = {
            "open_loop_mapped": map_poles_to_z(np.linalg.eigvals(ss.a), ts),
            "open_loop_g": np.linalg.eigvals(d.g),
            "closed_loop_care_gains": np.linalg.eigvals(d.g - d.h @ care.feedback),
            "closed_loop_dare_gains": dare.closed_loop_eigenvalues,
        }
        for source, vals in sets.items():
            for k, z in enumerate(sorted((complex(v) for v in vals), key=lambda z: (z.real, z.imag))):
                rows.append((ts, source, k, z.real, z.imag))
    write_rows(out / "poles.csv", ["ts", "source", "index", "real", "imag"], rows)


COMMANDS = {
    "tune": cmd_tune,
    "simulate": cmd_simulate,
    "compare-p": cmd_compare,
    "fracdemo": cmd_fracdemo,
    "ts-sweep": cmd_ts_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lqrpid", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override ga.seed")
    return parser


def run_experiment(command: str, config_path, out_dir, seed: int | None = None) -> int:
    try:
        cfg = load_config(config_path)
        if seed is not None:
            if not 0 <= seed < 2**64:
                raise ConfigError("seed must be a 64-bit unsigned integer")
            cfg.ga.seed = seed
        out = Path(out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory: {exc}") from exc
        COMMANDS[command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageFailure as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run_experiment(args.command, args.config, args.out, args.seed)


if __name__ == "__main__":
    sys.exit(main())
