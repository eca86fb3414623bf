"""Real-coded GA and the weights -> Riccati -> PID -> simulation -> cost pipeline.

Generation loop: rank scaling, stochastic-uniform selection, elite carry-over,
scattered crossover for a fixed fraction of the non-elite children and
Gaussian mutation (linearly shrinking spread) for the rest, all clipped to
the search box.  Every random draw comes from one seeded generator, in a fixed
order, so runs are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cloop import Scenario, SimTrace, simulate_continuous, simulate_discrete
from .costfn import CostSpec, decimation_stride, fractional_cost
from .errors import ConfigError, LqrPidError, NumericFailure
from .pidmap import PidGains, gains_from_feedback
from .riccati import LqrWeights, RiccatiSolution, solve_care, solve_dare
from .ssmodel import SecondOrderPlant, build_plant_state_space, discretize_zoh

PENALTY = 1e10
MODES = ("care", "dare")


@dataclass(frozen=True)
class GaConfig:
    population: int = 20
    elite: int = 2
    crossover_fraction: float = 0.8
    mutation_scale: float = 0.1  # initial sigma as a fraction of each variable's range
    bounds: tuple = ((0.0, 100.0),) * 4
    max_generations: int = 100
    stall_generations: int = 50
    stall_tolerance: float = 1e-6
    seed: int = 0
    initial_population: tuple | None = None

    def __post_init__(self):
        if self.population < 2:
            raise ConfigError("population must be at least 2")
        if not 0 <= self.elite < self.population:
            raise ConfigError("elite must satisfy 0 <= elite < population")
        if not 0.0 <= self.crossover_fraction <= 1.0:
            raise ConfigError("crossover_fraction must lie in [0, 1]")
        if self.mutation_scale < 0:
            raise ConfigError("mutation_scale must be nonnegative")
        if self.max_generations < 0 or self.stall_generations < 1:
            raise ConfigError("generation limits must be positive")
        if self.stall_tolerance < 0:
            raise ConfigError("stall_tolerance must be nonnegative")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must be a 64-bit unsigned integer")
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if not bounds or any(not lo < hi for lo, hi in bounds):
            raise ConfigError("each bound needs lo < hi")
        object.__setattr__(self, "bounds", bounds)
        if self.initial_population is not None:
            init = np.asarray(self.initial_population, dtype=float)
            if init.shape != (self.population, len(bounds)):
                raise ConfigError(f"initial_population must be {self.population}x{len(bounds)}")
            object.__setattr__(self, "initial_population", tuple(map(tuple, init)))

    @property
    def lower(self) -> np.ndarray:
        return np.array([lo for lo, _ in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for _, hi in self.bounds])


@dataclass(frozen=True, eq=False)
class GaResult:
    best_x: np.ndarray
    best_cost: float
    history: np.ndarray
    generations: int
    evaluations: int
    stop_reason: str


def scattered_crossover(parent1, parent2, mask) -> np.ndarray:
    p1 = np.asarray(parent1, dtype=float)
    p2 = np.asarray(parent2, dtype=float)
    m = np.asarray(mask)
    if p1.shape != p2.shape or p1.shape != m.shape:
        raise ConfigError("parents and mask must have equal lengths")
    return np.where(m.astype(bool), p1, p2)


def gaussian_mutation(parent, noise, bounds) -> np.ndarray:
    """``clip(parent + noise)`` to per-variable ``(lo, hi)`` bounds."""
    p = np.asarray(parent, dtype=float)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    return np.clip(p + np.asarray(noise, dtype=float), lo, hi)


def rank_scaling(scores, total: float) -> np.ndarray:
    """Expectations proportional to ``1/sqrt(rank)``, summing to ``total``."""
    order = np.argsort(scores, kind="stable")
    expect = np.empty(len(scores))
    expect[order] = 1.0 / np.sqrt(np.arange(1, len(scores) + 1))
    return expect * (total / expect.sum())


def stochastic_uniform_selection(expectation, n_parents: int, rng) -> np.ndarray:
    """Walk evenly spaced pointers along the cumulative expectation line."""
    if n_parents == 0:
        return np.empty(0, dtype=int)
    cum = np.cumsum(expectation)
    step = cum[-1] / n_parents
    pointers = rng.uniform(0.0, step) + step * np.arange(n_parents)
    return np.minimum(np.searchsorted(cum, pointers, side="right"), len(cum) - 1)


def ga_optimize(objective, config: GaConfig) -> GaResult:
    """Minimize ``objective`` over the box in ``config.bounds``.

    ``history[g]`` is the best cost after generation ``g`` (index 0 is the
    initial population); elites make it nonincreasing.
    """
    rng = np.random.default_rng(config.seed)
    lo, hi = config.lower, config.upper
    dim = lo.size
    n_pop = config.population
    n_rest = n_pop - config.elite
    n_cross = int(round(config.crossover_fraction * n_rest))
    n_mut = n_rest - n_cross

    def evaluate(x):
        v = float(objective(x))
        return v if math.isfinite(v) else math.inf

    if config.initial_population is not None:
        pop = np.array(config.initial_population, dtype=float)
        pop = np.clip(pop, lo, hi)
    else:
        pop = rng.uniform(lo, hi, size=(n_pop, dim))
    scores = np.array([evaluate(x) for x in pop])
    evaluations = n_pop
    history = [float(scores.min())]
    stop = "max_generations"
    gen = 0
    for gen in range(1, config.max_generations + 1):
        order = np.argsort(scores, kind="stable")
        elite_x = pop[order[: config.elite]]
        elite_s = scores[order[: config.elite]]

        expect = rank_scaling(scores, 2 * n_cross + n_mut)
        parents = stochastic_uniform_selection(expect, 2 * n_cross + n_mut, rng)
        parents = parents[rng.permutation(parents.size)]

        children = []
        for i in range(n_cross):
            mask = rng.integers(0, 2, size=dim)
            children.append(scattered_crossover(pop[parents[2 * i]], pop[parents[2 * i + 1]], mask))
        sigma = config.mutation_scale * (hi - lo) * (1.0 - (gen - 1) / config.max_generations)
        for i in range(n_mut):
            noise = rng.normal(0.0, 1.0, size=dim) * sigma
            children.append(gaussian_mutation(pop[parents[2 * n_cross + i]], noise, config.bounds))
        children = np.array(children).reshape(-1, dim)
        child_s = np.array([evaluate(x) for x in children])
        evaluations += len(children)

        pop = np.vstack([elite_x, children])
        scores = np.concatenate([elite_s, child_s])
        history.append(min(history[-1], float(scores.min())))
        if gen >= config.stall_generations:
            if history[gen - config.stall_generations] - history[gen] < config.stall_tolerance:
                stop = "stall"
                break
    best = int(np.argmin(scores))
    return GaResult(pop[best].copy(), float(scores[best]), np.array(history), gen, evaluations, stop)


class TuningObjective:
    """Maps ``[q1, q2, q3, r]`` to the performance index of the resulting PID loop.

    Candidates whose Riccati solve fails or whose loop diverges cost ``PENALTY``.
    """

    def __init__(self, plant: SecondOrderPlant, mode: str, spec: CostSpec,
                 scenario: Scenario | None = None, ts: float = 0.1):
        if mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
        if scenario is None:
            scenario = Scenario(horizon=spec.horizon)
        if scenario.mode != "servo":
            raise ConfigError("tuning runs on servo (set-point) traces")
        if scenario.horizon < spec.horizon:
            raise ConfigError("simulation horizon is shorter than the cost horizon")
        self.plant, self.mode, self.spec, self.scenario = plant, mode, spec, scenario
        self.ss = build_plant_state_space(plant)
        self.ts = float(ts) if mode == "dare" else None
        if mode == "care":
            self.record_every = decimation_stride(scenario.dt, spec.eval_step)
            self.dplant = None
        else:
            self.dplant = discretize_zoh(self.ss, ts)
            ratio = ts / spec.eval_step
            if abs(ratio - round(ratio)) < 1e-9 * ratio and round(ratio) >= 1:
                self.substeps = int(round(ratio))
            else:
                self.substeps = int(round(ts / scenario.dt))

    def solve(self, weights: LqrWeights) -> RiccatiSolution:
        if self.mode == "care":
            return solve_care(self.ss.a, self.ss.b, weights.q, weights.r_matrix)
        return solve_dare(self.dplant.g, self.dplant.h, weights.q, weights.r_matrix)

    def trace(self, gains: PidGains, scenario: Scenario | None = None,
              full_resolution: bool = False) -> SimTrace:
        sc = scenario or self.scenario
        if self.mode == "care":
            return simulate_continuous(self.plant, gains, sc,
                                       record_every=1 if full_resolution else self.record_every)
        substeps = int(round(self.ts / sc.dt)) if full_resolution else self.substeps
        return simulate_discrete(self.dplant, gains.feedback, sc, plant=self.plant, substeps=substeps)

    def cost_of_gains(self, gains: PidGains) -> float:
        tr = self.trace(gains)
        if not tr.stable:
            return PENALTY
        j = fractional_cost(tr, self.spec)
        return j if math.isfinite(j) else PENALTY

    def __call__(self, x) -> float:
        try:
            sol = self.solve(LqrWeights.from_vector(x))
            return self.cost_of_gains(gains_from_feedback(sol.feedback))
        except (LqrPidError, np.linalg.LinAlgError):
            return PENALTY


@dataclass(frozen=True, eq=False)
class TuningResult:
    best_weights: LqrWeights
    gains: PidGains
    p_matrix: RiccatiSolution
    j_min: float
    history: np.ndarray
    mode: str
    ts: float | None
    seed: int
    generations: int
    evaluations: int
    stop_reason: str
    restart_costs: tuple = field(default=())


def tune_pid(plant: SecondOrderPlant, mode: str, spec: CostSpec, scenario: Scenario | None = None,
             config: GaConfig | None = None, ts: float = 0.1) -> TuningResult:
    """GA search for LQR weights whose PID gains minimize ``spec`` on ``plant``."""
    config = config or GaConfig()
    if len(config.bounds) != 4:
        raise ConfigError("tuning searches exactly four variables (q1, q2, q3, r)")
    objective = TuningObjective(plant, mode, spec, scenario, ts)
    res = ga_optimize(objective, config)
    if res.best_cost >= PENALTY:
        raise NumericFailure("tuning: no stabilizing weights found in the search box")
    weights = LqrWeights.from_vector(res.best_x)
    sol = objective.solve(weights)
    gains = gains_from_feedback(sol.feedback)
    return TuningResult(weights, gains, sol, res.best_cost, res.history, mode,
                        objective.ts, config.seed, res.generations, res.evaluations,
                        res.stop_reason, (res.best_cost,))


def tune_pid_restarts(plant: SecondOrderPlant, mode: str, spec: CostSpec, scenario: Scenario | None = None,
                      config: GaConfig | None = None, ts: float = 0.1, restarts: int = 5) -> TuningResult:
    """Best of ``restarts`` independent runs seeded ``seed, seed+1, ...``."""
    config = config or GaConfig()
    if restarts < 1:
        raise ConfigError("restarts must be >= 1")
    results = []
    for i in range(restarts):
        cfg = GaConfig(**{**config.__dict__, "seed": (config.seed + i) % 2**64})
        try:
            results.append(tune_pid(plant, mode, spec, scenario, cfg, ts))
        except NumericFailure:
            continue
    if not results:
        raise NumericFailure("tuning: no restart found stabilizing weights")
    best = min(results, key=lambda r: r.j_min)
    return TuningResult(**{**best.__dict__, "restart_costs": tuple(r.j_min for r in results)})
