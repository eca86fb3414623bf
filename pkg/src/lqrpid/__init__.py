"""LQR-based analog/digital PID tuning with GA-selected weights and fractional-order cost indices."""

from .analysis import RiccatiComparison, compare_riccati, cost_of_control, recommend_order
from .cloop import (
    Scenario,
    SimTrace,
    evaluate_quadratic_cost,
    simulate_continuous,
    simulate_discrete,
    simulate_state_feedback,
)
from .costfn import CostSpec, cost_trajectory, fractional_cost
from .errors import (
    ConfigError,
    ConvergenceError,
    LqrPidError,
    NotStabilizableError,
    NumericFailure,
    RiccatiError,
)
from .fracint import (
    OustaloupFilter,
    filter_frequency_response,
    oustaloup_fractional_integral,
    oustaloup_synthesize,
    rl_fractional_integral,
)
from .ga import (
    GaConfig,
    TuningResult,
    ga_optimize,
    gaussian_mutation,
    scattered_crossover,
    tune_pid,
    tune_pid_restarts,
)
from .pidmap import PidGains, discrete_control_step, gains_from_feedback
from .riccati import LqrWeights, RiccatiSolution, solve_care, solve_dare, symmetric_eigenvalues
from .ssmodel import (
    DiscretePlant,
    SecondOrderPlant,
    StateSpace,
    build_plant_state_space,
    discretize_zoh,
    map_poles_to_z,
)

__version__ = "0.1.0"
