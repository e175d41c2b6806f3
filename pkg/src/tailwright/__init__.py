"""Waiting-time distribution analysis for price-change event streams.

Ingests timestamped event files into per-pair waiting-time series, fits
candidate distributions (exponential, Weibull, lognormal, discrete power
law) by maximum likelihood, scores them with K-L divergence, K-S
statistics and cross-validated BIC, tests power-law tails with a
bootstrap procedure, and simulates comparable event streams with an
agent-based market game.
"""

from .distributions import (
    DiscretePowerLaw,
    Exponential,
    Lognormal,
    Weibull,
    fit_exponential,
    fit_lognormal,
    fit_powerlaw_alpha,
    fit_weibull,
    hurwitz_zeta,
)
from .elfarol import (
    GameConfig,
    GameState,
    SweepResult,
    init_game,
    kl_match,
    run_game,
    step,
    sweep,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateDataError,
    DomainError,
    EmptyInputError,
    InsufficientDataError,
    InsufficientTailError,
    ParseError,
    SchemaError,
    TailwrightError,
)
from .events import (
    EventSeries,
    WaitingTimes,
    mean_interval,
    parse_events,
    waiting_times,
    write_events,
)
from .goodness import (
    EmpiricalDist,
    ModelComparison,
    PowerLawFit,
    TabulatedMasses,
    asymptotic_ks_pvalue,
    bic,
    cross_validated_bic,
    dstar_statistic,
    empirical,
    kl_divergence,
    ks_statistic,
)
from .tailfit import fit_powerlaw, powerlaw_pvalue

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "EventSeries",
    "WaitingTimes",
    "parse_events",
    "write_events",
    "waiting_times",
    "mean_interval",
    "hurwitz_zeta",
    "Exponential",
    "Weibull",
    "Lognormal",
    "DiscretePowerLaw",
    "fit_exponential",
    "fit_weibull",
    "fit_lognormal",
    "fit_powerlaw_alpha",
    "EmpiricalDist",
    "TabulatedMasses",
    "PowerLawFit",
    "ModelComparison",
    "empirical",
    "kl_divergence",
    "ks_statistic",
    "dstar_statistic",
    "asymptotic_ks_pvalue",
    "bic",
    "cross_validated_bic",
    "fit_powerlaw",
    "powerlaw_pvalue",
    "GameConfig",
    "GameState",
    "SweepResult",
    "init_game",
    "step",
    "run_game",
    "sweep",
    "kl_match",
    "TailwrightError",
    "ParseError",
    "DomainError",
    "EmptyInputError",
    "InsufficientDataError",
    "InsufficientTailError",
    "DegenerateDataError",
    "ConvergenceError",
    "ConfigError",
    "SchemaError",
]
