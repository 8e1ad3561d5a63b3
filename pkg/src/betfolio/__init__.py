"""Betting portfolio strategies with a Monte-Carlo backtesting service.

The public surface re-exported here is the stable one: market containers,
the strategy suite with its risk wrappers, the simulation protocol, tuning,
and the dataset tools. The solver kernel and service layer stay importable
under their own modules (`betfolio.solver`, `betfolio.service`).
"""

from __future__ import annotations

from .data_io import (
    SyntheticConfig,
    generate_synthetic,
    parse_csv,
    preset_config,
    write_csv,
)
from .errors import (
    BetfolioError,
    EmptyAmbiguitySet,
    EmptySplit,
    InfeasibleConstraint,
    NonFiniteObjective,
    SchemaError,
    WorldLimitExceeded,
    ZeroProbability,
)
from .market import (
    MatchRecord,
    OddsMatrix,
    RoundSlate,
    build_odds_matrix,
    expected_unit_profits,
    implied_probs,
    margin,
)
from .simulation import (
    ProtocolConfig,
    SimulationResult,
    compute_stats,
    monte_carlo,
    run_trajectory,
    settle_round,
)
from .strategies import (
    Portfolio,
    StrategyConfig,
    abs_disc,
    apply_fraction,
    apply_max_limit,
    kelly,
    kelly_drawdown,
    kelly_dro,
    kelly_quadratic,
    max_ev_frac,
    max_sharpe,
    mpt,
    named_config,
    run_strategy,
    strategy_names,
)
from .tuning import GridSpec, SelectionResult, grid_search, split

__version__ = "0.1.0"

__all__ = [
    "BetfolioError",
    "EmptyAmbiguitySet",
    "EmptySplit",
    "GridSpec",
    "InfeasibleConstraint",
    "MatchRecord",
    "NonFiniteObjective",
    "OddsMatrix",
    "Portfolio",
    "ProtocolConfig",
    "RoundSlate",
    "SchemaError",
    "SelectionResult",
    "SimulationResult",
    "StrategyConfig",
    "SyntheticConfig",
    "WorldLimitExceeded",
    "ZeroProbability",
    "abs_disc",
    "apply_fraction",
    "apply_max_limit",
    "build_odds_matrix",
    "compute_stats",
    "expected_unit_profits",
    "generate_synthetic",
    "grid_search",
    "implied_probs",
    "kelly",
    "kelly_drawdown",
    "kelly_dro",
    "kelly_quadratic",
    "margin",
    "max_ev_frac",
    "max_sharpe",
    "monte_carlo",
    "mpt",
    "named_config",
    "parse_csv",
    "preset_config",
    "run_strategy",
    "run_trajectory",
    "settle_round",
    "split",
    "strategy_names",
    "write_csv",
    "__version__",
]
