"""Wealth trajectories and the Monte-Carlo evaluation protocol.

A strategy is evaluated by rerunning it many times over randomized
reorderings of a match history: each run drops a fixed fraction of the
matches, shuffles the rest, regroups them into betting rounds of a fixed
size, and compounds wealth through the rounds. A bankroll that falls below
a small fraction of its starting value is ruined: betting stops and the
wealth curve stays flat from there, so ruin is visible in every statistic
rather than being erased by a later lucky streak.

Solving a portfolio is far more expensive than settling it, and the same
strategy meets the same match group many times across runs (always, when
groups are single matches), so solved portfolios and realized multipliers
are memoized in a :class:`PortfolioCache` that can be shared across calls,
including across the configurations of a tuning sweep.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .market import MatchRecord, RoundSlate, realized_payoff_row
from .solver import SolveSettings
from .strategies import Portfolio, StrategyConfig, run_strategy

_REGROUPED_ROUND_ID = "regrouped"


@dataclass(frozen=True)
class ProtocolConfig:
    """Parameters of the randomized evaluation protocol."""

    runs: int = 1000
    drop_fraction: float = 0.10
    group_size: int = 10
    initial_wealth: float = 1.0
    ruin_fraction: float = 1e-4
    master_seed: int = 0
    reshuffle: bool = True

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ValueError(f"need at least one run, got {self.runs!r}")
        if not 0.0 <= self.drop_fraction < 1.0:
            raise ValueError(f"drop fraction must lie in [0, 1), got {self.drop_fraction!r}")
        if self.group_size < 1:
            raise ValueError(f"group size must be positive, got {self.group_size!r}")
        if not (math.isfinite(self.initial_wealth) and self.initial_wealth > 0.0):
            raise ValueError(f"initial wealth must be positive, got {self.initial_wealth!r}")
        if not 0.0 <= self.ruin_fraction < 1.0:
            raise ValueError(f"ruin fraction must lie in [0, 1), got {self.ruin_fraction!r}")


@dataclass(frozen=True)
class SimulationResult:
    """Wealth paths of all runs; column 0 is the starting wealth."""

    wealth_paths: np.ndarray
    ruined: np.ndarray
    protocol: ProtocolConfig

    @property
    def final_wealths(self) -> np.ndarray:
        return self.wealth_paths[:, -1]

    @property
    def min_wealths(self) -> np.ndarray:
        return self.wealth_paths.min(axis=1)


def settle_round(portfolio: Portfolio, slate: RoundSlate) -> float:
    """Wealth multiplier of a portfolio given the slate's actual results."""
    return float(realized_payoff_row(slate) @ portfolio.fractions)


def _as_round(matches: tuple[MatchRecord, ...]) -> RoundSlate:
    """A betting round from arbitrary matches, regrouping across rounds."""
    first_round = matches[0].round_id
    if all(m.round_id == first_round for m in matches):
        return RoundSlate(matches=matches)
    return RoundSlate(
        matches=tuple(
            dataclasses.replace(m, round_id=_REGROUPED_ROUND_ID) for m in matches
        )
    )


class PortfolioCache:
    """Memoizes solved portfolios and realized multipliers.

    Portfolios are cached before the post-hoc wrappers, keyed by the
    wrapper-free configuration and the match ids of the group, so a tuning
    sweep over fraction or cap values reuses one solver call per group.
    Multipliers are cached per full configuration. Keys assume match ids
    identify match content, which holds within one dataset; use one cache
    per dataset.
    """

    def __init__(self, settings: SolveSettings | None = None) -> None:
        self._settings = settings
        self._base_portfolios: dict = {}
        self._multipliers: dict = {}

    def portfolio(
        self, config: StrategyConfig, matches: tuple[MatchRecord, ...]
    ) -> Portfolio:
        ids = tuple(m.match_id for m in matches)
        base_config = (
            dataclasses.replace(config, wrappers=()) if config.wrappers else config
        )
        base_key = (base_config, ids)
        base = self._base_portfolios.get(base_key)
        if base is None:
            base = run_strategy(base_config, _as_round(matches), settings=self._settings)
            self._base_portfolios[base_key] = base
        portfolio = base
        for wrapper in config.wrappers:
            portfolio = wrapper.apply(portfolio)
        return portfolio

    def multiplier(
        self, config: StrategyConfig, matches: tuple[MatchRecord, ...]
    ) -> float:
        key = (config, tuple(m.match_id for m in matches))
        cached = self._multipliers.get(key)
        if cached is not None:
            return cached
        portfolio = self.portfolio(config, matches)
        value = settle_round(portfolio, _as_round(matches))
        self._multipliers[key] = value
        return value


def run_trajectory(
    config: StrategyConfig,
    slates: Sequence[RoundSlate],
    protocol: ProtocolConfig,
    cache: PortfolioCache | None = None,
    settings: SolveSettings | None = None,
) -> tuple[np.ndarray, bool]:
    """One wealth path over the given rounds in the given order.

    Returns the path (length ``len(slates) + 1``, starting wealth first) and
    whether the bankroll was ruined along the way.
    """
    cache = cache if cache is not None else PortfolioCache(settings)
    wealth = protocol.initial_wealth
    threshold = protocol.ruin_fraction * protocol.initial_wealth
    path = np.empty(len(slates) + 1)
    path[0] = wealth
    ruined = False
    for t, slate in enumerate(slates):
        if not ruined:
            wealth *= cache.multiplier(config, slate.matches)
            if wealth < threshold:
                ruined = True
        path[t + 1] = wealth
    return path, ruined


def _kept_indices(
    rng: np.random.Generator, n: int, drop: int, reshuffle: bool
) -> np.ndarray:
    if reshuffle:
        return rng.permutation(n)[drop:]
    if drop == 0:
        return np.arange(n)
    dropped = rng.choice(n, size=drop, replace=False)
    return np.setdiff1d(np.arange(n), dropped)


def monte_carlo(
    config: StrategyConfig,
    matches: Iterable[MatchRecord],
    protocol: ProtocolConfig,
    settings: SolveSettings | None = None,
    cache: PortfolioCache | None = None,
) -> SimulationResult:
    """Evaluate a strategy under the randomized reordering protocol.

    Run ``r`` draws its randomness from ``master_seed + r``, so results are
    reproducible and runs can be compared across strategies bet for bet.
    """
    matches = list(matches)
    n = len(matches)
    if n == 0:
        raise ValueError("need at least one match to simulate")
    cache = cache if cache is not None else PortfolioCache(settings)
    drop = int(math.floor(protocol.drop_fraction * n + 1e-9))
    kept_count = n - drop
    n_groups = -(-kept_count // protocol.group_size)
    w0 = protocol.initial_wealth
    threshold = protocol.ruin_fraction * w0

    paths = np.empty((protocol.runs, n_groups + 1))
    ruined = np.zeros(protocol.runs, dtype=bool)

    single = protocol.group_size == 1
    if single:
        # One solver call per match covers every run; the per-run work is
        # then a gather plus a cumulative product.
        multipliers = np.array(
            [cache.multiplier(config, (m,)) for m in matches]
        )

    for r in range(protocol.runs):
        rng = np.random.default_rng(protocol.master_seed + r)
        kept = _kept_indices(rng, n, drop, protocol.reshuffle)
        paths[r, 0] = w0
        if single:
            path = w0 * np.cumprod(multipliers[kept])
            below = path < threshold
            if below.any():
                first = int(np.argmax(below))
                path[first:] = path[first]
                ruined[r] = True
            paths[r, 1:] = path
        else:
            wealth = w0
            flag = False
            for g in range(n_groups):
                if not flag:
                    idx = kept[g * protocol.group_size : (g + 1) * protocol.group_size]
                    group = tuple(matches[i] for i in idx)
                    wealth *= cache.multiplier(config, group)
                    if wealth < threshold:
                        flag = True
                paths[r, g + 1] = wealth
            ruined[r] = flag
    return SimulationResult(wealth_paths=paths, ruined=ruined, protocol=protocol)


@dataclass(frozen=True)
class SimStats:
    """Summary statistics of a simulation's wealth paths."""

    median_final: float
    mean_final: float
    min_wealth: float
    max_wealth: float
    sigma_final: float
    ruin_pct: float


def compute_stats(result: SimulationResult) -> SimStats:
    """Final-wealth and whole-path summary statistics over all runs."""
    finals = result.wealth_paths[:, -1]
    return SimStats(
        median_final=float(np.median(finals)),
        mean_final=float(finals.mean()),
        min_wealth=float(result.wealth_paths.min()),
        max_wealth=float(result.wealth_paths.max()),
        sigma_final=float(np.std(finals)),
        ruin_pct=float(100.0 * result.ruined.mean()),
    )


def bands(
    result: SimulationResult, percentiles: Sequence[float] = (5, 25, 50, 75, 95)
) -> np.ndarray:
    """Pointwise wealth percentiles across runs, one row per percentile."""
    return np.percentile(result.wealth_paths, list(percentiles), axis=0)
