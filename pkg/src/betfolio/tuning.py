"""Hyperparameter selection: chronological splitting and grid search.

Risk parameters are tuned on the earliest part of a match history and
evaluated on the rest, never the other way around. The grid search scores
every candidate with the Monte-Carlo protocol and picks the highest median
final wealth among candidates whose 5th-percentile wealth stays above 90%
of the bankroll; the quantile bar filters out configurations that only look
good because their losses are rare in the median run. Ties go to the more
conservative parameters. When nothing clears the bar the search still
returns the candidate with the best quantile, marked infeasible, so callers
can report the failure instead of crashing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySplit
from .market import MatchRecord
from .simulation import PortfolioCache, ProtocolConfig, monte_carlo
from .solver import SolveSettings
from .strategies import StrategyConfig, named_config, strategy_axes

Q5_SOURCES = ("final", "min_wealth")


def split(
    matches: Iterable[MatchRecord],
    train_fraction: float = 0.5,
    seed: int | None = None,
) -> tuple[list[MatchRecord], list[MatchRecord]]:
    """Split a chronological match list into train and test by whole rounds.

    The first ``floor(train_fraction * n_rounds)`` rounds become the training
    side. Rounds are never divided. ``seed`` is accepted so splitters are
    interchangeable, but this one is deterministic and ignores it: tuning
    must only ever see data from before the evaluation period.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train fraction must lie in (0, 1), got {train_fraction!r}")
    matches = list(matches)
    round_order: list[str] = []
    seen: set[str] = set()
    for match in matches:
        if match.round_id not in seen:
            seen.add(match.round_id)
            round_order.append(match.round_id)
    n_train = int(math.floor(train_fraction * len(round_order) + 1e-9))
    if n_train < 1 or n_train >= len(round_order):
        raise EmptySplit(
            f"{len(round_order)} rounds at fraction {train_fraction} leave an empty side"
        )
    train_ids = set(round_order[:n_train])
    train = [m for m in matches if m.round_id in train_ids]
    test = [m for m in matches if m.round_id not in train_ids]
    return train, test


def nearest_rank(values: np.ndarray | Sequence[float], q: float) -> float:
    """Nearest-rank quantile: the ceil(q n)-th smallest value."""
    if not 0.0 < q <= 1.0:
        raise ValueError(f"quantile must lie in (0, 1], got {q!r}")
    ordered = np.sort(np.asarray(values, dtype=float))
    if ordered.size == 0:
        raise ValueError("no values to take a quantile of")
    rank = max(1, int(math.ceil(q * ordered.size - 1e-9)))
    return float(ordered[rank - 1])


@dataclass(frozen=True)
class GridSpec:
    """Candidate values per tunable parameter.

    ``grid_for`` turns these into the cartesian product over the axes a
    named strategy actually exposes, in axis order with each axis ascending,
    which also fixes the tie-breaking order of the search.
    """

    omega: tuple[float, ...] = tuple(round(0.05 * i, 2) for i in range(1, 21))
    max_limit: tuple[float, ...] = (0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0)
    gamma: tuple[float, ...] = (0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0)
    alpha: tuple[float, ...] = (0.5, 0.6, 0.7, 0.8, 0.9)
    beta: tuple[float, ...] = (0.01, 0.05, 0.1, 0.2)
    eta: tuple[float, ...] = (0.05, 0.1, 0.2, 0.3)

    def grid_for(self, name: str) -> list[dict[str, float]]:
        axes = strategy_axes(name)
        if not axes:
            return [{}]
        pools = [getattr(self, axis) for axis in axes]
        return [dict(zip(axes, combo)) for combo in itertools.product(*pools)]


@dataclass(frozen=True)
class CandidateScore:
    """One grid candidate's evaluation, a row of the selection table."""

    params: tuple[tuple[str, float], ...]
    median_final: float
    q5: float
    feasible: bool


@dataclass(frozen=True)
class SelectionResult:
    """The chosen configuration plus the full scored table behind it."""

    name: str
    config: StrategyConfig
    config_params: tuple[tuple[str, float], ...]
    median_final: float
    q5: float
    feasible: bool
    table: tuple[CandidateScore, ...]


def grid_search(
    name: str,
    matches: Iterable[MatchRecord],
    protocol: ProtocolConfig,
    grid: GridSpec | None = None,
    settings: SolveSettings | None = None,
    cache: PortfolioCache | None = None,
    q5_source: str = "final",
) -> SelectionResult:
    """Pick a named strategy's parameters by constrained grid search.

    Feasible candidates keep their 5th-percentile wealth strictly above 90%
    of the starting bankroll; among them the highest median final wealth
    wins, ties broken toward the lexicographically smallest parameters in
    axis order (so smaller omega, then smaller cap). ``q5_source`` selects
    what the quantile is taken over: final wealths (default) or each run's
    running minimum (stricter).
    """
    if q5_source not in Q5_SOURCES:
        raise ValueError(f"q5 source must be one of {Q5_SOURCES}, got {q5_source!r}")
    grid = grid if grid is not None else GridSpec()
    cache = cache if cache is not None else PortfolioCache(settings)
    matches = list(matches)
    threshold = 0.9 * protocol.initial_wealth

    table: list[CandidateScore] = []
    scored: list[tuple[CandidateScore, StrategyConfig, tuple[float, ...]]] = []
    for params in grid.grid_for(name):
        config = named_config(name, **params)
        result = monte_carlo(config, matches, protocol, settings=settings, cache=cache)
        finals = result.final_wealths
        source = finals if q5_source == "final" else result.min_wealths
        q5 = nearest_rank(source, 0.05)
        score = CandidateScore(
            params=tuple(params.items()),
            median_final=float(np.median(finals)),
            q5=q5,
            feasible=q5 > threshold,
        )
        table.append(score)
        scored.append((score, config, tuple(params.values())))

    feasible = [entry for entry in scored if entry[0].feasible]
    if feasible:
        best = min(feasible, key=lambda e: (-e[0].median_final, e[2]))
    else:
        best = min(scored, key=lambda e: (-e[0].q5, e[2]))
    score, config, _ = best
    return SelectionResult(
        name=name,
        config=config,
        config_params=score.params,
        median_final=score.median_final,
        q5=score.q5,
        feasible=score.feasible,
        table=tuple(table),
    )
