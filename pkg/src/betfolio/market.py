"""Market primitives: odds, outcome probabilities, and joint payoff matrices.

Conventions used throughout the package:

* Odds are decimal (European). A one-unit stake on outcome ``i`` returns
  ``odds[i]`` units when the outcome realizes and nothing otherwise, so the
  net profit per unit is ``odds[i] - 1`` on a win and ``-1`` on a loss.
* The bookmaker's take is measured by the margin ``(sum(1/odds) - 1) /
  sum(1/odds)``. Odds with ``sum(1/odds) > 1`` are subfair (the usual case),
  ``== 1`` fair, ``< 1`` superfair (an arbitrage opportunity).
* A betting opportunity is a *slate*: one or more matches offered at the same
  time. Assets are every (match, outcome) pair in slate order, plus a cash
  asset in the last column that always pays 1. Portfolios are fractions of
  current wealth over these assets.
* Joint outcomes of a slate are called *worlds*. Matches are assumed
  independent, so a world's probability is the product of the per-match
  outcome probabilities. Worlds are enumerated in mixed-radix order with the
  first match as the most significant digit (the last match varies fastest),
  and the number of worlds is capped by an explicit limit because it grows as
  the product of the per-match outcome counts.

Probability vectors must sum to 1 within 1e-9. Validation happens at
construction time so downstream code can assume well-formed inputs.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import WorldLimitExceeded, ZeroProbability

PROB_SUM_TOL = 1e-9
DEFAULT_WORLD_LIMIT = 65_536

#: Label used for the cash column in asset label tuples.
CASH_LABEL = "cash"


def _freeze(values: Sequence[float] | np.ndarray) -> np.ndarray:
    out = np.asarray(values, dtype=float)
    out.setflags(write=False)
    return out


@dataclasses.dataclass(frozen=True, eq=False)
class OutcomeProbs:
    """Probability distribution over one match's outcomes.

    Entries must be nonnegative and sum to 1 within ``PROB_SUM_TOL``. Exact
    zeros are allowed (a degenerate forecast is a valid forecast).
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        values = _freeze(self.values)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("probabilities must be a non-empty 1-d vector")
        if not np.all(np.isfinite(values)) or np.any(values < 0.0):
            raise ValueError("probabilities must be finite and nonnegative")
        if abs(float(values.sum()) - 1.0) > PROB_SUM_TOL:
            raise ValueError(
                f"probabilities sum to {values.sum()!r}, expected 1 within {PROB_SUM_TOL}"
            )
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OutcomeProbs):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclasses.dataclass(frozen=True, eq=False)
class OddsVector:
    """Decimal odds offered for one match.

    Entries must be finite and at least 1.0 (an odds quote below 1 would pay
    back less than the stake on a win). A match has at least two outcomes.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        values = _freeze(self.values)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("odds must be a 1-d vector with at least two outcomes")
        if not np.all(np.isfinite(values)):
            raise ValueError("odds must be finite")
        if np.any(values < 1.0):
            raise ValueError(f"odds must be >= 1.0, got {values.min()!r}")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OddsVector):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclasses.dataclass(frozen=True, eq=False)
class MatchRecord:
    """One match: identifiers, the odds offered, a forecast, and the result.

    ``result_index`` is the 0-based index of the outcome that realized.
    """

    match_id: str
    round_id: str
    odds: OddsVector
    player_probs: OutcomeProbs
    result_index: int

    def __post_init__(self) -> None:
        if len(self.odds) != len(self.player_probs):
            raise ValueError(
                f"match {self.match_id}: odds ({len(self.odds)}) and probabilities "
                f"({len(self.player_probs)}) must cover the same outcomes"
            )
        if not 0 <= self.result_index < len(self.odds):
            raise ValueError(
                f"match {self.match_id}: result index {self.result_index} out of range"
            )

    @property
    def n_outcomes(self) -> int:
        return len(self.odds)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatchRecord):
            return NotImplemented
        return (
            self.match_id == other.match_id
            and self.round_id == other.round_id
            and self.odds == other.odds
            and self.player_probs == other.player_probs
            and self.result_index == other.result_index
        )


@dataclasses.dataclass(frozen=True, eq=False)
class RoundSlate:
    """The matches offered in one betting round, in a fixed order."""

    matches: tuple[MatchRecord, ...]

    def __post_init__(self) -> None:
        matches = tuple(self.matches)
        if not matches:
            raise ValueError("a round must contain at least one match")
        round_id = matches[0].round_id
        for m in matches[1:]:
            if m.round_id != round_id:
                raise ValueError(
                    f"matches {matches[0].match_id} and {m.match_id} belong to "
                    f"different rounds ({round_id!r} vs {m.round_id!r})"
                )
        object.__setattr__(self, "matches", matches)

    @property
    def round_id(self) -> str:
        return self.matches[0].round_id

    @property
    def n_matches(self) -> int:
        return len(self.matches)


@dataclasses.dataclass(frozen=True, eq=False)
class OddsMatrix:
    """Joint payoff matrix of a slate.

    ``payoff`` has one row per world and one column per asset; entry (w, a)
    is the gross return of one unit on asset ``a`` in world ``w``. The last
    column is cash and is identically 1. ``world_probs`` are the joint world
    probabilities. ``asset_labels`` maps column index to ``(match_id,
    outcome_index)`` for risky assets and to ``CASH_LABEL`` for cash.
    """

    payoff: np.ndarray
    world_probs: np.ndarray
    asset_labels: tuple[object, ...]

    def __post_init__(self) -> None:
        payoff = _freeze(self.payoff)
        probs = _freeze(self.world_probs)
        if payoff.ndim != 2:
            raise ValueError("payoff must be a 2-d matrix")
        k, n = payoff.shape
        if probs.shape != (k,):
            raise ValueError("world_probs length must match the payoff row count")
        if len(self.asset_labels) != n:
            raise ValueError("asset_labels length must match the payoff column count")
        if np.any(payoff < 0.0):
            raise ValueError("payoff entries must be nonnegative")
        if not np.all(payoff[:, -1] == 1.0):
            raise ValueError("the last payoff column (cash) must be all ones")
        if np.any(probs < 0.0) or abs(float(probs.sum()) - 1.0) > PROB_SUM_TOL:
            raise ValueError("world probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "payoff", payoff)
        object.__setattr__(self, "world_probs", probs)
        object.__setattr__(self, "asset_labels", tuple(self.asset_labels))

    @property
    def n_worlds(self) -> int:
        return self.payoff.shape[0]

    @property
    def n_assets(self) -> int:
        return self.payoff.shape[1]

    @property
    def n_matches(self) -> int:
        return len({label[0] for label in self.asset_labels[:-1]})


@dataclasses.dataclass(frozen=True, eq=False)
class ExcessOddsMatrix:
    """Net profit matrix: the payoff matrix minus 1 entrywise.

    Rows are per-world net profits of a one-unit stake per asset; the cash
    column is identically zero. Losing entries are -1 (the stake is gone).
    """

    payoff: np.ndarray

    def __post_init__(self) -> None:
        payoff = _freeze(self.payoff)
        if payoff.ndim != 2:
            raise ValueError("payoff must be a 2-d matrix")
        if not np.all(payoff[:, -1] == 0.0):
            raise ValueError("the last column (cash) must be all zeros")
        object.__setattr__(self, "payoff", payoff)


def implied_probs(odds: OddsVector | np.ndarray) -> tuple[np.ndarray, str]:
    """Bookmaker probabilities implied by odds, with a fairness classification.

    Inverse odds are proportionally normalized to sum to 1, which removes the
    margin. The classification compares ``sum(1/odds)`` against 1 within 1e-9:
    above is "subfair", below "superfair", equal "fair".
    """
    values = odds.values if isinstance(odds, OddsVector) else np.asarray(odds, dtype=float)
    raw = 1.0 / values
    total = float(raw.sum())
    if total > 1.0 + 1e-9:
        kind = "subfair"
    elif total < 1.0 - 1e-9:
        kind = "superfair"
    else:
        kind = "fair"
    return raw / total, kind


def margin(odds: OddsVector | np.ndarray) -> float:
    """Bookmaker margin ``(sum(1/odds) - 1) / sum(1/odds)``.

    Zero for fair odds, positive for subfair, negative for superfair.
    """
    values = odds.values if isinstance(odds, OddsVector) else np.asarray(odds, dtype=float)
    total = float((1.0 / values).sum())
    return (total - 1.0) / total


def expected_unit_profits(probs: OutcomeProbs | np.ndarray, odds: OddsVector | np.ndarray) -> np.ndarray:
    """Expected net profit ``p*o - 1`` of a one-unit stake on each outcome."""
    p = probs.values if isinstance(probs, OutcomeProbs) else np.asarray(probs, dtype=float)
    o = odds.values if isinstance(odds, OddsVector) else np.asarray(odds, dtype=float)
    return p * o - 1.0


def _world_strides(counts: Sequence[int]) -> list[int]:
    # Mixed-radix strides, last match least significant.
    strides = [1] * len(counts)
    for m in range(len(counts) - 2, -1, -1):
        strides[m] = strides[m + 1] * counts[m + 1]
    return strides


def build_odds_matrix(
    slate: RoundSlate, world_limit: int = DEFAULT_WORLD_LIMIT
) -> tuple[OddsMatrix, ExcessOddsMatrix]:
    """Enumerate a slate's joint worlds into payoff and net-profit matrices.

    Worlds are ordered mixed-radix with the first match most significant.
    World probabilities multiply the per-match forecast probabilities
    (independence across matches). Raises :class:`WorldLimitExceeded` when the
    joint outcome count would exceed ``world_limit``; the caller must then
    fall back to a per-match treatment.
    """
    counts = [m.n_outcomes for m in slate.matches]
    k = math.prod(counts)
    if k > world_limit:
        raise WorldLimitExceeded(
            f"slate {slate.round_id!r} has {k} joint outcomes, limit is {world_limit}"
        )
    strides = _world_strides(counts)
    n = sum(counts) + 1
    payoff = np.zeros((k, n))
    world_probs = np.ones(k)
    labels: list[object] = []
    world_ids = np.arange(k)
    col = 0
    for match, count, stride in zip(slate.matches, counts, strides):
        outcome_of_world = (world_ids // stride) % count
        world_probs *= match.player_probs.values[outcome_of_world]
        for j in range(count):
            payoff[outcome_of_world == j, col] = match.odds.values[j]
            labels.append((match.match_id, j))
            col += 1
    payoff[:, -1] = 1.0
    labels.append(CASH_LABEL)
    odds_matrix = OddsMatrix(payoff=payoff, world_probs=world_probs, asset_labels=tuple(labels))
    excess = payoff - 1.0
    excess[:, -1] = 0.0
    return odds_matrix, ExcessOddsMatrix(payoff=excess)


def realized_world_index(slate: RoundSlate) -> int:
    """Index of the world that actually realized, in enumeration order."""
    counts = [m.n_outcomes for m in slate.matches]
    strides = _world_strides(counts)
    return sum(m.result_index * s for m, s in zip(slate.matches, strides))


def realized_payoff_row(slate: RoundSlate) -> np.ndarray:
    """The realized world's payoff row, assembled without joint enumeration.

    Equals ``build_odds_matrix(slate)[0].payoff[realized_world_index(slate)]``
    but costs O(assets) regardless of how many joint worlds the slate has, so
    settlement never hits the world limit.
    """
    n = sum(m.n_outcomes for m in slate.matches) + 1
    row = np.zeros(n)
    col = 0
    for match in slate.matches:
        row[col + match.result_index] = match.odds.values[match.result_index]
        col += match.n_outcomes
    row[-1] = 1.0
    return row


def kl_advantage(records: Iterable[MatchRecord]) -> float:
    """Mean log-score edge of the forecaster over the margin-free bookmaker.

    For each record this takes ``log p_forecast(result) - log p_book(result)``
    where the bookmaker probabilities are proportionally normalized inverse
    odds, then averages over records. Positive means the forecasts carry more
    information about realized results than the odds do.

    Raises :class:`ZeroProbability` when a forecast assigns zero probability
    to an outcome that realized.
    """
    total = 0.0
    count = 0
    for record in records:
        p_player = float(record.player_probs.values[record.result_index])
        if p_player <= 0.0:
            raise ZeroProbability(
                f"match {record.match_id}: forecast probability of the realized "
                f"outcome is zero"
            )
        book, _ = implied_probs(record.odds)
        total += math.log(p_player) - math.log(float(book[record.result_index]))
        count += 1
    if count == 0:
        raise ValueError("kl_advantage needs at least one record")
    return total / count
