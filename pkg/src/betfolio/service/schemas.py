"""Request and response models for the betting-portfolio service.

These models are the wire format of the HTTP API and, unchanged, the
argument and return types of the in-process handlers the CLI uses by
default. Conversion helpers to and from the core dataclasses live on the
models so both transports share one code path.
"""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..data_io import DatasetSummary, SyntheticConfig, _PRESETS
from ..market import MatchRecord, OddsVector, OutcomeProbs
from ..simulation import ProtocolConfig
from ..strategies import StrategyConfig, named_config


class MatchPayload(BaseModel):
    """One match on the wire; ``result`` is 1-based and optional so that
    allocation requests can describe matches that have not been played."""

    match_id: str
    round_id: str
    odds: list[float]
    probs: list[float]
    result: int | None = None

    @classmethod
    def from_record(cls, record: MatchRecord) -> "MatchPayload":
        return cls(
            match_id=record.match_id,
            round_id=record.round_id,
            odds=[float(v) for v in record.odds.values],
            probs=[float(v) for v in record.player_probs.values],
            result=record.result_index + 1,
        )

    def to_record(self) -> MatchRecord:
        result_index = 0 if self.result is None else self.result - 1
        return MatchRecord(
            match_id=self.match_id,
            round_id=self.round_id,
            odds=OddsVector(np.asarray(self.odds, dtype=float)),
            player_probs=OutcomeProbs(np.asarray(self.probs, dtype=float)),
            result_index=result_index,
        )


class StrategySpec(BaseModel):
    """A strategy by catalog name plus fixed hyperparameter overrides."""

    name: str
    params: dict[str, float] = Field(default_factory=dict)

    def to_config(self) -> StrategyConfig:
        return named_config(self.name, **self.params)

    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.name}({inner})"


class TuneStrategySpec(BaseModel):
    """A strategy to tune. ``grid`` maps hyperparameter names to candidate
    values; leaving it out selects the default sweep for every tunable
    hyperparameter the strategy exposes. An explicitly empty grid or an
    empty candidate list is a usage error, caught in validation."""

    name: str
    grid: dict[str, list[float]] | None = None

    @model_validator(mode="after")
    def _non_empty_grid(self) -> "TuneStrategySpec":
        if self.grid is not None:
            if not self.grid:
                raise ValueError(f"empty grid for strategy {self.name!r}")
            for key, values in self.grid.items():
                if not values:
                    raise ValueError(f"empty candidate list for {self.name!r}.{key}")
        return self


class ProtocolPayload(BaseModel):
    """Evaluation protocol knobs, mirroring the simulation defaults."""

    runs: int = 1000
    drop_fraction: float = 0.10
    group_size: int = 10
    initial_wealth: float = 1.0
    ruin_fraction: float = 1e-4
    master_seed: int = 0
    reshuffle: bool = True

    def to_config(self) -> ProtocolConfig:
        return ProtocolConfig(
            runs=self.runs,
            drop_fraction=self.drop_fraction,
            group_size=self.group_size,
            initial_wealth=self.initial_wealth,
            ruin_fraction=self.ruin_fraction,
            master_seed=self.master_seed,
            reshuffle=self.reshuffle,
        )


class SynthSpec(BaseModel):
    """Synthetic dataset specification: a preset, explicit generator
    parameters, or a preset with field overrides (explicit fields win)."""

    preset: str | None = None
    matches: int | None = None
    outcomes: int | tuple[int, int] | None = None
    margin: float | None = None
    book_noise: float | None = None
    player_noise: float | None = None
    book_floor: float | None = None
    seed: int = 0

    def to_config(self) -> SyntheticConfig:
        if self.preset is not None:
            if self.preset not in _PRESETS:
                raise ValueError(f"unknown preset {self.preset!r}, have {sorted(_PRESETS)}")
            params = dict(_PRESETS[self.preset])
        else:
            params = dict(matches=5000)
        for field in ("matches", "outcomes", "margin", "book_noise", "player_noise", "book_floor"):
            value = getattr(self, field)
            if value is not None:
                params[field] = value
        if isinstance(params.get("outcomes"), list):
            params["outcomes"] = tuple(params["outcomes"])
        return SyntheticConfig(seed=self.seed, preset=self.preset, **params)


class DatasetPayload(BaseModel):
    """Either inline match records or a synthetic specification."""

    records: list[MatchPayload] | None = None
    synthetic: SynthSpec | None = None

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "DatasetPayload":
        if (self.records is None) == (self.synthetic is None):
            raise ValueError("provide exactly one of records or synthetic")
        return self


class SummaryPayload(BaseModel):
    size: int
    player_accuracy: float
    book_accuracy: float
    outcome_range: tuple[int, int]
    odds_range: tuple[float, float]
    mean_margin: float
    kl_advantage: float

    @classmethod
    def from_summary(cls, s: DatasetSummary) -> "SummaryPayload":
        return cls(
            size=s.size,
            player_accuracy=s.player_accuracy,
            book_accuracy=s.book_accuracy,
            outcome_range=s.outcome_range,
            odds_range=s.odds_range,
            mean_margin=s.mean_margin,
            kl_advantage=s.kl_advantage,
        )

    def to_summary(self) -> DatasetSummary:
        return DatasetSummary(
            size=self.size,
            player_accuracy=self.player_accuracy,
            book_accuracy=self.book_accuracy,
            outcome_range=self.outcome_range,
            odds_range=self.odds_range,
            mean_margin=self.mean_margin,
            kl_advantage=self.kl_advantage,
        )


# -- requests ---------------------------------------------------------------


class PortfolioRequest(BaseModel):
    matches: list[MatchPayload]
    strategy: StrategySpec
    world_limit: int | None = None

    @model_validator(mode="after")
    def _non_empty(self) -> "PortfolioRequest":
        if not self.matches:
            raise ValueError("at least one match is required")
        return self


class SynthRequest(BaseModel):
    spec: SynthSpec


class BacktestRequest(BaseModel):
    dataset: DatasetPayload
    strategies: list[StrategySpec]
    protocol: ProtocolPayload = Field(default_factory=ProtocolPayload)
    train_fraction: float = 0.5

    @model_validator(mode="after")
    def _non_empty(self) -> "BacktestRequest":
        if not self.strategies:
            raise ValueError("at least one strategy is required")
        return self


class TuneRequest(BaseModel):
    dataset: DatasetPayload
    tuned: list[TuneStrategySpec]
    fixed: list[StrategySpec] = Field(default_factory=list)
    protocol: ProtocolPayload = Field(default_factory=ProtocolPayload)
    train_fraction: float = 0.5

    @model_validator(mode="after")
    def _non_empty(self) -> "TuneRequest":
        if not self.tuned:
            raise ValueError("at least one strategy with a grid is required")
        return self


class ReportRequest(BaseModel):
    strategy: str
    t: list[float]
    p5: list[float]
    p25: list[float]
    p50: list[float]
    p75: list[float]
    p95: list[float]


# -- responses --------------------------------------------------------------


class PortfolioResponse(BaseModel):
    labels: list[str]
    fractions: list[float]
    cash: float
    risky_mass: float


class SynthResponse(BaseModel):
    records: list[MatchPayload]
    summary: SummaryPayload


class MetricsRow(BaseModel):
    strategy: str
    median_wf: float
    mean_wf: float
    min_wi: float
    max_wi: float
    sigma_wf: float
    ruin_pct: float


class BandsPayload(BaseModel):
    strategy: str
    t: list[int]
    p5: list[float]
    p25: list[float]
    p50: list[float]
    p75: list[float]
    p95: list[float]


class BacktestResponse(BaseModel):
    metrics: list[MetricsRow]
    bands: list[BandsPayload]


class SelectionRow(BaseModel):
    strategy: str
    params: dict[str, float]
    train_median: float
    train_q5: float
    feasible: bool


class TuneResponse(BaseModel):
    selection: list[SelectionRow]
    metrics: list[MetricsRow]
    bands: list[BandsPayload]


class ReportResponse(BaseModel):
    strategy: str
    svg: str


class StrategyInfo(BaseModel):
    name: str
    axes: list[str]
    defaults: dict[str, float]


class HealthResponse(BaseModel):
    status: str
    version: str
