"""Service operations, transport-free.

Each handler takes a request model and returns a response model. The HTTP
app routes to these; the CLI's default backend calls them directly, so a
command produces identical results whether or not a server sits in between.
"""

from __future__ import annotations

import inspect

import numpy as np

from .. import __version__
from ..data_io import generate_synthetic
from ..market import MatchRecord, RoundSlate
from ..plots import band_chart
from ..simulation import PortfolioCache, bands, compute_stats, monte_carlo
from ..strategies import run_strategy, strategy_axes, strategy_names, _REGISTRY
from ..tuning import GridSpec, grid_search, split
from .schemas import (
    BacktestRequest,
    BacktestResponse,
    BandsPayload,
    HealthResponse,
    MatchPayload,
    MetricsRow,
    PortfolioRequest,
    PortfolioResponse,
    ReportRequest,
    ReportResponse,
    SelectionRow,
    StrategyInfo,
    StrategySpec,
    SummaryPayload,
    SynthRequest,
    SynthResponse,
    TuneRequest,
    TuneResponse,
)


def handle_health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


def handle_strategies() -> list[StrategyInfo]:
    catalog = []
    for name in strategy_names():
        axes = strategy_axes(name)
        signature = inspect.signature(_REGISTRY[name])
        defaults = {
            axis: float(signature.parameters[axis].default) for axis in axes
        }
        catalog.append(StrategyInfo(name=name, axes=list(axes), defaults=defaults))
    return catalog


def handle_portfolio(request: PortfolioRequest) -> PortfolioResponse:
    records = [m.to_record() for m in request.matches]
    slate = RoundSlate(matches=tuple(records))
    config = request.strategy.to_config()
    kwargs = {}
    if request.world_limit is not None:
        kwargs["world_limit"] = request.world_limit
    portfolio = run_strategy(config, slate, **kwargs)
    labels = [f"{m.match_id}:{i + 1}" for m in records for i in range(m.n_outcomes)]
    labels.append("cash")
    return PortfolioResponse(
        labels=labels,
        fractions=[float(v) for v in portfolio.fractions],
        cash=float(portfolio.cash),
        risky_mass=float(portfolio.risky_mass),
    )


def handle_synth(request: SynthRequest) -> SynthResponse:
    records, summary = generate_synthetic(request.spec.to_config())
    return SynthResponse(
        records=[MatchPayload.from_record(r) for r in records],
        summary=SummaryPayload.from_summary(summary),
    )


def _load_records(dataset) -> list[MatchRecord]:
    if dataset.synthetic is not None:
        records, _ = generate_synthetic(dataset.synthetic.to_config())
        return records
    for payload in dataset.records:
        if payload.result is None:
            raise ValueError(
                f"match {payload.match_id!r} has no result; backtesting needs settled matches"
            )
    return [payload.to_record() for payload in dataset.records]


def _evaluate(label, config, matches, protocol, cache):
    result = monte_carlo(config, matches, protocol, cache=cache)
    stats = compute_stats(result)
    row = MetricsRow(
        strategy=label,
        median_wf=stats.median_final,
        mean_wf=stats.mean_final,
        min_wi=stats.min_wealth,
        max_wi=stats.max_wealth,
        sigma_wf=stats.sigma_final,
        ruin_pct=stats.ruin_pct,
    )
    levels = bands(result)
    payload = BandsPayload(
        strategy=label,
        t=list(range(levels.shape[1])),
        p5=[float(v) for v in levels[0]],
        p25=[float(v) for v in levels[1]],
        p50=[float(v) for v in levels[2]],
        p75=[float(v) for v in levels[3]],
        p95=[float(v) for v in levels[4]],
    )
    return row, payload


def handle_backtest(request: BacktestRequest) -> BacktestResponse:
    records = _load_records(request.dataset)
    _, test = split(records, request.train_fraction)
    protocol = request.protocol.to_config()
    cache = PortfolioCache()
    metrics, band_payloads = [], []
    for spec in request.strategies:
        row, payload = _evaluate(spec.label(), spec.to_config(), test, protocol, cache)
        metrics.append(row)
        band_payloads.append(payload)
    return BacktestResponse(metrics=metrics, bands=band_payloads)


def _grid_for(spec) -> GridSpec:
    if spec.grid is None:
        return GridSpec()
    axes = strategy_axes(spec.name)
    unknown = set(spec.grid) - set(axes)
    if unknown:
        raise ValueError(
            f"{spec.name} has no tunable parameters {sorted(unknown)}; axes are {list(axes)}"
        )
    return GridSpec(**{key: tuple(values) for key, values in spec.grid.items()})


def handle_tune(request: TuneRequest) -> TuneResponse:
    records = _load_records(request.dataset)
    train, test = split(records, request.train_fraction)
    protocol = request.protocol.to_config()
    cache = PortfolioCache()
    selection_rows = []
    chosen: list[tuple[str, object]] = []
    for spec in request.tuned:
        selection = grid_search(
            spec.name, train, protocol, grid=_grid_for(spec), cache=cache
        )
        params = dict(selection.config_params)
        selection_rows.append(
            SelectionRow(
                strategy=spec.name,
                params={k: float(v) for k, v in params.items()},
                train_median=selection.median_final,
                train_q5=selection.q5,
                feasible=selection.feasible,
            )
        )
        label = StrategySpec(name=spec.name, params=params).label()
        chosen.append((label, selection.config))
    for spec in request.fixed:
        chosen.append((spec.label(), spec.to_config()))
    metrics, band_payloads = [], []
    for label, config in chosen:
        row, payload = _evaluate(label, config, test, protocol, cache)
        metrics.append(row)
        band_payloads.append(payload)
    return TuneResponse(selection=selection_rows, metrics=metrics, bands=band_payloads)


def handle_report(request: ReportRequest) -> ReportResponse:
    svg = band_chart(
        t=np.asarray(request.t, dtype=float),
        p5=np.asarray(request.p5, dtype=float),
        p25=np.asarray(request.p25, dtype=float),
        p50=np.asarray(request.p50, dtype=float),
        p75=np.asarray(request.p75, dtype=float),
        p95=np.asarray(request.p95, dtype=float),
        title=request.strategy,
    )
    return ReportResponse(strategy=request.strategy, svg=svg)
