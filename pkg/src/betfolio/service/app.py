"""FastAPI application exposing the portfolio and backtesting operations."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import BetfolioError
from . import handlers
from .schemas import (
    BacktestRequest,
    BacktestResponse,
    HealthResponse,
    PortfolioRequest,
    PortfolioResponse,
    ReportRequest,
    ReportResponse,
    StrategyInfo,
    SynthRequest,
    SynthResponse,
    TuneRequest,
    TuneResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="betfolio",
        version=__version__,
        description="Betting-portfolio construction and Monte-Carlo backtesting.",
    )

    @app.exception_handler(ValueError)
    @app.exception_handler(BetfolioError)
    async def _domain_error(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return handlers.handle_health()

    @app.get("/strategies", response_model=list[StrategyInfo])
    def strategies() -> list[StrategyInfo]:
        return handlers.handle_strategies()

    @app.post("/portfolio", response_model=PortfolioResponse)
    def portfolio(request: PortfolioRequest) -> PortfolioResponse:
        return handlers.handle_portfolio(request)

    @app.post("/datasets/synthetic", response_model=SynthResponse)
    def synthetic(request: SynthRequest) -> SynthResponse:
        return handlers.handle_synth(request)

    @app.post("/backtest", response_model=BacktestResponse)
    def backtest(request: BacktestRequest) -> BacktestResponse:
        return handlers.handle_backtest(request)

    @app.post("/tune", response_model=TuneResponse)
    def tune(request: TuneRequest) -> TuneResponse:
        return handlers.handle_tune(request)

    @app.post("/report/svg", response_model=ReportResponse)
    def report(request: ReportRequest) -> ReportResponse:
        return handlers.handle_report(request)

    return app
