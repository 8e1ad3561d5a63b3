"""Command-line client for dataset generation, backtesting, and tuning.

The CLI is a thin client over the service layer: every command assembles a
request model and hands it to a backend. The default backend calls the
service handlers in process; ``--server http://host:port`` sends the same
request to a running instance instead, and the outputs are identical either
way. ``serve`` starts that instance.

Commands write their tables as CSV into ``--out`` (atomically, temp file
plus rename) and are byte-for-byte deterministic given a seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from pathlib import Path

import httpx

from .data_io import PRESET_NAMES, parse_csv, write_csv, write_summary_csv
from .errors import BetfolioError, EmptySplit, SchemaError
from .service import create_app
from .service import handlers
from .service.schemas import (
    BacktestRequest,
    BacktestResponse,
    BandsPayload,
    DatasetPayload,
    MatchPayload,
    ProtocolPayload,
    ReportRequest,
    ReportResponse,
    StrategySpec,
    SynthRequest,
    SynthResponse,
    SynthSpec,
    TuneRequest,
    TuneResponse,
    TuneStrategySpec,
)

_FLOAT_FMT = ".12g"


class UsageError(ValueError):
    """Bad command-line input; exits with status 2."""


# ---------------------------------------------------------------------------
# backends


class LocalBackend:
    """Run the service handlers in this process."""

    def synth(self, request: SynthRequest) -> SynthResponse:
        return handlers.handle_synth(request)

    def backtest(self, request: BacktestRequest) -> BacktestResponse:
        return handlers.handle_backtest(request)

    def tune(self, request: TuneRequest) -> TuneResponse:
        return handlers.handle_tune(request)

    def report(self, request: ReportRequest) -> ReportResponse:
        return handlers.handle_report(request)


class HttpBackend:
    """Send requests to a running service; responses parse into the same
    models the local backend returns, so downstream code cannot tell the
    difference."""

    def __init__(self, base_url: str, client: httpx.Client | None = None) -> None:
        self._client = client or httpx.Client(base_url=base_url, timeout=600.0)

    def _post(self, path: str, request, response_type):
        response = self._client.post(path, json=request.model_dump(mode="json"))
        if response.status_code == 422:
            detail = response.json().get("detail", response.text)
            raise UsageError(f"server rejected the request: {detail}")
        response.raise_for_status()
        return response_type.model_validate(response.json())

    def synth(self, request: SynthRequest) -> SynthResponse:
        return self._post("/datasets/synthetic", request, SynthResponse)

    def backtest(self, request: BacktestRequest) -> BacktestResponse:
        return self._post("/backtest", request, BacktestResponse)

    def tune(self, request: TuneRequest) -> TuneResponse:
        return self._post("/tune", request, TuneResponse)

    def report(self, request: ReportRequest) -> ReportResponse:
        return self._post("/report/svg", request, ReportResponse)


def _backend(args) -> LocalBackend | HttpBackend:
    if getattr(args, "server", None):
        return HttpBackend(args.server)
    return LocalBackend()


# ---------------------------------------------------------------------------
# file output


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _render_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _fmt(value: float) -> str:
    return format(value, _FLOAT_FMT)


METRICS_COLUMNS = ["strategy", "median_wf", "mean_wf", "min_wi", "max_wi", "sigma_wf", "ruin_pct"]


def _write_metrics(metrics, out_dir: Path) -> Path:
    rows = [
        [
            m.strategy,
            _fmt(m.median_wf),
            _fmt(m.mean_wf),
            _fmt(m.min_wi),
            _fmt(m.max_wi),
            _fmt(m.sigma_wf),
            _fmt(m.ruin_pct),
        ]
        for m in metrics
    ]
    path = out_dir / "metrics.csv"
    _atomic_write(path, _render_csv(METRICS_COLUMNS, rows))
    return path


def _safe_label(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", label).strip("_")


def _write_bands(band: BandsPayload, out_dir: Path) -> Path:
    rows = [
        [t, _fmt(p5), _fmt(p25), _fmt(p50), _fmt(p75), _fmt(p95)]
        for t, p5, p25, p50, p75, p95 in zip(
            band.t, band.p5, band.p25, band.p50, band.p75, band.p95
        )
    ]
    path = out_dir / f"bands_{_safe_label(band.strategy)}.csv"
    _atomic_write(path, _render_csv(["t", "p5", "p25", "p50", "p75", "p95"], rows))
    return path


def _write_selection(selection, out_dir: Path) -> Path:
    rows = []
    for row in selection:
        params = ";".join(f"{k}={v:g}" for k, v in row.params.items())
        rows.append(
            [
                row.strategy,
                params,
                _fmt(row.train_median),
                _fmt(row.train_q5),
                "true" if row.feasible else "false",
            ]
        )
    path = out_dir / "selection.csv"
    _atomic_write(
        path, _render_csv(["strategy", "params", "train_median", "train_q5", "feasible"], rows)
    )
    return path


def _write_plots(bands_payloads, backend, out_dir: Path) -> list[Path]:
    paths = []
    for band in bands_payloads:
        request = ReportRequest(
            strategy=band.strategy,
            t=[float(t) for t in band.t],
            p5=band.p5,
            p25=band.p25,
            p50=band.p50,
            p75=band.p75,
            p95=band.p95,
        )
        response = backend.report(request)
        path = out_dir / f"plot_{_safe_label(band.strategy)}.svg"
        _atomic_write(path, response.svg)
        paths.append(path)
    return paths


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# configuration assembly (JSON file, flags win)


def _load_config(args) -> dict:
    if not getattr(args, "config", None):
        return {}
    path = Path(args.config)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path}: {exc}")


def _split_specs(text: str) -> list[str]:
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return [p.strip() for p in parts if p.strip()]


_SPEC_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\((.*)\))?$")


def _parse_strategy(text: str) -> StrategySpec:
    match = _SPEC_RE.match(text.strip())
    if not match:
        raise UsageError(f"cannot parse strategy {text!r}; expected Name or Name(key=value,...)")
    name, body = match.groups()
    params = {}
    if body:
        for part in body.split(","):
            if "=" not in part:
                raise UsageError(f"cannot parse parameter {part!r} in {text!r}")
            key, value = part.split("=", 1)
            try:
                params[key.strip()] = float(value)
            except ValueError:
                raise UsageError(f"parameter {key.strip()!r} in {text!r} is not a number")
    return StrategySpec(name=name, params=params)


def _dataset_payload(args, config: dict) -> DatasetPayload:
    data = getattr(args, "data", None) or config.get("dataset", {}).get("csv")
    preset = getattr(args, "preset", None)
    synthetic = config.get("dataset", {}).get("synthetic")
    if data and (preset or synthetic):
        raise UsageError("give either a CSV dataset or a synthetic one, not both")
    if data:
        records = parse_csv(data)
        return DatasetPayload(records=[MatchPayload.from_record(r) for r in records])
    spec = dict(synthetic or {})
    if preset:
        spec["preset"] = preset
    if getattr(args, "matches", None) is not None:
        spec["matches"] = args.matches
    if getattr(args, "seed", None) is not None:
        spec["seed"] = args.seed
    if not spec:
        raise UsageError("no dataset: pass --data, --preset, or a config with a dataset")
    return DatasetPayload(synthetic=SynthSpec(**spec))


def _protocol_payload(args, config: dict) -> ProtocolPayload:
    settings = dict(config.get("protocol", {}))
    if getattr(args, "runs", None) is not None:
        settings["runs"] = args.runs
    if getattr(args, "group_size", None) is not None:
        settings["group_size"] = args.group_size
    if getattr(args, "seed", None) is not None:
        settings["master_seed"] = args.seed
    return ProtocolPayload(**settings)


def _train_fraction(args, config: dict) -> float:
    if args.train_frac is not None:
        return args.train_frac
    return config.get("train_fraction", 0.5)


def _want_plots(args, config: dict) -> bool:
    return bool(args.plots or config.get("plots"))


# ---------------------------------------------------------------------------
# commands


def cmd_synth(args) -> int:
    config = _load_config(args)
    spec = dict(config.get("dataset", {}).get("synthetic", {}))
    if args.preset:
        spec["preset"] = args.preset
    if args.matches is not None:
        spec["matches"] = args.matches
    if args.seed is not None:
        spec["seed"] = args.seed
    if args.margin is not None:
        spec["margin"] = args.margin
    if not spec:
        raise UsageError("synth needs --preset or a config file with a synthetic dataset")
    response = _backend(args).synth(SynthRequest(spec=SynthSpec(**spec)))

    out = _out_dir(args)
    records = [payload.to_record() for payload in response.records]
    dataset_path = out / "dataset.csv"
    buf = io.StringIO()
    write_csv(records, buf)
    _atomic_write(dataset_path, buf.getvalue())
    summary = response.summary
    buf = io.StringIO()
    write_summary_csv(summary.to_summary(), buf)
    _atomic_write(out / "summary.csv", buf.getvalue())

    print(f"wrote {dataset_path} ({summary.size} matches)")
    print(
        f"player accuracy {summary.player_accuracy:.4f}, "
        f"book accuracy {summary.book_accuracy:.4f}, "
        f"outcomes {summary.outcome_range[0]}-{summary.outcome_range[1]}, "
        f"odds {summary.odds_range[0]:.2f}-{summary.odds_range[1]:.2f}, "
        f"margin {summary.mean_margin:.4f}, KL advantage {summary.kl_advantage:+.5f}"
    )
    return 0


def _strategy_specs(args, config: dict) -> list[StrategySpec]:
    specs = [StrategySpec.model_validate(s) for s in config.get("strategies", [])]
    if getattr(args, "strategies", None):
        specs = [_parse_strategy(s) for s in _split_specs(args.strategies)]
    return specs


def cmd_backtest(args) -> int:
    config = _load_config(args)
    specs = _strategy_specs(args, config)
    if not specs:
        raise UsageError("backtest needs --strategies or a config file listing strategies")
    request = BacktestRequest(
        dataset=_dataset_payload(args, config),
        strategies=specs,
        protocol=_protocol_payload(args, config),
        train_fraction=_train_fraction(args, config),
    )
    backend = _backend(args)
    response = backend.backtest(request)

    out = _out_dir(args)
    metrics_path = _write_metrics(response.metrics, out)
    for band in response.bands:
        _write_bands(band, out)
    if _want_plots(args, config):
        _write_plots(response.bands, backend, out)
    for row in response.metrics:
        print(
            f"{row.strategy}: median {row.median_wf:.4g}, mean {row.mean_wf:.4g}, "
            f"ruin {row.ruin_pct:.1f}%"
        )
    print(f"wrote {metrics_path}")
    return 0


def cmd_tune(args) -> int:
    config = _load_config(args)
    tuned = [TuneStrategySpec.model_validate(s) for s in config.get("tuned", [])]
    if getattr(args, "tune", None):
        tuned = [
            TuneStrategySpec(name=_parse_strategy(s).name)
            for s in _split_specs(args.tune)
        ]
    if not tuned:
        raise UsageError("tune needs --tune or a config file listing tuned strategies")
    request = TuneRequest(
        dataset=_dataset_payload(args, config),
        tuned=tuned,
        fixed=_strategy_specs(args, config),
        protocol=_protocol_payload(args, config),
        train_fraction=_train_fraction(args, config),
    )
    backend = _backend(args)
    response = backend.tune(request)

    out = _out_dir(args)
    selection_path = _write_selection(response.selection, out)
    _write_metrics(response.metrics, out)
    for band in response.bands:
        _write_bands(band, out)
    if _want_plots(args, config):
        _write_plots(response.bands, backend, out)
    for row in response.selection:
        params = ", ".join(f"{k}={v:g}" for k, v in row.params.items()) or "no parameters"
        flag = "" if row.feasible else "  [infeasible on train]"
        print(f"{row.strategy}: chose {params}{flag}")
    print(f"wrote {selection_path}")
    return 0


_BANDS_COLUMNS = ["t", "p5", "p25", "p50", "p75", "p95"]


def _read_bands_csv(path: Path) -> ReportRequest:
    name = path.stem
    if name.startswith("bands_"):
        name = name[len("bands_") :]
    columns: dict[str, list[float]] = {key: [] for key in _BANDS_COLUMNS}
    with open(path, encoding="utf-8", newline="") as stream:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header != _BANDS_COLUMNS:
            raise UsageError(f"{path}: line 1: expected columns {_BANDS_COLUMNS}, got {header}")
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(_BANDS_COLUMNS):
                raise UsageError(f"{path}: line {line}: expected {len(_BANDS_COLUMNS)} fields")
            try:
                values = [float(v) for v in row]
            except ValueError:
                raise UsageError(f"{path}: line {line}: non-numeric value")
            for key, value in zip(_BANDS_COLUMNS, values):
                columns[key].append(value)
    if not columns["t"]:
        raise UsageError(f"{path}: no data rows")
    return ReportRequest(
        strategy=name,
        t=columns["t"],
        p5=columns["p5"],
        p25=columns["p25"],
        p50=columns["p50"],
        p75=columns["p75"],
        p95=columns["p95"],
    )


def cmd_report(args) -> int:
    paths = [Path(p) for p in args.paths]
    if not paths:
        paths = sorted(Path(args.out).glob("bands_*.csv"))
    if not paths:
        raise UsageError(f"no bands files given and none found under {args.out!r}")
    backend = _backend(args)
    for path in paths:
        request = _read_bands_csv(path)
        response = backend.report(request)
        target = path.with_name(f"plot_{_safe_label(request.strategy)}.svg")
        _atomic_write(target, response.svg)
        print(f"wrote {target}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="betfolio",
        description="Betting-portfolio backtesting: synthesize data, backtest, tune, report.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override it")
    common.add_argument("--seed", type=int, help="generator seed (synth) or protocol master seed")
    common.add_argument("--out", default=".", help="output directory (default: current)")
    common.add_argument("--server", help="base URL of a running service; default is in-process")

    protocol_flags = argparse.ArgumentParser(add_help=False)
    protocol_flags.add_argument("--runs", type=int, help="Monte-Carlo runs (default 1000)")
    protocol_flags.add_argument("--group-size", type=int, dest="group_size", help="matches per simultaneous round (default 10)")
    protocol_flags.add_argument("--train-frac", type=float, dest="train_frac", help="fraction of rounds in the train split (default 0.5)")
    protocol_flags.add_argument("--plots", action="store_true", help="also render SVG band charts")

    dataset_flags = argparse.ArgumentParser(add_help=False)
    dataset_flags.add_argument("--data", help="dataset CSV path")
    dataset_flags.add_argument("--preset", choices=PRESET_NAMES, help="synthetic preset")
    dataset_flags.add_argument("--matches", type=int, help="synthetic dataset size override")

    synth = sub.add_parser("synth", parents=[common], help="generate a synthetic dataset CSV")
    synth.add_argument("--preset", choices=PRESET_NAMES, help="synthetic preset")
    synth.add_argument("--matches", type=int, help="number of matches (preset default otherwise)")
    synth.add_argument("--margin", type=float, help="bookmaker margin override")
    synth.set_defaults(func=cmd_synth)

    backtest = sub.add_parser(
        "backtest", parents=[common, protocol_flags, dataset_flags],
        help="evaluate fixed strategies on the test split",
    )
    backtest.add_argument(
        "--strategies",
        help='comma-separated, e.g. "Kelly,KellyFrac(omega=0.5),MPT(gamma=2)"',
    )
    backtest.set_defaults(func=cmd_backtest)

    tune = sub.add_parser(
        "tune", parents=[common, protocol_flags, dataset_flags],
        help="grid-search hyperparameters on train, evaluate the choice on test",
    )
    tune.add_argument("--tune", help="comma-separated strategy names to tune with default grids")
    tune.add_argument("--strategies", help="fixed comparison strategies, same syntax as backtest")
    tune.set_defaults(func=cmd_tune)

    report = sub.add_parser(
        "report", parents=[common], help="render SVG band charts from bands CSV files"
    )
    report.add_argument("paths", nargs="*", help="bands CSV files (default: bands_*.csv in --out)")
    report.set_defaults(func=cmd_report)

    serve = sub.add_parser("serve", parents=[common], help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SchemaError, EmptySplit, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except httpx.HTTPStatusError as exc:
        print(f"error: server returned {exc.response.status_code}: {exc.response.text}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"error: cannot reach server: {exc}", file=sys.stderr)
        return 1
    except BetfolioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
