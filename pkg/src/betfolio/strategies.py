"""Betting strategies: portfolio optimizers and simple baselines.

Every strategy maps a market to a :class:`Portfolio`, a vector of wealth
fractions over the market's assets with cash last. Formal strategies
(Kelly and its variants, mean-variance, max-Sharpe) optimize over the
world-payoff matrix of a whole round; the two informal baselines
(``abs_disc``, ``max_ev_frac``) look at one match at a time and are
assembled across a round by splitting wealth equally between matches.

Post-hoc risk controls are expressed as wrappers: :class:`Fraction` scales
every stake by a constant, :class:`MaxLimit` caps each stake. They operate
on the finished portfolio, so they compose in the order given.

:class:`StrategyConfig` is the hashable description used by the tuning and
simulation layers; :func:`named_config` builds one from the short names the
CLI and reports use (``Kelly``, ``MSharpeFracMax``, ...).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .market import (
    DEFAULT_WORLD_LIMIT,
    OddsMatrix,
    RoundSlate,
    _freeze,
    build_odds_matrix,
    implied_probs,
)
from .solver import (
    ARMIJO,
    MAX_BACKTRACKS,
    SolveSettings,
    maximize_on_simplex,
    maximize_ratio_on_simplex,
    maximize_with_scalar_constraint,
    project_to_box_simplex,
)

# Wealth in a world is floored at this value inside log-type objectives so
# that iterates which zero out some world stay finite and the line search
# can still compare them.
LOG_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# portfolios and wrappers


@dataclass(frozen=True, eq=False)
class Portfolio:
    """Wealth fractions over a market's assets, cash in the last slot."""

    fractions: np.ndarray

    def __post_init__(self) -> None:
        fractions = _freeze(self.fractions)
        if fractions.ndim != 1 or fractions.size < 2:
            raise ValueError("portfolio needs at least one asset plus cash")
        if not np.all(np.isfinite(fractions)):
            raise ValueError("portfolio fractions must be finite")
        if np.any(fractions < -1e-12):
            raise ValueError(f"negative fraction: {fractions.min()!r}")
        if abs(float(fractions.sum()) - 1.0) > 1e-9:
            raise ValueError(f"fractions sum to {fractions.sum()!r}, expected 1")
        object.__setattr__(self, "fractions", fractions)

    @property
    def cash(self) -> float:
        return float(self.fractions[-1])

    @property
    def risky_mass(self) -> float:
        return float(self.fractions[:-1].sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Portfolio):
            return NotImplemented
        return np.array_equal(self.fractions, other.fractions)


def apply_fraction(portfolio: Portfolio, omega: float) -> Portfolio:
    """Scale every stake by ``omega`` in [0, 1], the rest going to cash."""
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {omega!r}")
    if omega == 1.0:
        return portfolio
    n = portfolio.fractions.size
    if omega == 0.0:
        fractions = np.zeros(n)
        fractions[-1] = 1.0
        return Portfolio(fractions)
    risky = portfolio.fractions[:-1] * omega
    return Portfolio(np.append(risky, max(1.0 - float(risky.sum()), 0.0)))


def apply_max_limit(portfolio: Portfolio, limit: float) -> Portfolio:
    """Cap each individual stake at ``limit``, freed mass going to cash."""
    if limit < 0.0:
        raise ValueError(f"stake limit must be nonnegative, got {limit!r}")
    risky = portfolio.fractions[:-1]
    if risky.size == 0 or float(risky.max()) <= limit:
        return portfolio
    capped = np.minimum(risky, limit)
    return Portfolio(np.append(capped, max(1.0 - float(capped.sum()), 0.0)))


@dataclass(frozen=True)
class Fraction:
    """Post-hoc stake multiplier omega in [0, 1]."""

    omega: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError(f"fraction must lie in [0, 1], got {self.omega!r}")

    def apply(self, portfolio: Portfolio) -> Portfolio:
        return apply_fraction(portfolio, self.omega)


@dataclass(frozen=True)
class MaxLimit:
    """Post-hoc cap on each individual stake."""

    limit: float

    def __post_init__(self) -> None:
        if self.limit < 0.0:
            raise ValueError(f"stake limit must be nonnegative, got {self.limit!r}")

    def apply(self, portfolio: Portfolio) -> Portfolio:
        return apply_max_limit(portfolio, self.limit)


# ---------------------------------------------------------------------------
# shared market quantities


def _excess_payoff(om: OddsMatrix) -> np.ndarray:
    excess = om.payoff - 1.0
    excess[:, -1] = 0.0
    return excess


def _moments(om: OddsMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Expected excess returns and the risk matrix used by mpt/max_sharpe.

    Single-match rounds use the diagonal weights p_i (1 - p_i) (o_i - 1)^2,
    treating outcomes as uncorrelated bets. Multi-match rounds use the full
    covariance of the world excess payoffs, which captures the exact
    exclusivity between outcomes of the same match.
    """
    excess = _excess_payoff(om)
    w = om.world_probs
    mu = w @ excess
    if om.n_matches == 1:
        odds = np.diagonal(om.payoff)
        diag = w * (1.0 - w) * (odds - 1.0) ** 2
        sigma = np.diag(np.append(diag, 0.0))
    else:
        centered = excess - mu
        sigma = centered.T @ (w[:, None] * centered)
    return mu, sigma


def _cash_only(n_assets: int) -> Portfolio:
    fractions = np.zeros(n_assets)
    fractions[-1] = 1.0
    return Portfolio(fractions)


# ---------------------------------------------------------------------------
# informal baselines (one match at a time)


def abs_disc(probs: np.ndarray, odds: np.ndarray) -> Portfolio:
    """Stake the largest positive gap between forecast and implied probability.

    The stake equals the gap itself; with no positive gap everything stays in
    cash. Returns a portfolio over the match's outcomes plus cash.
    """
    probs = np.asarray(probs, dtype=float)
    odds = np.asarray(odds, dtype=float)
    implied, _ = implied_probs(odds)
    gaps = probs - implied
    best = int(np.argmax(gaps))
    fractions = np.zeros(probs.size + 1)
    if gaps[best] > 0.0:
        fractions[best] = gaps[best]
    fractions[-1] = 1.0 - fractions.sum()
    return Portfolio(fractions)


def max_ev_frac(probs: np.ndarray, odds: np.ndarray, omega: float = 1.0) -> Portfolio:
    """Stake ``omega`` times the lone-bet optimal fraction on the best EV.

    The outcome with the highest expected unit profit p o - 1 gets the
    two-outcome growth-optimal stake (p o - 1) / (o - 1), scaled by omega;
    nothing is staked when no outcome has positive expected value.
    """
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {omega!r}")
    probs = np.asarray(probs, dtype=float)
    odds = np.asarray(odds, dtype=float)
    ev = probs * odds - 1.0
    best = int(np.argmax(ev))
    fractions = np.zeros(probs.size + 1)
    if ev[best] > 0.0:
        fractions[best] = omega * ev[best] / (odds[best] - 1.0)
    fractions[-1] = 1.0 - fractions.sum()
    return Portfolio(fractions)


# ---------------------------------------------------------------------------
# formal strategies


def _kelly_iterative(om: OddsMatrix, settings: SolveSettings | None = None) -> Portfolio:
    payoff = om.payoff
    w = om.world_probs

    def value(f: np.ndarray) -> float:
        wealth = np.maximum(payoff @ f, LOG_FLOOR)
        return float(w @ np.log(wealth))

    def gradient(f: np.ndarray) -> np.ndarray:
        wealth = np.maximum(payoff @ f, LOG_FLOOR)
        return payoff.T @ (w / wealth)

    report = maximize_on_simplex(value, gradient, om.n_assets, settings)
    return Portfolio(report.solution)


def _kelly_single_match(om: OddsMatrix) -> Portfolio | None:
    """Exact log-wealth optimum for one match plus cash, by water filling.

    With cash held, stationarity forces the dual variable to 1, so the
    optimal stakes are f_i = p_i - c / o_i over a support set B with cash level
    c = (1 - P_B) / (1 - S_B), P_B and S_B the probability and inverse-odds
    mass of B. Adding any outcome whose p_i o_i exceeds the current level
    strictly lowers the level, so a greedy pass over outcomes sorted by
    p_i o_i lands exactly on the fixed point. Returns None on the fair-book
    boundary (level hits zero before the probability mass is exhausted),
    where the optimum is non-unique and the iterative path takes over.
    """
    odds = om.payoff[:, :-1].diagonal()
    p = om.world_probs
    po = p * odds
    order = np.argsort(-po, kind="stable")
    prob_mass = 0.0
    inv_odds_mass = 0.0
    level = 1.0
    included: list[int] = []
    for idx in order:
        if po[idx] <= level:
            break
        prob_mass += p[idx]
        inv_odds_mass += 1.0 / odds[idx]
        remaining = 1.0 - inv_odds_mass
        if remaining <= 1e-12:
            if prob_mass < 1.0 - 1e-9:
                return None
            level = 0.0
            included.append(int(idx))
            break
        level = (1.0 - prob_mass) / remaining
        included.append(int(idx))
    fractions = np.zeros(om.n_assets)
    for idx in included:
        fractions[idx] = max(p[idx] - level / odds[idx], 0.0)
    fractions[-1] = max(1.0 - fractions.sum(), 0.0)
    return Portfolio(fractions)


def kelly(om: OddsMatrix, settings: SolveSettings | None = None) -> Portfolio:
    """Maximize expected log wealth over the round's world payoffs."""
    if om.n_matches == 1:
        direct = _kelly_single_match(om)
        if direct is not None:
            return direct
    return _kelly_iterative(om, settings)


def kelly_quadratic(om: OddsMatrix, settings: SolveSettings | None = None) -> Portfolio:
    """Maximize the second-order expansion of log wealth, E[r - r^2 / 2]."""
    excess = _excess_payoff(om)
    w = om.world_probs

    def value(f: np.ndarray) -> float:
        r = excess @ f
        return float(w @ (r - 0.5 * r * r))

    def gradient(f: np.ndarray) -> np.ndarray:
        r = excess @ f
        return excess.T @ (w * (1.0 - r))

    report = maximize_on_simplex(value, gradient, om.n_assets, settings)
    return Portfolio(report.solution)


def mpt(
    om: OddsMatrix,
    gamma: float,
    sigma: np.ndarray | None = None,
    settings: SolveSettings | None = None,
) -> Portfolio:
    """Maximize mean excess return minus ``gamma`` times payoff variance.

    ``gamma = 0`` is solved exactly: the optimum is the vertex with the best
    expected excess return, or pure cash when no asset has a positive one.
    Ties go to the lowest asset index. A custom risk matrix can be supplied
    via ``sigma`` (shape n_assets x n_assets, cash row and column zero).
    """
    if not math.isfinite(gamma) or gamma < 0.0:
        raise ValueError(f"risk aversion must be a nonnegative number, got {gamma!r}")
    mu, default_sigma = _moments(om)
    if sigma is None:
        sigma = default_sigma
    else:
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape != (om.n_assets, om.n_assets):
            raise ValueError("risk matrix shape does not match the asset count")

    if gamma == 0.0:
        best = int(np.argmax(mu[:-1]))
        if mu[best] <= 0.0:
            return _cash_only(om.n_assets)
        fractions = np.zeros(om.n_assets)
        fractions[best] = 1.0
        return Portfolio(fractions)

    def value(f: np.ndarray) -> float:
        return float(mu @ f - gamma * (f @ sigma @ f))

    def gradient(f: np.ndarray) -> np.ndarray:
        return mu - 2.0 * gamma * (sigma @ f)

    report = maximize_on_simplex(value, gradient, om.n_assets, settings)
    return Portfolio(report.solution)


def max_sharpe(om: OddsMatrix, settings: SolveSettings | None = None) -> Portfolio:
    """Maximize expected excess return divided by payoff standard deviation.

    The ratio is scale-free along the risky direction, so the convention here
    is the fully invested representative (no cash), which is also where the
    iteration naturally lands. With no positive-edge asset the answer is
    pure cash.
    """
    mu, sigma = _moments(om)

    def denominator(f: np.ndarray) -> float:
        return math.sqrt(max(float(f @ sigma @ f), 0.0))

    def denominator_gradient(f: np.ndarray) -> np.ndarray:
        return (sigma @ f) / max(denominator(f), 1e-15)

    report = maximize_ratio_on_simplex(
        mu, denominator, denominator_gradient, om.n_assets, settings
    )
    return Portfolio(report.solution)


def kelly_drawdown(
    om: OddsMatrix,
    alpha: float,
    beta: float,
    settings: SolveSettings | None = None,
) -> Portfolio:
    """Kelly under the constraint P(wealth ever drops below alpha) <= beta.

    For log-optimal betting the probability of ever losing a fraction
    1 - alpha of current wealth is controlled by the supermartingale bound
    E[(wealth multiplier)^(-lambda)] <= 1 with lambda = log(beta)/log(alpha).
    beta = 1 removes the constraint and reduces to plain Kelly.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"drawdown level must lie in (0, 1), got {alpha!r}")
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"drawdown probability must lie in (0, 1], got {beta!r}")
    lam = math.log(beta) / math.log(alpha)
    if lam == 0.0:
        return kelly(om, settings)

    payoff = om.payoff
    w = om.world_probs
    mask = w > 0
    log_prior = np.log(w[mask])
    payoff_live = payoff[mask]

    def objective(f: np.ndarray) -> float:
        wealth = np.maximum(payoff @ f, LOG_FLOOR)
        return float(w @ np.log(wealth))

    def objective_gradient(f: np.ndarray) -> np.ndarray:
        wealth = np.maximum(payoff @ f, LOG_FLOOR)
        return payoff.T @ (w / wealth)

    def constraint(f: np.ndarray) -> float:
        wealth = np.maximum(payoff_live @ f, LOG_FLOOR)
        exponents = log_prior - lam * np.log(wealth)
        top = float(exponents.max())
        return top + math.log(float(np.exp(exponents - top).sum()))

    def constraint_gradient(f: np.ndarray) -> np.ndarray:
        wealth = np.maximum(payoff_live @ f, LOG_FLOOR)
        exponents = log_prior - lam * np.log(wealth)
        weights = np.exp(exponents - exponents.max())
        weights /= weights.sum()
        return payoff_live.T @ (weights * (-lam) / wealth)

    report = maximize_with_scalar_constraint(
        objective,
        objective_gradient,
        constraint,
        constraint_gradient,
        om.n_assets,
        settings,
    )
    return Portfolio(report.solution)


def worst_case_probs(
    fractions: Portfolio | np.ndarray, om: OddsMatrix, eta: float
) -> np.ndarray:
    """Adversarial world probabilities within a relative band of the nominal.

    Minimizes expected log wealth of the given portfolio over the set
    {p : max(0, (1 - eta) p_nom) <= p <= min(1, (1 + eta) p_nom), sum p = 1}.
    The minimizer starts every world at its lower bound and fills the
    remaining mass into the worst log-wealth worlds first. When every world
    has the same log wealth (all cash, for instance) the nominal vector is
    already worst-case and is returned as is.
    """
    if eta < 0.0:
        raise ValueError(f"ambiguity radius must be nonnegative, got {eta!r}")
    f = np.asarray(getattr(fractions, "fractions", fractions), dtype=float)
    nominal = om.world_probs
    wealth = np.maximum(om.payoff @ f, LOG_FLOOR)
    log_wealth = np.log(wealth)
    if eta == 0.0 or float(np.ptp(log_wealth)) < 1e-15:
        return nominal.copy()
    lower = np.maximum(nominal * (1.0 - eta), 0.0)
    upper = np.minimum(nominal * (1.0 + eta), 1.0)
    out = lower.copy()
    budget = 1.0 - float(lower.sum())
    for i in np.argsort(log_wealth, kind="stable"):
        if budget <= 0.0:
            break
        add = min(float(upper[i] - lower[i]), budget)
        out[i] += add
        budget -= add
    return out


def kelly_dro(
    om: OddsMatrix, eta: float, settings: SolveSettings | None = None
) -> Portfolio:
    """Maximize worst-case expected log wealth over the eta probability band.

    Solved through the dual: phi(q) = max_f E_q[log wealth] is convex in the
    world probabilities q, and because the inner maximizer is unique, phi is
    differentiable with gradient log wealth at that maximizer. Projected
    descent over the probability band therefore converges to the adversary's
    optimal q, and the matching inner solution is the robust portfolio. Each
    descent probe costs one smooth Kelly solve warm-started at the previous
    inner solution. Pure cash is worth exactly zero to the adversary, so
    anything worth less collapses to cash.
    """
    if eta < 0.0:
        raise ValueError(f"ambiguity radius must be nonnegative, got {eta!r}")
    if eta == 0.0:
        return kelly(om, settings)
    settings = settings or SolveSettings()
    payoff = om.payoff
    nominal = om.world_probs
    lower = np.maximum(nominal * (1.0 - eta), 0.0)
    upper = np.minimum(nominal * (1.0 + eta), 1.0)

    def inner_best(q: np.ndarray, start: np.ndarray | None):
        def value(f: np.ndarray) -> float:
            wealth = np.maximum(payoff @ f, LOG_FLOOR)
            return float(q @ np.log(wealth))

        def gradient(f: np.ndarray) -> np.ndarray:
            wealth = np.maximum(payoff @ f, LOG_FLOOR)
            return payoff.T @ (q / wealth)

        rep = maximize_on_simplex(value, gradient, om.n_assets, settings, start=start)
        return rep.solution, rep.objective

    q = nominal.copy()
    f, phi = inner_best(q, None)
    carried_step = settings.initial_step
    for _ in range(settings.max_iterations):
        slope = np.log(np.maximum(payoff @ f, LOG_FLOOR))
        step_to_go = project_to_box_simplex(q - slope, lower, upper) - q
        if float(np.linalg.norm(step_to_go)) < settings.tolerance:
            break
        t = min(settings.initial_step, carried_step / settings.backtrack)
        accepted = False
        for _ in range(MAX_BACKTRACKS):
            candidate = project_to_box_simplex(q - t * slope, lower, upper)
            descent = float(slope @ (candidate - q))
            if descent < 0.0:
                f_new, phi_new = inner_best(candidate, f)
                if phi_new <= phi + ARMIJO * descent:
                    q, f, phi = candidate, f_new, phi_new
                    accepted = True
                    carried_step = t
                    break
            t *= settings.backtrack
        if not accepted:
            break

    adversary = worst_case_probs(f, om, eta)
    wealth = np.maximum(payoff @ f, LOG_FLOOR)
    robust_value = float(adversary @ np.log(wealth))
    if robust_value <= 0.0:
        return _cash_only(om.n_assets)
    return Portfolio(f)


# ---------------------------------------------------------------------------
# configuration and dispatch

_INFORMAL_KINDS = frozenset({"abs_disc", "max_ev_frac"})
_FORMAL_KINDS = frozenset({"kelly", "kelly_quadratic", "mpt", "max_sharpe"})
_ALL_KINDS = _INFORMAL_KINDS | _FORMAL_KINDS


@dataclass(frozen=True)
class StrategyConfig:
    """Hashable description of a strategy plus its post-hoc wrappers.

    ``kind`` picks the base strategy. ``drawdown`` and ``dro`` are mutually
    exclusive modifications of Kelly; their parameters (alpha/beta and eta)
    must be supplied when the flag is set. ``omega`` is the stake multiplier
    of ``max_ev_frac`` only; fractional wrapping of a formal strategy goes
    through ``wrappers`` instead.
    """

    kind: str
    omega: float = 1.0
    gamma: float | None = None
    drawdown: bool = False
    alpha: float | None = None
    beta: float | None = None
    dro: bool = False
    eta: float | None = None
    wrappers: tuple[Fraction | MaxLimit, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _ALL_KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.drawdown and self.dro:
            raise ValueError("drawdown and robustness constraints cannot be combined")
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError(f"fraction must lie in [0, 1], got {self.omega!r}")
        if self.kind == "mpt":
            if self.gamma is None or not math.isfinite(self.gamma) or self.gamma < 0:
                raise ValueError("mpt needs a nonnegative risk aversion gamma")
        if self.drawdown:
            if self.kind != "kelly":
                raise ValueError("the drawdown constraint applies to kelly only")
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValueError("drawdown needs a level alpha in (0, 1)")
            if self.beta is None or not 0.0 < self.beta <= 1.0:
                raise ValueError("drawdown needs a probability beta in (0, 1]")
        if self.dro:
            if self.kind != "kelly":
                raise ValueError("the robustness band applies to kelly only")
            if self.eta is None or self.eta < 0.0:
                raise ValueError("robustness needs a nonnegative radius eta")
        for wrapper in self.wrappers:
            if not isinstance(wrapper, (Fraction, MaxLimit)):
                raise ValueError(f"unsupported wrapper {wrapper!r}")


def _build_abs_disc(**params: float) -> StrategyConfig:
    _reject_params("AbsDisc", params)
    return StrategyConfig(kind="abs_disc")


def _reject_params(name: str, params: dict) -> None:
    if params:
        raise ValueError(f"{name} takes no parameters, got {sorted(params)}")


_REGISTRY: dict[str, tuple] = {}
_AXES: dict[str, tuple[str, ...]] = {}


def _register(name: str, axes: tuple[str, ...], builder) -> None:
    _REGISTRY[name] = builder
    _AXES[name] = axes


_register("AbsDisc", (), lambda: StrategyConfig(kind="abs_disc"))
_register(
    "MaxEvFrac",
    ("omega",),
    lambda omega=1.0: StrategyConfig(kind="max_ev_frac", omega=omega),
)
_register("Kelly", (), lambda: StrategyConfig(kind="kelly"))
_register(
    "KellyFrac",
    ("omega",),
    lambda omega=0.5: StrategyConfig(kind="kelly", wrappers=(Fraction(omega),)),
)
_register(
    "KellyFracMax",
    ("omega", "max_limit"),
    lambda omega=0.5, max_limit=0.1: StrategyConfig(
        kind="kelly", wrappers=(Fraction(omega), MaxLimit(max_limit))
    ),
)
_register("KellyQuadratic", (), lambda: StrategyConfig(kind="kelly_quadratic"))
_register(
    "MPT", ("gamma",), lambda gamma=1.0: StrategyConfig(kind="mpt", gamma=gamma)
)
_register("MSharpe", (), lambda: StrategyConfig(kind="max_sharpe"))
_register(
    "MSharpeFrac",
    ("omega",),
    lambda omega=0.5: StrategyConfig(kind="max_sharpe", wrappers=(Fraction(omega),)),
)
_register(
    "MSharpeFracMax",
    ("omega", "max_limit"),
    lambda omega=0.5, max_limit=0.1: StrategyConfig(
        kind="max_sharpe", wrappers=(Fraction(omega), MaxLimit(max_limit))
    ),
)
_register(
    "KellyDrawdown",
    ("alpha", "beta"),
    lambda alpha=0.7, beta=0.1: StrategyConfig(
        kind="kelly", drawdown=True, alpha=alpha, beta=beta
    ),
)
_register(
    "KellyRobust",
    ("eta",),
    lambda eta=0.1: StrategyConfig(kind="kelly", dro=True, eta=eta),
)

_NAME_ALIASES = {"KellyDD": "KellyDrawdown", "KellyDR": "KellyRobust"}


def _resolve_name(name: str) -> str:
    resolved = _NAME_ALIASES.get(name, name)
    if resolved not in _REGISTRY:
        raise ValueError(f"unknown strategy name {name!r}")
    return resolved


def named_config(name: str, **params: float) -> StrategyConfig:
    """Build the configuration for one of the named strategies.

    Tunable parameters (see :func:`strategy_axes`) can be overridden by
    keyword; anything else raises. ``KellyDD`` and ``KellyDR`` are accepted
    as aliases for ``KellyDrawdown`` and ``KellyRobust``.
    """
    resolved = _resolve_name(name)
    axes = _AXES[resolved]
    unknown = set(params) - set(axes)
    if unknown:
        raise ValueError(f"{name} does not take parameters {sorted(unknown)}")
    return _REGISTRY[resolved](**params)


def strategy_axes(name: str) -> tuple[str, ...]:
    """Names of the tunable parameters of a named strategy."""
    return _AXES[_resolve_name(name)]


def strategy_names() -> tuple[str, ...]:
    """All registered strategy names, registry order."""
    return tuple(_REGISTRY)


def _dispatch(
    config: StrategyConfig, om: OddsMatrix, settings: SolveSettings | None
) -> Portfolio:
    if config.kind == "kelly":
        if config.drawdown:
            return kelly_drawdown(om, config.alpha, config.beta, settings)
        if config.dro:
            return kelly_dro(om, config.eta, settings)
        return kelly(om, settings)
    if config.kind == "kelly_quadratic":
        return kelly_quadratic(om, settings)
    if config.kind == "mpt":
        return mpt(om, config.gamma, settings=settings)
    if config.kind == "max_sharpe":
        return max_sharpe(om, settings)
    raise ValueError(f"unknown strategy kind {config.kind!r}")


def run_strategy(
    config: StrategyConfig,
    slate: RoundSlate,
    settings: SolveSettings | None = None,
    world_limit: int = DEFAULT_WORLD_LIMIT,
) -> Portfolio:
    """Produce the portfolio a configured strategy bets on a round's slate.

    Informal strategies are run per match on an equal split of wealth, so
    they never build the world enumeration and are immune to its size limit.
    Formal strategies optimize over the full odds matrix. Wrappers are
    applied to the finished portfolio in the order configured.
    """
    if config.kind in _INFORMAL_KINDS:
        n_matches = len(slate.matches)
        parts = []
        for match in slate.matches:
            if config.kind == "abs_disc":
                single = abs_disc(match.player_probs.values, match.odds.values)
            else:
                single = max_ev_frac(
                    match.player_probs.values, match.odds.values, omega=config.omega
                )
            parts.append(single.fractions[:-1] / n_matches)
        risky = np.concatenate(parts)
        portfolio = Portfolio(np.append(risky, 1.0 - float(risky.sum())))
    else:
        om, _ = build_odds_matrix(slate, world_limit=world_limit)
        portfolio = _dispatch(config, om, settings)
    for wrapper in config.wrappers:
        portfolio = wrapper.apply(portfolio)
    return portfolio
