"""Tests for wealth trajectories and the Monte-Carlo evaluation protocol."""

from __future__ import annotations

import numpy as np
import pytest

from betfolio.market import MatchRecord, OddsVector, OutcomeProbs, RoundSlate
from betfolio.simulation import (
    PortfolioCache,
    ProtocolConfig,
    SimulationResult,
    bands,
    compute_stats,
    monte_carlo,
    run_trajectory,
    settle_round,
)
from betfolio.strategies import Portfolio, named_config


def make_match(odds, probs, result=0, match_id="m1", round_id="r1"):
    return MatchRecord(
        match_id=match_id,
        round_id=round_id,
        odds=OddsVector(np.asarray(odds, dtype=float)),
        player_probs=OutcomeProbs(np.asarray(probs, dtype=float)),
        result_index=result,
    )


def chronological_matches(n, seed=0):
    """n distinct binary matches with mild edges and varied results."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        p = float(rng.uniform(0.35, 0.65))
        margin = float(rng.uniform(0.02, 0.06))
        probs = np.array([p, 1.0 - p])
        implied = probs * 0.5 + np.array([0.5, 0.5]) * 0.5
        odds = (1.0 - margin) / implied
        result = int(rng.random() > p)
        out.append(
            make_match(odds, probs, result=result, match_id=f"m{i}", round_id=f"r{i}")
        )
    return out


# ---------------------------------------------------------------------------
# protocol config


def test_protocol_validation():
    with pytest.raises(ValueError):
        ProtocolConfig(runs=0)
    with pytest.raises(ValueError):
        ProtocolConfig(drop_fraction=1.0)
    with pytest.raises(ValueError):
        ProtocolConfig(group_size=0)
    with pytest.raises(ValueError):
        ProtocolConfig(initial_wealth=0.0)
    with pytest.raises(ValueError):
        ProtocolConfig(ruin_fraction=-0.1)
    config = ProtocolConfig()
    assert config.runs == 1000
    assert config.drop_fraction == pytest.approx(0.10)
    assert config.group_size == 10
    assert config.ruin_fraction == pytest.approx(1e-4)


# ---------------------------------------------------------------------------
# settlement


def test_settle_round_hand_computed():
    slate = RoundSlate(matches=(make_match([1.9, 2.0], [0.6, 0.4], result=0),))
    portfolio = Portfolio(np.array([0.2, 0.1, 0.7]))
    # Winning stake pays 0.2 * 1.9, the losing stake is gone, cash remains.
    assert settle_round(portfolio, slate) == pytest.approx(0.2 * 1.9 + 0.7)


def test_settle_round_two_matches():
    a = make_match([1.9, 2.0], [0.6, 0.4], result=1, match_id="a", round_id="r")
    b = make_match([3.0, 1.5], [0.3, 0.7], result=0, match_id="b", round_id="r")
    slate = RoundSlate(matches=(a, b))
    portfolio = Portfolio(np.array([0.1, 0.2, 0.25, 0.05, 0.4]))
    expected = 0.2 * 2.0 + 0.25 * 3.0 + 0.4
    assert settle_round(portfolio, slate) == pytest.approx(expected)


def test_settle_round_all_cash_is_one():
    slate = RoundSlate(matches=(make_match([1.9, 2.0], [0.6, 0.4]),))
    portfolio = Portfolio(np.array([0.0, 0.0, 1.0]))
    assert settle_round(portfolio, slate) == 1.0


# ---------------------------------------------------------------------------
# single trajectories


def test_run_trajectory_hand_computed():
    # AbsDisc stakes the forecast-minus-implied gap; both rounds are
    # single-match so the stakes are exactly the per-match ones.
    m1 = make_match([1.46, 2.71], [0.55, 0.45], result=1, round_id="r1")
    m2 = make_match([1.46, 2.71], [0.55, 0.45], result=0, match_id="m2", round_id="r2")
    slates = [RoundSlate(matches=(m1,)), RoundSlate(matches=(m2,))]
    protocol = ProtocolConfig(runs=1, group_size=1)
    path, ruined = run_trajectory(named_config("AbsDisc"), slates, protocol)

    implied = (1 / 1.46) / (1 / 1.46 + 1 / 2.71)
    stake = 0.45 - (1 / 2.71) / (1 / 1.46 + 1 / 2.71)
    w1 = stake * 2.71 + (1.0 - stake)  # round 1 won
    w2 = w1 * (1.0 - stake)  # round 2 lost
    assert not ruined
    np.testing.assert_allclose(path, [1.0, w1, w2], rtol=1e-12)
    assert implied > 0.6  # sanity: the gap really is on the second outcome


def test_run_trajectory_freezes_after_ruin():
    # The forecast is certain of outcome 0, so Kelly goes all in; the first
    # result says otherwise and the bankroll hits zero and stays there, with
    # no betting afterwards.
    bust = make_match([2.0, 2.1], [1.0, 0.0], result=1, round_id="r1")
    gift = make_match([2.0, 2.1], [1.0, 0.0], result=0, match_id="m2", round_id="r2")
    slates = [RoundSlate(matches=(bust,)), RoundSlate(matches=(gift,))]
    protocol = ProtocolConfig(runs=1, group_size=1)
    path, ruined = run_trajectory(named_config("Kelly"), slates, protocol)
    assert ruined
    np.testing.assert_allclose(path, [1.0, 0.0, 0.0], atol=1e-12)


def test_run_trajectory_scales_with_initial_wealth():
    m1 = make_match([1.46, 2.71], [0.55, 0.45], result=1)
    slates = [RoundSlate(matches=(m1,))]
    small = run_trajectory(
        named_config("AbsDisc"), slates, ProtocolConfig(initial_wealth=1.0)
    )[0]
    big = run_trajectory(
        named_config("AbsDisc"), slates, ProtocolConfig(initial_wealth=250.0)
    )[0]
    np.testing.assert_allclose(big, 250.0 * small, rtol=1e-12)


# ---------------------------------------------------------------------------
# the Monte-Carlo protocol


def test_monte_carlo_shapes_and_grouping():
    matches = chronological_matches(30)
    protocol = ProtocolConfig(runs=7, drop_fraction=0.1, group_size=3, master_seed=9)
    result = monte_carlo(named_config("MaxEvFrac", omega=0.3), matches, protocol)
    # 30 matches, drop floor(3) -> 27 kept -> 9 groups of 3.
    assert result.wealth_paths.shape == (7, 10)
    assert result.ruined.shape == (7,)
    np.testing.assert_array_equal(result.wealth_paths[:, 0], np.ones(7))
    assert result.final_wealths.shape == (7,)
    np.testing.assert_array_equal(
        result.final_wealths, result.wealth_paths[:, -1]
    )


def test_monte_carlo_is_deterministic_per_seed():
    matches = chronological_matches(20)
    protocol = ProtocolConfig(runs=5, group_size=2, master_seed=42)
    config = named_config("MaxEvFrac", omega=0.5)
    a = monte_carlo(config, matches, protocol)
    b = monte_carlo(config, matches, protocol)
    assert np.array_equal(a.wealth_paths, b.wealth_paths)
    c = monte_carlo(config, matches, ProtocolConfig(runs=5, group_size=2, master_seed=43))
    assert not np.array_equal(a.wealth_paths, c.wealth_paths)


def test_monte_carlo_runs_differ_from_each_other():
    matches = chronological_matches(40)
    protocol = ProtocolConfig(runs=4, group_size=2, master_seed=3)
    result = monte_carlo(named_config("MaxEvFrac", omega=0.5), matches, protocol)
    finals = result.final_wealths
    assert np.unique(finals).size > 1  # shuffling changed the group makeup


def test_monte_carlo_without_reshuffle_matches_manual_trajectory():
    matches = chronological_matches(12, seed=5)
    protocol = ProtocolConfig(
        runs=3, drop_fraction=0.0, group_size=4, master_seed=0, reshuffle=False
    )
    config = named_config("MaxEvFrac", omega=0.4)
    result = monte_carlo(config, matches, protocol)
    # Without dropping or reshuffling every run walks the same chronological
    # groups of four.
    assert np.array_equal(result.wealth_paths[0], result.wealth_paths[1])

    regrouped = []
    for g in range(3):
        chunk = matches[4 * g : 4 * (g + 1)]
        chunk = tuple(
            MatchRecord(
                match_id=m.match_id,
                round_id="g",
                odds=m.odds,
                player_probs=m.player_probs,
                result_index=m.result_index,
            )
            for m in chunk
        )
        regrouped.append(RoundSlate(matches=chunk))
    path, _ = run_trajectory(config, regrouped, protocol)
    np.testing.assert_allclose(result.wealth_paths[0], path, rtol=1e-12)


def test_monte_carlo_matches_naive_reference():
    matches = chronological_matches(15, seed=11)
    protocol = ProtocolConfig(
        runs=4, drop_fraction=0.2, group_size=1, master_seed=17
    )
    config = named_config("MaxEvFrac", omega=0.6)
    result = monte_carlo(config, matches, protocol)

    # Naive reference: same rng discipline, straight Python loop.
    for r in range(4):
        rng = np.random.default_rng(17 + r)
        kept = rng.permutation(15)[3:]
        wealth = 1.0
        expected = [1.0]
        ruined = False
        for i in kept:
            if not ruined:
                m = matches[i]
                slate = RoundSlate(matches=(m,))
                from betfolio.strategies import run_strategy

                port = run_strategy(config, slate)
                wealth *= settle_round(port, slate)
                if wealth < protocol.ruin_fraction * protocol.initial_wealth:
                    ruined = True
            expected.append(wealth)
        np.testing.assert_allclose(result.wealth_paths[r], expected, rtol=1e-12)
        assert result.ruined[r] == ruined


def test_monte_carlo_counts_ruin_and_freezes():
    # A certain forecast that is wrong on every match: all-in Kelly busts on
    # the first bet of every run regardless of ordering.
    matches = [
        make_match([2.0, 2.0], [1.0, 0.0], result=1, match_id=f"m{i}", round_id=f"r{i}")
        for i in range(10)
    ]
    protocol = ProtocolConfig(runs=6, group_size=1, master_seed=1)
    result = monte_carlo(named_config("Kelly"), matches, protocol)
    assert result.ruined.all()
    np.testing.assert_allclose(result.wealth_paths[:, 1:], 0.0, atol=1e-12)


def test_monte_carlo_group_size_one_uses_shared_portfolio_cache(monkeypatch):
    import betfolio.simulation as sim

    calls = {"n": 0}
    real = sim.run_strategy

    def counting(*args, **kwargs):
        calls["n"] += 1
        return real(*args, **kwargs)

    monkeypatch.setattr(sim, "run_strategy", counting)
    matches = chronological_matches(12, seed=2)
    protocol = ProtocolConfig(runs=8, drop_fraction=0.25, group_size=1, master_seed=5)
    monte_carlo(named_config("MaxEvFrac", omega=0.5), matches, protocol)
    # Every match's portfolio is solved at most once across all 8 runs.
    assert calls["n"] <= 12


def test_cache_is_reusable_across_configs():
    cache = PortfolioCache()
    matches = chronological_matches(6, seed=3)
    protocol = ProtocolConfig(runs=2, group_size=1, master_seed=0)
    a = monte_carlo(named_config("Kelly"), matches, protocol, cache=cache)
    b = monte_carlo(
        named_config("KellyFrac", omega=0.5), matches, protocol, cache=cache
    )
    # Same draws, different stakes: the half-Kelly path is strictly tamer.
    assert not np.array_equal(a.wealth_paths, b.wealth_paths)


def test_fraction_wrapper_multiplier_identity():
    # The wealth multiplier of a fraction-wrapped portfolio is affine in
    # omega: 1 + omega (m - 1). The cache exploits this only implicitly, but
    # the identity must hold for the settlement math.
    m = make_match([1.46, 2.71], [0.55, 0.45], result=1)
    slate = RoundSlate(matches=(m,))
    from betfolio.strategies import apply_fraction, run_strategy

    base = run_strategy(named_config("Kelly"), slate)
    m_full = settle_round(base, slate)
    for omega in (0.0, 0.3, 0.7, 1.0):
        m_frac = settle_round(apply_fraction(base, omega), slate)
        assert m_frac == pytest.approx(1.0 + omega * (m_full - 1.0), rel=1e-12)


# ---------------------------------------------------------------------------
# statistics and bands


def fixed_result():
    paths = np.array(
        [
            [1.0, 2.0, 4.0],
            [1.0, 0.5, 0.25],
            [1.0, 1.0, 1.0],
            [1.0, 2.0, 2.0],
        ]
    )
    ruined = np.array([False, False, False, False])
    return SimulationResult(
        wealth_paths=paths, ruined=ruined, protocol=ProtocolConfig(runs=4)
    )


def test_compute_stats_hand_values():
    stats = compute_stats(fixed_result())
    assert stats.median_final == pytest.approx(1.5)
    assert stats.mean_final == pytest.approx((4.0 + 0.25 + 1.0 + 2.0) / 4)
    assert stats.min_wealth == pytest.approx(0.25)
    assert stats.max_wealth == pytest.approx(4.0)
    finals = np.array([4.0, 0.25, 1.0, 2.0])
    assert stats.sigma_final == pytest.approx(float(np.std(finals)))
    assert stats.ruin_pct == 0.0


def test_compute_stats_ruin_percentage():
    paths = np.array([[1.0, 0.0, 0.0], [1.0, 1.1, 1.2]])
    result = SimulationResult(
        wealth_paths=paths,
        ruined=np.array([True, False]),
        protocol=ProtocolConfig(runs=2),
    )
    stats = compute_stats(result)
    assert stats.ruin_pct == pytest.approx(50.0)
    assert stats.min_wealth == 0.0


def test_bands_are_pointwise_percentiles():
    result = fixed_result()
    out = bands(result)
    assert out.shape == (5, 3)
    np.testing.assert_allclose(
        out,
        np.percentile(result.wealth_paths, [5, 25, 50, 75, 95], axis=0),
    )
    # Middle band at the last step: median of (4, 0.25, 1, 2).
    assert out[2, 2] == pytest.approx(1.5)


def test_bands_custom_percentiles():
    result = fixed_result()
    out = bands(result, percentiles=(50,))
    assert out.shape == (1, 3)
    assert out[0, 0] == pytest.approx(1.0)
