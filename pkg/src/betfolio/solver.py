"""First-order solvers for concave maximization on the probability simplex.

Every optimization in this package lives on the simplex {f >= 0, sum f = 1}
in at most a few dozen dimensions, with cheap objectives and exact gradients.
That regime favours a small, deterministic, dependency-free kernel over a
general modelling stack:

* ``project_to_simplex``: exact Euclidean projection (sort and threshold).
* ``maximize_on_simplex``: projected gradient ascent with a two-way
  backtracking line search from the barycenter, for smooth concave
  objectives.
* ``maximize_ratio_on_simplex``: Dinkelbach's method for affine-over-convex
  ratios (the t-sequence it produces is nondecreasing).
* ``maximize_with_scalar_constraint``: augmented Lagrangian (method of
  multipliers) for one smooth convex inequality constraint.
* ``maximize_subgradient_on_simplex``: projected supergradient ascent with
  best-iterate tracking and a pattern-search polish, for nonsmooth concave
  objectives (pointwise minima of smooth families).

All methods are deterministic: no randomness, fixed iteration order, so a
solve reproduces bit-for-bit on the same inputs. Convergence is declared when
the unit-step projected gradient ``project(x + g) - x`` has norm below the
tolerance. Callables must accept a 1-d numpy array and return a float (or a
gradient array); objectives evaluated at accepted iterates must be finite,
otherwise :class:`NonFiniteObjective` is raised.
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Sequence

import numpy as np

from .errors import InfeasibleConstraint, NonFiniteObjective

Objective = Callable[[np.ndarray], float]
Gradient = Callable[[np.ndarray], np.ndarray]

#: Sufficient-decrease coefficient for the backtracking line search.
ARMIJO = 1e-4
#: Maximum halvings in one line search before giving up on the direction.
MAX_BACKTRACKS = 60
#: Constraint violation accepted after the final penalty stage.
RESIDUAL_TOL = 1e-6
#: Accepted steps whose gain falls below this (relative) threshold count as
#: stagnant; a long stagnant streak terminates the ascent early.
STAGNATION_GAIN = 1e-13
#: Length of the stagnant streak that triggers early termination.
STAGNATION_LIMIT = 50


@dataclasses.dataclass(frozen=True)
class SolveSettings:
    """Numerical knobs shared by all solver entry points.

    Attributes:
        max_iterations: cap on gradient steps per solve (per penalty stage
            for constrained solves).
        tolerance: projected-gradient norm below which a solve is converged.
        initial_step: step size each line search starts from.
        backtrack: multiplicative step shrink factor in (0, 1).
        penalty_initial: first-stage weight of the quadratic constraint term.
        penalty_growth: weight multiplier between penalty stages.
        penalty_stages: maximum number of penalty stages.
    """

    max_iterations: int = 5000
    tolerance: float = 1e-8
    initial_step: float = 1.0
    backtrack: float = 0.5
    penalty_initial: float = 10.0
    penalty_growth: float = 10.0
    penalty_stages: int = 6

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not 0.0 < self.backtrack < 1.0:
            raise ValueError("backtrack factor must be in (0, 1)")
        if self.tolerance <= 0 or self.initial_step <= 0:
            raise ValueError("tolerance and initial_step must be positive")
        if self.penalty_growth <= 1.0 or self.penalty_stages < 1:
            raise ValueError("penalty schedule must grow over at least one stage")


@dataclasses.dataclass(frozen=True)
class SolveReport:
    """Result of one solve.

    ``solution`` lies on the simplex within 1e-9. ``degenerate`` marks ratio
    problems with no positive numerator anywhere (the solution is then the
    pure last-coordinate vertex, which callers use as cash). The history
    tuples expose per-stage diagnostics for the ratio and penalty methods.
    """

    solution: np.ndarray
    objective: float
    iterations: int
    converged: bool
    constraint_residual: float = 0.0
    degenerate: bool = False
    ratio_history: tuple[float, ...] = ()
    residual_history: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        solution = np.asarray(self.solution, dtype=float)
        solution.setflags(write=False)
        object.__setattr__(self, "solution", solution)


def project_to_simplex(v: np.ndarray | Sequence[float]) -> np.ndarray:
    """Euclidean projection onto the probability simplex.

    Sort-and-threshold algorithm: find the largest support size rho such that
    shifting the rho largest coordinates by a common offset keeps them
    positive, then clip. O(n log n), exact up to floating point.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("expected a non-empty 1-d vector")
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u) - 1.0
    ranks = np.arange(1, v.size + 1)
    support = np.nonzero(u * ranks > cumulative)[0]
    rho = support[-1] + 1
    tau = cumulative[rho - 1] / rho
    return np.maximum(v - tau, 0.0)


def project_to_box_simplex(
    v: np.ndarray | Sequence[float],
    lower: np.ndarray | Sequence[float],
    upper: np.ndarray | Sequence[float],
) -> np.ndarray:
    """Euclidean projection onto {p : sum p = 1, lower <= p <= upper}.

    The projection is ``clip(v - tau, lower, upper)`` where tau makes the
    coordinates sum to one. That sum is continuous, piecewise linear, and
    nonincreasing in tau, so the right tau is found exactly by sweeping the
    2n breakpoints where a coordinate leaves its upper bound or hits its
    lower bound. O(n log n), deterministic.
    """
    v = np.asarray(v, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if v.shape != lower.shape or v.shape != upper.shape or v.ndim != 1:
        raise ValueError("point and bounds must be matching 1-d vectors")
    if np.any(lower > upper + 1e-12):
        raise ValueError("lower bound exceeds upper bound")
    if lower.sum() > 1.0 + 1e-9 or upper.sum() < 1.0 - 1e-9:
        raise ValueError("box does not intersect the simplex")
    events = np.concatenate([v - upper, v - lower])
    kinds = np.concatenate([np.zeros(v.size, dtype=int), np.ones(v.size, dtype=int)])
    coords = np.concatenate([np.arange(v.size), np.arange(v.size)])
    order = np.argsort(events, kind="stable")
    upper_sum = float(upper.sum())
    lower_sum = 0.0
    free_vsum = 0.0
    free_count = 0
    tau_prev = -np.inf
    for e in order:
        tau_event = float(events[e])
        if free_count > 0:
            tau = (upper_sum + free_vsum + lower_sum - 1.0) / free_count
            if tau_prev - 1e-12 <= tau <= tau_event + 1e-12:
                return np.clip(v - tau, lower, upper)
        elif abs(upper_sum + lower_sum - 1.0) <= 1e-9:
            # Flat segment: every coordinate is pinned and the pins sum to
            # one, so any tau in the segment gives the same projection.
            return np.clip(v - tau_event, lower, upper)
        i = int(coords[e])
        if kinds[e] == 0:
            upper_sum -= float(upper[i])
            free_vsum += float(v[i])
            free_count += 1
        else:
            free_vsum -= float(v[i])
            free_count -= 1
            lower_sum += float(lower[i])
        tau_prev = tau_event
    # Every coordinate sits at its lower bound, which must carry total mass
    # one for the sweep to get here (the feasibility check above allows it).
    return np.clip(v - tau_prev, lower, upper)


def _barycenter(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def _check_finite(value: float) -> float:
    if not np.isfinite(value):
        raise NonFiniteObjective(f"objective evaluated to {value!r} at an accepted point")
    return float(value)


def maximize_on_simplex(
    objective: Objective,
    gradient: Gradient,
    n: int,
    settings: SolveSettings | None = None,
    start: np.ndarray | None = None,
) -> SolveReport:
    """Maximize a smooth concave objective over the n-simplex.

    Projected gradient ascent with a two-way Armijo line search: each search
    starts one growth step above the previously accepted step rather than
    from ``initial_step``, which keeps the per-iteration cost flat on badly
    conditioned objectives. Starts from the barycenter unless ``start`` is
    given (it is projected first). The line search rejects candidates with
    non-finite objective values, so log-type objectives should floor their
    argument rather than return -inf when possible; an accepted iterate must
    always be finite. A long streak of accepted steps with numerically
    negligible gains terminates the loop early: the remaining attainable
    improvement is below anything the caller can observe.
    """
    if n < 2:
        raise ValueError("need at least two coordinates")
    settings = settings or SolveSettings()
    x = _barycenter(n) if start is None else project_to_simplex(start)
    fx = _check_finite(objective(x))
    iterations = 0
    converged = False
    carried_step = settings.initial_step
    stagnant = 0
    for iterations in range(1, settings.max_iterations + 1):
        g = np.asarray(gradient(x), dtype=float)
        step_to_go = project_to_simplex(x + g) - x
        if float(np.linalg.norm(step_to_go)) < settings.tolerance:
            converged = True
            break
        t = min(settings.initial_step, carried_step / settings.backtrack)
        accepted = False
        for _ in range(MAX_BACKTRACKS):
            y = project_to_simplex(x + t * g)
            ascent = float(g @ (y - x))
            if ascent > 0.0:
                fy = objective(y)
                if np.isfinite(fy) and fy >= fx + ARMIJO * ascent:
                    gain = float(fy) - fx
                    x, fx = y, float(fy)
                    accepted = True
                    carried_step = t
                    break
            t *= settings.backtrack
        if not accepted:
            # No improving step at any scale: numerically stationary.
            break
        if gain <= STAGNATION_GAIN * max(1.0, abs(fx)):
            stagnant += 1
            if stagnant >= STAGNATION_LIMIT:
                break
        else:
            stagnant = 0
    return SolveReport(solution=x, objective=fx, iterations=iterations, converged=converged)


def maximize_ratio_on_simplex(
    numerator_coeffs: np.ndarray | Sequence[float],
    denominator: Objective,
    denominator_gradient: Gradient,
    n: int,
    settings: SolveSettings | None = None,
) -> SolveReport:
    """Maximize a linear-over-convex ratio ``c.f / den(f)`` on the simplex.

    Dinkelbach's method: repeatedly maximize ``c.f - t * den(f)`` and update
    t to the achieved ratio. Because each subproblem is warm-started at the
    previous solution, the t-sequence is nondecreasing. The denominator must
    be convex, nonnegative, and positive wherever the numerator is positive.

    When no coordinate has a positive numerator coefficient the ratio has no
    positive value anywhere; the report then carries ``degenerate=True`` and
    the pure last-coordinate vertex (the cash slot by package convention).
    """
    settings = settings or SolveSettings()
    c = np.asarray(numerator_coeffs, dtype=float)
    if c.shape != (n,):
        raise ValueError("numerator coefficients must have length n")
    if float(c.max()) <= 0.0:
        cash = np.zeros(n)
        cash[-1] = 1.0
        return SolveReport(
            solution=cash, objective=0.0, iterations=0, converged=True, degenerate=True
        )
    f = np.zeros(n)
    f[int(np.argmax(c))] = 1.0
    t = float(c @ f) / max(denominator(f), 1e-12)
    history = [t]
    total_iterations = 0
    converged = False
    for _ in range(100):
        rep = maximize_on_simplex(
            lambda x: float(c @ x) - t * denominator(x),
            lambda x: c - t * np.asarray(denominator_gradient(x), dtype=float),
            n,
            settings,
            start=f,
        )
        total_iterations += rep.iterations
        d = denominator(rep.solution)
        if d < 1e-12:
            # Collapsed onto a zero-variance point; keep the previous iterate.
            converged = True
            break
        f = rep.solution
        t_new = float(c @ f) / d
        history.append(t_new)
        if t_new - t < max(settings.tolerance, 1e-12):
            t = max(t_new, t)
            converged = True
            break
        t = t_new
    return SolveReport(
        solution=f,
        objective=t,
        iterations=total_iterations,
        converged=converged,
        ratio_history=tuple(history),
    )


def maximize_with_scalar_constraint(
    objective: Objective,
    gradient: Gradient,
    constraint: Objective,
    constraint_gradient: Gradient,
    n: int,
    settings: SolveSettings | None = None,
    start: np.ndarray | None = None,
) -> SolveReport:
    """Maximize a concave objective subject to one convex constraint <= 0.

    Augmented Lagrangian (method of multipliers): solve a sequence of smooth
    problems ``objective - (weight / 2) * max(multiplier / weight +
    constraint, 0)^2`` with a running multiplier estimate, warm-starting each
    stage at the previous solution. The multiplier absorbs the constraint
    force, so the weight can stay moderate and the inner problems stay well
    conditioned; the weight grows only when a multiplier update fails to cut
    the violation in half. Stops once the violation is an order of magnitude
    inside ``RESIDUAL_TOL`` and the inner solve is stationary (or the
    iterate has stopped moving); raises :class:`InfeasibleConstraint` when
    the violation still exceeds ``RESIDUAL_TOL`` after the last stage.
    """
    settings = settings or SolveSettings()
    x = start
    previous: np.ndarray | None = None
    weight = settings.penalty_initial
    multiplier = 0.0
    residuals: list[float] = []
    total_iterations = 0
    converged = False
    max_updates = 10 * settings.penalty_stages
    for _ in range(max_updates):

        def penalized(f: np.ndarray, w: float = weight, m: float = multiplier) -> float:
            shifted = max(m / w + constraint(f), 0.0)
            return objective(f) - 0.5 * w * shifted * shifted

        def penalized_grad(
            f: np.ndarray, w: float = weight, m: float = multiplier
        ) -> np.ndarray:
            g = np.asarray(gradient(f), dtype=float)
            shifted = m / w + constraint(f)
            if shifted > 0.0:
                g = g - (w * shifted) * np.asarray(constraint_gradient(f), dtype=float)
            return g

        rep = maximize_on_simplex(penalized, penalized_grad, n, settings, start=x)
        previous, x = x, rep.solution
        converged = rep.converged
        total_iterations += rep.iterations
        violation = float(constraint(x))
        residuals.append(max(violation, 0.0))
        multiplier = max(0.0, multiplier + weight * violation)
        stalled = previous is not None and float(np.abs(x - previous).max()) <= 1e-10
        if residuals[-1] <= 0.1 * RESIDUAL_TOL and (rep.converged or stalled):
            break
        if len(residuals) > 1 and residuals[-1] > 0.5 * residuals[-2]:
            weight = min(weight * settings.penalty_growth, 1e8)
    if residuals[-1] > RESIDUAL_TOL:
        raise InfeasibleConstraint(
            f"constraint violation {residuals[-1]:.3e} above {RESIDUAL_TOL} "
            f"after {len(residuals)} penalty stages"
        )
    return SolveReport(
        solution=x,
        objective=_check_finite(objective(x)),
        iterations=total_iterations,
        converged=converged,
        constraint_residual=residuals[-1],
        residual_history=tuple(residuals),
    )


def _pattern_polish(
    value: Objective, x: np.ndarray, vx: float, initial_radius: float = 0.05
) -> tuple[np.ndarray, float]:
    """Derivative-free finisher: pairwise mass moves with shrinking radius.

    Moves ``min(radius, x[donor])`` of mass between every ordered coordinate
    pair, keeping strict improvements, halving the radius when a full sweep
    finds none. These directions positively span the simplex tangent space,
    so for concave objectives the final point is stationary to within the
    final radius.
    """
    n = x.size
    radius = initial_radius
    while radius > 1e-8:
        improved = False
        for donor in range(n):
            if x[donor] <= 0.0:
                continue
            d = min(radius, float(x[donor]))
            for recipient in range(n):
                if recipient == donor:
                    continue
                y = x.copy()
                y[donor] -= d
                y[recipient] += d
                vy = value(y)
                if np.isfinite(vy) and vy > vx + 1e-15:
                    x, vx = y, float(vy)
                    improved = True
                    break
            if improved:
                break
        if not improved:
            radius *= 0.5
    return x, vx


def maximize_subgradient_on_simplex(
    value: Objective,
    supergradient: Gradient,
    n: int,
    settings: SolveSettings | None = None,
    start: np.ndarray | None = None,
) -> SolveReport:
    """Maximize a nonsmooth concave function given a supergradient oracle.

    Projected supergradient ascent with backtracking where a strict
    improvement exists, a diminishing step otherwise (supergradient steps at
    kinks may not ascend), best-iterate tracking throughout, and a
    pattern-search polish of the best point at the end. Terminates early
    after 100 consecutive iterations without improving the best value.
    """
    if n < 2:
        raise ValueError("need at least two coordinates")
    settings = settings or SolveSettings()
    x = _barycenter(n) if start is None else project_to_simplex(start)
    vx = _check_finite(value(x))
    best_x, best_v = x, vx
    stall = 0
    iterations = 0
    converged = False
    for iterations in range(1, settings.max_iterations + 1):
        g = np.asarray(supergradient(x), dtype=float)
        step_to_go = project_to_simplex(x + g) - x
        if float(np.linalg.norm(step_to_go)) < settings.tolerance:
            converged = True
            break
        t = settings.initial_step
        accepted = False
        for _ in range(40):
            y = project_to_simplex(x + t * g)
            vy = value(y)
            if np.isfinite(vy) and vy > vx + 1e-14:
                x, vx = y, float(vy)
                accepted = True
                break
            t *= settings.backtrack
        if not accepted:
            # Kink: take a diminishing step; best-iterate tracking keeps us safe.
            t = settings.initial_step / (1.0 + 0.1 * iterations)
            x = project_to_simplex(x + t * g)
            vy = value(x)
            vx = float(vy) if np.isfinite(vy) else vx
        if vx > best_v + 1e-15:
            best_x, best_v = x, vx
            stall = 0
        else:
            stall += 1
            if stall >= 100:
                break
    best_x, best_v = _pattern_polish(value, best_x, best_v)
    return SolveReport(
        solution=best_x, objective=best_v, iterations=iterations, converged=converged
    )


def finite_diff_check(
    objective: Objective,
    gradient: Gradient,
    point: np.ndarray | Sequence[float],
    step: float = 1e-6,
) -> float:
    """Largest relative mismatch between analytic and central-difference gradient.

    The point should be strictly interior (all coordinates larger than
    ``step``) so the off-simplex evaluations stay in the objective's domain.
    Each coordinate's mismatch is scaled by ``max(1, |analytic|)``.
    """
    point = np.asarray(point, dtype=float)
    g = np.asarray(gradient(point), dtype=float)
    worst = 0.0
    for i in range(point.size):
        bump = np.zeros(point.size)
        bump[i] = step
        fd = (objective(point + bump) - objective(point - bump)) / (2.0 * step)
        err = abs(fd - g[i]) / max(1.0, abs(g[i]))
        worst = max(worst, float(err))
    return worst
