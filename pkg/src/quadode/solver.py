"""End-to-end closed-form initial-value solver with singularity reporting."""

from __future__ import annotations

from dataclasses import dataclass

from .canonical import (
    CanonicalSolution,
    eval_canonical,
    singular_times,
    solve_canonical,
)
from .inversion import Decomposition, decompose
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig, ensure_finite
from .transform import LinearChange, Pair, QuadraticSystem, linear_change_from_b, pull_state, push_state


@dataclass(frozen=True)
class ClosedFormTrajectory:
    """Composed closed-form solution of an initial-value problem."""

    system: QuadraticSystem
    decomposition: Decomposition
    change: LinearChange
    canonical: CanonicalSolution
    x0: Pair
    t_singular: tuple[float, ...]


def default_horizon(sys: QuadraticSystem, x0: Pair) -> float:
    """Scale-aware horizon for singular-time reporting.

    Movable singularity times shrink as coefficients or initial data grow,
    so the default window scales inversely with their product.
    """
    return 10.0 / (1.0 + sys.max_abs() * max(abs(x0[0]), abs(x0[1])))


def _prepare(sys, x0, branch, tol):
    x0 = (ensure_finite(x0[0], "x1(0)"), ensure_finite(x0[1], "x2(0)"))
    dec = decompose(sys, tol).branch(branch)
    change = linear_change_from_b(dec.b, tol)
    canonical = solve_canonical(dec.rho, pull_state(change, x0), tol)
    return x0, dec, change, canonical


def solve_ivp(
    sys: QuadraticSystem,
    x0: Pair,
    branch: str = "plus",
    t_max: float | None = None,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> ClosedFormTrajectory:
    """Build the closed-form trajectory through x0.

    Initial data mapping onto the canonical y1 = 0 line are handled by that
    case, not an error.  Singular times are reported up to ``t_max``
    (default: ``default_horizon``).
    """
    x0, dec, change, canonical = _prepare(sys, x0, branch, tol)
    horizon = default_horizon(sys, x0) if t_max is None else t_max
    sing = singular_times(canonical, horizon, tol)
    return ClosedFormTrajectory(
        system=sys,
        decomposition=dec,
        change=change,
        canonical=canonical,
        x0=x0,
        t_singular=tuple(sing),
    )


def eval_trajectory(
    traj: ClosedFormTrajectory, t: float, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> Pair:
    """State x(t) = b * y(t) at real time t."""
    return push_state(traj.change, eval_canonical(traj.canonical, t, tol))


def first_singular_time(traj: ClosedFormTrajectory) -> float | None:
    return traj.t_singular[0] if traj.t_singular else None


def branch_equivalence_check(
    sys: QuadraticSystem,
    x0: Pair,
    t_samples,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> float:
    """Largest relative deviation between the two branch trajectories.

    Both decompositions of the same system must describe one trajectory;
    this evaluates both at the sample times and returns
    max |x_plus - x_minus| / (1 + |x_plus|) (max-component norm).
    """
    plus = solve_ivp(sys, x0, branch="plus", tol=tol)
    minus = solve_ivp(sys, x0, branch="minus", tol=tol)
    worst = 0.0
    for t in t_samples:
        xp = eval_trajectory(plus, t, tol)
        xm = eval_trajectory(minus, t, tol)
        diff = max(abs(xp[0] - xm[0]), abs(xp[1] - xm[1]))
        norm = 1.0 + max(abs(xp[0]), abs(xp[1]))
        worst = max(worst, diff / norm)
    return worst
