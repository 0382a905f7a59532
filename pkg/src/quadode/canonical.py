"""Closed-form flow of the canonical planar system

    y1' = y1**2,
    y2' = rho1*y1**2 + rho2*y1*y2 + y2**2.

The first equation decouples; the ratio u = y2/y1 obeys a Riccati equation
whose solution is a Moebius function of the power [1 - y1(0) t]**(-delta)
with delta = sqrt((1 - rho2)**2 - 4*rho1).  Degenerate situations (initial
data on the y1 = 0 line, coincident ratio fixed points u(0) = u+/-, and the
delta = 0 logarithmic case) are classified once at solve time and evaluated
by their own formulas.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .errors import SingularPointError
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig, ensure_finite

_TWO_PI = 2.0 * math.pi

# Movable singular times may accumulate (oscillatory powers); enumeration of
# denominator zeros is capped at this many branch indices on each side.
_MAX_BRANCH_INDEX = 64


class CanonicalParams(NamedTuple):
    rho1: complex
    rho2: complex


class CanonicalState(NamedTuple):
    y1: complex
    y2: complex


class SolutionCase(str, Enum):
    GENERIC = "generic"
    FIXED_POINT_PLUS = "fixed_point_plus"
    FIXED_POINT_MINUS = "fixed_point_minus"
    DELTA_ZERO = "delta_zero"
    Y1_ZERO = "y1_zero"


@dataclass(frozen=True)
class CanonicalSolution:
    """Precomputed solved state of an initial-value problem.

    ``u0`` is y2(0)/y1(0) (None on the y1 = 0 line); ``u_bar`` is the
    coincident fixed point, populated only in the delta = 0 case.
    """

    params: CanonicalParams
    y10: complex
    y20: complex
    u0: complex | None
    u_plus: complex
    u_minus: complex
    delta: complex
    u_bar: complex | None
    case: SolutionCase


def canonical_rhs(p: CanonicalParams, y: CanonicalState) -> CanonicalState:
    """Time derivative (y1**2, rho1*y1**2 + rho2*y1*y2 + y2**2)."""
    y1, y2 = y
    return CanonicalState(y1 * y1, p.rho1 * y1 * y1 + p.rho2 * y1 * y2 + y2 * y2)


def solve_canonical(
    p: CanonicalParams,
    y0: CanonicalState,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> CanonicalSolution:
    """Classify the initial-value problem and precompute its solution data.

    All initial data are admitted.  The branch of delta is the principal
    square root; the solution is invariant under delta -> -delta (which only
    swaps u_plus and u_minus).
    """
    rho1 = ensure_finite(p.rho1, "rho1")
    rho2 = ensure_finite(p.rho2, "rho2")
    y10 = ensure_finite(y0.y1, "y1(0)")
    y20 = ensure_finite(y0.y2, "y2(0)")
    one_minus = 1.0 - rho2
    delta = cmath.sqrt(one_minus * one_minus - 4.0 * rho1)
    u_plus = (one_minus + delta) / 2.0
    u_minus = (one_minus - delta) / 2.0

    params = CanonicalParams(rho1, rho2)
    if abs(y10) <= tol.sing_tol * (1.0 + abs(y20)):
        return CanonicalSolution(
            params, 0.0 + 0.0j, y20, None, u_plus, u_minus, delta, None, SolutionCase.Y1_ZERO
        )
    u0 = y20 / y10
    if abs(delta) ** 2 <= tol.eq_tol * (abs(one_minus) ** 2 + abs(rho1)):
        u_bar = one_minus / 2.0
        return CanonicalSolution(
            params, y10, y20, u0, u_plus, u_minus, delta, u_bar, SolutionCase.DELTA_ZERO
        )
    u_scale = max(1.0, abs(u0), abs(u_plus), abs(u_minus))
    if abs(u0 - u_plus) <= tol.eq_tol * u_scale:
        case = SolutionCase.FIXED_POINT_PLUS
    elif abs(u0 - u_minus) <= tol.eq_tol * u_scale:
        case = SolutionCase.FIXED_POINT_MINUS
    else:
        case = SolutionCase.GENERIC
    return CanonicalSolution(params, y10, y20, u0, u_plus, u_minus, delta, None, case)


def eval_canonical_general(
    sol: CanonicalSolution,
    warped_t: complex,
    s: complex,
    log_s: complex,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> CanonicalState:
    """Evaluate at a (possibly complex) time given s = 1 - y1(0)*warped_t and
    a continued logarithm of s.

    This is the shared core behind real-time evaluation and the exponential
    lift, where the time argument traces a curve in the complex plane and the
    logarithm must be continued along it.
    """
    case = sol.case
    if case is SolutionCase.Y1_ZERO:
        den = 1.0 - sol.y20 * warped_t
        if abs(den) <= tol.sing_tol * (1.0 + abs(sol.y20 * warped_t)):
            raise SingularPointError(
                "pole of y2: 1 - y2(0) t vanishes", factor="1 - y2(0) t"
            )
        return CanonicalState(0.0 + 0.0j, sol.y20 / den)

    if abs(s) <= tol.sing_tol * (1.0 + abs(sol.y10 * warped_t)):
        raise SingularPointError(
            "pole of y1: 1 - y1(0) t vanishes", factor="1 - y1(0) t"
        )
    y1 = sol.y10 / s

    if case in (SolutionCase.FIXED_POINT_PLUS, SolutionCase.FIXED_POINT_MINUS):
        u = sol.u0
    elif case is SolutionCase.DELTA_ZERO:
        g = sol.u0 - sol.u_bar
        den = 1.0 + g * log_s
        if abs(den) <= tol.sing_tol * (1.0 + abs(g * log_s)):
            raise SingularPointError(
                "zero of the logarithmic ratio denominator", factor="log denominator"
            )
        u = (sol.u0 + sol.u_bar * g * log_s) / den
    else:
        w = cmath.exp(-sol.delta * log_s)
        dm = sol.u0 - sol.u_minus
        dp = sol.u0 - sol.u_plus
        den = dm - dp * w
        if abs(den) <= tol.sing_tol * (abs(dm) + abs(dp * w)):
            raise SingularPointError(
                "zero of the ratio denominator", factor="u denominator"
            )
        u = (sol.u_plus * dm - sol.u_minus * dp * w) / den
    return CanonicalState(y1, y1 * u)


def eval_canonical(
    sol: CanonicalSolution,
    t: float,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> CanonicalState:
    """State at real time t.

    The power/logarithm branch is continued along the straight base path
    s(t) = 1 - y1(0)*t from s(0) = 1; for a straight path this continuation
    coincides with the principal branch.
    """
    if sol.case is SolutionCase.Y1_ZERO:
        return eval_canonical_general(sol, t, 1.0 + 0.0j, 0.0 + 0.0j, tol)
    s = 1.0 - sol.y10 * t
    if abs(s) <= tol.sing_tol * (1.0 + abs(sol.y10 * t)):
        raise SingularPointError(
            "pole of y1: 1 - y1(0) t vanishes", factor="1 - y1(0) t", t=t
        )
    log_s = cmath.log(s)
    return eval_canonical_general(sol, t, s, log_s, tol)


def _real_candidate(tc: complex, t_max: float, imag_tol: float) -> float | None:
    if abs(tc.imag) > imag_tol * (1.0 + abs(tc)):
        return None
    tr = tc.real
    if 1e-300 < tr <= t_max:
        return tr
    return None


def _denominator_zero_times(sol: CanonicalSolution, t_max: float, imag_tol: float) -> list[float]:
    """Real zeros of the ratio denominator, by exact inversion.

    The denominator vanishes exactly when the continued logarithm L(t) of
    1 - y1(0)*t equals one of countably many target values; for real t the
    continued value is principal, so a target is admissible iff its imaginary
    part lies in (-pi, pi].  Each admissible target yields the candidate
    t = (1 - exp(target))/y1(0), kept when real and in range.  Targets are
    enumerated over a capped branch-index window, so at most the earliest
    ~2*_MAX_BRANCH_INDEX zeros are reported (zeros can accumulate at the
    y1 pole when delta has an imaginary part).
    """
    out: list[float] = []
    slack = 1e-9
    # |1 - y1(0)*t| <= 1 + |y1(0)|*t_max for admissible t, so targets with a
    # larger real part cannot yield in-range times (and would overflow exp)
    re_bound = math.log(1.0 + abs(sol.y10) * t_max) + 1.0

    def _candidate(lam: complex) -> float | None:
        if not (-math.pi - slack < lam.imag <= math.pi + slack):
            return None
        if lam.real > re_bound:
            return None
        tc = (1.0 - cmath.exp(lam)) / sol.y10
        return _real_candidate(tc, t_max, imag_tol)

    if sol.case is SolutionCase.DELTA_ZERO:
        g = sol.u0 - sol.u_bar
        if abs(g) == 0.0:
            return out
        tr = _candidate(-1.0 / g)
        if tr is not None:
            out.append(tr)
        return out
    if sol.case is not SolutionCase.GENERIC:
        return out
    dm = sol.u0 - sol.u_minus
    dp = sol.u0 - sol.u_plus
    if abs(dm) == 0.0 or abs(dp) == 0.0:
        return out
    log_w = cmath.log(dm / dp)
    for k in range(-_MAX_BRANCH_INDEX, _MAX_BRANCH_INDEX + 1):
        tr = _candidate(-(log_w + _TWO_PI * 1j * k) / sol.delta)
        if tr is not None:
            out.append(tr)
    return out


def singular_times(
    sol: CanonicalSolution,
    t_max: float,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> list[float]:
    """Sorted real singular times of the solution in (0, t_max].

    Reports the pole of y1 (of y2 on the y1 = 0 line) when it falls on the
    real axis, and the real zeros of the ratio denominator (or of its
    delta = 0 analogue).
    """
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    imag_tol = 1e-9
    candidates: list[float] = []

    pole_base = sol.y20 if sol.case is SolutionCase.Y1_ZERO else sol.y10
    if abs(pole_base) > 0.0:
        tc = 1.0 / pole_base
        tr = _real_candidate(tc, t_max, imag_tol)
        if tr is not None:
            candidates.append(tr)

    candidates.extend(_denominator_zero_times(sol, t_max, imag_tol))

    candidates.sort()
    out: list[float] = []
    for t in candidates:
        if not out or abs(t - out[-1]) > 1e-12 * (1.0 + abs(t)):
            out.append(t)
    return out
