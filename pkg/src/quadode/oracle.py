"""Adaptive Dormand-Prince 5(4) integrator used as an independent reference.

States are complex pairs integrated componentwise; the error norm is the
maximum component modulus scaled by (abs_tol + rel_tol * |state|).  The
integrator terminates early when the step size collapses (a movable
singularity) or the state magnitude overflows, and records which.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

Pair = tuple[complex, complex]

REACHED_T_END = "reached_t_end"
STEP_COLLAPSE = "step_collapse"
STATE_OVERFLOW = "state_overflow"

_OVERFLOW_LIMIT = 1e12
_MAX_STEPS = 2_000_000

# Dormand-Prince 5(4) tableau (FSAL).
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)


@dataclass
class IntegrationResult:
    times: list[float]
    states: list[Pair]
    terminated: str
    last_time: float


def _as_rhs(system) -> Callable[[Pair], Pair]:
    rhs = getattr(system, "rhs", None)
    return rhs if rhs is not None else system


def _norm(y: Pair) -> float:
    return max(abs(y[0]), abs(y[1]))


def integrate(
    system,
    y0: Pair,
    t_end: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    t_eval: Sequence[float] | None = None,
    overflow_limit: float = _OVERFLOW_LIMIT,
) -> IntegrationResult:
    """Integrate an autonomous complex system from t = 0 to ``t_end``.

    ``system`` is either an object with an ``rhs(state) -> state`` method
    (quadratic or quadratic-plus-affine) or a bare callable.  When ``t_eval``
    is given, steps land exactly on those times and only they are recorded;
    otherwise every accepted step is recorded.
    """
    if not (rel_tol > 0 and abs_tol > 0):
        raise ValueError("tolerances must be positive")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    rhs = _as_rhs(system)
    y: Pair = (complex(y0[0]), complex(y0[1]))
    t = 0.0

    eval_times: list[float] | None = None
    if t_eval is not None:
        # tolerate sample times within rounding of t_end (grids often end
        # with t_end*n/n, which can land one ulp above)
        eval_times = [
            t_end if t_end < te <= t_end * (1.0 + 1e-12) else float(te)
            for te in sorted(float(te) for te in t_eval)
        ]
        if any(te < 0 or te > t_end for te in eval_times):
            raise ValueError("t_eval times must lie in [0, t_end]")

    times: list[float] = []
    states: list[Pair] = []

    def record(tt: float, yy: Pair):
        times.append(tt)
        states.append(yy)

    next_eval = 0
    if eval_times is not None:
        while next_eval < len(eval_times) and eval_times[next_eval] <= 0.0:
            record(0.0, y)
            next_eval += 1
    else:
        record(0.0, y)

    min_step = 1e-14 * t_end
    # the final capped step can land within rounding of t_end; treat that as done
    end_slack = 4e-16 * t_end
    k1 = rhs(y)
    f_norm = _norm(k1)
    h = min(t_end, 0.1 * t_end, 0.01 * (1.0 + _norm(y)) / (1.0 + f_norm))
    terminated = REACHED_T_END

    steps = 0
    while t < t_end - end_slack:
        steps += 1
        if steps > _MAX_STEPS:
            raise RuntimeError("integrator exceeded the step budget")
        if h < min_step:
            terminated = STEP_COLLAPSE
            break
        h = min(h, t_end - t)
        target = None
        if eval_times is not None and next_eval < len(eval_times):
            gap = eval_times[next_eval] - t
            if gap <= h:
                h = gap
                target = eval_times[next_eval]

        k = [k1]
        for i in range(1, 7):
            acc1 = 0.0 + 0.0j
            acc2 = 0.0 + 0.0j
            for aij, ki in zip(_A[i], k):
                acc1 += aij * ki[0]
                acc2 += aij * ki[1]
            k.append(rhs((y[0] + h * acc1, y[1] + h * acc2)))

        y5 = (
            y[0] + h * sum(b * ki[0] for b, ki in zip(_B5, k)),
            y[1] + h * sum(b * ki[1] for b, ki in zip(_B5, k)),
        )
        y4 = (
            y[0] + h * sum(b * ki[0] for b, ki in zip(_B4, k)),
            y[1] + h * sum(b * ki[1] for b, ki in zip(_B4, k)),
        )
        err = 0.0
        for i in range(2):
            denom = abs_tol + rel_tol * max(abs(y[i]), abs(y5[i]))
            err = max(err, abs(y5[i] - y4[i]) / denom)

        if err <= 1.0:
            t = t + h if target is None else target
            y = y5
            k1 = k[6]  # FSAL
            if eval_times is None:
                record(t, y)
            elif target is not None:
                record(t, y)
                next_eval += 1
            if _norm(y) > overflow_limit:
                terminated = STATE_OVERFLOW
                break
            factor = 0.9 * err ** -0.2 if err > 0 else 5.0
            h *= min(5.0, max(0.2, factor))
        else:
            h *= max(0.1, min(1.0, 0.9 * err ** -0.2))

    return IntegrationResult(times=times, states=states, terminated=terminated, last_time=t)


def compare_trajectories(
    closed: Callable[[float], Pair],
    numeric: IntegrationResult,
    sample_count: int,
) -> float:
    """Max relative deviation of the closed form from recorded numeric states.

    Samples ``sample_count`` of the recorded times (evenly spread); the
    deviation at each is |closed(t) - numeric(t)| / (1 + |closed(t)|) in the
    max-component norm.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be positive")
    if not numeric.times:
        raise ValueError("numeric result holds no states: ranges are disjoint")
    n = len(numeric.times)
    if sample_count >= n:
        indices = range(n)
    elif sample_count == 1:
        indices = [n - 1]
    else:
        indices = sorted(
            {round(i * (n - 1) / (sample_count - 1)) for i in range(sample_count)}
        )
    worst = 0.0
    for idx in indices:
        t = numeric.times[idx]
        ref = numeric.states[idx]
        val = closed(t)
        diff = max(abs(val[0] - ref[0]), abs(val[1] - ref[1]))
        norm = 1.0 + max(abs(val[0]), abs(val[1]))
        worst = max(worst, diff / norm)
    return worst
