"""Complex scalar utilities: tolerance policy, branch-continuous powers,
quadratic roots, and rational recognition.

All routines work on plain ``complex`` values and are pure functions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from .errors import NoRootError, SingularPointError


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative tolerances used throughout.

    eq_tol     -- algebraic identity / constraint checks
    sing_tol   -- proximity threshold for singular denominators and paths
    oracle_tol -- closed form vs numerical integrator agreement
    """

    eq_tol: float = 1e-12
    sing_tol: float = 1e-9
    oracle_tol: float = 1e-6

    def __post_init__(self):
        for name in ("eq_tol", "sing_tol", "oracle_tol"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if self.eq_tol > 1e-9:
            raise ValueError("eq_tol must not exceed 1e-9")


DEFAULT_TOLERANCES = ToleranceConfig()


def ensure_finite(value: complex, name: str = "value") -> complex:
    """Coerce to complex and reject NaN/Inf components."""
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must have finite components, got {z!r}")
    return z


def _segment_clearance(a: complex, b: complex) -> float:
    """Distance from the segment [a, b] to the origin."""
    d = b - a
    dd = d.real * d.real + d.imag * d.imag
    if dd == 0.0:
        return abs(a)
    t = -(a.real * d.real + a.imag * d.imag) / dd
    t = min(1.0, max(0.0, t))
    return abs(a + t * d)


def _log_increment(a: complex, b: complex, sing_tol: float) -> complex:
    # A chord avoiding 0 subtends an angle of modulus < pi at the origin, so
    # the principal log of the ratio is the exact continuation increment.
    scale = max(abs(a), abs(b))
    if scale == 0.0 or _segment_clearance(a, b) <= sing_tol * scale:
        raise SingularPointError(
            "continuation path passes through or within tolerance of 0",
            factor="log path",
        )
    return cmath.log(b / a)


def continued_log(path: Sequence[complex], sing_tol: float = DEFAULT_TOLERANCES.sing_tol) -> complex:
    """Logarithm at ``path[-1]`` continued along the polyline ``path``.

    Continuation starts from the principal value at ``path[0]``.  Consecutive
    waypoints are joined by straight segments; the caller must sample curved
    paths densely enough that the polyline is homotopic to the true path in
    the punctured plane.
    """
    if len(path) == 0:
        raise ValueError("path must contain at least one point")
    start = complex(path[0])
    if abs(start) == 0.0:
        raise SingularPointError("continuation path starts at 0", factor="log path")
    total = cmath.log(start)
    prev = start
    for raw in path[1:]:
        point = complex(raw)
        total += _log_increment(prev, point, sing_tol)
        prev = point
    return total


def cpow_continuous(
    base: complex,
    exponent: complex,
    path: Sequence[complex] | None = None,
    sing_tol: float = DEFAULT_TOLERANCES.sing_tol,
) -> complex:
    """Branch-continuous power ``base ** exponent``.

    The logarithm of the base is continued along ``path`` starting from the
    principal value at ``path[0]``.  When ``path`` is omitted it defaults to
    the straight segment from 1 to ``base`` (the convention used for all
    trajectory powers, whose base paths start at 1 at the initial time).
    """
    base = ensure_finite(base, "base")
    exponent = ensure_finite(exponent, "exponent")
    if abs(base) <= sing_tol * max(1.0, abs(complex(path[0])) if path else 1.0):
        raise SingularPointError("power base is at or near 0", factor="power base")
    if path is None:
        path = (1.0 + 0.0j, base)
    elif abs(complex(path[-1]) - base) > 1e-12 * max(1.0, abs(base)):
        raise ValueError("path must end at the base value")
    return cmath.exp(complex(exponent) * continued_log(path, sing_tol))


class QuadraticRoots(NamedTuple):
    first: complex
    second: complex
    linear_degenerate: bool


def _lex_pair(r1: complex, r2: complex) -> tuple[complex, complex]:
    if (r1.real, r1.imag) <= (r2.real, r2.imag):
        return r1, r2
    return r2, r1


def solve_quadratic(c2: complex, c1: complex, c0: complex) -> QuadraticRoots:
    """Both roots of ``c2 x^2 + c1 x + c0 = 0``, sorted by (re, im).

    A vanishing leading coefficient falls back to the linear root, returned
    twice with ``linear_degenerate`` set.  ``c2 == c1 == 0`` raises
    NoRootError (the message distinguishes the all-roots case ``c0 == 0``).
    """
    c2 = ensure_finite(c2, "c2")
    c1 = ensure_finite(c1, "c1")
    c0 = ensure_finite(c0, "c0")
    if c2 == 0:
        if c1 == 0:
            if c0 == 0:
                raise NoRootError("degenerate equation 0 = 0: every value is a root")
            raise NoRootError("equation reduces to a nonzero constant: no roots")
        root = -c0 / c1
        return QuadraticRoots(root, root, True)
    if c0 == 0:
        return QuadraticRoots(*_lex_pair(0.0 + 0.0j, -c1 / c2), False)
    disc = cmath.sqrt(c1 * c1 - 4.0 * c2 * c0)
    # Choose the sign that avoids cancellation between c1 and the square root.
    if c1.real * disc.real + c1.imag * disc.imag >= 0.0:
        q = -(c1 + disc) / 2.0
    else:
        q = -(c1 - disc) / 2.0
    return QuadraticRoots(*_lex_pair(q / c2, c0 / q), False)


def approx_rational(x: float, max_den: int, tol: float = 1e-9) -> Optional[tuple[int, int]]:
    """Best rational approximation k1/k2 with k2 <= max_den, if within tol.

    Uses continued-fraction convergents (via Fraction.limit_denominator); the
    returned pair is in lowest terms with a positive denominator.  Returns
    None when no denominator-bounded rational lies within ``tol`` of ``x``.
    """
    if max_den < 1:
        raise ValueError("max_den must be at least 1")
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    best = Fraction(x).limit_denominator(max_den)
    if abs(Fraction(x) - best) <= Fraction(tol):
        return best.numerator, best.denominator
    return None
