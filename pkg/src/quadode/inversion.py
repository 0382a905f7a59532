"""Recovery of the conjugacy data from the six coefficients.

Membership in the explicitly solvable subclass is decided by two quintic
polynomial constraints on the coefficients.  When they hold, the chain

    beta  ->  b22, b12  ->  quadratic for b21  ->  b11  ->  (rho1, rho2)

recovers the full decomposition.  The b21 equation is cubic on paper, but
its leading coefficient C3 vanishes on the constraint variety (an empirical
fact, checked here on every inversion), leaving a quadratic whose two roots
give two equivalent decompositions ("branches") of the same system.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .canonical import CanonicalParams
from .errors import (
    BetaIndeterminateError,
    DegenerateInversionError,
    InternalConsistencyError,
    NoRootError,
    NotSolvableError,
    RhoIndeterminateError,
)
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig, solve_quadratic
from .transform import LinearChange, Mat2, QuadraticSystem, forward_map, linear_change_from_b

# Gate on |C3| relative to the largest cubic coefficient before the cubic is
# truncated to a quadratic; beyond this the inversion refuses to proceed.
C3_GATE = 1e-6

AlphaRows = tuple[tuple[complex, complex, complex], tuple[complex, complex, complex]]


@dataclass(frozen=True)
class ConstraintResiduals:
    """Evaluated constraint polynomials with monomial-sum normalizers.

    ``satisfied`` means both |r_i| <= eq_tol * scale_i.  The scales are sums
    of the magnitudes of the expanded monomials, which makes the verdict
    invariant under coefficient rescaling.
    """

    r1: complex
    r2: complex
    scale1: float
    scale2: float
    satisfied: bool

    @property
    def rel1(self) -> float:
        return abs(self.r1) / self.scale1 if self.scale1 > 0 else (0.0 if self.r1 == 0 else float("inf"))

    @property
    def rel2(self) -> float:
        return abs(self.r2) / self.scale2 if self.scale2 > 0 else (0.0 if self.r2 == 0 else float("inf"))


@dataclass(frozen=True)
class Decomposition:
    """One inversion branch: conjugacy matrix b, canonical parameters, delta."""

    beta: complex
    b: Mat2
    rho: CanonicalParams
    delta: complex
    branch: str  # "plus" (lexicographically first b21 root) or "minus"


@dataclass(frozen=True)
class InversionDiagnostics:
    """Intermediate quantities recorded for every inversion attempt.

    ``alpha`` holds the pulled coefficient combinations for the plus branch
    (None when the attempt failed before branches were built).  ``cubic`` is
    (C0, C1, C2, C3); ``c3_residual`` is |C3| over the largest |Ck| and
    ``b221_residual`` is normalized against the monomial scale of B221.
    """

    alpha: AlphaRows | None
    b110: complex
    b220: complex
    b221: complex
    cubic: tuple[complex, complex, complex, complex]
    c3_residual: float
    b221_residual: float


@dataclass(frozen=True)
class InversionResult:
    plus: Decomposition
    minus: Decomposition
    diagnostics: InversionDiagnostics

    @property
    def branches(self) -> tuple[Decomposition, Decomposition]:
        return (self.plus, self.minus)

    def branch(self, label: str) -> Decomposition:
        if label == "plus":
            return self.plus
        if label == "minus":
            return self.minus
        raise ValueError(f"branch must be 'plus' or 'minus', got {label!r}")


def _constraint_parts(sys: QuadraticSystem):
    n_val = sys.c12 * sys.c22 - 4.0 * sys.c13 * sys.c21
    n_scale = abs(sys.c12 * sys.c22) + 4.0 * abs(sys.c13 * sys.c21)
    d_val = (sys.c22 - 2.0 * sys.c11) * sys.c22 + 2.0 * sys.c21 * (sys.c12 - 2.0 * sys.c23)
    d_scale = (
        abs(sys.c22) ** 2
        + 2.0 * abs(sys.c11 * sys.c22)
        + 2.0 * abs(sys.c21 * sys.c12)
        + 4.0 * abs(sys.c21 * sys.c23)
    )
    return n_val, n_scale, d_val, d_scale


def constraint_residuals(
    sys: QuadraticSystem, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> ConstraintResiduals:
    """Evaluate both solvability constraints as written, with normalizers."""
    n_val, n_scale, d_val, d_scale = _constraint_parts(sys)
    r1 = (
        2.0 * sys.c21 * n_val * n_val
        + (sys.c22 - 2.0 * sys.c11) * n_val * d_val
        - sys.c12 * d_val * d_val
    )
    scale1 = (
        2.0 * abs(sys.c21) * n_scale * n_scale
        + (abs(sys.c22) + 2.0 * abs(sys.c11)) * n_scale * d_scale
        + abs(sys.c12) * d_scale * d_scale
    )
    r2 = (
        sys.c22 * n_val * n_val
        - (sys.c12 - 2.0 * sys.c23) * n_val * d_val
        - 2.0 * sys.c13 * d_val * d_val
    )
    scale2 = (
        abs(sys.c22) * n_scale * n_scale
        + (abs(sys.c12) + 2.0 * abs(sys.c23)) * n_scale * d_scale
        + 2.0 * abs(sys.c13) * d_scale * d_scale
    )
    satisfied = abs(r1) <= tol.eq_tol * scale1 and abs(r2) <= tol.eq_tol * scale2
    return ConstraintResiduals(r1, r2, scale1, scale2, satisfied)


def compute_beta(sys: QuadraticSystem, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> complex:
    """Ratio b12/b22 from the first-degree combination of the two ratio
    quadratics; indeterminate when its denominator vanishes."""
    n_val, n_scale, d_val, d_scale = _constraint_parts(sys)
    if d_scale == 0.0 or abs(d_val) <= tol.eq_tol * d_scale:
        raise BetaIndeterminateError(
            "beta denominator (c22 - 2 c11) c22 + 2 c21 (c12 - 2 c23) vanishes",
            formula="beta",
        )
    return n_val / d_val


def alpha_from_change(sys: QuadraticSystem, ch: LinearChange) -> AlphaRows:
    """Pulled coefficient rows alpha[n][l] = a_n1 c_1l + a_n2 c_2l."""
    rows = []
    for n in range(2):
        an1, an2 = ch.a[n]
        rows.append(tuple(an1 * sys.c[0][l] + an2 * sys.c[1][l] for l in range(3)))
    return (rows[0], rows[1])


def _rho_pair_a(sys: QuadraticSystem, b: Mat2) -> CanonicalParams:
    (b11, b12), (b21, b22) = b
    rho1 = (
        b21 * b21 * (1.0 - b12 * sys.c11 - b22 * sys.c12)
        + b11 * b11 * b22 * sys.c21
        + b11 * b21 * (b12 * sys.c21 - b22 * (sys.c11 - sys.c22))
    ) / (b22 * b22)
    rho2 = (
        2.0 * b21
        - 2.0 * b12 * b21 * sys.c11
        - b21 * b22 * sys.c12
        + 2.0 * b11 * b12 * sys.c21
        + b11 * b22 * sys.c22
    ) / b22
    return CanonicalParams(rho1, rho2)


def _rho_pair_b(sys: QuadraticSystem, b: Mat2) -> CanonicalParams:
    (b11, b12), (b21, b22) = b
    rho1 = (
        b12 * b21 * b21 * sys.c13
        + b11 * b21 * (b22 * sys.c13 + b12 * (sys.c12 - sys.c23))
        + b11 * b11 * (1.0 - b12 * sys.c22 - b22 * sys.c23)
    ) / (b12 * b12)
    rho2 = (
        b11 * (2.0 - b12 * sys.c22 - 2.0 * b22 * sys.c23)
        + b12 * b21 * sys.c12
        + 2.0 * b21 * b22 * sys.c13
    ) / b12
    return CanonicalParams(rho1, rho2)


def _rho_pair_c(sys: QuadraticSystem, b: Mat2) -> CanonicalParams:
    (b11, b12), (b21, b22) = b
    rho1 = (
        b21 * b21 * b22 * sys.c13
        + b11 * b11 * b12 * sys.c21
        + b11 * b21 * (1.0 - b12 * sys.c11 - b22 * sys.c23)
    ) / (b12 * b22)
    rho2 = (
        b21 / b22
        + (b12 * (-b21 * sys.c11 + b11 * sys.c21)) / b22
        + (b11 + b21 * b22 * sys.c13 - b11 * b22 * sys.c23) / b12
    )
    return CanonicalParams(rho1, rho2)


def rho_from_b(
    sys: QuadraticSystem, b, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> tuple[CanonicalParams | None, CanonicalParams | None, CanonicalParams | None]:
    """All applicable candidates from the three parameter-recovery pairs.

    Entries are None when the pair's divisor (b22, b12, or both) vanishes.
    On a valid decomposition the applicable candidates agree.
    """
    b = tuple(tuple(complex(v) for v in row) for row in b)
    (b11, b12), (b21, b22) = b
    scale = max(abs(b11), abs(b12), abs(b21), abs(b22))
    ok22 = abs(b22) > tol.eq_tol * scale
    ok12 = abs(b12) > tol.eq_tol * scale
    cand_a = _rho_pair_a(sys, b) if ok22 else None
    cand_b = _rho_pair_b(sys, b) if ok12 else None
    cand_c = _rho_pair_c(sys, b) if (ok12 and ok22) else None
    if cand_a is None and cand_b is None and cand_c is None:
        raise RhoIndeterminateError(
            "all three parameter-recovery pairs have vanishing divisors",
            formula="rho pairs",
        )
    return (cand_a, cand_b, cand_c)


def _cubic_coefficients(sys: QuadraticSystem, beta: complex):
    """Coefficients (C0..C3) of the b21 equation, with monomial scales."""
    ab = abs(beta)
    p = sys.c11 - beta * sys.c21
    sp = abs(sys.c11) + ab * abs(sys.c21)
    q = 1.0 - p
    sq = 1.0 + sp
    t1 = sys.c13 + beta * (sys.c12 - sys.c23) + beta * beta * (sys.c11 - sys.c22)
    st1 = abs(sys.c13) + ab * (abs(sys.c12) + abs(sys.c23)) + ab * ab * (abs(sys.c11) + abs(sys.c22))
    b3c = beta**3 * sys.c21
    sb3c = ab**3 * abs(sys.c21)

    c0 = beta * beta * sys.c21 * q
    s0 = ab * ab * abs(sys.c21) * sq
    c1 = p * (b3c - q * (t1 - 2.0 * b3c))
    s1 = sp * (sb3c + sq * (st1 + 2.0 * sb3c))
    c2 = -beta * p * p * ((t1 - 2.0 * b3c) + q * (t1 - b3c))
    s2 = ab * sp * sp * ((st1 + 2.0 * sb3c) + sq * (st1 + sb3c))
    c3 = -beta * beta * p**3 * (t1 - b3c)
    s3 = ab * ab * sp**3 * (st1 + sb3c)
    return (c0, c1, c2, c3), (s0, s1, s2, s3), p, sp, t1, st1, b3c, sb3c


def _solve_b21(cubic, scales, tol: ToleranceConfig) -> tuple[complex, complex]:
    """Roots of the truncated (quadratic) b21 equation, lexicographically sorted.

    Coefficients below their monomial scale are treated as exact zeros.  The
    all-zero case arises for canonical-form inputs, where b21 is a free shear
    parameter; the representative b21 = 0 is returned for both branches.
    """
    c0, c1, c2, _ = cubic
    s0, s1, s2, _ = scales
    z0 = abs(c0) <= tol.eq_tol * s0
    z1 = abs(c1) <= tol.eq_tol * s1
    z2 = abs(c2) <= tol.eq_tol * s2
    if z2 and z1 and z0:
        return (0.0 + 0.0j, 0.0 + 0.0j)
    try:
        roots = solve_quadratic(0.0 if z2 else c2, 0.0 if z1 else c1, 0.0 if z0 else c0)
    except NoRootError as exc:
        raise DegenerateInversionError(
            f"b21 equation degenerates: {exc}", formula="b21 quadratic"
        ) from exc
    return (roots.first, roots.second)


def decompose(
    sys: QuadraticSystem, tol: ToleranceConfig = DEFAULT_TOLERANCES
) -> InversionResult:
    """Recover both decompositions of a constraint-satisfying system.

    Raises NotSolvableError when the constraints fail, DegenerateInversionError
    when a formula's genericity assumption breaks (such systems are
    indeterminate, not proven unsolvable), and InternalConsistencyError when
    C3 fails to vanish or a branch does not round-trip through the forward
    map.
    """
    residuals = constraint_residuals(sys, tol)
    if not residuals.satisfied:
        raise NotSolvableError(
            "coefficients violate the solvability constraints "
            f"(relative residuals {residuals.rel1:.3e}, {residuals.rel2:.3e})",
            residuals=residuals,
        )
    beta = compute_beta(sys, tol)

    cubic, scales, p, sp, t1, st1, b3c, sb3c = _cubic_coefficients(sys, beta)
    if sp == 0.0 or abs(p) <= tol.eq_tol * sp:
        raise DegenerateInversionError("c11 - beta*c21 vanishes", formula="B110")
    b110 = 1.0 / p
    b220 = sys.c23 + beta * sys.c22 + beta * beta * sys.c21
    s220 = abs(sys.c23) + abs(beta) * abs(sys.c22) + abs(beta) ** 2 * abs(sys.c21)
    if s220 == 0.0 or abs(b220) <= tol.eq_tol * s220:
        raise DegenerateInversionError(
            "c23 + beta*c22 + beta^2*c21 vanishes", formula="b22 denominator"
        )
    b221 = -p * (t1 - b3c)
    s221 = sp * (st1 + sb3c)
    b221_residual = abs(b221) / s221 if s221 > 0 else 0.0

    max_c = max(abs(v) for v in cubic)
    c3_residual = abs(cubic[3]) / max_c if max_c > 0 else 0.0
    diagnostics = InversionDiagnostics(
        alpha=None,
        b110=b110,
        b220=b220,
        b221=b221,
        cubic=cubic,
        c3_residual=c3_residual,
        b221_residual=b221_residual,
    )
    if c3_residual > C3_GATE:
        raise InternalConsistencyError(
            f"cubic coefficient C3 does not vanish (relative size {c3_residual:.3e}); "
            "refusing to truncate the b21 equation",
            diagnostics=diagnostics,
        )

    b22 = 1.0 / b220
    b12 = beta * b22
    roots = _solve_b21(cubic, scales, tol)

    sys_scale = sys.max_abs()
    branches = []
    for label, b21 in zip(("plus", "minus"), roots):
        b11 = b110 + beta * b21
        b: Mat2 = ((b11, b12), (b21, b22))
        rho = _rho_pair_a(sys, b)
        one_minus = 1.0 - rho.rho2
        delta = cmath.sqrt(one_minus * one_minus - 4.0 * rho.rho1)
        rebuilt = forward_map(rho, linear_change_from_b(b, tol))
        dev = max(
            abs(rebuilt.c[n][l] - sys.c[n][l]) for n in range(2) for l in range(3)
        )
        if sys_scale > 0 and dev > 1e-9 * sys_scale:
            raise InternalConsistencyError(
                f"branch {label} does not reproduce the input coefficients "
                f"(deviation {dev:.3e} vs scale {sys_scale:.3e})",
                diagnostics=diagnostics,
            )
        branches.append(Decomposition(beta=beta, b=b, rho=rho, delta=delta, branch=label))

    plus, minus = branches
    diagnostics = InversionDiagnostics(
        alpha=alpha_from_change(sys, linear_change_from_b(plus.b, tol)),
        b110=b110,
        b220=b220,
        b221=b221,
        cubic=cubic,
        c3_residual=c3_residual,
        b221_residual=b221_residual,
    )
    return InversionResult(plus=plus, minus=minus, diagnostics=diagnostics)
