"""Constraint gate and recovery of the decomposition data."""

import random

import pytest

from quadode import (
    BetaIndeterminateError,
    DegenerateInversionError,
    NotSolvableError,
    QuadraticSystem,
    alpha_from_change,
    compute_beta,
    constraint_residuals,
    decompose,
    forward_map,
    linear_change_from_b,
    rho_from_b,
)
from conftest import (
    ALL_EXAMPLES,
    EXAMPLE1,
    EXAMPLE2,
    EXAMPLE3,
    sample_decomposition_data,
    sample_gauge_decomposition_data,
)


def close(z, w, tol=1e-12):
    return abs(z - w) <= tol * max(1.0, abs(w))


def perturbed(sys, n, l, amount=0.1):
    rows = [list(r) for r in sys.c]
    rows[n][l] += amount
    return QuadraticSystem((tuple(rows[0]), tuple(rows[1])))


def branch_tuples(result):
    """(b11, b21, rho1, rho2) per branch, as a set keyed by rounded values."""
    out = {}
    for dec in result.branches:
        out[dec.branch] = (dec.b[0][0], dec.b[1][0], dec.rho.rho1, dec.rho.rho2)
    return out


class TestConstraints:
    @pytest.mark.parametrize("sys", ALL_EXAMPLES, ids=["ex1", "ex2", "ex3"])
    def test_reference_systems_satisfy(self, sys):
        res = constraint_residuals(sys)
        assert res.satisfied
        assert res.rel1 <= 1e-12 and res.rel2 <= 1e-12

    def test_perturbation_violates(self):
        res = constraint_residuals(perturbed(EXAMPLE1, 0, 0))
        assert not res.satisfied

    @pytest.mark.parametrize("n,l", [(n, l) for n in range(2) for l in range(3)])
    def test_all_single_coefficient_perturbations_violate(self, n, l):
        assert not constraint_residuals(perturbed(EXAMPLE1, n, l)).satisfied


class TestBeta:
    def test_reference_values(self):
        assert close(compute_beta(EXAMPLE2), 2.0)
        assert close(compute_beta(EXAMPLE1), -3.0)
        assert close(compute_beta(EXAMPLE3), 5 / 3, tol=1e-13)

    def test_canonical_form_gives_zero(self):
        sys = QuadraticSystem(((1, 0, 0), (0.25, 0.5, 1)))
        assert compute_beta(sys) == 0

    def test_indeterminate(self):
        # numerator and denominator both vanish identically
        sys = QuadraticSystem(((1, 0, 1), (0, 0, 1)))
        with pytest.raises(BetaIndeterminateError):
            compute_beta(sys)


class TestDecomposeGolden:
    def test_first_reference(self):
        result = decompose(EXAMPLE1)
        for dec in result.branches:
            assert close(dec.beta, -3.0)
            assert close(dec.b[0][1], 0.5)  # b12
            assert close(dec.b[1][1], -1 / 6)  # b22
            assert close(dec.delta**2, -5.0)
        tuples = branch_tuples(result)
        assert all(close(g, w) for g, w in zip(tuples["minus"], (0.0, -0.5, 1.5, 0.0)))
        assert all(close(g, w) for g, w in zip(tuples["plus"], (1.0, -5 / 6, 3.5, 4.0)))

    def test_second_reference(self):
        result = decompose(EXAMPLE2)
        for dec in result.branches:
            assert close(dec.b[0][1], 4 / 7)
            assert close(dec.b[1][1], 2 / 7)
            assert close(dec.delta**2, 7 / 3)
        tuples = branch_tuples(result)
        assert all(close(g, w) for g, w in zip(tuples["plus"], (0.0, -2 / 3, 7 / 9, -4 / 3)))
        assert all(
            close(g, w) for g, w in zip(tuples["minus"], (1.0, -1 / 6, -35 / 144, 13 / 6))
        )

    def test_third_reference(self):
        result = decompose(EXAMPLE3)
        for dec in result.branches:
            assert close(dec.beta, 5 / 3)
            assert close(dec.b[0][1], -2.5)
            assert close(dec.b[1][1], -1.5)
            assert close(dec.delta, 1.5)
        tuples = branch_tuples(result)
        assert all(
            close(g, w) for g, w in zip(tuples["plus"], (0.0, -3.9, -11 / 25, 17 / 10))
        )
        assert all(
            close(g, w) for g, w in zip(tuples["minus"], (1.0, -3.3, -14 / 25, 9 / 10))
        )

    def test_diagnostics_on_references(self):
        for sys in ALL_EXAMPLES:
            diag = decompose(sys).diagnostics
            assert diag.c3_residual <= 1e-12
            assert diag.b221_residual <= 1e-12
            assert diag.alpha is not None

    def test_not_solvable_raises_with_residuals(self):
        with pytest.raises(NotSolvableError) as excinfo:
            decompose(perturbed(EXAMPLE1, 1, 2))
        assert excinfo.value.residuals is not None
        assert not excinfo.value.residuals.satisfied

    def test_branch_labels_deterministic(self):
        a = decompose(EXAMPLE2)
        b = decompose(EXAMPLE2)
        assert a.plus.b == b.plus.b
        # plus carries the lexicographically first b21 root
        first, second = a.plus.b[1][0], a.minus.b[1][0]
        assert (first.real, first.imag) <= (second.real, second.imag)

    def test_canonical_form_passthrough(self):
        sys = QuadraticSystem(((1, 0, 0), (1, 3, 1)))
        result = decompose(sys)
        for dec in result.branches:
            assert dec.b == ((1, 0), (0, 1))
            assert close(dec.rho.rho1, 1.0)
            assert close(dec.rho.rho2, 3.0)

    def test_constraint_satisfying_but_indeterminate(self):
        # both constraint polynomials vanish identically, yet the ratio
        # equation is 0/0: reported indeterminate, not unsolvable
        sys = QuadraticSystem(((1, 0, 1), (0, 0, 1)))
        assert constraint_residuals(sys).satisfied
        with pytest.raises(DegenerateInversionError) as excinfo:
            decompose(sys)
        assert isinstance(excinfo.value, BetaIndeterminateError)
        assert not isinstance(excinfo.value, NotSolvableError)


class TestRhoFromB:
    def test_all_pairs_agree_on_reference_branch(self):
        dec = decompose(EXAMPLE1).branch("minus")
        candidates = rho_from_b(EXAMPLE1, dec.b)
        assert all(c is not None for c in candidates)
        for cand in candidates:
            assert close(cand.rho1, 1.5)
            assert abs(cand.rho2) <= 1e-12

    def test_third_reference_other_branch(self):
        dec = decompose(EXAMPLE3).branch("minus")
        for cand in rho_from_b(EXAMPLE3, dec.b):
            assert cand is not None
            assert close(cand.rho1, -14 / 25)
            assert close(cand.rho2, 9 / 10)

    def test_b12_zero_flags_pairs(self):
        sys = QuadraticSystem(((1, 0, 0), (1, 3, 1)))
        candidates = rho_from_b(sys, ((1, 0), (0, 1)))
        assert candidates[0] is not None
        assert candidates[1] is None and candidates[2] is None


class TestRandomizedProperties:
    def test_shear_invariants_recovered_for_any_generator(self):
        # beta, b12, b22 do not depend on which member of the shear family of
        # decompositions generated the system; they are always recovered.
        rng = random.Random(101)
        for _ in range(100):
            rho, b = sample_decomposition_data(rng)
            sys = forward_map(rho, linear_change_from_b(b))
            result = decompose(sys)
            (b11, b12), (b21, b22) = b
            beta_ref = b12 / b22
            for dec in result.branches:
                assert abs(dec.beta - beta_ref) <= 1e-9 * (1 + abs(beta_ref))
                assert abs(dec.b[0][1] - b12) <= 1e-9 * (1 + abs(b12))
                assert abs(dec.b[1][1] - b22) <= 1e-9 * (1 + abs(b22))

    def test_branches_are_gauge_representatives(self):
        # The two branches are the b11 = 0 and b11 = 1 members of the shear
        # family; the generating decomposition is shear-equivalent to them.
        rng = random.Random(101)
        for _ in range(100):
            rho, b = sample_decomposition_data(rng)
            sys = forward_map(rho, linear_change_from_b(b))
            result = decompose(sys)
            values = sorted((dec.b[0][0] for dec in result.branches), key=abs)
            assert abs(values[0]) <= 1e-9
            assert abs(values[1] - 1) <= 1e-9
            (g11, g12), (g21, g22) = b
            dec = result.plus
            shear_from_11 = (g11 - dec.b[0][0]) / g12
            shear_from_21 = (g21 - dec.b[1][0]) / g22
            assert abs(shear_from_11 - shear_from_21) <= 1e-9 * (1 + abs(shear_from_11))

    def test_forward_backward_consistency_on_gauge_section(self):
        # Generators with b11 in {0, 1} are recovered verbatim by one branch.
        rng = random.Random(111)
        for _ in range(100):
            rho, b = sample_gauge_decomposition_data(rng)
            sys = forward_map(rho, linear_change_from_b(b))
            result = decompose(sys)
            (b11, b12), (b21, b22) = b
            matches = [
                dec
                for dec in result.branches
                if abs(dec.b[1][0] - b21) <= 1e-8 * (1 + abs(b21))
            ]
            assert matches, "neither branch recovered the generating b21"
            dec = matches[0]
            assert abs(dec.b[0][0] - b11) <= 1e-8 * (1 + abs(b11))
            assert abs(dec.rho.rho1 - rho.rho1) <= 1e-8 * (1 + abs(rho.rho1))
            assert abs(dec.rho.rho2 - rho.rho2) <= 1e-8 * (1 + abs(rho.rho2))

    def test_c3_and_b221_vanish(self):
        rng = random.Random(202)
        for _ in range(100):
            rho, b = sample_decomposition_data(rng)
            sys = forward_map(rho, linear_change_from_b(b))
            diag = decompose(sys).diagnostics
            assert diag.c3_residual <= 1e-9
            assert diag.b221_residual <= 1e-9

    def test_branch_deltas_agree_up_to_sign(self):
        # Equal delta**2 across branches; within a branch, negating delta only
        # swaps the two ratio fixed points (the set is sign-invariant).
        rng = random.Random(303)
        for _ in range(60):
            rho, b = sample_decomposition_data(rng)
            sys = forward_map(rho, linear_change_from_b(b))
            result = decompose(sys)
            d1, d2 = result.plus.delta, result.minus.delta
            assert abs(d1**2 - d2**2) <= 1e-8 * (1 + abs(d1) ** 2)
            for dec, d in ((result.plus, d1), (result.minus, d2)):
                u_plus = (1 - dec.rho.rho2 + d) / 2
                u_minus = (1 - dec.rho.rho2 - d) / 2
                u_plus_flip = (1 - dec.rho.rho2 - d) / 2
                u_minus_flip = (1 - dec.rho.rho2 + d) / 2
                assert {u_plus, u_minus} == {u_plus_flip, u_minus_flip}

    def test_beta_satisfies_both_ratio_quadratics(self):
        rng = random.Random(404)
        for _ in range(60):
            rho, b = sample_decomposition_data(rng)
            sys = forward_map(rho, linear_change_from_b(b))
            beta = compute_beta(sys)
            c = sys
            r_a = 2 * c.c21 * beta**2 + (c.c22 - 2 * c.c11) * beta - c.c12
            s_a = (
                2 * abs(c.c21) * abs(beta) ** 2
                + (abs(c.c22) + 2 * abs(c.c11)) * abs(beta)
                + abs(c.c12)
            )
            r_b = c.c22 * beta**2 - (c.c12 - 2 * c.c23) * beta - 2 * c.c13
            s_b = (
                abs(c.c22) * abs(beta) ** 2
                + (abs(c.c12) + 2 * abs(c.c23)) * abs(beta)
                + 2 * abs(c.c13)
            )
            assert abs(r_a) <= 1e-10 * max(s_a, 1e-30)
            assert abs(r_b) <= 1e-10 * max(s_b, 1e-30)

    def test_alpha_consistency(self):
        # Pulled coefficient rows must match their closed forms in b and rho.
        rng = random.Random(505)
        for _ in range(60):
            rho, b = sample_decomposition_data(rng)
            sys = forward_map(rho, linear_change_from_b(b))
            result = decompose(sys)
            for dec in result.branches:
                ch = linear_change_from_b(dec.b)
                alpha = alpha_from_change(sys, ch)
                (b11, b12), (b21, b22) = dec.b
                bb = ch.det_b * ch.det_b
                r1, r2 = dec.rho.rho1, dec.rho.rho2
                expected = (
                    (b22 * b22 / bb, -2 * b12 * b22 / bb, b12 * b12 / bb),
                    (
                        (b21 * b21 + b22 * b22 * r1 - b21 * b22 * r2) / bb,
                        -(2 * b11 * b21 + 2 * b12 * b22 * r1 - (b11 * b22 + b12 * b21) * r2) / bb,
                        (b11 * b11 + b12 * b12 * r1 - b11 * b12 * r2) / bb,
                    ),
                )
                for n in range(2):
                    for l in range(3):
                        want = expected[n][l]
                        assert abs(alpha[n][l] - want) <= 1e-9 * (1 + abs(want))
