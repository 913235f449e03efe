import numpy as np
import pytest

from imexkg import (
    ButcherTableau,
    DoubleTableau,
    ImkgCoefficients,
    check_order2_general,
    check_order3_general,
    check_order_compact,
    classify_order,
    expand_imkg,
    lookup,
)

RNG = np.random.default_rng(20240817)


def coeffs(q, alpha, beta, alpha_hat, beta_hat, delta_hat):
    return ImkgCoefficients(
        q,
        np.asarray(alpha, float),
        np.asarray(beta, float),
        np.asarray(alpha_hat, float),
        np.asarray(beta_hat, float),
        np.asarray(delta_hat, float),
    )


def forward_euler_pair():
    one = ButcherTableau(np.zeros((1, 1)), np.ones(1))
    return DoubleTableau("euler", one, one)


class TestGeneralConditions:
    def test_imkg232a_second_order(self):
        report = check_order2_general(lookup("IMKG232a").tableau)
        assert report.max_abs_residual < 1e-14
        assert report.order_classified == 2

    def test_imkg254c_second_order(self):
        report = check_order2_general(lookup("IMKG254c").tableau)
        assert report.max_abs_residual < 1e-14

    def test_forward_euler_pair_first_order(self):
        report = check_order2_general(forward_euler_pair())
        assert report.order_classified == 1
        assert report.residual("b.c") == pytest.approx(-0.5)

    def test_imkg343a_third_order_all_22(self):
        report = check_order3_general(lookup("IMKG343a").tableau)
        assert len(report.residuals) == 22
        assert report.max_abs_residual < 1e-14
        assert report.order_classified == 3

    def test_imkg353a_third_order(self):
        report = check_order3_general(lookup("IMKG353a").tableau)
        assert report.max_abs_residual < 1e-13

    def test_imkg232a_is_not_third_order(self):
        report = check_order3_general(lookup("IMKG232a").tableau)
        assert abs(report.residual("b.A.c")) >= 1 / 36 - 1e-12
        assert report.order_classified == 2

    def test_order3_pass_implies_order2_pass(self):
        for name in ("IMKG342a", "IMKG343a", "IMKG353a"):
            r3 = check_order3_general(lookup(name).tableau)
            r2 = check_order2_general(lookup(name).tableau)
            assert r3.order_classified == 3
            assert r2.order_classified == 2


class TestClassify:
    def test_registry_orders(self):
        assert classify_order(lookup("IMKG252b").tableau) == 2
        assert classify_order(lookup("IMKG353a").tableau) == 3

    def test_zero_weights_classify_zero(self):
        A = np.zeros((2, 2))
        A[1, 0] = 0.5
        zero = ButcherTableau(A, np.zeros(2))
        assert classify_order(DoubleTableau("zero", zero, zero)) == 0


class TestCompactForm:
    def test_imkg343a_versions(self):
        c = lookup("IMKG343a").coefficients
        report = check_order_compact(c, 3)
        assert report.max_abs_residual < 1e-14
        assert report.order_classified == 3

    def test_imkg342a_inner_sums(self):
        c = lookup("IMKG342a").coefficients
        report = check_order_compact(c, 3)
        assert report.max_abs_residual < 1e-14

    def test_alpha_q_residual(self):
        c = coeffs(3, [0.2, 2 / 3, 0.5], [0, 0.25], [0.1, 0.2, 0.75], [0, 0.25], [1, 1])
        report = check_order_compact(c, 3)
        assert report.residual("aq=3/4") == pytest.approx(-0.25)

    def test_target_order_validated(self):
        with pytest.raises(ValueError):
            check_order_compact(lookup("IMKG343a").coefficients, 4)


def _project_order2(q, draw):
    """Random coefficients projected onto the second-order constraint set."""
    a_top = draw.uniform(0.4, 1.6)
    beta = draw.uniform(-0.5, 0.5, size=q - 1)
    beta_hat = draw.uniform(-0.5, 0.5, size=q - 1)
    dh = draw.uniform(-0.8, 0.8, size=q - 1)
    alpha = draw.uniform(-1.0, 1.0, size=q)
    alpha_hat = draw.uniform(-1.0, 1.0, size=q)
    alpha[q - 1] = a_top
    alpha_hat[q - 1] = a_top
    beta[q - 2] = 1.0 - a_top
    beta_hat[q - 2] = 1.0 - a_top
    b_lower = beta[q - 3] if q >= 3 else 0.0
    bh_lower = beta_hat[q - 3] if q >= 3 else 0.0
    alpha[q - 2] = 0.5 / a_top - b_lower
    alpha_hat[q - 2] = 0.5 / a_top - bh_lower - dh[q - 2]
    return coeffs(q, alpha, beta, alpha_hat, beta_hat, dh)


def _project_order3(q, draw):
    beta = draw.uniform(-0.5, 0.5, size=q - 1)
    beta_hat = draw.uniform(-0.5, 0.5, size=q - 1)
    dh = draw.uniform(-0.8, 0.8, size=q - 1)
    alpha = draw.uniform(-1.0, 1.0, size=q)
    alpha_hat = draw.uniform(-1.0, 1.0, size=q)
    alpha[q - 1] = 0.75
    alpha_hat[q - 1] = 0.75
    beta[q - 2] = 0.25
    beta_hat[q - 2] = 0.25
    a_sub = draw.uniform(0.4, 1.2)  # alpha_{q-1}
    ah_sub = draw.uniform(-1.0, 1.0)
    alpha[q - 2] = a_sub
    alpha_hat[q - 2] = ah_sub
    beta[q - 3] = 2.0 / 3.0 - a_sub
    dh[q - 2] = (1.0 - ah_sub / a_sub) / 3.0
    beta_hat[q - 3] = 2.0 / 3.0 - ah_sub - dh[q - 2]
    inner = 2.0 / (9.0 * a_sub)
    b_lower = beta[q - 4] if q >= 4 else 0.0
    bh_lower = beta_hat[q - 4] if q >= 4 else 0.0
    alpha[q - 3] = inner - b_lower
    alpha_hat[q - 3] = inner - dh[q - 3] - bh_lower
    return coeffs(q, alpha, beta, alpha_hat, beta_hat, dh)


class TestEquivalence:
    """The compact-form conditions match the general tableau conditions."""

    @pytest.mark.parametrize("q", [2, 3, 4, 5, 6])
    def test_order2_on_constraint_set(self, q):
        for _ in range(20):
            c = _project_order2(q, RNG)
            assert check_order_compact(c, 2).max_abs_residual < 1e-12
            general = check_order2_general(expand_imkg(c, "proj"))
            assert general.max_abs_residual < 1e-12

    @pytest.mark.parametrize("q", [3, 4, 5, 6])
    def test_order3_on_constraint_set(self, q):
        for _ in range(20):
            c = _project_order3(q, RNG)
            assert check_order_compact(c, 3).max_abs_residual < 1e-12
            general = check_order3_general(expand_imkg(c, "proj"))
            assert general.max_abs_residual < 1e-12

    @pytest.mark.parametrize("q", [2, 3, 4, 5])
    def test_off_constraint_set_both_fail(self, q):
        for _ in range(20):
            c = _project_order2(q, RNG)
            bumped = coeffs(
                q,
                c.alpha + np.eye(1, q, q - 2)[0] * 0.05,
                c.beta,
                c.alpha_hat,
                c.beta_hat,
                c.delta_hat,
            )
            compact_fails = check_order_compact(bumped, 2).max_abs_residual > 1e-6
            general_fails = (
                check_order2_general(expand_imkg(bumped, "bumped")).max_abs_residual
                > 1e-6
            )
            assert compact_fails == general_fails == True  # noqa: E712

    def test_registry_agreement(self):
        from imexkg import registry

        for entry in (e for e in registry() if e.coefficients is not None):
            p = entry.record.order
            compact_ok = check_order_compact(entry.coefficients, p).max_abs_residual <= 1e-10
            general = (
                check_order2_general(entry.tableau)
                if p == 2
                else check_order3_general(entry.tableau)
            )
            assert compact_ok == (general.max_abs_residual <= 1e-10), entry.name
