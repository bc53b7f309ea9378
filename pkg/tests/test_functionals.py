"""Finite-difference functionals: structure constants, F, G, classical F."""

from fractions import Fraction

import pytest
from mpmath import mp

from qpoly import (
    DEFAULT_BUDGET,
    DomainError,
    FDStep,
    F_classic,
    F_q_deriv,
    F_q_fd,
    G_q_deriv,
    G_q_fd,
    IndexQuad,
    QPoint,
    d_const,
    fwd_diff,
    psi_classical_deriv,
    psi_q,
    psi_q_deriv,
    psi_q_order,
    structure_constants,
)

from conftest import rel_err


# ---------------------------------------------------------------- constants


def test_structure_constants_examples():
    sc = structure_constants(IndexQuad(3, 2, 2, 1))
    assert sc.alpha == Fraction(1, 2)
    assert sc.beta == Fraction(2, 3)
    for m in (2, 4, 7):
        sc = structure_constants(IndexQuad(m + 1, m, 1, 0))
        assert sc.alpha == Fraction(1, m)
        assert sc.beta is None


def test_alpha_in_unit_interval_for_interior_quads():
    # 0 < alpha < 1 whenever r > m >= n > s >= 1 with r+s = m+n
    for r in range(2, 9):
        for s in range(1, r):
            for n in range(s + 1, (r + s) // 2 + 1):
                m = r + s - n
                if not (r > m >= n > s):
                    continue
                alpha = structure_constants(IndexQuad(r, m, n, s)).alpha
                assert 0 < alpha < 1, (r, m, n, s, alpha)


def test_index_quad_validation():
    with pytest.raises(DomainError):
        IndexQuad(2, 3, 1, 0)  # r < m
    with pytest.raises(DomainError):
        IndexQuad(3, 2, 2, -1)
    with pytest.raises(DomainError):
        F_q_fd(IndexQuad(4, 2, 2, 1), QPoint(0.5, 1.0), FDStep(0.5))  # unbalanced


def test_d_const_cases():
    assert d_const(3, 0.5) == 2
    assert d_const(3, 2.0) == 1
    assert d_const(1, 0.5) == 1
    assert d_const(2, 0.5) == 1
    with pytest.raises(DomainError):
        d_const(3, 1.0)
    with pytest.raises(DomainError):
        d_const(0, 0.5)


# ---------------------------------------------------------------- fwd_diff


def test_fwd_diff_linear_and_square():
    assert rel_err(fwd_diff(lambda x: -x, 3.7, FDStep(0.9)), -1) < 1e-30
    assert rel_err(fwd_diff(lambda x: x * x, 1.0, FDStep(0.5)), 2.5) < 1e-30


def test_fwd_diff_step_validation():
    with pytest.raises(DomainError):
        FDStep(0.0)


def test_fwd_diff_matches_two_psi_calls(budget):
    got = fwd_diff(lambda x: psi_q(QPoint(0.5, x), budget).value, 1.0, FDStep(0.5))
    with mp.workdps(80):
        hi = psi_q(QPoint(0.5, 1.5), budget).value
        lo = psi_q(QPoint(0.5, 1.0), budget).value
        want = (hi - lo) * 2
    assert rel_err(got, want) < 1e-18


def test_psi_q_order_conventions(budget):
    p = QPoint(0.5, 1.25)
    assert psi_q_order(-1, p, budget).value == -mp.mpf(1.25)
    assert psi_q_order(0, p, budget).value == psi_q(p, budget).value
    assert psi_q_order(2, p, budget).value == psi_q_deriv(p, 2, budget).value
    with pytest.raises(DomainError):
        psi_q_order(-2, p, budget)


# ---------------------------------------------------------------- F (finite difference)


def test_F_fd_nonnegative_s1_small_q(budget):
    idx = IndexQuad(3, 2, 2, 1)
    for x in (0.5, 1.0, 2.0):
        assert F_q_fd(idx, QPoint(0.5, x), FDStep(0.5), budget) >= 0
    # frozen from the raw-mpmath oracle run
    got = F_q_fd(idx, QPoint(0.5, 1.0), FDStep(0.5), budget)
    assert rel_err(got, mp.mpf("0.472231782827240116")) < 1e-15


def test_F_fd_nonnegative_s2_q2(budget):
    got = F_q_fd(IndexQuad(4, 3, 3, 2), QPoint(2.0, 1.0), FDStep(0.25), budget)
    assert got >= 0
    assert rel_err(got, mp.mpf("1.196369382")) < 1e-8


def test_F_fd_reflection_s2(budget):
    idx = IndexQuad(4, 3, 3, 2)
    with mp.workdps(60):
        q_recip = 1 / mp.mpf(2.0)
    a = F_q_fd(idx, QPoint(2.0, 1.3), FDStep(0.25), budget)
    b = F_q_fd(idx, QPoint(q_recip, 1.3), FDStep(0.25), budget)
    assert abs(a - b) <= 10 * budget.rel_tol * abs(a)


# ---------------------------------------------------------------- G (finite difference)


def test_G_fd_sign_examples(budget):
    g1 = G_q_fd(1, QPoint(0.5, 1.0), FDStep(0.5), budget)
    assert g1 >= 0
    assert rel_err(g1, mp.mpf("0.0801101368329552864")) < 1e-15
    g2 = G_q_fd(2, QPoint(2.0, 1.0), FDStep(2.0), budget)
    assert g2 <= 0
    assert rel_err(g2, mp.mpf("-0.17267944917944491541")) < 1e-15


@pytest.mark.parametrize("m", [1, 2, 3])
def test_G_fd_reflection(m, budget):
    for q in (2.0, 5.0):
        for x, c in ((0.7, 0.4), (1.3, 1.7)):
            with mp.workdps(60):
                q_recip = 1 / mp.mpf(q)
            a = G_q_fd(m, QPoint(q, x), FDStep(c), budget)
            b = G_q_fd(m, QPoint(q_recip, x), FDStep(c), budget)
            # error scales with the O(1) psi components, not with G itself,
            # which may nearly cancel at these parameters
            scale = max(abs(a), abs(b), 1)
            assert abs(a - b) <= 10 * budget.rel_tol * scale, (m, q, x, c)


def test_neg_G2_is_derivative_of_G1(budget):
    # -G_2(x;q,c) equals d/dx G_1(x;q,c); both d-constants are 1 here
    h = 1e-4
    for q in (0.5, 2.0):
        lhs = -G_q_fd(2, QPoint(q, 1.0), FDStep(0.5), budget)
        with mp.workdps(60):
            fd = (
                G_q_fd(1, QPoint(q, 1.0 + h), FDStep(0.5), budget)
                - G_q_fd(1, QPoint(q, 1.0 - h), FDStep(0.5), budget)
            ) / (2 * mp.mpf(h))
        assert rel_err(fd, lhs) < 1e-6, q


# ---------------------------------------------------------------- derivative-limit forms


def test_G_deriv_m1_is_quadratic_combination(budget):
    # G-limit at m=1 is (psi')^2 + psi'' - ln(q) psi'
    for q in (2.0, 0.5):
        p = QPoint(q, 1.0)
        with mp.workdps(60):
            p1 = psi_q_deriv(p, 1, budget).value
            p2 = psi_q_deriv(p, 2, budget).value
            want = p1 * p1 + p2 - mp.log(mp.mpf(q)) * p1
        got = G_q_deriv(1, p, budget)
        assert rel_err(got, want) < 1e-18
        assert got >= 0


def test_G_deriv_chain_against_second_order_bound(budget):
    # for q > 1: 0 <= G-limit <= (psi')^2 + psi'' (the ln(q) psi' term is
    # subtracted); for q < 1 the inequality direction between the two flips
    for x in (0.5, 1.0, 3.0):
        p = QPoint(2.0, x)
        with mp.workdps(60):
            p1 = psi_q_deriv(p, 1, budget).value
            p2 = psi_q_deriv(p, 2, budget).value
            quad = p1 * p1 + p2
        g = G_q_deriv(1, p, budget)
        assert quad > 0  # the q > 1 positivity of (psi')^2 + psi''
        assert 0 <= g <= quad
    p = QPoint(0.5, 1.0)
    with mp.workdps(60):
        quad = psi_q_deriv(p, 1, budget).value ** 2 + psi_q_deriv(p, 2, budget).value
    assert G_q_deriv(1, p, budget) >= quad


def test_G_fd_converges_to_G_deriv(budget):
    p = QPoint(0.5, 1.0)
    want = G_q_deriv(1, p, budget)
    got = G_q_fd(1, p, FDStep(1e-4), budget)
    assert abs(got - want) <= 1e-3 * abs(want)
    # Richardson extrapolation of the difference form converges to the same limit
    with mp.workdps(60):
        r = 2 * G_q_fd(1, p, FDStep(5e-4), budget) - G_q_fd(1, p, FDStep(1e-3), budget)
    assert abs(r - want) <= 1e-5 * abs(want)


def test_F_deriv_examples(budget):
    idx = IndexQuad(3, 2, 2, 1)
    for x in (0.5, 1.0, 2.0):
        assert F_q_deriv(idx, QPoint(0.5, x), budget) >= 0
    assert F_q_deriv(IndexQuad(5, 4, 4, 3), QPoint(2.0, 1.0), budget) >= 0


def test_F_fd_converges_to_F_deriv(budget):
    idx = IndexQuad(3, 2, 2, 1)
    p = QPoint(0.5, 1.0)
    want = F_q_deriv(idx, p, budget)
    got = F_q_fd(idx, p, FDStep(1e-4), budget)
    assert abs(got - want) <= 1e-3 * abs(want)


def test_F_deriv_needs_positive_s(budget):
    with pytest.raises(DomainError):
        F_q_deriv(IndexQuad(2, 1, 1, 0), QPoint(0.5, 1.0), budget)


# ---------------------------------------------------------------- classical F


def test_F_classic_quadratic_case():
    # (psi'(1))^2 + psi''(1) >= 0; frozen oracle value 0.301694278
    got = F_classic(IndexQuad(2, 1, 1, 0), 1.0, 1.0)
    with mp.workdps(60):
        want = psi_classical_deriv(1.0, 1) ** 2 + psi_classical_deriv(1.0, 2)
    assert rel_err(got, want) < 1e-18
    assert abs(float(got) - 0.301694278) < 1e-9
    assert got >= 0


def test_F_classic_threshold_weight():
    for x in (0.5, 1.0, 3.0):
        assert F_classic(IndexQuad(3, 2, 2, 1), x, 0.5) >= 0


def test_F_classic_zero_weight_sign():
    # t = 0 leaves (-1)^(m+n) psi^(m) psi^(n), positive by the sign ladder
    for quad in (IndexQuad(3, 2, 2, 1), IndexQuad(5, 4, 3, 2)):
        assert F_classic(quad, 1.7, 0.0) > 0


def test_F_classic_linear_in_t():
    # F(t1) + F(t2) = 2 F((t1+t2)/2) -- linearity in the weight
    x = 1.3
    quad = IndexQuad(4, 3, 3, 2)
    with mp.workdps(60):
        lhs = F_classic(quad, x, 0.25) + F_classic(quad, x, 0.75)
        rhs = 2 * F_classic(quad, x, 0.5)
        assert abs(lhs - rhs) <= mp.mpf("1e-40") * abs(rhs)


# ---------------------------------------------------------------- double inequality chain


@pytest.mark.parametrize("q", [0.3, 0.7])
@pytest.mark.parametrize("c", [0.25, 0.75, 1.5, 3.0])
def test_difference_derivative_double_inequality(q, c, budget):
    # (1-q)/(1-q^c) * D0^2 > q^x (psi'(x) - psi'(x+c)) > D0^2 for 0 < c < 1,
    # both reversed for c > 1, where D0 = psi_q(x+c) - psi_q(x)
    for x in (0.4, 1.0, 2.9):
        with mp.workdps(60):
            qm = mp.mpf(q)
            d0 = psi_q(QPoint(q, x + c), budget).value - psi_q(QPoint(q, x), budget).value
            left = (1 - qm) / (1 - qm**c) * d0**2
            mid = qm**x * (psi_q_deriv(QPoint(q, x), 1, budget).value - psi_q_deriv(QPoint(q, x + c), 1, budget).value)
            right = d0**2
        if c < 1:
            assert left > mid > right, (q, c, x)
        else:
            assert left < mid < right, (q, c, x)
