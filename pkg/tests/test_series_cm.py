"""Series-coefficient extraction, certification sweeps, grid falsifier."""

from fractions import Fraction

import pytest
from mpmath import mp

from qpoly import (
    CertStatus,
    CoeffTarget,
    DomainError,
    FDStep,
    F_inner_coeff,
    F_q_fd,
    G_q_fd,
    H_coeff,
    IndexQuad,
    QPoint,
    certify_cm_series,
    check_cm_grid,
    seq_a,
    seq_b,
)
from qpoly.series_cm import target_coefficient, target_plan

from conftest import rel_err


# ---------------------------------------------------------------- H coefficients


def oracle_H(m, n, q, c, dps=100):
    """Direct formula evaluation at raised precision."""
    with mp.workdps(dps):
        q = mp.mpf(q)
        c = mp.mpf(c)
        d1m = 1 if m == 1 else 0
        if n == 1:
            return c * (1 - d1m) * (m - 2) * (1 - q**-c) / (1 - 1 / q)
        tot = mp.mpf(0)
        for j in range(1, n):
            w = (1 - q ** (-j * c)) * (1 - q ** (-(n - j) * c)) / ((1 - q**-j) * (1 - q ** (-(n - j))))
            tot += w * m * mp.mpf(n - j) ** (m - 1)
        tot -= c * (1 - q ** (-n * c)) * (mp.mpf(n) ** m - (m - 1) * mp.mpf(n) ** (m - 1) - d1m) / (1 - q**-n)
        return tot


def test_H_first_nontrivial_value(budget):
    got = H_coeff(1, 2, 2.0, 0.5, budget)
    assert rel_err(got, oracle_H(1, 2, 2.0, 0.5)) < 1e-30
    assert abs(float(got) - 0.0098124171742864714599) < 1e-15
    assert got > 0


def test_H_folded_first_entries(budget):
    assert H_coeff(1, 1, 2.0, 0.7, budget) == 0
    assert H_coeff(2, 1, 2.0, 0.7, budget) == 0
    got = H_coeff(3, 1, 2.0, 0.5, budget)
    with mp.workdps(60):
        want = mp.mpf(0.5) * 1 * (1 - mp.mpf(2) ** mp.mpf(-0.5)) / (1 - mp.mpf(0.5))
    assert rel_err(got, want) < 1e-30
    assert got > 0


def test_H_domain():
    with pytest.raises(DomainError):
        H_coeff(1, 2, 0.5, 0.5)  # q must exceed 1
    with pytest.raises(DomainError):
        H_coeff(0, 2, 2.0, 0.5)


# ---------------------------------------------------------------- F inner coefficients


def test_F_inner_k2_single_term(budget):
    idx = IndexQuad(3, 2, 2, 1)
    got = F_inner_coeff(idx, 2, 0.5, 0.5, budget)
    with mp.workdps(60):
        q = mp.mpf(0.5)
        c = mp.mpf(0.5)
        w = (1 - q**c) * (1 - q**c) / ((1 - q) * (1 - q))
        assert rel_err(got, w / 2) < 1e-30
    assert got > 0


def test_F_inner_k4_vs_direct_sum(budget):
    idx = IndexQuad(3, 2, 2, 1)
    got = F_inner_coeff(idx, 4, 0.5, 0.5, budget)
    with mp.workdps(100):
        q = mp.mpf(0.5)
        c = mp.mpf(0.5)
        tot = mp.mpf(0)
        for jj in range(1, 4):
            w = (1 - q ** (jj * c)) * (1 - q ** ((4 - jj) * c)) / ((1 - q**jj) * (1 - q ** (4 - jj)))
            poly = Fraction(jj ** 1 * (4 - jj) ** 1) - Fraction(1, 2) * Fraction(jj**2 * (4 - jj) ** 0)
            tot += w * mp.mpf(poly.numerator) / poly.denominator
    assert rel_err(got, tot) < 1e-30
    assert got > 0


def test_F_inner_at_unit_c_reduces_to_sequence_difference(budget):
    # all weights are exactly 1 at c = 1, so the coefficient collapses to a_k - b_k
    idx = IndexQuad(3, 2, 2, 1)
    for k in (2, 3, 4, 7):
        got = F_inner_coeff(idx, k, 0.5, 1.0, budget)
        want = seq_a(2, 2, k) - seq_b(idx, k)
        with mp.workdps(60):
            w = mp.mpf(want.numerator) / want.denominator
            assert abs(got - w) <= mp.mpf("1e-40") * max(1, abs(w))


def test_F_inner_domain():
    with pytest.raises(DomainError):
        F_inner_coeff(IndexQuad(3, 2, 2, 1), 2, 2.0, 0.5)  # q must be below 1
    with pytest.raises(DomainError):
        F_inner_coeff(IndexQuad(3, 2, 2, 1), 1, 0.5, 0.5)  # k >= 2
    with pytest.raises(DomainError):
        F_inner_coeff(IndexQuad(2, 1, 1, 0), 2, 0.5, 0.5)  # s >= 1


# ---------------------------------------------------------------- certification sweeps


def test_certify_G_theorem_case(budget):
    report = certify_cm_series(CoeffTarget(kind="G", q=2.0, c=0.5, m=3), 200, budget)
    assert report.status is CertStatus.CERTIFIED
    assert report.min_margin > 0
    assert report.k_range == (1, 200)
    assert report.target["regime"] == "proven"


def test_certify_G_reflected_equals_direct(budget):
    a = certify_cm_series(CoeffTarget(kind="G", q=2.0, c=0.25, m=2), 60, budget)
    b = certify_cm_series(CoeffTarget(kind="G", q=0.5, c=0.25, m=2), 60, budget)
    assert a.status is b.status is CertStatus.CERTIFIED
    assert a.min_margin == b.min_margin  # identical coefficient streams
    assert b.target["expansion"] == "reflected"
    assert a.k_range == b.k_range == (2, 60)  # m <= 2 starts at 2


def test_certify_F_theorem_case(budget):
    report = certify_cm_series(CoeffTarget(kind="F", q=0.5, c=0.75, quad=IndexQuad(4, 3, 3, 2)), 200, budget)
    assert report.status is CertStatus.CERTIFIED
    assert report.target["regime"] == "proven"


def test_certify_G_sign_flipped(budget):
    report = certify_cm_series(CoeffTarget(kind="G", q=2.0, c=2.0, m=1), 200, budget)
    assert report.status is CertStatus.CERTIFIED
    assert report.target["sign_flipped"] is True


def test_certify_unproven_regimes_inconclusive(budget):
    # s = 1 with q > 1: genuinely outside the theorems; the true expansion
    # carries a strictly negative k = 1 coefficient
    r = certify_cm_series(CoeffTarget(kind="F", q=2.0, c=0.5, quad=IndexQuad(3, 2, 2, 1)), 50, budget)
    assert r.status is CertStatus.INCONCLUSIVE
    assert r.k_range[0] == 1
    assert r.first_violation is not None and r.first_violation["index"] == 1
    # G with c > 1 and m >= 3
    r = certify_cm_series(CoeffTarget(kind="G", q=2.0, c=2.0, m=3), 50, budget)
    assert r.status is CertStatus.INCONCLUSIVE
    # c = 1 sits on the theorem boundary: not claimed
    r = certify_cm_series(CoeffTarget(kind="G", q=2.0, c=1.0, m=1), 50, budget)
    assert r.status is CertStatus.INCONCLUSIVE


def test_certify_target_validation():
    with pytest.raises(DomainError):
        CoeffTarget(kind="G", q=2.0, c=-0.5, m=1)
    with pytest.raises(DomainError):
        CoeffTarget(kind="F", q=2.0, c=0.5, quad=IndexQuad(4, 3, 2, 1))  # unbalanced
    with pytest.raises(DomainError):
        CoeffTarget(kind="X", q=2.0, c=0.5, m=1)
    with pytest.raises(DomainError):
        certify_cm_series(CoeffTarget(kind="G", q=2.0, c=0.5, m=1), 1)


# ---------------------------------------------------------------- reconstruction


@pytest.mark.parametrize("m", [1, 3])
def test_G_reconstruction_from_coefficients(m, budget):
    # (ln q)^(m+1)/c^2 * sum_n q^(-nx) H(m,n) converges to the difference form
    q, c, x, N = 2.0, 0.5, 1.0, 80
    with mp.workdps(60):
        qm = mp.mpf(q)
        total = mp.mpf(0)
        for n in range(1, N + 1):
            total += qm ** (-n * x) * H_coeff(m, n, q, c, budget)
        rebuilt = mp.log(qm) ** (m + 1) / mp.mpf(c) ** 2 * total
    direct = G_q_fd(m, QPoint(q, x), FDStep(c), budget)
    assert rel_err(rebuilt, direct) < 1e-8


def test_F_reconstruction_from_coefficients(budget):
    idx = IndexQuad(4, 3, 3, 2)
    q, c, x, N = 0.5, 0.5, 1.0, 80
    with mp.workdps(60):
        qm = mp.mpf(q)
        total = mp.mpf(0)
        for k in range(2, N + 1):
            total += qm ** (k * x) * F_inner_coeff(idx, k, q, c, budget)
        rebuilt = (-mp.log(qm)) ** (idx.m + idx.n) / mp.mpf(c) ** 2 * total
    direct = F_q_fd(idx, QPoint(q, x), FDStep(c), budget)
    assert rel_err(rebuilt, direct) < 1e-8


def test_F_reconstruction_s1_large_q_with_correction(budget):
    # the Inconclusive s = 1, q > 1 stream is still the true expansion of the
    # target: rebuilding from it must reproduce the difference form
    idx = IndexQuad(3, 2, 2, 1)
    target = CoeffTarget(kind="F", q=2.0, c=0.5, quad=idx)
    assert target_plan(target)["expansion"] == "reflected_with_order0_correction"
    x, N = 1.0, 80
    with mp.workdps(60):
        y = 1 / mp.mpf(2.0)
        total = mp.mpf(0)
        for k in range(1, N + 1):
            total += y ** (k * x) * target_coefficient(target, k, budget)
        rebuilt = (-mp.log(y)) ** (idx.m + idx.n) / mp.mpf(target.c) ** 2 * total
    direct = F_q_fd(idx, QPoint(2.0, x), FDStep(0.5), budget)
    assert rel_err(rebuilt, direct) < 1e-8


# ---------------------------------------------------------------- grid falsifier


def test_grid_accepts_exponential():
    report = check_cm_grid(lambda x: mp.exp(-x), 0.1, 3.0, 8, 0.1, 6, label="exp(-x)")
    assert report.status is CertStatus.CERTIFIED
    assert report.min_margin > 0


def test_grid_rejects_increasing_function():
    report = check_cm_grid(lambda x: x, 0.0, 2.0, 5, 0.1, 3, label="x")
    assert report.status is CertStatus.VIOLATED
    assert report.first_violation["index"][1] == 1  # first failure at order k = 1


def test_grid_confirms_G_theorem_case(budget):
    report = check_cm_grid(
        lambda x: G_q_fd(2, QPoint(0.5, x), FDStep(0.5), budget),
        0.5,
        2.0,
        6,
        0.05,
        8,
        label="G_2(q=0.5,c=0.5)",
    )
    assert report.status is CertStatus.CERTIFIED


def test_grid_domain():
    with pytest.raises(DomainError):
        check_cm_grid(lambda x: x, 0.0, 1.0, 5, -0.1, 3)
    with pytest.raises(DomainError):
        check_cm_grid(lambda x: x, 1.0, 0.0, 5, 0.1, 3)


# ---------------------------------------------------------------- weights are monotone


@pytest.mark.parametrize("q,c,k", [(0.3, 0.25, 9), (0.7, 0.75, 12), (0.5, 0.5, 20)])
def test_inner_weight_sequence_nondecreasing(q, c, k, budget):
    with mp.workdps(60):
        qm = mp.mpf(q)
        cm = mp.mpf(c)
        weights = [
            (1 - qm ** (j * cm)) * (1 - qm ** ((k - j) * cm)) / ((1 - qm**j) * (1 - qm ** (k - j)))
            for j in range(1, k // 2 + 1)
        ]
        assert all(weights[i + 1] >= weights[i] for i in range(len(weights) - 1))
        assert all(w > 0 for w in weights)
