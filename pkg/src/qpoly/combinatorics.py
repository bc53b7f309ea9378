"""Exact convolution sequences and inequality verifiers.

Everything here is big-integer / exact-rational arithmetic; no floating point.
Conventions: 0^0 = 1 and empty sums are 0.

The central objects are the convolution sequences (k >= 1)

    a(m,n)_k     = sum_{j=1}^{k} j^(m-1) (k-j)^(n-1),
    b(r,m,n,s)_k = alpha(r,m,n,s) * sum_{j=1}^{k} (k-j)^(r-1) j^(s-1),
    c(t,s)_k     = sum_{j=0}^{k-1} j^t (k-j)^s,

with the factorial-ratio weight alpha(r,m,n,s) = (m-1)!(n-1)!/((r-1)!(s-1)!).
The verifiers sweep the pointwise inequality a >= b over balanced index quads
(r+s = m+n), the difference-operator inequalities the induction arguments for
it rest on, and assorted exact power-sum bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .errors import DomainError, LengthError

__all__ = [
    "ipow",
    "alpha_fraction",
    "beta_fraction",
    "seq_a",
    "seq_b",
    "seq_c",
    "T_term",
    "ExactSeq",
    "a_sequence",
    "b_sequence",
    "c_sequence",
    "seq_forward_diff",
    "LemmaReport",
    "balanced_quads",
    "verify_conv_inequality",
    "verify_proof_steps",
    "verify_power_sum_bounds",
    "REGIME_LEMMA1",
    "REGIME_LEMMA2",
    "REGIME_EMPIRICAL",
]

REGIME_LEMMA1 = "ProvenLemma1"
REGIME_LEMMA2 = "ProvenLemma2"
REGIME_EMPIRICAL = "Empirical"


def ipow(base: int, exp: int) -> int:
    """Integer power with the 0^0 = 1 convention."""
    return 1 if exp == 0 else base**exp


def _quad_fields(idx):
    """Accept a 4-tuple or any object with r/m/n/s attributes."""
    if isinstance(idx, tuple):
        r, m, n, s = idx
    else:
        r, m, n, s = idx.r, idx.m, idx.n, idx.s
    return int(r), int(m), int(n), int(s)


def alpha_fraction(r: int, m: int, n: int, s: int) -> Fraction:
    """Weight (m-1)!(n-1)!/((r-1)!(s-1)!), or (m-1)!(n-1)!/(r-1)! when s = 0."""
    if min(r, m, n) < 1 or s < 0:
        raise DomainError(f"alpha requires r, m, n >= 1 and s >= 0, got ({r},{m},{n},{s})")
    num = factorial(m - 1) * factorial(n - 1)
    if s == 0:
        return Fraction(num, factorial(r - 1))
    return Fraction(num, factorial(r - 1) * factorial(s - 1))


def beta_fraction(r: int, m: int, n: int, s: int) -> Fraction:
    """Weight m!n!/(r!s!); defined only for s >= 1."""
    if min(r, m, n, s) < 1:
        raise DomainError(f"beta requires r, m, n, s >= 1, got ({r},{m},{n},{s})")
    return Fraction(factorial(m) * factorial(n), factorial(r) * factorial(s))


def _validate_quad(r: int, m: int, n: int, s: int, *, need_s1: bool = True):
    if not (r >= m >= n >= s >= (1 if need_s1 else 0)):
        raise DomainError(f"index quad must satisfy r >= m >= n >= s, got ({r},{m},{n},{s})")
    if r + s != m + n:
        raise DomainError(f"index quad must be balanced (r+s = m+n), got ({r},{m},{n},{s})")


def _conv(p_j: int, p_kj: int, k: int) -> int:
    """sum_{j=1}^{k} j^p_j (k-j)^p_kj."""
    return sum(ipow(j, p_j) * ipow(k - j, p_kj) for j in range(1, k + 1))


@lru_cache(maxsize=4096)
def _conv_prefix(p_j: int, p_kj: int, k_max: int) -> tuple:
    """(_conv(p_j, p_kj, k) for k = 1..k_max), cached for sweep reuse."""
    pj = [ipow(j, p_j) for j in range(k_max + 1)]
    pk = [ipow(j, p_kj) for j in range(k_max + 1)]
    return tuple(sum(pj[j] * pk[k - j] for j in range(1, k + 1)) for k in range(1, k_max + 1))


def seq_a(m: int, n: int, k: int) -> int:
    """a(m,n)_k = sum_{j=1}^{k} j^(m-1) (k-j)^(n-1)."""
    if min(m, n, k) < 1:
        raise DomainError(f"seq_a requires m, n, k >= 1, got ({m},{n},{k})")
    return _conv(m - 1, n - 1, k)


def seq_b(idx, k: int) -> Fraction:
    """b(r,m,n,s)_k = alpha(r,m,n,s) * sum_{j=1}^{k} (k-j)^(r-1) j^(s-1)."""
    r, m, n, s = _quad_fields(idx)
    _validate_quad(r, m, n, s)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return alpha_fraction(r, m, n, s) * _conv(s - 1, r - 1, k)


def seq_c(t: int, s: int, k: int) -> int:
    """c(t,s)_k = sum_{j=0}^{k-1} j^t (k-j)^s."""
    if t < 0 or s < 1 or k < 1:
        raise DomainError(f"seq_c requires t >= 0, s >= 1, k >= 1, got ({t},{s},{k})")
    return sum(ipow(j, t) * ipow(k - j, s) for j in range(0, k))


def T_term(idx, j: int, k: int) -> Fraction:
    """Symmetrised per-j contribution to the inner convolution sum:

    T(j;k) = j^(m-1)(k-j)^(n-1) + (k-j)^(m-1) j^(n-1)
             - alpha * (j^(r-1)(k-j)^(s-1) + (k-j)^(r-1) j^(s-1)).

    Summing T(j;k) * (1 - delta_{j,k/2}/2) over 1 <= j <= floor(k/2) gives
    exactly a(m,n)_k - b(r,m,n,s)_k.
    """
    r, m, n, s = _quad_fields(idx)
    _validate_quad(r, m, n, s)
    if not 1 <= j <= k // 2:
        raise DomainError(f"j must satisfy 1 <= j <= floor(k/2), got j={j}, k={k}")
    al = alpha_fraction(r, m, n, s)
    sym = ipow(j, m - 1) * ipow(k - j, n - 1) + ipow(k - j, m - 1) * ipow(j, n - 1)
    sub = ipow(j, r - 1) * ipow(k - j, s - 1) + ipow(k - j, r - 1) * ipow(j, s - 1)
    return Fraction(sym) - al * sub


@dataclass(frozen=True)
class ExactSeq:
    """A finite exact sequence indexed from k = 1 (after differencing, the
    k-th entry is the k-th difference value, still 1-indexed)."""

    values: tuple
    descriptor: str

    def __len__(self) -> int:
        return len(self.values)

    def value_at(self, k: int):
        if not 1 <= k <= len(self.values):
            raise LengthError(f"index {k} outside 1..{len(self.values)}")
        return self.values[k - 1]


def a_sequence(m: int, n: int, k_max: int) -> ExactSeq:
    return ExactSeq(_conv_prefix(m - 1, n - 1, k_max), f"a({m},{n})")


def b_sequence(idx, k_max: int) -> ExactSeq:
    r, m, n, s = _quad_fields(idx)
    _validate_quad(r, m, n, s)
    al = alpha_fraction(r, m, n, s)
    vals = tuple(al * v for v in _conv_prefix(s - 1, r - 1, k_max))
    return ExactSeq(vals, f"b({r},{m},{n},{s})")


def c_sequence(t: int, s: int, k_max: int) -> ExactSeq:
    vals = tuple(seq_c(t, s, k) for k in range(1, k_max + 1))
    return ExactSeq(vals, f"c({t},{s})")


def _diff_values(vals, order: int):
    v = list(vals)
    for _ in range(order):
        v = [v[i + 1] - v[i] for i in range(len(v) - 1)]
    return v


def seq_forward_diff(seq: ExactSeq, order: int) -> ExactSeq:
    """Iterated forward difference (Delta x)_k = x_(k+1) - x_k, exact."""
    if order < 1:
        raise DomainError(f"order must be >= 1, got {order}")
    if len(seq.values) <= order:
        raise LengthError(f"sequence of length {len(seq.values)} too short for order {order}")
    return ExactSeq(tuple(_diff_values(seq.values, order)), f"D^{order}[{seq.descriptor}]")


@dataclass
class LemmaReport:
    """Outcome of an exact verification sweep.

    violations holds asserted-inequality failures (expected empty);
    observations holds sign findings in regimes swept only empirically;
    equalities lists exact-equality witnesses.  All witness values are
    numerator/denominator strings so nothing is lost to rounding.
    """

    lemma: str
    ranges: dict
    violations: list = field(default_factory=list)
    equalities: list = field(default_factory=list)
    observations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "lemma": self.lemma,
            "ranges": self.ranges,
            "violations": self.violations,
            "equalities": self.equalities,
            "observations": self.observations,
            "passed": self.passed,
        }


def _exact_str(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    return str(v)


def balanced_quads(r_max: int, include_empirical: bool = False):
    """Yield (quad, regime) over balanced quads r >= m >= n >= s >= 1, r <= r_max.

    Regimes: s = 1 is covered by the first convolution lemma; s = 2 and
    (s = 3, n = 4) by the second; everything else is empirical and only
    yielded on request.
    """
    for r in range(1, r_max + 1):
        for s in range(1, r + 1):
            for n in range(s, (r + s) // 2 + 1):
                m = r + s - n
                if not (r >= m >= n >= s >= 1):
                    continue
                if s == 1:
                    regime = REGIME_LEMMA1
                elif s == 2 or (s == 3 and n == 4):
                    regime = REGIME_LEMMA2
                else:
                    regime = REGIME_EMPIRICAL
                if regime == REGIME_EMPIRICAL and not include_empirical:
                    continue
                yield (r, m, n, s), regime


def verify_conv_inequality(r_max: int, k_max: int, include_empirical: bool = False) -> LemmaReport:
    """Sweep a(m,n)_k >= b(r,m,n,s)_k over balanced quads with r <= r_max, k <= k_max.

    Proven regimes are asserted (failures are violations); empirical regimes
    are recorded as observations without asserting anything.
    """
    if r_max < 2 or k_max < 1:
        raise DomainError("need r_max >= 2 and k_max >= 1")
    report = LemmaReport(
        lemma="2.1",
        ranges={"r_max": r_max, "k_max": k_max, "include_empirical": include_empirical},
    )
    for (r, m, n, s), regime in balanced_quads(r_max, include_empirical):
        al = alpha_fraction(r, m, n, s)
        avals = _conv_prefix(m - 1, n - 1, k_max)
        bconv = _conv_prefix(s - 1, r - 1, k_max)
        for k in range(1, k_max + 1):
            lhs = avals[k - 1] * al.denominator
            rhs = bconv[k - 1] * al.numerator
            if lhs < rhs:
                witness = {
                    "params": {"r": r, "m": m, "n": n, "s": s, "regime": regime},
                    "k": k,
                    "lhs": _exact_str(Fraction(avals[k - 1])),
                    "rhs": _exact_str(al * bconv[k - 1]),
                }
                if regime == REGIME_EMPIRICAL:
                    report.observations.append(witness)
                else:
                    report.violations.append(witness)
            elif lhs == rhs:
                report.equalities.append(
                    {
                        "params": {"r": r, "m": m, "n": n, "s": s, "regime": regime},
                        "k": k,
                        "value": _exact_str(Fraction(avals[k - 1])),
                    }
                )
    return report


def _b_raw_prefix(r: int, m: int, n: int, s: int, k_max: int):
    """b-values without ordering validation (induction steps walk through
    quads with n < s or m < n; the defining formula stays meaningful)."""
    al = alpha_fraction(r, m, n, s)
    return [al * v for v in _conv_prefix(s - 1, r - 1, k_max)]


def verify_proof_steps(s: int, T: int, r: int, k_max: int) -> LemmaReport:
    """Exact verification of the difference-operator inequalities behind the
    induction on the convolution inequality, in the shifted notation
    a(r+1, t+1) vs b(r+t-s+1, r+1, t+1, s+1).

    Checks, for the given level s and fixed (T, r):

      * the (s+1)-fold difference inequality
            D^(s+1) a(r+1,t+1) >= D^(s+1) b(r+t-s+1, r+1, t+1, s+1)
        for every t in s..T and k in 1..k_max (for s = 0, t = 1 this is the
        power-sum inequality  sum_{j<=k} j^r >= k^(r+1)/(r+1));
      * the initial conditions at k = 1 for difference orders i = 1..s+1;
      * the initial-block inequality at level s with the c-sequence form of
        its right-hand side,
            sum_{t=0}^{s-1} C(T,t) (D^(s+1) a(r+1,t+1))_k
            >= alpha(r+T-s+1, r+1, T+1, s+1)
               * sum_{t=0}^{r-1} C(r+T-s, t) (D^(s+1) c(t,s))_k;
      * the binomial recombination identity
            (D^(i+1) a(r+1,T+1))_k = sum_{t=0}^{T-1} C(T,t) (D^(i) a(r+1,t+1))_k
        as an exact equality.
    """
    if s < 0 or T < s or r < max(s, 1) or k_max < 1:
        raise DomainError(f"need s >= 0, T >= s, r >= max(s, 1), k_max >= 1; got ({s},{T},{r},{k_max})")
    report = LemmaReport(lemma="proof-steps", ranges={"s": s, "T": T, "r": r, "k_max": k_max})
    pad = s + 3
    length = k_max + pad

    a_raw = {t: list(_conv_prefix(r, t, length)) for t in range(0, T + 1)}

    # (s+1)-fold difference inequality, t = s..T
    for t in range(s, T + 1):
        da = _diff_values(a_raw[t], s + 1)
        db = _diff_values(_b_raw_prefix(r + t - s + 1, r + 1, t + 1, s + 1, length), s + 1)
        for k in range(1, k_max + 1):
            margin = Fraction(da[k - 1]) - db[k - 1]
            entry = {
                "params": {"check": "diff-ineq", "s": s, "t": t, "r": r},
                "k": k,
                "lhs": _exact_str(Fraction(da[k - 1])),
                "rhs": _exact_str(db[k - 1] if isinstance(db[k - 1], Fraction) else Fraction(db[k - 1])),
            }
            if margin < 0:
                report.violations.append(entry)
            elif margin == 0:
                report.equalities.append(entry)

    # initial conditions at k = 1 for orders 1..s+1
    for t in range(s, T + 1):
        bvals = _b_raw_prefix(r + t - s + 1, r + 1, t + 1, s + 1, s + 4)
        for i in range(1, s + 2):
            da1 = _diff_values(a_raw[t][: s + 4], i)[0]
            db1 = _diff_values(bvals, i)[0]
            if Fraction(da1) - db1 < 0:
                report.violations.append(
                    {
                        "params": {"check": "initial", "s": s, "t": t, "r": r, "i": i},
                        "k": 1,
                        "lhs": _exact_str(Fraction(da1)),
                        "rhs": _exact_str(db1),
                    }
                )

    # initial-block inequality at level s (empty for s = 0)
    if s >= 1:
        al = alpha_fraction(r + T - s + 1, r + 1, T + 1, s + 1)
        da_by_t = {t: _diff_values(a_raw[t], s + 1) for t in range(0, s)}
        dc_by_t = {t: _diff_values([seq_c(t, s, k) for k in range(1, length + 1)], s + 1) for t in range(0, r)}
        for k in range(1, k_max + 1):
            lhs = sum(comb(T, t) * da_by_t[t][k - 1] for t in range(0, s))
            rhs = al * sum(comb(r + T - s, t) * dc_by_t[t][k - 1] for t in range(0, r))
            margin = Fraction(lhs) - rhs
            entry = {
                "params": {"check": "initial-block", "s": s, "T": T, "r": r},
                "k": k,
                "lhs": _exact_str(Fraction(lhs)),
                "rhs": _exact_str(rhs),
            }
            if margin < 0:
                report.violations.append(entry)
            elif margin == 0:
                report.equalities.append(entry)

    # binomial recombination identity (exact equality)
    ident_k = min(k_max, 50)
    for i in range(0, s + 2):
        da = _diff_values(a_raw[T], i + 1)
        parts = {t: _diff_values(a_raw[t], i) for t in range(0, T)}
        for k in range(1, ident_k + 1):
            rhs = sum(comb(T, t) * parts[t][k - 1] for t in range(0, T))
            if da[k - 1] != rhs:
                report.violations.append(
                    {
                        "params": {"check": "binomial-identity", "T": T, "r": r, "i": i},
                        "k": k,
                        "lhs": str(da[k - 1]),
                        "rhs": str(rhs),
                    }
                )
        report.equalities.append(
            {
                "params": {"check": "binomial-identity", "T": T, "r": r, "i": i},
                "k": f"1..{ident_k}",
                "value": "exact",
            }
        )
    return report


def verify_power_sum_bounds(m_max: int, n_max: int) -> LemmaReport:
    """Exact power-sum inequalities used by the series-coefficient argument.

    * m * sum_{j=1}^{n-1} (n-j)^(m-1) >= n^m - (m-1) n^(m-1) - delta_{1m},
      with exact equality for m = 1, 2 (flagged);
    * (r+1) * sum_{i=1}^{n} i^r >= (n+1)^(r+1) - r(n+1)^r;
    * D(r,t) = 2^r + 2^t - 2 - (r! t!/(r+t-1)!) 2^(r+t-1) >= 0, an identity at t = 1;
    * the trapezoid bound ((n+1)^(r+1) - n^(r+1))/(r+1) <= (n^r + (n+1)^r)/2.
    """
    if m_max < 2 or n_max < 2:
        raise DomainError("need m_max >= 2 and n_max >= 2")
    report = LemmaReport(lemma="power-sums", ranges={"m_max": m_max, "n_max": n_max})

    for m in range(1, m_max + 1):
        d1m = 1 if m == 1 else 0
        for n in range(1, n_max + 1):
            lhs = m * sum(ipow(n - j, m - 1) for j in range(1, n))
            rhs = n**m - (m - 1) * n ** (m - 1) - d1m
            if lhs < rhs:
                report.violations.append(
                    {"params": {"check": "coeff-bound", "m": m, "n": n}, "k": n, "lhs": str(lhs), "rhs": str(rhs)}
                )
            elif lhs == rhs:
                report.equalities.append(
                    {"params": {"check": "coeff-bound", "m": m, "n": n}, "k": n, "value": str(lhs)}
                )

    for r in range(1, m_max + 1):
        for n in range(1, n_max + 1):
            lhs = (r + 1) * sum(i**r for i in range(1, n + 1))
            rhs = (n + 1) ** (r + 1) - r * (n + 1) ** r
            if lhs < rhs:
                report.violations.append(
                    {"params": {"check": "power-sum", "r": r, "n": n}, "k": n, "lhs": str(lhs), "rhs": str(rhs)}
                )

    d_range = max(m_max, 10)
    for r in range(1, d_range + 1):
        for t in range(1, d_range + 1):
            val = Fraction(2**r + 2**t - 2) - Fraction(factorial(r) * factorial(t), factorial(r + t - 1)) * 2 ** (
                r + t - 1
            )
            if val < 0:
                report.violations.append(
                    {"params": {"check": "doubling-bound", "r": r, "t": t}, "k": t, "lhs": _exact_str(val), "rhs": "0"}
                )
            elif val == 0:
                report.equalities.append(
                    {"params": {"check": "doubling-bound", "r": r, "t": t}, "k": t, "value": "0"}
                )

    for r in range(1, min(m_max, 8) + 1):
        for n in range(1, n_max + 1):
            lhs = Fraction((n + 1) ** (r + 1) - n ** (r + 1), r + 1)
            rhs = Fraction(n**r + (n + 1) ** r, 2)
            if lhs > rhs:
                report.violations.append(
                    {
                        "params": {"check": "trapezoid", "r": r, "n": n},
                        "k": n,
                        "lhs": _exact_str(lhs),
                        "rhs": _exact_str(rhs),
                    }
                )
    return report
