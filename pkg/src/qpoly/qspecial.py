"""High-precision q-gamma / q-polygamma evaluation with certified tails.

For 0 < q < 1 the q-gamma function is the infinite product

    Gamma_q(x) = (1-q)^(1-x) * prod_{n>=0} (1 - q^(n+1)) / (1 - q^(n+x)),

and for q > 1

    Gamma_q(x) = (q-1)^(1-x) * q^(x(x-1)/2) * prod_{n>=0} (1 - q^(-(n+1))) / (1 - q^(-(n+x))).

Its logarithmic derivative psi_q and the higher derivatives are evaluated
from the exponential series

    psi_q(x)      = -ln(1-q) + ln(q) * sum_{n>=1} q^(nx) / (1 - q^n),                     0 < q < 1,
    psi_q(x)      = -ln(q-1) + ln(q) * (x - 1/2 - sum_{n>=1} q^(-nx) / (1 - q^(-n))),     q > 1,
    psi_q^(m)(x)  = (ln q)^(m+1) * sum_{n>=1} n^m q^(nx) / (1 - q^n),                     0 < q < 1,
    psi_q^(m)(x)  = delta_{1m} ln(q) + (-1)^(m+1) (ln q)^(m+1)
                                     * sum_{n>=1} n^m q^(-nx) / (1 - q^(-n)),             q > 1.

Truncation is certified: with y = min(q, 1/q) and w = y^x, every term ratio
past index n is bounded by rho_n = ((n+1)/n)^m * w, which is eventually < 1,
so the tail after term n is at most term_n / (1 - rho_n).  Summation stops at
the first n where that geometric bound (mapped into the units of the returned
value) drops below rel_tol * |value so far|.

Evaluation runs at a working precision derived from the budget; since the
underlying mpmath context is process-global, precision changes are serialised
behind a lock, keeping every operation pure, deterministic and safe to call
from multiple threads.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

from mpmath import mp

from .errors import DomainError, NonConvergence, QNearOneError

__all__ = [
    "PrecisionBudget",
    "QPoint",
    "SeriesValue",
    "DEFAULT_BUDGET",
    "Q_GUARD",
    "working_dps",
    "gamma_q",
    "psi_q",
    "psi_q_deriv",
    "psi_classical_deriv",
]

# Evaluators reject q closer to 1 than this; the classical oracle covers the limit.
Q_GUARD = 1e-4

# mpmath precision is a process-global; serialise the workdps windows.
_EVAL_LOCK = threading.RLock()

_CACHE_SIZE = 1 << 17


@dataclass(frozen=True)
class PrecisionBudget:
    """Accuracy contract for a series evaluation.

    rel_tol   -- target relative error of the returned value
    digits    -- requested working precision (decimal digits)
    max_terms -- hard cap on series terms before NonConvergence
    """

    rel_tol: float = 1e-20
    digits: int = 50
    max_terms: int = 100_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.digits < 15:
            raise DomainError(f"digits must be >= 15, got {self.digits}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_BUDGET = PrecisionBudget()


def working_dps(b: PrecisionBudget) -> int:
    """Internal decimal precision: generous headroom over the target tolerance.

    Coefficient cancellation in downstream functional evaluations demands
    roughly twice the target digits plus a fixed pad.
    """
    target = -math.log10(b.rel_tol)
    return max(b.digits, 2 * math.ceil(max(target, 0)) + 10)


@dataclass(frozen=True)
class QPoint:
    """Evaluation point (q, x) with q > 0, |q - 1| >= Q_GUARD and x > 0.

    Fields may be float, int or mpf; pass an mpf reciprocal computed at
    working precision when exact q <-> 1/q pairing matters (a double rounds
    1/q by ~1e-16, which the reflection identity would amplify).
    """

    q: float
    x: float

    def __post_init__(self):
        if not self.q > 0:
            raise DomainError(f"q must be positive, got {self.q}")
        # small relative fuzz so decimal inputs like 0.9999 sit outside the guard
        if abs(self.q - 1) < Q_GUARD * (1 - 1e-6):
            raise QNearOneError(
                f"q={self.q} is within {Q_GUARD} of 1; use the classical oracle for the q->1 limit"
            )
        if not self.x > 0:
            raise DomainError(f"x must be positive, got {self.x}")


@dataclass(frozen=True)
class SeriesValue:
    """A computed value with a certified truncation-error bound.

    On successful return tail_bound <= rel_tol * |value| holds by
    construction of the stopping rule.
    """

    value: object  # mpmath mpf
    tail_bound: object  # mpmath mpf, >= 0
    terms_used: int

    def __float__(self) -> float:
        return float(self.value)


def _exp_series_sum(y, w, m: int, const, coef, b: PrecisionBudget):
    """Certified sum S = sum_{n>=1} n^m w^n / (1 - y^n) with 0 < y < 1, 0 < w < 1.

    The caller's final value is const + coef*S; the stopping rule compares the
    tail bound in those units against rel_tol * |running value|.  Returns
    (S, tail_bound_on_S, terms).  Every later term ratio is bounded by
    rho_n = ((n+1)/n)^m * w because (1 - y^k)/(1 - y^(k+1)) < 1, which makes
    term_n / (1 - rho_n) a certified geometric tail bound once rho_n < 1.
    """
    tol = mp.mpf(b.rel_tol)
    coef_abs = abs(coef)
    total = mp.mpf(0)
    wn = mp.mpf(1)
    yn = mp.mpf(1)
    for n in range(1, b.max_terms + 1):
        wn *= w
        yn *= y
        term = wn * (n**m) / (1 - yn) if m else wn / (1 - yn)
        total += term
        rho = w * (mp.mpf(n + 1) / n) ** m if m else w
        if rho < 1:
            tail = term / (1 - rho)
            running = const + coef * total
            if coef_abs * tail <= tol * abs(running):
                return total, tail, n
    raise NonConvergence(
        f"series tail bound not met within {b.max_terms} terms (y={mp.nstr(y, 8)}, w={mp.nstr(w, 8)})",
        terms_used=b.max_terms,
    )


@lru_cache(maxsize=_CACHE_SIZE)
def psi_q(p: QPoint, b: PrecisionBudget = DEFAULT_BUDGET) -> SeriesValue:
    """q-digamma psi_q(x) with a certified relative tail bound."""
    with _EVAL_LOCK, mp.workdps(working_dps(b)):
        q = mp.mpf(p.q)
        x = mp.mpf(p.x)
        lnq = mp.log(q)
        if q < 1:
            const = -mp.log(1 - q)
            coef = lnq
            y = q
        else:
            const = -mp.log(q - 1) + lnq * (x - mp.mpf(1) / 2)
            coef = -lnq
            y = 1 / q
        s, tail, n = _exp_series_sum(y, y**x, 0, const, coef, b)
        return SeriesValue(const + coef * s, abs(coef) * tail, n)


@lru_cache(maxsize=_CACHE_SIZE)
def psi_q_deriv(p: QPoint, m: int, b: PrecisionBudget = DEFAULT_BUDGET) -> SeriesValue:
    """m-th derivative of psi_q, m >= 1.

    Sign contract: (-1)^(m+1) * psi_q^(m)(x) > 0 on the whole domain.
    """
    if m < 1:
        raise DomainError(f"derivative order must be >= 1, got {m}")
    with _EVAL_LOCK, mp.workdps(working_dps(b)):
        q = mp.mpf(p.q)
        x = mp.mpf(p.x)
        lnq = mp.log(q)
        if q < 1:
            const = mp.mpf(0)
            coef = lnq ** (m + 1)
            y = q
        else:
            const = lnq if m == 1 else mp.mpf(0)
            coef = (-1) ** (m + 1) * lnq ** (m + 1)
            y = 1 / q
        s, tail, n = _exp_series_sum(y, y**x, m, const, coef, b)
        return SeriesValue(const + coef * s, abs(coef) * tail, n)


@lru_cache(maxsize=_CACHE_SIZE)
def gamma_q(p: QPoint, b: PrecisionBudget = DEFAULT_BUDGET) -> SeriesValue:
    """Gamma_q(x) from the product form, with certified relative error.

    The product is summed in log space.  With y = min(q, 1/q), the log of the
    n-th factor is tau_n = ln(1 - y^(n+1)) - ln(1 - y^(n+x)), and

        sum_{k>N} |tau_k| <= y^(N+1) |y^x - y| / ((1-y)(1 - y^(N+1+min(1,x)))),

    by the mean value theorem on ln(1-t).  An absolute bound delta on the log
    sum gives a relative bound expm1(delta) on the value.
    """
    with _EVAL_LOCK, mp.workdps(working_dps(b)):
        q = mp.mpf(p.q)
        x = mp.mpf(p.x)
        tol = mp.mpf(b.rel_tol)
        if q < 1:
            log_pref = (1 - x) * mp.log(1 - q)
            y = q
        else:
            log_pref = (1 - x) * mp.log(q - 1) + x * (x - 1) / 2 * mp.log(q)
            y = 1 / q
        yx = y**x
        gap = abs(yx - y)
        mn = min(mp.mpf(1), x)
        log_sum = mp.mpf(0)
        yn = mp.mpf(1)  # y^n
        for n in range(b.max_terms):
            log_sum += mp.log((1 - yn * y) / (1 - yn * yx))
            yn *= y
            # yn is now y^(n+1): tail over factors n+1, n+2, ...
            tail_log = yn * gap / ((1 - y) * (1 - yn * y**mn))
            if tail_log <= tol / 2:
                value = mp.exp(log_pref + log_sum)
                return SeriesValue(value, value * mp.expm1(tail_log), n + 1)
        raise NonConvergence(
            f"gamma_q product tail bound not met within {b.max_terms} factors (q={p.q}, x={p.x})",
            terms_used=b.max_terms,
        )


def psi_classical_deriv(x: float, m: int, dps: int = 50):
    """Classical polygamma psi^(m)(x) (digamma for m = 0).

    Serves as the q -> 1 oracle; delegates to mpmath's implementation at a
    precision far beyond the 12 digits the contract requires.
    """
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    if m < 0:
        raise DomainError(f"order must be >= 0, got {m}")
    with _EVAL_LOCK, mp.workdps(dps):
        return mp.psi(m, mp.mpf(x))
