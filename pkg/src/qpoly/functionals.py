"""Finite-difference functionals built from the q-polygamma family.

The forward difference is Delta f(x;c) = (f(x+c) - f(x))/c.  With the order
conventions psi_q^(0) = psi_q and psi_q^(-1)(x) = -x (so that the order -1
difference is the constant -1), the balanced product functional is

    F_{r,m,n,s}(x;q,c) = (-1)^(m+n) Delta psi_q^(m-1) * Delta psi_q^(n-1)
                         - alpha(r,m,n,s) (-1)^(r+s) Delta psi_q^(r-1) * Delta psi_q^(s-1),

for index quads r >= m >= n >= s >= 0 with r+s = m+n, and

    G_m(x;q,c) = m * F_{m+1,m,1,0}(x;q,c) - (-1)^(m+1) d(m,q) ln(q) * Delta psi_q^(m-1)(x;c),

where d(m,q) = m-1 when 0 < q < 1 and m >= 2, else 1.  G_m(x;q,c) and, for
s >= 2, F_{r,m,n,s}(x;q,c) are invariant under q -> 1/q.

The c -> 0+ limits replace differences by derivatives:

    G-limit: m(-1)^(m+1) psi_q' psi_q^(m) + (-1)^(m+1) psi_q^(m+1) - (-1)^(m+1) d(m,q) ln(q) psi_q^(m),
    F-limit: (-1)^(m+n) psi_q^(m) psi_q^(n) - alpha (-1)^(r+s) psi_q^(r) psi_q^(s).

The classical variant uses the ordinary polygamma functions with the separate
convention psi^(0)(x) = -1 and a free weight t in place of alpha.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from mpmath import mp

from .combinatorics import alpha_fraction, beta_fraction
from .errors import DomainError
from .qspecial import (
    DEFAULT_BUDGET,
    PrecisionBudget,
    QPoint,
    SeriesValue,
    _EVAL_LOCK,
    psi_classical_deriv,
    psi_q,
    psi_q_deriv,
    working_dps,
)

__all__ = [
    "IndexQuad",
    "FDStep",
    "StructureConstants",
    "structure_constants",
    "d_const",
    "fwd_diff",
    "psi_q_order",
    "F_q_fd",
    "G_q_fd",
    "F_q_deriv",
    "G_q_deriv",
    "F_classic",
]

_FD_DPS = 50  # working precision for the generic forward-difference helper


@dataclass(frozen=True)
class IndexQuad:
    """Integer quad (r, m, n, s) with r >= m >= n >= s >= 0 and r >= 1."""

    r: int
    m: int
    n: int
    s: int

    def __post_init__(self):
        for name in ("r", "m", "n", "s"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise DomainError(f"{name} must be a nonnegative integer, got {v!r}")
        if not (self.r >= self.m >= self.n >= self.s):
            raise DomainError(f"ordering r >= m >= n >= s violated: {self.as_tuple()}")
        if self.r < 1:
            raise DomainError("r must be >= 1")

    @property
    def balanced(self) -> bool:
        return self.r + self.s == self.m + self.n

    def as_tuple(self) -> tuple:
        return (self.r, self.m, self.n, self.s)

    def require_balanced(self):
        if not self.balanced:
            raise DomainError(f"index quad must be balanced (r+s = m+n), got {self.as_tuple()}")


@dataclass(frozen=True)
class FDStep:
    """Forward-difference step c != 0 (certification paths require c > 0)."""

    c: float

    def __post_init__(self):
        if self.c == 0:
            raise DomainError("finite-difference step c must be nonzero")


@dataclass(frozen=True)
class StructureConstants:
    """Exact factorial-ratio weights attached to an index quad; beta exists
    only for s >= 1."""

    alpha: Fraction
    beta: Optional[Fraction]


def structure_constants(idx: IndexQuad) -> StructureConstants:
    """alpha = (m-1)!(n-1)!/((r-1)!(s-1)!)  (denominator (r-1)! when s = 0),
    beta = m!n!/(r!s!) for s >= 1."""
    if idx.n < 1:
        raise DomainError(f"structure constants need n >= 1, got {idx.as_tuple()}")
    alpha = alpha_fraction(idx.r, idx.m, idx.n, idx.s)
    beta = beta_fraction(idx.r, idx.m, idx.n, idx.s) if idx.s >= 1 else None
    return StructureConstants(alpha=alpha, beta=beta)


def d_const(m: int, q: float) -> int:
    """Piecewise constant: m-1 when 0 < q < 1 and m >= 2, else 1."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if not q > 0 or q == 1:
        raise DomainError(f"q must be positive and != 1, got {q}")
    if q < 1 and m >= 2:
        return m - 1
    return 1


def fwd_diff(f: Callable, x: float, step: FDStep):
    """Generic forward difference (f(x+c) - f(x))/c at fixed working precision.

    Abscissae are passed to f as mpf values so the evaluated gap matches the
    divisor exactly; callables should accept any real-number type.
    """
    with _EVAL_LOCK, mp.workdps(_FD_DPS):
        c = mp.mpf(step.c)
        x0 = mp.mpf(x)
        hi = mp.mpf(f(x0 + c))
        lo = mp.mpf(f(x0))
        return (hi - lo) / c


def psi_q_order(order: int, p: QPoint, b: PrecisionBudget = DEFAULT_BUDGET) -> SeriesValue:
    """Order accessor: -1 -> -x (exact), 0 -> psi_q, m >= 1 -> psi_q^(m)."""
    if order < -1:
        raise DomainError(f"order must be >= -1, got {order}")
    if order == -1:
        with _EVAL_LOCK, mp.workdps(working_dps(b)):
            return SeriesValue(-mp.mpf(p.x), mp.mpf(0), 0)
    if order == 0:
        return psi_q(p, b)
    return psi_q_deriv(p, order, b)


def _delta_psi(order: int, p: QPoint, c, b: PrecisionBudget):
    """Delta psi_q^(order)(x;c); caller must hold the precision context.

    The shifted abscissa is formed in mpf arithmetic: a double x + c would
    misplace the upper point by ~1e-16 relative, making the evaluated gap
    inconsistent with the divisor c and spoiling certified-level identities.
    """
    x_hi = mp.mpf(p.x) + mp.mpf(c)
    hi = psi_q_order(order, QPoint(p.q, x_hi), b).value
    lo = psi_q_order(order, p, b).value
    return (hi - lo) / mp.mpf(c)


def F_q_fd(idx: IndexQuad, p: QPoint, step: FDStep, b: PrecisionBudget = DEFAULT_BUDGET):
    """Balanced finite-difference product functional at (q,x) with step c."""
    idx.require_balanced()
    sc = structure_constants(idx)
    with _EVAL_LOCK, mp.workdps(working_dps(b)):
        c = mp.mpf(step.c)
        d = {order: _delta_psi(order, p, c, b) for order in {idx.m - 1, idx.n - 1, idx.r - 1, idx.s - 1}}
        alpha = mp.mpf(sc.alpha.numerator) / sc.alpha.denominator
        lead = (-1) ** (idx.m + idx.n) * d[idx.m - 1] * d[idx.n - 1]
        sub = alpha * (-1) ** (idx.r + idx.s) * d[idx.r - 1] * d[idx.s - 1]
        return lead - sub


def G_q_fd(m: int, p: QPoint, step: FDStep, b: PrecisionBudget = DEFAULT_BUDGET):
    """G_m(x;q,c) = m * F_{m+1,m,1,0}(x;q,c) - (-1)^(m+1) d(m,q) ln(q) Delta psi_q^(m-1)(x;c)."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    dm = d_const(m, p.q)
    f_part = F_q_fd(IndexQuad(m + 1, m, 1, 0), p, step, b)
    with _EVAL_LOCK, mp.workdps(working_dps(b)):
        lnq = mp.log(mp.mpf(p.q))
        sign = (-1) ** (m + 1)
        return m * f_part - sign * dm * lnq * _delta_psi(m - 1, p, mp.mpf(step.c), b)


def F_q_deriv(idx: IndexQuad, p: QPoint, b: PrecisionBudget = DEFAULT_BUDGET):
    """c -> 0+ limit of F_q_fd: (-1)^(m+n) psi^(m) psi^(n) - alpha (-1)^(r+s) psi^(r) psi^(s)."""
    idx.require_balanced()
    if idx.s < 1:
        raise DomainError(f"derivative form needs s >= 1, got {idx.as_tuple()}")
    sc = structure_constants(idx)
    with _EVAL_LOCK, mp.workdps(working_dps(b)):
        vals = {o: psi_q_deriv(p, o, b).value for o in {idx.m, idx.n, idx.r, idx.s}}
        alpha = mp.mpf(sc.alpha.numerator) / sc.alpha.denominator
        lead = (-1) ** (idx.m + idx.n) * vals[idx.m] * vals[idx.n]
        sub = alpha * (-1) ** (idx.r + idx.s) * vals[idx.r] * vals[idx.s]
        return lead - sub


def G_q_deriv(m: int, p: QPoint, b: PrecisionBudget = DEFAULT_BUDGET):
    """c -> 0+ limit of G_q_fd:

    m(-1)^(m+1) psi_q' psi_q^(m) + (-1)^(m+1) psi_q^(m+1) - (-1)^(m+1) d(m,q) ln(q) psi_q^(m).
    """
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    dm = d_const(m, p.q)
    with _EVAL_LOCK, mp.workdps(working_dps(b)):
        p1 = psi_q_deriv(p, 1, b).value
        pm = psi_q_deriv(p, m, b).value
        pm1 = psi_q_deriv(p, m + 1, b).value
        lnq = mp.log(mp.mpf(p.q))
        sign = (-1) ** (m + 1)
        return m * sign * p1 * pm + sign * pm1 - sign * dm * lnq * pm


def F_classic(idx: IndexQuad, x: float, t: float):
    """Classical product functional with free weight t:

    (-1)^(m+n) psi^(m)(x) psi^(n)(x) - t (-1)^(r+s) psi^(r)(x) psi^(s)(x),

    with the convention psi^(0)(x) = -1 (orders >= 1 are true polygammas).
    Balance of the quad is not required here.
    """
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")

    def order_value(o: int):
        return mp.mpf(-1) if o == 0 else psi_classical_deriv(x, o)

    with _EVAL_LOCK, mp.workdps(_FD_DPS):
        vals = {o: order_value(o) for o in {idx.m, idx.n, idx.r, idx.s}}
        lead = (-1) ** (idx.m + idx.n) * vals[idx.m] * vals[idx.n]
        sub = mp.mpf(t) * (-1) ** (idx.r + idx.s) * vals[idx.r] * vals[idx.s]
        return lead - sub
