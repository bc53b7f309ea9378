"""Analytic weight-ratio inequalities and monotonicity facts.

For 0 < y < 1 define h(z;y,c) = ln((1 - y^(zc))/(1 - y^z)).  Its closed-form
second derivative

    h''(z;y,c) = (ln y)^2 y^z / (1 - y^z)^2 - (c ln y)^2 y^(zc) / (1 - y^(zc))^2

is <= 0 for 0 < c < 1 and >= 0 for c > 1, because u (ln u)^2 / (1-u)^2 is
increasing on (0,1).  Concavity of h in z yields, for integers n >= 2 and
every 1 <= j <= n-1 (writing y = 1/q for q > 1),

    (1 - y^(jc))(1 - y^((n-j)c)) / ((1 - y^j)(1 - y^(n-j)))  >=  c (1 - y^(nc))/(1 - y^n),

reversed when c > 1, and makes the left-hand weight sequence monotone over
j = 1..floor(n/2) (nondecreasing for c < 1, nonincreasing for c > 1).
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp

from .combinatorics import LemmaReport
from .errors import DomainError
from .qspecial import DEFAULT_BUDGET, PrecisionBudget, _EVAL_LOCK, working_dps

__all__ = ["RatioParams", "h_second_deriv", "verify_ratio_ineq", "weight_u"]

_WEIGHT_DPS = 50

# Margins in these checks are strict analytic inequalities; this absorbs only
# last-digit rounding at 50+ digit precision, never a genuine tie.
_ROUNDING_GUARD = mp.mpf("1e-40")


@dataclass(frozen=True)
class RatioParams:
    """Base y in (0,1) and exponent scale c > 0, c != 1."""

    y: float
    c: float

    def __post_init__(self):
        if not 0 < self.y < 1:
            raise DomainError(f"y must lie in (0,1), got {self.y}")
        if not self.c > 0 or self.c == 1:
            raise DomainError(f"c must be positive and != 1, got {self.c}")


def h_second_deriv(z: float, pr: RatioParams, b: PrecisionBudget = DEFAULT_BUDGET):
    """Return (h(z;y,c), h''(z;y,c)) in closed form.

    Sign contract: h'' <= 0 when 0 < c < 1 and h'' >= 0 when c > 1.
    """
    if not z > 0:
        raise DomainError(f"z must be positive, got {z}")
    with _EVAL_LOCK, mp.workdps(working_dps(b)):
        y = mp.mpf(pr.y)
        c = mp.mpf(pr.c)
        zz = mp.mpf(z)
        lny = mp.log(y)
        yz = y**zz
        yzc = y ** (zz * c)
        h = mp.log((1 - yzc) / (1 - yz))
        hdd = lny**2 * yz / (1 - yz) ** 2 - (c * lny) ** 2 * yzc / (1 - yzc) ** 2
        return h, hdd


def weight_u(u: float):
    """u (ln u)^2 / (1 - u)^2, increasing on 0 < u < 1 with limits 0 and 1."""
    if not 0 < u < 1:
        raise DomainError(f"u must lie in (0,1), got {u}")
    with _EVAL_LOCK, mp.workdps(_WEIGHT_DPS):
        um = mp.mpf(u)
        return um * mp.log(um) ** 2 / (1 - um) ** 2


def verify_ratio_ineq(n: int, q: float, c: float, b: PrecisionBudget = DEFAULT_BUDGET) -> LemmaReport:
    """Check the weight-ratio inequality for all 1 <= j <= n-1 at (q, c).

    Inputs with 0 < q < 1 are mapped through q -> 1/q, which turns the
    negative-exponent form into the identical positive-exponent form in
    y = min(q, 1/q).  For 0 < c < 1 each weight must dominate the right side
    and the weights must be nondecreasing over j = 1..floor(n/2); both
    directions reverse for c > 1.  Exact j <-> n-j symmetry is asserted
    alongside.
    """
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if not q > 0 or q == 1:
        raise DomainError(f"q must be positive and != 1, got {q}")
    if not c > 0 or c == 1:
        raise DomainError(f"c must be positive and != 1, got {c}")
    report = LemmaReport(lemma="ratio", ranges={"n": n, "q": q, "c": c, "direction": "<" if c > 1 else ">"})
    with _EVAL_LOCK, mp.workdps(working_dps(b)):
        y = mp.mpf(q) if q < 1 else 1 / mp.mpf(q)
        cc = mp.mpf(c)
        yj = [y**j for j in range(n + 1)]
        yjc = [(y**cc) ** j for j in range(n + 1)]
        rhs = cc * (1 - yjc[n]) / (1 - yj[n])
        weights = {}
        for j in range(1, n):
            w = (1 - yjc[j]) * (1 - yjc[n - j]) / ((1 - yj[j]) * (1 - yj[n - j]))
            weights[j] = w
            margin = (w - rhs) if c < 1 else (rhs - w)
            if margin < -_ROUNDING_GUARD * abs(rhs):
                report.violations.append(
                    {
                        "params": {"check": "ratio", "j": j, "n": n, "q": q, "c": c},
                        "k": j,
                        "lhs": mp.nstr(w, 25),
                        "rhs": mp.nstr(rhs, 25),
                    }
                )
        for j in range(1, n // 2 + 1):
            w_sym = (1 - yjc[n - j]) * (1 - yjc[j]) / ((1 - yj[n - j]) * (1 - yj[j]))
            if weights[j] != w_sym:
                report.violations.append(
                    {
                        "params": {"check": "symmetry", "j": j, "n": n},
                        "k": j,
                        "lhs": mp.nstr(weights[j], 25),
                        "rhs": mp.nstr(w_sym, 25),
                    }
                )
        for j in range(1, n // 2):
            step = weights[j + 1] - weights[j] if c < 1 else weights[j] - weights[j + 1]
            if step < -_ROUNDING_GUARD * abs(weights[j]):
                report.violations.append(
                    {
                        "params": {"check": "monotone-weights", "j": j, "n": n, "q": q, "c": c},
                        "k": j,
                        "lhs": mp.nstr(weights[j], 25),
                        "rhs": mp.nstr(weights[j + 1], 25),
                    }
                )
    return report
