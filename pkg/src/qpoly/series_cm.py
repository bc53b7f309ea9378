"""Complete-monotonicity certification via series coefficients.

For q > 1 the functional G_m expands as

    G_m(x;q,c) = (ln q)^(m+1)/c^2 * sum_{n>=1} q^(-nx) H(m,n,q,c),

where for n >= 2

    H(m,n,q,c) = sum_{j=1}^{n-1} (1-q^(-jc))(1-q^(-(n-j)c)) m (n-j)^(m-1)
                                 / ((1-q^(-j))(1-q^(-(n-j))))
                 - c (1-q^(-nc)) (n^m - (m-1) n^(m-1) - delta_{1m}) / (1-q^(-n)),

and the n = 1 entry is the folded standalone-term coefficient
c (1-delta_{1m}) (m-2) (1-q^(-c)) / (1-q^(-1)) (identically zero for m <= 2).
Since q^(-nx) = exp(-n ln(q) x) and (ln q)^(m+1)/c^2 > 0, nonnegativity of
every coefficient certifies complete monotonicity in x; q < 1 targets route
through the exact reflection G_m(x;q,c) = G_m(x;1/q,c).

For 0 < q < 1 and s >= 1 the balanced functional F expands as

    F(x;q,c) = (-ln q)^(m+n)/c^2 * sum_{k>=2} q^(kx) * inner_k,
    inner_k  = sum_{j=1}^{k-1} (1-q^(jc))(1-q^((k-j)c)) / ((1-q^j)(1-q^(k-j)))
               * (j^(m-1)(k-j)^(n-1) - alpha j^(r-1)(k-j)^(s-1)).

s >= 2 targets with q > 1 route through the exact reflection
F(x;q,c) = F(x;1/q,c).  For s = 1 with q > 1 there is no exact reflection;
instead F(x;q,c) = F(x;1/q,c) - alpha (-1)^(r+s) ln(q) Delta psi_{1/q}(x;c),
which shifts each coefficient by -alpha c (1-y^(kc)) k^(r-1) / (1-y^k)
(y = 1/q) and adds a k = 1 term; that regime lies outside the proven
theorems and is reported as Inconclusive with its true margins.

An independent falsifier checks alternating divided differences of any
callable on a grid: f is completely monotonic iff (-1)^k Delta_h^k f >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Union

from mpmath import mp

from .combinatorics import alpha_fraction
from .errors import DomainError
from .functionals import IndexQuad
from .qspecial import DEFAULT_BUDGET, PrecisionBudget, _EVAL_LOCK, working_dps

__all__ = [
    "CertStatus",
    "CoeffTarget",
    "CertReport",
    "H_coeff",
    "F_inner_coeff",
    "target_plan",
    "target_coefficient",
    "certify_cm_series",
    "check_cm_grid",
    "DEFAULT_ABS_SLACK",
    "DEFAULT_GRID_SLACK",
]

# Coefficients proven positive must not be lost to rounding at 50-digit
# working precision; this is far below any genuine margin.
DEFAULT_ABS_SLACK = 1e-30
DEFAULT_GRID_SLACK = 1e-9

_GRID_FLOOR = mp.mpf("1e-30")


class CertStatus(Enum):
    CERTIFIED = "Certified"
    VIOLATED = "Violated"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class CoeffTarget:
    """A coefficient-positivity target: either G at level m or F at a quad."""

    kind: str  # "G" | "F"
    q: float
    c: float
    m: Optional[int] = None
    quad: Optional[IndexQuad] = None

    def __post_init__(self):
        if self.kind not in ("G", "F"):
            raise DomainError(f"kind must be 'G' or 'F', got {self.kind!r}")
        if not self.q > 0 or self.q == 1:
            raise DomainError(f"q must be positive and != 1, got {self.q}")
        if not self.c > 0:
            raise DomainError(f"certification requires c > 0, got {self.c}")
        if self.kind == "G":
            if self.m is None or self.m < 1:
                raise DomainError(f"G target needs m >= 1, got {self.m}")
        else:
            if self.quad is None:
                raise DomainError("F target needs an index quad")
            self.quad.require_balanced()
            if self.quad.s < 1:
                raise DomainError(f"F target needs s >= 1, got {self.quad.as_tuple()}")

    def describe(self) -> dict:
        base = {"kind": self.kind, "q": self.q, "c": self.c}
        if self.kind == "G":
            base["m"] = self.m
        else:
            base["quad"] = list(self.quad.as_tuple())
        return base


@dataclass
class CertReport:
    """Result of a certification sweep.

    min_margin is the smallest signed margin encountered (coefficients, after
    any sign flip, for series sweeps; scale-normalised alternating differences
    for grid sweeps).  Certified iff min_margin >= -abs_slack over the whole
    range; a Violated report carries the first offending index.
    """

    target: dict
    k_range: tuple
    min_margin: float
    first_violation: Optional[dict]
    status: CertStatus

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "k_range": list(self.k_range),
            "min_margin": self.min_margin,
            "first_violation": self.first_violation,
            "status": self.status.value,
        }


def H_coeff(m: int, n: int, q: float, c: float, b: PrecisionBudget = DEFAULT_BUDGET):
    """Coefficient of q^(-nx) in the G_m expansion (q > 1), up to the global
    positive factor (ln q)^(m+1)/c^2.  The n = 1 entry folds the standalone
    first-order term so certification sweeps one uniform stream."""
    if m < 1 or n < 1:
        raise DomainError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
    if not q > 1:
        raise DomainError(f"the expansion requires q > 1, got {q} (route q < 1 through 1/q)")
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    d1m = 1 if m == 1 else 0
    with _EVAL_LOCK, mp.workdps(working_dps(b)):
        y = 1 / mp.mpf(q)
        cc = mp.mpf(c)
        if n == 1:
            return cc * (1 - d1m) * (m - 2) * (1 - y**cc) / (1 - y)
        yj = [y**j for j in range(n + 1)]
        yjc = [(y**cc) ** j for j in range(n + 1)]
        total = mp.mpf(0)
        for j in range(1, n):
            w = (1 - yjc[j]) * (1 - yjc[n - j]) / ((1 - yj[j]) * (1 - yj[n - j]))
            total += w * m * ((n - j) ** (m - 1))
        total -= cc * (1 - yjc[n]) * (n**m - (m - 1) * n ** (m - 1) - d1m) / (1 - yj[n])
        return total


def F_inner_coeff(idx: IndexQuad, k: int, q: float, c: float, b: PrecisionBudget = DEFAULT_BUDGET):
    """Coefficient of q^(kx) in the F expansion (0 < q < 1, s >= 1, k >= 2),
    up to the global positive factor (-ln q)^(m+n)/c^2."""
    idx.require_balanced()
    if idx.s < 1:
        raise DomainError(f"expansion requires s >= 1, got {idx.as_tuple()}")
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if not 0 < q < 1:
        raise DomainError(f"the expansion requires 0 < q < 1, got {q} (route q > 1 through 1/q)")
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    al = alpha_fraction(idx.r, idx.m, idx.n, idx.s)
    with _EVAL_LOCK, mp.workdps(working_dps(b)):
        y = mp.mpf(q)
        cc = mp.mpf(c)
        yj = [y**j for j in range(k + 1)]
        yjc = [(y**cc) ** j for j in range(k + 1)]
        total = mp.mpf(0)
        for j in range(1, k):
            w = (1 - yjc[j]) * (1 - yjc[k - j]) / ((1 - yj[j]) * (1 - yj[k - j]))
            poly = Fraction(j ** (idx.m - 1) * (k - j) ** (idx.n - 1)) - al * (
                j ** (idx.r - 1) * (k - j) ** (idx.s - 1)
            )
            total += w * mp.mpf(poly.numerator) / poly.denominator
        return total


def _g_regime(m: int, c: float):
    """(regime, sign_flipped): the proven cases are 0 < c < 1 for every m,
    and c > 1 for m in {1, 2} with the sign flipped (the negated functional
    is the completely monotonic one)."""
    if 0 < c < 1:
        return "proven", False
    if c > 1 and m in (1, 2):
        return "proven", True
    return "unproven", False


def _f_regime(idx: IndexQuad, q: float, c: float) -> str:
    if not 0 < c < 1:
        return "unproven"
    if idx.s == 1:
        return "proven" if q < 1 else "unproven"
    if idx.s == 2:
        return "proven"
    if idx.s == 3 and idx.n == 4:
        return "proven"
    return "unproven"


def target_plan(target: CoeffTarget) -> dict:
    """Resolve how a target is swept: regime, sign flip, expansion route and
    first swept index.

    G targets with q < 1 route through the exact reflection at 1/q; so do F
    targets with s >= 2 and q > 1.  F targets with s = 1 and q > 1 use the
    reflected stream plus the order-0 correction (see module docstring) and
    start at k = 1.  G targets with m in {1, 2} start at k = 2 because their
    k = 1 coefficient is structurally absent (the folded value is
    identically zero).
    """
    if target.kind == "G":
        regime, flip = _g_regime(target.m, target.c)
        return {
            "regime": regime,
            "sign_flipped": flip,
            "expansion": "direct" if target.q > 1 else "reflected",
            "k_start": 2 if target.m in (1, 2) else 1,
        }
    regime = _f_regime(target.quad, target.q, target.c)
    if target.q < 1:
        expansion, k_start = "direct", 2
    elif target.quad.s >= 2:
        expansion, k_start = "reflected", 2
    else:
        expansion, k_start = "reflected_with_order0_correction", 1
    return {"regime": regime, "sign_flipped": False, "expansion": expansion, "k_start": k_start}


def target_coefficient(target: CoeffTarget, k: int, b: PrecisionBudget = DEFAULT_BUDGET):
    """The k-th raw series coefficient of the target (before any sign flip)."""
    if target.kind == "G":
        q_eff = target.q if target.q > 1 else 1.0 / target.q
        return H_coeff(target.m, k, q_eff, target.c, b)
    idx = target.quad
    if target.q < 1:
        return F_inner_coeff(idx, k, target.q, target.c, b)
    if idx.s >= 2:
        return F_inner_coeff(idx, k, 1.0 / target.q, target.c, b)
    # s = 1, q > 1: reflected stream plus the order-0 correction term.
    al = alpha_fraction(idx.r, idx.m, idx.n, idx.s)
    q_eff = 1.0 / target.q
    with _EVAL_LOCK, mp.workdps(working_dps(b)):
        y = mp.mpf(q_eff)
        cc = mp.mpf(target.c)
        base = F_inner_coeff(idx, k, q_eff, target.c, b) if k >= 2 else mp.mpf(0)
        corr = mp.mpf(al.numerator) / al.denominator * cc * (1 - (y**cc) ** k) * (k ** (idx.r - 1)) / (1 - y**k)
        return base - corr


def certify_cm_series(
    target: CoeffTarget,
    k_max: int,
    b: PrecisionBudget = DEFAULT_BUDGET,
    abs_slack: float = DEFAULT_ABS_SLACK,
) -> CertReport:
    """Sweep the coefficient stream of the target up to k_max and certify
    nonnegativity (after the regime's sign flip, if any).

    Regimes outside the proven theorems -- G with c > 1 and m >= 3 (or c = 1),
    F with s = 1 and q > 1, F with c >= 1, F with s >= 3 except n = 4 --
    are swept all the same but reported Inconclusive with their margins.
    """
    if k_max < 2:
        raise DomainError(f"k_max must be >= 2, got {k_max}")
    slack = mp.mpf(abs_slack)

    plan = target_plan(target)
    regime = plan["regime"]
    flip = plan["sign_flipped"]
    k_start = plan["k_start"]
    expansion = plan["expansion"]

    min_margin = None
    first_violation = None
    for k in range(k_start, k_max + 1):
        coeff = target_coefficient(target, k, b)
        margin = -coeff if flip else coeff
        if min_margin is None or margin < min_margin:
            min_margin = margin
        if first_violation is None and margin < -slack:
            first_violation = {"index": k, "value": float(margin)}

    if regime == "unproven":
        status = CertStatus.INCONCLUSIVE
    elif first_violation is not None:
        status = CertStatus.VIOLATED
    else:
        status = CertStatus.CERTIFIED

    descriptor = target.describe()
    descriptor.update(
        {
            "sign_flipped": flip,
            "regime": regime,
            "expansion": expansion,
            "abs_slack": abs_slack,
            "method": "series",
        }
    )
    return CertReport(
        target=descriptor,
        k_range=(k_start, k_max),
        min_margin=float(min_margin),
        first_violation=first_violation,
        status=status,
    )


def check_cm_grid(
    f: Callable,
    x_lo: float,
    x_hi: float,
    grid_points: int,
    h: float,
    k_max: int,
    slack: float = DEFAULT_GRID_SLACK,
    label: str = "f",
) -> CertReport:
    """Falsify or confirm complete monotonicity of a callable on a grid.

    At each grid x the divided differences Delta_h^k f(x) (k-fold iterated
    (g(x+h) - g(x))/h) are required to satisfy (-1)^k Delta_h^k f(x)
    >= -slack * scale for 0 <= k <= k_max, where scale is max(|f| over the
    (x,k) stencil, 1e-30).  min_margin reports the smallest scale-normalised
    signed difference.  This route is independent of the series expansions.
    """
    if not h > 0:
        raise DomainError(f"h must be positive, got {h}")
    if k_max < 0 or grid_points < 1:
        raise DomainError("need k_max >= 0 and grid_points >= 1")
    if x_hi < x_lo:
        raise DomainError(f"empty range [{x_lo}, {x_hi}]")
    if grid_points == 1:
        xs = [x_lo]
    else:
        step = (x_hi - x_lo) / (grid_points - 1)
        xs = [x_lo + i * step for i in range(grid_points)]

    slack_mp = mp.mpf(slack)
    min_margin = None
    first_violation = None
    for x in xs:
        stencil = [f(x + i * h) for i in range(k_max + 1)]
        with _EVAL_LOCK, mp.workdps(working_dps(DEFAULT_BUDGET)):
            vals = [mp.mpf(v) for v in stencil]
            hh = mp.mpf(h)
            level = list(vals)
            for k in range(0, k_max + 1):
                # the k-th difference at x reads f on the stencil x .. x+k*h
                scale = max(max(abs(v) for v in vals[: k + 1]), _GRID_FLOOR)
                signed = (-1) ** k * level[0]
                normalised = signed / scale
                if min_margin is None or normalised < min_margin:
                    min_margin = normalised
                if first_violation is None and signed < -slack_mp * scale:
                    first_violation = {"index": [x, k], "value": float(normalised)}
                if k < k_max:
                    level = [(level[i + 1] - level[i]) / hh for i in range(len(level) - 1)]

    status = CertStatus.CERTIFIED if first_violation is None else CertStatus.VIOLATED
    return CertReport(
        target={
            "kind": "grid",
            "fn": label,
            "x_lo": x_lo,
            "x_hi": x_hi,
            "grid_points": grid_points,
            "h": h,
            "k_max": k_max,
            "slack": slack,
            "method": "grid",
        },
        k_range=(0, k_max),
        min_margin=float(min_margin),
        first_violation=first_violation,
        status=status,
    )
