"""Exponential sum evaluators and window cardinalities for floor(j^alpha).

Phases are never fed to exp() raw: rational data is reduced mod 1 in exact
arithmetic, and irrational powers j^alpha are reduced at >= 30 significant
digits before rounding to binary64 (for R near 2^20 the integer part of
h j^alpha / t would otherwise eat most of the mantissa).

The dyadic convention u ~ U always means U/2 < u <= U.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import CapacityError, PrecisionError, ValidationError
from .moduli import ps_floor

WEYL_LATTICE_BUDGET = 10**8      # literal enumeration cap for the Weyl rhs
_EXACT_TERM_CAP = 10**6          # exact rational distances up to this many terms


@dataclass(frozen=True)
class ExponentialSumValue:
    value: complex
    terms: int                   # triangle inequality: |value| <= terms

    def magnitude(self) -> float:
        return abs(self.value)


def _exact_coeffs(coeffs):
    return [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]


def weyl_sum(coeffs, U: int) -> ExponentialSumValue:
    """Sum of e(F(u)) for u = 1..U, F given by low-to-high real coefficients.

    Binary64 coefficients are treated as the exact rationals they encode, so
    the mod-1 reduction of F(u) is exact before the single rounding to float.
    """
    if U < 1:
        raise ValidationError(f"need U >= 1, got {U}")
    cs = _exact_coeffs(coeffs)
    if not cs:
        cs = [Fraction(0)]
    total = 0j
    for u in range(1, U + 1):
        acc = Fraction(0)
        for c in reversed(cs):
            acc = acc * u + c
        frac = acc - math.floor(acc)
        total += complex(math.cos(2 * math.pi * float(frac)),
                         math.sin(2 * math.pi * float(frac)))
    return ExponentialSumValue(total, U)


def _dist_to_int_exact(x: Fraction) -> Fraction:
    f = x - math.floor(x)
    return min(f, 1 - f)


def weyl_bound_rhs(coeffs, U: int) -> float:
    """Literal value of the classical majorant for |weyl_sum|:

        U^(1-k/2^(k-1)) * ( sum over |l_1|,..,|l_(k-1)| < U of
                            min(U, <theta k! l_1...l_(k-1)>^(-1)) )^(1/2^(k-1))

    with theta the leading coefficient and k the declared degree.  The lattice
    is enumerated literally, capped at WEYL_LATTICE_BUDGET terms; the distance
    <.> is exact rational for up to _EXACT_TERM_CAP terms, binary64 beyond.
    """
    cs = list(coeffs)
    k = len(cs) - 1
    if k < 2:
        raise ValidationError(f"Weyl majorant needs degree >= 2, got {k}")
    n_terms = (2 * U - 1) ** (k - 1)
    if n_terms > WEYL_LATTICE_BUDGET:
        raise CapacityError(f"{n_terms} lattice points exceed the budget")
    theta = cs[-1]
    kk = 2 ** (k - 1)
    fact = math.factorial(k)
    ells = range(-(U - 1), U)
    if n_terms <= _EXACT_TERM_CAP:
        th = theta if isinstance(theta, Fraction) else Fraction(theta)

        def term(prod: int) -> float:
            if prod == 0 or th == 0:
                return float(U)
            d = _dist_to_int_exact(th * fact * prod)
            return float(U) if d == 0 else min(float(U), float(1 / d))

        total = 0.0
        stack = [1]
        for _ in range(k - 1):
            stack = [p * l for p in stack for l in ells]
        total = math.fsum(term(p) for p in stack)
    else:
        base = np.asarray(list(ells), dtype=np.float64)
        prod = np.array([1.0])
        for _ in range(k - 2):
            prod = np.multiply.outer(prod, base).ravel()
        th = float(theta) * fact
        total = 0.0
        for l in base:
            x = th * prod * l
            d = np.abs(x - np.round(x))
            with np.errstate(divide="ignore"):
                vals = np.where(d > 0, np.minimum(float(U), 1.0 / d), float(U))
            total += float(np.sum(vals))
    return U ** (1 - k / kk) * total ** (1 / kk)


def _certified_phase(alpha, j: int, h: int, t: int) -> float:
    """Fractional part of h * j^alpha / t, certified to ~binary64 accuracy."""
    # choose working digits from the magnitude of the integer part
    mag = abs(h) * float(j) ** float(alpha) / t + 2.0
    dps = 30 + int(math.log10(mag)) + 2
    if dps > 200:
        raise PrecisionError(f"phase reduction needs {dps} digits at j={j}")
    with mpmath.workdps(dps):
        x = mpmath.power(j, float(alpha)) * h / t
        frac = x - mpmath.floor(x)
        return float(frac)


def dyadic_indices(alpha, R: int) -> range:
    """Integers j with j ~ R^(1/alpha), i.e. R^(1/alpha)/2 < j <= R^(1/alpha).

    Both endpoints are resolved by exact comparisons j^alpha <= R (escalating
    to rational arithmetic when binary64 cannot separate them).
    """
    a = float(alpha)
    if not a > 1:
        raise ValidationError(f"need alpha > 1, got {alpha}")

    def pow_le(j: int, bound: int) -> bool:
        # certified j^alpha <= bound
        approx = a * math.log(j) - math.log(bound) if j > 1 else -math.log(bound)
        if abs(approx) > 1e-9:
            return approx < 0
        fa = Fraction(alpha) if not isinstance(alpha, Fraction) else alpha
        if fa.denominator > 1000:
            raise PrecisionError(f"cannot certify j^alpha vs {bound} at j={j}")
        return j**fa.numerator <= bound**fa.denominator

    j_hi = max(1, int(R ** (1.0 / a)))
    while pow_le(j_hi + 1, R):
        j_hi += 1
    while j_hi >= 1 and not pow_le(j_hi, R):
        j_hi -= 1
    # j <= R^(1/alpha)/2  <=>  (2j)^alpha <= R
    j_half = j_hi // 2
    while pow_le(2 * (j_half + 1), R):
        j_half += 1
    while j_half >= 1 and not pow_le(2 * j_half, R):
        j_half -= 1
    return range(j_half + 1, j_hi + 1)


def power_phase_sum(alpha, t: int, h: int, R: int) -> ExponentialSumValue:
    """S_h = sum over j ~ R^(1/alpha) of e(h j^alpha / t)."""
    if t < 1:
        raise ValidationError(f"need t >= 1, got {t}")
    js = dyadic_indices(alpha, R)
    total = 0j
    for j in js:
        if h == 0:
            total += 1.0
            continue
        frac = _certified_phase(alpha, j, h, t)
        total += complex(math.cos(2 * math.pi * frac), math.sin(2 * math.pi * frac))
    return ExponentialSumValue(total, len(js))


def ps_window_members(alpha, R: int) -> list:
    """Members floor(j^alpha) lying in the dyadic window (R/2, R]."""
    a = float(alpha)
    if not a > 1:
        raise ValidationError(f"need alpha > 1, got {alpha}")
    jlo = max(1, int((R / 2) ** (1.0 / a)) - 2)
    members = []
    j = jlo
    while True:
        m = ps_floor(j, alpha)
        if m > R:
            break
        if 2 * m > R:                      # m > R/2 exactly
            members.append(m)
        j += 1
    return members


def ps_divisible_count(alpha, t: int, R: int):
    """Count and quotient set of {floor(j^alpha)/t : floor(j^alpha) ~ R, t | floor}."""
    if t < 1:
        raise ValidationError(f"need t >= 1, got {t}")
    members = ps_window_members(alpha, R)
    quotients = tuple(m // t for m in members if m % t == 0)
    return len(quotients), quotients


@dataclass(frozen=True)
class CardinalityAuditRow:
    alpha: float
    t: int
    R: int
    count: int
    rhs: float          # R^(1/alpha)/t + R^(1/2)
    ratio: float
    in_range: bool      # t <= R^(1/6)

    def as_csv_row(self):
        return [repr(self.alpha), self.t, self.R, self.count,
                repr(self.rhs), repr(self.ratio), int(self.in_range)]


def cardinality_audit(alpha, t_values, R_values) -> list:
    """Exact window-divisor counts against the ceiling R^(1/alpha)/t + R^(1/2).

    Rows with t beyond R^(1/6) are emitted but flagged, never dropped.
    """
    rows = []
    a = float(alpha)
    for R in R_values:
        members = ps_window_members(alpha, R)
        for t in t_values:
            count = sum(1 for m in members if m % t == 0)
            rhs = R ** (1.0 / a) / t + math.sqrt(R)
            rows.append(CardinalityAuditRow(a, t, R, count, rhs, count / rhs,
                                            t <= R ** (1.0 / 6.0)))
    return rows


def vdc_rhs(alpha, t: int, h: int, R: int) -> float:
    """Van der Corput majorant for |S_h|: (hR/t)^(1/2) + (t/h)^(1/2) R^(1/alpha - 1/2)."""
    a = float(alpha)
    return math.sqrt(h * R / t) + math.sqrt(t / h) * R ** (1.0 / a - 0.5)


def erdos_turan_count(points, a: float, b: float, H: int):
    """Exact #{u : gamma_u in [a, b]} next to the discrepancy majorant

        U/H + sum_{h<=H} (1/H + min(b-a, 1/h)) |sum_u e(h gamma_u)|

    computed from this module's own exponential sums (no implied constant).
    """
    if not (0 <= a <= b <= 1):
        raise ValidationError(f"need 0 <= a <= b <= 1, got [{a}, {b}]")
    if H < 1:
        raise ValidationError(f"need H >= 1, got {H}")
    pts = np.asarray(list(points), dtype=np.float64)
    U = len(pts)
    exact = int(np.count_nonzero((pts >= a) & (pts <= b)))
    rhs = U / H
    for h in range(1, H + 1):
        s = np.exp(2j * np.pi * h * pts).sum()
        rhs += (1.0 / H + min(b - a, 1.0 / h)) * abs(s)
    return exact, rhs


def fractional_window_readings(alpha, t: int, R: int) -> dict:
    """The two boundary readings behind the window-divisor count.

    Divisibility t | floor(j^alpha) over floor(j^alpha) ~ R is compared with
    the fractional-part conditions {j^alpha/t} < 1/t (strict) and <= 1/t
    (closed) over j^alpha ~ R; the readings differ by O(1) and the exact
    discrepancy is reported rather than resolved.
    """
    count_div, _ = ps_divisible_count(alpha, t, R)
    strict = closed = 0
    for j in dyadic_indices(alpha, R):
        frac = _certified_phase(alpha, j, 1, t)
        if frac < 1.0 / t:
            strict += 1
        if frac <= 1.0 / t:
            closed += 1
    return {"divisor_count": count_div, "strict_count": strict,
            "closed_count": closed,
            "max_discrepancy": max(abs(count_div - strict), abs(count_div - closed))}
