"""Generation and validation of sparse moduli sequences.

Families: perfect powers j^k, integer polynomials f(j), and Piatetski-Shapiro
floors floor(j^alpha) with real alpha > 1, plus dyadic windows of the latter.

All values are exact integers capped at 128 bits (a silent wrap anywhere here
would corrupt every downstream count).  Floors of j^alpha are certified: the
value is evaluated to >= 30 significant digits, and whenever it lands within
1e-10 of an integer the floor is re-derived by exact integer arithmetic (or a
PrecisionError is raised when alpha admits no exact route).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .arith import integer_nth_floor_root
from .errors import PrecisionError, ValidationError

VALUE_CAP = (1 << 127) - 1  # moduli live in signed 128-bit integers
FLOOR_EPSILON = 1e-10       # escalate to exact arithmetic inside this band
CERT_DPS = 40               # working precision for the certified evaluation
EXACT_DENOM_CAP = 1000      # alpha = p/q admits the exact route up to this q


@dataclass(frozen=True)
class ModuliSequence:
    """A strictly increasing sequence of positive integer moduli."""

    kind: str                 # "power" | "polynomial" | "piatetski_shapiro" | "explicit"
    params: dict
    values: tuple
    alpha_hint: float

    def __post_init__(self):
        prev = 0
        for i, v in enumerate(self.values):
            if not isinstance(v, int) or v < 1:
                raise ValidationError(f"modulus at index {i} is not a positive integer: {v}")
            if v > VALUE_CAP:
                raise ValidationError(f"modulus at index {i} exceeds 128-bit range: {v}")
            if v <= prev:
                raise ValidationError(f"sequence not strictly increasing at index {i}: {prev} -> {v}")
            prev = v

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def prefix(self, Q: int) -> tuple:
        """First Q values m_1..m_Q."""
        if Q < 1 or Q > len(self.values):
            raise ValidationError(f"prefix length Q={Q} outside 1..{len(self.values)}")
        return self.values[:Q]

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params, "values": list(self.values)}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("# schema=v1\n")
            w = csv.writer(fh)
            w.writerow(["m_j"])
            for v in self.values:
                w.writerow([v])

    @staticmethod
    def from_json(obj: dict) -> "ModuliSequence":
        return ModuliSequence(obj["kind"], dict(obj.get("params", {})),
                              tuple(int(v) for v in obj["values"]),
                              float(obj.get("params", {}).get("alpha_hint", 0.0)) or _infer_alpha(obj))


def _infer_alpha(obj: dict) -> float:
    params = obj.get("params", {})
    if "k" in params:
        return float(params["k"])
    if "alpha" in params:
        return float(params["alpha"])
    return 1.0


@dataclass(frozen=True)
class DyadicWindow:
    """Members of {floor(j^alpha)} inside [R, 2R], with their source indices."""

    alpha: float
    R: int
    members: tuple          # sorted moduli m with R <= m <= 2R
    indices: tuple          # j with floor(j^alpha) = corresponding member

    def __len__(self):
        return len(self.members)

    def index_of(self, m: int) -> int:
        """Recover j with floor(j^alpha) = m."""
        return self.indices[self.members.index(m)]


def generate_power(k: int, Q: int) -> ModuliSequence:
    """[1^k, 2^k, ..., Q^k]."""
    if k < 1 or Q < 1:
        raise ValidationError(f"need k >= 1 and Q >= 1, got k={k}, Q={Q}")
    values = []
    for j in range(1, Q + 1):
        v = j**k
        if v > VALUE_CAP:
            raise ValidationError(f"j^k exceeds 128-bit range at j={j} (k={k})")
        values.append(v)
    return ModuliSequence("power", {"k": k, "Q": Q}, tuple(values), float(k))


def polynomial_eval(coeffs, x: int) -> int:
    """Evaluate an integer polynomial given low-to-high coefficients."""
    acc = 0
    for c in reversed(list(coeffs)):
        acc = acc * x + c
    return acc


def generate_polynomial(coeffs, Q: int) -> ModuliSequence:
    """[f(1), ..., f(Q)] for integer f with positive leading coefficient.

    Fails if any f(j) < 1 or the values are not strictly increasing on 1..Q;
    monotonicity is checked on the generated range, not proved symbolically.
    """
    coeffs = [int(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        raise ValidationError("polynomial must have degree >= 1")
    if coeffs[-1] <= 0:
        raise ValidationError("leading coefficient must be positive")
    if Q < 1:
        raise ValidationError(f"need Q >= 1, got {Q}")
    values = []
    for j in range(1, Q + 1):
        v = polynomial_eval(coeffs, j)
        if v < 1:
            raise ValidationError(f"f(j) = {v} < 1 at j={j}")
        if v > VALUE_CAP:
            raise ValidationError(f"f(j) exceeds 128-bit range at j={j}")
        if values and v <= values[-1]:
            raise ValidationError(f"values not strictly increasing at j={j}: {values[-1]} -> {v}")
        values.append(v)
    return ModuliSequence("polynomial", {"coefficients": coeffs, "Q": Q},
                          tuple(values), float(len(coeffs) - 1))


def _alpha_as_fraction(alpha) -> Fraction:
    # binary64 inputs convert exactly; Fraction inputs pass through
    return alpha if isinstance(alpha, Fraction) else Fraction(alpha)


def ps_floor(j: int, alpha) -> int:
    """Certified floor(j^alpha) for j >= 1, alpha > 1.

    Fast path: binary64 with a generous safety margin.  Near-integer values are
    re-evaluated at CERT_DPS digits; values still within FLOOR_EPSILON of an
    integer fall back to exact p/q-th root arithmetic when alpha = p/q has a
    small denominator, otherwise a PrecisionError names the offending j.
    """
    a = float(alpha)
    if j == 1:
        return 1
    if a.is_integer():
        return j ** int(a)
    approx = float(j) ** a
    frac = approx - math.floor(approx)
    margin = max(1e-9, approx * 1e-12)
    if margin < min(frac, 1.0 - frac) and approx < 2**52:
        return int(math.floor(approx))
    with mpmath.workdps(CERT_DPS):
        v = mpmath.power(j, a)
        f = int(mpmath.floor(v))
        d = v - f
        if FLOOR_EPSILON < d < 1 - FLOOR_EPSILON:
            return f
    # within the uncertain band: exact route for rational alpha of small height
    fa = _alpha_as_fraction(alpha)
    if fa.denominator > EXACT_DENOM_CAP:
        raise PrecisionError(f"floor(j^alpha) uncertifiable at j={j}, alpha={alpha}")
    return integer_nth_floor_root(j**fa.numerator, fa.denominator)


def generate_piatetski_shapiro(alpha, jmax: int) -> ModuliSequence:
    """[floor(1^alpha), ..., floor(jmax^alpha)] with every floor certified."""
    a = float(alpha)
    if not a > 1:
        raise ValidationError(f"need alpha > 1, got {alpha}")
    if jmax < 1:
        raise ValidationError(f"need jmax >= 1, got {jmax}")
    values = []
    for j in range(1, jmax + 1):
        v = ps_floor(j, alpha)
        if v > VALUE_CAP:
            raise ValidationError(f"floor(j^alpha) exceeds 128-bit range at j={j}")
        values.append(v)
    return ModuliSequence("piatetski_shapiro", {"alpha": a, "jmax": jmax},
                          tuple(values), a)


def explicit_sequence(values, alpha_hint: float = 1.0) -> ModuliSequence:
    """Wrap a user-supplied strictly increasing list of positive integers."""
    return ModuliSequence("explicit", {}, tuple(int(v) for v in values), float(alpha_hint))


def window(alpha, R: int) -> DyadicWindow:
    """The set {floor(j^alpha) : j in N} intersected with [R, 2R].

    The j-range is solved from R^(1/alpha)..(2R)^(1/alpha) with slack, then the
    certified floors are filtered against the closed interval.
    """
    a = float(alpha)
    if not a > 1:
        raise ValidationError(f"need alpha > 1, got {alpha}")
    if R < 1:
        raise ValidationError(f"need R >= 1, got {R}")
    jlo = max(1, int(math.floor(R ** (1.0 / a))) - 2)
    jhi = int(math.ceil((2 * R) ** (1.0 / a))) + 2
    members, indices = [], []
    for j in range(jlo, jhi + 1):
        m = ps_floor(j, alpha)
        if R <= m <= 2 * R:
            members.append(m)
            indices.append(j)
        elif m > 2 * R:
            break
    return DyadicWindow(a, R, tuple(members), tuple(indices))


def is_convex(seq) -> bool:
    """True iff consecutive gaps strictly increase along the whole sequence."""
    values = seq.values if isinstance(seq, ModuliSequence) else tuple(seq)
    if len(values) < 3:
        raise ValidationError("convexity needs at least 3 terms")
    gaps = [b - a for a, b in zip(values, values[1:])]
    return all(g2 > g1 for g1, g2 in zip(gaps, gaps[1:]))


def growth_exponent(seq) -> float:
    """Least-squares slope of log m_j against log j over the upper half.

    A finite-sample diagnostic for the growth exponent; never a correctness
    gate for anything downstream.
    """
    values = seq.values if isinstance(seq, ModuliSequence) else tuple(seq)
    L = len(values)
    if L < 8:
        raise ValidationError("growth_exponent needs at least 8 terms")
    lo = L // 2
    x = np.log(np.arange(lo + 1, L + 1, dtype=float))
    y = np.log(np.array([float(v) for v in values[lo:]]))
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)


def sequence_from_spec(family: str, *, k=None, alpha=None, coefficients=None,
                       length: int) -> ModuliSequence:
    """Uniform constructor used by the CLI and the audit grids."""
    if family == "power":
        return generate_power(int(k), length)
    if family == "polynomial":
        return generate_polynomial(coefficients, length)
    if family in ("ps", "piatetski_shapiro"):
        return generate_piatetski_shapiro(alpha, length)
    raise ValidationError(f"unknown moduli family: {family!r}")
