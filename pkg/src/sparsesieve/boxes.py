"""Congruence box counts and Farey-fraction spacing statistics.

Two exact quantities tie the additive energy of a moduli sequence to its
large sieve behaviour: the number of solutions of a*m_j = v (mod m) with v in
a short centered window, and the maximal crowding of the Farey fractions
a/m_j on the torus at scale 1/(2N).  Both are computed here with exact
integer / rational arithmetic.

Conventions frozen for the window |v| <= V: residues map to the signed
representative in (-m/2, m/2], with +m/2 chosen for the ambiguous class at
even m.  The torus neighbourhood {y : <x - y> < 1/(2N)} is an open condition
and contains y = x itself.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .arith import euler_phi
from .energy import additive_energy, max_shifted_energy
from .errors import ValidationError
from .moduli import ModuliSequence, polynomial_eval


def signed_residue(x: int, m: int) -> int:
    """Representative of x mod m in (-m/2, m/2]; +m/2 kept at even m."""
    v = x % m
    if 2 * v > m:
        v -= m
    return v


def torus_distance(x) -> Fraction:
    """<x> = distance from x to the nearest integer, exact for rationals."""
    if isinstance(x, Fraction):
        f = x - math.floor(x)
        return min(f, 1 - f)
    f = x - math.floor(x)
    return min(f, 1.0 - f)


def count_box_solutions(a: int, m: int, seq, U: int, V: int) -> int:
    """Number of j <= U with a*m_j mod m inside the window |v| <= V.

    When V >= m/2 the window covers every residue class, so the count is U.
    """
    if math.gcd(a, m) != 1:
        raise ValidationError(f"need gcd(a, m) = 1, got a={a}, m={m}")
    values = seq.values if isinstance(seq, ModuliSequence) else tuple(seq)
    if not 1 <= U <= len(values):
        raise ValidationError(f"U={U} outside 1..{len(values)}")
    if V < 0:
        raise ValidationError(f"need V >= 0, got {V}")
    if 2 * V >= m:
        return U
    count = 0
    for mj in values[:U]:
        if abs(signed_residue(a * mj, m)) <= V:
            count += 1
    return count


def count_poly_box(a: int, m: int, coeffs, U: int, V: int) -> int:
    """Same count with m_j replaced by f(u), u = 1..U."""
    if math.gcd(a, m) != 1:
        raise ValidationError(f"need gcd(a, m) = 1, got a={a}, m={m}")
    if U < 1 or V < 0:
        raise ValidationError(f"need U >= 1 and V >= 0, got U={U}, V={V}")
    if 2 * V >= m:
        return U
    count = 0
    for u in range(1, U + 1):
        if abs(signed_residue(a * polynomial_eval(coeffs, u), m)) <= V:
            count += 1
    return count


@dataclass(frozen=True)
class FareySet:
    """Reduced fractions a/m_j over the dyadic index block Q <= j <= 2Q."""

    fractions: tuple        # (a, m) pairs, lexicographic in (m, a)
    points: tuple           # distinct values as Fractions in [0, 1), sorted
    total_count: int        # sum of phi(m_j); counts coincident labels separately
    distinct_count: int

    def min_torus_gap(self) -> Fraction:
        """Smallest pairwise torus distance between distinct points."""
        pts = self.points
        if len(pts) < 2:
            return Fraction(1, 2)
        gaps = [b - a for a, b in zip(pts, pts[1:])]
        gaps.append(1 + pts[0] - pts[-1])          # wraparound
        return min(min(gaps), Fraction(1, 2))


def farey_set(seq, Q: int) -> FareySet:
    """All reduced a/m_j with 1 <= a < m_j over j in [Q, 2Q]."""
    values = seq.values if isinstance(seq, ModuliSequence) else tuple(seq)
    if Q < 1 or 2 * Q > len(values):
        raise ValidationError(f"need 1 <= Q and 2Q <= {len(values)}, got Q={Q}")
    fracs = []
    total = 0
    pts = set()
    for m in values[Q - 1:2 * Q]:
        if m == 1:
            continue                               # no a with 1 <= a < 1
        total += euler_phi(m)
        for a in range(1, m):
            if math.gcd(a, m) == 1:
                fracs.append((a, m))
                pts.add(Fraction(a, m))
    points = tuple(sorted(pts))
    return FareySet(tuple(fracs), points, total, len(points))


def _max_window_count(points, radius: Fraction) -> int:
    """max over x in points of #{y in points : <x-y> < radius}, exact."""
    pts = list(points)
    K = len(pts)
    if K == 0:
        raise ValidationError("spacing of an empty point set")
    doubled = pts + [p + 1 for p in pts]
    best = 0
    for i, x in enumerate(pts):
        x1 = x + 1                                  # scan the second copy around x
        lo = bisect_right(doubled, x1 - radius)
        hi = bisect_left(doubled, x1 + radius)
        best = max(best, hi - lo)
    return best


def spacing_count(seq, N: int, Q: int) -> int:
    """M(N, Q): maximal number of Farey points within torus distance < 1/(2N).

    Coincident fractions from distinct denominators are one torus point; the
    count includes the center itself.
    """
    if N < 1:
        raise ValidationError(f"need N >= 1, got {N}")
    fs = farey_set(seq, Q)
    return _max_window_count(fs.points, Fraction(1, 2 * N))


@dataclass(frozen=True)
class SpacingAuditRow:
    Q: int
    N: int
    measured: int
    term1: float            # E(m_Q)^(1/4)
    term2: float            # N^(-1/4) * Q^(alpha/2) * E*(m_Q)^(1/4)
    ratio: float

    def as_csv_row(self):
        return [self.Q, self.N, self.measured, repr(self.term1),
                repr(self.term2), repr(self.ratio)]


def spacing_energy_audit(seq: ModuliSequence, N: int, Q: int) -> SpacingAuditRow:
    """Measured spacing count against its energy-based ceiling.

    Requires Q^alpha <= N <= Q^(2*alpha).  The two right-hand terms are
    computed from the exact energies of the first Q moduli (growth factors
    dropped); the ratio is a diagnostic for slope audits, not a theorem check.
    """
    alpha = seq.alpha_hint
    if not (Q**alpha <= N <= Q ** (2 * alpha)):
        raise ValidationError(
            f"N={N} outside [Q^alpha, Q^(2 alpha)] = [{Q**alpha:.6g}, {Q**(2*alpha):.6g}]")
    measured = spacing_count(seq, N, Q)
    prefix = seq.prefix(Q)
    e_plus = additive_energy(prefix)
    if len(set(prefix)) >= 2:
        _, e_star = max_shifted_energy(prefix)
    else:
        e_star = 0
    term1 = e_plus ** 0.25
    term2 = N ** -0.25 * Q ** (alpha / 2) * e_star ** 0.25
    return SpacingAuditRow(Q, N, measured, term1, term2, measured / (term1 + term2))


def write_audit_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("# schema=v1\n")
        w = csv.writer(fh)
        w.writerow(["Q", "N", "measured", "term1", "term2", "ratio"])
        for row in rows:
            w.writerow(row.as_csv_row())
