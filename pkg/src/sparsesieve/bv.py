"""Prime-counting error terms in progressions over windows of floor(j^alpha).

For a modulus q and reduced residue a the error term is

    E(x, q, a) = sum_{n <= x, n = a (q)} Lambda(n) - x / phi(q),

and the experiment aggregates the worst residue per modulus over the window
{floor(j^alpha)} intersect [R, 2R].  Lambda sums run over prime powers, not
primes only; every float sum uses math.fsum, which is exactly rounded and
hence independent of traversal order (this is what makes the outputs
byte-identical across runs and thread counts).
"""

from __future__ import annotations

import csv
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arith import divisors, euler_phi
from .bounds import level_of_distribution
from .errors import ValidationError
from .moduli import ps_floor, window
from .primes import PrimeTable


def mangoldt_counts(table: PrimeTable, x: int, q: int, a: int) -> dict:
    """Exact multiplicities {p: #prime powers p^e <= x in the progression}.

    The float Lambda sum is sum_p count * log p; the partition identity over
    residues holds exactly at this integer level.
    """
    if q < 1 or not 1 <= a <= q:
        raise ValidationError(f"need 1 <= a <= q, got a={a}, q={q}")
    counts: dict = {}
    res = a % q
    for p in table.primes_upto(min(x, table.x_max)).tolist():
        if p % q == res:
            counts[p] = counts.get(p, 0) + 1
    for n, p in table.prime_powers():
        if n > x:
            break
        if n % q == res:
            counts[p] = counts.get(p, 0) + 1
    return counts


def mangoldt_sum(table: PrimeTable, x: int, q: int, a: int) -> float:
    """sum of Lambda(n) over n <= x, n = a (mod q)."""
    if q < 1 or not 1 <= a <= q:
        raise ValidationError(f"need 1 <= a <= q, got a={a}, q={q}")
    if x > table.x_max:
        raise ValidationError(f"x={x} beyond table range {table.x_max}")
    res = a % q
    primes = table.primes_upto(x)
    sel = primes[primes % q == res]
    logs = np.log(sel.astype(np.float64)).tolist()
    logs.extend(math.log(p) for n, p in table.prime_powers() if n <= x and n % q == res)
    return math.fsum(logs)


def error_term(table: PrimeTable, x: int, q: int, a: int) -> float:
    """E(x, q, a); only reduced residues carry an error term."""
    if math.gcd(a, q) != 1:
        raise ValidationError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    main = x / euler_phi(q)
    if q > x:
        return -main
    return mangoldt_sum(table, x, q, a) - main


def residue_error_terms(table: PrimeTable, x: int, q: int) -> list:
    """(a, E(x, q, a)) for every reduced residue a, ascending in a.

    Single grouped pass over the prime table; each residue's logs still go
    through one fsum, so the values match error_term() bit for bit.
    """
    if q < 1:
        raise ValidationError(f"need q >= 1, got {q}")
    primes = table.primes_upto(min(x, table.x_max))
    res = primes % q
    order = np.argsort(res, kind="stable")
    res_sorted = res[order]
    logs_sorted = np.log(primes[order].astype(np.float64))
    cut = np.searchsorted(res_sorted, np.arange(q + 1))
    extras: dict = {}
    for n, p in table.prime_powers():
        if n > x:
            break
        extras.setdefault(n % q, []).append(math.log(p))
    phi = euler_phi(q)
    main = x / phi
    out = []
    for a in range(1, q + 1):
        if math.gcd(a, q) != 1:
            continue
        r = a % q
        logs = logs_sorted[cut[r]: cut[r + 1]].tolist()
        logs.extend(extras.get(r, ()))
        out.append((a, math.fsum(logs) - main))
    return out


def worst_residue(table: PrimeTable, x: int, q: int) -> tuple:
    """(a*, E(x, q, a*)) with |E| maximal; ties keep the smallest a*."""
    best_a, best_e = None, None
    for a, e in residue_error_terms(table, x, q):
        if best_e is None or abs(e) > abs(best_e):
            best_a, best_e = a, e
    return best_a, best_e


@dataclass(frozen=True)
class BVReport:
    alpha: float
    x: int
    R: int
    rows: tuple          # (q, phi_q, a_star, E) ascending in q
    M_alpha: float       # sum of |E| over the window
    rho: float           # M_alpha * R / (x * window size)

    @property
    def window_size(self) -> int:
        return len(self.rows)

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "x": self.x, "R": self.R,
                "window_size": self.window_size, "M_alpha": self.M_alpha,
                "rho": self.rho}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("# schema=v1\n")
            w = csv.writer(fh)
            w.writerow(["q", "phi_q", "a_star", "E", "abs_E"])
            for q, phi, a_star, e in self.rows:
                w.writerow([q, phi, a_star, repr(e), repr(abs(e))])


def window_error_sum(alpha, x: int, R: int, table: PrimeTable = None,
                     threads: int = 1) -> BVReport:
    """The aggregated worst-residue error over the window [R, 2R].

    Rows are computed independently per modulus (optionally in a thread pool)
    and always assembled in ascending q, so the report is deterministic for
    any thread count.
    """
    if R > x:
        raise ValidationError(f"need R <= x, got R={R}, x={x}")
    win = window(alpha, R)
    if len(win) == 0:
        raise ValidationError(f"window [R, 2R] at alpha={alpha}, R={R} is empty")
    if table is None:
        table = PrimeTable.build(x)

    def row(q):
        a_star, e = worst_residue(table, x, q)
        return (q, euler_phi(q), a_star, e)

    qs = list(win.members)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, qs))
    else:
        rows = [row(q) for q in qs]
    m_alpha = math.fsum(abs(r[3]) for r in rows)
    rho = m_alpha * R / (x * len(rows))
    return BVReport(float(alpha), x, R, tuple(rows), m_alpha, rho)


def is_ps_member(d: int, alpha) -> bool:
    """True iff d = floor(j^alpha) for some integer j >= 1."""
    if d < 1:
        return False
    if d == 1:
        return True
    j0 = int(round(d ** (1.0 / float(alpha))))
    for j in (j0 - 1, j0, j0 + 1):
        if j >= 1 and ps_floor(j, alpha) == d:
            return True
    return False


def ps_largest_divisor(n: int, alpha) -> int:
    """Largest divisor of n of the form floor(j^alpha); 1 always qualifies."""
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    best = 1
    for d in divisors(n):
        if d > best and is_ps_member(d, alpha):
            best = d
    return best


def shifted_prime_search(alpha, theta: float, x: int, table: PrimeTable = None) -> list:
    """All primes p <= x with ps_largest_divisor(p-1) >= p^theta, sorted.

    Warns when theta is at or above the proven level exponent for this alpha,
    where the search is exploratory rather than theorem-backed.
    """
    af = float(alpha)
    if 1 < af < 2.25:
        phi_a = float(level_of_distribution(af))
        if theta >= phi_a:
            warnings.warn(f"theta={theta} is not below the proven level {phi_a:.6f} "
                          f"for alpha={alpha}", stacklevel=2)
    if table is None:
        table = PrimeTable.build(x)
    hits = []
    for p in table.primes_upto(x).tolist():
        d = ps_largest_divisor(p - 1, alpha) if p > 2 else 1
        if d >= p**theta:
            hits.append((p, d))
    return hits
