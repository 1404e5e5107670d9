"""Exact additive energy of integer sets.

E(S)   = #{(s1,t1,s2,t2) in S^4 : s1+t1 = s2+t2}
E_h(S) = #{(s1,t1,s2,t2) in S^4 : s1+t1 = s2+t2+h}
E*(S)  = max over h != 0 of E_h(S)

Every count is an exact integer; no floating point enters this module.
Three independent routes are provided and must agree wherever they all run:
a literal quadruple oracle, representation-function counting on the multiset
of pairwise sums, and an indicator-array convolution.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapacityError, ValidationError

ORACLE_SIZE_CAP = 64          # literal O(n^4) enumeration
PAIR_BUDGET = 80_000_000      # support-pair enumeration cap for E*
H_TABLE_MAX_SHIFTS = 10**6    # emit the full shift table only below this
DENSE_RANGE_CAP = 1 << 26     # max(S) - min(S) cap for the dense backend
_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class EnergyReport:
    """Energies of one set: E, E*, a maximizing shift, optional full table."""

    n: int
    e_plus: int
    e_star: int
    h_star: Optional[int]
    h_table: Optional[dict] = None

    def to_json(self) -> dict:
        return {"n": self.n, "e_plus": self.e_plus, "e_star": self.e_star,
                "h_star": self.h_star}

    def h_table_to_csv(self, path) -> None:
        if self.h_table is None:
            raise ValidationError("shift table was truncated; only (h_star, e_star) kept")
        with open(path, "w", newline="") as fh:
            fh.write("# schema=v1\n")
            w = csv.writer(fh)
            w.writerow(["h", "E_h"])
            for h in sorted(self.h_table):
                w.writerow([h, self.h_table[h]])


def _as_sorted_set(S) -> list:
    values = sorted(set(int(v) for v in S))
    if not values:
        raise ValidationError("energy of the empty set is not defined here")
    return values


def _int64_safe(values) -> bool:
    return -_INT64_SAFE < values[0] and values[-1] < _INT64_SAFE


def representation_counts(S) -> dict:
    """r(s) = number of ordered pairs (i, j) with m_i + m_j = s.

    Invariants: sum r = n^2 and sum r^2 = E(S).
    """
    values = _as_sorted_set(S)
    n = len(values)
    if n * n > PAIR_BUDGET:
        raise CapacityError(f"{n}^2 pairwise sums exceed the pair budget")
    if _int64_safe(values) and n > 64:
        arr = np.asarray(values, dtype=np.int64)
        sums = (arr[:, None] + arr[None, :]).ravel()
        vals, cnts = np.unique(sums, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, cnts)}
    counts: dict = {}
    for i, a in enumerate(values):
        counts[2 * a] = counts.get(2 * a, 0) + 1
        for b in values[i + 1:]:
            s = a + b
            counts[s] = counts.get(s, 0) + 2
    return counts


def additive_energy(S) -> int:
    """E(S) = sum over s of r(s)^2, exactly."""
    return sum(c * c for c in representation_counts(S).values())


def shifted_energy(S, h: int) -> int:
    """E_h(S) = sum over s of r(s) * r(s-h), exactly."""
    r = representation_counts(S)
    h = int(h)
    return sum(c * r.get(s - h, 0) for s, c in r.items())


def _support(S):
    r = representation_counts(S)
    vals = sorted(r)
    return vals, [r[v] for v in vals]


def _best_shift(cands) -> tuple:
    """(h_star, e_star) from (h, E_h) pairs: max E, then min |h|, then h > 0."""
    best = None
    for h, e in cands:
        if h == 0:
            continue
        key = (e, -abs(h), h)
        if best is None or key > best:
            best = key
    if best is None:
        return None, 0
    return best[2], best[0]


def _positive_shift_sums(vals, cnts):
    """All (h > 0, E_h) pairs aggregated with exact int64 arithmetic."""
    D = len(vals)
    npairs = D * (D - 1) // 2
    if npairs > PAIR_BUDGET:
        raise CapacityError(f"{npairs} support pairs exceed the pair budget")
    v = np.asarray(vals, dtype=np.int64)
    c = np.asarray(cnts, dtype=np.int64)
    diffs, weights = [], []
    chunk = max(1, int(4_000_000 // max(D, 1)))
    for start in range(1, D, chunk):
        stop = min(D, start + chunk)
        block = v[start:stop, None] - v[None, :stop]
        wblock = c[start:stop, None] * c[None, :stop]
        mask = block > 0
        diffs.append(block[mask])
        weights.append(wblock[mask])
    if not diffs:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    d = np.concatenate(diffs)
    w = np.concatenate(weights)
    order = np.argsort(d, kind="stable")
    d, w = d[order], w[order]
    starts = np.flatnonzero(np.r_[True, d[1:] != d[:-1]])
    return d[starts], np.add.reduceat(w, starts)


def _report_from_support(vals, cnts, n: int) -> EnergyReport:
    e_plus = sum(c * c for c in cnts)
    if len(vals) == 1:
        return EnergyReport(n, e_plus, 0, None, {0: e_plus})
    if _int64_safe(vals) and n * n * n < _INT64_SAFE:
        hs, es = _positive_shift_sums(vals, cnts)
        i = np.lexsort((hs, -es))[0]          # max E_h, then smallest positive h
        h_star, e_star = int(hs[i]), int(es[i])
        if 2 * len(hs) + 1 <= H_TABLE_MAX_SHIFTS:
            table = {0: e_plus}
            for h, e in zip(hs, es):
                table[int(h)] = int(e)
                table[-int(h)] = int(e)
            return EnergyReport(n, e_plus, e_star, h_star, table)
        return EnergyReport(n, e_plus, e_star, h_star, None)
    # arbitrary-precision fallback
    table: dict = {}
    for v1, c1 in zip(vals, cnts):
        for v2, c2 in zip(vals, cnts):
            h = v1 - v2
            table[h] = table.get(h, 0) + c1 * c2
    h_star, e_star = _best_shift(table.items())
    if len(table) <= H_TABLE_MAX_SHIFTS:
        return EnergyReport(n, e_plus, e_star, h_star, table)
    return EnergyReport(n, e_plus, e_star, h_star, None)


def max_shifted_energy(S) -> tuple:
    """(h_star, e_star) with e_star = max over h != 0 of E_h(S).

    Ties break to the smallest |h|, positive preferred; by the E_h = E_{-h}
    symmetry the reported shift is therefore always positive.
    """
    values = _as_sorted_set(S)
    if len(values) < 2:
        raise ValidationError("max shifted energy needs |S| >= 2")
    vals, cnts = _support(values)
    rep = _report_from_support(vals, cnts, len(values))
    return rep.h_star, rep.e_star


def energy_oracle(S) -> EnergyReport:
    """Literal quadruple enumeration; the ground truth for everything else."""
    values = _as_sorted_set(S)
    n = len(values)
    if n > ORACLE_SIZE_CAP:
        raise CapacityError(f"oracle is O(n^4); cap is |S| <= {ORACLE_SIZE_CAP}")
    sums = [a + b for a in values for b in values]
    table: dict = {}
    for u in sums:
        for v in sums:
            h = u - v
            table[h] = table.get(h, 0) + 1
    h_star, e_star = _best_shift(table.items())
    return EnergyReport(n, table[0], e_star, h_star, table)


def energy_fast(S, backend: str = "sparse") -> EnergyReport:
    """Fast exact energies via either the sparse or the dense route.

    sparse: enumerate the distinct pairwise sums and cross-correlate their
            multiplicities (works for any integer set).
    dense:  convolve the 0/1 indicator array with itself; requires
            max(S) - min(S) <= DENSE_RANGE_CAP.
    """
    values = _as_sorted_set(S)
    if backend == "sparse":
        vals, cnts = _support(values)
        return _report_from_support(vals, cnts, len(values))
    if backend == "dense":
        span = values[-1] - values[0]
        if span > DENSE_RANGE_CAP:
            raise CapacityError(
                f"value range {span} exceeds dense cap {DENSE_RANGE_CAP}; use backend='sparse'")
        if not _int64_safe(values):
            raise CapacityError("dense backend needs int64-safe values; use backend='sparse'")
        offset = values[0]
        ind = np.zeros(span + 1, dtype=np.int64)
        ind[np.asarray(values, dtype=np.int64) - offset] = 1
        r = np.convolve(ind, ind)
        nz = np.flatnonzero(r)
        vals = [int(i) + 2 * offset for i in nz]
        cnts = [int(r[i]) for i in nz]
        return _report_from_support(vals, cnts, len(values))
    raise ValidationError(f"unknown backend {backend!r}; expected 'sparse' or 'dense'")
