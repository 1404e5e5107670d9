"""Exponent calculus over the known large sieve bounds for power moduli.

Every bound is represented by the exponent e(k, nu) of Q in its leading term
when N = Q^nu, with all o(1) factors dropped; comparisons between bounds are
comparisons of these piecewise-linear exponent functions.  Rational inputs
are evaluated in exact rational arithmetic (the only irrational ingredient is
the sqrt(k) term of the monomial energy bound).

Catalog ids:
  classical           (Q^2 + N), k = 1 only
  trivial             min(Q^(2k) + N, Q (Q^k + N))
  conjecture          Q^(k+1) + N   (optimistic envelope; flagged unproven)
  zhao                Q^(k+1) + N Q^(1-1/kappa) + N^(1-1/kappa) Q^(1+k/kappa)
  baier_zhao          Q^(k+1) + N + N^(1/2) Q^k
  baier_zhao_k3       Q^4 + max(N^(9/10) Q^(6/5), N Q^(6/7)), k = 3 only
  halupczok           Q^(k+1) + min(A_k, N^(1-w) Q^(1+(2k-1)w))
  munsch              Q^((k+2)/(k+1)) N^(1-1/(k(k+1)))
  energy_monomial     N Q^(1/2) + N^(3/4) Q^(k/2+1/4+1/(2 sqrt(k))), k >= 5
  polynomial_general  same exponents as zhao, stated for degree-k polynomials
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError

# Range gates for the prime-counting experiment: R = x^theta is probed for
# theta between these two exponents.
R_EXPONENT_MIN = Fraction(9, 20)
R_EXPONENT_MAX = Fraction(1, 2)

# Below this growth exponent, windows of floor(j^alpha) contain the full
# expected number of primes (Rivat-Wu), which upgrades the prime-moduli
# variant of the experiment to level 1/2.
RIVAT_WU_ALPHA0 = Fraction(243, 205)


def kappa(k: int) -> int:
    """kappa_k = 2^(k-1)."""
    if k < 2:
        raise ValidationError(f"kappa needs k >= 2, got {k}")
    return 2 ** (k - 1)


def omega(k: int) -> Fraction:
    """omega_k = 1 / ((k-1)(k-2) + 2)."""
    if k < 2:
        raise ValidationError(f"omega needs k >= 2, got {k}")
    return Fraction(1, (k - 1) * (k - 2) + 2)


def _half(x):
    return x / 2 if isinstance(x, (Fraction, int)) else x / 2.0


def _e_classical(k, nu):
    return max(2, nu)


def _e_trivial(k, nu):
    return min(max(2 * k, nu), 1 + max(k, nu))


def _e_conjecture(k, nu):
    return max(k + 1, nu)


def _e_zhao(k, nu):
    kk = Fraction(1, kappa(k))
    return max(k + 1, nu + 1 - kk, nu * (1 - kk) + 1 + k * kk)


def _e_baier_zhao(k, nu):
    return max(k + 1, nu, _half(nu) + k)


def _e_baier_zhao_k3(k, nu):
    return max(4, max(nu * Fraction(9, 10) + Fraction(6, 5), nu + Fraction(6, 7)))


def _e_halupczok(k, nu):
    w1 = Fraction(1, k * (k - 1))
    a_part = max(nu + 1 - w1, nu * (1 - w1) + Fraction(k, k - 1))
    w = omega(k)
    other = nu * (1 - w) + 1 + (2 * k - 1) * w
    return max(k + 1, min(a_part, other))


def _e_munsch(k, nu):
    return Fraction(k + 2, k + 1) + nu * (1 - Fraction(1, k * (k + 1)))


def _e_energy_monomial(k, nu):
    nu = float(nu)
    return max(nu + 0.5, 0.75 * nu + k / 2 + 0.25 + 0.5 / math.sqrt(k))


_CATALOG = {
    # id: (validity predicate, evaluator, proven?)
    "classical": (lambda k: k == 1, _e_classical, True),
    "trivial": (lambda k: k >= 1, _e_trivial, True),
    "conjecture": (lambda k: k >= 1, _e_conjecture, False),
    "zhao": (lambda k: k >= 2, _e_zhao, True),
    "baier_zhao": (lambda k: k >= 2, _e_baier_zhao, True),
    "baier_zhao_k3": (lambda k: k == 3, _e_baier_zhao_k3, True),
    "halupczok": (lambda k: k >= 2, _e_halupczok, True),
    "munsch": (lambda k: k >= 2, _e_munsch, True),
    "energy_monomial": (lambda k: k >= 5, _e_energy_monomial, True),
    "polynomial_general": (lambda k: k >= 2, _e_zhao, True),
}

# earliest-publication order used for ties in winner maps
CATALOG_ORDER = ("classical", "trivial", "conjecture", "zhao", "polynomial_general",
                 "baier_zhao", "baier_zhao_k3", "halupczok", "munsch", "energy_monomial")

BOUND_IDS = tuple(CATALOG_ORDER)


def is_proven(bound_id: str) -> bool:
    return _CATALOG[bound_id][2]


def delta_exponent(bound_id: str, k: int, nu):
    """Exponent e with Delta = Q^(e + o(1)) at N = Q^nu for one catalog bound."""
    if bound_id not in _CATALOG:
        raise ValidationError(f"unknown bound id {bound_id!r}")
    valid, evaluate, _ = _CATALOG[bound_id]
    if not valid(k):
        raise ValidationError(f"bound {bound_id!r} is not stated for k={k}")
    return evaluate(k, nu)


def energy_bound_exponent(nu, alpha, e_plus_exp, e_star_exp):
    """Exponent of the generic energy bound N E^(1/4) + N^(3/4) Q^(a/2) E*^(1/4),

    with E = Q^(e_plus_exp + o(1)) and E* = Q^(e_star_exp + o(1)).
    """
    q = Fraction(1, 4)
    return max(nu + e_plus_exp * q, nu * Fraction(3, 4) + _half(alpha) + e_star_exp * q)


def composition_identity_check(k: int, nu_points: int = 100) -> bool:
    """The monomial bound must equal the generic energy bound specialised to
    E = Q^2 and E* = Q^(1 + 2/sqrt(k)); checked to 1e-12 across the range."""
    if k < 5:
        raise ValidationError(f"monomial energy bound needs k >= 5, got {k}")
    e_star_exp = 1 + 2 / math.sqrt(k)
    for i in range(nu_points):
        nu = k + (k * i) / (nu_points - 1)          # spans [k, 2k]
        lhs = float(energy_bound_exponent(nu, k, 2, e_star_exp))
        rhs = float(delta_exponent("energy_monomial", k, nu))
        if abs(lhs - rhs) > 1e-12:
            return False
    return True


def _bisect_root(f, lo: float, hi: float, tol: float = 1e-9) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if hi - lo < tol:
            break
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _first_sign_change(f, lo: float, hi: float, step: float = 0.01, tol: float = 1e-9):
    """Smallest root of f in (lo, hi], or None; f is continuous piecewise linear."""
    x0, f0 = lo, f(lo)
    x = lo + step
    while x0 < hi:
        x = min(x, hi)
        f1 = f(x)
        if f0 == 0 and f1 != 0:
            return x0
        if (f0 < 0) != (f1 < 0):
            return _bisect_root(f, x0, x, tol)
        x0, f0 = x, f1
        if x >= hi:
            break
        x += step
    return None


def crossover(id_a: str, id_b: str, k: int, lo=None, hi=None, tol: float = 1e-9):
    """Maximal open nu-intervals inside [lo, hi] where bound a beats bound b.

    Defaults to the critical range [k, 2k].  Returns a possibly empty list of
    (start, end) pairs with endpoints resolved to `tol`.
    """
    lo = float(k if lo is None else lo)
    hi = float(2 * k if hi is None else hi)
    f = lambda nu: float(delta_exponent(id_a, k, nu)) - float(delta_exponent(id_b, k, nu))
    grid = 2000
    xs = [lo + (hi - lo) * i / grid for i in range(grid + 1)]
    fs = [f(x) for x in xs]
    intervals = []
    start = None
    for i, (x, v) in enumerate(zip(xs, fs)):
        below = v < 0
        if below and start is None:
            start = lo if i == 0 else _bisect_root(f, xs[i - 1], x, tol)
        if not below and start is not None:
            end = _bisect_root(f, xs[i - 1], x, tol) if i > 0 else x
            if end - start > tol:
                intervals.append((start, end))
            start = None
    if start is not None:
        if hi - start > tol:
            intervals.append((start, hi))
    return intervals


@dataclass(frozen=True)
class CrossoverReport:
    """The four comparison exponents for one k, from pairwise bisection."""

    k: int
    lambda_k: float     # munsch stops beating baier_zhao above this
    mu_k: float         # munsch stops beating halupczok above this
    sigma_k: float      # energy_monomial starts beating munsch above this
    tau_k: float        # energy_monomial stops beating baier_zhao above this

    def to_json(self) -> dict:
        return {"k": self.k, "lambda": self.lambda_k, "mu": self.mu_k,
                "sigma": self.sigma_k, "tau": self.tau_k}


def comparison_exponents(k: int, tol: float = 1e-9) -> CrossoverReport:
    """lambda/mu/sigma/tau for one k, each a bisection solution of the
    defining two-bound equality (searched upward from its stated endpoint)."""
    if k < 2:
        raise ValidationError(f"comparison exponents need k >= 2, got {k}")

    def diff(a, b):
        return lambda nu: float(delta_exponent(a, k, nu)) - float(delta_exponent(b, k, nu))

    hi = 8.0 * k
    f_mb = diff("munsch", "baier_zhao")
    lam = _first_sign_change(f_mb, float(k), hi, tol=tol)
    lam = float(k) if lam is None and f_mb(float(k)) >= 0 else lam
    if lam is None:
        lam = hi

    mu_lo = k + 1 + 2 / (k - 1)
    f_mh = diff("munsch", "halupczok")
    mu = _first_sign_change(f_mh, mu_lo + 1e-7, hi, tol=tol)
    if mu is None:
        mu = hi

    sigma = tau = float("nan")
    if k >= 5:
        sigma = _first_sign_change(diff("energy_monomial", "munsch"), float(k), hi, tol=tol)
        tau = _first_sign_change(diff("energy_monomial", "baier_zhao"), float(k), hi, tol=tol)
        sigma = hi if sigma is None else sigma
        tau = hi if tau is None else tau
    return CrossoverReport(k, lam, mu, sigma, tau)


def winner_map(k: int, nu_grid) -> list:
    """Best proven bound id at each nu; ties go to the earliest catalog entry."""
    candidates = [bid for bid in CATALOG_ORDER
                  if _CATALOG[bid][0](k) and is_proven(bid)]
    rows = []
    for nu in nu_grid:
        best_id, best_e = None, None
        for bid in candidates:
            e = float(delta_exponent(bid, k, nu))
            if best_e is None or e < best_e - 1e-15:
                best_id, best_e = bid, e
        rows.append((nu, best_id, best_e))
    return rows


_PHI_BREAKS = (Fraction(26, 23), Fraction(2), Fraction(23, 11), Fraction(9, 4))


def level_of_distribution(alpha):
    """The piecewise level exponent Phi(alpha) on 1 < alpha < 9/4.

    Exact rational output for rational input; continuous across the three
    interior breakpoints 26/23, 2 and 23/11, and > 9/20 on the whole range.
    """
    a = alpha if isinstance(alpha, (Fraction, int)) else Fraction(alpha)
    if not (1 < a < Fraction(9, 4)):
        raise ValidationError(f"level exponent defined for 1 < alpha < 9/4, got {alpha}")
    if a < _PHI_BREAKS[0]:
        value = 3 * a / (10 * a - 4)
    elif a < _PHI_BREAKS[1]:
        value = Fraction(13, 28)
    elif a < _PHI_BREAKS[2]:
        value = 13 * a / (34 * a - 12)
    else:
        value = 7 * a / (20 * a - 10)
    return value if isinstance(alpha, (Fraction, int)) else float(value)
