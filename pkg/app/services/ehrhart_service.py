"""
Ehrhart service: exact lattice-point counts of dilated stable set polytopes,
h*-vectors, rational Hilbert series arithmetic, reciprocity and a-invariant
"""
import logging
from dataclasses import dataclass
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Poly, interpolate, symbols

from app.errors import VerificationError
from app.services.graph_service import Graph, is_cycle_graph
from app.services.lattice_service import InequalitySystem, count_level

logger = logging.getLogger(__name__)

lam = symbols("lambda")
t_sym = symbols("t")


@dataclass(frozen=True)
class EhrhartCounts:
    """Closed counts L(t) and interior counts L°(t) for t = 0..T"""
    graph: Graph
    closed: Tuple[int, ...]
    interior: Tuple[int, ...]

    @property
    def max_dilation(self) -> int:
        return len(self.closed) - 1

    def to_dict(self) -> Dict:
        return {"L": list(self.closed), "Linterior": list(self.interior)}


@dataclass(frozen=True)
class HVector:
    """h*-vector (h_0..h_s, trailing zeros trimmed) of a d-dimensional polytope"""
    coefficients: Tuple[int, ...]
    dimension: int

    @property
    def s(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, j: int) -> int:
        return self.coefficients[j]

    def __len__(self) -> int:
        return len(self.coefficients)

    def is_palindromic(self) -> bool:
        return self.coefficients == self.coefficients[::-1]

    def to_list(self) -> List[int]:
        return list(self.coefficients)


def _trim(coeffs: Sequence[int]) -> Tuple[int, ...]:
    coeffs = [int(c) for c in coeffs]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs) if coeffs else (0,)


def _poly(coeffs: Sequence[int]) -> Poly:
    return Poly(list(reversed(coeffs)), lam, domain="ZZ")


def _coeffs(p: Poly) -> Tuple[int, ...]:
    return _trim(reversed([int(c) for c in p.all_coeffs()]))


@dataclass(frozen=True)
class RationalSeries:
    """
    numerator(lambda) / (1 - lambda)^exponent with integer coefficients,
    kept in normal form (no common factor 1 - lambda).
    """
    numerator: Tuple[int, ...]
    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("denominator exponent must be nonnegative")
        p = _poly(_trim(self.numerator))
        e = self.exponent
        one_minus = Poly(1 - lam, lam, domain="ZZ")
        if p.is_zero:
            e = 0
        while e > 0 and p.eval(1) == 0:
            p = p.exquo(one_minus)
            e -= 1
        object.__setattr__(self, "numerator", _coeffs(p))
        object.__setattr__(self, "exponent", e)

    @property
    def poly(self) -> Poly:
        return _poly(self.numerator)

    def _lift(self, exponent: int) -> Poly:
        return self.poly * Poly(1 - lam, lam, domain="ZZ") ** (exponent - self.exponent)

    def __add__(self, other: "RationalSeries") -> "RationalSeries":
        e = max(self.exponent, other.exponent)
        return RationalSeries(_coeffs(self._lift(e) + other._lift(e)), e)

    def __sub__(self, other: "RationalSeries") -> "RationalSeries":
        e = max(self.exponent, other.exponent)
        return RationalSeries(_coeffs(self._lift(e) - other._lift(e)), e)

    def numerator_at_one(self) -> int:
        return sum(self.numerator)

    def coefficient(self, n: int) -> int:
        """Coefficient of lambda^n in the power series expansion"""
        if n < 0:
            return 0
        if self.exponent == 0:
            return self.numerator[n] if n < len(self.numerator) else 0
        e = self.exponent
        return sum(c * comb(n - i + e - 1, e - 1)
                   for i, c in enumerate(self.numerator) if i <= n)

    def expand(self, terms: int) -> List[int]:
        return [self.coefficient(n) for n in range(terms)]

    def to_dict(self) -> Dict:
        return {"numerator": list(self.numerator), "exponent": self.exponent}


def series_ops(a: RationalSeries, b: RationalSeries, op: str):
    """Exact add, sub or eq on normalised series"""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "eq":
        return a == b
    raise ValueError(f"unknown series operation: {op}")


def count_points(g: Graph, t: int, interior: bool = False,
                 cell_limit: Optional[int] = None) -> int:
    """
    Lattice points of t*STAB(g) (degree-t slice of U^(0)) or of its relative
    interior (degree-t slice of U^(1))

    Args:
        g: Any graph
        t: Dilation, >= 0
        interior: Count the relative interior instead
        cell_limit: Resource guard override

    Returns:
        Exact point count
    """
    if t < 0:
        raise ValueError("dilation must be nonnegative")
    sys = InequalitySystem.for_graph(g, 1 if interior else 0)
    return count_level(sys, t, cell_limit=cell_limit)


def count_points_cycle_dp(n: int, t: int, interior: bool = False) -> int:
    """
    Lattice-point count on the cycle C_n by dynamic programming around the cycle

    Vertex values are >= lo and adjacent sums <= t - lo; for odd n the total
    is also <= ell*t - lo. Here lo is 1 for the interior and 0 otherwise.
    Even n is the trace of a transfer-matrix power; odd n fixes the first
    value and walks over (current value, running sum) states.

    Args:
        n: Cycle length, >= 4
        t: Dilation, >= 0
        interior: Count U^(1) instead of U^(0)

    Returns:
        L(t) or L°(t) of STAB(C_n)
    """
    if n < 4:
        raise ValueError(f"cycle DP needs n >= 4, got {n}")
    if t < 0:
        raise ValueError("dilation must be nonnegative")
    lo = 1 if interior else 0
    edge_bound = t - lo
    top = edge_bound - lo
    if top < lo:
        return 0
    values = np.arange(lo, top + 1)
    m = len(values)
    fits = np.add.outer(values, values) <= edge_bound

    if n % 2 == 0:
        transfer = fits.astype(np.int64).astype(object)
        return int(np.trace(np.linalg.matrix_power(transfer, n)))

    ell = (n - 1) // 2
    total_bound = ell * t - lo
    if total_bound < n * lo:
        return 0
    # how many predecessor values b fit next to value index a
    reach = fits.sum(axis=1)
    count = 0
    for a in range(m):
        first = int(values[a])
        if first > total_bound:
            break
        state = np.zeros((m, total_bound + 1), dtype=object)
        state[a, first] = 1
        for _ in range(n - 1):
            nxt = np.zeros_like(state)
            for b in range(m):
                vb = int(values[b])
                if vb > total_bound:
                    continue
                prefix = state[:reach[b]].sum(axis=0)
                nxt[b, vb:] = prefix[:total_bound + 1 - vb]
            state = nxt
        count += int(state[:reach[a]].sum())
    return count


def count_points_fast(g: Graph, t: int, interior: bool = False,
                      cell_limit: Optional[int] = None) -> int:
    """Cycle DP for cycles of length >= 4, generic counter otherwise"""
    if g.n >= 4 and is_cycle_graph(g):
        return count_points_cycle_dp(g.n, t, interior)
    return count_points(g, t, interior, cell_limit)


def _count_task(args) -> int:
    g, t, interior, cell_limit = args
    return count_points_fast(g, t, interior, cell_limit)


def ehrhart_counts(g: Graph, max_dilation: int, cell_limit: Optional[int] = None,
                   pool=None) -> EhrhartCounts:
    """L(t) and L°(t) for t = 0..max_dilation"""
    tasks = [(g, t, interior, cell_limit)
             for interior in (False, True) for t in range(max_dilation + 1)]
    if pool is not None:
        results = pool.map(_count_task, tasks)
    else:
        results = [_count_task(task) for task in tasks]
    k = max_dilation + 1
    counts = EhrhartCounts(g, tuple(results[:k]), tuple(results[k:]))
    logger.info(f"📊 Counted dilations 0..{max_dilation} on {g.n} vertices")
    return counts


def _require_full_dimension(g: Graph, d: Optional[int]) -> int:
    if d is None:
        return g.n
    if d != g.n:
        raise ValueError(f"stable set polytopes are full-dimensional: expected d = {g.n}, got {d}")
    return d


def hstar_from_counts(closed: Sequence[int], d: int) -> HVector:
    """h_j = sum_{i<=j} (-1)^(j-i) C(d+1, j-i) L(i), j = 0..d"""
    if len(closed) < d + 1:
        raise ValueError(f"need L(0..{d}), got {len(closed)} values")
    h = []
    for j in range(d + 1):
        h.append(sum((-1) ** (j - i) * comb(d + 1, j - i) * closed[i] for i in range(j + 1)))
    negative = [j for j, c in enumerate(h) if c < 0]
    if negative:
        raise VerificationError(f"negative h*-coefficient at index {negative[0]}",
                                {"hstar": h, "index": negative[0]})
    return HVector(_trim(h), d)


def hstar(g: Graph, d: Optional[int] = None, counts: Optional[EhrhartCounts] = None,
          cell_limit: Optional[int] = None, pool=None) -> HVector:
    """
    h*-vector of STAB(g)

    Args:
        g: Graph
        d: Polytope dimension; must equal |V| when given
        counts: Precomputed counts covering t = 0..d

    Returns:
        HVector of length s + 1
    """
    d = _require_full_dimension(g, d)
    if counts is None or counts.max_dilation < d:
        counts = ehrhart_counts(g, d, cell_limit=cell_limit, pool=pool)
    return hstar_from_counts(counts.closed, d)


def a_invariant(g: Graph, counts: Optional[EhrhartCounts] = None,
                cell_limit: Optional[int] = None) -> int:
    """
    -min{t >= 1 : L°(t) > 0}

    Returns:
        a-invariant of the Ehrhart ring (-3 for every cycle C_n, n >= 4)
    """
    d = g.n
    for t in range(1, d + 2):
        if counts is not None and t <= counts.max_dilation:
            interior = counts.interior[t]
        else:
            interior = count_points_fast(g, t, True, cell_limit)
        if interior > 0:
            return -t
    raise VerificationError(f"no interior lattice point up to dilation {d + 1}")


def ehrhart_polynomial(closed: Sequence[int], d: int) -> Poly:
    """Interpolate L(t) through t = 0..d with exact rationals"""
    points = [(t, closed[t]) for t in range(d + 1)]
    poly = Poly(interpolate(points, t_sym), t_sym, domain="QQ")
    for t, value in points:
        at = poly.eval(t)
        if at != value or not at.is_integer:
            raise VerificationError(f"interpolated Ehrhart polynomial misses L({t})",
                                    {"t": t, "expected": int(value), "got": str(at)})
    return poly


def normalized_volume(poly: Poly, d: int) -> int:
    """d! times the leading coefficient of the Ehrhart polynomial"""
    lead = poly.coeff_monomial(t_sym ** d)
    volume = lead * factorial(d)
    if not volume.is_integer:
        raise VerificationError("normalized volume is not an integer", {"volume": str(volume)})
    return int(volume)


def ehrhart_series(h: HVector) -> RationalSeries:
    return RationalSeries(h.coefficients, h.dimension + 1)


@dataclass(frozen=True)
class ReciprocityReport:
    passed: bool
    max_dilation: int
    first_failure: Optional[int] = None

    def to_dict(self) -> Dict:
        return {"reciprocity": "pass" if self.passed else "fail",
                "max_dilation": self.max_dilation, "first_failure": self.first_failure}


def reciprocity_check(g: Graph, max_dilation: int, counts: Optional[EhrhartCounts] = None,
                      cell_limit: Optional[int] = None, pool=None) -> ReciprocityReport:
    """
    Check L°(t) = (-1)^d L(-t) for t = 1..T, with L interpolated from t = 0..d

    Args:
        g: Graph whose stable set polytope has dimension d = |V|
        max_dilation: Largest t checked, at least d + 1
        counts: Precomputed counts to reuse

    Returns:
        ReciprocityReport with the first failing dilation, if any
    """
    d = g.n
    if max_dilation < d + 1:
        raise ValueError(f"max dilation must be at least d + 1 = {d + 1}")
    if counts is None or counts.max_dilation < max_dilation:
        counts = ehrhart_counts(g, max_dilation, cell_limit=cell_limit, pool=pool)
    poly = ehrhart_polynomial(counts.closed, d)
    for t in range(1, max_dilation + 1):
        closed_ok = poly.eval(t) == counts.closed[t]
        interior_ok = (-1) ** d * poly.eval(-t) == counts.interior[t]
        if not (closed_ok and interior_ok):
            logger.warning(f"⚠️ Reciprocity fails at t={t}")
            return ReciprocityReport(False, max_dilation, t)
    return ReciprocityReport(True, max_dilation)
