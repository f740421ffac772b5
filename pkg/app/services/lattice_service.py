"""
Lattice service: integer vectors over V and the degree coordinate, the
level-n inequality systems U^(n) and graded enumeration of their points
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from app import config
from app.errors import ResourceGuardError
from app.services.graph_service import Graph, chordless_odd_cycles, small_cliques

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class LatticeVector:
    """
    Integer function on V together with its degree (the -inf coordinate).

    Ordering is by degree, then lexicographic by vertex values.
    """
    degree: int
    values: Tuple[int, ...]

    @classmethod
    def of(cls, values: Iterable[int], degree: int) -> "LatticeVector":
        return cls(int(degree), tuple(int(x) for x in values))

    @classmethod
    def zero(cls, n: int) -> "LatticeVector":
        return cls(0, (0,) * n)

    @classmethod
    def constant(cls, n: int, value: int, degree: int) -> "LatticeVector":
        return cls(degree, (value,) * n)

    @classmethod
    def from_dict(cls, data: Dict) -> "LatticeVector":
        """
        Parse the JSON form {"deg": d, "v": [...]}

        Args:
            data: Decoded JSON object

        Returns:
            The vector; non-integer entries (floats, bools, strings) raise ValueError
        """
        if not isinstance(data, dict) or not isinstance(data.get("v"), list):
            raise ValueError('vector must be an object with a "deg" integer and a "v" list')
        entries = [data.get("deg")] + data["v"]
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in entries):
            raise ValueError(f"vector entries must be integers: {data!r}")
        return cls(data["deg"], tuple(data["v"]))

    @property
    def n(self) -> int:
        return len(self.values)

    def _check_same_graph(self, other: "LatticeVector"):
        if self.n != other.n:
            raise ValueError(f"vectors live on graphs of different size ({self.n} vs {other.n})")

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        self._check_same_graph(other)
        return LatticeVector(self.degree + other.degree,
                             tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        self._check_same_graph(other)
        return LatticeVector(self.degree - other.degree,
                             tuple(a - b for a, b in zip(self.values, other.values)))

    def scale(self, k: int) -> "LatticeVector":
        return LatticeVector(k * self.degree, tuple(k * a for a in self.values))

    def rotate(self, r: int) -> "LatticeVector":
        """Re-index so that new vertex j is old vertex j + r (mod n)"""
        n = self.n
        return LatticeVector(self.degree, tuple(self.values[(j + r) % n] for j in range(n)))

    def to_dict(self) -> Dict:
        return {"deg": self.degree, "v": list(self.values)}


def plus_on(mu: LatticeVector, B: Iterable[int]) -> int:
    """mu^+(B): sum of mu over the vertex subset B"""
    total = 0
    for b in B:
        if not (0 <= b < mu.n):
            raise ValueError(f"unknown vertex index {b}")
        total += mu.values[b]
    return total


@lru_cache(maxsize=64)
def _structure(g: Graph) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[Tuple[int, ...], ...]]:
    return small_cliques(g).maximal, chordless_odd_cycles(g).cycles


@dataclass(frozen=True)
class InequalitySystem:
    """
    The system defining U^(n):
      mu(z) >= n for every vertex z,
      mu^+(K) <= mu(-inf) - n for every maximal small clique K,
      mu^+(C) <= mu(-inf)(|C| - 1)/2 - n for every chordless odd cycle C, |C| >= 5.
    """
    graph: Graph
    level: int
    cliques: Tuple[Tuple[int, ...], ...]
    cycles: Tuple[Tuple[int, ...], ...]

    @classmethod
    def for_graph(cls, g: Graph, level: int) -> "InequalitySystem":
        cliques, cycles = _structure(g)
        return cls(g, level, cliques, cycles)

    @property
    def n(self) -> int:
        return self.graph.n

    def at_level(self, level: int) -> "InequalitySystem":
        return InequalitySystem(self.graph, level, self.cliques, self.cycles)

    def constraints(self, degree: int) -> List[Tuple[Tuple[int, ...], int]]:
        """(members, upper bound) of every sum constraint at the given degree"""
        rows = [(K, degree - self.level) for K in self.cliques]
        rows += [(C, degree * (len(C) - 1) // 2 - self.level) for C in self.cycles]
        return rows

    def contains(self, mu: LatticeVector) -> bool:
        if mu.n != self.n:
            raise ValueError(f"vector has {mu.n} coordinates, graph has {self.n} vertices")
        if any(x < self.level for x in mu.values):
            return False
        for members, bound in self.constraints(mu.degree):
            if plus_on(mu, members) > bound:
                return False
        return True

    def box(self, degree: int) -> List[Tuple[int, int]]:
        """
        Per-vertex value range: mu(v) in [n, d - n|K|] for the tightest
        maximal clique K containing v.
        """
        upper = [None] * self.n
        for K in self.cliques:
            bound = degree - self.level * len(K)
            for v in K:
                upper[v] = bound if upper[v] is None else min(upper[v], bound)
        return [(self.level, degree - self.level if u is None else u) for u in upper]


def in_level(mu: LatticeVector, sys: InequalitySystem) -> bool:
    return sys.contains(mu)


def box_cells(box: Sequence[Tuple[int, int]]) -> int:
    cells = 1
    for lo, hi in box:
        if hi < lo:
            return 0
        cells *= hi - lo + 1
    return cells


class _Search:
    """Depth-first enumeration in vertex order with running constraint sums"""

    def __init__(self, sys: InequalitySystem, degree: int, box: Sequence[Tuple[int, int]]):
        self.n = sys.n
        self.level = sys.level
        self.box = list(box)
        rows = sys.constraints(degree)
        self.bounds = [bound for _, bound in rows]
        # per vertex: (row index, members still unassigned after this vertex)
        self.touching: List[List[Tuple[int, int]]] = [[] for _ in range(self.n)]
        for r, (members, _) in enumerate(rows):
            for v in members:
                later = sum(1 for w in members if w > v)
                self.touching[v].append((r, later))
        self.sums = [0] * len(rows)
        self.values = [0] * self.n

    def _range(self, v: int) -> Tuple[int, int]:
        lo, hi = self.box[v]
        for r, later in self.touching[v]:
            hi = min(hi, self.bounds[r] - self.sums[r] - self.level * later)
        return lo, hi

    def walk(self, v: int = 0) -> Iterator[Tuple[int, ...]]:
        if v == self.n:
            yield tuple(self.values)
            return
        lo, hi = self._range(v)
        rows = self.touching[v]
        for x in range(lo, hi + 1):
            self.values[v] = x
            for r, _ in rows:
                self.sums[r] += x
            yield from self.walk(v + 1)
            for r, _ in rows:
                self.sums[r] -= x

    def count(self, v: int = 0) -> int:
        if v == self.n:
            return 1
        lo, hi = self._range(v)
        rows = self.touching[v]
        total = 0
        for x in range(lo, hi + 1):
            for r, _ in rows:
                self.sums[r] += x
            total += self.count(v + 1)
            for r, _ in rows:
                self.sums[r] -= x
        return total


def _guarded_box(sys: InequalitySystem, degree: int,
                 upper: Optional[Sequence[int]], cell_limit: Optional[int]) -> List[Tuple[int, int]]:
    box = sys.box(degree)
    if upper is not None:
        box = [(lo, min(hi, cap)) for (lo, hi), cap in zip(box, upper)]
    limit = config.CELL_LIMIT if cell_limit is None else cell_limit
    cells = box_cells(box)
    if cells > limit:
        raise ResourceGuardError(cells, limit, f"level {sys.level} degree {degree} enumeration")
    return box


def _partition(sys: InequalitySystem, degree: int, box, first_value: int) -> List[Tuple[int, ...]]:
    pinned = [(first_value, first_value)] + list(box[1:])
    return list(_Search(sys, degree, pinned).walk())


def _partition_task(args) -> List[Tuple[int, ...]]:
    return _partition(*args)


def enumerate_level(sys: InequalitySystem, degree: int,
                    upper: Optional[Sequence[int]] = None,
                    cell_limit: Optional[int] = None,
                    pool=None) -> List[LatticeVector]:
    """
    All mu in U^(n) with mu(-inf) = degree, sorted lexicographically

    With a pool the search is split by the value of vertex 0.

    Args:
        sys: Inequality system at level n
        degree: Value of the -inf coordinate
        upper: Optional per-vertex caps applied on top of the box
        cell_limit: Resource guard override (default CE_CELL_LIMIT)
        pool: Optional WorkerPool

    Returns:
        Sorted, duplicate-free list of LatticeVector

    Raises:
        ResourceGuardError: if the candidate box exceeds the cell limit
    """
    if sys.n == 0:
        return [LatticeVector(degree, ())] if all(b >= 0 for _, b in sys.constraints(degree)) else []
    box = _guarded_box(sys, degree, upper, cell_limit)
    if box_cells(box) == 0:
        return []
    if pool is not None and pool.jobs > 1:
        lo, hi = box[0]
        tasks = [(sys, degree, box, x) for x in range(lo, hi + 1)]
        rows = [row for part in pool.map(_partition_task, tasks) for row in part]
    else:
        rows = list(_Search(sys, degree, box).walk())
    rows.sort()
    logger.debug(f"📊 level {sys.level}, degree {degree}: {len(rows)} points")
    return [LatticeVector(degree, row) for row in rows]


def count_level(sys: InequalitySystem, degree: int, cell_limit: Optional[int] = None) -> int:
    """Number of points of U^(n) at the given degree, without materialising them"""
    if sys.n == 0:
        return len(enumerate_level(sys, degree))
    box = _guarded_box(sys, degree, None, cell_limit)
    if box_cells(box) == 0:
        return 0
    return _Search(sys, degree, box).count()


def box_scan_level(sys: InequalitySystem, degree: int,
                   cell_limit: Optional[int] = None) -> List[LatticeVector]:
    """
    Naive oracle: scan the box [n, d - n] (or [n, d - 3n] for negative n)
    with numpy and keep the rows passing every inequality.
    """
    lo = sys.level
    hi = degree - sys.level if sys.level >= 0 else degree - 3 * sys.level
    n = sys.n
    if hi < lo:
        return []
    width = hi - lo + 1
    limit = config.CELL_LIMIT if cell_limit is None else cell_limit
    if width ** n > limit:
        raise ResourceGuardError(width ** n, limit, "box scan")

    found = []
    rest = n - 1
    grid = (np.indices((width,) * rest).reshape(rest, -1).T + lo) if rest else np.zeros((1, 0), dtype=np.int64)
    for first in range(lo, hi + 1):
        cand = np.hstack([np.full((grid.shape[0], 1), first, dtype=np.int64), grid.astype(np.int64)])
        keep = np.ones(cand.shape[0], dtype=bool)
        for members, bound in sys.constraints(degree):
            keep &= cand[:, list(members)].sum(axis=1) <= bound
        found.extend(tuple(int(x) for x in row) for row in cand[keep])
    found.sort()
    return [LatticeVector(degree, row) for row in found]


@dataclass(frozen=True)
class GradedMonomialSet:
    """Degree slices 0..D of U^(n), each sorted and duplicate-free"""
    level: int
    slices: Dict[int, Tuple[LatticeVector, ...]]

    @property
    def max_degree(self) -> int:
        return max(self.slices, default=-1)

    def __getitem__(self, degree: int) -> Tuple[LatticeVector, ...]:
        return self.slices.get(degree, ())

    def counts(self) -> List[int]:
        return [len(self.slices.get(d, ())) for d in range(self.max_degree + 1)]

    def all(self) -> Iterator[LatticeVector]:
        for d in sorted(self.slices):
            yield from self.slices[d]


def graded_set(sys: InequalitySystem, max_degree: int, min_degree: int = 0,
               cell_limit: Optional[int] = None, pool=None) -> GradedMonomialSet:
    slices = {
        d: tuple(enumerate_level(sys, d, cell_limit=cell_limit, pool=pool))
        for d in range(min_degree, max_degree + 1)
    }
    return GradedMonomialSet(sys.level, slices)


def minkowski_check(a: LatticeVector, m: int, b: LatticeVector, n: int, g: Graph) -> bool:
    """Superadditivity probe: a in U^(m), b in U^(n) should give a + b in U^(m+n)"""
    return InequalitySystem.for_graph(g, m + n).contains(a + b)
