"""
Graph service: simple graphs and the structural queries behind the
inequality systems (small cliques, chordless odd cycles, stable sets)
"""
import json
import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import networkx as nx

from app.errors import UsageError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
VertexSet = Tuple[int, ...]


@dataclass(frozen=True)
class Graph:
    """
    Finite simple graph.

    Vertices are addressed by their index in ``vertices``; edges are stored
    as sorted index pairs.
    """
    vertices: Tuple[str, ...]
    edges: FrozenSet[Edge]

    def __post_init__(self):
        n = len(self.vertices)
        if len(set(self.vertices)) != n:
            raise ValueError("vertex identifiers must be unique")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u > v:
                raise ValueError(f"edge ({u}, {v}) is not normalised")

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def nx_graph(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(range(self.n))
        G.add_edges_from(self.edges)
        return G

    @cached_property
    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    def neighbors(self, v: int) -> List[int]:
        return sorted(self.nx_graph.neighbors(v))

    def degree(self, v: int) -> int:
        return self.nx_graph.degree(v)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def to_dict(self) -> Dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.sorted_edges]}


@dataclass(frozen=True)
class SmallCliqueFamily:
    """Cliques of size 1-3 with the inclusion-maximal members"""
    cliques: Tuple[VertexSet, ...]
    maximal: Tuple[VertexSet, ...]


@dataclass(frozen=True)
class OddCycleList:
    """Chordless odd cycles of length >= 5, one canonical rotation each"""
    cycles: Tuple[VertexSet, ...]

    def __len__(self) -> int:
        return len(self.cycles)

    def __iter__(self):
        return iter(self.cycles)


@dataclass(frozen=True)
class GorensteinVerdict:
    gorenstein: bool
    criterion: Optional[str]


def make_graph(vertices: Sequence[str], edges) -> Graph:
    """Build a graph from vertex names and index pairs in any orientation"""
    normalised = set()
    for u, v in edges:
        e = (min(u, v), max(u, v))
        if e in normalised:
            raise ValueError(f"duplicate edge {list(e)}")
        normalised.add(e)
    return Graph(tuple(vertices), frozenset(normalised))


def make_cycle(n: int) -> Graph:
    """Cycle C_n with vertices v0..v{n-1} and edges e_j = {v_j, v_{j+1 mod n}}"""
    if n < 3:
        raise ValueError(f"a cycle needs at least 3 vertices, got {n}")
    return make_graph([f"v{j}" for j in range(n)], [(j, (j + 1) % n) for j in range(n)])


def graph_from_dict(data: Dict) -> Graph:
    """Build a graph from the JSON ingestion format"""
    if not isinstance(data, dict) or set(data) != {"vertices", "edges"}:
        raise UsageError('graph JSON must be an object with exactly "vertices" and "edges"')
    vertices = data["vertices"]
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise UsageError('"vertices" must be a list of strings')
    if len(set(vertices)) != len(vertices):
        raise UsageError("duplicate vertex identifiers")
    if not isinstance(data["edges"], list):
        raise UsageError('"edges" must be a list of index pairs')
    n = len(vertices)
    seen = set()
    for raw in data["edges"]:
        if (not isinstance(raw, list) or len(raw) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in raw)):
            raise UsageError(f"edge {raw!r} must be a pair of vertex indices")
        u, v = raw
        if u == v:
            raise UsageError(f"loop at vertex index {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise UsageError(f"edge {raw} has an index outside 0..{n - 1}")
        e = (min(u, v), max(u, v))
        if e in seen:
            raise UsageError(f"duplicate edge {list(e)}")
        seen.add(e)
    return Graph(tuple(vertices), frozenset(seen))


def load_graph(path: Union[str, Path]) -> Graph:
    """Read a graph file"""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"graph file not found: {path}")
    except json.JSONDecodeError as e:
        raise UsageError(f"graph file {path} is not valid JSON: {e}")
    graph = graph_from_dict(data)
    logger.info(f"📂 Loaded graph {path.name}: {graph.n} vertices, {len(graph.edges)} edges")
    return graph


def small_cliques(g: Graph) -> SmallCliqueFamily:
    """All cliques of size 1-3, maximal members flagged"""
    cliques = []
    for clique in nx.enumerate_all_cliques(g.nx_graph):
        if len(clique) > 3:
            break
        cliques.append(tuple(sorted(clique)))
    cliques.sort(key=lambda c: (len(c), c))
    as_sets = [frozenset(c) for c in cliques]
    maximal = tuple(
        c for c, s in zip(cliques, as_sets)
        if not any(s < other for other in as_sets if len(other) > len(s))
    )
    return SmallCliqueFamily(tuple(cliques), maximal)


def _canonical_rotation(cycle: Sequence[int]) -> VertexSet:
    k = len(cycle)
    start = min(range(k), key=lambda i: cycle[i])
    forward = tuple(cycle[(start + i) % k] for i in range(k))
    backward = tuple(cycle[(start - i) % k] for i in range(k))
    return min(forward, backward)


def _is_chordless(g: Graph, cycle: Sequence[int]) -> bool:
    k = len(cycle)
    for i, j in combinations(range(k), 2):
        consecutive = j - i == 1 or (i == 0 and j == k - 1)
        if g.has_edge(cycle[i], cycle[j]) != consecutive:
            return False
    return True


def chordless_odd_cycles(g: Graph, max_len: Optional[int] = None) -> OddCycleList:
    """
    Chordless odd cycles of length 5..max_len (default |V|), each once up to
    rotation and reflection.
    """
    if max_len is None:
        max_len = g.n
    if max_len < 5:
        return OddCycleList(())

    found = set()
    for cycle in nx.chordless_cycles(g.nx_graph, length_bound=max_len):
        if len(cycle) >= 5 and len(cycle) % 2 == 1:
            canonical = _canonical_rotation(cycle)
            if not _is_chordless(g, canonical):
                raise RuntimeError(f"cycle search returned a cycle with a chord: {canonical}")
            found.add(canonical)
    cycles = tuple(sorted(found, key=lambda c: (len(c), c)))
    logger.debug(f"🔁 {len(cycles)} chordless odd cycles of length <= {max_len}")
    return OddCycleList(cycles)


def stable_sets(g: Graph) -> List[VertexSet]:
    """All stable sets including the empty set, via cliques of the complement"""
    if g.n > 20:
        logger.warning(f"⚠️ Enumerating stable sets of a {g.n}-vertex graph")
    result = [()]
    for clique in nx.enumerate_all_cliques(nx.complement(g.nx_graph)):
        result.append(tuple(sorted(clique)))
    result.sort(key=lambda s: (len(s), s))
    return result


def stable_sets_bruteforce(g: Graph) -> List[VertexSet]:
    """Independent oracle: filter all 2^n vertex subsets"""
    result = []
    for mask in range(1 << g.n):
        members = tuple(v for v in range(g.n) if mask >> v & 1)
        if all(not (mask >> u & 1 and mask >> v & 1) for u, v in g.edges):
            result.append(members)
    result.sort(key=lambda s: (len(s), s))
    return result


def is_cycle_graph(g: Graph) -> bool:
    """True when g is a single cycle (in any vertex labelling)"""
    if g.n < 3 or len(g.edges) != g.n:
        return False
    return all(g.degree(v) == 2 for v in range(g.n)) and nx.is_connected(g.nx_graph)


def is_gorenstein_tperfect(g: Graph) -> GorensteinVerdict:
    """
    Gorenstein criterion for the Ehrhart ring of STAB(g), g t-perfect.

    t-perfection is the caller's responsibility; on other inputs the verdict
    has no meaning.
    (i)   E is empty
    (ii)  no isolated vertex, no triangle, no chordless odd cycle of length >= 7
    (iii) every maximal clique has size >= 3, no chordless odd cycle of length >= 5
    """
    if not g.edges:
        return GorensteinVerdict(True, "(i)")

    cycles = chordless_odd_cycles(g)
    longest = max((len(c) for c in cycles), default=0)
    G = g.nx_graph
    has_isolated = any(g.degree(v) == 0 for v in range(g.n))
    has_triangle = any(nx.triangles(G).values())
    if not has_isolated and not has_triangle and longest < 7:
        return GorensteinVerdict(True, "(ii)")

    maximal = list(nx.find_cliques(G))
    if all(len(c) >= 3 for c in maximal) and longest < 5:
        return GorensteinVerdict(True, "(iii)")
    return GorensteinVerdict(False, None)


def is_gorenstein_perfect(g: Graph) -> bool:
    """Perfect graphs (caller asserted): Gorenstein iff all maximal cliques have equal size"""
    sizes = {len(c) for c in nx.find_cliques(g.nx_graph)}
    return len(sizes) <= 1
