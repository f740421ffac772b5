"""
Canonical service: the canonical ideal (level-1 points), its symbolic powers
as graded monomial sets, minimal monomial generators and the eta_k family
of odd cycles
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from app.errors import VerificationError
from app.services.graph_service import Graph, make_cycle
from app.services.lattice_service import (
    GradedMonomialSet,
    InequalitySystem,
    LatticeVector,
    enumerate_level,
    graded_set,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CanonicalSlice:
    """Level n in {-1, 0, 1} graded up to degree D"""
    level: int
    graded: GradedMonomialSet

    def __getitem__(self, degree: int) -> Tuple[LatticeVector, ...]:
        return self.graded[degree]


@dataclass(frozen=True)
class EtaFamily:
    """eta_1..eta_{ell-1} on C_{2ell+1}: value k on every vertex, degree 2k+1"""
    ell: int
    etas: Tuple[LatticeVector, ...]

    def __getitem__(self, k: int) -> LatticeVector:
        if not 1 <= k <= self.ell - 1:
            raise IndexError(f"eta_k is defined for 1 <= k <= {self.ell - 1}")
        return self.etas[k - 1]


def odd_cycle(ell: int) -> Graph:
    return make_cycle(2 * ell + 1)


def cycle_ell(g: Graph) -> int:
    if g.n % 2 == 0:
        raise ValueError(f"expected an odd cycle, got {g.n} vertices")
    return (g.n - 1) // 2


def canonical_slice(g: Graph, level: int, max_degree: int,
                    cell_limit: Optional[int] = None, pool=None) -> CanonicalSlice:
    if level not in (-1, 0, 1):
        raise ValueError(f"canonical slices are built for levels -1, 0, 1; got {level}")
    sys = InequalitySystem.for_graph(g, level)
    return CanonicalSlice(level, graded_set(sys, max_degree, cell_limit=cell_limit, pool=pool))


def eta(ell: int, k: int) -> LatticeVector:
    return LatticeVector.constant(2 * ell + 1, k, 2 * k + 1)


def eta_family(ell: int) -> EtaFamily:
    if ell < 2:
        raise ValueError("eta family needs ell >= 2")
    family = EtaFamily(ell, tuple(eta(ell, k) for k in range(1, ell)))
    omega = InequalitySystem.for_graph(odd_cycle(ell), 1)
    for k, e in enumerate(family.etas, start=1):
        if not omega.contains(e) or margin(e, ell) != ell - k:
            raise VerificationError(f"eta_{k} is not a level-1 point of margin {ell - k}", e.to_dict())
    return family


def margin(eta_vec: LatticeVector, ell: int) -> int:
    """Odd-cycle slack ell*eta(-inf) - eta^+(V)"""
    return ell * eta_vec.degree - sum(eta_vec.values)


def is_divisible(eta_a: LatticeVector, eta_b: LatticeVector, g: Graph) -> bool:
    """T^eta_b divides T^eta_a in the semigroup ring: eta_a - eta_b lies in U^(0)"""
    return InequalitySystem.for_graph(g, 0).contains(eta_a - eta_b)


def minimal_generators(g: Graph, max_degree: int, cell_limit: Optional[int] = None,
                       pool=None) -> List[LatticeVector]:
    """
    Minimal monomial generators of the canonical ideal up to max_degree.

    Degrees are sieved in ascending order; a monomial is a new generator
    when no generator of lower degree divides it.
    """
    sys = InequalitySystem.for_graph(g, 1)
    generators: List[LatticeVector] = []
    for d in range(max_degree + 1):
        lower = list(generators)
        fresh = [
            mu for mu in enumerate_level(sys, d, cell_limit=cell_limit, pool=pool)
            if not any(is_divisible(mu, gen, g) for gen in lower)
        ]
        if fresh:
            logger.debug(f"🧩 degree {d}: {len(fresh)} new generators")
        generators.extend(fresh)
    return generators


def omega_generators(ell: int, max_degree: Optional[int] = None,
                     cell_limit: Optional[int] = None, pool=None) -> List[LatticeVector]:
    """
    Minimal generators of omega_R for C_{2ell+1}

    Args:
        ell: Cycle parameter (>= 3)
        max_degree: Sieve bound, at least 2ell-1 (default 2ell+1)

    Returns:
        eta_1..eta_{ell-1}; any other outcome raises VerificationError
    """
    if ell < 3:
        raise ValueError("omega generators are computed for ell >= 3")
    if max_degree is None:
        max_degree = 2 * ell + 1
    if max_degree < 2 * ell - 1:
        raise ValueError(f"search degree must be at least 2*ell - 1 = {2 * ell - 1}")

    g = odd_cycle(ell)
    logger.info(f"🔄 Sieving omega generators of C{g.n} up to degree {max_degree}")
    generators = minimal_generators(g, max_degree, cell_limit, pool)
    late = [gen for gen in generators if gen.degree > 2 * ell - 1]
    if late:
        raise VerificationError(f"generator above degree {2 * ell - 1}", late[0].to_dict())
    expected = list(eta_family(ell).etas)
    if generators != expected:
        raise VerificationError("omega generators differ from eta_1..eta_{ell-1}",
                                {"found": [gen.to_dict() for gen in generators]})
    logger.info(f"✅ omega of C{g.n} has {len(generators)} minimal generators")
    return generators


def generators_report(generators: List[LatticeVector], ell: int) -> List[Dict]:
    return [dict(gen.to_dict(), margin=margin(gen, ell)) for gen in generators]


def is_antichain(vectors: List[LatticeVector], g: Graph) -> bool:
    return not any(
        is_divisible(a, b, g) for a in vectors for b in vectors if a != b
    )
