"""
Trace service: the trace of the canonical ideal, the face primes p_i of odd
cycles, radical-membership certificates and the bounded-degree check that the
radical of the trace is the intersection of the p_i
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sympy import Matrix

from app import config
from app.errors import VerificationError
from app.services.canonical_service import cycle_ell, odd_cycle
from app.services.graph_service import Graph
from app.services.lattice_service import InequalitySystem, LatticeVector, enumerate_level

logger = logging.getLogger(__name__)

Witness = Tuple[LatticeVector, LatticeVector]


@dataclass(frozen=True)
class TraceSlice:
    """
    Trace monomials eta + zeta of degree 0..D, each with the first (eta, zeta)
    pair found scanning deg eta, then deg zeta, in ascending order.
    """
    graph: Graph
    max_degree: int
    witnesses: Dict[LatticeVector, Witness]

    def __contains__(self, mu: LatticeVector) -> bool:
        return mu in self.witnesses

    def __len__(self) -> int:
        return len(self.witnesses)

    def at_degree(self, degree: int) -> List[LatticeVector]:
        return sorted(mu for mu in self.witnesses if mu.degree == degree)

    def counts(self) -> List[int]:
        return [len(self.at_degree(d)) for d in range(self.max_degree + 1)]


@dataclass(frozen=True)
class FacePrime:
    """p_i: monomials with mu(v_i) > 0 or mu^+(V) < ell*mu(-inf)"""
    index: int
    ell: int

    def __post_init__(self):
        if not 0 <= self.index <= 2 * self.ell:
            raise ValueError(f"face index must lie in 0..{2 * self.ell}")

    def __contains__(self, mu: LatticeVector) -> bool:
        return mu.values[self.index] > 0 or sum(mu.values) < self.ell * mu.degree


@dataclass(frozen=True)
class RadicalCertificate:
    mu: LatticeVector
    exponent: int
    eta: LatticeVector
    zeta: LatticeVector
    case: str

    def to_dict(self) -> Dict:
        return {
            "mu": self.mu.to_dict(),
            "exponent": self.exponent,
            "eta": self.eta.to_dict(),
            "zeta": self.zeta.to_dict(),
            "case": self.case,
        }


@dataclass
class LocusReport:
    ell: int
    degree_bound: int
    trace_monomials: int = 0
    intersection_monomials: int = 0
    radicality: List[Dict] = field(default_factory=list)
    locus_dimension: Optional[int] = None
    passed: bool = True

    def to_dict(self) -> Dict:
        return {
            "check": "non_gorenstein_locus",
            "ell": self.ell,
            "degree_bound": self.degree_bound,
            "checked": {
                "trace_monomials": self.trace_monomials,
                "intersection_monomials": self.intersection_monomials,
            },
            "radicality": self.radicality,
            "locus_dimension": self.locus_dimension,
            "status": "pass" if self.passed else "fail",
        }


def in_face_prime(mu: LatticeVector, i: int, ell: int) -> bool:
    return mu in FacePrime(i, ell)


def in_all_face_primes(mu: LatticeVector, ell: int) -> bool:
    return all(in_face_prime(mu, i, ell) for i in range(2 * ell + 1))


def _zeta_floor(sys: InequalitySystem) -> int:
    """Lowest possible degree of a U^(-1) point: zeta^+(K) >= -|K| for every clique K"""
    if not sys.cliques:
        return -1
    return -1 - min(len(K) for K in sys.cliques)


def in_trace(mu: LatticeVector, g: Graph, cell_limit: Optional[int] = None) -> Tuple[bool, Optional[Witness]]:
    """
    Decide whether T^mu lies in the trace of the canonical ideal

    Searches eta in U^(1) with 1 <= eta(v) <= mu(v) + 1 such that mu - eta
    lies in U^(-1). deg eta runs up to deg mu + 1 + the smallest clique size,
    since deg zeta can go that far below zero.

    Args:
        mu: Candidate monomial, mu(-inf) >= 0
        g: Graph
        cell_limit: Resource guard override for the eta slices

    Returns:
        (True, (eta, zeta)) for the first witness in ascending (deg eta, eta)
        order, else (False, None)
    """
    if mu.degree < 0:
        raise ValueError("trace membership is tested for mu(-inf) >= 0")
    omega = InequalitySystem.for_graph(g, 1)
    dual = omega.at_level(-1)
    upper = [x + 1 for x in mu.values]
    for e in range(0, mu.degree - _zeta_floor(dual) + 1):
        for eta in enumerate_level(omega, e, upper=upper, cell_limit=cell_limit):
            zeta = mu - eta
            if dual.contains(zeta):
                return True, (eta, zeta)
    return False, None


def trace_slice(g: Graph, max_degree: int, cell_limit: Optional[int] = None, pool=None) -> TraceSlice:
    """All eta + zeta with eta in U^(1), zeta in U^(-1) and 0 <= degree <= D"""
    omega = InequalitySystem.for_graph(g, 1)
    dual = omega.at_level(-1)
    ring = omega.at_level(0)
    floor = _zeta_floor(dual)

    zetas = {}
    for b in range(floor, max_degree + 1):
        part = enumerate_level(dual, b, cell_limit=cell_limit, pool=pool)
        if part:
            zetas[b] = part
    if not zetas:
        return TraceSlice(g, max_degree, {})
    lowest = min(zetas)

    witnesses: Dict[LatticeVector, Witness] = {}
    for e in range(0, max_degree - lowest + 1):
        etas = enumerate_level(omega, e, cell_limit=cell_limit, pool=pool)
        if not etas:
            continue
        for b in range(max(lowest, -e), max_degree - e + 1):
            for eta in etas:
                for zeta in zetas.get(b, ()):
                    mu = eta + zeta
                    if mu not in witnesses:
                        witnesses[mu] = (eta, zeta)

    strays = [mu for mu in witnesses if not ring.contains(mu)]
    if strays:
        raise VerificationError("trace monomial outside the ring", min(strays).to_dict())
    logger.info(f"📊 Trace of C{g.n}: {len(witnesses)} monomials up to degree {max_degree}")
    return TraceSlice(g, max_degree, witnesses)


def _verified(mu: LatticeVector, p: int, eta: LatticeVector, zeta: LatticeVector,
              case: str, g: Graph) -> Optional[RadicalCertificate]:
    omega = InequalitySystem.for_graph(g, 1)
    if eta + zeta != mu.scale(p):
        return None
    if not (omega.contains(eta) and omega.at_level(-1).contains(zeta)):
        return None
    return RadicalCertificate(mu, p, eta, zeta, case)


def certify_radical(mu: LatticeVector, ell: int) -> RadicalCertificate:
    """
    Exhibit (T^mu)^(ell-2) = T^eta T^zeta with eta in U^(1), zeta in U^(-1)

    All-positive mu uses eta = (ell-1, ..., ell-1; 2ell-1); mu with odd-cycle
    slack uses eta = (1, ..., 1; 3). Both factors are re-checked.

    Args:
        mu: Point of U^(0) on C_{2ell+1} lying in every face prime
        ell: Cycle parameter

    Returns:
        RadicalCertificate naming the case used

    Raises:
        ValueError: mu is outside U^(0) or meets neither hypothesis
        VerificationError: a certificate fails its re-check
    """
    g = odd_cycle(ell)
    if not InequalitySystem.for_graph(g, 0).contains(mu):
        raise ValueError("certificates are issued for points of U^(0) only")
    n, p = g.n, ell - 2
    attempts = []
    if all(x > 0 for x in mu.values):
        attempts.append(("all_positive", LatticeVector.constant(n, ell - 1, 2 * ell - 1)))
    if sum(mu.values) < ell * mu.degree:
        attempts.append(("slack", LatticeVector.constant(n, 1, 3)))
    if not attempts:
        raise ValueError("mu has a zero vertex and no odd-cycle slack: it lies outside some p_i")

    for case, eta in attempts:
        cert = _verified(mu, p, eta, mu.scale(p) - eta, case, g)
        if cert is not None:
            return cert
        logger.warning(f"⚠️ {case} certificate rejected for {mu.to_dict()}")
    raise VerificationError("no valid radical certificate", mu.to_dict())


def face_points(i: int, ell: int) -> List[LatticeVector]:
    """Lattice points of the face P_i at dilation 1"""
    sys = InequalitySystem.for_graph(odd_cycle(ell), 0)
    return [mu for mu in enumerate_level(sys, 1)
            if mu.values[i] == 0 and sum(mu.values) == ell]


def affine_rank(points: List[LatticeVector]) -> int:
    if len(points) < 2:
        return 0
    base = points[0].values
    rows = [[a - b for a, b in zip(p.values, base)] for p in points[1:]]
    return Matrix(rows).rank()


def face_dimension(i: int, ell: int) -> int:
    if ell < 3:
        raise ValueError("face dimensions are computed for ell >= 3")
    if not 0 <= i <= 2 * ell:
        raise ValueError(f"face index must lie in 0..{2 * ell}")
    return affine_rank(face_points(i, ell))


def verify_locus_theorem(ell: int, max_degree: Optional[int] = None,
                         cell_limit: Optional[int] = None, pool=None) -> LocusReport:
    """
    Bounded-degree check that sqrt(trace omega) is the intersection of the p_i

    Trace monomials must lie in every p_i, and every monomial in all p_i must
    have a certified power inside the trace.

    Args:
        ell: Cycle parameter (>= 3)
        max_degree: Degree bound D (>= 3), default from LOCUS_DEGREE_BOUNDS

    Returns:
        LocusReport with counts, per-degree radicality data and locus dimension
    """
    if ell < 3:
        raise ValueError("the locus check needs ell >= 3")
    if max_degree is None:
        max_degree = config.LOCUS_DEGREE_BOUNDS.get(ell, 3)
    if max_degree < 3:
        raise ValueError("degree bound must be at least 3")

    g = odd_cycle(ell)
    report = LocusReport(ell, max_degree)
    logger.info(f"🔄 Checking the non-Gorenstein locus of C{g.n} up to degree {max_degree}")

    trace = trace_slice(g, max_degree, cell_limit=cell_limit, pool=pool)
    for mu in sorted(trace.witnesses):
        for i in range(g.n):
            if not in_face_prime(mu, i, ell):
                eta, zeta = trace.witnesses[mu]
                raise VerificationError(f"trace monomial outside p_{i}", {
                    "mu": mu.to_dict(), "eta": eta.to_dict(), "zeta": zeta.to_dict(), "prime": i})
    report.trace_monomials = len(trace)

    ring = InequalitySystem.for_graph(g, 0)
    for d in range(max_degree + 1):
        inside = [mu for mu in enumerate_level(ring, d, cell_limit=cell_limit, pool=pool)
                  if in_all_face_primes(mu, ell)]
        for mu in inside:
            cert = certify_radical(mu, ell)
            found, _ = in_trace(mu.scale(cert.exponent), g, cell_limit)
            if not found:
                raise VerificationError("certified power not found in the trace", cert.to_dict())
        report.intersection_monomials += len(inside)
        report.radicality.append({
            "degree": d,
            "intersection_monomials": len(inside),
            "outside_trace": sum(1 for mu in inside if mu not in trace),
        })

    dims = {face_dimension(i, ell) for i in range(g.n)}
    if dims != {ell}:
        raise VerificationError("face dimensions differ from ell", sorted(dims))
    report.locus_dimension = ell + 1
    logger.info(f"✅ Locus check passed: {report.trace_monomials} trace monomials, "
                f"{report.intersection_monomials} intersection monomials")
    return report
