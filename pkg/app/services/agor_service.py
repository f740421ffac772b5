"""
Almost-Gorenstein service for odd cycles C_{2ell+1}: the face subring R^(0),
its generators mu_i and the greedy decomposition into them, the strata C_k
of the canonical ideal, coker(phi) and its Hilbert series, the h*-identities
and the Ulrich verdict
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Dict, List, Optional, Tuple

from sympy import Matrix

from app import config
from app.errors import VerificationError
from app.services.canonical_service import (
    eta,
    eta_family,
    generators_report,
    is_divisible,
    margin,
    odd_cycle,
    omega_generators,
)
from app.services.ehrhart_service import (
    HVector,
    RationalSeries,
    ehrhart_counts,
    ehrhart_series,
    hstar_from_counts,
)
from app.services.lattice_service import InequalitySystem, LatticeVector, enumerate_level, plus_on

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MuFamily:
    """mu_0..mu_{2ell}: degree 1, mu_i(v_j) = 1 iff j - i is even and < 2ell (mod 2ell+1)"""
    ell: int
    mus: Tuple[LatticeVector, ...]

    def __getitem__(self, i: int) -> LatticeVector:
        return self.mus[i % len(self.mus)]

    def __len__(self) -> int:
        return len(self.mus)


@dataclass(frozen=True)
class FaceSubring:
    """Graded counts of U^(0)_0 = {mu in U^(0) : mu^+(V) = ell*mu(-inf)}"""
    ell: int
    counts: Tuple[int, ...]


@dataclass(frozen=True)
class CokerProfile:
    ell: int
    max_degree: int
    dims: Dict[int, int]
    contributions: Dict[int, Dict[int, int]]
    series: RationalSeries
    multiplicity: int
    generators: int

    def to_dict(self) -> Dict:
        return {
            "ell": self.ell,
            "dims": [self.dims[n] for n in sorted(self.dims)],
            "series": self.series.to_dict(),
            "e": self.multiplicity,
            "mu": self.generators,
        }


@dataclass(frozen=True)
class HibiTsuchiyaReport:
    ell: int
    hstar: HVector
    passed: bool
    first_failure: Optional[int] = None
    series_identity: bool = True

    def to_dict(self) -> Dict:
        return {
            "ell": self.ell,
            "hstar": self.hstar.to_list(),
            "ht_identity": "pass" if self.passed else "fail",
            "first_failure": self.first_failure,
            "series_identity": "pass" if self.series_identity else "fail",
        }


@dataclass(frozen=True)
class AlmostGorensteinVerdict:
    ell: int
    ht: HibiTsuchiyaReport
    multiplicity: int
    generators: int
    omega_generators: Tuple[LatticeVector, ...] = ()
    enumerated: bool = False

    @property
    def almost_gorenstein(self) -> bool:
        return self.multiplicity == self.generators

    def to_dict(self) -> Dict:
        return {
            "ell": self.ell,
            "hstar": self.ht.hstar.to_list(),
            "ht_identity": "pass" if self.ht.passed and self.ht.series_identity else "fail",
            "ulrich": {"e": self.multiplicity, "mu": self.generators},
            "multiplicity_convention": "numerator(1) over (1 - lambda)^(2ell+1)",
            "omega_generators": generators_report(list(self.omega_generators), self.ell),
            "omega_generators_source": "enumerated" if self.enumerated else "eta_family",
            "almost_gorenstein": self.almost_gorenstein,
        }


def _require_ell(ell: int):
    if ell < 3:
        raise ValueError(f"odd-cycle checks need ell >= 3, got {ell}")


def mu_vector(ell: int, i: int) -> LatticeVector:
    n = 2 * ell + 1
    support = {(i + 2 * s) % n for s in range(ell)}
    return LatticeVector.of((1 if j in support else 0 for j in range(n)), 1)


def mu_family(ell: int) -> MuFamily:
    family = MuFamily(ell, tuple(mu_vector(ell, i) for i in range(2 * ell + 1)))
    ring = InequalitySystem.for_graph(odd_cycle(ell), 0)
    for i, mu in enumerate(family.mus):
        if not in_face_subring(mu, ell, ring):
            raise VerificationError(f"mu_{i} is not in the face subring", mu.to_dict())
    return family


def in_face_subring(mu: LatticeVector, ell: int, ring: Optional[InequalitySystem] = None) -> bool:
    if ring is None:
        ring = InequalitySystem.for_graph(odd_cycle(ell), 0)
    return ring.contains(mu) and sum(mu.values) == ell * mu.degree


@lru_cache(maxsize=32)
def face_subring_slice(ell: int, degree: int, cell_limit: Optional[int] = None) -> Tuple[LatticeVector, ...]:
    """Degree-d part of U^(0)_0, sorted"""
    if degree < 0:
        return ()
    ring = InequalitySystem.for_graph(odd_cycle(ell), 0)
    return tuple(mu for mu in enumerate_level(ring, degree, cell_limit=cell_limit)
                 if sum(mu.values) == ell * degree)


def polynomial_ring_count(ell: int, degree: int) -> int:
    """Monomials of degree d in 2ell+1 variables"""
    return comb(degree + 2 * ell, 2 * ell) if degree >= 0 else 0


def face_subring(ell: int, max_degree: int, cell_limit: Optional[int] = None) -> FaceSubring:
    counts = []
    for d in range(max_degree + 1):
        found = len(face_subring_slice(ell, d, cell_limit))
        if found != polynomial_ring_count(ell, d):
            raise VerificationError(f"face subring degree {d} has {found} monomials",
                                    {"degree": d, "found": found, "expected": polynomial_ring_count(ell, d)})
        counts.append(found)
    if set(face_subring_slice(ell, 1, cell_limit)) != set(mu_family(ell).mus):
        raise VerificationError("degree-1 face subring differs from mu_0..mu_{2ell}")
    return FaceSubring(ell, tuple(counts))


def _reduction_step(mu: LatticeVector, ell: int) -> int:
    """Index i (original labelling) such that mu - mu_i stays in U^(0)_0"""
    n = 2 * ell + 1
    if all(x > 0 for x in mu.values):
        for i in range(n):
            if plus_on(mu, (i, (i + 1) % n)) < mu.degree:
                return (i + 2) % n
        raise VerificationError("all-positive point with every edge tight", mu.to_dict())

    r = mu.values.index(0)
    rotated = mu.rotate(r)
    evens = [rotated.values[2 * i] for i in range(1, ell + 1)]
    if not any(evens):
        return (1 + r) % n
    j = next(i for i in range(1, ell + 1) if rotated.values[2 * i] != 0)
    return (2 * j + r) % n


def decompose_r0(mu: LatticeVector, ell: int) -> List[int]:
    """
    Write mu in U^(0)_0 as mu_{i_1} + ... + mu_{i_m}, m = mu(-inf)

    Greedy reduction: an all-positive point drops the mu_i vanishing on a
    slack edge, otherwise the vertex frame is rotated to a zero coordinate first.
    Every remainder is re-checked.

    Args:
        mu: Point of the face subring
        ell: Cycle parameter

    Returns:
        Indices i_1..i_m in the original vertex labelling
    """
    ring = InequalitySystem.for_graph(odd_cycle(ell), 0)
    if not in_face_subring(mu, ell, ring):
        raise ValueError("decomposition needs a point of U^(0)_0")
    family = mu_family(ell)
    indices = []
    rest = mu
    while rest.degree > 0:
        i = _reduction_step(rest, ell)
        rest = rest - family[i]
        if not in_face_subring(rest, ell, ring):
            raise VerificationError(f"subtracting mu_{i} leaves the face subring",
                                    {"mu": mu.to_dict(), "remainder": rest.to_dict(), "index": i})
        indices.append(i)
    if any(rest.values):
        raise VerificationError("degree-0 remainder is not zero", rest.to_dict())
    return indices


@lru_cache(maxsize=32)
def omega_slice(ell: int, degree: int, cell_limit: Optional[int] = None) -> Tuple[LatticeVector, ...]:
    return tuple(enumerate_level(InequalitySystem.for_graph(odd_cycle(ell), 1), degree, cell_limit=cell_limit))


def image_phi_slice(ell: int, degree: int, cell_limit: Optional[int] = None) -> List[LatticeVector]:
    """Level-1 points of margin >= ell-1, checked against eta_1 + U^(0)_(d-3)"""
    if degree < 3:
        raise ValueError("the image of phi starts in degree 3")
    found = [v for v in omega_slice(ell, degree, cell_limit) if margin(v, ell) >= ell - 1]
    ring = InequalitySystem.for_graph(odd_cycle(ell), 0)
    shifted = sorted({eta(ell, 1) + mu for mu in enumerate_level(ring, degree - 3, cell_limit=cell_limit)})
    if found != shifted:
        raise VerificationError(f"image of phi at degree {degree} disagrees with eta_1 * R",
                                {"degree": degree, "by_margin": len(found), "by_product": len(shifted)})
    return found


def ck_slice(ell: int, k: int, degree: int, cell_limit: Optional[int] = None) -> List[LatticeVector]:
    """Level-1 points of margin exactly ell-k, checked against eta_k + U^(0)_0"""
    if not 2 <= k <= ell - 1:
        raise ValueError(f"k must lie in 2..{ell - 1}")
    found = [v for v in omega_slice(ell, degree, cell_limit) if margin(v, ell) == ell - k]
    base = face_subring_slice(ell, degree - (2 * k + 1), cell_limit)
    shifted = sorted(eta(ell, k) + mu for mu in base)
    if found != shifted:
        raise VerificationError(f"C_{k} at degree {degree} is not eta_{k} times the face subring",
                                {"k": k, "degree": degree, "found": len(found), "expected": len(shifted)})
    return found


def omega_partition(ell: int, degree: int, cell_limit: Optional[int] = None) -> Dict[str, int]:
    """Check omega_d = image(phi)_d disjoint union C_k,d and return the part sizes"""
    whole = list(omega_slice(ell, degree, cell_limit))
    parts = {"image": image_phi_slice(ell, degree, cell_limit) if degree >= 3 else []}
    for k in range(2, ell):
        parts[f"C{k}"] = ck_slice(ell, k, degree, cell_limit)
    union = sorted(v for part in parts.values() for v in part)
    if union != whole:
        raise VerificationError(f"omega slice at degree {degree} is not partitioned by margin",
                                {"degree": degree, "omega": len(whole), "parts": len(union)})
    return {name: len(part) for name, part in parts.items()}


def coker_series(ell: int) -> RationalSeries:
    """(lambda^2 + lambda^4 + ... + lambda^(2ell-4)) / (1 - lambda)^(2ell+1)"""
    numerator = [0] * (2 * ell - 3)
    for k in range(2, ell):
        numerator[2 * k - 2] = 1
    return RationalSeries(tuple(numerator), 2 * ell + 1)


def stratum_generators(ell: int, contributions: Dict[int, Dict[int, int]]) -> int:
    """
    Count the lowest-degree elements of every stratum C_k, summed over k

    A stratum free of rank one over the face subring starts in coker degree
    2k-2 with eta_k alone, so each k should contribute exactly one.

    Args:
        ell: Cycle parameter, the graph is C_{2ell+1}
        contributions: Per coker degree n, the size of each C_k slice

    Returns:
        Number of minimal generators seen in the strata
    """
    total = 0
    for k in range(2, ell):
        degrees = sorted(n for n, per_k in contributions.items() if per_k.get(k, 0) > 0)
        if not degrees:
            raise VerificationError(f"C_{k} is empty up to the degree bound", {"k": k})
        if degrees[0] != 2 * k - 2:
            raise VerificationError(f"C_{k} starts in the wrong degree",
                                    {"k": k, "lowest": degrees[0], "expected": 2 * k - 2})
        total += contributions[degrees[0]][k]
    return total


def coker_hilbert(ell: int, max_degree: Optional[int] = None, enumeration_cap: Optional[int] = None,
                  cell_limit: Optional[int] = None, pool=None) -> CokerProfile:
    """
    Hilbert function of coker(phi) in degrees n = -1..D-3

    Each dimension is computed twice, as L°(n+3) - L(n) and as the sum of the
    strata C_k. Slices up to the enumeration cap are also listed explicitly,
    and the result is matched against the closed-form series.

    Args:
        ell: Cycle parameter (>= 3)
        max_degree: Largest degree D of omega considered, default 2ell+3
        enumeration_cap: Largest degree enumerated point by point
        cell_limit: Resource guard override
        pool: Optional WorkerPool for the Ehrhart counts

    Returns:
        CokerProfile with dims, per-stratum contributions, series, e and mu
    """
    _require_ell(ell)
    if max_degree is None:
        max_degree = 2 * ell + 3
    if max_degree < 2 * ell - 1:
        raise ValueError(f"degree bound must reach 2ell-1 = {2 * ell - 1} to see every stratum")
    if enumeration_cap is None:
        enumeration_cap = config.AGOR_ENUMERATION_CAPS.get(ell, 3)
    g = odd_cycle(ell)
    counts = ehrhart_counts(g, max_degree, cell_limit=cell_limit, pool=pool)

    dims: Dict[int, int] = {}
    contributions: Dict[int, Dict[int, int]] = {}
    for d in range(2, max_degree + 1):
        n = d - 3
        by_counts = counts.interior[d] - (counts.closed[n] if n >= 0 else 0)
        per_k = {}
        for k in range(2, ell):
            base = d - (2 * k + 1)
            if base <= enumeration_cap:
                per_k[k] = len(face_subring_slice(ell, base, cell_limit))
            else:
                per_k[k] = polynomial_ring_count(ell, base)
        if d <= enumeration_cap:
            parts = omega_partition(ell, d, cell_limit)
            for k in per_k:
                if parts[f"C{k}"] != per_k[k]:
                    raise VerificationError(f"C_{k} slice size disagrees at degree {d}", {"degree": d, "k": k})
        if by_counts != sum(per_k.values()):
            raise VerificationError(f"coker dimension disagrees at degree {n}",
                                    {"degree": n, "by_counts": by_counts, "by_strata": per_k})
        dims[n] = by_counts
        contributions[n] = per_k

    series = coker_series(ell)
    for n, dim in dims.items():
        if series.coefficient(n) != dim:
            raise VerificationError(f"coker dimension at degree {n} misses the closed form",
                                    {"degree": n, "dim": dim, "series": series.coefficient(n)})
    if series.exponent != 2 * ell + 1:
        raise VerificationError("coker series does not reduce to the face-subring denominator",
                                series.to_dict())

    for k in range(2, ell):
        lowest = 2 * k + 1
        if lowest <= enumeration_cap and ck_slice(ell, k, lowest, cell_limit) != [eta(ell, k)]:
            raise VerificationError(f"lowest slice of C_{k} is not eta_{k}", {"k": k, "degree": lowest})
    generators = stratum_generators(ell, contributions)
    profile = CokerProfile(ell, max_degree, dims, contributions, series,
                           series.numerator_at_one(), generators)
    logger.info(f"📊 coker(phi) of C{g.n}: e = {profile.multiplicity}, mu = {profile.generators}")
    return profile


def check_hibi_tsuchiya(ell: int, max_dilation: Optional[int] = None, pool=None) -> HibiTsuchiyaReport:
    """
    Check the h*-identities of C_{2ell+1}

    h_s = h_0, h_(s-1) = h_1 and h_(s-i) = h_i + (-1)^i for 2 <= i <= 2ell-3,
    plus H(omega(3)) = H(R) + H(coker phi) as rational series.

    Args:
        ell: Cycle parameter (>= 3)
        max_dilation: Counts are taken up to this dilation, default d + 2
        pool: Optional WorkerPool

    Returns:
        HibiTsuchiyaReport with the first failing index, if any
    """
    _require_ell(ell)
    g = odd_cycle(ell)
    d = g.n
    if max_dilation is None:
        max_dilation = d + 2
    counts = ehrhart_counts(g, max(max_dilation, d), pool=pool)
    h = hstar_from_counts(counts.closed, d)
    s = 2 * ell - 1

    failure = None
    if h.s != s:
        failure = h.s
    else:
        checks = [(s, h[0]), (s - 1, h[1])]
        checks += [(s - i, h[i] + (-1) ** i) for i in range(2, 2 * ell - 2)]
        for index, expected in checks:
            if h[index] != expected:
                failure = index
                break

    omega_shifted = RationalSeries(tuple(reversed(h.coefficients)), d + 1)
    identity = omega_shifted == ehrhart_series(h) + coker_series(ell)
    for n in range(0, counts.max_dilation - 2):
        if omega_shifted.coefficient(n) != counts.interior[n + 3]:
            identity = False
            break

    report = HibiTsuchiyaReport(ell, h, failure is None, failure, identity)
    if failure is not None:
        logger.warning(f"⚠️ h*-identity fails at index {failure}: {h.to_list()}")
    return report


def eta_generator_count(ell: int) -> int:
    """eta_k, k = 2..ell-1, not divisible by any other eta_j"""
    g = odd_cycle(ell)
    family = eta_family(ell)
    survivors = [
        k for k in range(2, ell)
        if not any(is_divisible(family[k], family[j], g) for j in range(1, ell) if j != k)
    ]
    return len(survivors)


def almost_gorenstein_verdict(ell: int, max_degree: Optional[int] = None,
                              enumeration_cap: Optional[int] = None,
                              cell_limit: Optional[int] = None, pool=None) -> AlmostGorensteinVerdict:
    """
    Ulrich test e(coker phi) = mu(coker phi)

    Args:
        ell: Cycle parameter (>= 3)
        max_degree: Degree bound passed to coker_hilbert
        enumeration_cap: Largest degree enumerated explicitly; from 2ell-1 on,
            the minimal generators of omega are sieved as well
        cell_limit: Resource guard override
        pool: Optional WorkerPool

    Returns:
        AlmostGorensteinVerdict carrying e, mu, the h* report and the generators of omega
    """
    _require_ell(ell)
    if enumeration_cap is None:
        enumeration_cap = config.AGOR_ENUMERATION_CAPS.get(ell, 3)
    profile = coker_hilbert(ell, max_degree, enumeration_cap, cell_limit, pool)
    generators = eta_generator_count(ell)
    if generators != profile.generators:
        raise VerificationError("eta sieve and strata disagree on the generator count",
                                {"sieve": generators, "strata": profile.generators})
    enumerated = enumeration_cap >= 2 * ell - 1
    if enumerated:
        found = tuple(omega_generators(ell, 2 * ell - 1, cell_limit, pool))
        if len(found) - 1 != generators:
            raise VerificationError("omega generators minus eta_1 disagree with the sieve",
                                    {"omega": len(found), "sieve": generators})
    else:
        found = eta_family(ell).etas
    ht = check_hibi_tsuchiya(ell, pool=pool)
    verdict = AlmostGorensteinVerdict(ell, ht, profile.multiplicity, generators, found, enumerated)
    logger.info(f"✅ ell={ell}: e = {verdict.multiplicity}, mu = {verdict.generators}, "
                f"almost Gorenstein = {verdict.almost_gorenstein}")
    return verdict


def nu_difference_rank(ell: int, which: str = "face") -> int:
    """
    Exact rank of the difference matrices of the points nu_j = mu_j scaled to
    dilation 1: consecutive even-index differences spanning the face (rank
    ell), or the full cyclic family spanning the face subring (rank 2ell).
    """
    family = mu_family(ell)
    n = 2 * ell + 1
    nu = [list(family[j].values) for j in range(n)]

    def diff(a: int, b: int) -> List[int]:
        return [x - y for x, y in zip(nu[a % n], nu[b % n])]

    if which == "face":
        rows = [diff(2 * i + 2, 2 * i) for i in range(1, ell)] + [diff(1, 2 * ell)]
    elif which == "subring":
        rows = [diff(j + 2, j) for j in range(1, 2 * ell - 1)]
        rows += [diff(0, 2 * ell - 1), diff(1, 2 * ell)]
    else:
        raise ValueError(f"unknown difference matrix: {which}")
    return Matrix(rows).rank()
