from math import comb

import pytest

from app.errors import VerificationError
from app.services.agor_service import (
    almost_gorenstein_verdict,
    check_hibi_tsuchiya,
    ck_slice,
    coker_hilbert,
    coker_series,
    decompose_r0,
    eta_generator_count,
    face_subring,
    face_subring_slice,
    image_phi_slice,
    mu_family,
    mu_vector,
    nu_difference_rank,
    omega_partition,
    stratum_generators,
)
from app.services.canonical_service import eta, odd_cycle
from app.services.ehrhart_service import RationalSeries
from app.services.lattice_service import InequalitySystem, LatticeVector, enumerate_level


def test_mu_vectors(mu0_c7):
    assert mu_vector(3, 0) == mu0_c7
    assert mu_vector(3, 3) == LatticeVector.of([1, 0, 0, 1, 0, 1, 0], 1)
    family = mu_family(3)
    assert len(family) == 7
    assert all(sum(mu.values) == 3 and mu.degree == 1 for mu in family.mus)


@pytest.mark.parametrize("ell", [3, 4])
def test_face_subring_is_a_polynomial_ring(ell):
    subring = face_subring(ell, 4 if ell == 3 else 2)
    assert list(subring.counts) == [comb(d + 2 * ell, 2 * ell) for d in range(len(subring.counts))]


def test_degree_one_face_subring_is_the_mu_family():
    assert set(face_subring_slice(3, 1)) == set(mu_family(3).mus)
    assert face_subring_slice(3, -1) == ()


def test_decompose_single_generator():
    assert decompose_r0(mu_vector(3, 3), 3) == [3]


def test_decompose_zero():
    assert decompose_r0(LatticeVector.zero(7), 3) == []


def test_decompose_sum_of_two():
    mu = mu_vector(3, 0) + mu_vector(3, 1)
    indices = decompose_r0(mu, 3)
    assert len(indices) == 2
    family = mu_family(3)
    assert family[indices[0]] + family[indices[1]] == mu


@pytest.mark.parametrize("ell, max_degree", [(3, 3), (4, 2)])
def test_decompose_round_trips_on_the_face_subring(ell, max_degree):
    family = mu_family(ell)
    for d in range(max_degree + 1):
        for mu in face_subring_slice(ell, d):
            indices = decompose_r0(mu, ell)
            assert len(indices) == d
            total = LatticeVector.zero(2 * ell + 1)
            for i in indices:
                total = total + family[i]
            assert total == mu


def test_decompose_rejects_points_off_the_face():
    with pytest.raises(ValueError):
        decompose_r0(LatticeVector.of([1, 0, 1, 0, 0, 0, 0], 1), 3)


def test_image_phi_slices():
    assert image_phi_slice(3, 3) == [eta(3, 1)]
    assert image_phi_slice(4, 3) == [eta(4, 1)]
    assert len(image_phi_slice(3, 4)) == 29
    with pytest.raises(ValueError):
        image_phi_slice(3, 2)


def test_ck_slices():
    assert ck_slice(3, 2, 5) == [eta(3, 2)]
    assert ck_slice(3, 2, 4) == []
    assert len(ck_slice(4, 2, 6)) == 9
    with pytest.raises(ValueError):
        ck_slice(3, 3, 5)


@pytest.mark.parametrize("degree", range(0, 8))
def test_omega_is_partitioned_by_margin(degree):
    parts = omega_partition(3, degree)
    omega = InequalitySystem.for_graph(odd_cycle(3), 1)
    assert sum(parts.values()) == len(enumerate_level(omega, degree))


def test_coker_series_closed_form():
    assert coker_series(3) == RationalSeries((0, 0, 1), 7)
    assert coker_series(3) == RationalSeries((0, 0, 1, -1), 8)
    assert coker_series(4) == RationalSeries((0, 0, 1, -1, 1, -1), 10)
    assert coker_series(4).numerator_at_one() == 2


def test_coker_hilbert_ell3():
    profile = coker_hilbert(3)
    assert profile.multiplicity == 1
    assert profile.generators == 1
    assert profile.dims[-1] == 0
    assert profile.dims[0] == 0
    assert profile.dims[2] == 1
    assert profile.series.exponent == 7


def test_coker_hilbert_ell4():
    profile = coker_hilbert(4, enumeration_cap=4)
    assert (profile.multiplicity, profile.generators) == (2, 2)
    assert profile.dims[2] == 1
    assert profile.contributions[4] == {2: comb(2 + 8, 8), 3: 1}


@pytest.mark.parametrize("ell", [3, 4])
def test_hibi_tsuchiya_identities(ell):
    report = check_hibi_tsuchiya(ell)
    assert report.passed
    assert report.series_identity
    h = report.hstar
    s = 2 * ell - 1
    assert h.s == s
    assert h[s] == h[0] == 1
    assert h[s - 1] == h[1]
    assert h[s - 2] == h[2] + 1


def test_hibi_tsuchiya_shape_ell3():
    h = check_hibi_tsuchiya(3).hstar.to_list()
    assert len(h) == 6
    assert h[3] == h[2] + 1
    assert h[4] == h[1]


def test_eta_generator_count():
    assert eta_generator_count(3) == 1
    assert eta_generator_count(4) == 2
    assert eta_generator_count(5) == 3


def test_almost_gorenstein_ell3():
    verdict = almost_gorenstein_verdict(3)
    data = verdict.to_dict()
    assert data["almost_gorenstein"] is True
    assert data["ulrich"] == {"e": 1, "mu": 1}
    assert data["ht_identity"] == "pass"
    assert data["ell"] == 3


@pytest.mark.parametrize("ell, expected", [(4, 2), (5, 3)])
def test_almost_gorenstein_larger_cycles(ell, expected):
    verdict = almost_gorenstein_verdict(ell, enumeration_cap=3)
    assert verdict.almost_gorenstein
    assert verdict.multiplicity == verdict.generators == expected


@pytest.mark.parametrize("ell", [3, 4])
def test_nu_difference_ranks(ell):
    assert nu_difference_rank(ell, "face") == ell
    assert nu_difference_rank(ell, "subring") == 2 * ell
    with pytest.raises(ValueError):
        nu_difference_rank(ell, "other")


def test_coker_mismatch_is_reported(monkeypatch):
    import app.services.agor_service as agor

    monkeypatch.setattr(agor, "polynomial_ring_count", lambda ell, degree: 0 if degree < 0 else 7)
    with pytest.raises(VerificationError):
        coker_hilbert(3, enumeration_cap=0)


def test_stratum_generators_counts_lowest_slices():
    assert stratum_generators(4, coker_hilbert(4, enumeration_cap=3).contributions) == 2
    assert coker_hilbert(3, enumeration_cap=0).generators == 1


def test_corrupted_stratum_is_reported():
    contributions = dict(coker_hilbert(3, enumeration_cap=0).contributions)
    doubled = dict(contributions)
    doubled[2] = {2: 2}
    assert stratum_generators(3, doubled) == 2
    shifted = dict(contributions)
    shifted[1] = {2: 1}
    with pytest.raises(VerificationError):
        stratum_generators(3, shifted)
    with pytest.raises(VerificationError):
        stratum_generators(3, {n: {2: 0} for n in contributions})


def test_verdict_fails_when_strata_disagree_with_the_sieve(monkeypatch):
    import app.services.agor_service as agor

    monkeypatch.setattr(agor, "stratum_generators", lambda ell, contributions: ell)
    with pytest.raises(VerificationError) as info:
        almost_gorenstein_verdict(3, enumeration_cap=0)
    assert info.value.counterexample == {"sieve": 1, "strata": 3}


def test_coker_hilbert_needs_every_stratum():
    with pytest.raises(ValueError):
        coker_hilbert(4, max_degree=6)


def test_verdict_reports_omega_generators():
    data = almost_gorenstein_verdict(3).to_dict()
    assert data["omega_generators_source"] == "enumerated"
    assert [g["deg"] for g in data["omega_generators"]] == [3, 5]
    assert [g["margin"] for g in data["omega_generators"]] == [2, 1]
    data = almost_gorenstein_verdict(4, enumeration_cap=3).to_dict()
    assert data["omega_generators_source"] == "eta_family"
    assert data["omega_generators"] == [dict(eta(4, k).to_dict(), margin=4 - k) for k in (1, 2, 3)]
