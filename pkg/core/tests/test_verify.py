"""
Unit tests for certificate verification, the oracles and instance generators.
"""

import random
from dataclasses import replace
from fractions import Fraction

import pytest

from core.services.hm import hm_nbhd_member, step_canonicalize
from core.services.magma import FiniteAtom, HMSubbasic, Pair, Subset, WholeSpace
from core.services.semidirect import duo_witness_z
from core.services.verify import (
    INSTANCE_KINDS,
    TAMPERINGS,
    CoverageMode,
    InstanceTooLarge,
    MalformedCertificate,
    UnknownKind,
    WitnessCertificate,
    certificate_from_witness,
    check_certificate,
    in_canonical_s,
    oracle_small_combination,
    oracle_step_membership,
    random_duo_certificate,
    random_instance,
    tamper_certificate,
)

A, B, E = FiniteAtom('a'), FiniteAtom('b'), FiniteAtom('e')


@pytest.fixture
def duo_certificate(f_c2, i_one, quarter_nbhd):
    target = Pair(i_one, 3)
    return certificate_from_witness(f_c2, target, quarter_nbhd, duo_witness_z(f_c2, target, quarter_nbhd))


class TestCheckCertificate:
    """Tests for check_certificate on each coverage shape."""

    def test_duo_witness_passes(self, duo_certificate):
        verdict = check_certificate(duo_certificate)
        assert verdict.passed is True
        assert verdict.to_dict() == {'verdict': 'pass'}

    @pytest.mark.parametrize('how,clause', [
        ('element', 'product-mismatch'),
        ('s1', 'product-mismatch'),
        ('u', 'u-membership'),
        ('s2', 'product-mismatch'),
        ('neighborhood', 'u-membership'),
    ])
    def test_tampering_is_detected(self, duo_certificate, how, clause):
        verdict = check_certificate(tamper_certificate(duo_certificate, how))
        assert verdict.passed is False
        assert verdict.clause == clause

    def test_left_factor_outside_s(self, duo_certificate, i_one):
        s1, u, s2 = duo_certificate.witness
        tampered = replace(duo_certificate, witness=(Pair(i_one, s1.right), u, s2))
        assert check_certificate(tampered).clause == 's-membership'

    def test_second_association_in_non_associative_magma(self, non_associative):
        certificate = WitnessCertificate(
            mode=CoverageMode('duo', 'separable'),
            magma=non_associative,
            element=B,
            neighborhood=WholeSpace(),
            witness=(A, A, B),
            association='left',
        )
        verdict = check_certificate(certificate)
        assert verdict.clause == 'second-association'
        assert verdict.detail == {'association': 'right'}

    def test_left_shape(self, f_c2, i_one, quarter_nbhd, duo_certificate):
        s1, u, _ = duo_certificate.witness
        certificate = WitnessCertificate(
            mode=CoverageMode('left', 'separable'),
            magma=f_c2,
            element=Pair(i_one, -2),
            neighborhood=quarter_nbhd,
            witness=(s1, u),
            slots=('S', 'U'),
        )
        assert check_certificate(certificate).passed is True

    def test_preseparable_shape(self, c3):
        one, zero = FiniteAtom('1'), FiniteAtom('0')
        certificate = WitnessCertificate(
            mode=CoverageMode('preseparable', 'separable'),
            magma=c3,
            element=FiniteAtom('2'),
            neighborhood=Subset({zero}),
            witness=(one, zero, one, one, zero, one),
            f_set=(one,),
        )
        assert check_certificate(certificate).passed is True
        outside = replace(certificate, f_set=(FiniteAtom('2'),))
        assert check_certificate(outside).clause == 'f-membership'

    def test_precompact_needs_explicit_s(self, duo_certificate):
        with pytest.raises(MalformedCertificate):
            check_certificate(replace(duo_certificate, mode=CoverageMode('duo', 'precompact')))

    def test_precompact_with_finite_s(self, duo_certificate):
        s1, _, s2 = duo_certificate.witness
        certificate = replace(duo_certificate, mode=CoverageMode('duo', 'precompact'), s_set=(s1, s2))
        assert check_certificate(certificate).passed is True

    def test_wrong_factor_count(self, duo_certificate):
        with pytest.raises(MalformedCertificate):
            check_certificate(replace(duo_certificate, witness=duo_certificate.witness[:2]))

    def test_neighborhood_must_contain_unit(self, duo_certificate, f_c2):
        from core.services.magma import ProductDiscrete
        bad = ProductDiscrete(HMSubbasic(Subset({FiniteAtom('1')}), 0, 1, Fraction(1, 4)))
        with pytest.raises(MalformedCertificate):
            check_certificate(replace(duo_certificate, neighborhood=bad))

    def test_unknown_shape(self):
        with pytest.raises(MalformedCertificate):
            CoverageMode('sideways', 'separable')


class TestCanonicalS:
    """Tests for in_canonical_s."""

    def test_semidirect(self, f_c2, c2, i_one):
        from core.services.hm import hm_unit
        assert in_canonical_s(f_c2, Pair(hm_unit(c2), 5)) is True
        assert in_canonical_s(f_c2, Pair(i_one, 0)) is False

    def test_finite(self, c3):
        assert in_canonical_s(c3, FiniteAtom('2')) is True
        assert in_canonical_s(c3, FiniteAtom('9')) is False


class TestOracles:
    """Tests for the brute-force oracles."""

    @pytest.mark.parametrize('Y,eps,expected', [
        ([(Fraction(3, 7),), (Fraction(2, 7),)], Fraction(1, 7), (1, -1)),
        ([(Fraction(1, 2),), (Fraction(1, 2),)], Fraction(0), (1, -1)),
        ([(Fraction(0),)], Fraction(1, 3), (1,)),
    ])
    def test_small_combination(self, Y, eps, expected):
        assert oracle_small_combination(Y, eps) == expected

    def test_too_many_vectors(self):
        with pytest.raises(InstanceTooLarge):
            oracle_small_combination([(Fraction(1),)] * 4, Fraction(1, 2))

    def test_step_membership_agrees(self, c3):
        f = step_canonicalize([(0, FiniteAtom('0')), (Fraction(1, 6), FiniteAtom('1')),
                               (Fraction(1, 2), FiniteAtom('2'))], c3)
        for inner in (Subset({FiniteAtom('0')}), Subset({FiniteAtom('0'), FiniteAtom('2')})):
            for a, b in ((0, 1), (Fraction(1, 3), Fraction(2, 3)), (Fraction(1, 2), 1)):
                for eps in (Fraction(1, 6), Fraction(1, 3), Fraction(1, 2)):
                    N = HMSubbasic(inner, a, b, eps)
                    assert oracle_step_membership(f, N) == hm_nbhd_member(f, N)


class TestGenerators:
    """Tests for seeded instance generation."""

    @pytest.mark.parametrize('kind', INSTANCE_KINDS)
    def test_deterministic(self, kind):
        assert random_instance(kind, 11) == random_instance(kind, 11)

    def test_unknown_kind(self):
        with pytest.raises(UnknownKind):
            random_instance('lattice', 0)

    def test_generated_certificates_pass_and_tamperings_fail(self):
        rng = random.Random('tamper')
        for _ in range(5):
            certificate = random_duo_certificate(rng)
            assert check_certificate(certificate).passed
            for how in TAMPERINGS:
                assert not check_certificate(tamper_certificate(certificate, how)).passed
