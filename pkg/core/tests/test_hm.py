"""
Unit tests for the step-function extension module.
"""

import random
from fractions import Fraction

import pytest

from core.services.hm import (
    DEFAULT_SQUEEZE,
    BadBreakpoints,
    BadSqueezeMap,
    IdentityHomomorphism,
    NotAHomomorphism,
    NotInHM0,
    NotUnitNeighborhood,
    NormalizedUnitNbhd,
    SqueezeMap,
    absorb_exponent,
    alpha_apply,
    hm_embed,
    hm_inverse,
    hm_map,
    hm_measure_defect,
    hm_nbhd_member,
    hm_nbhd_normalize,
    hm_product,
    hm_unit,
    in_hm0,
    mk_homomorphism,
    step_canonicalize,
    sufficient_exponent,
)
from core.services.magma import FiniteAtom, HMSubbasic, Subset, WholeSpace
from core.services.verify import random_hm0_function

ZERO, ONE, TWO = FiniteAtom('0'), FiniteAtom('1'), FiniteAtom('2')


class TestStepFunctions:
    """Tests for canonical step functions and the pointwise operation."""

    def test_equal_neighbours_merge(self, c2):
        f = step_canonicalize([(0, ZERO), (Fraction(1, 4), ZERO), (Fraction(1, 2), ONE)], c2)
        assert f.pieces == ((Fraction(0), ZERO), (Fraction(1, 2), ONE))

    @pytest.mark.parametrize('raw', [
        [(Fraction(1, 4), FiniteAtom('0'))],
        [(0, FiniteAtom('0')), (Fraction(1, 2), FiniteAtom('1')), (Fraction(1, 2), FiniteAtom('0'))],
        [(0, FiniteAtom('0')), (1, FiniteAtom('1'))],
    ])
    def test_bad_breakpoints(self, c2, raw):
        with pytest.raises(BadBreakpoints):
            step_canonicalize(raw, c2)

    def test_embedding(self, c2, i_one):
        assert i_one.pieces == ((Fraction(0), ZERO), (Fraction(1, 2), ONE))
        assert in_hm0(i_one)
        assert hm_embed(c2, ZERO) == hm_unit(c2)

    def test_product_over_union_of_breakpoints(self, c3):
        f = step_canonicalize([(0, ZERO), (Fraction(1, 3), ONE)], c3)
        g = step_canonicalize([(0, ZERO), (Fraction(1, 2), ONE)], c3)
        assert hm_product(f, g).pieces == (
            (Fraction(0), ZERO), (Fraction(1, 3), ONE), (Fraction(1, 2), TWO),
        )

    def test_embedded_involution_squares_to_unit(self, c2, i_one):
        assert hm_product(i_one, i_one) == hm_unit(c2)

    def test_inverse(self, c3):
        f = step_canonicalize([(0, ZERO), (Fraction(1, 3), ONE)], c3)
        assert hm_product(f, hm_inverse(f)) == hm_unit(c3)

    def test_value_at(self, i_one):
        assert i_one.value_at(Fraction(1, 2)) == ONE
        assert i_one.value_at(Fraction(49, 100)) == ZERO


class TestTopology:
    """Tests for the measure of defect and subbasic membership."""

    def test_measure_defect(self, i_one):
        inner = Subset({ZERO})
        assert hm_measure_defect(i_one, inner, 0, 1) == Fraction(1, 2)
        assert hm_measure_defect(i_one, inner, Fraction(1, 4), Fraction(3, 4)) == Fraction(1, 4)

    def test_membership_is_strict(self, i_one):
        inner = Subset({ZERO})
        assert hm_nbhd_member(i_one, HMSubbasic(inner, 0, 1, Fraction(1, 2))) is False
        assert hm_nbhd_member(i_one, HMSubbasic(inner, 0, 1, Fraction(3, 4))) is True

    def test_vacuous_parts_are_dropped(self, c2):
        part = HMSubbasic(Subset({ZERO}), 0, Fraction(1, 2), Fraction(3, 4))
        assert hm_nbhd_normalize([part], c2) == NormalizedUnitNbhd(WholeSpace(), Fraction(1))

    def test_parts_combine(self, c3):
        first = HMSubbasic(Subset({ZERO, ONE}), 0, 1, Fraction(1, 4))
        second = HMSubbasic(Subset({ZERO, TWO}), Fraction(1, 2), 1, Fraction(1, 8))
        N = hm_nbhd_normalize([first, second], c3)
        assert N == NormalizedUnitNbhd(Subset({ZERO}), Fraction(1, 8))

    def test_part_excluding_unit(self, c2):
        with pytest.raises(NotUnitNeighborhood):
            hm_nbhd_normalize([HMSubbasic(Subset({ONE}), 0, 1, Fraction(1, 4))], c2)


class TestSqueeze:
    """Tests for squeeze maps and the automorphism gamma -> gamma o s."""

    def test_default_squeeze_values(self):
        assert DEFAULT_SQUEEZE.apply(Fraction(1, 2)) == Fraction(1, 4)
        assert DEFAULT_SQUEEZE.apply(Fraction(3, 4)) == Fraction(5, 8)
        assert DEFAULT_SQUEEZE.inverse(Fraction(5, 8)) == Fraction(3, 4)
        assert DEFAULT_SQUEEZE.power(-2, Fraction(1, 2)) == Fraction(7, 9)

    def test_identity_is_rejected(self):
        with pytest.raises(BadSqueezeMap):
            SqueezeMap(((0, 1, 0),))

    def test_map_above_diagonal_is_rejected(self):
        with pytest.raises(BadSqueezeMap):
            SqueezeMap(((0, 2, 0), (Fraction(1, 4), Fraction(2, 3), Fraction(1, 3))))

    def test_alpha_moves_breakpoints_right(self, i_one):
        assert alpha_apply(i_one, 1).pieces == ((Fraction(0), ZERO), (Fraction(2, 3), ONE))
        assert alpha_apply(alpha_apply(i_one, 3), -3) == i_one

    def test_least_exponent(self, i_one):
        N = NormalizedUnitNbhd(Subset({ZERO}), Fraction(1, 4))
        assert absorb_exponent(i_one, N) == 2
        assert sufficient_exponent(i_one, N) == 2

    def test_unit_needs_no_exponent(self, c2):
        N = NormalizedUnitNbhd(Subset({ZERO}), Fraction(1, 32))
        assert absorb_exponent(hm_unit(c2), N) == 0

    def test_function_outside_hm0(self, c2):
        f = step_canonicalize([(0, ONE)], c2)
        with pytest.raises(NotInHM0):
            absorb_exponent(f, NormalizedUnitNbhd(Subset({ZERO}), Fraction(1, 4)))


class TestFunctoriality:
    """Tests for homomorphisms and HM(h)."""

    def test_reduction_mod_two(self, c4, c2):
        h = mk_homomorphism(c4, c2, {'0': '0', '1': '1', '2': '0', '3': '1'})
        f = step_canonicalize([(0, ZERO), (Fraction(1, 3), TWO), (Fraction(2, 3), FiniteAtom('3'))], c4)
        assert hm_map(h, f).pieces == ((Fraction(0), ZERO), (Fraction(2, 3), ONE))

    def test_non_homomorphism(self, c4, c2):
        with pytest.raises(NotAHomomorphism):
            mk_homomorphism(c4, c2, {'0': '0', '1': '1', '2': '1', '3': '1'})

    def test_identity(self, i_one, c2):
        assert hm_map(IdentityHomomorphism(c2), i_one) == i_one

    def test_map_preserves_products(self, c4, c2):
        h = mk_homomorphism(c4, c2, {'0': '0', '1': '1', '2': '0', '3': '1'})
        f = step_canonicalize([(0, ZERO), (Fraction(1, 5), ONE)], c4)
        g = step_canonicalize([(0, ZERO), (Fraction(1, 2), FiniteAtom('3'))], c4)
        assert hm_map(h, hm_product(f, g)) == hm_product(hm_map(h, f), hm_map(h, g))

    @pytest.mark.parametrize('k', [1, -1, 3])
    def test_map_commutes_with_alpha(self, c4, c2, k):
        h = mk_homomorphism(c4, c2, {'0': '0', '1': '1', '2': '0', '3': '1'})
        rng = random.Random(f"naturality:{k}")
        for _ in range(25):
            f = random_hm0_function(rng, c4, nonconstant=True)
            assert hm_map(h, alpha_apply(f, k)) == alpha_apply(hm_map(h, f), k)

    def test_swap_on_non_associative_magma_commutes_with_alpha(self, non_associative):
        h = mk_homomorphism(non_associative, non_associative, {'e': 'e', 'a': 'b', 'b': 'a'})
        rng = random.Random('naturality:swap')
        for _ in range(25):
            f = random_hm0_function(rng, non_associative, nonconstant=True)
            assert hm_map(h, f) != f
            assert hm_map(h, alpha_apply(f, 1)) == alpha_apply(hm_map(h, f), 1)
