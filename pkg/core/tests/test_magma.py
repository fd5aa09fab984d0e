"""
Unit tests for the magma core module.

Tests the functionality of:
- Finite table validation and the associativity flag
- The operation and inverses on every base model
- Exact neighborhood membership and intersection
- Automorphism validation, action, composition and powers
"""

import random
from fractions import Fraction

import pytest

from core.services.lattice import UnimodularMatrix
from core.services.magma import (
    Composite,
    EpsBox,
    FiniteAtom,
    HMSubbasic,
    Intersection,
    MatrixAut,
    NoInverse,
    NotAnAutomorphism,
    RationalTorus,
    RationalVector,
    RationalVectorGroup,
    ScalingPower,
    ShapeMismatch,
    Subset,
    TorusPoint,
    UnitLawViolation,
    UnknownSymbol,
    WholeSpace,
    aut_act,
    aut_compose,
    aut_inverse,
    aut_power,
    check_element,
    element_inverse,
    enumerate_elements,
    mk_finite_magma,
    mk_finite_permutation,
    nbhd_contains_unit,
    nbhd_intersect,
    nbhd_member,
    op_apply,
    unit_of,
)
from core.services.semidirect import build_F
from core.services.verify import oracle_step_membership, random_fraction, random_hm0_function, random_torus_points
from core.utils.error_handlers import InputError


def _random_subbasic(rng, base):
    members = {FiniteAtom(n) for n in base.elements if rng.random() < 0.5} | {FiniteAtom(base.unit)}
    a = Fraction(rng.randint(0, 5), 12)
    b = Fraction(rng.randint(6, 12), 12)
    return HMSubbasic(Subset(members), a, b, Fraction(rng.randint(1, 8), 16))


class TestFiniteMagma:
    """Tests for mk_finite_magma."""

    def test_cyclic_group_is_associative(self, c2):
        assert c2.is_associative is True
        assert c2.unit == '0'

    def test_non_associative_table_is_flagged(self, non_associative):
        assert non_associative.is_associative is False

    def test_unit_law_violation(self):
        with pytest.raises(UnitLawViolation):
            mk_finite_magma(['e', 'a'], [['e', 'a'], ['a', 'a']], 'a')

    def test_unknown_symbol_in_table(self):
        with pytest.raises(UnknownSymbol):
            mk_finite_magma(['e', 'a'], [['e', 'a'], ['a', 'z']], 'e')

    def test_table_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            mk_finite_magma(['e', 'a'], [['e', 'a']], 'e')

    def test_left_zero_band_with_adjoined_unit(self):
        # x*y = x on {a, b}, plus a unit e
        M = mk_finite_magma(['e', 'a', 'b'], [['e', 'a', 'b'], ['a', 'a', 'a'], ['b', 'b', 'b']], 'e')
        assert M.is_associative is True

    def test_enumerate_elements(self, c3):
        assert enumerate_elements(c3) == [FiniteAtom('0'), FiniteAtom('1'), FiniteAtom('2')]


class TestOperation:
    """Tests for op_apply and element_inverse."""

    def test_finite_product(self, c2):
        assert op_apply(c2, FiniteAtom('1'), FiniteAtom('1')) == FiniteAtom('0')

    def test_vector_sum(self):
        M = RationalVectorGroup(2)
        x = RationalVector((Fraction(1, 2), Fraction(-1, 3)))
        y = RationalVector((Fraction(1, 2), Fraction(1, 3)))
        assert op_apply(M, x, y) == RationalVector((1, 0))

    def test_torus_sum_wraps(self):
        M = RationalTorus(1)
        assert op_apply(M, TorusPoint((Fraction(3, 4),)), TorusPoint((Fraction(1, 2),))) == TorusPoint((Fraction(1, 4),))

    def test_rejects_foreign_element(self, c2):
        with pytest.raises(ShapeMismatch):
            op_apply(c2, FiniteAtom('1'), FiniteAtom('7'))

    def test_finite_inverse(self, c3):
        assert element_inverse(c3, FiniteAtom('1')) == FiniteAtom('2')

    def test_non_group_has_no_inverse(self, non_associative):
        with pytest.raises(NoInverse):
            element_inverse(non_associative, FiniteAtom('a'))

    def test_torus_inverse(self):
        M = RationalTorus(2)
        x = TorusPoint((Fraction(1, 3), Fraction(0)))
        assert op_apply(M, x, element_inverse(M, x)) == unit_of(M)

    def test_check_element_dimension(self):
        with pytest.raises(ShapeMismatch):
            check_element(RationalTorus(2), TorusPoint((Fraction(1, 2),)))


class TestNeighborhoods:
    """Tests for nbhd_member and nbhd_intersect."""

    def test_torus_box_uses_circle_distance(self):
        M = RationalTorus(1)
        box = EpsBox(Fraction(1, 10))
        assert nbhd_member(M, box, TorusPoint((Fraction(9, 10),))) is True
        assert nbhd_member(M, box, TorusPoint((Fraction(1, 2),))) is False

    def test_box_restricted_to_coordinates(self):
        M = RationalTorus(2)
        x = TorusPoint((Fraction(1, 20), Fraction(1, 2)))
        assert nbhd_member(M, EpsBox(Fraction(1, 10), (0,)), x) is True
        assert nbhd_member(M, EpsBox(Fraction(1, 10)), x) is False

    def test_subset_membership(self, c3):
        U = Subset({FiniteAtom('0'), FiniteAtom('2')})
        assert nbhd_member(c3, U, FiniteAtom('2')) is True
        assert nbhd_member(c3, U, FiniteAtom('1')) is False
        assert nbhd_contains_unit(c3, U) is True

    def test_box_does_not_apply_to_finite(self, c2):
        with pytest.raises(ShapeMismatch):
            nbhd_member(c2, EpsBox(Fraction(1, 2)), FiniteAtom('0'))

    def test_intersect_boxes_fuses_radius(self):
        assert nbhd_intersect(EpsBox(Fraction(1, 2)), EpsBox(Fraction(1, 3))) == EpsBox(Fraction(1, 3))

    def test_intersect_subsets(self):
        a, b, c = FiniteAtom('0'), FiniteAtom('1'), FiniteAtom('2')
        assert nbhd_intersect(Subset({a, b}), Subset({a, c})) == Subset({a})

    def test_whole_space_is_neutral(self):
        box = EpsBox(Fraction(1, 4))
        assert nbhd_intersect(WholeSpace(), box) == box

    def test_eps_must_be_positive(self):
        with pytest.raises(InputError):
            EpsBox(Fraction(0))

    def test_intersect_hm_subbasics_is_conjunction(self, c3):
        M = build_F(c3).base
        rng = random.Random('intersect-hm')
        for _ in range(20):
            first, second = _random_subbasic(rng, c3), _random_subbasic(rng, c3)
            both = nbhd_intersect(first, second, M)
            assert isinstance(both, Intersection)
            f = random_hm0_function(rng, c3)
            expected = oracle_step_membership(f, first) and oracle_step_membership(f, second)
            assert nbhd_member(M, both, f) is expected

    def test_intersection_membership_is_conjunction_of_parts(self):
        M = RationalTorus(2)
        parts = (EpsBox(Fraction(1, 10), (0,)), EpsBox(Fraction(1, 5), (1,)), EpsBox(Fraction(1, 3)))
        U = Intersection(parts)
        rng = random.Random('intersection')
        for x in random_torus_points(rng, 2, 50):
            assert nbhd_member(M, U, x) is all(nbhd_member(M, part, x) for part in parts)

    def test_boxes_on_different_coordinates_stay_separate(self):
        U = nbhd_intersect(EpsBox(Fraction(1, 10), (0,)), EpsBox(Fraction(1, 5), (1,)))
        assert U == Intersection((EpsBox(Fraction(1, 10), (0,)), EpsBox(Fraction(1, 5), (1,))))
        M = RationalTorus(2)
        assert nbhd_member(M, U, TorusPoint((Fraction(1, 20), Fraction(9, 10)))) is True
        assert nbhd_member(M, U, TorusPoint((Fraction(1, 20), Fraction(1, 2)))) is False


class TestAutomorphisms:
    """Tests for permutations, matrix and scaling automorphisms."""

    def test_negation_is_an_automorphism_of_c3(self, c3):
        alpha = mk_finite_permutation(c3, {'0': '0', '1': '2', '2': '1'})
        assert aut_act(alpha, FiniteAtom('1')) == FiniteAtom('2')
        assert aut_act(alpha, FiniteAtom('1'), 'inverse') == FiniteAtom('2')

    def test_unit_must_be_fixed(self, c3):
        with pytest.raises(NotAnAutomorphism):
            mk_finite_permutation(c3, {'0': '1', '1': '0', '2': '2'})

    def test_operation_must_be_preserved(self, c4):
        with pytest.raises(NotAnAutomorphism):
            mk_finite_permutation(c4, {'0': '0', '1': '2', '2': '1', '3': '3'})

    def test_matrix_action_on_torus(self):
        A = MatrixAut(UnimodularMatrix([[1, 0], [-1, 1]]))
        x = TorusPoint((Fraction(2, 5), Fraction(1, 3)))
        image = aut_act(A, x)
        assert image == TorusPoint((Fraction(1, 15), Fraction(1, 3)))
        assert aut_act(A, image, 'inverse') == x

    def test_compose_applies_right_factor_first(self):
        alpha = MatrixAut(UnimodularMatrix([[1, 1], [0, 1]]))
        beta = MatrixAut(UnimodularMatrix([[1, 0], [1, 1]]))
        x = RationalVector((Fraction(1, 2), Fraction(3)))
        assert aut_act(aut_compose(alpha, beta), x) == aut_act(alpha, aut_act(beta, x))

    def test_composite_matches_nested_action(self):
        alpha = MatrixAut(UnimodularMatrix([[1, 1], [0, 1]]))
        beta = ScalingPower(1)
        x = RationalVector((Fraction(1), Fraction(2)))
        composite = Composite((alpha, beta))
        assert aut_act(composite, x) == aut_act(alpha, aut_act(beta, x))
        assert aut_act(aut_inverse(composite), aut_act(composite, x)) == x

    def test_scaling_powers(self):
        x = RationalVector((Fraction(4),))
        assert aut_act(aut_power(ScalingPower(1), -2), x) == RationalVector((Fraction(1),))
        assert aut_act(ScalingPower(1, factor=3), x, 'inverse') == RationalVector((Fraction(4, 3),))

    def test_matrix_power(self):
        shear = MatrixAut(UnimodularMatrix([[1, 1], [0, 1]]))
        assert aut_power(shear, 3).matrix.rows == ((1, 3), (0, 1))
        assert aut_power(shear, -1).matrix.rows == ((1, -1), (0, 1))

    def test_matrix_action_preserves_torus_addition(self):
        M = RationalTorus(2)
        A = MatrixAut(UnimodularMatrix([[5, 1], [-6, -1]]))
        rng = random.Random('matrix-homomorphism')
        for _ in range(20):
            x, y = random_torus_points(rng, 2, 2)
            assert aut_act(A, op_apply(M, x, y)) == op_apply(M, aut_act(A, x), aut_act(A, y))

    def test_permutation_preserves_the_table(self, c3, non_associative):
        for M, mapping in ((c3, {'0': '0', '1': '2', '2': '1'}),
                           (non_associative, {'e': 'e', 'a': 'b', 'b': 'a'})):
            alpha = mk_finite_permutation(M, mapping)
            for x in enumerate_elements(M):
                for y in enumerate_elements(M):
                    assert aut_act(alpha, op_apply(M, x, y)) == op_apply(M, aut_act(alpha, x), aut_act(alpha, y))

    def test_scaling_preserves_vector_addition(self):
        M = RationalVectorGroup(2)
        rng = random.Random('scaling-homomorphism')
        for k in (-2, 1, 3):
            alpha = ScalingPower(k, factor=3)
            for _ in range(10):
                x, y = (RationalVector(tuple(random_fraction(rng, 9, Fraction(-5), Fraction(5)) for _ in range(2)))
                        for _ in range(2))
                assert aut_act(alpha, op_apply(M, x, y)) == op_apply(M, aut_act(alpha, x), aut_act(alpha, y))

    @pytest.mark.parametrize('rows', [
        [[5, 1], [-6, -1]],
        [[2, 1], [1, 1]],
        [[1, 0], [-3, 1]],
    ])
    def test_forward_then_inverse_on_torus_points(self, rows):
        A = MatrixAut(UnimodularMatrix(rows))
        rng = random.Random(f"round-trip:{rows}")
        for x in random_torus_points(rng, 2, 50):
            assert aut_act(A, aut_act(A, x), 'inverse') == x
            assert aut_act(A, aut_act(A, x, 'inverse')) == x
