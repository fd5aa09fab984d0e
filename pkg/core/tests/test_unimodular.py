"""
Unit tests for the unimodular lattice module.

Tests the functionality of:
- Extended gcd and primitive completion
- Small-combination search under both strategies and its budget
- The small-column loop and torus absorption
- The absorbing-family registry
"""

import threading
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from unittest.mock import patch

import pytest

from core.services.lattice import NotUnimodular, RationalMatrix, UnimodularMatrix
from core.services.magma import EpsBox, MatrixAut, TorusPoint, aut_act, nbhd_member, RationalTorus
from core.services.unimodular import (
    ENUMERATION,
    LLL,
    AbsorbingFamilyRegistry,
    BudgetExhausted,
    DimensionTooSmall,
    NotPrimitive,
    SearchBudget,
    block_diagonal_lift,
    combination_is_small,
    egcd,
    fronting_matrix,
    primitive_completion,
    registry_id_for,
    shrink_columns,
    small_combination,
    torus_absorb,
)
from core.utils.error_handlers import InputError


class TestPrimitiveCompletion:
    """Tests for egcd and primitive_completion."""

    @pytest.mark.parametrize('a,b', [(240, 46), (-7, 3), (0, 5), (12, -18)])
    def test_egcd_bezout(self, a, b):
        g, x, y = egcd(a, b)
        assert g >= 0
        assert a * x + b * y == g

    def test_two_entries(self):
        assert primitive_completion((2, 3)).to_list() == [[1, 2], [1, 3]]

    @pytest.mark.parametrize('d', [(1, -2), (1, -1), (6, 10, 15), (0, 0, -1), (4, 0, 1), (3, -5, 7, 2)])
    def test_last_column_and_determinant(self, d):
        A = primitive_completion(d)
        assert A.det() == 1
        assert list(A.column(len(d) - 1)) == list(d)

    @pytest.mark.parametrize('d', [(2, 4), (0, 0), (-1,)])
    def test_not_primitive(self, d):
        with pytest.raises(NotPrimitive):
            primitive_completion(d)

    def test_determinant_minus_one_is_rejected(self):
        with pytest.raises(NotUnimodular):
            UnimodularMatrix([[0, 1], [1, 0]])


class TestSmallCombination:
    """Tests for small_combination and its budget."""

    @pytest.mark.parametrize('strategy', [ENUMERATION, LLL])
    def test_finds_small_primitive_combination(self, strategy):
        Y = [(Fraction(5, 2),), (Fraction(1),)]
        d = small_combination(Y, Fraction(1, 2), SearchBudget(strategy=strategy))
        assert combination_is_small(Y, d, Fraction(1, 2))
        assert d[0] > 0

    def test_small_vector_is_returned_directly(self):
        Y = [(Fraction(3),), (Fraction(1, 8),)]
        assert small_combination(Y, Fraction(1, 4), SearchBudget(strategy=ENUMERATION)) == (0, 1)

    def test_budget_exhaustion(self):
        Y = [(Fraction(5, 2),), (Fraction(1),)]
        with pytest.raises(BudgetExhausted):
            small_combination(Y, Fraction(1, 2), SearchBudget(strategy=ENUMERATION, timeout_steps=1))

    def test_exact_relation_when_lattice_candidates_miss(self):
        Y = [(Fraction(2, 5), Fraction(1)), (Fraction(1, 3), Fraction(0)), (Fraction(1), Fraction(1))]
        with patch('core.services.unimodular._lll_candidates', return_value=[]):
            d = small_combination(Y, Fraction(1, 1000), SearchBudget(strategy=LLL))
        assert combination_is_small(Y, d, Fraction(0))

    def test_enumeration_fallback_is_logged(self):
        Y = [(Fraction(5, 2),)]
        with patch('core.services.unimodular._lll_candidates', return_value=[]), \
                patch('core.services.unimodular.logger') as mock_logger:
            with pytest.raises(BudgetExhausted):
                small_combination(Y, Fraction(1, 2), SearchBudget(strategy=LLL, pigeonhole_k=3))
        mock_logger.warning.assert_called_once()

    def test_unknown_strategy(self):
        with pytest.raises(InputError):
            SearchBudget(strategy='guess')

    def test_pigeonhole_bound(self):
        assert SearchBudget.pigeonhole_bound(2, 1, Fraction(1), Fraction(1, 4)) == 17


class TestShrinkColumns:
    """Tests for fronting_matrix and shrink_columns."""

    @pytest.mark.parametrize('strategy', [ENUMERATION, LLL])
    def test_one_by_two_example(self, strategy):
        X = RationalMatrix.parse([['5/2', 1]])
        A = shrink_columns(X, Fraction(1, 2), SearchBudget(strategy=strategy))
        assert A.to_list() == [[1, 0], [-2, 1]]
        assert X.times(A).rows == ((Fraction(1, 2), Fraction(1)),)

    def test_already_small_is_identity(self):
        X = RationalMatrix.parse([['1/4', 3]])
        assert shrink_columns(X, Fraction(1, 2)).is_identity()

    def test_two_by_four(self):
        X = RationalMatrix.parse([['7/8', '-3/2', '5/3', '1/5'], ['2/7', '11/6', '-4/3', '3/4']])
        eps = Fraction(1, 3)
        A = shrink_columns(X, eps)
        assert A.det() == 1
        XA = X.times(A)
        assert all(abs(x) <= eps for row in XA.rows for x in row[:2])

    def test_shape_must_be_n_by_2n(self):
        with pytest.raises(InputError):
            shrink_columns(RationalMatrix.parse([[1, 2, 3], [4, 5, 6]]), Fraction(1, 3))

    @pytest.mark.parametrize('small', [[1], [2], [1, 3], [0, 2]])
    def test_fronting_matrix_keeps_determinant(self, small):
        P = fronting_matrix(small, 4)
        assert P.det() == 1
        X = RationalMatrix(((Fraction(1), Fraction(2), Fraction(3), Fraction(4)),))
        front = X.times(P).rows[0][:len(small)]
        assert [abs(v) for v in front] == [abs(X.rows[0][j]) for j in small]


class TestTorusAbsorb:
    """Tests for torus_absorb and block-diagonal lifts."""

    def test_single_point_on_one_coordinate(self):
        x = TorusPoint((Fraction(2, 5), Fraction(1, 3)))
        A = torus_absorb([x], [0], Fraction(1, 10))
        image = TorusPoint(A.act(x.coords))
        assert nbhd_member(RationalTorus(2), EpsBox(Fraction(1, 10), (0,)), image)

    def test_two_points_in_dimension_four(self):
        points = [TorusPoint((Fraction(1, 2), Fraction(1, 3), Fraction(2, 7), Fraction(5, 6))),
                  TorusPoint((Fraction(3, 8), Fraction(0), Fraction(1, 4), Fraction(2, 3)))]
        box = EpsBox(Fraction(1, 5), (0, 1))
        A = torus_absorb(points, box.coords, box.eps)
        assert A.det() == 1
        for p in points:
            assert nbhd_member(RationalTorus(4), box, TorusPoint(A.act(p.coords)))

    def test_dimension_too_small(self):
        points = [TorusPoint((Fraction(1, 2), Fraction(1, 2))), TorusPoint((Fraction(1, 3), Fraction(1, 3)))]
        with pytest.raises(DimensionTooSmall):
            torus_absorb(points, None, Fraction(1, 10))

    def test_block_diagonal_lift(self):
        A = UnimodularMatrix([[5, 1], [-6, -1]])
        lifted = block_diagonal_lift(A, 3)
        assert lifted.size == 6
        assert lifted.det() == 1


class TestRegistry:
    """Tests for the absorbing-family registry."""

    def test_seed_is_reused(self):
        seed = UnimodularMatrix([[5, 1], [-6, -1]])
        registry = AbsorbingFamilyRegistry(2, [seed])
        x = TorusPoint((Fraction(2, 5), Fraction(1, 3)))
        alpha = registry.absorb([x], EpsBox(Fraction(1, 10)))
        assert alpha == MatrixAut(seed.inverse())
        assert aut_act(alpha, x, 'inverse') == TorusPoint((Fraction(0), Fraction(1, 15)))
        assert len(registry.entries) == 3

    def test_new_entries_are_appended_once(self):
        registry = AbsorbingFamilyRegistry(2)
        x = TorusPoint((Fraction(2, 5), Fraction(1, 3)))
        box = EpsBox(Fraction(1, 10), (0,))
        first = registry.absorb([x], box)
        second = registry.absorb([x], box)
        assert first is second
        assert len(registry.entries) == 2

    def test_concurrent_duplicate_queries_store_one_entry(self):
        registry = AbsorbingFamilyRegistry(2)
        x = TorusPoint((Fraction(2, 5), Fraction(1, 3)))
        box = EpsBox(Fraction(1, 10), (0,))
        start = threading.Barrier(8)

        def query():
            start.wait(timeout=30)
            return registry.absorb([x], box)

        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(lambda _: query(), range(8)))
        assert all(alpha is results[0] for alpha in results)
        entries = registry.entries
        assert len(entries) == 2
        assert len(set(entries)) == len(entries)
        assert nbhd_member(RationalTorus(2), box, aut_act(results[0], x, 'inverse'))

    def test_registry_ids_are_stable(self):
        seed = UnimodularMatrix([[5, 1], [-6, -1]])
        assert registry_id_for(2, [seed]) == registry_id_for(2, [UnimodularMatrix([[5, 1], [-6, -1]])])
        assert registry_id_for(2, [seed]) != registry_id_for(2, [])
        assert registry_id_for(2, []).startswith('torus-2-')

    def test_absorb_needs_a_box(self):
        with pytest.raises(InputError):
            AbsorbingFamilyRegistry(2).absorb([TorusPoint((Fraction(1, 2), Fraction(0)))], None)
