"""
Shared fixtures for the core test-suite.
"""

from fractions import Fraction

import pytest

from core.services.hm import hm_embed
from core.services.magma import FiniteAtom, HMSubbasic, ProductDiscrete, Subset, cyclic_magma, mk_finite_magma
from core.services.semidirect import build_F


@pytest.fixture
def c2():
    return cyclic_magma(2)


@pytest.fixture
def c3():
    return cyclic_magma(3)


@pytest.fixture
def c4():
    return cyclic_magma(4)


@pytest.fixture
def non_associative():
    """{e, a, b} with a*a = b, a*b = b, b*a = a, b*b = a."""
    return mk_finite_magma(
        ['e', 'a', 'b'],
        [['e', 'a', 'b'],
         ['a', 'b', 'b'],
         ['b', 'a', 'a']],
        'e',
    )


@pytest.fixture
def f_c2(c2):
    return build_F(c2)


@pytest.fixture
def i_one(c2):
    """The embedded element i_1 of HM0(C2): unit on [0, 1/2), 1 on [1/2, 1)."""
    return hm_embed(c2, FiniteAtom('1'))


@pytest.fixture
def quarter_nbhd():
    """N({0}, 0, 1; 1/4) x {0} in F(C2) or F(C3)."""
    return ProductDiscrete(HMSubbasic(Subset({FiniteAtom('0')}), Fraction(0), Fraction(1), Fraction(1, 4)))
