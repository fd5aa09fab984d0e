"""
Exact Matrix Module
-------------------
Rational and unimodular integer matrices backed by sympy's DomainMatrix.

This module provides:
- RationalMatrix: rectangular matrices with exact rational entries
- UnimodularMatrix: square integer matrices with determinant exactly +1
- Conversion helpers between Fraction and the sympy ZZ/QQ domains

Dependencies:
- sympy: DomainMatrix over ZZ/QQ for determinants, inverses and products
"""

import logging
from math import lcm
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from core.utils.error_handlers import InputError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


class NonInvertibleMatrix(InputError):
    """Raised when an integer matrix has determinant other than +1 or -1."""
    pass


class NotUnimodular(InputError):
    """Raised when a matrix is not square or its determinant is not exactly +1."""
    pass


def parse_rational(value: Union[int, str, Fraction]) -> Fraction:
    """Parse an int, a Fraction or a "p/q" string into a Fraction."""
    if isinstance(value, bool):
        raise InputError(f"Expected a rational number, got boolean {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"Invalid rational literal {value!r}") from exc
    raise InputError(f"Expected a rational number, got {type(value).__name__}")


def qq_to_fraction(value) -> Fraction:
    """Convert a sympy QQ (or ZZ) domain element to a Fraction."""
    return Fraction(int(QQ.numer(QQ.convert(value))), int(QQ.denom(QQ.convert(value))))


def integer_domain(rows: Sequence[Sequence[int]]) -> DomainMatrix:
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    return DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], (n_rows, n_cols), ZZ)


def rational_domain(rows: Sequence[Sequence[Fraction]]) -> DomainMatrix:
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    return DomainMatrix(
        [[QQ(x.numerator, x.denominator) for x in row] for row in rows],
        (n_rows, n_cols),
        QQ,
    )


def integer_determinant(rows: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (fraction-free elimination inside sympy)."""
    return int(integer_domain(rows).det())


def _int_rows(dm: DomainMatrix) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in dm.to_list())


@dataclass(frozen=True)
class UnimodularMatrix:
    """
    Square integer matrix in SL(m, Z).

    The determinant is validated on construction; products and inverses of
    validated matrices skip the re-check.
    """

    rows: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.rows)
        object.__setattr__(self, 'rows', rows)
        size = len(rows)
        if size == 0 or any(len(row) != size for row in rows):
            raise NotUnimodular("A unimodular matrix must be square and non-empty",
                                {'shape': [len(row) for row in rows]})
        det = integer_determinant(rows)
        if det == -1:
            raise NotUnimodular("Matrix has determinant -1; SL requires +1", {'rows': rows})
        if det != 1:
            raise NonInvertibleMatrix(f"Matrix has determinant {det}", {'rows': rows})

    @classmethod
    def _trusted(cls, rows: Iterable[Iterable[int]]) -> 'UnimodularMatrix':
        instance = object.__new__(cls)
        object.__setattr__(instance, 'rows', tuple(tuple(int(x) for x in row) for row in rows))
        return instance

    @classmethod
    def identity(cls, size: int) -> 'UnimodularMatrix':
        return cls._trusted([[1 if i == j else 0 for j in range(size)] for i in range(size)])

    @property
    def size(self) -> int:
        return len(self.rows)

    def to_domain(self) -> DomainMatrix:
        return integer_domain(self.rows)

    def det(self) -> int:
        return integer_determinant(self.rows)

    def is_identity(self) -> bool:
        return self == UnimodularMatrix.identity(self.size)

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(row[j] for row in self.rows)

    def matmul(self, other: 'UnimodularMatrix') -> 'UnimodularMatrix':
        if other.size != self.size:
            raise NotUnimodular("Size mismatch in matrix product",
                                {'left': self.size, 'right': other.size})
        return UnimodularMatrix._trusted(_int_rows(self.to_domain().matmul(other.to_domain())))

    def inverse(self) -> 'UnimodularMatrix':
        inverse = self.to_domain().convert_to(QQ).inv()
        rows = []
        for row in inverse.to_list():
            values = [qq_to_fraction(x) for x in row]
            if any(v.denominator != 1 for v in values):
                raise NonInvertibleMatrix("Inverse is not integral", {'rows': self.rows})
            rows.append([v.numerator for v in values])
        return UnimodularMatrix._trusted(rows)

    def power(self, exponent: int) -> 'UnimodularMatrix':
        base = self if exponent >= 0 else self.inverse()
        result = UnimodularMatrix.identity(self.size)
        for _ in range(abs(exponent)):
            result = result.matmul(base)
        return result

    def act(self, vector: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        """Row vector times matrix: (v A)_j = sum_i v_i A_ij."""
        if len(vector) != self.size:
            raise InputError("Vector length does not match matrix size",
                             {'vector': len(vector), 'matrix': self.size})
        return tuple(
            sum((Fraction(vector[i]) * self.rows[i][j] for i in range(self.size)), Fraction(0))
            for j in range(self.size)
        )

    def to_list(self) -> List[List[int]]:
        return [list(row) for row in self.rows]


@dataclass(frozen=True)
class RationalMatrix:
    """Rectangular n x m matrix with exact rational entries."""

    rows: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.rows)
        object.__setattr__(self, 'rows', rows)
        if not rows or not rows[0]:
            raise InputError("A rational matrix needs at least one row and one column")
        if any(len(row) != len(rows[0]) for row in rows):
            raise InputError("Rational matrix rows have different lengths",
                             {'lengths': [len(row) for row in rows]})

    @classmethod
    def parse(cls, rows: Sequence[Sequence[Union[int, str, Fraction]]]) -> 'RationalMatrix':
        return cls(tuple(tuple(parse_rational(x) for x in row) for row in rows))

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.rows[0])

    def column(self, j: int) -> Tuple[Fraction, ...]:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> List[Tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.n_cols)]

    def times(self, matrix: UnimodularMatrix) -> 'RationalMatrix':
        """Exact product X A for an integer matrix A of matching size."""
        if matrix.size != self.n_cols:
            raise InputError("Matrix product shape mismatch",
                             {'cols': self.n_cols, 'size': matrix.size})
        product = rational_domain(self.rows).matmul(matrix.to_domain().convert_to(QQ))
        return RationalMatrix(tuple(tuple(qq_to_fraction(x) for x in row) for row in product.to_list()))

    def max_abs(self) -> Fraction:
        return max(abs(x) for row in self.rows for x in row)

    def lcm_denominator(self) -> int:
        return lcm(*(x.denominator for row in self.rows for x in row))


def block_diagonal(*blocks: Sequence[Sequence[int]]) -> List[List[int]]:
    """Integer block-diagonal matrix from square blocks."""
    size = sum(len(block) for block in blocks)
    result = [[0] * size for _ in range(size)]
    offset = 0
    for block in blocks:
        for i, row in enumerate(block):
            for j, value in enumerate(row):
                result[offset + i][offset + j] = int(value)
        offset += len(block)
    return result


def permutation_rows(order: Sequence[int]) -> List[List[int]]:
    """
    Column-permutation matrix P with (X P)[:, new] = X[:, order[new]].
    """
    size = len(order)
    rows = [[0] * size for _ in range(size)]
    for new, old in enumerate(order):
        rows[old][new] = 1
    return rows
