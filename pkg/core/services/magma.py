"""
Magma Core Module
-----------------
Element model, composable magma descriptors, unit neighborhoods and
automorphism actions shared by every other service module.

This module provides:
- Element types (finite atoms, rational vectors, torus points, pairs)
- Magma descriptors (finite tables, vector groups, tori, HM0, semidirect products)
- Neighborhood specifications and exact membership
- Automorphisms, their composition, inversion, powers and action

All scalars are Fractions; nothing on this path uses floating point.
Step functions live in `core.services.hm` and semidirect multiplication in
`core.services.semidirect`; both are imported lazily to avoid circular imports.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

from core.utils.error_handlers import InputError, SemanticFailure
from .lattice import UnimodularMatrix

logger = logging.getLogger(__name__)

FORWARD = 'forward'
INVERSE = 'inverse'


class ShapeMismatch(InputError):
    """Raised when an element or neighborhood does not fit its magma descriptor."""
    pass


class UnitLawViolation(InputError):
    """Raised when the declared unit of a finite table is not a two-sided unit."""
    pass


class UnknownSymbol(InputError):
    """Raised when a finite table mentions a symbol outside its element list."""
    pass


class NotAnAutomorphism(InputError):
    """Raised when a proposed permutation is not a unit-fixing bijective homomorphism."""
    pass


class NoInverse(SemanticFailure):
    """Raised when an element has no two-sided inverse (non-group base)."""
    pass


# --- Elements ---

@dataclass(frozen=True)
class FiniteAtom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class RationalVector:
    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coords', tuple(Fraction(c) for c in self.coords))


@dataclass(frozen=True)
class TorusPoint:
    """Point of the rational torus; coordinates are kept in [0, 1)."""

    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coords', tuple(Fraction(c) % 1 for c in self.coords))


@dataclass(frozen=True)
class Pair:
    """Element (x, h) of a semidirect product; h is an integer or an automorphism."""

    left: Any
    right: Any


# --- Magma descriptors ---

@dataclass(frozen=True)
class FiniteMagma:
    elements: Tuple[str, ...]
    table: Tuple[Tuple[str, ...], ...]
    unit: str
    is_associative: bool = field(default=False, compare=False)

    @cached_property
    def index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.elements)}

    def multiply(self, a: str, b: str) -> str:
        return self.table[self.index[a]][self.index[b]]


@dataclass(frozen=True)
class RationalVectorGroup:
    dim: int


@dataclass(frozen=True)
class RationalTorus:
    dim: int


@dataclass(frozen=True)
class HM0Of:
    base: Any
    squeeze: Any


@dataclass(frozen=True)
class SemidirectZ:
    """X x_alpha Z; `generator` is the automorphism alpha of the base."""

    base: Any
    generator: Any


@dataclass(frozen=True)
class SemidirectAut:
    """X x H for a registry-grown countable subgroup H of SL(d, Z)."""

    base: Any
    registry_id: str


MagmaDescriptor = Union[FiniteMagma, RationalVectorGroup, RationalTorus, HM0Of, SemidirectZ, SemidirectAut]


# --- Neighborhoods of the unit ---

@dataclass(frozen=True)
class EpsBox:
    """Max-norm box of radius eps, optionally restricted to a coordinate set."""

    eps: Fraction
    coords: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'eps', Fraction(self.eps))
        if self.eps <= 0:
            raise InputError("EpsBox radius must be positive", {'eps': self.eps})
        if self.coords is not None:
            object.__setattr__(self, 'coords', tuple(sorted(set(int(c) for c in self.coords))))


@dataclass(frozen=True)
class Subset:
    members: FrozenSet[Any]

    def __post_init__(self):
        object.__setattr__(self, 'members', frozenset(self.members))


@dataclass(frozen=True)
class HMSubbasic:
    """N(inner, a, b; eps) = {f : measure([a, b) minus f^-1(inner)) < eps}."""

    inner: Any
    a: Fraction
    b: Fraction
    eps: Fraction

    def __post_init__(self):
        for name in ('a', 'b', 'eps'):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not (0 <= self.a < self.b <= 1):
            raise InputError("Subbasic interval must satisfy 0 <= a < b <= 1",
                             {'a': self.a, 'b': self.b})
        if self.eps <= 0:
            raise InputError("Subbasic eps must be positive", {'eps': self.eps})


@dataclass(frozen=True)
class Intersection:
    parts: Tuple[Any, ...]

    def __post_init__(self):
        object.__setattr__(self, 'parts', tuple(self.parts))
        if not self.parts:
            raise InputError("Intersection needs at least one part")


@dataclass(frozen=True)
class ProductDiscrete:
    """Neighborhood base x {unit} of a semidirect product with discrete right factor."""

    base: Any


@dataclass(frozen=True)
class WholeSpace:
    pass


NeighborhoodSpec = Union[EpsBox, Subset, HMSubbasic, Intersection, ProductDiscrete, WholeSpace]


# --- Automorphisms ---

@dataclass(frozen=True)
class FinitePermutation:
    mapping: Tuple[Tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, 'mapping', tuple(sorted((str(a), str(b)) for a, b in self.mapping)))

    @cached_property
    def forward_map(self) -> Dict[str, str]:
        return dict(self.mapping)

    @cached_property
    def inverse_map(self) -> Dict[str, str]:
        return {b: a for a, b in self.mapping}


@dataclass(frozen=True)
class MatrixAut:
    """Automorphism v -> v A (mod 1 on tori) for A in SL(d, Z)."""

    matrix: UnimodularMatrix


@dataclass(frozen=True)
class SqueezePower:
    """The k-th power of gamma -> gamma o s on HM0."""

    k: int
    squeeze: Any


@dataclass(frozen=True)
class ScalingPower:
    """The k-th power of v -> factor * v on a rational vector group."""

    k: int
    factor: int = 2

    def __post_init__(self):
        if int(self.factor) < 2:
            raise InputError("Scaling factor must be an integer >= 2", {'factor': self.factor})


@dataclass(frozen=True)
class Composite:
    """Composition parts[0] o parts[1] o ...; the empty composite is the identity."""

    parts: Tuple[Any, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'parts', tuple(self.parts))


Automorphism = Union[FinitePermutation, MatrixAut, SqueezePower, ScalingPower, Composite]
IDENTITY = Composite(())


# --- Construction helpers ---

def mk_finite_magma(elements: Sequence[str], table: Sequence[Sequence[str]], unit: str) -> FiniteMagma:
    """
    Validate a finite multiplication table and build its descriptor.

    Args:
        elements: Symbol list
        table: |X| x |X| symbol matrix, table[i][j] = elements[i] * elements[j]
        unit: The claimed two-sided unit

    Returns:
        FiniteMagma with the `is_associative` flag computed by an exhaustive triple scan

    Raises:
        UnknownSymbol: If the table or unit mention a symbol outside `elements`
        UnitLawViolation: If unit*x != x or x*unit != x for some x
    """
    elements = tuple(str(e) for e in elements)
    if not elements:
        raise InputError("A finite magma needs at least one element")
    if len(set(elements)) != len(elements):
        raise InputError("Duplicate symbols in element list", {'elements': elements})
    if len(table) != len(elements) or any(len(row) != len(elements) for row in table):
        raise ShapeMismatch("Table dimensions must equal |elements|^2",
                            {'elements': len(elements), 'rows': len(table)})
    table = tuple(tuple(str(v) for v in row) for row in table)
    known = set(elements)
    for row in table:
        for value in row:
            if value not in known:
                raise UnknownSymbol(f"Table mentions unknown symbol {value!r}", {'symbol': value})
    unit = str(unit)
    if unit not in known:
        raise UnknownSymbol(f"Unit {unit!r} is not an element", {'symbol': unit})

    u = elements.index(unit)
    for i, name in enumerate(elements):
        if table[u][i] != name or table[i][u] != name:
            raise UnitLawViolation(f"{unit!r} is not a two-sided unit for {name!r}",
                                   {'unit': unit, 'element': name})

    index = {name: i for i, name in enumerate(elements)}
    associative = all(
        table[index[table[i][j]]][k] == table[i][index[table[j][k]]]
        for i, j, k in itertools.product(range(len(elements)), repeat=3)
    )
    logger.debug("Built finite magma with %s elements (associative=%s)", len(elements), associative)
    return FiniteMagma(elements, table, unit, is_associative=associative)


def cyclic_magma(order: int) -> FiniteMagma:
    """Additive cyclic group Z/order with symbols '0', ..., 'order-1'."""
    if order < 1:
        raise InputError("Cyclic order must be positive", {'order': order})
    names = [str(i) for i in range(order)]
    table = [[str((i + j) % order) for j in range(order)] for i in range(order)]
    return mk_finite_magma(names, table, '0')


def label(M: MagmaDescriptor) -> str:
    """Short human-readable name of a descriptor, for logs and reports."""
    if isinstance(M, FiniteMagma):
        return f"Finite[{len(M.elements)}]"
    if isinstance(M, RationalVectorGroup):
        return f"Q^{M.dim}"
    if isinstance(M, RationalTorus):
        return f"T^{M.dim}"
    if isinstance(M, HM0Of):
        return f"HM0({label(M.base)})"
    if isinstance(M, SemidirectZ):
        return f"{label(M.base)} x| Z"
    if isinstance(M, SemidirectAut):
        return f"{label(M.base)} x| H[{M.registry_id}]"
    return type(M).__name__


def is_finite(M: MagmaDescriptor) -> bool:
    return isinstance(M, FiniteMagma)


def enumerate_elements(M: MagmaDescriptor) -> List[Any]:
    if not isinstance(M, FiniteMagma):
        raise ShapeMismatch(f"Cannot enumerate the elements of {label(M)}")
    return [FiniteAtom(name) for name in M.elements]


# --- Element checks and the operation ---

def unit_of(M: MagmaDescriptor) -> Any:
    if isinstance(M, FiniteMagma):
        return FiniteAtom(M.unit)
    if isinstance(M, RationalVectorGroup):
        return RationalVector((Fraction(0),) * M.dim)
    if isinstance(M, RationalTorus):
        return TorusPoint((Fraction(0),) * M.dim)
    if isinstance(M, HM0Of):
        from . import hm
        return hm.hm_unit(M.base)
    if isinstance(M, (SemidirectZ, SemidirectAut)):
        return Pair(unit_of(M.base), discrete_unit(M))
    raise ShapeMismatch(f"Unknown magma descriptor {type(M).__name__}")


def discrete_unit(M: MagmaDescriptor) -> Any:
    """Unit of the discrete right factor of a semidirect product."""
    if isinstance(M, SemidirectZ):
        return 0
    if isinstance(M, SemidirectAut):
        return MatrixAut(UnimodularMatrix.identity(_torus_dim(M)))
    raise ShapeMismatch(f"{label(M)} has no discrete right factor")


def _torus_dim(M: SemidirectAut) -> int:
    if not isinstance(M.base, (RationalTorus, RationalVectorGroup)):
        raise ShapeMismatch("Semidirect products with SL(d, Z) need a torus or vector base")
    return M.base.dim


def check_element(M: MagmaDescriptor, x: Any) -> None:
    """Raise ShapeMismatch unless x is an element of M."""
    if isinstance(M, FiniteMagma):
        if not isinstance(x, FiniteAtom) or x.name not in M.index:
            raise ShapeMismatch(f"{x!r} is not an element of {label(M)}")
    elif isinstance(M, RationalVectorGroup):
        if not isinstance(x, RationalVector) or len(x.coords) != M.dim:
            raise ShapeMismatch(f"{x!r} is not a vector of {label(M)}")
    elif isinstance(M, RationalTorus):
        if not isinstance(x, TorusPoint) or len(x.coords) != M.dim:
            raise ShapeMismatch(f"{x!r} is not a point of {label(M)}")
    elif isinstance(M, HM0Of):
        from . import hm
        if not isinstance(x, hm.StepFunction) or x.base != M.base:
            raise ShapeMismatch(f"Expected a step function over {label(M.base)}")
        if x.pieces[0][1] != unit_of(M.base):
            raise ShapeMismatch("Step function is not in HM0: its value at 0 is not the unit")
        for _, value in x.pieces:
            check_element(M.base, value)
    elif isinstance(M, SemidirectZ):
        if not isinstance(x, Pair) or isinstance(x.right, bool) or not isinstance(x.right, int):
            raise ShapeMismatch(f"Expected a pair (x, n) of {label(M)}")
        check_element(M.base, x.left)
    elif isinstance(M, SemidirectAut):
        if not isinstance(x, Pair) or not isinstance(x.right, MatrixAut) \
                or x.right.matrix.size != _torus_dim(M):
            raise ShapeMismatch(f"Expected a pair (x, A) of {label(M)}")
        check_element(M.base, x.left)
    else:
        raise ShapeMismatch(f"Unknown magma descriptor {type(M).__name__}")


def op_apply(M: MagmaDescriptor, x: Any, y: Any) -> Any:
    """The binary operation x * y of M."""
    check_element(M, x)
    check_element(M, y)
    if isinstance(M, FiniteMagma):
        return FiniteAtom(M.multiply(x.name, y.name))
    if isinstance(M, RationalVectorGroup):
        return RationalVector(tuple(a + b for a, b in zip(x.coords, y.coords)))
    if isinstance(M, RationalTorus):
        return TorusPoint(tuple(a + b for a, b in zip(x.coords, y.coords)))
    if isinstance(M, HM0Of):
        from . import hm
        return hm.hm_product(x, y)
    from . import semidirect
    return semidirect.sd_multiply(M, x, y)


def element_inverse(M: MagmaDescriptor, x: Any) -> Any:
    """Two-sided inverse of x; raises NoInverse for non-group bases."""
    check_element(M, x)
    if isinstance(M, FiniteMagma):
        if not M.is_associative:
            raise NoInverse(f"{label(M)} is not associative, so it is not a group")
        for candidate in M.elements:
            if M.multiply(x.name, candidate) == M.unit and M.multiply(candidate, x.name) == M.unit:
                return FiniteAtom(candidate)
        raise NoInverse(f"{x.name!r} has no inverse in {label(M)}")
    if isinstance(M, RationalVectorGroup):
        return RationalVector(tuple(-c for c in x.coords))
    if isinstance(M, RationalTorus):
        return TorusPoint(tuple(-c for c in x.coords))
    if isinstance(M, HM0Of):
        from . import hm
        return hm.hm_inverse(x)
    from . import semidirect
    return semidirect.sd_invert(M, x)


# --- Neighborhoods ---

def check_nbhd(M: MagmaDescriptor, U: NeighborhoodSpec) -> None:
    """Raise ShapeMismatch unless U is structurally compatible with M."""
    if isinstance(U, WholeSpace):
        return
    if isinstance(U, EpsBox):
        if not isinstance(M, (RationalVectorGroup, RationalTorus)):
            raise ShapeMismatch(f"EpsBox does not apply to {label(M)}")
        if U.coords is not None and any(c < 0 or c >= M.dim for c in U.coords):
            raise ShapeMismatch("EpsBox coordinate index out of range", {'coords': U.coords})
    elif isinstance(U, Subset):
        for member in U.members:
            check_element(M, member)
    elif isinstance(U, HMSubbasic):
        if not isinstance(M, HM0Of):
            raise ShapeMismatch(f"HM subbasic set does not apply to {label(M)}")
        check_nbhd(M.base, U.inner)
    elif isinstance(U, Intersection):
        for part in U.parts:
            check_nbhd(M, part)
    elif isinstance(U, ProductDiscrete):
        if not isinstance(M, (SemidirectZ, SemidirectAut)):
            raise ShapeMismatch(f"ProductDiscrete does not apply to {label(M)}")
        check_nbhd(M.base, U.base)
    else:
        raise ShapeMismatch(f"Unknown neighborhood {type(U).__name__}")


def _torus_distance(c: Fraction) -> Fraction:
    return min(c, 1 - c)


def nbhd_member(M: MagmaDescriptor, U: NeighborhoodSpec, x: Any) -> bool:
    """Exact membership of x in the neighborhood U of M."""
    check_nbhd(M, U)
    check_element(M, x)
    if isinstance(U, WholeSpace):
        return True
    if isinstance(U, EpsBox):
        indices = range(M.dim) if U.coords is None else U.coords
        if isinstance(M, RationalTorus):
            return all(_torus_distance(x.coords[i]) <= U.eps for i in indices)
        return all(abs(x.coords[i]) <= U.eps for i in indices)
    if isinstance(U, Subset):
        return x in U.members
    if isinstance(U, HMSubbasic):
        from . import hm
        return hm.hm_nbhd_member(x, U)
    if isinstance(U, Intersection):
        return all(nbhd_member(M, part, x) for part in U.parts)
    # ProductDiscrete
    return x.right == discrete_unit(M) and nbhd_member(M.base, U.base, x.left)


def nbhd_contains_unit(M: MagmaDescriptor, U: NeighborhoodSpec) -> bool:
    return nbhd_member(M, U, unit_of(M))


def nbhd_intersect(U1: NeighborhoodSpec, U2: NeighborhoodSpec,
                   M: Optional[MagmaDescriptor] = None) -> NeighborhoodSpec:
    """
    Neighborhood whose membership is the conjunction of U1 and U2.

    EpsBox pairs over the same coordinates fuse to the smaller radius, Subset
    pairs fuse to the set intersection; anything else becomes an Intersection.
    """
    if M is not None:
        check_nbhd(M, U1)
        check_nbhd(M, U2)
    if isinstance(U1, WholeSpace):
        return U2
    if isinstance(U2, WholeSpace):
        return U1
    if isinstance(U1, EpsBox) and isinstance(U2, EpsBox) and U1.coords == U2.coords:
        return EpsBox(min(U1.eps, U2.eps), U1.coords)
    if isinstance(U1, Subset) and isinstance(U2, Subset):
        return Subset(U1.members & U2.members)
    if isinstance(U1, ProductDiscrete) and isinstance(U2, ProductDiscrete):
        return ProductDiscrete(nbhd_intersect(U1.base, U2.base))
    parts = []
    for spec in (U1, U2):
        parts.extend(spec.parts if isinstance(spec, Intersection) else [spec])
    return Intersection(tuple(parts))


# --- Automorphisms ---

def mk_finite_permutation(M: FiniteMagma, mapping: Mapping[str, str]) -> FinitePermutation:
    """
    Validate a symbol map as an automorphism of a finite magma.

    Raises:
        NotAnAutomorphism: If the map is not a bijection of M, moves the unit,
            or fails x*y -> f(x)*f(y) for some pair
    """
    if not isinstance(M, FiniteMagma):
        raise ShapeMismatch("Permutation automorphisms need a finite magma")
    mapping = {str(k): str(v) for k, v in mapping.items()}
    if set(mapping) != set(M.elements) or set(mapping.values()) != set(M.elements):
        raise NotAnAutomorphism("Map is not a bijection of the element set")
    if mapping[M.unit] != M.unit:
        raise NotAnAutomorphism("Automorphisms must fix the unit", {'unit': M.unit})
    for a, b in itertools.product(M.elements, repeat=2):
        if mapping[M.multiply(a, b)] != M.multiply(mapping[a], mapping[b]):
            raise NotAnAutomorphism("Map does not preserve the operation",
                                    {'pair': (a, b)})
    return FinitePermutation(tuple(mapping.items()))


def aut_act(alpha: Automorphism, x: Any, direction: str = FORWARD) -> Any:
    """
    Apply alpha (direction='forward') or its inverse (direction='inverse') to x.
    """
    if direction not in (FORWARD, INVERSE):
        raise InputError(f"Unknown direction {direction!r}")
    forward = direction == FORWARD

    if isinstance(alpha, FinitePermutation):
        table = alpha.forward_map if forward else alpha.inverse_map
        if not isinstance(x, FiniteAtom) or x.name not in table:
            raise ShapeMismatch(f"Permutation does not act on {x!r}")
        return FiniteAtom(table[x.name])

    if isinstance(alpha, MatrixAut):
        matrix = alpha.matrix if forward else alpha.matrix.inverse()
        if isinstance(x, TorusPoint) and len(x.coords) == matrix.size:
            return TorusPoint(matrix.act(x.coords))
        if isinstance(x, RationalVector) and len(x.coords) == matrix.size:
            return RationalVector(matrix.act(x.coords))
        raise ShapeMismatch(f"Matrix automorphism of size {matrix.size} does not act on {x!r}")

    if isinstance(alpha, SqueezePower):
        from . import hm
        if not isinstance(x, hm.StepFunction):
            raise ShapeMismatch("Squeeze powers act on step functions only")
        return hm.alpha_apply(x, alpha.k if forward else -alpha.k, alpha.squeeze)

    if isinstance(alpha, ScalingPower):
        if not isinstance(x, RationalVector):
            raise ShapeMismatch("Scaling powers act on rational vectors only")
        scale = Fraction(alpha.factor) ** (alpha.k if forward else -alpha.k)
        return RationalVector(tuple(scale * c for c in x.coords))

    if isinstance(alpha, Composite):
        parts = reversed(alpha.parts) if forward else alpha.parts
        for part in parts:
            x = aut_act(part, x, direction)
        return x

    raise ShapeMismatch(f"Unknown automorphism {type(alpha).__name__}")


def aut_inverse(alpha: Automorphism) -> Automorphism:
    if isinstance(alpha, FinitePermutation):
        return FinitePermutation(tuple((b, a) for a, b in alpha.mapping))
    if isinstance(alpha, MatrixAut):
        return MatrixAut(alpha.matrix.inverse())
    if isinstance(alpha, SqueezePower):
        return SqueezePower(-alpha.k, alpha.squeeze)
    if isinstance(alpha, ScalingPower):
        return ScalingPower(-alpha.k, alpha.factor)
    if isinstance(alpha, Composite):
        return Composite(tuple(aut_inverse(part) for part in reversed(alpha.parts)))
    raise ShapeMismatch(f"Unknown automorphism {type(alpha).__name__}")


def aut_compose(alpha: Automorphism, beta: Automorphism) -> Automorphism:
    """alpha o beta (apply beta first)."""
    if isinstance(alpha, Composite) and not alpha.parts:
        return beta
    if isinstance(beta, Composite) and not beta.parts:
        return alpha
    if isinstance(alpha, MatrixAut) and isinstance(beta, MatrixAut):
        # alpha(beta(v)) = (v B) A = v (B A)
        return MatrixAut(beta.matrix.matmul(alpha.matrix))
    if isinstance(alpha, SqueezePower) and isinstance(beta, SqueezePower) \
            and alpha.squeeze == beta.squeeze:
        return SqueezePower(alpha.k + beta.k, alpha.squeeze)
    if isinstance(alpha, ScalingPower) and isinstance(beta, ScalingPower) \
            and alpha.factor == beta.factor:
        return ScalingPower(alpha.k + beta.k, alpha.factor)
    if isinstance(alpha, FinitePermutation) and isinstance(beta, FinitePermutation):
        first, second = beta.forward_map, alpha.forward_map
        return FinitePermutation(tuple((a, second[first[a]]) for a in first))
    parts = []
    for part in (alpha, beta):
        parts.extend(part.parts if isinstance(part, Composite) else [part])
    return Composite(tuple(parts))


def aut_identity_like(alpha: Automorphism) -> Automorphism:
    if isinstance(alpha, MatrixAut):
        return MatrixAut(UnimodularMatrix.identity(alpha.matrix.size))
    if isinstance(alpha, SqueezePower):
        return SqueezePower(0, alpha.squeeze)
    if isinstance(alpha, ScalingPower):
        return ScalingPower(0, alpha.factor)
    if isinstance(alpha, FinitePermutation):
        return FinitePermutation(tuple((a, a) for a, _ in alpha.mapping))
    return IDENTITY


def aut_power(alpha: Automorphism, n: int) -> Automorphism:
    """alpha^n for any integer n."""
    if isinstance(alpha, SqueezePower):
        return SqueezePower(alpha.k * n, alpha.squeeze)
    if isinstance(alpha, ScalingPower):
        return ScalingPower(alpha.k * n, alpha.factor)
    if isinstance(alpha, MatrixAut):
        return MatrixAut(alpha.matrix.power(n))
    base = alpha if n >= 0 else aut_inverse(alpha)
    result = aut_identity_like(alpha)
    for _ in range(abs(n)):
        result = aut_compose(result, base)
    return result
