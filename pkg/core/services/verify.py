"""
Certificate Verification Module
-------------------------------
Exact checking of factorization certificates for every coverage mode,
plus the brute-force oracles and seeded instance generators that the
test-suite and the self-test suites cross-check against.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple

from core.utils.error_handlers import InputError
from .hm import (
    StepFunction,
    flatten_subbasic,
    hm_measure_defect,
    step_canonicalize,
)
from .lattice import RationalMatrix, UnimodularMatrix, parse_rational
from .magma import (
    EpsBox,
    FiniteMagma,
    FiniteAtom,
    HM0Of,
    HMSubbasic,
    Intersection,
    MatrixAut,
    Pair,
    ProductDiscrete,
    SemidirectAut,
    SemidirectZ,
    ShapeMismatch,
    Subset,
    TorusPoint,
    aut_compose,
    check_element,
    check_nbhd,
    cyclic_magma,
    nbhd_member,
    op_apply,
    unit_of,
)

logger = logging.getLogger(__name__)

SHAPES = ('left', 'right', 'duo', 'roelcke', 'preseparable')
CARDINALITIES = ('separable', 'precompact', 'narrow')

# Slot tags per shape, in factor order.
SLOT_LAYOUT = {
    'left': ('S', 'U'),
    'right': ('U', 'S'),
    'duo': ('S', 'U', 'S'),
    'roelcke': ('U', 'S', 'U'),
    'preseparable': ('S', 'U', 'F', 'F', 'U', 'S'),
}

CLAUSE_S = 's-membership'
CLAUSE_F = 'f-membership'
CLAUSE_U = 'u-membership'
CLAUSE_PRODUCT = 'product-mismatch'
CLAUSE_SECOND = 'second-association'
PRESEPARABLE_CLAUSES = ('s-uf', 'su-f', 'f-us', 'fu-s')

INSTANCE_KINDS = ('step-function', 'torus-point-set', 'shrink-matrix', 'certificate')
TAMPERINGS = ('element', 's1', 'u', 's2', 'neighborhood')

ORACLE_MAX_K = 100
ORACLE_MAX_CUBE = 10 ** 6


class MalformedCertificate(InputError):
    pass


class InstanceTooLarge(InputError):
    pass


class UnknownKind(InputError):
    pass


@dataclass(frozen=True)
class CoverageMode:
    shape: str = 'duo'
    cardinality: str = 'separable'

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise MalformedCertificate(f"Unknown coverage shape {self.shape!r}")
        if self.cardinality not in CARDINALITIES:
            raise MalformedCertificate(f"Unknown coverage cardinality {self.cardinality!r}")


@dataclass(frozen=True)
class WitnessCertificate:
    """
    One factorization instance: element = product of `witness` under `association`.

    `slots` tags each witness factor as S, U or F. `s_set` and `f_set` are
    explicit finite sets; without `s_set` the canonical countable set of the
    construction is used.
    """

    mode: CoverageMode
    magma: Any
    element: Any
    neighborhood: Any
    witness: Tuple[Any, ...]
    association: str = 'left'
    slots: Tuple[str, ...] = ()
    s_set: Optional[Tuple[Any, ...]] = None
    f_set: Optional[Tuple[Any, ...]] = None


@dataclass(frozen=True)
class Verdict:
    passed: bool
    clause: Optional[str] = None
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        payload = {'verdict': 'pass' if self.passed else 'fail'}
        if self.clause:
            payload['clause'] = self.clause
        if self.detail:
            payload['detail'] = {k: str(v) for k, v in self.detail.items()}
        return payload


PASS = Verdict(True)


def in_canonical_s(M, x) -> bool:
    """
    Membership in the canonical countable set S of a construction: every
    representable element of a rational or finite model, {unit} x Z for
    X x| Z, and {unit} x SL(d, Z) for X x| H.
    """
    try:
        check_element(M, x)
    except ShapeMismatch:
        return False
    if isinstance(M, (SemidirectZ, SemidirectAut)):
        return x.left == unit_of(M.base)
    return True


# --- Certificate checking ---

def _validate(c: WitnessCertificate) -> None:
    expected = SLOT_LAYOUT[c.mode.shape]
    if len(c.witness) != len(expected):
        raise MalformedCertificate(f"{c.mode.shape} certificates need {len(expected)} witness factors",
                                   {'got': len(c.witness)})
    if c.slots and tuple(c.slots) != expected:
        raise MalformedCertificate("Slot tags do not match the coverage shape",
                                   {'expected': expected, 'got': c.slots})
    if c.association not in ('left', 'right'):
        raise MalformedCertificate(f"Unknown association {c.association!r}")
    if c.mode.cardinality == 'precompact' and c.s_set is None:
        raise MalformedCertificate("Precompact certificates must list their finite set S")
    if c.mode.shape == 'preseparable' and c.f_set is None:
        raise MalformedCertificate("Preseparable certificates must list their finite set F")
    try:
        check_element(c.magma, c.element)
        for factor in c.witness:
            check_element(c.magma, factor)
        for member in (c.s_set or ()) + (c.f_set or ()):
            check_element(c.magma, member)
        check_nbhd(c.magma, c.neighborhood)
    except ShapeMismatch as exc:
        raise MalformedCertificate(f"Certificate does not fit its magma: {exc.message}") from exc
    if not nbhd_member(c.magma, c.neighborhood, unit_of(c.magma)):
        raise MalformedCertificate("Certificate neighborhood does not contain the unit")


def _product(M, factors: Sequence[Any], association: str) -> Any:
    a, b, c = factors
    if association == 'left':
        return op_apply(M, a, op_apply(M, b, c))
    return op_apply(M, op_apply(M, a, b), c)


def _other(association: str) -> str:
    return 'right' if association == 'left' else 'left'


def check_certificate(c: WitnessCertificate) -> Verdict:
    """
    Check a certificate exactly; report the first violated clause in the
    order S-membership, F-membership, U-membership, product, second association.

    Raises:
        MalformedCertificate: If the certificate does not fit its declared mode or magma
    """
    _validate(c)
    M = c.magma
    layout = SLOT_LAYOUT[c.mode.shape]

    for index, (tag, factor) in enumerate(zip(layout, c.witness)):
        if tag != 'S':
            continue
        member = factor in c.s_set if c.s_set is not None else in_canonical_s(M, factor)
        if not member:
            return Verdict(False, CLAUSE_S, {'slot': index})
    for index, (tag, factor) in enumerate(zip(layout, c.witness)):
        if tag == 'F' and factor not in c.f_set:
            return Verdict(False, CLAUSE_F, {'slot': index})
    for index, (tag, factor) in enumerate(zip(layout, c.witness)):
        if tag == 'U' and not nbhd_member(M, c.neighborhood, factor):
            return Verdict(False, CLAUSE_U, {'slot': index})

    shape = c.mode.shape
    if shape in ('left', 'right'):
        if op_apply(M, *c.witness) != c.element:
            return Verdict(False, CLAUSE_PRODUCT)
        return PASS

    if shape == 'preseparable':
        first, second = c.witness[:3], c.witness[3:]
        checks = (
            (PRESEPARABLE_CLAUSES[0], first, 'left'),
            (PRESEPARABLE_CLAUSES[1], first, 'right'),
            (PRESEPARABLE_CLAUSES[2], second, 'left'),
            (PRESEPARABLE_CLAUSES[3], second, 'right'),
        )
        for clause, factors, association in checks:
            if _product(M, factors, association) != c.element:
                return Verdict(False, clause)
        return PASS

    if _product(M, c.witness, c.association) != c.element:
        return Verdict(False, CLAUSE_PRODUCT, {'association': c.association})
    if _product(M, c.witness, _other(c.association)) != c.element:
        return Verdict(False, CLAUSE_SECOND, {'association': _other(c.association)})
    return PASS


def certificate_from_witness(M, target, neighborhood, witness) -> WitnessCertificate:
    """Duo-separable certificate for a DuoWitness."""
    return WitnessCertificate(
        mode=CoverageMode('duo', 'separable'),
        magma=M,
        element=target,
        neighborhood=neighborhood,
        witness=(witness.s1, witness.u, witness.s2),
        association=witness.association,
        slots=SLOT_LAYOUT['duo'],
    )


# --- Tampering ---

def _shear(size: int) -> MatrixAut:
    rows = [[1 if i == j else 0 for j in range(size)] for i in range(size)]
    rows[0][1] += 1
    return MatrixAut(UnimodularMatrix(rows))


def _bump(right):
    if isinstance(right, MatrixAut):
        return aut_compose(right, _shear(right.matrix.size))
    return right + 1


def _tighten(M, neighborhood, u: Pair):
    """Neighborhood with one eps lowered to the witness factor's defect."""
    if not isinstance(neighborhood, ProductDiscrete):
        raise InputError("Only product-with-discrete neighborhoods can be tightened")
    base = neighborhood.base
    if isinstance(M.base, HM0Of):
        parts = flatten_subbasic(base)
        for i, part in enumerate(parts):
            defect = hm_measure_defect(u.left, part.inner, part.a, part.b)
            if defect > 0:
                parts[i] = HMSubbasic(part.inner, part.a, part.b, defect)
                tightened = parts[0] if len(parts) == 1 else Intersection(tuple(parts))
                return ProductDiscrete(tightened)
    elif isinstance(base, EpsBox):
        indices = range(len(u.left.coords)) if base.coords is None else base.coords
        coords = u.left.coords
        if isinstance(u.left, TorusPoint):
            distance = max(min(coords[i], 1 - coords[i]) for i in indices)
        else:
            distance = max(abs(coords[i]) for i in indices)
        if distance > 0:
            return ProductDiscrete(EpsBox(distance / 2, base.coords))
    raise InputError("The witness has no defect to tighten against")


def tamper_certificate(c: WitnessCertificate, how: str) -> WitnessCertificate:
    """Change exactly one field of a three-factor certificate so that it must fail."""
    if len(c.witness) != 3:
        raise InputError("Tampering is defined for three-factor certificates")
    s1, u, s2 = c.witness
    if how == 'element':
        return replace(c, element=Pair(c.element.left, _bump(c.element.right)))
    if how == 's1':
        return replace(c, witness=(Pair(s1.left, _bump(s1.right)), u, s2))
    if how == 'u':
        return replace(c, witness=(s1, Pair(u.left, _bump(u.right)), s2))
    if how == 's2':
        return replace(c, witness=(s1, u, Pair(s2.left, _bump(s2.right))))
    if how == 'neighborhood':
        return replace(c, neighborhood=_tighten(c.magma, c.neighborhood, u))
    raise InputError(f"Unknown tampering {how!r}", {'choices': ', '.join(TAMPERINGS)})


# --- Oracles ---

def _oracle_radius(Y: Sequence[Sequence[Fraction]], eps: Fraction) -> int:
    length, dim = len(Y), len(Y[0])
    largest = max(abs(v) for y in Y for v in y)
    if eps == 0:
        scale = RationalMatrix(tuple(tuple(y) for y in Y)).lcm_denominator()
        return max(1, scale * max(1, -(-largest.numerator // largest.denominator)))
    ratio = largest / eps
    m_bound = max(1, -(-ratio.numerator // ratio.denominator))
    return (2 * length * m_bound) ** dim + 1


def oracle_small_combination(Y: Sequence[Sequence[Any]], eps) -> Optional[Tuple[int, ...]]:
    """
    Exhaustive search over the whole coefficient cube {-K..K}^l, sorted by
    (max-norm, lexicographic), for a primitive d with sum(d_i y_i) within eps.

    Returns None when nothing in the cube passes.

    Raises:
        InstanceTooLarge: If l > 3, n > 2, K > 100 or the cube is too large to materialize
    """
    eps = parse_rational(eps)
    Y = [tuple(parse_rational(v) for v in y) for y in Y]
    if not Y or len(Y) > 3 or len(Y[0]) > 2:
        raise InstanceTooLarge("Oracle instances need l <= 3 vectors in dimension <= 2")
    radius = _oracle_radius(Y, eps)
    if radius > ORACLE_MAX_K or (2 * radius + 1) ** len(Y) > ORACLE_MAX_CUBE:
        raise InstanceTooLarge("Pigeonhole radius too large for the oracle", {'K': radius})

    cube = [d for d in itertools.product(range(-radius, radius + 1), repeat=len(Y)) if any(d)]
    cube.sort(key=lambda d: (max(abs(c) for c in d), d))
    for d in cube:
        if next(c for c in d if c != 0) < 0:
            continue
        g = 0
        for c in d:
            g = gcd(g, c)
        if g != 1:
            continue
        total = [sum((c * y[i] for c, y in zip(d, Y)), Fraction(0)) for i in range(len(Y[0]))]
        if all(abs(v) <= eps for v in total):
            return d
    return None


def oracle_step_membership(f: StepFunction, N: HMSubbasic) -> bool:
    """Membership recomputed by refining [a, b) against the breakpoints with a linear scan."""
    cuts = sorted({N.a, N.b} | {t for t, _ in f.pieces if N.a < t < N.b})
    defect = Fraction(0)
    for left, right in zip(cuts, cuts[1:]):
        value = None
        for start, piece_value in f.pieces:
            if start <= left:
                value = piece_value
        if not nbhd_member(f.base, N.inner, value):
            defect += right - left
    return defect < N.eps


# --- Seeded instances ---

def random_fraction(rng: random.Random, max_den: int, low: Fraction, high: Fraction) -> Fraction:
    den = rng.randint(1, max_den)
    lo = -(-low.numerator * den // low.denominator)
    hi = high.numerator * den // high.denominator
    if lo > hi:
        return Fraction(high)
    return Fraction(rng.randint(lo, hi), den)


def random_hm0_function(rng: random.Random, base: FiniteMagma, max_pieces: int = 6,
                        max_den: int = 12, nonconstant: bool = False) -> StepFunction:
    """Random HM0 step function over a finite base with at most `max_pieces` pieces."""
    names = list(base.elements)
    while True:
        count = rng.randint(1, max_pieces)
        breakpoints = sorted({Fraction(rng.randint(1, max_den - 1), max_den) for _ in range(count - 1)})
        values = [base.unit] + [rng.choice(names) for _ in breakpoints]
        f = step_canonicalize([(Fraction(0), FiniteAtom(values[0]))] +
                              [(t, FiniteAtom(v)) for t, v in zip(breakpoints, values[1:])], base)
        if not nonconstant or len(f.pieces) > 1:
            return f


def random_torus_points(rng: random.Random, dim: int, count: int, max_den: int = 12) -> List[TorusPoint]:
    return [
        TorusPoint(tuple(random_fraction(rng, max_den, Fraction(0), Fraction(1)) for _ in range(dim)))
        for _ in range(count)
    ]


def random_shrink_matrix(rng: random.Random, rows: int = 2, max_den: int = 8) -> RationalMatrix:
    return RationalMatrix(tuple(
        tuple(random_fraction(rng, max_den, Fraction(-2), Fraction(2)) for _ in range(2 * rows))
        for _ in range(rows)
    ))


def random_duo_certificate(rng: random.Random) -> WitnessCertificate:
    """A duo certificate over F(C2) or F(C3) whose middle factor has positive defect."""
    from .semidirect import build_F, duo_witness_z

    base = cyclic_magma(rng.choice([2, 3]))
    M = build_F(base)
    f = random_hm0_function(rng, base, nonconstant=True)
    target = Pair(f, rng.randint(-10, 10))
    eps = Fraction(1, 2 ** rng.randint(1, 5))
    W = ProductDiscrete(HMSubbasic(Subset({FiniteAtom(base.unit)}), Fraction(0), Fraction(1), eps))
    return certificate_from_witness(M, target, W, duo_witness_z(M, target, W))


def random_instance(kind: str, seed: int) -> Any:
    """
    Deterministic pseudorandom instance for `seed`.

    Raises:
        UnknownKind: If kind is not one of INSTANCE_KINDS
    """
    rng = random.Random(f"{kind}:{seed}")
    if kind == 'step-function':
        return random_hm0_function(rng, cyclic_magma(rng.choice([2, 3])))
    if kind == 'torus-point-set':
        return random_torus_points(rng, rng.choice([2, 4]), rng.randint(1, 2))
    if kind == 'shrink-matrix':
        return random_shrink_matrix(rng)
    if kind == 'certificate':
        return random_duo_certificate(rng)
    raise UnknownKind(f"Unknown instance kind {kind!r}", {'choices': ', '.join(INSTANCE_KINDS)})
