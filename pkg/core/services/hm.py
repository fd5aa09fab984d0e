"""
Step-Function Extension Module
------------------------------
The magma HM(X) of right-open step functions [0, 1) -> X, its unit
subgroup HM0(X), the subbasic neighborhoods, the embedding of X, and the
squeeze automorphism gamma -> gamma o s together with the search for an
exponent that moves a function into a given unit neighborhood.

Breakpoints and measures are exact Fractions.
"""

import bisect
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from core.utils.error_handlers import InputError, SemanticFailure
from .magma import (
    FiniteAtom,
    FiniteMagma,
    HMSubbasic,
    Intersection,
    ShapeMismatch,
    WholeSpace,
    check_element,
    check_nbhd,
    element_inverse,
    label,
    nbhd_intersect,
    nbhd_member,
    op_apply,
    unit_of,
)

logger = logging.getLogger(__name__)


class BadBreakpoints(InputError):
    """Breakpoints must start at 0, strictly increase and stay below 1."""
    pass


class BadInterval(InputError):
    """An interval [a, b) must satisfy 0 <= a < b <= 1."""
    pass


class BadSqueezeMap(InputError):
    pass


class NotAHomomorphism(InputError):
    pass


class NotInHM0(InputError):
    """The function's value at 0 is not the unit of the base."""
    pass


class NormalizationError(InputError):
    pass


class NotUnitNeighborhood(NormalizationError):
    """A non-vacuous subbasic part excludes the unit of the base."""
    pass


# --- Squeeze maps ---

@dataclass(frozen=True)
class SqueezeMap:
    """
    Piecewise-affine increasing bijection s of [0, 1) with s(0) = 0 and s(t) < t on (0, 1).

    `pieces` holds (start, p, q): on [start, next start) the map is t -> p*t + q.
    """

    pieces: Tuple[Tuple[Fraction, Fraction, Fraction], ...]

    def __post_init__(self):
        pieces = tuple((Fraction(a), Fraction(p), Fraction(q)) for a, p, q in self.pieces)
        object.__setattr__(self, 'pieces', pieces)
        if not pieces or pieces[0][0] != 0:
            raise BadSqueezeMap("The first squeeze piece must start at 0")
        starts = [a for a, _, _ in pieces]
        if any(x >= y for x, y in zip(starts, starts[1:])) or starts[-1] >= 1:
            raise BadSqueezeMap("Squeeze breakpoints must strictly increase inside [0, 1)",
                                {'starts': starts})
        if any(p <= 0 for _, p, _ in pieces):
            raise BadSqueezeMap("Squeeze slopes must be positive")
        if pieces[0][2] != 0:
            raise BadSqueezeMap("Squeeze map must fix 0")
        _, p_last, q_last = pieces[-1]
        if p_last + q_last != 1:
            raise BadSqueezeMap("Squeeze map must tend to 1 at the right end")
        for (a, p, q), (b, p2, q2) in zip(pieces, pieces[1:]):
            if p * b + q != p2 * b + q2:
                raise BadSqueezeMap("Squeeze map is not continuous", {'at': b})
            if p2 * b + q2 >= b:
                raise BadSqueezeMap("Squeeze map must satisfy s(t) < t", {'at': b})
        if len(pieces) == 1:
            raise BadSqueezeMap("The identity is not a squeeze map")

    @property
    def starts(self) -> List[Fraction]:
        return [a for a, _, _ in self.pieces]

    @property
    def image_starts(self) -> List[Fraction]:
        return [p * a + q for a, p, q in self.pieces]

    def apply(self, t: Fraction) -> Fraction:
        _, p, q = self.pieces[bisect.bisect_right(self.starts, t) - 1]
        return p * t + q

    def inverse(self, y: Fraction) -> Fraction:
        _, p, q = self.pieces[bisect.bisect_right(self.image_starts, y) - 1]
        return (y - q) / p

    def power(self, k: int, t: Fraction) -> Fraction:
        """s^k(t) for any integer k."""
        step = self.apply if k >= 0 else self.inverse
        for _ in range(abs(k)):
            t = step(t)
        return t


DEFAULT_SQUEEZE = SqueezeMap((
    (Fraction(0), Fraction(1, 2), Fraction(0)),
    (Fraction(1, 2), Fraction(3, 2), Fraction(-1, 2)),
))


# --- Step functions ---

@dataclass(frozen=True)
class StepFunction:
    """
    Right-open step function on [0, 1).

    `pieces` is ((a0, v0), (a1, v1), ...) with a0 = 0 < a1 < ... < 1; the
    function takes value vi on [ai, a(i+1)). Build through step_canonicalize.
    """

    pieces: Tuple[Tuple[Fraction, Any], ...]
    base: Any

    @property
    def breakpoints(self) -> List[Fraction]:
        return [a for a, _ in self.pieces]

    def value_at(self, t: Fraction) -> Any:
        if not 0 <= t < 1:
            raise BadInterval("Step functions are defined on [0, 1)", {'t': t})
        return self.pieces[bisect.bisect_right(self.breakpoints, t) - 1][1]

    def intervals(self) -> Iterable[Tuple[Fraction, Fraction, Any]]:
        """Yield (start, end, value) for every piece."""
        ends = self.breakpoints[1:] + [Fraction(1)]
        for (start, value), end in zip(self.pieces, ends):
            yield start, end, value


@dataclass(frozen=True)
class NormalizedUnitNbhd:
    """{f : measure(f^-1(inner)) > 1 - eps}."""

    inner: Any
    eps: Fraction

    def as_subbasic(self) -> HMSubbasic:
        return HMSubbasic(self.inner, Fraction(0), Fraction(1), self.eps)


def step_canonicalize(raw: Sequence[Tuple[Any, Any]], base) -> StepFunction:
    """
    Validate breakpoints and merge equal neighbours.

    Raises:
        BadBreakpoints: If the first breakpoint is not 0, the sequence is not
            strictly increasing, or a breakpoint falls outside [0, 1)
    """
    if not raw:
        raise BadBreakpoints("A step function needs at least one piece")
    pieces = [(Fraction(a), v) for a, v in raw]
    if pieces[0][0] != 0:
        raise BadBreakpoints("The first breakpoint must be 0", {'first': pieces[0][0]})
    for (a, _), (b, _) in zip(pieces, pieces[1:]):
        if a >= b:
            raise BadBreakpoints("Breakpoints must strictly increase", {'at': b})
    if pieces[-1][0] >= 1:
        raise BadBreakpoints("Breakpoints must lie in [0, 1)", {'last': pieces[-1][0]})
    for _, value in pieces:
        check_element(base, value)

    merged = [pieces[0]]
    for a, value in pieces[1:]:
        if value != merged[-1][1]:
            merged.append((a, value))
    return StepFunction(tuple(merged), base)


def hm_unit(base) -> StepFunction:
    return StepFunction(((Fraction(0), unit_of(base)),), base)


def hm_embed(M, x) -> StepFunction:
    """i_x: the unit on [0, 1/2) and x on [1/2, 1)."""
    check_element(M, x)
    return step_canonicalize([(Fraction(0), unit_of(M)), (Fraction(1, 2), x)], M)


def hm_product(f: StepFunction, g: StepFunction) -> StepFunction:
    """Pointwise product over the union of both breakpoint sets."""
    if f.base != g.base:
        raise ShapeMismatch("Step functions over different bases cannot be multiplied",
                            {'left': label(f.base), 'right': label(g.base)})
    points = sorted(set(f.breakpoints) | set(g.breakpoints))
    return step_canonicalize(
        [(t, op_apply(f.base, f.value_at(t), g.value_at(t))) for t in points],
        f.base,
    )


def hm_inverse(f: StepFunction) -> StepFunction:
    return step_canonicalize([(a, element_inverse(f.base, v)) for a, v in f.pieces], f.base)


def in_hm0(f: StepFunction) -> bool:
    return f.pieces[0][1] == unit_of(f.base)


# --- Functoriality ---

@dataclass(frozen=True)
class FiniteHomomorphism:
    """Unit-preserving homomorphism between finite magmas, given as a symbol map."""

    source: FiniteMagma
    target: FiniteMagma
    mapping: Tuple[Tuple[str, str], ...]

    def __call__(self, x: FiniteAtom) -> FiniteAtom:
        return FiniteAtom(dict(self.mapping)[x.name])


@dataclass(frozen=True)
class IdentityHomomorphism:
    source: Any

    @property
    def target(self):
        return self.source

    def __call__(self, x):
        return x


Homomorphism = Union[FiniteHomomorphism, IdentityHomomorphism]


def mk_homomorphism(source: FiniteMagma, target: FiniteMagma,
                    mapping: Mapping[str, str]) -> FiniteHomomorphism:
    """
    Validate a symbol map between finite magmas exhaustively.

    Raises:
        NotAHomomorphism: If the map is partial, leaves the target, moves the
            unit or breaks the operation on some pair
    """
    if not isinstance(source, FiniteMagma) or not isinstance(target, FiniteMagma):
        raise ShapeMismatch("Symbol-map homomorphisms need finite source and target")
    mapping = {str(k): str(v) for k, v in mapping.items()}
    if set(mapping) != set(source.elements):
        raise NotAHomomorphism("Map must be defined on every source element")
    if not set(mapping.values()) <= set(target.elements):
        raise NotAHomomorphism("Map leaves the target element set")
    if mapping[source.unit] != target.unit:
        raise NotAHomomorphism("Map does not preserve the unit",
                               {'unit': source.unit, 'image': mapping[source.unit]})
    for a, b in itertools.product(source.elements, repeat=2):
        if mapping[source.multiply(a, b)] != target.multiply(mapping[a], mapping[b]):
            raise NotAHomomorphism("Map does not preserve the operation", {'pair': (a, b)})
    return FiniteHomomorphism(source, target, tuple(sorted(mapping.items())))


def hm_map(h: Homomorphism, f: StepFunction) -> StepFunction:
    """HM(h): f -> h o f, with the same breakpoints."""
    if f.base != h.source:
        raise ShapeMismatch("Homomorphism source does not match the step function base")
    return step_canonicalize([(a, h(v)) for a, v in f.pieces], h.target)


# --- Topology ---

def _check_interval(a: Fraction, b: Fraction) -> None:
    if not (0 <= a < b <= 1):
        raise BadInterval("Interval must satisfy 0 <= a < b <= 1", {'a': a, 'b': b})


def hm_measure_defect(f: StepFunction, V, a, b) -> Fraction:
    """Exact measure of the part of [a, b) where f takes values outside V."""
    a, b = Fraction(a), Fraction(b)
    _check_interval(a, b)
    check_nbhd(f.base, V)
    verdicts: Dict[Any, bool] = {}
    defect = Fraction(0)
    for start, end, value in f.intervals():
        lo, hi = max(start, a), min(end, b)
        if lo >= hi:
            continue
        if value not in verdicts:
            verdicts[value] = nbhd_member(f.base, V, value)
        if not verdicts[value]:
            defect += hi - lo
    return defect


def hm_nbhd_member(f: StepFunction, N: HMSubbasic) -> bool:
    return hm_measure_defect(f, N.inner, N.a, N.b) < N.eps


def hm_nbhd_normalize(parts: Sequence[HMSubbasic], base) -> NormalizedUnitNbhd:
    """
    Replace finitely many subbasic unit neighborhoods by one (inner, eps)
    pair whose set {f : measure(f^-1(inner)) > 1 - eps} lies inside all of them.

    Parts with eps > b - a hold for every function and are dropped. When every
    part is dropped the result is (WholeSpace, 1).
    """
    kept = []
    for part in parts:
        if not isinstance(part, HMSubbasic):
            raise NormalizationError(f"Expected a subbasic set, got {type(part).__name__}")
        check_nbhd(base, part.inner)
        if part.eps > part.b - part.a:
            continue
        if not nbhd_member(base, part.inner, unit_of(base)):
            raise NotUnitNeighborhood("Subbasic part does not contain the unit",
                                      {'a': part.a, 'b': part.b, 'eps': part.eps})
        kept.append(part)

    if not kept:
        logger.debug("All %s subbasic parts were vacuous", len(parts))
        return NormalizedUnitNbhd(WholeSpace(), Fraction(1))

    inner = kept[0].inner
    for part in kept[1:]:
        inner = nbhd_intersect(inner, part.inner)
    return NormalizedUnitNbhd(inner, min(part.eps for part in kept))


def flatten_subbasic(spec) -> List[HMSubbasic]:
    """Subbasic parts of an HM0 neighborhood given as a subbasic set or an intersection."""
    if isinstance(spec, HMSubbasic):
        return [spec]
    if isinstance(spec, Intersection):
        return [p for part in spec.parts for p in flatten_subbasic(part)]
    if isinstance(spec, WholeSpace):
        return []
    raise NormalizationError(f"{type(spec).__name__} is not a subbasic HM0 neighborhood")


# --- The squeeze automorphism ---

def alpha_apply(f: StepFunction, k: int, s: SqueezeMap = DEFAULT_SQUEEZE) -> StepFunction:
    """f o s^k; breakpoint a moves to s^-k(a)."""
    if k == 0:
        return f
    return step_canonicalize([(s.power(-k, a), v) for a, v in f.pieces], f.base)


def unit_prefix(f: StepFunction, inner) -> Fraction:
    """End of the initial run of pieces whose values lie in inner."""
    for start, end, value in f.intervals():
        if not nbhd_member(f.base, inner, value):
            return start
    return Fraction(1)


def sufficient_exponent(f: StepFunction, N: NormalizedUnitNbhd,
                        s: SqueezeMap = DEFAULT_SQUEEZE) -> int:
    """
    An exponent n with f o s^n in N: iterate t <- s(t) from 1 - eps until
    t drops below the length of f's unit prefix.
    """
    if N.eps >= 1:
        return 0
    prefix = unit_prefix(f, N.inner)
    if prefix <= 0:
        raise NotInHM0("The value at 0 is outside the neighborhood's inner set")
    t, n = 1 - N.eps, 0
    while t >= prefix:
        t = s.apply(t)
        n += 1
    return n


def absorb_exponent(f: StepFunction, N: NormalizedUnitNbhd,
                    s: SqueezeMap = DEFAULT_SQUEEZE) -> int:
    """
    Least n >= 0 such that f o s^n lies in the normalized neighborhood N.

    Raises:
        NotInHM0: If f(0) is not the unit of the base
        NotUnitNeighborhood: If N.inner does not contain the unit
    """
    if not in_hm0(f):
        raise NotInHM0("Function is not in HM0: its value at 0 is not the unit")
    if N.eps >= 1:
        return 0
    if not nbhd_member(f.base, N.inner, unit_of(f.base)):
        raise NotUnitNeighborhood("Normalized neighborhood does not contain the unit")

    subbasic = N.as_subbasic()
    bound = sufficient_exponent(f, N, s)
    for n in range(bound + 1):
        if hm_nbhd_member(alpha_apply(f, n, s), subbasic):
            logger.debug("Absorbing exponent %s (sufficient bound %s)", n, bound)
            return n
    raise SemanticFailure("Sufficient exponent failed the membership check",
                          {'bound': bound})
