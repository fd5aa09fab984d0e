"""
Unimodular Lattice Module
-------------------------
Integer lattice machinery that moves finitely many torus points into a
small box by an SL(m, Z) automorphism.

This module provides:
- Completion of a primitive integer vector to an SL matrix (last column = the vector)
- Search for small primitive integer combinations of rational vectors
  (shell enumeration or LLL lattice reduction, both exactly post-checked)
- The greedy small-column loop producing A with the first columns of XA small
- Torus absorption, block-diagonal lifts and the append-only absorbing-family registry

Dependencies:
- sympy: DomainMatrix.lll for the lattice-reduction strategy
"""

import hashlib
import itertools
import json
import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ

from core.utils.error_handlers import BudgetError, InputError, SemanticFailure
from .lattice import (
    RationalMatrix,
    UnimodularMatrix,
    block_diagonal,
    integer_domain,
    parse_rational,
    permutation_rows,
    qq_to_fraction,
    rational_domain,
)
from .magma import EpsBox, MatrixAut, RationalTorus, SemidirectAut, TorusPoint, nbhd_member

logger = logging.getLogger(__name__)

ENUMERATION = 'enumeration'
LLL = 'lll'
STRATEGIES = (ENUMERATION, LLL)


class NotPrimitive(InputError):
    """Raised when an integer vector has gcd other than 1 (or no SL completion exists)."""
    pass


class BudgetExhausted(BudgetError):
    pass


class DimensionTooSmall(InputError):
    pass


class AbsorptionFailed(SemanticFailure):
    pass


def _setting(name: str, default):
    """Read a Django setting, falling back to the default when settings are not configured."""
    from django.conf import settings
    from django.core.exceptions import ImproperlyConfigured
    try:
        return getattr(settings, name, default)
    except ImproperlyConfigured:
        return default


@dataclass(frozen=True)
class SearchBudget:
    """
    Limits for the small-combination search.

    `pigeonhole_k` bounds the max-norm of candidate coefficient vectors and
    `timeout_steps` bounds the number of candidates examined.
    """

    max_abs_entry: Optional[int] = None
    pigeonhole_k: int = 64
    strategy: str = LLL
    timeout_steps: int = 200000

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise InputError(f"Unknown search strategy {self.strategy!r}",
                             {'choices': ', '.join(STRATEGIES)})
        if self.pigeonhole_k < 1 or self.timeout_steps < 1:
            raise InputError("Search budget limits must be positive")

    @classmethod
    def from_settings(cls, **overrides) -> 'SearchBudget':
        values = {
            'pigeonhole_k': int(_setting('DUOMAGMA_PIGEONHOLE_K', 64)),
            'strategy': _setting('DUOMAGMA_STRATEGY', LLL),
            'timeout_steps': int(_setting('DUOMAGMA_TIMEOUT_STEPS', 200000)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @staticmethod
    def pigeonhole_bound(length: int, dim: int, max_abs: Fraction, eps: Fraction) -> int:
        """
        The guaranteed K = (2 l M)^n + 1 for l vectors in Q^n whose entries
        are at most M * eps in absolute value.
        """
        if eps <= 0:
            raise InputError("The pigeonhole bound needs a positive eps")
        ratio = Fraction(max_abs) / eps
        m_bound = max(1, -(-ratio.numerator // ratio.denominator))
        return (2 * length * m_bound) ** dim + 1


# --- Primitive completion ---

def egcd(a: int, b: int) -> Tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _vector_gcd(values: Sequence[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, int(v))
    return g


def primitive_completion(d: Sequence[int]) -> UnimodularMatrix:
    """
    An SL(l, Z) matrix whose last column is d.

    Works by recursion on the length: with g the gcd of the leading entries,
    complete d[:-1] / g, then fix the last 2x2 block from an extended gcd of
    (d[-1], g).

    Raises:
        NotPrimitive: If gcd(d) != 1, or d == (-1,)
    """
    d = [int(x) for x in d]
    length = len(d)
    if length == 0 or _vector_gcd(d) != 1:
        raise NotPrimitive("Vector is not primitive", {'vector': d})
    if length == 1:
        if d[0] != 1:
            raise NotPrimitive("(-1) has no completion in SL(1, Z)")
        return UnimodularMatrix.identity(1)

    head, last = d[:-1], d[-1]
    if all(x == 0 for x in head):
        # d = +-e_l
        if last == 1:
            return UnimodularMatrix.identity(length)
        rows = [[0] * length for _ in range(length)]
        for i in range(length):
            rows[i][i] = 1
        rows[0][0] = -1
        rows[-1][-1] = -1
        return UnimodularMatrix(rows)

    if length == 2:
        g = head[0]
        outer = [[1]]
    else:
        g = _vector_gcd(head)
        outer = primitive_completion([x // g for x in head]).to_list()

    _, x, y = egcd(last, g)
    a, b = x, -y
    identity = [[1 if i == j else 0 for j in range(length - 2)] for i in range(length - 2)]
    inner = block_diagonal(identity, [[a, g], [b, last]])
    lifted = block_diagonal(outer, [[1]])
    result = UnimodularMatrix(lifted).matmul(UnimodularMatrix(inner))
    if list(result.column(length - 1)) != d:
        raise SemanticFailure("Completion lost the last column", {'vector': d})
    return result


# --- Small combinations ---

def _combination(Y: Sequence[Sequence[Fraction]], coeffs: Sequence[int]) -> List[Fraction]:
    dim = len(Y[0])
    return [sum((c * y[i] for c, y in zip(coeffs, Y)), Fraction(0)) for i in range(dim)]


def combination_is_small(Y: Sequence[Sequence[Fraction]], coeffs: Sequence[int], eps: Fraction) -> bool:
    return all(abs(v) <= eps for v in _combination(Y, coeffs))


def _normalize_sign(coeffs: Sequence[int]) -> Tuple[int, ...]:
    for c in coeffs:
        if c != 0:
            return tuple(coeffs) if c > 0 else tuple(-x for x in coeffs)
    return tuple(coeffs)


def _first_nonzero_positive(coeffs: Sequence[int]) -> bool:
    for c in coeffs:
        if c != 0:
            return c > 0
    return False


def _enumerate_shells(Y, eps: Fraction, budget: SearchBudget) -> Tuple[int, ...]:
    """Scan coefficient vectors by increasing max-norm up to K."""
    length = len(Y)
    steps = 0
    for radius in range(1, budget.pigeonhole_k + 1):
        for coeffs in itertools.product(range(-radius, radius + 1), repeat=length):
            if max(abs(c) for c in coeffs) != radius or not _first_nonzero_positive(coeffs):
                continue
            steps += 1
            if steps > budget.timeout_steps:
                raise BudgetExhausted("Enumeration step budget exhausted",
                                      {'steps': budget.timeout_steps, 'radius': radius})
            if _vector_gcd(coeffs) == 1 and combination_is_small(Y, coeffs, eps):
                logger.debug("Enumeration found %s at radius %s after %s steps", coeffs, radius, steps)
                return coeffs
    raise BudgetExhausted("No small combination within the pigeonhole radius",
                          {'pigeonhole_k': budget.pigeonhole_k})


def _lll_candidates(Y, weight: int, delta: Fraction) -> List[Tuple[int, ...]]:
    """Coefficient vectors read off an LLL-reduced basis of [L * Y^T | weight * I]."""
    length, dim = len(Y), len(Y[0])
    scale = RationalMatrix(tuple(tuple(y) for y in Y)).lcm_denominator()
    rows = []
    for i, y in enumerate(Y):
        row = [int(v * scale) for v in y]
        row.extend(weight if j == i else 0 for j in range(length))
        rows.append(row)
    reduced = integer_domain(rows).lll(delta=QQ(delta.numerator, delta.denominator))
    basis = [[int(x) for x in row] for row in reduced.to_list()]

    candidates = [row[dim:] for row in basis]
    for r1, r2 in itertools.combinations(basis, 2):
        candidates.append([a + b for a, b in zip(r1[dim:], r2[dim:])])
        candidates.append([a - b for a, b in zip(r1[dim:], r2[dim:])])
    result = []
    for cand in candidates:
        coeffs = [c // weight for c in cand]
        g = _vector_gcd(coeffs)
        if g == 0:
            continue
        result.append(_normalize_sign([c // g for c in coeffs]))
    return result


def _exact_relation(Y) -> Optional[Tuple[int, ...]]:
    """A primitive integer d with sum(d_i * y_i) = 0, read off the rational nullspace."""
    length, dim = len(Y), len(Y[0])
    columns = rational_domain([[Y[i][r] for i in range(length)] for r in range(dim)])
    for row in columns.nullspace().to_list():
        values = [qq_to_fraction(v) for v in row]
        scale = lcm(*(v.denominator for v in values))
        coeffs = [int(v * scale) for v in values]
        g = _vector_gcd(coeffs)
        if g:
            return _normalize_sign([c // g for c in coeffs])
    return None


def small_combination(Y: Sequence[Sequence[Fraction]], eps, budget: Optional[SearchBudget] = None) -> Tuple[int, ...]:
    """
    A primitive integer vector d with every coordinate of sum(d_i * y_i) at most eps.

    Args:
        Y: l vectors in Q^n, l > n
        eps: Non-negative rational tolerance
        budget: Search limits and strategy

    Returns:
        The coefficient tuple d, first nonzero entry positive

    The lattice strategy tries the reduced-basis candidates, then an exact
    integer relation (always present when l > n), and only then enumerates.

    Raises:
        BudgetExhausted: If the search limits are hit before a candidate passes
    """
    budget = budget or SearchBudget.from_settings()
    eps = parse_rational(eps)
    Y = [tuple(parse_rational(v) for v in y) for y in Y]
    if not Y or eps < 0:
        raise InputError("small_combination needs at least one vector and eps >= 0")
    length = len(Y)

    for i, y in enumerate(Y):
        if all(abs(v) <= eps for v in y):
            return tuple(1 if j == i else 0 for j in range(length))

    if budget.strategy == LLL:
        weight = int(_setting('DUOMAGMA_LLL_WEIGHT', 1))
        delta = parse_rational(_setting('DUOMAGMA_LLL_DELTA', '3/4'))
        for coeffs in _lll_candidates(Y, weight, delta):
            if combination_is_small(Y, coeffs, eps):
                logger.debug("Lattice reduction found %s", coeffs)
                return coeffs
        relation = _exact_relation(Y)
        if relation is not None:
            logger.debug("Using the exact integer relation %s", relation)
            return relation
        logger.warning("Lattice reduction found no small combination for %s vectors; "
                       "falling back to enumeration", length)

    return _enumerate_shells(Y, eps, budget)


# --- The small-column loop ---

def _is_small(column: Sequence[Fraction], eps: Fraction) -> bool:
    return all(abs(v) <= eps for v in column)


def _permutation_sign(order: Sequence[int]) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(order)), 2) if order[i] > order[j])
    return -1 if inversions % 2 else 1


def fronting_matrix(small: Sequence[int], size: int) -> UnimodularMatrix:
    """
    SL matrix moving the `small` columns to the front (stable order).

    An odd arrangement is fixed by swapping two trailing non-small columns,
    else two leading small columns, else by negating the last column.
    """
    rest = [j for j in range(size) if j not in small]
    order = list(small) + rest
    negate_last = False
    if _permutation_sign(order) < 0:
        if len(rest) >= 2:
            order[-2], order[-1] = order[-1], order[-2]
        elif len(small) >= 2:
            order[0], order[1] = order[1], order[0]
        else:
            negate_last = True
    rows = permutation_rows(order)
    if negate_last:
        for row in rows:
            row[-1] = -row[-1]
    return UnimodularMatrix(rows)


def shrink_columns(X: RationalMatrix, eps, budget: Optional[SearchBudget] = None,
                   target: Optional[int] = None) -> UnimodularMatrix:
    """
    A in SL(m, Z) such that the first `target` columns of X A are entrywise at most eps.

    `target` defaults to n for an n x 2n matrix; in general target <= m - n.

    Raises:
        InputError: If the shape does not leave room for the requested small columns
        BudgetExhausted: Propagated from small_combination
    """
    budget = budget or SearchBudget.from_settings()
    eps = parse_rational(eps)
    if eps <= 0:
        raise InputError("eps must be positive", {'eps': eps})
    n, m = X.n_rows, X.n_cols
    if target is None:
        if m != 2 * n:
            raise InputError("Matrix must have shape n x 2n", {'rows': n, 'cols': m})
        target = n
    if target > m - n:
        raise InputError("Not enough columns for the requested small columns",
                         {'rows': n, 'cols': m, 'target': target})

    A = UnimodularMatrix.identity(m)
    previous = -1
    while True:
        current = X.times(A)
        small = [j for j in range(m) if _is_small(current.column(j), eps)]
        k = len(small)
        if k <= previous:
            raise SemanticFailure("Small-column count did not increase", {'k': k})
        logger.debug("Small-column loop: k=%s of target %s", k, target)
        if small != list(range(k)):
            A = A.matmul(fronting_matrix(small, m))
        if k >= target:
            break

        current = X.times(A)
        d = small_combination([current.column(j) for j in range(k, m)], eps, budget)
        D = primitive_completion(d)
        identity = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
        A = A.matmul(UnimodularMatrix(block_diagonal(identity, D.rows) if k else D.rows))
        previous = k

    logger.info("Shrunk %s small columns of a %sx%s matrix", target, n, m)
    return A


# --- Torus absorption ---

def _centered(c: Fraction) -> Fraction:
    return c if c <= Fraction(1, 2) else c - 1


def _in_box(point: TorusPoint, box: EpsBox) -> bool:
    return nbhd_member(RationalTorus(len(point.coords)), box, point)


def torus_absorb(F: Sequence[TorusPoint], D: Optional[Sequence[int]], eps,
                 budget: Optional[SearchBudget] = None) -> UnimodularMatrix:
    """
    A in SL(m, Z) such that every point of F times A lies in the eps-box on the coordinates D.

    Raises:
        DimensionTooSmall: If m < 2 * max(|F|, |D|)
        AbsorptionFailed: If the exact post-check fails
    """
    eps = parse_rational(eps)
    points = list(F)
    if not points:
        raise InputError("torus_absorb needs at least one point")
    m = len(points[0].coords)
    if any(len(p.coords) != m for p in points):
        raise InputError("Torus points have different dimensions")
    coords = tuple(range(m)) if D is None else tuple(sorted(set(int(c) for c in D)))
    if any(c < 0 or c >= m for c in coords):
        raise InputError("Coordinate index out of range", {'coords': coords})
    box = EpsBox(eps, coords)
    if all(_in_box(p, box) for p in points):
        return UnimodularMatrix.identity(m)

    n = max(len(points), len(coords))
    if m < 2 * n:
        raise DimensionTooSmall(f"Torus of dimension {m} is too small for {len(points)} points "
                                f"on {len(coords)} coordinates", {'required': 2 * n})

    order = list(coords) + [c for c in range(m) if c not in coords]
    block = order[:2 * n]
    X = RationalMatrix(tuple(tuple(_centered(p.coords[c]) for c in block) for p in points))
    shrink = shrink_columns(X, eps, budget, target=len(coords))

    identity = [[1 if i == j else 0 for j in range(m - 2 * n)] for i in range(m - 2 * n)]
    in_order = integer_domain(block_diagonal(shrink.rows, identity)) if identity else shrink.to_domain()
    P = integer_domain(permutation_rows(order))
    full = P.matmul(in_order).matmul(P.transpose())
    A = UnimodularMatrix([[int(x) for x in row] for row in full.to_list()])

    image = [TorusPoint(A.act(p.coords)) for p in points]
    if not all(_in_box(p, box) for p in image):
        raise AbsorptionFailed("Absorbing matrix failed the box check", {'eps': eps})
    return A


def block_diagonal_lift(A: UnimodularMatrix, blocks: int) -> UnimodularMatrix:
    if blocks < 1:
        raise InputError("Block count must be positive", {'blocks': blocks})
    return UnimodularMatrix._trusted(block_diagonal(*([A.rows] * blocks)))


# --- Absorbing-family registry ---

def fingerprint(payload) -> str:
    text = json.dumps(payload, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def _rational_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _query_key(points: Sequence[TorusPoint], box: EpsBox) -> str:
    return fingerprint({
        'points': sorted([_rational_text(c) for c in p.coords] for p in points),
        'eps': _rational_text(box.eps),
        'coords': list(box.coords) if box.coords is not None else None,
    })


def registry_id_for(dim: int, seeds: Sequence[UnimodularMatrix]) -> str:
    return f"torus-{dim}-{fingerprint([s.to_list() for s in seeds])[:12]}"


class AbsorbingFamilyRegistry:
    """
    Append-only family of shrinking matrices for the torus of dimension `dim`.

    Every stored entry A satisfies "points times A lie in the box" for the
    query that produced it; the automorphism handed out is MatrixAut(A^-1).
    """

    def __init__(self, dim: int, seeds: Sequence[UnimodularMatrix] = (),
                 budget: Optional[SearchBudget] = None):
        if dim < 1:
            raise InputError("Registry dimension must be positive", {'dim': dim})
        self.dim = dim
        self.seeds = tuple(seeds)
        for seed in self.seeds:
            if seed.size != dim:
                raise InputError("Seed size does not match the registry dimension",
                                 {'seed': seed.size, 'dim': dim})
        self.registry_id = registry_id_for(dim, self.seeds)
        self.budget = budget
        self._lock = threading.Lock()
        self._entries: List[UnimodularMatrix] = [UnimodularMatrix.identity(dim)]
        for seed in self.seeds:
            self._entries.extend([seed, seed.inverse()])
        self._memo: Dict[str, MatrixAut] = {}

    @property
    def entries(self) -> Tuple[UnimodularMatrix, ...]:
        with self._lock:
            return tuple(self._entries)

    def absorb(self, points: Sequence[TorusPoint], U: EpsBox) -> MatrixAut:
        """
        alpha with alpha^-1(points) inside U; stored entries are tried before a new search.

        Raises:
            InputError: If U is not an EpsBox or a point has the wrong dimension
            DimensionTooSmall, AbsorptionFailed, BudgetExhausted: From torus_absorb
        """
        if not isinstance(U, EpsBox):
            raise InputError("Registry absorption needs an EpsBox neighborhood",
                             {'neighborhood': type(U).__name__})
        points = list(points)
        if any(not isinstance(p, TorusPoint) or len(p.coords) != self.dim for p in points):
            raise InputError(f"Registry {self.registry_id} expects points of T^{self.dim}")

        key = _query_key(points, U)
        with self._lock:
            if key in self._memo:
                return self._memo[key]
            stored = list(self._entries)

        for A in stored:
            if all(_in_box(TorusPoint(A.act(p.coords)), U) for p in points):
                return self._remember(key, A, appended=False)

        A = torus_absorb(points, U.coords, U.eps, self.budget)
        return self._remember(key, A, appended=True)

    def _remember(self, key: str, A: UnimodularMatrix, appended: bool) -> MatrixAut:
        alpha = MatrixAut(A.inverse())
        with self._lock:
            if key in self._memo:
                logger.warning("Concurrent registry insert for the same query resolved to the stored entry")
                return self._memo[key]
            if appended and A not in self._entries:
                self._entries.append(A)
                logger.info("Registry %s grew to %s entries", self.registry_id, len(self._entries))
            return self._memo.setdefault(key, alpha)


_catalog: Dict[str, AbsorbingFamilyRegistry] = {}
_catalog_lock = threading.Lock()


def ensure_registry(dim: int, seeds: Sequence[UnimodularMatrix] = (),
                    budget: Optional[SearchBudget] = None) -> AbsorbingFamilyRegistry:
    """The catalogued registry for (dim, seeds), created on first use."""
    candidate = AbsorbingFamilyRegistry(dim, seeds, budget)
    with _catalog_lock:
        return _catalog.setdefault(candidate.registry_id, candidate)


def get_registry(registry_id: str) -> AbsorbingFamilyRegistry:
    with _catalog_lock:
        registry = _catalog.get(registry_id)
    if registry is None:
        raise InputError(f"Unknown automorphism registry {registry_id!r}")
    return registry


def registry_absorb(registry: AbsorbingFamilyRegistry, F: Sequence[TorusPoint], U: EpsBox) -> MatrixAut:
    return registry.absorb(F, U)


def torus_duo_group(dim: int, seeds: Sequence[UnimodularMatrix] = ()) -> SemidirectAut:
    """T^dim x| H where H is grown by the registry for (dim, seeds)."""
    if dim < 2:
        raise DimensionTooSmall("Torus duo groups need dimension >= 2", {'dim': dim})
    registry = ensure_registry(dim, seeds)
    return SemidirectAut(RationalTorus(dim), registry.registry_id)
