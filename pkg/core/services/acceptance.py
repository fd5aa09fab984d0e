"""
Acceptance Sweeps
-----------------
Seeded desk-scale sweeps over the main constructions. Each sweep returns
a summary dict in the same shape as the self-test suites, so the
acceptance runner and the test-suite can report them alike.
"""

import logging
import random
from fractions import Fraction
from math import gcd
from typing import Any, Dict, List

from . import codec
from .hm import NormalizedUnitNbhd, absorb_exponent, alpha_apply, hm_nbhd_member, sufficient_exponent
from .magma import (
    EpsBox,
    FiniteAtom,
    HMSubbasic,
    Pair,
    ProductDiscrete,
    RationalTorus,
    Subset,
    WholeSpace,
    aut_act,
    cyclic_magma,
    enumerate_elements,
    mk_finite_magma,
    nbhd_member,
    op_apply,
)
from .semidirect import build_F, duo_witness_z, embed_into_F
from .unimodular import (
    ENUMERATION,
    AbsorbingFamilyRegistry,
    SearchBudget,
    primitive_completion,
    shrink_columns,
)
from .verify import (
    TAMPERINGS,
    certificate_from_witness,
    check_certificate,
    random_duo_certificate,
    random_hm0_function,
    random_shrink_matrix,
    random_torus_points,
    tamper_certificate,
)

logger = logging.getLogger(__name__)

WITNESS_EPSILONS = [Fraction(1, 2 ** k) for k in range(1, 6)]
SHRINK_EPS = Fraction(1, 3)
TORUS_EPS = Fraction(1, 10)
MAX_COMPLETION_ENTRY = 10 ** 6


def _summary(name: str, cases: int, failures: List[str]) -> Dict[str, Any]:
    return {
        'criterion': name,
        'status': 'passed' if not failures else 'failed',
        'cases': cases,
        'failures': len(failures),
        'first_failure': failures[0] if failures else None,
    }


def witness_sweep(elements: int = 200, seed: int = 0) -> Dict[str, Any]:
    """Witness + codec round trip + verify over F(C2) and F(C3) for every unit neighborhood."""
    failures, cases = [], 0
    for order in (2, 3):
        base = cyclic_magma(order)
        M = build_F(base)
        rng = random.Random(f"witness:{seed}:{order}")
        neighborhoods = [
            ProductDiscrete(HMSubbasic(inner, Fraction(0), Fraction(1), eps))
            for eps in WITNESS_EPSILONS
            for inner in (Subset({FiniteAtom(base.unit)}), WholeSpace())
        ]
        for index in range(elements):
            target = Pair(random_hm0_function(rng, base), rng.randint(-10, 10))
            for W in neighborhoods:
                cases += 1
                certificate = certificate_from_witness(M, target, W, duo_witness_z(M, target, W))
                text = codec.dumps(codec.encode_certificate(certificate))
                if not check_certificate(codec.decode_certificate(codec.loads(text))).passed:
                    failures.append(f"C{order} element {index}")
    return _summary('witness-sweep', cases, failures)


def exponent_sweep(cases: int = 200, seed: int = 0) -> Dict[str, Any]:
    """absorb_exponent is least, and never exceeds the sufficient bound."""
    failures = []
    rng = random.Random(f"exponent:{seed}")
    for case in range(cases):
        base = cyclic_magma(rng.choice([2, 3]))
        f = random_hm0_function(rng, base)
        members = {FiniteAtom(base.unit)} | {FiniteAtom(n) for n in base.elements if rng.random() < 0.3}
        N = NormalizedUnitNbhd(Subset(members), Fraction(rng.randint(1, 15), 16))
        subbasic = N.as_subbasic()
        n = absorb_exponent(f, N)
        if not hm_nbhd_member(alpha_apply(f, n), subbasic):
            failures.append(f"case {case}: n={n} is not absorbing")
        elif n > 0 and hm_nbhd_member(alpha_apply(f, n - 1), subbasic):
            failures.append(f"case {case}: n={n} is not least")
        elif sufficient_exponent(f, N) < n:
            failures.append(f"case {case}: sufficient bound below {n}")
    return _summary('least-exponent', cases, failures)


def _shrink_ok(X, A) -> bool:
    n = X.n_rows
    return A.det() == 1 and all(abs(x) <= SHRINK_EPS for row in X.times(A).rows for x in row[:n])


def shrink_sweep(one_by_two: int = 100, two_by_four: int = 50, seed: int = 0) -> Dict[str, Any]:
    """shrink_columns under the configured strategy, with enumeration cross-checks on 1x2."""
    failures = []
    rng = random.Random(f"shrink:{seed}")
    enumeration = SearchBudget.from_settings(strategy=ENUMERATION)
    for case in range(one_by_two):
        X = random_shrink_matrix(rng, rows=1)
        if not _shrink_ok(X, shrink_columns(X, SHRINK_EPS)):
            failures.append(f"1x2 case {case}")
        elif not _shrink_ok(X, shrink_columns(X, SHRINK_EPS, enumeration)):
            failures.append(f"1x2 case {case}: enumeration")
    for case in range(two_by_four):
        X = random_shrink_matrix(rng, rows=2)
        if not _shrink_ok(X, shrink_columns(X, SHRINK_EPS)):
            failures.append(f"2x4 case {case}")
    return _summary('shrink-columns', one_by_two + two_by_four, failures)


def random_primitive_vector(rng: random.Random, max_entry: int = MAX_COMPLETION_ENTRY) -> List[int]:
    d = [rng.randint(-max_entry, max_entry) for _ in range(rng.randint(1, 6))]
    g = 0
    for c in d:
        g = gcd(g, c)
    if g == 0:
        d[-1] = 1
        return d
    return [c // g for c in d]


def completion_sweep(cases: int = 500, seed: int = 0) -> Dict[str, Any]:
    failures = []
    rng = random.Random(f"completion:{seed}")
    for case in range(cases):
        d = random_primitive_vector(rng)
        if d == [-1]:
            d = [1]
        D = primitive_completion(d)
        if D.det() != 1 or list(D.column(len(d) - 1)) != d:
            failures.append(f"case {case}: {d}")
    return _summary('primitive-completion', cases, failures)


def _absorbs(registry: AbsorbingFamilyRegistry, points, box: EpsBox) -> bool:
    alpha = registry.absorb(points, box)
    torus = RationalTorus(registry.dim)
    if not all(nbhd_member(torus, box, aut_act(alpha, p, 'inverse')) for p in points):
        return False
    return registry.absorb(points, box) is alpha


def torus_sweep(singles: int = 100, pairs: int = 30, seed: int = 0) -> Dict[str, Any]:
    """
    Registry absorption into EpsBox(1/10): single points of T^2 on one coordinate
    and of T^4 on two, pairs of T^4 on two coordinates.
    """
    failures = []
    rng = random.Random(f"torus:{seed}")
    registries = {2: AbsorbingFamilyRegistry(2), 4: AbsorbingFamilyRegistry(4)}
    boxes = {2: EpsBox(TORUS_EPS, (0,)), 4: EpsBox(TORUS_EPS, (0, 1))}
    for case in range(singles):
        dim = rng.choice([2, 4])
        if not _absorbs(registries[dim], random_torus_points(rng, dim, 1), boxes[dim]):
            failures.append(f"single case {case} in T^{dim}")
    for case in range(pairs):
        if not _absorbs(registries[4], random_torus_points(rng, 4, 2), boxes[4]):
            failures.append(f"pair case {case}")
    return _summary('torus-absorption', singles + pairs, failures)


def tamper_sweep(cases: int = 100, seed: int = 0) -> Dict[str, Any]:
    failures = []
    rng = random.Random(f"tamper:{seed}")
    for case in range(cases):
        certificate = random_duo_certificate(rng)
        if not check_certificate(certificate).passed:
            failures.append(f"case {case}: untouched certificate failed")
            continue
        failures.extend(f"case {case}: {how}" for how in TAMPERINGS
                        if check_certificate(tamper_certificate(certificate, how)).passed)
    return _summary('tamper-resistance', cases, failures)


def example_magmas():
    non_associative = mk_finite_magma(['e', 'a', 'b'], [['e', 'a', 'b'], ['a', 'b', 'b'], ['b', 'a', 'a']], 'e')
    return [cyclic_magma(2), cyclic_magma(3), cyclic_magma(4), non_associative]


def embedding_sweep() -> Dict[str, Any]:
    """embed_into_F is injective and operation-preserving, exhaustively."""
    failures, cases = [], 0
    for X in example_magmas():
        F = build_F(X)
        elements = enumerate_elements(X)
        images = {x: embed_into_F(F, x) for x in elements}
        if len(set(images.values())) != len(elements):
            failures.append(f"{X.elements}: not injective")
        for x in elements:
            for y in elements:
                cases += 1
                if images[op_apply(X, x, y)] != op_apply(F, images[x], images[y]):
                    failures.append(f"{X.elements}: {x.name}*{y.name}")
    return _summary('embedding', cases, failures)


CRITERIA = {
    'witness-sweep': witness_sweep,
    'least-exponent': exponent_sweep,
    'shrink-columns': shrink_sweep,
    'primitive-completion': completion_sweep,
    'torus-absorption': torus_sweep,
    'tamper-resistance': tamper_sweep,
    'embedding': embedding_sweep,
}
