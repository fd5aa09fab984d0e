"""
Self-test suites as Celery tasks.

Each suite runs seeded oracle cross-checks and returns a summary dict. The
`selftest` subcommand runs them as a group; with CELERY_TASK_ALWAYS_EAGER
(the default) everything happens in-process.
"""

import logging
import random
from fractions import Fraction
from typing import Any, Dict, List

from celery import group, shared_task
from django.conf import settings

from .services import codec
from .services.hm import hm_nbhd_member
from .services.magma import FiniteAtom, HMSubbasic, Pair, ProductDiscrete, Subset, WholeSpace, cyclic_magma
from .services.semidirect import build_F, duo_witness_z
from .services.unimodular import SearchBudget, combination_is_small, small_combination
from .services.verify import (
    TAMPERINGS,
    InstanceTooLarge,
    certificate_from_witness,
    check_certificate,
    oracle_small_combination,
    oracle_step_membership,
    random_duo_certificate,
    random_fraction,
    random_hm0_function,
    tamper_certificate,
)
from .utils.error_handlers import log_suite_skip, log_suite_start, log_suite_success, suite_error_handler

logger = logging.getLogger(__name__)

SUITE_ORDER = ('membership', 'small-combination', 'certificate-tamper', 'witness-sweep')
WITNESS_EPSILONS = [Fraction(1, 2 ** k) for k in range(1, 6)]


def _summary(name: str, cases: int, failures: List[str], skipped: int = 0) -> Dict[str, Any]:
    """`cases` counts the cases actually checked; skipped ones are reported apart."""
    return {
        'suite': name,
        'status': 'passed' if not failures else 'failed',
        'cases': cases - skipped,
        'skipped': skipped,
        'failures': len(failures),
        'first_failure': failures[0] if failures else None,
    }


def _rng(name: str, seed: int, case: int) -> random.Random:
    return random.Random(f"{name}:{seed}:{case}")


def _random_subbasic(rng: random.Random, base) -> HMSubbasic:
    names = list(base.elements)
    members = {FiniteAtom(n) for n in names if rng.random() < 0.5} or {FiniteAtom(base.unit)}
    a = random_fraction(rng, 12, Fraction(0), Fraction(11, 12))
    b = random_fraction(rng, 12, a + Fraction(1, 12), Fraction(1))
    if b <= a:
        b = Fraction(1)
    eps = Fraction(rng.randint(1, 8), 8)
    return HMSubbasic(Subset(members), a, b, eps)


@shared_task(bind=True)
@suite_error_handler('membership')
def suite_membership(self, seed: int, cases: int, inject_fault: bool = False) -> Dict[str, Any]:
    """hm_nbhd_member against the independent breakpoint-refinement oracle."""
    log_suite_start('membership', seed, cases)
    failures = []
    for case in range(cases):
        rng = _rng('membership', seed, case)
        base = cyclic_magma(rng.choice([2, 3]))
        f = random_hm0_function(rng, base)
        N = _random_subbasic(rng, base)
        expected = oracle_step_membership(f, N)
        if inject_fault and case == 0:
            expected = not expected
        if hm_nbhd_member(f, N) != expected:
            failures.append(f"case {case}")
    result = _summary('membership', cases, failures)
    log_suite_success('membership', result)
    return result


@shared_task(bind=True)
@suite_error_handler('small-combination')
def suite_small_combination(self, seed: int, cases: int, inject_fault: bool = False) -> Dict[str, Any]:
    """Both small_combination and the exhaustive oracle outputs pass the exact post-check."""
    log_suite_start('small-combination', seed, cases)
    failures, skipped = [], 0
    budget = SearchBudget.from_settings()
    for case in range(cases):
        rng = _rng('small-combination', seed, case)
        length = rng.choice([2, 3])
        Y = [(random_fraction(rng, 8, Fraction(-1), Fraction(1)),) for _ in range(length)]
        eps = Fraction(1, 4)
        try:
            d = small_combination(Y, eps, budget)
            oracle = oracle_small_combination(Y, eps)
        except InstanceTooLarge as exc:
            log_suite_skip('small-combination', case, exc)
            skipped += 1
            continue
        if not combination_is_small(Y, d, eps):
            failures.append(f"case {case}: search output {d}")
        elif oracle is None or not combination_is_small(Y, oracle, eps):
            failures.append(f"case {case}: oracle output {oracle}")
    result = _summary('small-combination', cases, failures, skipped)
    log_suite_success('small-combination', result)
    return result


@shared_task(bind=True)
@suite_error_handler('certificate-tamper')
def suite_certificate_tamper(self, seed: int, cases: int, inject_fault: bool = False) -> Dict[str, Any]:
    """Generated certificates pass, and every single-field tampering fails."""
    log_suite_start('certificate-tamper', seed, cases)
    failures = []
    for case in range(cases):
        certificate = random_duo_certificate(_rng('certificate-tamper', seed, case))
        if not check_certificate(certificate).passed:
            failures.append(f"case {case}: untouched certificate failed")
            continue
        for how in TAMPERINGS:
            if check_certificate(tamper_certificate(certificate, how)).passed:
                failures.append(f"case {case}: tampering {how} still passes")
    result = _summary('certificate-tamper', cases, failures)
    log_suite_success('certificate-tamper', result)
    return result


@shared_task(bind=True)
@suite_error_handler('witness-sweep')
def suite_witness_sweep(self, seed: int, cases: int, inject_fault: bool = False) -> Dict[str, Any]:
    """Witnesses over F(C2) and F(C3) survive a codec round trip and verify."""
    log_suite_start('witness-sweep', seed, cases)
    failures = []
    for case in range(cases):
        rng = _rng('witness-sweep', seed, case)
        base = cyclic_magma(rng.choice([2, 3]))
        M = build_F(base)
        target = Pair(random_hm0_function(rng, base), rng.randint(-10, 10))
        inner = rng.choice([Subset({FiniteAtom(base.unit)}), WholeSpace()])
        W = ProductDiscrete(HMSubbasic(inner, Fraction(0), Fraction(1), rng.choice(WITNESS_EPSILONS)))
        certificate = certificate_from_witness(M, target, W, duo_witness_z(M, target, W))
        text = codec.dumps(codec.encode_certificate(certificate))
        if not check_certificate(codec.decode_certificate(codec.loads(text))).passed:
            failures.append(f"case {case}")
    result = _summary('witness-sweep', cases, failures)
    log_suite_success('witness-sweep', result)
    return result


SUITES = {
    'membership': suite_membership,
    'small-combination': suite_small_combination,
    'certificate-tamper': suite_certificate_tamper,
    'witness-sweep': suite_witness_sweep,
}


def run_selftests(seed: int = 0, cases: int = None, inject_fault: bool = False) -> List[Dict[str, Any]]:
    """
    Run every suite as one Celery group and return the results in suite order.
    """
    cases = cases or getattr(settings, 'DUOMAGMA_SELFTEST_CASES', 100)
    job = group(SUITES[name].s(seed, cases, inject_fault) for name in SUITE_ORDER)
    results = job.apply().get()
    by_name = {result['suite']: result for result in results}
    return [by_name[name] for name in SUITE_ORDER]
