"""
Reduced acceptance sweeps; scripts/run_acceptance.py runs them at full size.
"""

import pytest

from core.services.acceptance import (
    completion_sweep,
    embedding_sweep,
    exponent_sweep,
    random_primitive_vector,
    shrink_sweep,
    tamper_sweep,
    torus_sweep,
    witness_sweep,
)


@pytest.mark.parametrize('sweep,kwargs', [
    (witness_sweep, {'elements': 3}),
    (exponent_sweep, {'cases': 40}),
    (shrink_sweep, {'one_by_two': 10, 'two_by_four': 3}),
    (completion_sweep, {'cases': 60}),
    (torus_sweep, {'singles': 8, 'pairs': 2}),
    (tamper_sweep, {'cases': 5}),
])
def test_reduced_sweep_passes(sweep, kwargs):
    result = sweep(seed=1, **kwargs)
    assert result['status'] == 'passed', result['first_failure']
    assert result['cases'] > 0


def test_embedding_is_exhaustive():
    result = embedding_sweep()
    assert result['status'] == 'passed', result['first_failure']
    assert result['cases'] == 4 + 9 + 16 + 9


def test_witness_sweep_counts_every_neighborhood():
    assert witness_sweep(elements=1)['cases'] == 2 * 10


def test_random_primitive_vectors_are_primitive():
    import random
    from math import gcd
    rng = random.Random(4)
    for _ in range(50):
        d = random_primitive_vector(rng)
        g = 0
        for c in d:
            g = gcd(g, c)
        assert g == 1
        assert 1 <= len(d) <= 6
