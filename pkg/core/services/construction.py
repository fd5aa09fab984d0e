"""
Construction Pipeline
---------------------
Turns a ConstructionSpec document into a magma descriptor.

    {"base": {"kind": "cyclic", "params": {"order": 2}},
     "pipeline": [{"op": "hm0"}, {"op": "semidirect-z"}]}

Steps apply left to right, so the pipeline can be repeated to nest F(F(X)).
"""

import logging
from typing import Any, Dict

from core.forms import ConstructionBaseForm, PipelineStepForm
from .codec import SchemaError, decode_aut, decode_matrix, decode_squeeze, expect_fields, expect_list
from .hm import DEFAULT_SQUEEZE
from .magma import (
    HM0Of,
    RationalTorus,
    RationalVectorGroup,
    ScalingPower,
    SemidirectZ,
    SqueezePower,
    cyclic_magma,
    label,
    mk_finite_magma,
)
from .unimodular import torus_duo_group

logger = logging.getLogger(__name__)


def _form_errors(form) -> str:
    return '; '.join(f"{name}: {' '.join(errors)}" for name, errors in form.errors.items())


def build_base(doc: Dict[str, Any]):
    expect_fields(doc, ['kind'], ['params'], where='construction base')
    params = doc.get('params', {})
    if not isinstance(params, dict):
        raise SchemaError("Base params must be an object")
    kind = doc['kind']

    if kind == 'table':
        expect_fields(params, ['elements', 'table', 'unit'], where='table params')
        form = ConstructionBaseForm({'kind': kind})
        if not form.is_valid():
            raise SchemaError(f"Invalid construction base: {_form_errors(form)}")
        return mk_finite_magma(expect_list(params['elements'], 'elements'), expect_list(params['table'], 'table'),
                               params['unit'])

    allowed = {'cyclic': ['order'], 'vector': ['dim'], 'torus': ['dim']}.get(kind, [])
    expect_fields(params, allowed, where=f"{kind} params")
    form = ConstructionBaseForm({'kind': kind, **params})
    if not form.is_valid():
        raise SchemaError(f"Invalid construction base: {_form_errors(form)}")
    data = form.cleaned_data
    if kind == 'cyclic':
        return cyclic_magma(data['order'])
    if kind == 'vector':
        return RationalVectorGroup(data['dim'])
    return RationalTorus(data['dim'])


def apply_step(current, step: Dict[str, Any]):
    expect_fields(step, ['op'], ['params'], where='pipeline step')
    params = step.get('params', {})
    if not isinstance(params, dict):
        raise SchemaError("Step params must be an object")
    form = PipelineStepForm({'op': step['op'], 'factor': params.get('factor')})
    if not form.is_valid():
        raise SchemaError(f"Invalid pipeline step: {_form_errors(form)}")
    op = form.cleaned_data['op']

    if op == 'hm0':
        expect_fields(params, [], ['squeeze'], where='hm0 params')
        squeeze = params.get('squeeze', 'default')
        s = DEFAULT_SQUEEZE if squeeze == 'default' else decode_squeeze(squeeze)
        return HM0Of(current, s)

    if op == 'semidirect-z':
        expect_fields(params, [], ['generator', 'factor'], where='semidirect-z params')
        if 'generator' in params:
            return SemidirectZ(current, decode_aut(params['generator'], current))
        if isinstance(current, HM0Of):
            return SemidirectZ(current, SqueezePower(1, current.squeeze))
        if isinstance(current, RationalVectorGroup):
            return SemidirectZ(current, ScalingPower(1, form.cleaned_data['factor'] or 2))
        raise SchemaError(f"semidirect-z over {label(current)} needs an explicit generator")

    expect_fields(params, [], ['seeds'], where='semidirect-aut params')
    if not isinstance(current, RationalTorus):
        raise SchemaError("semidirect-aut needs a torus base")
    seeds = [decode_matrix(s) for s in expect_list(params.get('seeds', []), 'seeds')]
    return torus_duo_group(current.dim, seeds)


def build_construction(doc: Any):
    """
    Build the descriptor for a ConstructionSpec document.

    Raises:
        SchemaError: If the document or one of its steps is malformed
    """
    expect_fields(doc, ['base'], ['pipeline', 'version'], where='construction spec')
    current = build_base(doc['base'])
    for step in expect_list(doc.get('pipeline', []), 'pipeline'):
        current = apply_step(current, step)
    logger.info("Built %s", label(current))
    return current
