"""
Canonical JSON Codec
--------------------
Lossless JSON encoding of descriptors, elements, neighborhoods,
automorphisms and certificates (schema version "duomagma-v1").

Rationals are always written as "p/q" strings, objects are tagged by a
single key, keys are sorted and separators compact. Decoding is strict:
unknown fields are rejected and elements are parsed against their descriptor.
"""

import json
import logging
import re
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional

from core.utils.error_handlers import InputError
from .hm import SqueezeMap, StepFunction, step_canonicalize
from .lattice import RationalMatrix, UnimodularMatrix, parse_rational
from .magma import (
    Composite,
    EpsBox,
    FiniteAtom,
    FiniteMagma,
    FinitePermutation,
    HM0Of,
    HMSubbasic,
    Intersection,
    MatrixAut,
    Pair,
    ProductDiscrete,
    RationalTorus,
    RationalVector,
    RationalVectorGroup,
    ScalingPower,
    SemidirectAut,
    SemidirectZ,
    SqueezePower,
    Subset,
    TorusPoint,
    WholeSpace,
    check_element,
    check_nbhd,
    mk_finite_magma,
    mk_finite_permutation,
)
from .verify import CoverageMode, WitnessCertificate

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 'duomagma-v1'
RATIONAL_PATTERN = re.compile(r'-?[0-9]+(/[0-9]+)?')


class SchemaError(InputError):
    """Raised when a JSON document does not follow the duomagma-v1 schema."""
    pass


def dumps(document: Any) -> str:
    """Canonical JSON text: sorted keys, no insignificant whitespace."""
    return json.dumps(document, sort_keys=True, separators=(',', ':'), ensure_ascii=False)


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"Input is not valid JSON: {exc.msg}",
                          {'line': exc.lineno, 'column': exc.colno}) from exc


def expect_fields(doc: Any, required: Iterable[str], optional: Iterable[str] = (), where: str = 'object') -> Dict[str, Any]:
    if not isinstance(doc, dict):
        raise SchemaError(f"Expected a JSON object for {where}")
    required, optional = set(required), set(optional)
    missing = required - set(doc)
    unknown = set(doc) - required - optional
    if missing:
        raise SchemaError(f"Missing fields in {where}: {', '.join(sorted(missing))}")
    if unknown:
        raise SchemaError(f"Unknown fields in {where}: {', '.join(sorted(unknown))}")
    return doc


def _tagged(doc: Any, where: str):
    if not isinstance(doc, dict) or len(doc) != 1:
        raise SchemaError(f"Expected a single-key tagged object for {where}")
    return next(iter(doc.items()))


def expect_list(doc: Any, where: str) -> list:
    if not isinstance(doc, list):
        raise SchemaError(f"Expected a JSON array for {where}")
    return doc


def _int(doc: Any, where: str) -> int:
    if isinstance(doc, bool) or not isinstance(doc, int):
        raise SchemaError(f"Expected an integer for {where}")
    return doc


def encode_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def decode_rational(doc: Any) -> Fraction:
    """Accept integers and "p/q" (or "p") strings; decimal and exponent forms are rejected."""
    if isinstance(doc, bool) or not isinstance(doc, (str, int)):
        raise SchemaError("Rationals must be \"p/q\" strings")
    if isinstance(doc, str) and not RATIONAL_PATTERN.fullmatch(doc):
        raise SchemaError(f"Rationals must be \"p/q\" strings, got {doc!r}")
    return parse_rational(doc)


# --- Squeeze maps and automorphisms ---

def encode_squeeze(s: SqueezeMap) -> Dict[str, Any]:
    return {'pieces': [[encode_rational(a), encode_rational(p), encode_rational(q)] for a, p, q in s.pieces]}


def decode_squeeze(doc: Any) -> SqueezeMap:
    expect_fields(doc, ['pieces'], where='squeeze map')
    pieces = []
    for piece in expect_list(doc['pieces'], 'squeeze pieces'):
        if not isinstance(piece, list) or len(piece) != 3:
            raise SchemaError("Squeeze pieces are [start, slope, offset] triples")
        pieces.append(tuple(decode_rational(v) for v in piece))
    return SqueezeMap(tuple(pieces))


def encode_matrix(A: UnimodularMatrix) -> List[List[int]]:
    return A.to_list()


def decode_matrix(doc: Any) -> UnimodularMatrix:
    rows = expect_list(doc, 'matrix')
    return UnimodularMatrix(tuple(tuple(_int(x, 'matrix entry') for x in expect_list(row, 'matrix row')) for row in rows))


def encode_aut(alpha) -> Dict[str, Any]:
    if isinstance(alpha, FinitePermutation):
        return {'permutation': dict(alpha.mapping)}
    if isinstance(alpha, MatrixAut):
        return {'matrix': encode_matrix(alpha.matrix)}
    if isinstance(alpha, SqueezePower):
        return {'squeeze-power': {'k': alpha.k, 'squeeze': encode_squeeze(alpha.squeeze)}}
    if isinstance(alpha, ScalingPower):
        return {'scaling-power': {'k': alpha.k, 'factor': alpha.factor}}
    if isinstance(alpha, Composite):
        return {'composite': [encode_aut(part) for part in alpha.parts]}
    raise SchemaError(f"Cannot encode automorphism {type(alpha).__name__}")


def decode_aut(doc: Any, base=None):
    tag, body = _tagged(doc, 'automorphism')
    if tag == 'permutation':
        if not isinstance(body, dict):
            raise SchemaError("Permutations are symbol-to-symbol objects")
        if isinstance(base, FiniteMagma):
            return mk_finite_permutation(base, body)
        return FinitePermutation(tuple(body.items()))
    if tag == 'matrix':
        return MatrixAut(decode_matrix(body))
    if tag == 'squeeze-power':
        expect_fields(body, ['k', 'squeeze'], where='squeeze power')
        return SqueezePower(_int(body['k'], 'k'), decode_squeeze(body['squeeze']))
    if tag == 'scaling-power':
        expect_fields(body, ['k', 'factor'], where='scaling power')
        return ScalingPower(_int(body['k'], 'k'), _int(body['factor'], 'factor'))
    if tag == 'composite':
        return Composite(tuple(decode_aut(part, base) for part in expect_list(body, 'composite')))
    raise SchemaError(f"Unknown automorphism tag {tag!r}")


# --- Descriptors ---

def encode_descriptor(M) -> Dict[str, Any]:
    if isinstance(M, FiniteMagma):
        return {'kind': 'finite', 'elements': list(M.elements),
                'table': [list(row) for row in M.table], 'unit': M.unit}
    if isinstance(M, RationalVectorGroup):
        return {'kind': 'vector', 'dim': M.dim}
    if isinstance(M, RationalTorus):
        return {'kind': 'torus', 'dim': M.dim}
    if isinstance(M, HM0Of):
        return {'kind': 'hm0', 'base': encode_descriptor(M.base), 'squeeze': encode_squeeze(M.squeeze)}
    if isinstance(M, SemidirectZ):
        return {'kind': 'semidirect-z', 'base': encode_descriptor(M.base),
                'generator': encode_aut(M.generator)}
    if isinstance(M, SemidirectAut):
        from .unimodular import get_registry
        registry = get_registry(M.registry_id)
        return {'kind': 'semidirect-aut', 'base': encode_descriptor(M.base),
                'registry': {'id': M.registry_id, 'dim': registry.dim,
                             'seeds': [encode_matrix(s) for s in registry.seeds]}}
    raise SchemaError(f"Cannot encode descriptor {type(M).__name__}")


def _positive_dim(doc: Any) -> int:
    dim = _int(doc, 'dim')
    if dim < 1:
        raise SchemaError("Dimensions must be positive")
    return dim


def decode_descriptor(doc: Any):
    if not isinstance(doc, dict) or 'kind' not in doc:
        raise SchemaError("Descriptors are objects with a 'kind' field")
    kind = doc['kind']
    if kind == 'finite':
        expect_fields(doc, ['kind', 'elements', 'table', 'unit'], where='finite descriptor')
        return mk_finite_magma(expect_list(doc['elements'], 'elements'), expect_list(doc['table'], 'table'), doc['unit'])
    if kind == 'vector':
        expect_fields(doc, ['kind', 'dim'], where='vector descriptor')
        return RationalVectorGroup(_positive_dim(doc['dim']))
    if kind == 'torus':
        expect_fields(doc, ['kind', 'dim'], where='torus descriptor')
        return RationalTorus(_positive_dim(doc['dim']))
    if kind == 'hm0':
        expect_fields(doc, ['kind', 'base', 'squeeze'], where='hm0 descriptor')
        return HM0Of(decode_descriptor(doc['base']), decode_squeeze(doc['squeeze']))
    if kind == 'semidirect-z':
        expect_fields(doc, ['kind', 'base', 'generator'], where='semidirect-z descriptor')
        base = decode_descriptor(doc['base'])
        return SemidirectZ(base, decode_aut(doc['generator'], base))
    if kind == 'semidirect-aut':
        from .unimodular import ensure_registry
        expect_fields(doc, ['kind', 'base', 'registry'], where='semidirect-aut descriptor')
        base = decode_descriptor(doc['base'])
        body = expect_fields(doc['registry'], ['id', 'dim', 'seeds'], where='registry')
        registry = ensure_registry(_positive_dim(body['dim']),
                                   [decode_matrix(s) for s in expect_list(body['seeds'], 'seeds')])
        if registry.registry_id != body['id']:
            raise SchemaError("Registry id does not match its dimension and seeds",
                              {'expected': registry.registry_id, 'got': body['id']})
        if not isinstance(base, (RationalTorus, RationalVectorGroup)) or base.dim != registry.dim:
            raise SchemaError("Registry dimension does not match the base")
        return SemidirectAut(base, registry.registry_id)
    raise SchemaError(f"Unknown descriptor kind {kind!r}")


# --- Elements ---

def encode_element(x) -> Dict[str, Any]:
    if isinstance(x, FiniteAtom):
        return {'atom': x.name}
    if isinstance(x, RationalVector):
        return {'vector': [encode_rational(c) for c in x.coords]}
    if isinstance(x, TorusPoint):
        return {'torus': [encode_rational(c) for c in x.coords]}
    if isinstance(x, StepFunction):
        return {'step': [[encode_rational(a), encode_element(v)] for a, v in x.pieces]}
    if isinstance(x, Pair):
        right = encode_aut(x.right) if isinstance(x.right, MatrixAut) else x.right
        return {'pair': [encode_element(x.left), right]}
    raise SchemaError(f"Cannot encode element {type(x).__name__}")


def decode_element(M, doc: Any):
    """Parse an element against its descriptor and check it belongs to M."""
    tag, body = _tagged(doc, 'element')
    if tag == 'atom':
        if not isinstance(body, str):
            raise SchemaError("Atoms are symbol strings")
        x = FiniteAtom(body)
    elif tag == 'vector':
        x = RationalVector(tuple(decode_rational(c) for c in expect_list(body, 'vector')))
    elif tag == 'torus':
        x = TorusPoint(tuple(decode_rational(c) for c in expect_list(body, 'torus')))
    elif tag == 'step':
        if not isinstance(M, HM0Of):
            raise SchemaError("Step functions belong to HM0 descriptors")
        raw = []
        for piece in expect_list(body, 'step'):
            if not isinstance(piece, list) or len(piece) != 2:
                raise SchemaError("Step pieces are [breakpoint, value] pairs")
            raw.append((decode_rational(piece[0]), decode_element(M.base, piece[1])))
        x = step_canonicalize(raw, M.base)
    elif tag == 'pair':
        if not isinstance(M, (SemidirectZ, SemidirectAut)):
            raise SchemaError("Pairs belong to semidirect descriptors")
        items = expect_list(body, 'pair')
        if len(items) != 2:
            raise SchemaError("Pairs have exactly two components")
        left = decode_element(M.base, items[0])
        if isinstance(M, SemidirectZ):
            right = _int(items[1], 'pair exponent')
        else:
            right = decode_aut(items[1])
        x = Pair(left, right)
    else:
        raise SchemaError(f"Unknown element tag {tag!r}")
    check_element(M, x)
    return x


# --- Neighborhoods ---

def encode_nbhd(U) -> Dict[str, Any]:
    if isinstance(U, EpsBox):
        body = {'eps': encode_rational(U.eps)}
        if U.coords is not None:
            body['coords'] = list(U.coords)
        return {'eps-box': body}
    if isinstance(U, Subset):
        members = sorted((encode_element(x) for x in U.members), key=dumps)
        return {'subset': members}
    if isinstance(U, HMSubbasic):
        return {'hm-subbasic': {'inner': encode_nbhd(U.inner), 'a': encode_rational(U.a),
                                'b': encode_rational(U.b), 'eps': encode_rational(U.eps)}}
    if isinstance(U, Intersection):
        return {'intersection': [encode_nbhd(part) for part in U.parts]}
    if isinstance(U, ProductDiscrete):
        return {'product-discrete': encode_nbhd(U.base)}
    if isinstance(U, WholeSpace):
        return {'whole-space': {}}
    raise SchemaError(f"Cannot encode neighborhood {type(U).__name__}")


def decode_nbhd(M, doc: Any):
    tag, body = _tagged(doc, 'neighborhood')
    if tag == 'eps-box':
        expect_fields(body, ['eps'], ['coords'], where='eps-box')
        coords = body.get('coords')
        if coords is not None:
            coords = tuple(_int(c, 'coordinate') for c in expect_list(coords, 'coords'))
        U = EpsBox(decode_rational(body['eps']), coords)
    elif tag == 'subset':
        U = Subset(frozenset(decode_element(M, x) for x in expect_list(body, 'subset')))
    elif tag == 'hm-subbasic':
        if not isinstance(M, HM0Of):
            raise SchemaError("Subbasic sets belong to HM0 descriptors")
        expect_fields(body, ['inner', 'a', 'b', 'eps'], where='hm-subbasic')
        U = HMSubbasic(decode_nbhd(M.base, body['inner']), decode_rational(body['a']),
                       decode_rational(body['b']), decode_rational(body['eps']))
    elif tag == 'intersection':
        U = Intersection(tuple(decode_nbhd(M, part) for part in expect_list(body, 'intersection')))
    elif tag == 'product-discrete':
        if not isinstance(M, (SemidirectZ, SemidirectAut)):
            raise SchemaError("Product neighborhoods belong to semidirect descriptors")
        U = ProductDiscrete(decode_nbhd(M.base, body))
    elif tag == 'whole-space':
        expect_fields(body, [], where='whole-space')
        U = WholeSpace()
    else:
        raise SchemaError(f"Unknown neighborhood tag {tag!r}")
    check_nbhd(M, U)
    return U


# --- Documents ---

def _check_version(doc: Dict[str, Any]) -> None:
    if doc.get('version') != SCHEMA_VERSION:
        raise SchemaError(f"Unsupported schema version {doc.get('version')!r}",
                          {'expected': SCHEMA_VERSION})


def encode_descriptor_document(M) -> Dict[str, Any]:
    return {'version': SCHEMA_VERSION, 'descriptor': encode_descriptor(M)}


def decode_descriptor_document(doc: Any):
    expect_fields(doc, ['version', 'descriptor'], where='descriptor document')
    _check_version(doc)
    return decode_descriptor(doc['descriptor'])


def encode_certificate(c: WitnessCertificate) -> Dict[str, Any]:
    doc = {
        'version': SCHEMA_VERSION,
        'mode': {'shape': c.mode.shape, 'cardinality': c.mode.cardinality},
        'magma': encode_descriptor(c.magma),
        'element': encode_element(c.element),
        'neighborhood': encode_nbhd(c.neighborhood),
        'witness': [encode_element(x) for x in c.witness],
        'association': c.association,
        'slots': list(c.slots),
    }
    if c.s_set is not None:
        doc['s_set'] = [encode_element(x) for x in c.s_set]
    if c.f_set is not None:
        doc['f_set'] = [encode_element(x) for x in c.f_set]
    return doc


def decode_certificate(doc: Any) -> WitnessCertificate:
    expect_fields(doc, ['version', 'mode', 'magma', 'element', 'neighborhood', 'witness', 'association', 'slots'],
          ['s_set', 'f_set'], where='certificate')
    _check_version(doc)
    mode_doc = expect_fields(doc['mode'], ['shape', 'cardinality'], where='mode')
    M = decode_descriptor(doc['magma'])

    def elements(key: str) -> Optional[tuple]:
        if key not in doc:
            return None
        return tuple(decode_element(M, x) for x in expect_list(doc[key], key))

    slots = expect_list(doc['slots'], 'slots')
    if not all(isinstance(tag, str) for tag in slots):
        raise SchemaError("Slot tags are strings")
    return WitnessCertificate(
        mode=CoverageMode(mode_doc['shape'], mode_doc['cardinality']),
        magma=M,
        element=decode_element(M, doc['element']),
        neighborhood=decode_nbhd(M, doc['neighborhood']),
        witness=tuple(decode_element(M, x) for x in expect_list(doc['witness'], 'witness')),
        association=doc['association'],
        slots=tuple(slots),
        s_set=elements('s_set'),
        f_set=elements('f_set'),
    )


def decode_rational_matrix(doc: Any) -> RationalMatrix:
    expect_fields(doc, ['rows'], where='matrix document')
    rows = expect_list(doc['rows'], 'rows')
    return RationalMatrix(tuple(tuple(decode_rational(x) for x in expect_list(row, 'row')) for row in rows))


def encode_shrink_result(X: RationalMatrix, A: UnimodularMatrix) -> Dict[str, Any]:
    XA = X.times(A)
    return {
        'version': SCHEMA_VERSION,
        'A': encode_matrix(A),
        'XA': [[encode_rational(x) for x in row] for row in XA.rows],
        'det': A.det(),
    }
