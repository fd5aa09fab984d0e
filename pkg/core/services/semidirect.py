"""
Semidirect Product Module
-------------------------
X x|_alpha Z and X x| H, the construction F(X) = HM0(X) x|_alpha Z, and the
explicit three-factor witnesses s1 * u * s2 for duoseparability.

Witness sign convention: when alpha^n(f) lies in the neighborhood, the left
factor is (unit, -n).
"""

import logging
from dataclasses import dataclass

from core.utils.error_handlers import InputError, SemanticFailure
from .hm import (
    DEFAULT_SQUEEZE,
    Homomorphism,
    SqueezeMap,
    absorb_exponent,
    flatten_subbasic,
    hm_embed,
    hm_map,
    hm_nbhd_normalize,
)
from .magma import (
    EpsBox,
    HM0Of,
    Pair,
    ProductDiscrete,
    RationalVectorGroup,
    ScalingPower,
    SemidirectAut,
    SemidirectZ,
    ShapeMismatch,
    SqueezePower,
    aut_act,
    aut_compose,
    aut_inverse,
    aut_power,
    check_element,
    check_nbhd,
    element_inverse,
    label,
    nbhd_member,
    op_apply,
    unit_of,
    discrete_unit,
)

logger = logging.getLogger(__name__)

LEFT = 'left'    # s1 * (u * s2)
RIGHT = 'right'  # (s1 * u) * s2
ASSOCIATIONS = (LEFT, RIGHT)

# Halving steps tried before a vector-group absorption gives up.
MAX_SCALING_STEPS = 4096


@dataclass(frozen=True)
class DuoWitness:
    s1: Pair
    u: Pair
    s2: Pair
    association: str = LEFT


def _require_semidirect(M) -> None:
    if not isinstance(M, (SemidirectZ, SemidirectAut)):
        raise ShapeMismatch(f"{label(M)} is not a semidirect product")


def sd_multiply(M, p: Pair, q: Pair) -> Pair:
    """(x, n) * (y, m) = (x * alpha^n(y), n + m); (x, f) * (y, g) = (x * f(y), f o g)."""
    _require_semidirect(M)
    check_element(M, p)
    check_element(M, q)
    if isinstance(M, SemidirectZ):
        twisted = aut_act(aut_power(M.generator, p.right), q.left)
        return Pair(op_apply(M.base, p.left, twisted), p.right + q.right)
    twisted = aut_act(p.right, q.left)
    return Pair(op_apply(M.base, p.left, twisted), aut_compose(p.right, q.right))


def sd_unit(M) -> Pair:
    _require_semidirect(M)
    return unit_of(M)


def sd_invert(M, p: Pair) -> Pair:
    """(alpha^-n(x^-1), -n), resp. (f^-1(x^-1), f^-1)."""
    _require_semidirect(M)
    check_element(M, p)
    x_inv = element_inverse(M.base, p.left)
    if isinstance(M, SemidirectZ):
        return Pair(aut_act(aut_power(M.generator, -p.right), x_inv), -p.right)
    f_inv = aut_inverse(p.right)
    return Pair(aut_act(f_inv, x_inv), f_inv)


def build_F(X, s: SqueezeMap = DEFAULT_SQUEEZE) -> SemidirectZ:
    """F(X) = HM0(X) x| Z with the squeeze automorphism as generator."""
    return SemidirectZ(HM0Of(X, s), SqueezePower(1, s))


def build_scaling_group(dim: int, factor: int = 2) -> SemidirectZ:
    """Q^dim x| Z acting by v -> factor * v."""
    if dim < 1:
        raise InputError("Vector group dimension must be positive", {'dim': dim})
    return SemidirectZ(RationalVectorGroup(dim), ScalingPower(1, factor))


def embed_into_F(F: SemidirectZ, x) -> Pair:
    """x -> (i_x, 0)."""
    if not isinstance(F, SemidirectZ) or not isinstance(F.base, HM0Of):
        raise ShapeMismatch("embed_into_F needs a descriptor built by build_F")
    return Pair(hm_embed(F.base.base, x), 0)


def F_map(h: Homomorphism, F_X: SemidirectZ, F_Y: SemidirectZ, p: Pair) -> Pair:
    """
    F(h): (f, n) -> (h o f, n).

    Raises:
        ShapeMismatch: If F_X or F_Y is not an F(.) descriptor, the squeeze
            maps differ, or h does not go from the base of F_X to that of F_Y
    """
    for F in (F_X, F_Y):
        if not isinstance(F, SemidirectZ) or not isinstance(F.base, HM0Of):
            raise ShapeMismatch("F_map needs descriptors built by build_F")
    if F_X.base.squeeze != F_Y.base.squeeze:
        raise ShapeMismatch("F(X) and F(Y) use different squeeze maps")
    if h.source != F_X.base.base or h.target != F_Y.base.base:
        raise ShapeMismatch("Homomorphism does not match the bases of F(X) and F(Y)",
                            {'source': label(h.source), 'target': label(h.target)})
    check_element(F_X, p)
    return Pair(hm_map(h, p.left), p.right)


def associate(M, witness: DuoWitness, association: str) -> Pair:
    if association == LEFT:
        return op_apply(M, witness.s1, op_apply(M, witness.u, witness.s2))
    if association == RIGHT:
        return op_apply(M, op_apply(M, witness.s1, witness.u), witness.s2)
    raise InputError(f"Unknown association {association!r}")


def _post_verify(M, target: Pair, W: ProductDiscrete, witness: DuoWitness) -> DuoWitness:
    if not nbhd_member(M, W, witness.u):
        raise SemanticFailure("Witness middle factor is outside the neighborhood")
    for association in ASSOCIATIONS:
        if associate(M, witness, association) != target:
            raise SemanticFailure("Witness product does not reproduce the target",
                                  {'association': association})
    return witness


def _squeeze_exponent(M: SemidirectZ, f, W: ProductDiscrete) -> int:
    generator = M.generator
    if not isinstance(generator, SqueezePower) or generator.k not in (1, -1) \
            or generator.squeeze != M.base.squeeze:
        raise InputError("HM0 semidirect products need the squeeze map (or its inverse) as generator")
    N = hm_nbhd_normalize(flatten_subbasic(W.base), M.base.base)
    n = absorb_exponent(f, N, M.base.squeeze)
    return n * generator.k


def _scaling_exponent(M: SemidirectZ, x, W: ProductDiscrete) -> int:
    """Largest n <= 0 (nearest to 0) such that alpha^n(x) lies in W.base, for expanding alpha."""
    step = -1 if M.generator.k > 0 else 1
    n = 0
    for _ in range(MAX_SCALING_STEPS):
        if nbhd_member(M.base, W.base, aut_act(aut_power(M.generator, n), x)):
            return n
        n += step
    from .unimodular import AbsorptionFailed
    raise AbsorptionFailed("Scaling did not bring the vector into the neighborhood",
                           {'steps': MAX_SCALING_STEPS})


def duo_witness_z(M: SemidirectZ, target: Pair, W: ProductDiscrete) -> DuoWitness:
    """
    s1 = (unit, -n), u = (alpha^n(f), 0), s2 = (unit, n + m) for target (f, m).

    Both associations and the membership of u are checked before returning.

    Raises:
        NormalizationError: If W's base does not normalize to a unit neighborhood
        AbsorptionFailed: If a scaling generator cannot absorb the vector
    """
    if not isinstance(M, SemidirectZ):
        raise ShapeMismatch("duo_witness_z needs an X x| Z descriptor")
    if not isinstance(W, ProductDiscrete):
        raise InputError("Witness neighborhoods must have the product-with-discrete shape")
    check_element(M, target)
    check_nbhd(M, W)

    f, m = target.left, target.right
    if isinstance(M.base, HM0Of):
        n = _squeeze_exponent(M, f, W)
    elif isinstance(M.base, RationalVectorGroup) and isinstance(M.generator, ScalingPower):
        n = _scaling_exponent(M, f, W)
    else:
        raise InputError(f"No absorbing exponent search for {label(M)}")

    unit = unit_of(M.base)
    witness = DuoWitness(
        s1=Pair(unit, -n),
        u=Pair(aut_act(aut_power(M.generator, n), f), 0),
        s2=Pair(unit, n + m),
    )
    logger.info("Witness over %s uses exponent %s", label(M), n)
    return _post_verify(M, target, W, witness)


def duo_witness_group(M: SemidirectAut, target: Pair, W: ProductDiscrete, registry=None) -> DuoWitness:
    """
    s1 = (unit, g), u = (g^-1(x), id), s2 = (unit, g^-1 o h) for target (x, h),
    where g comes from the absorbing-family registry.

    Raises:
        AbsorptionFailed: If the registry cannot produce g
    """
    from .unimodular import get_registry

    if not isinstance(M, SemidirectAut):
        raise ShapeMismatch("duo_witness_group needs an X x| H descriptor")
    if not isinstance(W, ProductDiscrete):
        raise InputError("Witness neighborhoods must have the product-with-discrete shape")
    check_element(M, target)
    check_nbhd(M, W)
    if not isinstance(W.base, EpsBox):
        raise InputError("Group witnesses need an EpsBox base neighborhood")

    registry = registry or get_registry(M.registry_id)
    x, h = target.left, target.right
    identity = discrete_unit(M)
    if nbhd_member(M.base, W.base, x):
        g = identity
    else:
        g = registry.absorb([x], W.base)

    g_inv = aut_inverse(g)
    unit = unit_of(M.base)
    witness = DuoWitness(
        s1=Pair(unit, g),
        u=Pair(aut_act(g, x, 'inverse'), identity),
        s2=Pair(unit, aut_compose(g_inv, h)),
    )
    logger.info("Group witness over %s uses %s", label(M), g.matrix.rows)
    return _post_verify(M, target, W, witness)


def duo_witness(M, target: Pair, W: ProductDiscrete) -> DuoWitness:
    if isinstance(M, SemidirectZ):
        return duo_witness_z(M, target, W)
    if isinstance(M, SemidirectAut):
        return duo_witness_group(M, target, W)
    raise ShapeMismatch(f"Duo witnesses are computed for semidirect products, not {label(M)}")
