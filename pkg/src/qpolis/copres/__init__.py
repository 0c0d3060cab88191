"""Copresentations: countably many generic opens with relations between them."""

from .build import (
    Refinement,
    adjoin_delta02,
    canonical_embedding,
    disjoint_union,
    glue,
    from_finite_space,
    join_topologies,
    lift,
    pi02_subspace,
    point,
    product,
    product_countable,
    retag,
    sierpinski,
    sierpinski_power,
    sigma_refine,
)
from .codes import (
    EMPTY,
    TOP,
    CountableIndex,
    Copresentation,
    EnumOpenCode,
    OpenCode,
    Pi02Relation,
    RelationFamily,
    code_mask,
)
