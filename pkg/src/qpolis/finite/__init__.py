"""Brute-force ground truth over finite T0 spaces."""

from .borel import BorelCode, eval_borel, sigma2_code, sigma_level_membership
from .category import (
    cat_exists,
    cat_forall,
    is_baire_measurable,
    is_comeager,
    is_meager,
    verify_bairequant_identities,
    verify_kuratowski_ulam,
)
from .enumerate import all_t0_spaces, random_t0_space
from .order import (
    closure,
    diamond,
    down_map,
    irreducible_closed_sets,
    is_essential,
    lower_powerspace,
    saturation,
    sober_witness,
    specialization,
)
from .space import FiniteMap, FiniteSpace, all_maps, chain, discrete, sierpinski, sierpinski_power
from .transfer import canonical_transfer_data, finite_pi02_definition, pi02_transfer
