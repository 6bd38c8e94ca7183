"""Finite right modules over finite rings."""

from .module import (
    FiniteModule, ModuleAxiomError, ModuleHom, cyclic, direct_sum, direct_sum_maps, end_ring,
    free_module, generating_set, hom_search, hom_set, identity_hom, is_homomorphism, is_submodule,
    make_module, module_isomorphic, quotient, regular_module, restrict, span, submodule_sum,
    submodules, verify_module_axioms, zero_hom, zero_module,
)
from .skeleton import (
    ModulePredicates, MoritaResult, Skeleton, abelian_groups, build_skeleton, canonical_cover,
    find_section, generator_power, is_injective_baer, is_injective_relative, is_projective,
    is_simple, iter_modules, module_predicates, morita_similar, summand_of_free,
)
