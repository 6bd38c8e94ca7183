"""Module categories as finite two-sorted models."""

from .model import (
    CategoryAxiomError, CategoryModel, encode_category, load_category_signature, verify_category_axioms,
)
from .formulas import FORMULA_NAMES, build_named_formula, eval_named_formula, formula_params
from .gr import (
    GrCertificate, NoPairing, Pairing, find_pairing, gr_certificate, gr_map, pairings,
    ring_from_endo_monoid, ring_sentence_to_category, xi_sentence, zero_map, zero_objects,
)
from .oracle import (
    MORPHISM_FORMULAS, OBJECT_FORMULAS, PINNED_PAIRS, AgreementReport, formula_oracle_agreement,
    morphism_oracles, object_oracles,
)
