from .rings import (
    DEFAULT_CATALOG, FiniteRing, RingAxiomError, RingSpecError, build_ring, catalog_rings,
    matrix, opposite, poly_quotient, product, ring_from_tables, spec_name, verify_ring_axioms, zmod,
)
from .structure import (
    LinearCombination, RingFeatures, beautiful_characterization, center_elements,
    enumerate_beautiful, idempotents, inverse, is_beautiful, is_beautiful_exhaustive,
    ring_features, ring_generators, ring_isomorphic, sentence_phi_R, subring, units,
)
