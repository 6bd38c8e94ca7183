"""Named category formulas against algebraic oracles on every object and morphism."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..algebra.rings import matrix, poly_quotient, product, zmod
from ..algebra.structure import idempotents
from ..modules.module import end_ring
from ..modules.skeleton import find_section, module_predicates
from .formulas import eval_named_formula
from .model import CategoryModel

# (ring spec, skeleton bound) pairs swept by the agreement check
PINNED_PAIRS = (
    (zmod(2), 4),
    (zmod(3), 9),
    (zmod(4), 4),
    (poly_quotient(2, [0, 0, 1]), 4),
    (poly_quotient(2, [1, 1, 1]), 4),
    (product(zmod(2), zmod(2)), 4),
    (zmod(6), 6),
    (matrix(zmod(2), 2), 16),
)

OBJECT_FORMULAS = ("simp", "projective", "injective", "generator", "generator_additive",
                   "proobr_bounded", "comm", "local", "zero_object")
MORPHISM_FORMULAS = ("mono", "epi", "retraction", "equivalence", "zero_morphism")


def object_oracles(cat: CategoryModel, x: int) -> dict[str, bool | None]:
    m = cat.skeleton.modules[x]
    pr = module_predicates(m, cat.skeleton)
    e, _ = end_ring(m)
    prog = bool(pr.progenerator)
    return {
        "simp": pr.simple,
        "projective": pr.projective,
        "injective": pr.injective,
        "generator": pr.generator,
        "generator_additive": pr.generator,
        "proobr_bounded": pr.progenerator,
        "comm": prog and e.is_commutative(),
        # a finite ring is local iff 0 and 1 are its only idempotents
        "local": prog and len(idempotents(e)) == 2,
        "zero_object": m.size == 1,
    }


def morphism_oracles(cat: CategoryModel, f: int) -> dict[str, bool]:
    h = cat.hom(f)
    return {
        "mono": h.is_injective(),
        "epi": h.is_surjective(),
        "retraction": find_section(h) is not None,
        "equivalence": h.is_injective() and h.is_surjective(),
        "zero_morphism": h.is_zero(),
    }


@dataclass
class AgreementReport:
    category: str
    objects: int
    morphisms: int
    checks: dict[str, int] = field(default_factory=dict)
    disagreements: list[tuple[str, int, bool, bool | None]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def to_json(self) -> dict:
        return {"category": self.category, "objects": self.objects, "morphisms": self.morphisms,
                "checks": dict(sorted(self.checks.items())),
                "disagreements": [{"formula": n, "at": a, "formula_value": v, "oracle": o}
                                  for n, a, v, o in self.disagreements],
                "ok": self.ok}


def formula_oracle_agreement(cat: CategoryModel) -> AgreementReport:
    """Every object formula at every object and every morphism formula at every morphism."""
    rep = AgreementReport(cat.model.name, cat.n_objects, cat.n_morphisms)
    for x in cat.objects():
        for name, want in object_oracles(cat, x).items():
            got = eval_named_formula(cat, name, [x])
            rep.checks[name] = rep.checks.get(name, 0) + 1
            if got != want:
                rep.disagreements.append((name, x, got, want))
    for f in cat.morphisms():
        for name, want in morphism_oracles(cat, f).items():
            got = eval_named_formula(cat, name, [f])
            rep.checks[name] = rep.checks.get(name, 0) + 1
            if got != want:
                rep.disagreements.append((name, f, got, want))
    return rep
