"""The `modeq` command line: one JSON report per command, exit 0 / 1 / 2."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import caps
from .algebra.rings import (
    DEFAULT_CATALOG, FiniteRing, RingAxiomError, RingSpecError, build_ring, matrix, poly_quotient, product,
    spec_name, zmod,
)
from .algebra.structure import ring_features, ring_isomorphic, sentence_phi_R
from .category import (
    PINNED_PAIRS, CategoryAxiomError, NoPairing, encode_category, eval_named_formula,
    formula_oracle_agreement, formula_params, gr_certificate, xi_sentence,
)
from .groups import (
    GroupAxiomError, check_transvection_identities, gl_model, matrix_ring, relativize_group_sentence,
)
from .lattice import (
    LatticeError, lattice_definable_ops, projective_space, recover_end_ring, sampled_products,
    standard_copies, submodule_matrix_encoding,
)
from .logic.semantics import evaluate, models_isomorphic
from .logic.syntax import GROUP_SIGNATURE
from .logic.text import format_formula, parse_formula
from .modules import build_skeleton, end_ring, module_predicates
from .samples import group_sentences, ring_sentences
from .ultra import (
    FilterError, check_ultrapower_equivalence, enumerate_filters, filter_product, principal_filter,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

SHORTHANDS = {
    "f4": poly_quotient(2, [1, 1, 1]),
    "f2x2": poly_quotient(2, [0, 0, 1]),
    "m2f2": matrix(zmod(2), 2),
    "z2xz2": product(zmod(2), zmod(2)),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    catalog: tuple[dict, ...] = DEFAULT_CATALOG
    bound: int = 16
    seed: int = 0
    out: Path | None = None


@dataclass
class Outcome:
    name: str
    report: dict
    violation: bool = False


def ring_spec(text: str) -> dict:
    """A ring from a JSON file, inline JSON, or a shorthand (zmod<n>, f4, f2x2, m2f2, z2xz2)."""
    key = text.strip().lower()
    if key.startswith("zmod") and key[4:].isdigit():
        return zmod(int(key[4:]))
    if key in SHORTHANDS:
        return SHORTHANDS[key]
    path = Path(text)
    if path.is_file():
        raw = path.read_text()
    elif text.lstrip().startswith("{"):
        raw = text
    else:
        raise UsageError(f"ring {text!r} is neither a file, inline JSON nor a known shorthand")
    try:
        spec = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"ring spec is not valid JSON: {exc}") from exc
    if not isinstance(spec, dict):
        raise UsageError("ring spec must be a JSON object")
    return spec


def load_ring(text: str) -> FiniteRing:
    return build_ring(ring_spec(text))


def _labels(r: FiniteRing, xs) -> list[str]:
    return [r.labels[x] for x in sorted(xs)]


def features_report(r: FiniteRing) -> dict:
    f = ring_features(r)
    return {"ring": r.name, "size": r.size, "commutative": r.is_commutative(),
            "characteristic": r.characteristic(), "units": _labels(r, f.units),
            "central_idempotents": _labels(r, f.central_idempotents),
            "center": _labels(r, f.center_elements)}


# ---- command handlers -------------------------------------------------------------

def cmd_ring_new(a, cfg) -> Outcome:
    r = load_ring(a.spec)
    rep = {"ring": r.name, "spec": r.spec, "size": r.size,
           "add": r.add.tolist(), "mul": r.mul.tolist(), "labels": list(r.labels)}
    if a.features:
        rep["features"] = features_report(r)
    return Outcome("ring_new", rep)


def cmd_ring_features(a, cfg) -> Outcome:
    return Outcome("ring_features", features_report(load_ring(a.spec)))


def cmd_ring_iso(a, cfg) -> Outcome:
    r, s = load_ring(a.spec), load_ring(a.other)
    iso = ring_isomorphic(r, s)
    return Outcome("ring_iso", {"left": r.name, "right": s.name, "isomorphic": iso is not None,
                                "map": None if iso is None else {r.labels[x]: s.labels[y] for x, y in enumerate(iso)}})


def _skeleton(a):
    r = load_ring(a.ring)
    return r, build_skeleton(r, a.bound)


def cmd_module_skeleton(a, cfg) -> Outcome:
    r, sk = _skeleton(a)
    return Outcome("module_skeleton", {
        "ring": r.name, "bound": a.bound, "objects": len(sk), "morphisms": sk.morphism_count(),
        "regular": sk.regular,
        "modules": [{"index": i, "name": m.name, "size": m.size} for i, m in enumerate(sk.modules)]})


def cmd_module_predicates(a, cfg) -> Outcome:
    r, sk = _skeleton(a)
    rows = [dict(index=i, name=m.name, **module_predicates(m, sk).to_json()) for i, m in enumerate(sk.modules)]
    return Outcome("module_predicates", {"ring": r.name, "bound": a.bound, "modules": rows})


def cmd_cat_encode(a, cfg) -> Outcome:
    r, sk = _skeleton(a)
    cat = encode_category(sk)
    return Outcome("cat_encode", {"ring": r.name, "bound": a.bound, "objects": cat.n_objects,
                                  "morphisms": cat.n_morphisms, "axioms_verified": True,
                                  "identities": list(cat.identities)})


def cmd_cat_eval(a, cfg) -> Outcome:
    r, sk = _skeleton(a)
    cat = encode_category(sk)
    if a.formula:
        params = formula_params(a.formula)
        if len(a.args) != len(params):
            raise UsageError(f"{a.formula} takes {len(params)} argument(s): "
                             + ", ".join(f"{v.name}:{v.sort}" for v in params))
        value = eval_named_formula(cat, a.formula, a.args)
        return Outcome("cat_eval", {"ring": r.name, "bound": a.bound, "formula": a.formula,
                                    "args": list(a.args), "value": value})
    rep = formula_oracle_agreement(cat)
    return Outcome("cat_eval", rep.to_json(), not rep.ok)


def cmd_cat_gr(a, cfg) -> Outcome:
    r, sk = _skeleton(a)
    cat = encode_category(sk)
    p = sk.regular if a.object is None else a.object
    if p is None:
        raise UsageError("R_R is not in the skeleton; raise --bound or pass --object")
    try:
        cert = gr_certificate(cat, p)
    except NoPairing as exc:
        return Outcome("cat_gr", {"ring": r.name, "object": p, "error": str(exc)}, True)
    end, _ = end_ring(sk.modules[p])
    to_end = ring_isomorphic(cert.ring, end)
    to_r = ring_isomorphic(cert.ring, r)
    pr = cert.pairing
    rep = {"ring": r.name, "bound": a.bound, "object": p, "object_name": sk.modules[p].name,
           "pairing": {"Q": pr.q, "i1": pr.i1, "i2": pr.i2, "p1": pr.p1, "p2": pr.p2},
           "elements": cert.elements, "gr": {str(f): g for f, g in sorted(cert.gr.items())},
           "add": cert.ring.add.tolist(), "mul": cert.ring.mul.tolist(),
           "isomorphic_to_end": to_end is not None, "isomorphic_to_ring": to_r is not None,
           "certificate": f"recovered ≅ {r.name}" if to_r is not None
           else ("recovered ≅ End(P)" if to_end is not None else "recovery failed")}
    return Outcome("cat_gr", rep, to_end is None)


def cmd_cat_xi(a, cfg) -> Outcome:
    r, sk = _skeleton(a)
    s = load_ring(a.sentence_of)
    cat = encode_category(sk)
    value = evaluate(cat.model, xi_sentence(sentence_phi_R(s)))
    return Outcome("cat_xi", {"category_of": r.name, "bound": a.bound, "sentence_of": s.name, "value": value})


def cmd_ultra_enum(a, cfg) -> Outcome:
    en = enumerate_filters(a.index)
    return Outcome("ultra_enum", {"index_size": a.index, "filters": [d.describe() for d in en.filters],
                                  "ultrafilters": [d.describe() for d in en.ultrafilters]})


def cmd_ultra_product(a, cfg) -> Outcome:
    rings = [load_ring(x) for x in a.ring]
    gen = [int(x) for x in a.generator.split(",") if x.strip()] if a.generator else range(len(rings))
    d = principal_filter(len(rings), gen)
    prod = filter_product([r.model() for r in rings], d)
    matches = [r.name for r in rings if models_isomorphic(prod.model, r.model()) is not None]
    return Outcome("ultra_product", {**prod.describe(), "isomorphic_to_factors": matches})


def cmd_ultra_check(a, cfg) -> Outcome:
    r = load_ring(a.ring)
    rows, bad = [], False
    for d in enumerate_filters(a.index).ultrafilters:
        rep = check_ultrapower_equivalence(r.model(), d, ring_sentences())
        bad |= not rep.ok
        rows.append({"filter": rep.filter, "product_size": rep.product_size, "isomorphic": rep.isomorphic,
                     "sentences": len(rep.rows), "agree": rep.agree})
    return Outcome("ultra_check", {"ring": r.name, "index_size": a.index, "ultrapowers": rows}, bad)


def cmd_lattice_space(a, cfg) -> Outcome:
    r = load_ring(a.ring)
    ps = projective_space(r, a.rank)
    rep = {"ring": r.name, "rank": a.rank, "submodules": len(ps),
           "sizes": [len(s) for s in ps.subs]}
    if a.ops:
        ops = lattice_definable_ops(ps)
        rep["definable_ops"] = ops.to_json()
        return Outcome("lattice_space", rep, not ops.ok)
    return Outcome("lattice_space", rep)


def cmd_lattice_recover(a, cfg) -> Outcome:
    r = load_ring(a.ring)
    ps = projective_space(r, a.rank, enumerate=not a.lazy)
    copies = standard_copies(ps)
    if a.lazy:
        rows = sampled_products(copies, a.samples, cfg.seed)
        bad = not all(ok for *_, ok in rows)
        return Outcome("lattice_recover", {"ring": r.name, "rank": a.rank, "seed": cfg.seed,
                                           "sampled_products": [list(x) for x in rows]}, bad)
    rec = recover_end_ring(copies)
    rep = {"ring": r.name, "rank": a.rank, "certificate": rec.to_text(copies).splitlines(),
           "isomorphic_to_end": rec.isomorphism is not None, "identity_is_iso": rec.identity_is_iso,
           "isomorphic_to_ring": ring_isomorphic(rec.ring, r) is not None}
    return Outcome("lattice_recover", rep, not rec.ok)


def cmd_lattice_matrix(a, cfg) -> Outcome:
    r = load_ring(a.ring)
    ps = projective_space(r, a.rank)
    enc, rep = submodule_matrix_encoding(ps)
    out = {"ring": r.name, "rank": a.rank, "pairs": rep.pairs, "leq_mismatches": rep.leq_mismatches,
           "equivalence_mismatches": rep.equivalence_mismatches,
           "roundtrip_failures": rep.roundtrip_failures,
           "encodings": [enc.encode(s).tolist() for s in ps.subs]}
    return Outcome("lattice_matrix", out, not rep.ok)


def cmd_group_gl(a, cfg) -> Outcome:
    r = load_ring(a.ring)
    g = gl_model(r, a.n)
    m = g.ring
    return Outcome("group_gl", {"ring": r.name, "n": a.n, "order": g.order,
                                "elements": [m.labels[x] for x in g.elements]})


def cmd_group_identities(a, cfg) -> Outcome:
    r = load_ring(a.ring)
    reps = check_transvection_identities(r, a.n)
    checked = ("transvection", "second_corrected", "involution")
    bad = any(reps[k].failures for k in checked)
    return Outcome("group_identities", {"ring": r.name, "n": a.n,
                                        "identities": [reps[k].to_json() for k in sorted(reps)],
                                        "checked": list(checked)}, bad)


def cmd_group_relativize(a, cfg) -> Outcome:
    r = load_ring(a.ring)
    g = gl_model(r, a.n)
    ring_model = matrix_ring(r, a.n).model()
    sentences = [parse_formula(a.sentence, GROUP_SIGNATURE)] if a.sentence else list(group_sentences())
    rows, bad = [], False
    for phi in sentences:
        psi = relativize_group_sentence(phi)
        left, right = evaluate(g.model, phi), evaluate(ring_model, psi)
        bad |= left != right
        row = {"sentence": format_formula(phi), "group": left, "ring": right}
        if a.sentence:
            row["relativized"] = format_formula(psi)
        rows.append(row)
    return Outcome("group_relativize", {"ring": r.name, "n": a.n, "rows": rows,
                                        "agree": not bad}, bad)


def cmd_suite_all(a, cfg) -> Outcome:
    ns = argparse.Namespace
    parts: list[Outcome] = []
    for spec in cfg.catalog:
        parts.append(Outcome(f"features {spec_name(spec)}", features_report(build_ring(spec))))
    for spec, bound in PINNED_PAIRS:
        parts.append(cmd_cat_eval(ns(ring=json.dumps(spec), bound=bound, formula=None, args=[]), cfg))
    for spec in cfg.catalog:
        if build_ring(spec).size ** 2 <= 16:
            parts.append(cmd_cat_gr(ns(ring=json.dumps(spec), bound=build_ring(spec).size ** 2, object=None), cfg))
    for spec in cfg.catalog:
        parts.append(cmd_ultra_check(ns(ring=json.dumps(spec), index=2), cfg))
    for spec in (zmod(2), zmod(4), poly_quotient(2, [0, 0, 1])):
        parts.append(cmd_lattice_recover(ns(ring=json.dumps(spec), rank=3, lazy=False, samples=0), cfg))
    parts.append(cmd_lattice_recover(ns(ring=json.dumps(matrix(zmod(2), 2)), rank=3, lazy=True, samples=10), cfg))
    for spec, n in ((zmod(2), 2), (zmod(4), 2)):
        parts.append(cmd_lattice_space(ns(ring=json.dumps(spec), rank=n, ops=True), cfg))
    for spec, n in ((zmod(2), 3), (zmod(4), 2)):
        parts.append(cmd_lattice_matrix(ns(ring=json.dumps(spec), rank=n), cfg))
    for spec in (zmod(3), zmod(4)):
        parts.append(cmd_group_identities(ns(ring=json.dumps(spec), n=3), cfg))
    for spec, n in ((zmod(2), 2), (zmod(3), 2), (zmod(4), 1)):
        parts.append(cmd_group_relativize(ns(ring=json.dumps(spec), n=n, sentence=None), cfg))
    failures = [p.name for p in parts if p.violation]
    summary = [{"step": p.name, "ok": not p.violation} for p in parts]
    return Outcome("suite_all", {"catalog": [spec_name(s) for s in cfg.catalog], "seed": cfg.seed,
                                 "steps": summary, "failures": failures,
                                 "reports": [p.report for p in parts]}, bool(failures))


# ---- argument parsing ------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modeq", description=__doc__)
    p.add_argument("--out", type=Path, help="write the report under this directory")
    p.add_argument("--seed", type=int, default=0)
    top = p.add_subparsers(dest="group", required=True)

    def sub(group: str, helptext: str):
        g = top.add_parser(group, help=helptext)
        return g.add_subparsers(dest="command", required=True)

    def add(parent, name: str, fn: Callable, helptext: str):
        c = parent.add_parser(name, help=helptext)
        c.set_defaults(fn=fn)
        return c

    ring = sub("ring", "finite rings")
    c = add(ring, "new", cmd_ring_new, "build a ring and print its tables")
    c.add_argument("--spec", required=True)
    c.add_argument("--features", action="store_true")
    c = add(ring, "features", cmd_ring_features, "units, central idempotents, center")
    c.add_argument("--spec", required=True)
    c = add(ring, "iso", cmd_ring_iso, "isomorphism test")
    c.add_argument("--spec", required=True)
    c.add_argument("--other", required=True)

    mod = sub("module", "modules up to a size bound")
    for name, fn in (("skeleton", cmd_module_skeleton), ("predicates", cmd_module_predicates)):
        c = add(mod, name, fn, name)
        c.add_argument("--ring", required=True)
        c.add_argument("--bound", type=int, default=16)

    cat = sub("cat", "module categories as finite structures")
    for name, fn in (("encode", cmd_cat_encode), ("eval", cmd_cat_eval), ("gr", cmd_cat_gr), ("xi", cmd_cat_xi)):
        c = add(cat, name, fn, name)
        c.add_argument("--ring", required=True)
        c.add_argument("--bound", type=int, default=16)
        if name == "eval":
            c.add_argument("--formula")
            c.add_argument("args", nargs="*", type=int)
        if name == "gr":
            c.add_argument("--object", type=int)
        if name == "xi":
            c.add_argument("--sentence-of", required=True, help="ring whose characteristic sentence is translated")

    ul = sub("ultra", "filters and filter products")
    c = add(ul, "enum", cmd_ultra_enum, "all filters on an index set")
    c.add_argument("--index", type=int, required=True)
    c = add(ul, "product", cmd_ultra_product, "filter product of ring models")
    c.add_argument("--ring", action="append", required=True)
    c.add_argument("--generator", help="comma separated indices generating the filter (default: all)")
    c = add(ul, "check", cmd_ultra_check, "ultrapowers against the base ring")
    c.add_argument("--ring", required=True)
    c.add_argument("--index", type=int, default=2)

    lat = sub("lattice", "submodule lattices")
    c = add(lat, "space", cmd_lattice_space, "enumerate submodules")
    c.add_argument("--ring", required=True)
    c.add_argument("--rank", type=int, default=2)
    c.add_argument("--ops", action="store_true", help="check the definable operations")
    c = add(lat, "recover", cmd_lattice_recover, "End(R_R) from graph submodules of R^3")
    c.add_argument("--ring", required=True)
    c.add_argument("--rank", type=int, default=3)
    c.add_argument("--lazy", action="store_true", help="skip enumeration; sample products")
    c.add_argument("--samples", type=int, default=10)
    c = add(lat, "matrix", cmd_lattice_matrix, "submodules as matrices")
    c.add_argument("--ring", required=True)
    c.add_argument("--rank", type=int, default=2)

    grp = sub("group", "unit groups of matrix rings")
    c = add(grp, "gl", cmd_group_gl, "GL_n of a ring")
    c.add_argument("--ring", required=True)
    c.add_argument("--n", type=int, default=2)
    c = add(grp, "identities", cmd_group_identities, "commutator identities")
    c.add_argument("--ring", required=True)
    c.add_argument("--n", type=int, default=3)
    c = add(grp, "relativize", cmd_group_relativize, "group sentences as ring sentences")
    c.add_argument("--ring", required=True)
    c.add_argument("--n", type=int, default=2)
    c.add_argument("--sentence", help="one group sentence; default is the 25-sentence sample")

    st = sub("suite", "batch runs")
    c = add(st, "all", cmd_suite_all, "the default battery")
    c.add_argument("--catalog", default="default", help="'default' or a JSON file with a list of specs")
    return p


def _config(a) -> RunConfig:
    cfg = RunConfig(seed=a.seed, out=a.out)
    cat = getattr(a, "catalog", "default")
    if cat != "default":
        path = Path(cat)
        if not path.is_file():
            raise UsageError(f"catalog file {cat!r} not found")
        specs = json.loads(path.read_text())
        if not isinstance(specs, list):
            raise UsageError("catalog must be a JSON list of ring specs")
        cfg.catalog = tuple(specs)
    return cfg


def run_command(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = _parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _config(a)
        outcome = a.fn(a, cfg)
    except (LatticeError, GroupAxiomError, RingAxiomError, CategoryAxiomError) as exc:
        print(f"modeq: property violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (UsageError, RingSpecError, FilterError, ValueError, caps.CapExceeded) as exc:
        if isinstance(exc, caps.CapExceeded):
            msg = f"cap {exc.cap} exceeded: need {exc.needed}, limit {exc.limit}"
        else:
            msg = str(exc)
        print(f"modeq: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    text = json.dumps({"command": outcome.name, "violation": outcome.violation, "report": outcome.report},
                      indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        path = cfg.out / f"{outcome.name}.json"
        path.write_text(text, encoding="utf-8")
        print(str(path), file=stdout)
    else:
        stdout.write(text)
    return EXIT_VIOLATION if outcome.violation else EXIT_OK


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
