from .syntax import (
    App, And, Atom, Const, Eq, Exists, Forall, Formula, Iff, Implies, Not, Or,
    Signature, SignatureError, SortError, InadmissibleSubstitution, Term, Var,
    CATEGORY_SIGNATURE, GROUP_SIGNATURE, RING_SIGNATURE,
    check_formula, conj, desugar, disj, exists, forall, free_variables,
    is_admissible, is_sentence, neq, substitute, subformulas, term_sort,
)
from .text import FormulaSyntaxError, format_formula, parse_formula, parse_term
from .semantics import (
    FiniteModel, FunctionTable, MissingAssignment, ModelError, TupleRelation,
    evaluate, evaluate_naive, evaluate_term, models_isomorphic, sampled_equivalence,
)
from .deduction import MP, Axiom, Gen, Hyp, Step, Verdict, check_deduction, match_scheme
