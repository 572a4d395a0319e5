"""logicbench: a definite-clause logic engine with a verification toolkit.

The package bundles:

* first-order terms, unification, and bounded Herbrand enumeration
  (:mod:`logicbench.terms`);
* definite-clause programs with delay declarations and commit constructs,
  plus the built-in SAT-solver corpus (:mod:`logicbench.programs`);
* SLD and clause-selection resolution with pluggable selection strategies
  (:mod:`logicbench.engine`);
* specifications as Herbrand interpretations (:mod:`logicbench.specs`);
* bounded checks for correctness, coverage, recurrence, query boundedness,
  and pruning-safety, with bottom-up model oracles
  (:mod:`logicbench.verifier`);
* declarative diagnosis of wrong and missing answers
  (:mod:`logicbench.diagnosis`);
* a CNF workbench around the corpus solvers (:mod:`logicbench.sat`).
"""

from .diagnosis import (
    Diagnosis,
    ProofTree,
    diagnose_incompleteness,
    diagnose_incorrectness,
    prove,
)
from .engine import (
    Budget,
    DerivationTree,
    Outcome,
    SelectionStrategy,
    alternate,
    always,
    build_tree,
    cssld_solve,
    is_delayed,
    nonvar_driven,
    solve,
)
from .programs import (
    BlockDeclaration,
    Commit,
    GroundRuleInstance,
    Program,
    Rule,
    bounded_instances,
    builtin_corpus,
    format_program,
    ground_instances,
    parse_program,
)
from .sat import (
    CnfFormula,
    all_small_formulas,
    brute_force_sat,
    decode_assignment,
    encode_cnf,
    eval_cnf,
    parse_dimacs,
    solve_sat,
)
from .specs import (
    SpecPair,
    Specification,
    in_L1,
    in_L1_0,
    in_L2,
    in_L2_0,
    spec_S1,
    spec_S2,
    spec_S2_0,
    spec_S3,
    spec_S3_0,
    spec_by_name,
)
from .syntax import ParseError, parse_query, parse_term
from .terms import (
    Compound,
    Signature,
    Substitution,
    Term,
    Var,
    apply_substitution,
    compose,
    enumerate_herbrand,
    format_term,
    unify,
)
from .verifier import (
    CheckReport,
    LevelMapping,
    bottom_up_model,
    check_bounded_query,
    check_correctness,
    check_coverage,
    check_cssld_condition,
    check_recurrent,
    ground_completeness_probe,
    level,
    mapping_for_p1,
    mapping_for_p3,
)

__version__ = "0.1.0"
