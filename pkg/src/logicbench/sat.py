"""CNF front-end and back-end around the corpus solvers.

DIMACS ingestion, encoding of CNF formulas as clause-list terms with logical
variables, assignment decoding from ground answers, the solver variants, and
an independent exhaustive truth-table oracle.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .engine import (
    Budget,
    SelectionStrategy,
    cssld_solve,
    nonvar_driven,
    solve,
)
from .programs import SAT_CL5_BLOCK, builtin_corpus
from .terms import Compound, FALSE, TRUE, Term, Var, mklist, spine

SAT = "SAT"
UNSAT = "UNSAT"
INDETERMINATE = "INDETERMINATE"

VARIANTS = ("p1", "p3", "p3-control", "cssld")

ORACLE_VAR_CAP = 20


class DimacsError(ValueError):
    pass


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple
    warnings: tuple = field(default=(), compare=False)

    def __post_init__(self):
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise DimacsError("literal %d out of range 1..%d" % (lit, self.num_vars))


def parse_dimacs(text: str) -> CnfFormula:
    """Standard DIMACS cnf: 'p cnf V C' header, zero-terminated clauses,
    'c' comment lines.  A clause-count mismatch is a warning, not an error."""
    num_vars = None
    declared_clauses = None
    clauses = []
    pending: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError("malformed header on line %d: %r" % (lineno, raw))
            try:
                num_vars, declared_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError("malformed header on line %d: %r" % (lineno, raw))
            continue
        if num_vars is None:
            raise DimacsError("clause line %d before 'p cnf' header" % lineno)
        try:
            values = [int(tok) for tok in line.split()]
        except ValueError:
            raise DimacsError("bad literal on line %d: %r" % (lineno, raw))
        for v in values:
            if v == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(v)
    if num_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if pending:
        clauses.append(tuple(pending))
    warnings = []
    if declared_clauses is not None and declared_clauses != len(clauses):
        warnings.append(
            "header declares %d clauses, found %d" % (declared_clauses, len(clauses))
        )
    return CnfFormula(num_vars, tuple(clauses), tuple(warnings))


def format_dimacs(f: CnfFormula) -> str:
    lines = ["p cnf %d %d" % (f.num_vars, len(f.clauses))]
    lines.extend(" ".join(str(l) for l in clause) + " 0" for clause in f.clauses)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Encoding and decoding
# ---------------------------------------------------------------------------

def encode_cnf(f: CnfFormula) -> tuple[Term, list]:
    """Encode a CNF formula as a clause-list term over fresh logical variables.

    A positive literal on variable i becomes true-Xi, a negative one
    false-Xi.  Returns the formula term and the variable list ordered by
    DIMACS index.  An empty clause encodes as the empty list, which no
    clause-satisfaction rule matches, so it forces failure.
    """
    variables = [Var("X%d" % i) for i in range(1, f.num_vars + 1)]
    clause_terms = []
    for clause in f.clauses:
        literal_terms = [
            Compound("-", (TRUE if lit > 0 else FALSE, variables[abs(lit) - 1]))
            for lit in clause
        ]
        clause_terms.append(mklist(literal_terms))
    return mklist(clause_terms), variables


def decode_assignment(value_list: Term, num_vars: int) -> dict:
    """Positional decoding: entry i of the ground truth-value list is the
    value of variable i."""
    elems, tail = spine(value_list)
    if not (type(tail) is Compound and tail.functor == "[]" and not tail.args):
        raise ValueError("answer variable list is not a proper list: %r" % value_list)
    if len(elems) != num_vars:
        raise ValueError("expected %d truth values, got %d" % (num_vars, len(elems)))
    assignment = {}
    for i, e in enumerate(elems, start=1):
        if e == TRUE:
            assignment[i] = True
        elif e == FALSE:
            assignment[i] = False
        else:
            raise ValueError(
                "non-truth-value %r in answer (floundering or misuse)" % e
            )
    return assignment


def eval_cnf(f: CnfFormula, assignment: dict) -> bool:
    """Evaluate the formula under a total assignment; independent of the
    resolution engine."""
    return all(
        any(assignment[abs(lit)] == (lit > 0) for lit in clause)
        for clause in f.clauses
    )


# ---------------------------------------------------------------------------
# The independent oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SatResult:
    verdict: str
    assignment: Optional[dict] = None
    assignment_total: bool = True
    reason: str = ""
    floundered: bool = False

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "assignment": (
                None
                if self.assignment is None
                else {str(k): v for k, v in sorted(self.assignment.items())}
            ),
            "assignment_total": self.assignment_total,
            "reason": self.reason,
            "floundered": self.floundered,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def brute_force_sat(f: CnfFormula, var_cap: int = ORACLE_VAR_CAP) -> SatResult:
    """Exhaustive truth-table evaluation; returns the lexicographically first
    satisfying assignment (false before true)."""
    if f.num_vars > var_cap:
        raise ValueError("oracle cap exceeded: %d variables > %d" % (f.num_vars, var_cap))
    for values in itertools.product((False, True), repeat=f.num_vars):
        assignment = {i + 1: v for i, v in enumerate(values)}
        if eval_cnf(f, assignment):
            return SatResult(SAT, assignment)
    return SatResult(UNSAT)


# ---------------------------------------------------------------------------
# Solver variants over the corpus programs
# ---------------------------------------------------------------------------

def solve_sat(
    f: CnfFormula,
    variant: str = "p3",
    budget: Optional[Budget] = None,
    first_answer_only: bool = True,
) -> SatResult:
    """Run one of the corpus solvers on the formula.

    p1: satisfiability query over the clause list only (assignment extracted
    from the formula grounding when the answer grounds it).  p3: the sat/2
    program with the truth-value list.  p3-control: delays plus commit
    pruning.  cssld: clause-selection resolution over the two single-rule
    prunings, steering by the bound argument.  UNSAT needs an exhaustive,
    unfloundered tree; a floundered answerless tree is INDETERMINATE.
    """
    if variant not in VARIANTS:
        raise ValueError("unknown variant %r (have: %s)" % (variant, ", ".join(VARIANTS)))
    budget = budget or Budget.from_env()
    corpus = builtin_corpus()
    formula_term, variables = encode_cnf(f)
    max_answers = 1 if first_answer_only else None

    if variant == "p1":
        query = (Compound("sat_cnf", (formula_term,)),)
        outcome = solve(corpus["P1"], query, SelectionStrategy.LEFTMOST, budget,
                        max_answers=max_answers)
        return _outcome_to_result(outcome, f, variables, p1_mode=True)

    query = (Compound("sat", (formula_term, mklist(variables))),)
    if variant == "p3":
        outcome = solve(corpus["P3"], query, SelectionStrategy.LEFTMOST, budget,
                        max_answers=max_answers)
    elif variant == "p3-control":
        outcome = solve(corpus["P3_CONTROL"], query, SelectionStrategy.LEFTMOST_SELECTABLE,
                        budget, max_answers=max_answers)
    else:  # cssld over the two prunings, delays active
        programs = [
            corpus["P31"].with_blocks(SAT_CL5_BLOCK),
            corpus["P32"].with_blocks(SAT_CL5_BLOCK),
        ]
        tree = cssld_solve(programs, nonvar_driven, query,
                           SelectionStrategy.LEFTMOST_SELECTABLE, budget)
        outcome = tree.outcome()
        if first_answer_only and outcome.answers:
            outcome.answers = outcome.answers[:1]
    return _outcome_to_result(outcome, f, variables, p1_mode=False)


def _outcome_to_result(outcome, f: CnfFormula, variables, p1_mode: bool) -> SatResult:
    if outcome.answers:
        answer = outcome.answers[0]
        if p1_mode:
            assignment, total = _assignment_from_formula(answer.atoms[0].args[0], f)
            return SatResult(SAT, assignment, total, floundered=outcome.floundered)
        assignment = decode_assignment(answer.atoms[0].args[1], f.num_vars)
        return SatResult(SAT, assignment, floundered=outcome.floundered)
    if outcome.budget_hit:
        return SatResult(INDETERMINATE, reason="budget exhausted",
                         floundered=outcome.floundered)
    if outcome.floundered:
        return SatResult(INDETERMINATE, reason="floundered", floundered=True)
    return SatResult(UNSAT)


def _assignment_from_formula(formula_term: Term, f: CnfFormula):
    """Read variable values off the grounded clause list of a p1 answer.

    The clause list carries polarity-variable pairs positionally aligned with
    the input formula, so any pair whose variable slot became a truth value
    fixes that variable.  Unconstrained variables stay unassigned and the
    assignment is reported partial.
    """
    assignment: dict = {}
    clauses, _ = spine(formula_term)
    for clause_term, clause in zip(clauses, f.clauses):
        pairs, _ = spine(clause_term)
        for pair_term, lit in zip(pairs, clause):
            value_term = pair_term.args[1]
            if value_term == TRUE:
                assignment.setdefault(abs(lit), True)
            elif value_term == FALSE:
                assignment.setdefault(abs(lit), False)
    return assignment, len(assignment) == f.num_vars


# ---------------------------------------------------------------------------
# Exhaustive small-formula generation (for oracle-agreement sweeps)
# ---------------------------------------------------------------------------

def all_small_formulas(
    max_vars: int = 3, max_clauses: int = 3, max_literals: int = 3
) -> Iterator[CnfFormula]:
    """Every CNF formula (as a set of distinct clauses over variables
    1..max_vars) with the given limits; clauses are sorted literal tuples."""
    literals = [v for i in range(1, max_vars + 1) for v in (i, -i)]
    clause_pool = []
    for k in range(1, max_literals + 1):
        for combo in itertools.combinations(sorted(literals, key=abs), k):
            clause_pool.append(tuple(sorted(combo, key=lambda l: (abs(l), l < 0))))
    for n in range(1, max_clauses + 1):
        for chosen in itertools.combinations(clause_pool, n):
            num_vars = max(abs(l) for clause in chosen for l in clause)
            yield CnfFormula(num_vars, tuple(chosen))


def render_solver_output(result: SatResult, num_vars: int) -> str:
    """DIMACS-solver-style text output: s-line plus a v-line for SAT."""
    if result.verdict == SAT:
        lines = ["s SATISFIABLE"]
        if result.assignment:
            lits = [
                str(i if result.assignment.get(i, False) else -i)
                for i in range(1, num_vars + 1)
                if i in result.assignment
            ]
            lines.append("v " + " ".join(lits) + " 0")
        if not result.assignment_total:
            lines.append("c assignment is partial")
        return "\n".join(lines)
    if result.verdict == UNSAT:
        return "s UNSATISFIABLE"
    return "s UNKNOWN\nc " + result.reason
