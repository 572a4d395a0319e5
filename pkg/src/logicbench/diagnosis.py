"""Declarative diagnosis against decidable specifications.

Incorrectness diagnosis: reproduce a wrong ground answer, then walk its proof
tree bottom-up for a rule instance whose body atoms are all specified while
the head is not.  Incompleteness diagnosis: verify that a specified instance
of the query is missing, then descend through covering instances to an
uncovered specified atom.  Specifications answer every membership query, so
no interactive oracle is involved.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .engine import Budget, SelectionStrategy, solve
from .programs import GroundRuleInstance, Program
from .specs import Specification
from .terms import (
    Compound,
    Signature,
    Term,
    Var,
    atom_size,
    format_term,
    herbrand_terms_of_size,
    resolve,
    unify_bindings,
    vars_of,
)
from .verifier import _check_signature, _memo_contains, is_covered

INCORRECT_INSTANCE = "INCORRECT_INSTANCE"
UNCOVERED_ATOM = "UNCOVERED_ATOM"
NO_DEFECT_FOUND = "NO_DEFECT_FOUND"


@dataclass(frozen=True)
class ProofTree:
    """A successful ground derivation: one rule instance per node."""

    root: Compound
    instance: GroundRuleInstance
    children: tuple

    def postorder(self) -> Iterator["ProofTree"]:
        for child in self.children:
            yield from child.postorder()
        yield self


@dataclass(frozen=True)
class Diagnosis:
    kind: str
    instance: Optional[GroundRuleInstance] = None
    atom: Optional[Compound] = None
    reason: str = ""
    justification: tuple = ()

    def summary(self) -> str:
        if self.kind == INCORRECT_INSTANCE:
            lines = ["incorrect rule instance: %r" % self.instance]
        elif self.kind == UNCOVERED_ATOM:
            lines = ["uncovered specified atom: %s" % format_term(self.atom)]
        else:
            lines = ["no defect found: %s" % self.reason]
        lines.extend("  %s" % j for j in self.justification)
        return "\n".join(lines)


class _BudgetExhausted(Exception):
    pass


# ---------------------------------------------------------------------------
# Proof trees for ground atoms
# ---------------------------------------------------------------------------

def prove(
    program: Program,
    atom: Compound,
    budget: Optional[Budget] = None,
) -> Optional[ProofTree]:
    """First proof tree for a ground atom under the pure projection of the
    program, or None if no bounded proof exists."""
    budget = budget or Budget.from_env()
    pure = program.commit_free()
    eq_builtin = not pure.defines(("=", 2))
    steps = [0]
    counter = [0]

    def prover(goal: Compound, bindings: dict, depth: int):
        steps[0] += 1
        if steps[0] > budget.max_steps or depth > budget.max_depth:
            raise _BudgetExhausted()
        pred = (goal.functor, len(goal.args))
        if pred == ("true", 0):
            yield bindings, None
            return
        if pred == ("=", 2) and eq_builtin:
            newb = dict(bindings)
            if unify_bindings(goal.args[0], goal.args[1], newb):
                yield newb, _Node("=", goal, ())
            return
        for _, rule in pure.rules_for(pred):
            mapping: dict = {}
            head = _rename(rule.head, mapping, counter)
            newb = dict(bindings)
            if not unify_bindings(goal, head, newb):
                continue
            body = tuple(_rename(a, mapping, counter) for a in rule.body)
            yield from sequence(rule.label, goal, body, 0, newb, (), depth)

    def sequence(label, goal, body, i, bindings, kids, depth):
        if i == len(body):
            yield bindings, _Node(label, goal, kids)
            return
        for b2, kid in prover(resolve(body[i], bindings), bindings, depth + 1):
            extended = kids if kid is None else kids + (kid,)
            yield from sequence(label, goal, body, i + 1, b2, extended, depth)

    try:
        for bindings, node in prover(atom, {}, 0):
            return _freeze(node, bindings, program.signature)
    except (_BudgetExhausted, RecursionError):
        # very deep proof searches count as out of budget
        return None
    return None


@dataclass(frozen=True)
class _Node:
    label: str
    goal: Compound
    kids: tuple


def _rename(t: Term, mapping: dict, counter: list) -> Term:
    if type(t) is Var:
        got = mapping.get(t.name)
        if got is None:
            got = mapping[t.name] = Var("_D%d" % counter[0])
            counter[0] += 1
        return got
    if t.ground:
        return t
    return Compound(t.functor, tuple(_rename(a, mapping, counter) for a in t.args))


def _freeze(node: _Node, bindings: dict, sig: Signature) -> ProofTree:
    filler = Compound(sig.constants[0]) if sig.constants else Compound("a")

    def ground(t: Term) -> Term:
        t = resolve(t, bindings)
        return _fill(t, filler)

    def build(n: _Node) -> ProofTree:
        children = tuple(build(k) for k in n.kids)
        head = ground(n.goal)
        body = tuple(
            c.root for c in children
            if not (c.root.functor == "=" and len(c.root.args) == 2)
        )
        return ProofTree(head, GroundRuleInstance(head, body, n.label), children)

    return build(node)


def _fill(t: Term, filler: Compound) -> Term:
    if type(t) is Var:
        return filler
    if t.ground:
        return t
    return Compound(t.functor, tuple(_fill(a, filler) for a in t.args))


# ---------------------------------------------------------------------------
# Incorrectness diagnosis
# ---------------------------------------------------------------------------

def diagnose_incorrectness(
    program: Program,
    spec_for_correctness: Specification,
    wrong: Compound,
    sig: Optional[Signature] = None,
    bound: int = 6,
    budget: Optional[Budget] = None,
) -> Diagnosis:
    """Locate the rule instance responsible for a wrong answer.

    ``wrong`` must be a ground atom outside the correctness specification
    that the program nevertheless proves.  The blamed instance has all body
    atoms specified and an unspecified head, so it is exactly a witness the
    correctness check would report.
    """
    if not wrong.ground:
        raise ValueError("the incorrectness symptom must be a ground atom")
    sig = _check_signature(program, spec_for_correctness, sig)
    contains = _memo_contains(spec_for_correctness)
    if contains(wrong):
        return Diagnosis(
            NO_DEFECT_FOUND,
            reason="atom is specified, so it is not an incorrectness symptom",
        )
    tree = prove(program, wrong, budget)
    if tree is None:
        return Diagnosis(NO_DEFECT_FOUND, reason="symptom not reproduced")
    for node in tree.postorder():
        if not contains(node.instance.head) and all(contains(b) for b in node.instance.body):
            justification = tuple(
                "body atom %s is specified" % format_term(b) for b in node.instance.body
            ) + ("head %s is not specified" % format_term(node.instance.head),)
            return Diagnosis(INCORRECT_INSTANCE, instance=node.instance,
                             justification=justification)
    # unreachable for a reproduced unspecified root: some node must flip
    return Diagnosis(NO_DEFECT_FOUND, reason="no violating instance on the proof tree")


# ---------------------------------------------------------------------------
# Incompleteness diagnosis
# ---------------------------------------------------------------------------

def diagnose_incompleteness(
    program: Program,
    spec_for_completeness: Specification,
    query: Sequence[Compound],
    sig: Optional[Signature] = None,
    bound: int = 6,
    slack: int = 2,
    budget: Optional[Budget] = None,
) -> Diagnosis:
    """Locate an uncovered specified atom behind a missing answer.

    The query's search tree must be finite within the budget; the symptom is
    a ground instance of the query whose atoms are all specified yet which no
    computed answer subsumes.
    """
    budget = budget or Budget.from_env()
    sig = _check_signature(program, spec_for_completeness, sig)
    pure = program.commit_free()
    contains = _memo_contains(spec_for_completeness)
    outcome = solve(pure, query, SelectionStrategy.LEFTMOST, budget)
    if outcome.budget_hit:
        return Diagnosis(NO_DEFECT_FOUND, reason="tree not finite within budget")
    answers = [a.atoms for a in outcome.answers]

    missing = _first_missing_instance(query, answers, contains, sig, bound)
    if missing is None:
        return Diagnosis(
            NO_DEFECT_FOUND, reason="program complete for query at this bound"
        )

    from .verifier import bottom_up_model

    model_bound = max(bound, max(atom_size(a) for a in missing)) + slack
    model = bottom_up_model(pure, sig, model_bound)
    universe = [
        t for size in range(1, bound + slack + 1) for t in herbrand_terms_of_size(sig, size)
    ]

    blamed = None
    for atom in missing:
        if contains(atom) and atom not in model:
            blamed = _descend_uncovered(atom, pure, contains, model, universe, budget.max_depth)
            if blamed is not None:
                break
    if blamed is None:
        return Diagnosis(NO_DEFECT_FOUND, reason="no uncovered atom found within bound")
    justification = (
        "atom %s is specified" % format_term(blamed),
        "no rule instance with a fully specified body has it as head (within bound)",
    )
    return Diagnosis(UNCOVERED_ATOM, atom=blamed, justification=justification)


def _first_missing_instance(query, answers, contains, sig, bound):
    query = tuple(query)
    free: list = []
    for a in query:
        vars_of(a, free)
    universe = [t for size in range(1, bound + 1) for t in herbrand_terms_of_size(sig, size)]

    def subsumed(ground_atoms) -> bool:
        for ans in answers:
            bindings: dict = {}
            if all(
                unify_bindings(pat, g, bindings)
                for pat, g in zip(ans, ground_atoms)
            ):
                return True
        return False

    if not free:
        candidates: Iterator = iter([query])
    else:
        def instantiate():
            for assignment in itertools.product(universe, repeat=len(free)):
                m = dict(zip((v.name for v in free), assignment))
                yield tuple(_substitute(a, m) for a in query)

        candidates = instantiate()

    for ground_atoms in candidates:
        if all(contains(a) for a in ground_atoms) and not subsumed(ground_atoms):
            return ground_atoms
    return None


def _substitute(t: Term, m: dict) -> Term:
    if type(t) is Var:
        return m[t.name]
    if t.ground:
        return t
    return Compound(t.functor, tuple(_substitute(a, m) for a in t.args))


def _descend_uncovered(atom, pure, contains, model, universe, depth_cap):
    """Follow covering instances downward until an uncovered atom appears."""
    seen = set()
    current = atom
    for _ in range(depth_cap):
        if current in seen:
            return None
        seen.add(current)
        if not is_covered(current, pure, contains, universe):
            return current
        successor = _unproved_specified_body_atom(current, pure, contains, model, universe)
        if successor is None:
            return None
        current = successor
    return None


def _unproved_specified_body_atom(atom, pure, contains, model, universe):
    for _, rule in pure.rules_for((atom.functor, len(atom.args))):
        bindings: dict = {}
        if not unify_bindings(atom, rule.head, bindings):
            continue
        body = []
        clash = False
        for item in rule.body:
            pred = (item.functor, len(item.args))
            if pred == ("true", 0):
                continue
            if pred == ("=", 2):
                if not unify_bindings(item.args[0], item.args[1], bindings):
                    clash = True
                    break
            body.append(item)
        if clash:
            continue
        resolved = [resolve(a, bindings) for a in body]
        free: list = []
        for a in resolved:
            vars_of(a, free)
        for assignment in itertools.product(universe, repeat=len(free)):
            m = dict(zip((v.name for v in free), assignment))
            ground_body = [_substitute(a, m) for a in resolved]
            if all(contains(b) for b in ground_body):
                for b in ground_body:
                    # residual t=t atoms hold definitionally, never blame them
                    if (b.functor, len(b.args)) == ("=", 2):
                        continue
                    if b not in model:
                        return b
    return None
