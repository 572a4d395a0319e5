"""Definite-clause programs with control annotations, and the built-in corpus.

A rule body is an ordered sequence of body items: atoms, ``=``/2, ``nonvar``/1,
the constant ``true``, or a commit construct (if-then-else with a
deterministic condition).  Block declarations delay calls while designated
argument positions are unbound.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Sequence, Union

from .syntax import ParseError, _Parser, format_query
from .terms import (
    Compound,
    Signature,
    Term,
    Var,
    format_term,
    herbrand_terms_of_size,
    resolve,
    signature_of_terms,
    unify_bindings,
    vars_of,
)

BUILTIN_PREDICATES = {("=", 2), ("true", 0), ("nonvar", 1)}
COMMIT_CONDITIONS = {("=", 2), ("nonvar", 1), ("true", 0)}


@dataclass(frozen=True)
class Commit:
    """If-then-else with a deterministic condition: nonvar/1, =/2 or true."""

    condition: Compound
    then_branch: tuple
    else_branch: tuple


BodyItem = Union[Compound, Commit]


@dataclass(frozen=True)
class Rule:
    head: Compound
    body: tuple = ()
    label: str = field(default="", compare=False)

    @property
    def predicate(self) -> tuple[str, int]:
        return (self.head.functor, len(self.head.args))

    def has_commit(self) -> bool:
        return any(isinstance(item, Commit) for item in self.body)

    def __repr__(self):
        return format_rule(self)


@dataclass(frozen=True)
class BlockDeclaration:
    """Delay masks for one predicate; mask entries are '-' or '?'.

    A call is delayed while SOME mask has all of its '-' positions filled by
    unbound variables (the behaviour of multiple block specs in the delaying
    systems this models).
    """

    predicate: tuple[str, int]
    masks: tuple

    def __post_init__(self):
        name, arity = self.predicate
        for mask in self.masks:
            if len(mask) != arity:
                raise ValueError(
                    "block mask %r does not match arity of %s/%d" % (mask, name, arity)
                )


@dataclass(frozen=True)
class GroundRuleInstance:
    """A ground instance of a rule, with =/true body items pre-evaluated away."""

    head: Compound
    body: tuple
    rule_label: str = field(default="", compare=False)

    def __repr__(self):
        if not self.body:
            return "%s." % format_term(self.head)
        return "%s :- %s." % (format_term(self.head), format_query(self.body))


class Program:
    """An immutable ordered rule list plus block declarations."""

    def __init__(
        self,
        rules: Sequence[Rule],
        blocks: Sequence[BlockDeclaration] = (),
        signature: Optional[Signature] = None,
        name: str = "",
        warnings: Sequence[str] = (),
    ):
        self.rules = tuple(rules)
        self.blocks = tuple(blocks)
        self.name = name
        self.warnings = tuple(warnings)
        self.signature = signature if signature is not None else infer_signature(self.rules)
        index: dict = {}
        for i, rule in enumerate(self.rules):
            index.setdefault(rule.predicate, []).append((i, rule))
        self._index = {pred: tuple(entries) for pred, entries in index.items()}
        masks: dict = {}
        for decl in self.blocks:
            masks.setdefault(decl.predicate, []).extend(decl.masks)
        self._block_masks = {pred: tuple(ms) for pred, ms in masks.items()}
        self._commit_free: Optional[Program] = None

    def __eq__(self, other):
        return (
            isinstance(other, Program)
            and other.rules == self.rules
            and other.blocks == self.blocks
        )

    def __hash__(self):
        return hash((self.rules, self.blocks))

    def __repr__(self):
        return "Program(%s, %d rules)" % (self.name or "?", len(self.rules))

    def rules_for(self, predicate: tuple[str, int]) -> tuple:
        return self._index.get(predicate, ())

    def defines(self, predicate: tuple[str, int]) -> bool:
        return predicate in self._index

    @property
    def predicates(self) -> frozenset:
        return frozenset(self._index)

    def block_masks(self, predicate: tuple[str, int]) -> tuple:
        return self._block_masks.get(predicate, ())

    def with_name(self, name: str) -> "Program":
        return Program(self.rules, self.blocks, self.signature, name, self.warnings)

    def with_blocks(self, *decls: BlockDeclaration) -> "Program":
        return Program(self.rules, self.blocks + tuple(decls), self.signature, self.name)

    def without_rules(self, *labels: str) -> "Program":
        missing = set(labels) - {r.label for r in self.rules}
        if missing:
            raise KeyError("no such rule labels: %s" % sorted(missing))
        kept = [r for r in self.rules if r.label not in labels]
        return Program(kept, self.blocks, self.signature, self.name)

    def replace_rule(self, label: str, new_rule: Rule) -> "Program":
        if label not in {r.label for r in self.rules}:
            raise KeyError("no such rule label: %s" % label)
        replacement = Rule(new_rule.head, new_rule.body, label)
        rules = [replacement if r.label == label else r for r in self.rules]
        return Program(rules, self.blocks, None, self.name)

    def extend_signature(self, *symbols: tuple[str, int]) -> "Program":
        return Program(self.rules, self.blocks, self.signature.extend(*symbols), self.name)

    def commit_free(self) -> "Program":
        """The pure-logic projection: commits expanded into their plain rule
        alternatives and control-only nonvar/1 items stripped."""
        if self._commit_free is None:
            rules = []
            for rule in self.rules:
                for i, body in enumerate(_expand_body(rule.body)):
                    label = rule.label if i == 0 else "%s~%d" % (rule.label, i + 1)
                    rules.append(Rule(rule.head, tuple(body), label))
            self._commit_free = Program(rules, (), self.signature, self.name)
        return self._commit_free


def _expand_body(body: Sequence[BodyItem]) -> list[list[Compound]]:
    """All commit-free alternatives of a body, nonvar items removed."""
    alternatives: list[list[Compound]] = [[]]
    for item in body:
        if isinstance(item, Commit):
            cond_items: list[Compound] = []
            cond = item.condition
            if (cond.functor, len(cond.args)) == ("=", 2):
                cond_items = [cond]
            branches = []
            for prefix in _expand_body(cond_items + list(item.then_branch)):
                branches.append(prefix)
            for prefix in _expand_body(list(item.else_branch)):
                branches.append(prefix)
            alternatives = [alt + br for alt in alternatives for br in branches]
        else:
            pred = (item.functor, len(item.args))
            if pred == ("nonvar", 1) or pred == ("true", 0):
                continue
            alternatives = [alt + [item] for alt in alternatives]
    return alternatives


def infer_signature(rules: Sequence[Rule]) -> Signature:
    """Data functors harvested from argument positions of all rule atoms."""
    data_terms: list[Term] = []

    def collect(items):
        for item in items:
            if isinstance(item, Commit):
                data_terms.extend(item.condition.args)
                collect(item.then_branch)
                collect(item.else_branch)
            else:
                data_terms.extend(item.args)

    for rule in rules:
        data_terms.extend(rule.head.args)
        collect(rule.body)
    return signature_of_terms(data_terms)


# ---------------------------------------------------------------------------
# Parsing and printing
# ---------------------------------------------------------------------------

def _parse_body_item(p: _Parser) -> BodyItem:
    if p.at("("):
        mark = p.pos
        p.next()
        first = p.term()
        if p.at("->"):
            p.next()
            then_branch = [_parse_body_item(p)]
            while p.at(","):
                p.next()
                then_branch.append(_parse_body_item(p))
            p.expect(";")
            else_branch = [_parse_body_item(p)]
            while p.at(","):
                p.next()
                else_branch.append(_parse_body_item(p))
            p.expect(")")
            cond = first
            if type(cond) is Var or (cond.functor, len(cond.args)) not in COMMIT_CONDITIONS:
                p.fail("commit condition must be nonvar/1, =/2 or true")
            return Commit(cond, tuple(then_branch), tuple(else_branch))
        # plain parenthesized atom
        p.pos = mark
    t = p.term()
    if type(t) is Var:
        p.fail("a body item cannot be a variable")
    return t


def parse_program(text: str, name: str = "") -> Program:
    """Parse a program; syntax errors carry line/column positions."""
    p = _Parser(text)
    rules: list[Rule] = []
    blocks: list[BlockDeclaration] = []
    while p.peek().kind != "end":
        if p.at(":-"):
            p.next()
            tok = p.peek()
            if tok.kind == "name" and tok.text == "block":
                p.next()
                blocks.extend(_parse_block_specs(p))
                p.expect(".")
                continue
            p.fail("only ':- block ...' directives are supported")
        head = p.term()
        if type(head) is Var:
            p.fail("a rule head cannot be a variable")
        body: list[BodyItem] = []
        if p.at(":-"):
            p.next()
            body.append(_parse_body_item(p))
            while p.at(","):
                p.next()
                body.append(_parse_body_item(p))
        p.expect(".")
        rules.append(Rule(head, tuple(body)))
    rules = _label_rules(rules)
    _check_arities(rules, blocks)
    warnings = _body_predicate_warnings(rules)
    return Program(rules, blocks, None, name, warnings)


def _parse_block_specs(p: _Parser) -> list[BlockDeclaration]:
    decls = []
    while True:
        tok = p.next()
        if tok.kind != "name":
            p.fail("expected a predicate name in block declaration", tok)
        p.expect("(")
        mask = []
        while True:
            m = p.next()
            if m.text not in ("-", "?"):
                p.fail("block mask entries must be '-' or '?'", m)
            mask.append(m.text)
            if p.at(","):
                p.next()
                continue
            break
        p.expect(")")
        decls.append(BlockDeclaration((tok.text, len(mask)), (tuple(mask),)))
        if p.at(","):
            p.next()
            continue
        return decls


def _label_rules(rules: list[Rule]) -> list[Rule]:
    counts: dict = {}
    labelled = []
    for rule in rules:
        name, arity = rule.predicate
        counts[rule.predicate] = counts.get(rule.predicate, 0) + 1
        labelled.append(Rule(rule.head, rule.body, "%s#%d" % (name, counts[rule.predicate])))
    return labelled


def _atoms_of_body(body) -> Iterator[Compound]:
    for item in body:
        if isinstance(item, Commit):
            yield item.condition
            yield from _atoms_of_body(item.then_branch)
            yield from _atoms_of_body(item.else_branch)
        else:
            yield item


def _check_arities(rules, blocks):
    arity_seen: dict = {}

    def note(atom: Compound):
        name = atom.functor
        arity = len(atom.args)
        if name in arity_seen and arity_seen[name] != arity:
            raise ParseError(
                "predicate %s used with arities %d and %d" % (name, arity_seen[name], arity),
                1,
                1,
            )
        arity_seen[name] = arity

    for rule in rules:
        note(rule.head)
        for atom in _atoms_of_body(rule.body):
            note(atom)
    for decl in blocks:
        note(Compound(decl.predicate[0], tuple(Var("_") for _ in range(decl.predicate[1]))))


def _body_predicate_warnings(rules) -> list[str]:
    defined = {r.predicate for r in rules}
    warnings = []
    flagged = set()
    for rule in rules:
        for atom in _atoms_of_body(rule.body):
            pred = (atom.functor, len(atom.args))
            if pred not in defined and pred not in BUILTIN_PREDICATES and pred not in flagged:
                flagged.add(pred)
                warnings.append("undefined predicate %s/%d used in a body" % pred)
    return warnings


def format_body_item(item: BodyItem) -> str:
    if isinstance(item, Commit):
        return "( %s -> %s ; %s )" % (
            format_term(item.condition),
            ", ".join(format_body_item(i) for i in item.then_branch),
            ", ".join(format_body_item(i) for i in item.else_branch),
        )
    return format_term(item)


def format_rule(rule: Rule) -> str:
    head = format_term(rule.head)
    if rule.head.functor == "=" and len(rule.head.args) == 2:
        head = "=(%s,%s)" % tuple(format_term(a) for a in rule.head.args)
    if not rule.body:
        return "%s." % head
    return "%s :- %s." % (head, ", ".join(format_body_item(i) for i in rule.body))


def format_program(program: Program) -> str:
    lines = []
    for decl in program.blocks:
        for mask in decl.masks:
            lines.append(":- block %s(%s)." % (decl.predicate[0], ", ".join(mask)))
    lines.extend(format_rule(rule) for rule in program.rules)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Ground instances
# ---------------------------------------------------------------------------

def ground_instances(
    rule: Rule,
    sig: Signature,
    size_bound: int,
    keep_eq: bool = False,
) -> Iterator[GroundRuleInstance]:
    """Ground instances of a pure rule, variables drawn from the bounded universe.

    ``=`` body items are pre-evaluated: instances whose two sides differ are
    dropped, matching ones are removed from the body (kept as ground ``t=t``
    atoms when ``keep_eq`` is set).  ``true`` items are vacuous.  The two-sided
    pre-evaluation is realized by unifying the sides up front, which yields
    exactly the surviving instances without enumerating the mismatches.
    """
    if rule.has_commit():
        raise ValueError("ground_instances applies to commit-free rules only")
    sig.check_has_constant()
    bindings: dict = {}
    plain_body: list[Compound] = []
    eq_atoms: list[Compound] = []
    for item in rule.body:
        pred = (item.functor, len(item.args))
        if pred == ("true", 0):
            continue
        if pred == ("nonvar", 1):
            raise ValueError("ground_instances applies to pure rules only (nonvar found)")
        if pred == ("=", 2):
            if not unify_bindings(item.args[0], item.args[1], bindings):
                return
            eq_atoms.append(item)
            continue
        plain_body.append(item)

    head = resolve(rule.head, bindings)
    body = [resolve(a, bindings) for a in plain_body]
    if keep_eq:
        body = [resolve(a, bindings) for a in eq_atoms] + body
    free: list[Var] = []
    for t in [head] + body:
        vars_of(t, free)
    if not free:
        yield GroundRuleInstance(head, tuple(body), rule.label)
        return
    universe = [
        t for size in range(1, size_bound + 1) for t in herbrand_terms_of_size(sig, size)
    ]
    for assignment in itertools.product(universe, repeat=len(free)):
        m = {v.name: t for v, t in zip(free, assignment)}
        g_head = _ground_subst(head, m)
        g_body = tuple(_ground_subst(a, m) for a in body)
        yield GroundRuleInstance(g_head, g_body, rule.label)


def _ground_subst(t: Term, m: dict) -> Term:
    if type(t) is Var:
        return m[t.name]
    if t.ground:
        return t
    return Compound(t.functor, tuple(_ground_subst(a, m) for a in t.args))


def bounded_instances(
    rule: Rule,
    sig: Signature,
    head_bound: int,
    body_bound: Optional[int] = None,
    keep_eq: bool = False,
) -> Iterator[GroundRuleInstance]:
    """Ground instances whose head atom size stays within head_bound and every
    body atom within body_bound (default: head_bound).

    This is the instance stream the bounded checks scan: limiting the atoms
    rather than each variable keeps rules with many variables tractable while
    still enumerating every instance that fits in the bound.  ``=`` handling
    matches ground_instances.
    """
    if rule.has_commit():
        raise ValueError("bounded_instances applies to commit-free rules only")
    sig.check_has_constant()
    if body_bound is None:
        body_bound = head_bound
    bindings: dict = {}
    plain_body: list[Compound] = []
    eq_atoms: list[Compound] = []
    for item in rule.body:
        pred = (item.functor, len(item.args))
        if pred == ("true", 0):
            continue
        if pred == ("nonvar", 1):
            raise ValueError("bounded_instances applies to pure rules only (nonvar found)")
        if pred == ("=", 2):
            if not unify_bindings(item.args[0], item.args[1], bindings):
                return
            eq_atoms.append(item)
            continue
        plain_body.append(item)

    head = resolve(rule.head, bindings)
    body = [resolve(a, bindings) for a in plain_body]
    if keep_eq:
        body = [resolve(a, bindings) for a in eq_atoms] + body

    # One size constraint per atom: base counts each variable occurrence as 1,
    # so assigning a variable a term of size s adds occurrences*(s-1).
    free: list[Var] = []
    for t in [head] + body:
        vars_of(t, free)
    constraints = []
    for atom, limit in [(head, head_bound)] + [(a, body_bound) for a in body]:
        occ: dict = {}
        _var_occurrences(atom, occ)
        base = sum(arg.size for arg in atom.args)
        if base > limit:
            return
        constraints.append((occ, limit - base))

    if not free:
        yield GroundRuleInstance(head, tuple(body), rule.label)
        return

    remaining = [slack for _, slack in constraints]
    assignment: dict = {}

    def assign(i: int) -> Iterator[GroundRuleInstance]:
        if i == len(free):
            g_head = _ground_subst(head, assignment)
            g_body = tuple(_ground_subst(a, assignment) for a in body)
            yield GroundRuleInstance(g_head, g_body, rule.label)
            return
        v = free[i]
        max_extra = None
        occs = []
        for c, (occ, _) in enumerate(constraints):
            k = occ.get(v.name, 0)
            if k:
                occs.append((c, k))
                room = remaining[c] // k
                if max_extra is None or room < max_extra:
                    max_extra = room
        for size in range(1, (max_extra or 0) + 2):
            extra = size - 1
            for c, k in occs:
                remaining[c] -= k * extra
            if all(r >= 0 for r in remaining):
                for t in herbrand_terms_of_size(sig, size):
                    assignment[v.name] = t
                    yield from assign(i + 1)
            for c, k in occs:
                remaining[c] += k * extra
        assignment.pop(v.name, None)

    yield from assign(0)


def _var_occurrences(t: Term, occ: dict):
    if type(t) is Var:
        occ[t.name] = occ.get(t.name, 0) + 1
    elif not t.ground:
        for a in t.args:
            _var_occurrences(a, occ)


# ---------------------------------------------------------------------------
# Built-in corpus
# ---------------------------------------------------------------------------

_P1_SRC = """
sat_cnf([]).
sat_cnf([Clause|Clauses]) :- sat_cl(Clause), sat_cnf(Clauses).
sat_cl([Pol-Var|Pairs]) :- Pol = Var.
sat_cl([H|Pairs]) :- sat_cl(Pairs).
=(X, X).
"""

_P2_SRC = """
sat_cnf([]).
sat_cnf([Clause|Clauses]) :- sat_cl(Clause), sat_cnf(Clauses).
=(X, X).
sat_cl([Pol-Var|Pairs]) :- sat_cl3(Pairs, Var, Pol).
sat_cl3([], Var, Pol) :- Var = Pol.
sat_cl3([Pol2-Var2|Pairs], Var1, Pol1) :- sat_cl5(Var1, Pol1, Var2, Pol2, Pairs).
sat_cl5(Var1, Pol1, Var2, Pol2, Pairs) :- sat_cl5a(Var1, Pol1, Var2, Pol2, Pairs).
sat_cl5(Var1, Pol1, Var2, Pol2, Pairs) :- sat_cl5a(Var2, Pol2, Var1, Pol1, Pairs).
sat_cl5a(Var1, Pol1, Var2, Pol2, Pairs) :- Var1 = Pol1.
sat_cl5a(Var1, Pol1, Var2, Pol2, Pairs) :- sat_cl3(Pairs, Var2, Pol2).
"""

_P3_TAIL_SRC = """
sat(Clauses, Vars) :- sat_cnf(Clauses), tflist(Vars).
tflist([]).
tflist([Var|Vars]) :- tflist(Vars), tf(Var).
tf(true).
tf(false).
"""

_P3_CONTROL_SRC = """
:- block sat_cl5(-, ?, -, ?, ?).
sat_cnf([]).
sat_cnf([Clause|Clauses]) :- sat_cl(Clause), sat_cnf(Clauses).
=(X, X).
sat_cl([Pol-Var|Pairs]) :- sat_cl3(Pairs, Var, Pol).
sat_cl3([], Var, Pol) :- Var = Pol.
sat_cl3([Pol2-Var2|Pairs], Var1, Pol1) :- sat_cl5(Var1, Pol1, Var2, Pol2, Pairs).
sat_cl5(Var1, Pol1, Var2, Pol2, Pairs) :-
    ( nonvar(Var1) -> sat_cl5a(Var1, Pol1, Var2, Pol2, Pairs)
                    ; sat_cl5a(Var2, Pol2, Var1, Pol1, Pairs) ).
sat_cl5a(Var1, Pol1, Var2, Pol2, Pairs) :-
    ( Var1 = Pol1 -> true ; sat_cl3(Pairs, Var2, Pol2) ).
sat(Clauses, Vars) :- sat_cnf(Clauses), tflist(Vars).
tflist([]).
tflist([Var|Vars]) :- tflist(Vars), tf(Var).
tf(true).
tf(false).
"""

_CSSLD_COUNTEREXAMPLE_SRC = """
q(X) :- p(Y, X).
p(Y, 0).
p(a, s(X)) :- p(a, X).
p(b, s(X)) :- p(b, X).
"""

SAT_CL5_BLOCK = BlockDeclaration(("sat_cl5", 5), (("-", "?", "-", "?", "?"),))


@lru_cache(maxsize=1)
def builtin_corpus() -> dict:
    """The named program corpus.

    P1 is the five-rule satisfiability checker; P2 refines its clause
    handling through sat_cl3/sat_cl5/sat_cl5a; P3 adds the sat/2 top level
    with truth-value lists.  P31 and P32 drop one of the two interchangeable
    sat_cl5 rules.  P3_CONTROL is P3 with the delay declaration and the two
    commit rules.  *_BLOCKS variants attach the delay declaration to the
    plain programs.  CSSLD_COUNTEREXAMPLE is the four-rule program whose
    alternating clause selection loses an answer; CSSLD_PI1/PI2 are its two
    single-chain prunings.
    """
    p1 = parse_program(_P1_SRC, "P1")
    p2 = parse_program(_P2_SRC, "P2")
    p3 = parse_program(_P2_SRC + _P3_TAIL_SRC, "P3")
    p31 = p3.without_rules("sat_cl5#1").with_name("P31")
    p32 = p3.without_rules("sat_cl5#2").with_name("P32")
    p3_control = parse_program(_P3_CONTROL_SRC, "P3_CONTROL")
    counterexample = parse_program(_CSSLD_COUNTEREXAMPLE_SRC, "CSSLD_COUNTEREXAMPLE")
    corpus = {
        "P1": p1,
        "P2": p2,
        "P2_BLOCKS": p2.with_blocks(SAT_CL5_BLOCK).with_name("P2_BLOCKS"),
        "P3": p3,
        "P31": p31,
        "P32": p32,
        "P3_BLOCKS": p3.with_blocks(SAT_CL5_BLOCK).with_name("P3_BLOCKS"),
        "P3_CONTROL": p3_control,
        "CSSLD_COUNTEREXAMPLE": counterexample,
        "CSSLD_PI1": counterexample.without_rules("p#3").with_name("CSSLD_PI1"),
        "CSSLD_PI2": counterexample.without_rules("p#2").with_name("CSSLD_PI2"),
    }
    return corpus
