"""SLD and csSLD resolution with selection strategies, delays, and pruning.

The same depth-first core drives plain resolution (one program) and
clause-selection resolution (several programs, one chosen per node).  Trees
record per-node selection and per-edge rule/unifier/program data; the lean
``solve`` entry point skips recording.
"""
from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

from .programs import BlockDeclaration, Commit, Program
from .syntax import format_query
from .terms import (
    Compound,
    Substitution,
    Term,
    Var,
    format_term,
    resolve,
    unify_bindings,
    vars_of,
    walk,
)


class SelectionStrategy(enum.Enum):
    LEFTMOST = "leftmost"
    RIGHTMOST = "rightmost"
    LEFTMOST_SELECTABLE = "leftmost-selectable"


DEFAULT_MAX_DEPTH = 10_000
DEFAULT_MAX_STEPS = 1_000_000
BUDGET_ENV_VAR = "LOGICBENCH_BUDGET"


@dataclass(frozen=True)
class Budget:
    max_depth: int = DEFAULT_MAX_DEPTH
    max_steps: int = DEFAULT_MAX_STEPS

    def __post_init__(self):
        if self.max_depth <= 0 or self.max_steps <= 0:
            raise ValueError("budget limits must be positive")

    @staticmethod
    def from_env() -> "Budget":
        raw = os.environ.get(BUDGET_ENV_VAR)
        if not raw:
            return Budget()
        try:
            return Budget(max_steps=int(raw))
        except ValueError:
            raise ValueError("%s must be a positive integer, got %r" % (BUDGET_ENV_VAR, raw))


class UnknownPredicateError(ValueError):
    pass


@dataclass(frozen=True)
class Answer:
    atoms: tuple
    substitution: Substitution

    def __repr__(self):
        return format_query(self.atoms)


@dataclass
class Outcome:
    answers: list
    exhaustive: bool
    floundered: bool
    budget_hit: bool


# ---------------------------------------------------------------------------
# Clause selection rules (for csSLD trees)
# ---------------------------------------------------------------------------

class CsNode(NamedTuple):
    node_id: int
    depth: int
    query: tuple
    selected_index: int
    selected_atom: Compound


ClauseSelectionRule = Callable[[CsNode], int]


def always(index: int) -> ClauseSelectionRule:
    return lambda node: index


def alternate(n_programs: int) -> ClauseSelectionRule:
    """Cycle through the programs by tree depth."""
    return lambda node: node.depth % n_programs


def nonvar_driven(node: CsNode) -> int:
    """Clause selection for the [P31, P32] pair.

    When the selected atom is sat_cl5/5 with a bound first argument, pick the
    program that kept the first-argument-first rule (index 1, P32); otherwise
    pick index 0 (P31, which passes the second pair first).  Both programs
    agree on every other predicate, so other atoms go to index 0.
    """
    atom = node.selected_atom
    if atom.functor == "sat_cl5" and len(atom.args) == 5:
        if type(atom.args[0]) is not Var:
            return 1
        return 0
    return 0


# ---------------------------------------------------------------------------
# Delay declarations
# ---------------------------------------------------------------------------

def is_delayed(blocks: Sequence[BlockDeclaration], atom: Compound) -> bool:
    """True iff some mask for the atom's predicate has all its '-' positions
    filled by unbound variables.  Masks without any '-' never delay."""
    pred = (atom.functor, len(atom.args))
    for decl in blocks:
        if decl.predicate != pred:
            continue
        for mask in decl.masks:
            if _mask_delays(mask, atom.args, None):
                return True
    return False


def _mask_delays(mask, args, bindings) -> bool:
    saw_dash = False
    for entry, arg in zip(mask, args):
        if entry == "-":
            saw_dash = True
            value = walk(arg, bindings) if bindings is not None else arg
            if type(value) is not Var:
                return False
    return saw_dash


# ---------------------------------------------------------------------------
# Derivation trees
# ---------------------------------------------------------------------------

@dataclass
class TreeEdge:
    rule_label: str
    program_index: Optional[int]
    mgu: dict
    child: Optional[int] = None


@dataclass
class TreeNode:
    node_id: int
    depth: int
    query: tuple
    selected: Optional[int] = None
    leaf: Optional[str] = None
    edges: list = field(default_factory=list)


SUCCESS = "SUCCESS"
FAIL = "FAIL"
FLOUNDER = "FLOUNDER"
CUTOFF = "CUTOFF"


@dataclass
class DerivationTree:
    root: tuple
    strategy: SelectionStrategy
    program_names: tuple
    nodes: list
    answers: list
    floundered: bool
    budget_hit: bool
    truncated: bool = False

    @property
    def exhaustive(self) -> bool:
        return not self.budget_hit and not self.truncated

    def outcome(self) -> Outcome:
        return Outcome(list(self.answers), self.exhaustive, self.floundered, self.budget_hit)

    def leaves(self, kind: str) -> list:
        return [n for n in self.nodes if n.leaf == kind]

    def to_dict(self) -> dict:
        return {
            "root": [_render_item(i) for i in self.root],
            "strategy": self.strategy.value,
            "programs": list(self.program_names),
            "exhaustive": self.exhaustive,
            "floundered": self.floundered,
            "budget_hit": self.budget_hit,
            "answers": [
                {
                    "atoms": [format_term(a) for a in ans.atoms],
                    "bindings": {v: format_term(t) for v, t in sorted(ans.substitution.items())},
                }
                for ans in self.answers
            ],
            "nodes": [
                {
                    "id": n.node_id,
                    "depth": n.depth,
                    "query": [_render_item(i) for i in n.query],
                    "selected": n.selected,
                    "leaf": n.leaf,
                    "edges": [
                        {
                            "rule": e.rule_label,
                            "program": e.program_index,
                            "mgu": {v: format_term(t) for v, t in sorted(e.mgu.items())},
                            "child": e.child,
                        }
                        for e in n.edges
                    ],
                }
                for n in self.nodes
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _render_item(item) -> str:
    if isinstance(item, Commit):
        from .programs import format_body_item

        return format_body_item(item)
    return format_term(item)


# ---------------------------------------------------------------------------
# The resolution core
# ---------------------------------------------------------------------------

def _fresh_start(atoms) -> int:
    start = 0
    seen: list = []
    for a in atoms:
        vars_of(a, seen)
    for v in seen:
        if v.name.startswith("_G") and v.name[2:].isdigit():
            start = max(start, int(v.name[2:]) + 1)
    return start


class _Renamer:
    __slots__ = ("counter", "mapping")

    def __init__(self, counter: int):
        self.counter = counter
        self.mapping: dict = {}

    def fresh(self, v: Var) -> Var:
        got = self.mapping.get(v.name)
        if got is None:
            got = Var("_G%d" % self.counter)
            self.counter += 1
            self.mapping[v.name] = got
        return got

    def rename_term(self, t: Term) -> Term:
        if type(t) is Var:
            return self.fresh(t)
        if t.ground:
            return t
        return Compound(t.functor, tuple(self.rename_term(a) for a in t.args))

    def rename_item(self, item):
        if isinstance(item, Commit):
            return Commit(
                self.rename_term(item.condition),
                tuple(self.rename_item(i) for i in item.then_branch),
                tuple(self.rename_item(i) for i in item.else_branch),
            )
        return self.rename_term(item)


def _resolve_item(item, bindings):
    if isinstance(item, Commit):
        return Commit(
            resolve(item.condition, bindings),
            tuple(_resolve_item(i, bindings) for i in item.then_branch),
            tuple(_resolve_item(i, bindings) for i in item.else_branch),
        )
    return resolve(item, bindings)


def _select_index(query, strategy, block_masks, bindings) -> Optional[int]:
    if strategy is SelectionStrategy.LEFTMOST:
        return 0
    if strategy is SelectionStrategy.RIGHTMOST:
        return len(query) - 1
    # leftmost selectable: skip delayed atoms
    if not block_masks:
        return 0
    for i, item in enumerate(query):
        if isinstance(item, Commit):
            return i
        masks = block_masks.get((item.functor, len(item.args)))
        if not masks:
            return i
        if not any(_mask_delays(m, item.args, bindings) for m in masks):
            return i
    return None  # floundered


def _validate_query(programs, atoms):
    for a in atoms:
        if type(a) is not Compound:
            raise UnknownPredicateError("query items must be atoms, got %r" % (a,))
        pred = (a.functor, len(a.args))
        if pred in (("true", 0), ("=", 2), ("nonvar", 1)):
            continue
        if not any(p.defines(pred) for p in programs):
            raise UnknownPredicateError("unknown predicate %s/%d in query" % pred)


def _run(
    programs: Sequence[Program],
    csr: ClauseSelectionRule,
    query_atoms: Sequence[Compound],
    strategy: SelectionStrategy,
    budget: Budget,
    occurs_check: bool = True,
    record: bool = False,
    max_answers: Optional[int] = None,
):
    query_atoms = tuple(query_atoms)
    _validate_query(programs, query_atoms)
    block_masks: dict = {}
    for p in programs:
        for decl in p.blocks:
            block_masks.setdefault(decl.predicate, [])
            block_masks[decl.predicate].extend(decl.masks)
    eq_builtin = not any(p.defines(("=", 2)) for p in programs)
    n_programs = len(programs)
    counter = _fresh_start(query_atoms)

    answers: list = []
    nodes: list = []
    floundered = False
    budget_hit = False
    truncated = False
    steps = 0

    root_vars = []
    for a in query_atoms:
        vars_of(a, root_vars)

    # stack entries: (query items, triangular bindings, depth, parent edge)
    stack = [(query_atoms, {}, 0, None)]
    while stack:
        query, b, depth, edge = stack.pop()
        node = None
        if record:
            node = TreeNode(len(nodes), depth, tuple(_resolve_item(i, b) for i in query))
            nodes.append(node)
            if edge is not None:
                edge.child = node.node_id

        if truncated or steps >= budget.max_steps:
            budget_hit = budget_hit or not truncated
            if node:
                node.leaf = CUTOFF
            continue
        steps += 1

        if not query:
            sub = Substitution({v.name: resolve(v, b) for v in root_vars})
            answers.append(Answer(tuple(resolve(a, b) for a in query_atoms), sub))
            if node:
                node.leaf = SUCCESS
            if max_answers is not None and len(answers) >= max_answers:
                truncated = True
            continue

        if depth >= budget.max_depth:
            budget_hit = True
            if node:
                node.leaf = CUTOFF
            continue

        idx = _select_index(query, strategy, block_masks, b)
        if idx is None:
            floundered = True
            if node:
                node.leaf = FLOUNDER
            continue
        if node:
            node.selected = idx
        item = query[idx]
        rest = query[:idx] + query[idx + 1:]

        children = []  # (edge label, program index, bindings, child query)
        if isinstance(item, Commit):
            cond = item.condition
            cpred = (cond.functor, len(cond.args))
            if cpred == ("true", 0):
                take_then, newb = True, b
            elif cpred == ("nonvar", 1):
                take_then, newb = type(walk(cond.args[0], b)) is not Var, b
            else:  # =/2: commit to then with the unifier, else without bindings
                attempt = dict(b)
                if unify_bindings(cond.args[0], cond.args[1], attempt, occurs_check):
                    take_then, newb = True, attempt
                else:
                    take_then, newb = False, b
            branch = item.then_branch if take_then else item.else_branch
            label = "commit:then" if take_then else "commit:else"
            children.append((label, None, newb, query[:idx] + branch + query[idx + 1:]))
        else:
            pred = (item.functor, len(item.args))
            if pred == ("true", 0):
                children.append(("true", None, b, rest))
            elif pred == ("nonvar", 1):
                if type(walk(item.args[0], b)) is not Var:
                    children.append(("nonvar", None, b, rest))
            elif pred == ("=", 2) and eq_builtin:
                newb = dict(b)
                if unify_bindings(item.args[0], item.args[1], newb, occurs_check):
                    children.append(("=", None, newb, rest))
            else:
                if n_programs == 1:
                    prog_idx = 0
                else:
                    prog_idx = csr(
                        CsNode(len(nodes) - 1, depth, query, idx, resolve(item, b))
                    )
                    if not 0 <= prog_idx < n_programs:
                        raise ValueError(
                            "clause selection rule returned program index %d, "
                            "have %d programs" % (prog_idx, n_programs)
                        )
                for _, rule in programs[prog_idx].rules_for(pred):
                    renamer = _Renamer(counter)
                    head = renamer.rename_term(rule.head)
                    newb = dict(b)
                    if not unify_bindings(item, head, newb, occurs_check):
                        continue
                    body = tuple(renamer.rename_item(i) for i in rule.body)
                    counter = renamer.counter
                    children.append(
                        (rule.label, prog_idx, newb, query[:idx] + body + query[idx + 1:])
                    )

        if not children:
            if node:
                node.leaf = FAIL
            continue
        pushed = []
        for label, prog_idx, newb, child_query in children:
            child_edge = None
            if node is not None:
                delta = {v: resolve(t, newb) for v, t in newb.items() if v not in b}
                child_edge = TreeEdge(label, prog_idx, delta)
                node.edges.append(child_edge)
            pushed.append((child_query, newb, depth + 1, child_edge))
        stack.extend(reversed(pushed))

    return answers, floundered, budget_hit, truncated, nodes


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------

def solve(
    program: Program,
    query: Sequence[Compound],
    strategy: SelectionStrategy = SelectionStrategy.LEFTMOST,
    budget: Optional[Budget] = None,
    occurs_check: bool = True,
    max_answers: Optional[int] = None,
) -> Outcome:
    """Depth-first SLD resolution; answers come in discovery order.

    ``floundered`` is set when some explored branch reached a nonempty query
    with every atom delayed; ``exhaustive`` means no budget cutoff happened
    and no answer limit stopped the search early.
    """
    budget = budget or Budget.from_env()
    answers, floundered, budget_hit, truncated, _ = _run(
        [program], always(0), query, strategy, budget, occurs_check,
        record=False, max_answers=max_answers,
    )
    return Outcome(answers, not budget_hit and not truncated, floundered, budget_hit)


def build_tree(
    program: Program,
    query: Sequence[Compound],
    strategy: SelectionStrategy = SelectionStrategy.LEFTMOST,
    budget: Optional[Budget] = None,
    occurs_check: bool = True,
) -> DerivationTree:
    """Materialize the SLD tree explored by solve."""
    budget = budget or Budget.from_env()
    answers, floundered, budget_hit, truncated, nodes = _run(
        [program], always(0), query, strategy, budget, occurs_check, record=True
    )
    return DerivationTree(
        tuple(query), strategy, (program.name or "program",),
        nodes, answers, floundered, budget_hit, truncated,
    )


def cssld_solve(
    programs: Sequence[Program],
    csr: ClauseSelectionRule,
    query: Sequence[Compound],
    strategy: SelectionStrategy = SelectionStrategy.LEFTMOST,
    budget: Optional[Budget] = None,
    occurs_check: bool = True,
) -> DerivationTree:
    """Clause-selection resolution: each node's children come from exactly
    the program the selection rule picks, so the tree is a pruned SLD tree
    of the union program."""
    if not programs:
        raise ValueError("cssld_solve needs at least one program")
    preds = programs[0].predicates
    for p in programs[1:]:
        if p.predicates != preds:
            raise ValueError("csSLD programs must share the predicate signature")
    budget = budget or Budget.from_env()
    answers, floundered, budget_hit, truncated, nodes = _run(
        programs, csr, query, strategy, budget, occurs_check, record=True
    )
    return DerivationTree(
        tuple(query), strategy,
        tuple(p.name or ("program%d" % i) for i, p in enumerate(programs)),
        nodes, answers, floundered, budget_hit, truncated,
    )
