"""Bounded mechanical checks of the sufficient conditions for program
correctness (rule instances preserve the specification), coverage
(semi-completeness), recurrence, query boundedness, the per-program coverage
precondition for clause-selection pruning, and bottom-up model oracles.

All checks are bounded: a FAIL witness is a real violation of the condition,
while a PASS is evidence up to the declared bound, not a proof.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

from .programs import (
    GroundRuleInstance,
    Program,
    Rule,
    bounded_instances,
)
from .specs import Specification
from .terms import (
    Compound,
    Signature,
    Term,
    Var,
    atom_size,
    format_term,
    herbrand_terms_of_size,
    is_cons,
    resolve,
    unify_bindings,
    vars_of,
)

BOUNDED_EVIDENCE_NOTE = (
    "bounded check: FAIL witnesses are real violations; "
    "PASS is evidence up to the bound, not a proof"
)


# ---------------------------------------------------------------------------
# Level mappings
# ---------------------------------------------------------------------------

def list_weight(t: Term) -> int:
    """Weight of a ground term: list cells add their parts, anything else is 1.

    A k-element list weighs 1 plus the sum of its element weights, so every
    term has positive weight.
    """
    if is_cons(t):
        return list_weight(t.args[0]) + list_weight(t.args[1])
    return 1


def sym_list_weight(t: Term) -> Optional[int]:
    """list_weight treating variables as opaque; None when instance-dependent.

    A non-list compound weighs 1 no matter what its arguments are, so
    variables below a pair constructor do not hurt boundedness.
    """
    if type(t) is Var:
        return None
    if is_cons(t):
        h = sym_list_weight(t.args[0])
        r = sym_list_weight(t.args[1])
        return None if h is None or r is None else h + r
    return 1


def list_length(t: Term) -> int:
    """Length of the cons spine; 0 for any non-cons term."""
    n = 0
    while is_cons(t):
        n += 1
        t = t.args[1]
    return n


def sym_list_length(t: Term) -> Optional[int]:
    n = 0
    while is_cons(t):
        n += 1
        t = t.args[1]
    return None if type(t) is Var else n


def _madd(*xs):
    total = 0
    for x in xs:
        if x is None:
            return None
        total += x
    return total


def _mmax(*xs):
    if any(x is None for x in xs):
        return None
    return max(xs)


def _mscale(k, x):
    return None if x is None else k * x


class LevelMapping:
    """A total ground-atom (and ground-term) to natural-number function.

    Rules are per-predicate callables taking (args, weight, length) where
    weight/length are the term measures; in symbolic mode those measures
    return None for instance-dependent values and the rule must propagate it.
    Atoms of predicates without a rule default to the sum of their argument
    weights, keeping the mapping total.
    """

    def __init__(self, name: str, rules: Mapping, default=None):
        self.name = name
        self.rules = dict(rules)
        self.default = default or (lambda args, W, L: _madd(*(W(a) for a in args)))

    def _rule(self, atom: Compound):
        return self.rules.get((atom.functor, len(atom.args)), self.default)

    def atom_level(self, atom: Compound) -> int:
        if not atom.ground:
            raise ValueError("level mappings are defined on ground atoms: %r" % atom)
        value = self._rule(atom)(atom.args, list_weight, list_length)
        if value < 0:
            raise ValueError("level mapping %s produced a negative level" % self.name)
        return value

    def term_level(self, t: Term) -> int:
        if not t.ground:
            raise ValueError("level mappings are defined on ground terms: %r" % t)
        return list_weight(t)

    def sym_atom_level(self, atom: Compound) -> Optional[int]:
        return self._rule(atom)(atom.args, sym_list_weight, sym_list_length)


def level(lm: LevelMapping, x) -> int:
    """Evaluate the mapping: atoms of known predicates by their rule,
    anything else by the term measure."""
    if type(x) is Compound and (x.functor, len(x.args)) in lm.rules:
        return lm.atom_level(x)
    return lm.term_level(x)


def mapping_for_p1() -> LevelMapping:
    return LevelMapping(
        "P1",
        {
            ("sat_cnf", 1): lambda a, W, L: W(a[0]),
            ("sat_cl", 1): lambda a, W, L: W(a[0]),
            ("=", 2): lambda a, W, L: 0,
        },
    )


def mapping_for_p3() -> LevelMapping:
    return LevelMapping(
        "P3",
        {
            ("sat", 2): lambda a, W, L: _madd(_mmax(_mscale(3, W(a[0])), L(a[1])), 2),
            ("sat_cnf", 1): lambda a, W, L: _madd(_mscale(3, W(a[0])), 1),
            ("sat_cl", 1): lambda a, W, L: _madd(_mscale(3, W(a[0])), 1),
            ("sat_cl3", 3): lambda a, W, L: _madd(_mscale(3, W(a[0])), 1),
            ("sat_cl5", 5): lambda a, W, L: _madd(_mscale(3, W(a[4])), 3),
            ("sat_cl5a", 5): lambda a, W, L: _madd(_mscale(3, W(a[4])), 2),
            ("tflist", 1): lambda a, W, L: L(a[0]),
            ("tf", 1): lambda a, W, L: 0,
            ("=", 2): lambda a, W, L: 0,
        },
    )


def weighted_sum_mapping(name: str, table: Mapping) -> LevelMapping:
    """User hook: per predicate, argument weight coefficients and a constant.

    ``table`` maps (predicate, arity) to (coefficients, constant); the level
    of p(t1,...,tn) is sum(ci * weight(ti)) + constant.
    """
    rules = {}
    for pred, (coeffs, constant) in table.items():
        def rule(args, W, L, coeffs=tuple(coeffs), constant=constant):
            return _madd(*(_mscale(c, W(a)) for c, a in zip(coeffs, args)), constant)

        rules[pred] = rule
    return LevelMapping(name, rules)


BUILTIN_MAPPINGS: Callable[[], dict] = lambda: {"P1": mapping_for_p1(), "P3": mapping_for_p3()}


def mapping_by_name(name: str) -> LevelMapping:
    mappings = BUILTIN_MAPPINGS()
    if name not in mappings:
        raise KeyError("unknown level mapping %r (have: %s)" % (name, ", ".join(sorted(mappings))))
    return mappings[name]


# ---------------------------------------------------------------------------
# Check reports
# ---------------------------------------------------------------------------

PASS = "PASS"
FAIL = "FAIL"


@dataclass
class CheckReport:
    check: str
    subject: str
    verdict: str
    witnesses: list
    bound: int
    stats: dict = field(default_factory=dict)
    notes: tuple = (BOUNDED_EVIDENCE_NOTE,)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def witness_strings(self) -> list:
        return [_render_witness(w) for w in self.witnesses]

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "subject": self.subject,
            "verdict": self.verdict,
            "bound": self.bound,
            "stats": dict(sorted(self.stats.items())),
            "witnesses": self.witness_strings(),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary(self) -> str:
        lines = [
            "%s %s: %s (bound %d)" % (self.check, self.subject, self.verdict, self.bound)
        ]
        for key, value in sorted(self.stats.items()):
            lines.append("  %s: %s" % (key, value))
        shown = self.witnesses[:10]
        for w in shown:
            lines.append("  witness: %s" % _render_witness(w))
        if len(self.witnesses) > len(shown):
            lines.append("  ... %d more witnesses" % (len(self.witnesses) - len(shown)))
        for note in self.notes:
            lines.append("  note: %s" % note)
        return "\n".join(lines)


def _render_witness(w) -> str:
    if isinstance(w, GroundRuleInstance):
        return repr(w)
    if isinstance(w, Compound):
        return format_term(w)
    return str(w)


def _check_signature(program: Program, spec: Optional[Specification], sig: Optional[Signature]):
    if sig is not None:
        return sig
    merged = program.signature
    if spec is not None:
        merged = merged.merge(spec.base_signature)
    merged.check_has_constant()
    return merged


# ---------------------------------------------------------------------------
# Correctness (rule instances preserve the specification)
# ---------------------------------------------------------------------------

def check_correctness(
    program: Program,
    spec: Specification,
    sig: Optional[Signature] = None,
    bound: int = 4,
    slack: int = 2,
    max_witnesses: Optional[int] = None,
) -> CheckReport:
    """PASS iff for every bounded ground rule instance, a specified body
    implies a specified head.  FAIL lists every violating instance found.

    The instance stream holds head atoms within the bound and body atoms
    within bound + slack.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    sig = _check_signature(program, spec, sig)
    pure = program.commit_free()
    contains = _memo_contains(spec)
    witnesses = []
    instances = 0
    for rule in pure.rules:
        for inst in bounded_instances(rule, sig, bound, bound + slack):
            instances += 1
            if all(contains(a) for a in inst.body) and not contains(inst.head):
                witnesses.append(inst)
                if max_witnesses is not None and len(witnesses) >= max_witnesses:
                    return _report("correctness", program, spec, witnesses, bound, instances)
    return _report("correctness", program, spec, witnesses, bound, instances)


def _report(check, program, spec, witnesses, bound, instances, **extra_stats):
    stats = {"instances_checked": instances}
    stats.update(extra_stats)
    subject = "%s w.r.t. %s" % (program.name or "program", spec.name if spec else "-")
    return CheckReport(check, subject, FAIL if witnesses else PASS, witnesses, bound, stats)


def _memo_contains(spec: Specification):
    cache: dict = {}

    def contains(atom: Compound) -> bool:
        hit = cache.get(atom)
        if hit is None:
            hit = cache[atom] = spec.contains(atom)
        return hit

    return contains


# ---------------------------------------------------------------------------
# Coverage (the sufficient condition for semi-completeness)
# ---------------------------------------------------------------------------

def check_coverage(
    program: Program,
    spec: Specification,
    sig: Optional[Signature] = None,
    bound: int = 4,
    slack: int = 2,
    max_witnesses: Optional[int] = None,
) -> CheckReport:
    """PASS iff every specified atom within the bound is the head of some
    ground rule instance whose body atoms are all specified.  Covering-body
    variables may use terms up to bound + slack."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    sig = _check_signature(program, spec, sig)
    pure = program.commit_free()
    contains = _memo_contains(spec)
    universe = [
        t
        for size in range(1, bound + slack + 1)
        for t in herbrand_terms_of_size(sig, size)
    ]
    witnesses = []
    atoms_checked = 0
    for atom in spec.enumerate(sig, bound):
        atoms_checked += 1
        if not is_covered(atom, pure, contains, universe):
            witnesses.append(atom)
            if max_witnesses is not None and len(witnesses) >= max_witnesses:
                break
    report = _report("coverage", program, spec, witnesses, bound, atoms_checked)
    report.stats["body_bound"] = bound + slack
    return report


def is_covered(
    atom: Compound,
    pure_program: Program,
    contains,
    universe: Sequence[Compound],
) -> bool:
    """Is the ground atom the head of a rule instance with specified body?"""
    for _, rule in pure_program.rules_for((atom.functor, len(atom.args))):
        bindings: dict = {}
        if not unify_bindings(atom, rule.head, bindings):
            continue
        body_atoms = []
        clash = False
        for item in rule.body:
            pred = (item.functor, len(item.args))
            if pred == ("true", 0):
                continue
            if pred == ("=", 2):
                if not unify_bindings(item.args[0], item.args[1], bindings):
                    clash = True
                    break
            body_atoms.append(item)
        if clash:
            continue
        resolved = [resolve(a, bindings) for a in body_atoms]
        free: list = []
        for a in resolved:
            vars_of(a, free)
        if _exists_specified_grounding(resolved, free, contains, universe):
            return True
    return False


def _exists_specified_grounding(body_atoms, free, contains, universe) -> bool:
    ground_part = [a for a in body_atoms if a.ground]
    if not all(contains(a) for a in ground_part):
        return False
    open_part = [a for a in body_atoms if not a.ground]
    if not free:
        return True
    for assignment in itertools.product(universe, repeat=len(free)):
        m = {v.name: t for v, t in zip(free, assignment)}
        if all(contains(_ground(a, m)) for a in open_part):
            return True
    return False


def _ground(t: Term, m: dict) -> Term:
    if type(t) is Var:
        return m[t.name]
    if t.ground:
        return t
    return Compound(t.functor, tuple(_ground(a, m) for a in t.args))


# ---------------------------------------------------------------------------
# Recurrence and boundedness
# ---------------------------------------------------------------------------

def check_recurrent(
    program: Program,
    lm: LevelMapping,
    sig: Optional[Signature] = None,
    bound: int = 4,
    slack: int = 2,
    max_witnesses: Optional[int] = None,
) -> CheckReport:
    """PASS iff head level strictly exceeds every body-atom level on all
    bounded ground instances (``=`` body atoms included, at their own level).
    Body atoms may exceed the head bound by the slack, so shrinking heads
    paired with growing bodies are still caught."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    sig = _check_signature(program, None, sig)
    pure = program.commit_free()
    witnesses = []
    instances = 0
    for rule in pure.rules:
        for inst in bounded_instances(rule, sig, bound, bound + slack, keep_eq=True):
            instances += 1
            head_level = lm.atom_level(inst.head)
            if any(head_level <= lm.atom_level(b) for b in inst.body):
                witnesses.append(inst)
                if max_witnesses is not None and len(witnesses) >= max_witnesses:
                    break
        if max_witnesses is not None and len(witnesses) >= max_witnesses:
            break
    stats = {"instances_checked": instances, "level_mapping": lm.name}
    subject = "%s under %s" % (program.name or "program", lm.name)
    return CheckReport(
        "recurrence", subject, FAIL if witnesses else PASS, witnesses, bound, stats
    )


@dataclass(frozen=True)
class QueryBound:
    """Result of the conservative symbolic boundedness check."""

    bounded: bool
    value: Optional[int]
    atom_levels: tuple

    def __repr__(self):
        return "BOUNDED(%d)" % self.value if self.bounded else "UNKNOWN"


def check_bounded_query(query: Sequence[Compound], lm: LevelMapping) -> QueryBound:
    """BOUNDED(v) when the level of every ground instance of the query is the
    fixed value v (v is the maximum over its atoms); UNKNOWN otherwise.
    The check is conservative: it never claims BOUNDED falsely, but may say
    UNKNOWN for queries that a sharper argument shows bounded."""
    levels = tuple(lm.sym_atom_level(a) for a in query)
    if any(v is None for v in levels) or not levels:
        return QueryBound(False, None, levels)
    return QueryBound(True, max(levels), levels)


# ---------------------------------------------------------------------------
# Per-program coverage for clause-selection pruning
# ---------------------------------------------------------------------------

@dataclass
class CsSldConditionReport:
    reports: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def verdict(self) -> str:
        return PASS if self.passed else FAIL

    def to_dict(self) -> dict:
        return {
            "check": "cssld-condition",
            "verdict": self.verdict,
            "per_program": [r.to_dict() for r in self.reports],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary(self) -> str:
        lines = ["cssld-condition: %s" % self.verdict]
        lines.extend(r.summary() for r in self.reports)
        return "\n".join(lines)


def check_cssld_condition(
    programs: Sequence[Program],
    spec: Specification,
    sig: Optional[Signature] = None,
    bound: int = 4,
    slack: int = 2,
    max_witnesses: Optional[int] = None,
) -> CsSldConditionReport:
    """Coverage of the COMMON specification by each program separately: the
    precondition under which every finite clause-selection tree stays
    complete."""
    reports = tuple(
        check_coverage(p, spec, sig, bound, slack, max_witnesses) for p in programs
    )
    return CsSldConditionReport(reports)


# ---------------------------------------------------------------------------
# Bottom-up model and the ground-program completeness probe
# ---------------------------------------------------------------------------

@dataclass
class ModelResult:
    atoms: frozenset
    fixpoint_reached: bool
    iterations: int

    def __contains__(self, atom: Compound) -> bool:
        return atom in self.atoms

    def by_predicate(self) -> dict:
        out: dict = {}
        for a in sorted(self.atoms, key=format_term):
            out.setdefault((a.functor, len(a.args)), []).append(a)
        return out


def bottom_up_model(
    program: Program,
    sig: Optional[Signature] = None,
    term_bound: int = 6,
    iteration_cap: Optional[int] = None,
) -> ModelResult:
    """Least fixpoint of the immediate-consequence step, restricted to atoms
    whose argument sizes stay within term_bound.  Derived atoms exceeding the
    bound are discarded, so completeness verdicts need an enumeration margin."""
    sig = _check_signature(program, None, sig)
    pure = program.commit_free()
    eq_builtin = not pure.defines(("=", 2))
    model: set = set()
    by_pred: dict = {}
    iterations = 0
    changed = True
    while changed and (iteration_cap is None or iterations < iteration_cap):
        iterations += 1
        changed = False
        for rule in pure.rules:
            for head in _immediate_consequences(rule, by_pred, sig, term_bound, eq_builtin):
                if head not in model:
                    model.add(head)
                    by_pred.setdefault((head.functor, len(head.args)), []).append(head)
                    changed = True
    return ModelResult(frozenset(model), not changed, iterations)


def _immediate_consequences(rule: Rule, by_pred, sig, term_bound, eq_builtin):
    items = [
        item
        for item in rule.body
        if (item.functor, len(item.args)) != ("true", 0)
    ]

    def match(i, bindings):
        if i == len(items):
            yield from _ground_heads(rule.head, bindings, sig, term_bound)
            return
        item = items[i]
        pred = (item.functor, len(item.args))
        if pred == ("=", 2) and eq_builtin:
            newb = dict(bindings)
            if unify_bindings(item.args[0], item.args[1], newb):
                yield from match(i + 1, newb)
            return
        for candidate in by_pred.get(pred, ()):
            newb = dict(bindings)
            if unify_bindings(item, candidate, newb):
                yield from match(i + 1, newb)

    yield from match(0, {})


def _ground_heads(head: Compound, bindings, sig, term_bound):
    resolved = resolve(head, bindings)
    free: list = []
    vars_of(resolved, free)
    base = atom_size(resolved)  # each free variable occurrence counts 1
    if not free:
        if base <= term_bound:
            yield resolved
        return
    occurrences = {v.name: 0 for v in free}
    _count_occurrences(resolved, occurrences)
    budget = term_bound - base
    if budget < 0:
        return

    def assign(vs, remaining, m):
        if not vs:
            yield dict(m)
            return
        v, rest = vs[0], vs[1:]
        weight = occurrences[v.name]
        max_extra = remaining if weight == 0 else remaining // weight
        for size in range(1, max_extra + 2):
            extra = weight * (size - 1)
            if extra > remaining:
                break
            for t in herbrand_terms_of_size(sig, size):
                m[v.name] = t
                yield from assign(rest, remaining - extra, m)
        m.pop(vs[0].name, None)

    for m in assign(free, budget, {}):
        yield _ground(resolved, m)


def _count_occurrences(t: Term, occurrences: dict):
    if type(t) is Var:
        occurrences[t.name] = occurrences.get(t.name, 0) + 1
    elif not t.ground:
        for a in t.args:
            _count_occurrences(a, occurrences)


def ground_completeness_probe(
    program: Program,
    spec: Specification,
    sig: Optional[Signature] = None,
    bound: int = 4,
    margin: int = 2,
    iteration_cap: Optional[int] = None,
) -> CheckReport:
    """PASS iff every specified atom within the bound is in the bottom-up
    model (equivalently, has a successful bounded derivation over the ground
    program).  This captures completeness arguments that hold for the ground
    program even when the general program loops."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    sig = _check_signature(program, spec, sig)
    model = bottom_up_model(program, sig, bound + margin, iteration_cap)
    witnesses = []
    atoms_checked = 0
    for atom in spec.enumerate(sig, bound):
        atoms_checked += 1
        if atom not in model:
            witnesses.append(atom)
    report = _report(
        "ground-completeness", program, spec, witnesses, bound, atoms_checked,
        model_size=len(model.atoms), iterations=model.iterations,
        fixpoint_reached=model.fixpoint_reached,
    )
    return report
