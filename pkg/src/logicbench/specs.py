"""Specifications as Herbrand interpretations.

A specification is a decidable membership predicate over ground atoms plus a
bounded enumerator.  The built-in specifications describe the corpus
programs: S1 for the five-rule checker, S2/S2_0 for the refined clause
predicates, S3/S3_0 for the sat/2 top level.  The *_0 variants are the
completeness-side specifications; the plain ones are for correctness.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping

from .terms import (
    Compound,
    FALSE,
    Signature,
    Term,
    TRUE,
    herbrand_terms_of_size,
    is_pair,
    spine,
)

# The default alphabet for enumeration and bounded checks: truth values, the
# pair and list constructors, plus one free constant standing in for the rest
# of the (unboundedly large) alphabet.
DEFAULT_BASE_SIGNATURE = Signature.of(
    ("true", 0), ("false", 0), ("-", 2), ("[|]", 2), ("[]", 0), ("a", 0)
)


# ---------------------------------------------------------------------------
# The L sets over ground terms
# ---------------------------------------------------------------------------

def in_L1(t: Term) -> bool:
    """Terms [t1,...,tn|s] with n>0 where some ti is u-u; s is unconstrained."""
    _require_ground(t)
    while _is_cons(t):
        head = t.args[0]
        if is_pair(head) and head.args[0] == head.args[1]:
            return True
        t = t.args[1]
    return False


def in_L1_0(t: Term) -> bool:
    """Nonempty proper lists of pairs ti-ui with ti = ui for some i."""
    _require_ground(t)
    elems, tail = spine(t)
    if not elems or not _is_nil(tail):
        return False
    if not all(is_pair(e) for e in elems):
        return False
    return any(e.args[0] == e.args[1] for e in elems)


def in_L2(t: Term) -> bool:
    """Proper lists whose elements are all in L1."""
    _require_ground(t)
    elems, tail = spine(t)
    return _is_nil(tail) and all(in_L1(e) for e in elems)


def in_L2_0(t: Term) -> bool:
    """Proper lists whose elements are all in L1_0."""
    _require_ground(t)
    elems, tail = spine(t)
    return _is_nil(tail) and all(in_L1_0(e) for e in elems)


def is_truth_value(t: Term) -> bool:
    return t == TRUE or t == FALSE


def is_truth_value_list(t: Term) -> bool:
    elems, tail = spine(t)
    return _is_nil(tail) and all(is_truth_value(e) for e in elems)


def _is_cons(t) -> bool:
    return type(t) is Compound and t.functor == "[|]" and len(t.args) == 2


def _is_nil(t) -> bool:
    return type(t) is Compound and t.functor == "[]" and not t.args


def _require_ground(t: Term):
    if not t.ground:
        raise ValueError("specification membership is defined on ground terms only")


# ---------------------------------------------------------------------------
# Specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Specification:
    """A named set of ground atoms given by per-predicate membership tests.

    ``predicates`` maps (name, arity) to a test over the ground argument
    tuple.  Enumeration filters the bounded ground-atom universe, so it is
    exhaustive up to the bound by construction.
    """

    name: str
    predicates: Mapping
    base_signature: Signature = field(default=DEFAULT_BASE_SIGNATURE, compare=False)

    def contains(self, atom: Compound) -> bool:
        if not atom.ground:
            raise ValueError("specification membership needs a ground atom: %r" % atom)
        test = self.predicates.get((atom.functor, len(atom.args)))
        return test is not None and test(atom.args)

    def enumerate(self, sig: Signature, size_bound: int) -> Iterator[Compound]:
        """All specified atoms whose argument sizes sum to at most the bound."""
        sig.check_has_constant()
        for (name, arity) in sorted(self.predicates):
            test = self.predicates[(name, arity)]
            if arity == 0:
                if test(()):
                    yield Compound(name)
                continue
            for total in range(arity, size_bound + 1):
                for shape in _arg_shapes(total, arity):
                    pools = [herbrand_terms_of_size(sig, s) for s in shape]
                    for args in itertools.product(*pools):
                        if test(args):
                            yield Compound(name, args)

    def with_extra(self, name: str, extra: Mapping) -> "Specification":
        table = dict(self.predicates)
        table.update(extra)
        return Specification(name, table, self.base_signature)


def _arg_shapes(total: int, arity: int):
    if arity == 1:
        return ((total,),) if total >= 1 else ()
    out = []
    for first in range(1, total - arity + 2):
        for rest in _arg_shapes(total - first, arity - 1):
            out.append((first,) + rest)
    return tuple(out)


@dataclass(frozen=True)
class SpecPair:
    """Approximate specification: a correctness side and a completeness side.

    Every completeness atom must also be a correctness atom; check_pair
    verifies this within a bound.
    """

    for_correctness: Specification
    for_completeness: Specification

    def check_contained(self, sig: Signature, size_bound: int) -> bool:
        return all(
            self.for_correctness.contains(a)
            for a in self.for_completeness.enumerate(sig, size_bound)
        )


def spec_contains(spec: Specification, atom: Compound) -> bool:
    return spec.contains(atom)


def spec_enumerate(spec: Specification, sig: Signature, size_bound: int):
    return spec.enumerate(sig, size_bound)


# ---------------------------------------------------------------------------
# Built-in specifications
# ---------------------------------------------------------------------------

def _eq_table():
    return {("=", 2): lambda args: args[0] == args[1]}


def _cl_chain_table(clause_set: Callable[[Term], bool]):
    # sat_cl3(s,v,p) specified iff [p-v|s] is in the clause set; the
    # five-argument predicates put the first two pairs in front.
    def cl3(args):
        s, v, p = args
        return clause_set(Compound("[|]", (Compound("-", (p, v)), s)))

    def cl5(args):
        v1, p1, v2, p2, s = args
        rest = Compound("[|]", (Compound("-", (p2, v2)), s))
        return clause_set(Compound("[|]", (Compound("-", (p1, v1)), rest)))

    return {
        ("sat_cl3", 3): cl3,
        ("sat_cl5", 5): cl5,
        ("sat_cl5a", 5): cl5,
    }


def spec_S1() -> Specification:
    table = {
        ("sat_cnf", 1): lambda args: in_L2(args[0]),
        ("sat_cl", 1): lambda args: in_L1(args[0]),
    }
    table.update(_eq_table())
    return Specification("S1", table)


def _s2_table(clause_set, cnf_set):
    table = {
        ("sat_cnf", 1): lambda args: cnf_set(args[0]),
        ("sat_cl", 1): lambda args: clause_set(args[0]),
    }
    table.update(_eq_table())
    table.update(_cl_chain_table(clause_set))
    return table


def spec_S2() -> Specification:
    return Specification("S2", _s2_table(in_L1, in_L2))


def spec_S2_0() -> Specification:
    return Specification("S2_0", _s2_table(in_L1_0, in_L2_0))


def _s3_table(clause_set, cnf_set):
    table = _s2_table(clause_set, cnf_set)
    table[("sat", 2)] = lambda args: cnf_set(args[0]) and is_truth_value_list(args[1])
    table[("tflist", 1)] = lambda args: is_truth_value_list(args[0])
    table[("tf", 1)] = lambda args: is_truth_value(args[0])
    return table


def spec_S3() -> Specification:
    return Specification("S3", _s3_table(in_L1, in_L2))


def spec_S3_0() -> Specification:
    return Specification("S3_0", _s3_table(in_L1_0, in_L2_0))


_REGISTRY: dict = {}


def register_spec(spec: Specification):
    _REGISTRY[spec.name] = spec


def builtin_specs() -> dict:
    specs = {s.name: s for s in (spec_S1(), spec_S2(), spec_S2_0(), spec_S3(), spec_S3_0())}
    specs.update(_REGISTRY)
    return specs


def spec_by_name(name: str) -> Specification:
    specs = builtin_specs()
    if name not in specs:
        raise KeyError("unknown specification %r (have: %s)" % (name, ", ".join(sorted(specs))))
    return specs[name]
