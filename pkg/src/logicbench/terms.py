"""First-order terms, substitutions, unification, and bounded Herbrand enumeration.

Terms are immutable and hashable.  A constant is a compound with no
arguments.  List cells use the functor ``[|]`` with the empty list ``[]``;
pairs use the right-associative infix functor ``-``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Optional, Sequence, Union

LIST_FUNCTOR = "[|]"
NIL_NAME = "[]"
PAIR_FUNCTOR = "-"


class Var:
    """A logic variable, identified by its name."""

    __slots__ = ("name", "_hash")
    ground = False
    size = 1

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return self is other or (type(other) is Var and other.name == self.name)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return self.name


class Compound:
    """A functor applied to argument terms.

    Groundness and node count are precomputed so membership tests and
    size-bounded enumeration stay cheap on shared subterms.
    """

    __slots__ = ("functor", "args", "ground", "size", "_hash")

    def __init__(self, functor: str, args: Sequence["Term"] = ()):
        args = tuple(args)
        self.functor = functor
        self.args = args
        g = True
        n = 1
        for a in args:
            n += a.size
            g = g and a.ground
        self.ground = g
        self.size = n
        self._hash = hash((functor, args))

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not Compound or other._hash != self._hash:
            return False
        return other.functor == self.functor and other.args == self.args

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return format_term(self)


Term = Union[Var, Compound]

NIL = Compound(NIL_NAME)
TRUE = Compound("true")
FALSE = Compound("false")


def const(name: str) -> Compound:
    return Compound(name)


def pair(left: Term, right: Term) -> Compound:
    return Compound(PAIR_FUNCTOR, (left, right))


def cons(head: Term, tail: Term) -> Compound:
    return Compound(LIST_FUNCTOR, (head, tail))


def mklist(items: Sequence[Term], tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(items):
        out = cons(item, out)
    return out


def is_cons(t: Term) -> bool:
    return type(t) is Compound and t.functor == LIST_FUNCTOR and len(t.args) == 2


def is_nil(t: Term) -> bool:
    return type(t) is Compound and t.functor == NIL_NAME and not t.args


def is_pair(t: Term) -> bool:
    return type(t) is Compound and t.functor == PAIR_FUNCTOR and len(t.args) == 2


def spine(t: Term) -> tuple[list[Term], Term]:
    """Split a term into its cons-cell elements and the final tail."""
    elems = []
    while is_cons(t):
        elems.append(t.args[0])
        t = t.args[1]
    return elems, t


def is_proper_list(t: Term) -> bool:
    """True for [] and cons chains ending in []; [a,a|X] and [a,a|a] are not lists."""
    _, tail = spine(t)
    return is_nil(tail)


def term_size(t: Term) -> int:
    """Node count: each functor occurrence and each constant counts 1."""
    return t.size


def atom_size(a: Compound) -> int:
    """Size of an atom for enumeration bounds: the sum of its argument sizes.

    The predicate symbol itself is free, so the bound measures the data the
    atom carries.
    """
    return sum(arg.size for arg in a.args)


def vars_of(t: Term, acc: Optional[list[Var]] = None) -> list[Var]:
    """All variables of t, in first-occurrence order, without duplicates."""
    if acc is None:
        acc = []
    if type(t) is Var:
        if t not in acc:
            acc.append(t)
    elif not t.ground:
        for a in t.args:
            vars_of(a, acc)
    return acc


# ---------------------------------------------------------------------------
# Rendering (Edinburgh-style subset: list sugar, infix - and =)
# ---------------------------------------------------------------------------

def format_term(t: Term) -> str:
    # explicit work stack so arbitrarily deep terms render without hitting
    # the interpreter recursion limit
    out: list[str] = []
    stack: list = [t]
    while stack:
        item = stack.pop()
        if type(item) is str:
            out.append(item)
            continue
        if type(item) is Var:
            out.append(item.name)
            continue
        if is_nil(item):
            out.append(NIL_NAME)
            continue
        if is_cons(item):
            elems, tail = spine(item)
            parts: list = ["["]
            for i, e in enumerate(elems):
                if i:
                    parts.append(",")
                parts.append(e)
            if not is_nil(tail):
                parts.append("|")
                parts.append(tail)
            parts.append("]")
            stack.extend(reversed(parts))
            continue
        if is_pair(item):
            left, right = item.args
            if is_pair(left):  # '-' is right-associative
                stack.extend(reversed(["(", left, ")", "-", right]))
            else:
                stack.extend(reversed([left, "-", right]))
            continue
        if item.functor == "=" and len(item.args) == 2:
            stack.extend(reversed([item.args[0], "=", item.args[1]]))
            continue
        if not item.args:
            out.append(item.functor)
            continue
        parts = [item.functor, "("]
        for i, a in enumerate(item.args):
            if i:
                parts.append(",")
            parts.append(a)
        parts.append(")")
        stack.extend(reversed(parts))
    return "".join(out)


# ---------------------------------------------------------------------------
# Substitutions
# ---------------------------------------------------------------------------

class Substitution(Mapping):
    """Idempotent finite map from variable names to terms."""

    __slots__ = ("_m",)

    def __init__(self, bindings: Optional[Mapping[str, Term]] = None):
        m = dict(bindings) if bindings else {}
        # drop no-op bindings X -> X
        self._m = {v: t for v, t in m.items() if not (type(t) is Var and t.name == v)}

    def __getitem__(self, key: str) -> Term:
        return self._m[key]

    def __iter__(self):
        return iter(self._m)

    def __len__(self):
        return len(self._m)

    def __repr__(self):
        inner = ", ".join("%s=%s" % (v, format_term(t)) for v, t in sorted(self._m.items()))
        return "{%s}" % inner

    def apply(self, t: Term) -> Term:
        if not self._m:
            return t
        return _subst(t, self._m)

    def compose(self, other: "Substitution") -> "Substitution":
        """Substitution such that applying it equals applying self, then other."""
        m = {v: other.apply(t) for v, t in self._m.items()}
        for v, t in other._m.items():
            m.setdefault(v, t)
        return Substitution(m)


def _subst(t: Term, m: Mapping[str, Term]) -> Term:
    if type(t) is Var:
        return m.get(t.name, t)
    if t.ground or not t.args:
        return t
    changed = False
    newargs = []
    for a in t.args:
        na = _subst(a, m)
        if na is not a:
            changed = True
        newargs.append(na)
    return Compound(t.functor, newargs) if changed else t


EMPTY_SUBSTITUTION = Substitution()


# ---------------------------------------------------------------------------
# Unification (triangular bindings internally; idempotent mgu externally)
# ---------------------------------------------------------------------------

def walk(t: Term, bindings: Mapping[str, Term]) -> Term:
    while type(t) is Var:
        nxt = bindings.get(t.name)
        if nxt is None:
            return t
        t = nxt
    return t


def resolve(t: Term, bindings: Mapping[str, Term]) -> Term:
    """Fully apply triangular bindings to t."""
    t = walk(t, bindings)
    if type(t) is Var or t.ground:
        return t
    return Compound(t.functor, tuple(resolve(a, bindings) for a in t.args))


def _occurs(v: Var, t: Term, bindings: Mapping[str, Term]) -> bool:
    t = walk(t, bindings)
    if type(t) is Var:
        return t.name == v.name
    if t.ground:
        return False
    return any(_occurs(v, a, bindings) for a in t.args)


def unify_bindings(t1: Term, t2: Term, bindings: dict, occurs_check: bool = True) -> bool:
    """Extend triangular bindings in place so that t1 and t2 unify; False on clash.

    On failure the bindings dict may hold partial extensions, so callers
    backtracking over alternatives must pass a copy.
    """
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = walk(a, bindings)
        b = walk(b, bindings)
        if a is b:
            continue
        if type(a) is Var:
            if type(b) is Var:
                if a.name != b.name:
                    bindings[a.name] = b
                continue
            if occurs_check and _occurs(a, b, bindings):
                return False
            bindings[a.name] = b
        elif type(b) is Var:
            if occurs_check and _occurs(b, a, bindings):
                return False
            bindings[b.name] = a
        else:
            if a.functor != b.functor or len(a.args) != len(b.args):
                return False
            if a.ground and b.ground:
                if a != b:
                    return False
                continue
            stack.extend(zip(a.args, b.args))
    return True


def unify(t1: Term, t2: Term, occurs_check: bool = True) -> Optional[Substitution]:
    """Most general unifier of t1 and t2, or None when none exists.

    The result is idempotent.  The occurs check is on by default; disabling
    it is for performance experiments only and is never done by the
    verification checks.
    """
    bindings: dict = {}
    if not unify_bindings(t1, t2, bindings, occurs_check):
        return None
    if not occurs_check:
        # cyclic bindings cannot be resolved; return them triangular
        return Substitution(bindings)
    return Substitution({v: resolve(t, bindings) for v, t in bindings.items()})


def apply_substitution(s: Substitution, t: Term) -> Term:
    return s.apply(t)


def compose(s1: Substitution, s2: Substitution) -> Substitution:
    return s1.compose(s2)


# ---------------------------------------------------------------------------
# Signatures and bounded Herbrand enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    """A set of (functor, arity) pairs."""

    symbols: frozenset

    @staticmethod
    def of(*symbols: tuple[str, int]) -> "Signature":
        return Signature(frozenset(symbols))

    @property
    def constants(self) -> list[str]:
        return sorted(name for name, arity in self.symbols if arity == 0)

    def extend(self, *symbols: tuple[str, int]) -> "Signature":
        return Signature(self.symbols | frozenset(symbols))

    def merge(self, other: "Signature") -> "Signature":
        return Signature(self.symbols | other.symbols)

    def sorted_symbols(self) -> list[tuple[str, int]]:
        return sorted(self.symbols)

    def check_has_constant(self):
        if not self.constants:
            raise ValueError("signature has no constant, Herbrand universe is empty")


@lru_cache(maxsize=None)
def _compositions(total: int, parts: int) -> tuple[tuple[int, ...], ...]:
    if parts == 1:
        return ((total,),) if total >= 1 else ()
    out = []
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _terms_of_size(sig: Signature, size: int) -> tuple[Compound, ...]:
    if size < 1:
        return ()
    out = []
    for name, arity in sig.sorted_symbols():
        if arity == 0:
            if size == 1:
                out.append(Compound(name))
            continue
        if size - 1 < arity:
            continue
        for shape in _compositions(size - 1, arity):
            pools = [_terms_of_size(sig, s) for s in shape]
            for args in itertools.product(*pools):
                out.append(Compound(name, args))
    return tuple(out)


def herbrand_terms_of_size(sig: Signature, size: int) -> tuple[Compound, ...]:
    return _terms_of_size(sig, size)


def enumerate_herbrand(sig: Signature, size_bound: int) -> Iterator[Compound]:
    """All ground terms over sig with node count <= size_bound.

    No duplicates; deterministic size-lexicographic order (by size, then by
    functor name and argument order).
    """
    sig.check_has_constant()
    if size_bound < 1:
        raise ValueError("size_bound must be >= 1")
    for size in range(1, size_bound + 1):
        yield from _terms_of_size(sig, size)


def herbrand_universe(sig: Signature, size_bound: int) -> list[Compound]:
    return list(enumerate_herbrand(sig, size_bound))


def signature_of_terms(terms: Sequence[Term]) -> Signature:
    """Signature of all data functors occurring in the given terms."""
    symbols = set()
    stack = list(terms)
    while stack:
        t = stack.pop()
        if type(t) is Compound:
            symbols.add((t.functor, len(t.args)))
            stack.extend(t.args)
    return Signature(frozenset(symbols))
