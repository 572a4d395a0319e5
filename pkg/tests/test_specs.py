"""Tests for the specification framework and the built-in specifications.

The slow_* checkers re-derive the defining sets from their displays by
explicit decomposition, independently of the shipped membership code, and the
two are compared over every term within a size bound.
"""
import pytest

from _helpers import t
from logicbench.specs import (
    DEFAULT_BASE_SIGNATURE,
    SpecPair,
    Specification,
    builtin_specs,
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
from logicbench.terms import (
    Compound,
    Signature,
    herbrand_terms_of_size,
    is_pair,
    is_proper_list,
    spine,
)


# ---------------------------------------------------------------------------
# Independent slow checkers, by explicit decomposition
# ---------------------------------------------------------------------------

def _decompositions(term):
    """All splits of term as ([t1,...,tn], s) with n >= 1 cons cells."""
    prefix = []
    rest = term
    while rest.functor == "[|]" and len(rest.args) == 2:
        prefix.append(rest.args[0])
        rest = rest.args[1]
        yield list(prefix), rest


def slow_in_L1(term):
    for elems, _tail in _decompositions(term):
        if any(is_pair(e) and e.args[0] == e.args[1] for e in elems):
            return True
    return False


def slow_in_L1_0(term):
    if not is_proper_list(term):
        return False
    elems, _ = spine(term)
    if not elems:
        return False
    pairs = []
    for e in elems:
        if not is_pair(e):
            return False
        pairs.append((e.args[0], e.args[1]))
    return any(x == y for x, y in pairs)


def slow_in_L2(term):
    if not is_proper_list(term):
        return False
    elems, _ = spine(term)
    return all(slow_in_L1(e) for e in elems)


def slow_in_L2_0(term):
    if not is_proper_list(term):
        return False
    elems, _ = spine(term)
    return all(slow_in_L1_0(e) for e in elems)


@pytest.fixture(scope="module")
def bounded_terms():
    return [
        term
        for size in range(1, 8)
        for term in herbrand_terms_of_size(DEFAULT_BASE_SIGNATURE, size)
    ]


class TestLSets:
    def test_examples_from_the_clause_set_definition(self):
        assert in_L1(t("[true-true]"))
        assert in_L1(t("[a,false-false|b]"))
        assert not in_L1(t("[true-false]"))

    def test_tail_need_not_be_a_list(self):
        assert in_L1(t("[true-true|a]"))
        assert in_L1(t("[true-true|a-b]"))

    def test_restricted_variant_examples(self):
        assert in_L1_0(t("[true-true,false-true]"))
        assert not in_L1_0(t("[a,true-true]"))
        assert not in_L1_0(t("[true-true|a]"))

    def test_truth_values_are_not_required(self):
        # the definitions allow arbitrary ground pair components
        assert in_L1_0(t("[a-a]"))
        assert in_L1(t("[[]-[]]"))

    def test_cnf_set_examples(self):
        assert in_L2(t("[]"))
        assert in_L2(t("[[a,true-true]]"))
        assert not in_L2_0(t("[[a,true-true]]"))
        assert not in_L2(t("[[]]"))

    def test_non_ground_membership_is_rejected(self):
        with pytest.raises(ValueError):
            in_L1(t("[X-X]"))

    def test_agree_with_slow_checkers_up_to_size_7(self, bounded_terms):
        for term in bounded_terms:
            assert in_L1(term) == slow_in_L1(term)
            assert in_L1_0(term) == slow_in_L1_0(term)
            assert in_L2(term) == slow_in_L2(term)
            assert in_L2_0(term) == slow_in_L2_0(term)

    def test_restricted_sets_are_contained(self, bounded_terms):
        for term in bounded_terms:
            if in_L1_0(term):
                assert in_L1(term)
            if in_L2_0(term):
                assert in_L2(term)


class TestBuiltinSpecs:
    def test_s1_membership(self):
        S1 = spec_S1()
        assert S1.contains(t("sat_cl([true-true])"))
        assert S1.contains(t("sat_cnf([])"))
        assert not S1.contains(t("sat_cl([true-false])"))
        assert not S1.contains(t("sat(a,b)"))

    def test_equality_atoms_hold_for_arbitrary_ground_terms(self):
        S1 = spec_S1()
        assert S1.contains(t("f(a)=f(a)"))
        assert not S1.contains(t("a=b"))

    def test_s2_zero_example(self):
        assert spec_S2_0().contains(t("sat_cl5a(true,true,false,true,[])"))

    def test_s2_chain_argument_order(self):
        # sat_cl3(s, v, p) is specified iff [p-v|s] is in the clause set
        S2 = spec_S2()
        assert S2.contains(t("sat_cl3([],true,true)"))
        assert not S2.contains(t("sat_cl3([],true,false)"))
        assert S2.contains(t("sat_cl3(a,false,false)"))

    def test_s3_truth_value_predicates(self):
        S3 = spec_S3()
        assert S3.contains(t("tf(true)"))
        assert S3.contains(t("tf(false)"))
        assert not S3.contains(t("tf(maybe)"))
        assert S3.contains(t("sat([],[true,false])"))
        assert not S3.contains(t("sat([],[true,maybe])"))
        assert S3.contains(t("tflist([])"))

    def test_nonground_atom_rejected(self):
        with pytest.raises(ValueError):
            spec_S1().contains(t("sat_cl(X)"))

    def test_enumerate_is_exhaustive_filter(self):
        # cross-check against filtering the full bounded atom universe
        S1 = spec_S1()
        sig = DEFAULT_BASE_SIGNATURE
        bound = 5
        got = set(S1.enumerate(sig, bound))
        expected = set()
        universe = [
            term for size in range(1, bound + 1)
            for term in herbrand_terms_of_size(sig, size)
        ]
        for name, arity in (("sat_cnf", 1), ("sat_cl", 1), ("=", 2)):
            if arity == 1:
                candidates = (Compound(name, (x,)) for x in universe)
            else:
                candidates = (
                    Compound(name, (x, y))
                    for x in universe
                    for y in universe
                    if x.size + y.size <= bound
                )
            expected.update(a for a in candidates if S1.contains(a))
        assert got == expected

    def test_enumerate_contains_expected_small_atoms(self):
        S1 = spec_S1()
        atoms = set(S1.enumerate(DEFAULT_BASE_SIGNATURE, 7))
        assert t("sat_cnf([])") in atoms
        assert t("sat_cnf([[true-true]])") in atoms

    def test_every_enumerated_atom_is_contained(self):
        for name in ("S1", "S2", "S2_0", "S3", "S3_0"):
            spec = spec_by_name(name)
            for atom in spec.enumerate(DEFAULT_BASE_SIGNATURE, 4):
                assert spec.contains(atom)

    def test_zero_specs_are_contained_in_the_full_ones(self):
        sig = DEFAULT_BASE_SIGNATURE
        S2, S2_0 = spec_S2(), spec_S2_0()
        for atom in S2_0.enumerate(sig, 5):
            assert S2.contains(atom)
        S3, S3_0 = spec_S3(), spec_S3_0()
        for atom in S3_0.enumerate(sig, 5):
            assert S3.contains(atom)

    def test_spec_pair(self):
        pair = SpecPair(spec_S3(), spec_S3_0())
        assert pair.check_contained(DEFAULT_BASE_SIGNATURE, 5)
        flipped = SpecPair(spec_S3_0(), spec_S3())
        assert not flipped.check_contained(DEFAULT_BASE_SIGNATURE, 5)

    def test_registry(self):
        assert sorted(builtin_specs()) >= ["S1", "S2", "S2_0", "S3", "S3_0"]
        with pytest.raises(KeyError):
            spec_by_name("NOPE")

    def test_functional_wrappers(self):
        from logicbench.specs import spec_contains, spec_enumerate

        S1 = spec_S1()
        assert spec_contains(S1, t("sat_cnf([])"))
        assert t("sat_cnf([])") in set(spec_enumerate(S1, DEFAULT_BASE_SIGNATURE, 2))

    def test_user_spec_via_predicate_table(self):
        naturals = Specification(
            "NAT",
            {("even", 1): lambda args: _chain_length(args[0]) % 2 == 0},
            base_signature=Signature.of(("0", 0), ("s", 1)),
        )
        assert naturals.contains(t("even(0)"))
        assert naturals.contains(t("even(s(s(0)))"))
        assert not naturals.contains(t("even(s(0))"))
        enumerated = list(naturals.enumerate(naturals.base_signature, 3))
        assert enumerated == [t("even(0)"), t("even(s(s(0)))")]


def _chain_length(term):
    n = 0
    while term.functor == "s":
        term = term.args[0]
        n += 1
    return n
