"""Tests for terms, substitutions, unification, and Herbrand enumeration."""
import pytest
from hypothesis import given, settings, strategies as st

from _helpers import brute_force_unifiers, t
from logicbench.terms import (
    Compound,
    Signature,
    Substitution,
    Var,
    atom_size,
    compose,
    enumerate_herbrand,
    format_term,
    herbrand_universe,
    is_proper_list,
    term_size,
    unify,
    vars_of,
)


class TestUnify:
    def test_variable_constant_binding(self):
        s = unify(Var("X"), t("a"))
        assert s == Substitution({"X": t("a")})

    def test_pair_heads_unify_up_to_renaming(self):
        # mgu of true-X against Pol-Var binds Pol to true and links the
        # variables
        s = unify(t("true-X"), t("Pol-Var"))
        assert s is not None
        assert s.apply(t("true-X")) == s.apply(t("Pol-Var"))
        assert s.apply(t("Pol")) == t("true")

    def test_occurs_check(self):
        assert unify(Var("X"), t("s(X)")) is None

    def test_occurs_check_can_be_disabled_for_experiments(self):
        assert unify(Var("X"), t("s(X)"), occurs_check=False) is not None

    def test_clash(self):
        assert unify(t("f(a)"), t("g(a)")) is None
        assert unify(t("f(a)"), t("f(b)")) is None
        assert unify(t("f(a)"), t("f(a,b)")) is None

    def test_mgu_is_idempotent(self):
        s = unify(t("f(X,Y)"), t("f(g(Y),b)"))
        for v in s:
            assert s.apply(s[v]) == s[v]


class TestSubstitution:
    def test_apply(self):
        s = Substitution({"X": t("a")})
        assert s.apply(t("f(X,Y)")) == t("f(a,Y)")

    def test_empty_is_identity(self):
        term = t("f(X,g(Y))")
        assert Substitution().apply(term) is term

    def test_apply_through_list_cells(self):
        s = Substitution({"X": t("true")})
        assert s.apply(t("[true-X|T]")) == t("[true-true|T]")

    def test_compose(self):
        s = compose(Substitution({"X": Var("Y")}), Substitution({"Y": t("a")}))
        assert s == Substitution({"X": t("a"), "Y": t("a")})

    def test_compose_identities(self):
        s = Substitution({"X": t("f(a)")})
        assert compose(s, Substitution()) == s
        assert compose(Substitution(), s) == s

    def test_compose_law_on_terms(self):
        s1 = Substitution({"X": t("g(Y)")})
        s2 = Substitution({"Y": t("b")})
        term = t("f(X,Y,Z)")
        assert compose(s1, s2).apply(term) == s2.apply(s1.apply(term))


# small random terms for the unification properties
_univ_sig = Signature.of(("a", 0), ("b", 0), ("f", 1), ("g", 2))


def _terms_strategy():
    leaves = st.sampled_from([t("a"), t("b"), Var("X"), Var("Y"), Var("Z")])

    def extend(children):
        return st.one_of(
            st.builds(lambda x: Compound("f", (x,)), children),
            st.builds(lambda x, y: Compound("g", (x, y)), children, children),
        )

    return st.recursive(leaves, extend, max_leaves=4)


@settings(max_examples=150, deadline=None)
@given(_terms_strategy(), _terms_strategy())
def test_mgu_property_against_brute_force(t1, t2):
    universe = herbrand_universe(_univ_sig, 3)
    brute = brute_force_unifiers(t1, t2, universe)
    s = unify(t1, t2)
    if s is None:
        assert brute == []
        return
    assert s.apply(t1) == s.apply(t2)
    # every ground unifier factors through the mgu
    names = [v.name for v in vars_of(t1) + vars_of(t2)]
    for u in brute:
        for name in names:
            assert u.apply(s.apply(Var(name))) == u.apply(Var(name))


@settings(max_examples=100, deadline=None)
@given(_terms_strategy())
def test_substitution_idempotence_invariant(term):
    s = unify(term, t("g(g(a,b),f(a))"))
    if s is not None:
        assert s.apply(s.apply(term)) == s.apply(term)


class TestHerbrandEnumeration:
    def test_single_constant(self):
        assert herbrand_universe(Signature.of(("a", 0)), 1) == [t("a")]

    def test_constant_and_unary(self):
        sig = Signature.of(("a", 0), ("s", 1))
        assert herbrand_universe(sig, 3) == [t("a"), t("s(a)"), t("s(s(a))")]

    def test_constant_and_binary(self):
        sig = Signature.of(("0", 0), ("-", 2))
        assert herbrand_universe(sig, 3) == [t("0"), t("0-0")]

    def test_rejects_signature_without_constant(self):
        with pytest.raises(ValueError):
            list(enumerate_herbrand(Signature.of(("f", 1)), 3))

    def test_rejects_nonpositive_bound(self):
        with pytest.raises(ValueError):
            list(enumerate_herbrand(Signature.of(("a", 0)), 0))

    def test_no_duplicates_and_size_sorted(self):
        sig = Signature.of(("a", 0), ("b", 0), ("f", 1), ("g", 2))
        terms = herbrand_universe(sig, 4)
        assert len(terms) == len(set(terms))
        sizes = [term_size(x) for x in terms]
        assert sizes == sorted(sizes)
        assert all(s <= 4 for s in sizes)

    def test_cardinality_monotone_in_bound(self):
        sig = Signature.of(("a", 0), ("f", 1), ("g", 2))
        counts = [len(herbrand_universe(sig, b)) for b in range(1, 7)]
        assert counts == sorted(counts)

    def test_matches_brute_force_count(self):
        # independent counting recursion: N(s) = sum over symbols of the
        # ways to split s-1 nodes among the arguments
        sig = Signature.of(("a", 0), ("b", 0), ("f", 1), ("g", 2))

        def count_of_size(s):
            if s < 1:
                return 0
            total = 0
            for name, arity in sig.sorted_symbols():
                if arity == 0:
                    total += 1 if s == 1 else 0
                elif arity == 1:
                    total += count_of_size(s - 1)
                else:
                    total += sum(
                        count_of_size(i) * count_of_size(s - 1 - i)
                        for i in range(1, s - 1)
                    )
            return total

        for bound in range(1, 6):
            expected = sum(count_of_size(s) for s in range(1, bound + 1))
            assert len(herbrand_universe(sig, bound)) == expected


class TestListsAndSizes:
    def test_proper_list_accepts_closed_lists(self):
        assert is_proper_list(t("[]"))
        assert is_proper_list(t("[a]"))
        assert is_proper_list(t("[a,a]"))

    def test_proper_list_rejects_open_and_improper_tails(self):
        assert not is_proper_list(t("[a,a|X]"))
        assert not is_proper_list(t("[a,a|a]"))

    def test_term_size_counts_every_node(self):
        assert term_size(t("a")) == 1
        assert term_size(t("0-0")) == 3
        assert term_size(t("[a,true-true]")) == 7

    def test_atom_size_is_argument_data_only(self):
        assert atom_size(t("sat_cl([a,true-true])")) == 7
        assert atom_size(t("p(a,b)")) == 2

    def test_format_round_trips_sugar(self):
        for text in ("[a,b|T]", "[true-X,false-Y]", "(a-b)-c", "f(g(X),[])", "X=Y"):
            assert format_term(t(text)) == text

    def test_format_handles_very_deep_nesting(self):
        deep = Compound("z")
        for _ in range(3000):
            deep = Compound("s", (deep,))
        rendered = format_term(deep)
        assert rendered.startswith("s(s(") and rendered.endswith("))")
        assert rendered.count("s(") == 3000
