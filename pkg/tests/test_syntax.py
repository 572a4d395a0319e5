"""Tests for the program/query/term syntax."""
import pytest

from _helpers import t
from logicbench.programs import (
    BlockDeclaration,
    Commit,
    builtin_corpus,
    format_program,
    parse_program,
)
from logicbench.syntax import ParseError, parse_query, parse_term
from logicbench.terms import Compound, Var


class TestTermParsing:
    def test_variables_start_uppercase_or_underscore(self):
        assert parse_term("Xs") == Var("Xs")
        assert parse_term("_tail") == Var("_tail")
        assert parse_term("xs") == Compound("xs")

    def test_pair_is_right_associative(self):
        assert parse_term("a-b-c") == parse_term("a-(b-c)")
        assert parse_term("(a-b)-c") != parse_term("a-b-c")

    def test_list_sugar(self):
        assert parse_term("[a,b|T]") == Compound(
            "[|]", (t("a"), Compound("[|]", (t("b"), Var("T"))))
        )
        assert parse_term("[a,b]") == parse_term("[a|[b|[]]]")

    def test_equality_forms(self):
        assert parse_term("X=Y") == Compound("=", (Var("X"), Var("Y")))
        assert parse_term("=(X,Y)") == parse_term("X=Y")

    def test_numbers_are_constants(self):
        assert parse_term("s(0)") == Compound("s", (Compound("0"),))

    def test_leftover_input_is_an_error(self):
        with pytest.raises(ParseError):
            parse_term("a b")

    def test_error_carries_position(self):
        with pytest.raises(ParseError) as exc:
            parse_program("p(a) :-\n  q(,).")
        assert exc.value.line == 2

    def test_query_conjunction(self):
        q = parse_query("sat_cnf(X), tflist(Y)")
        assert len(q) == 2
        assert q[0].functor == "sat_cnf"


class TestProgramParsing:
    def test_two_rules(self):
        p = parse_program("p(0). p(s(X)) :- p(X).")
        assert len(p.rules) == 2
        assert p.rules[0].body == ()
        assert p.rules[1].predicate == ("p", 1)

    def test_clause_satisfaction_procedure(self):
        text = """
        sat_cl([Pol-Var|Pairs]) :- Pol = Var.
        sat_cl([H|Pairs]) :- sat_cl(Pairs).
        """
        p = parse_program(text)
        assert [r.predicate for r in p.rules] == [("sat_cl", 1)] * 2
        assert p.rules[0].body[0] == t("Pol=Var")

    def test_block_declaration(self):
        p = parse_program(":- block sat_cl5(-, ?, -, ?, ?).")
        assert p.blocks == (
            BlockDeclaration(("sat_cl5", 5), (("-", "?", "-", "?", "?"),)),
        )

    def test_multiple_block_specs_in_one_directive(self):
        p = parse_program(":- block p(-, ?), p(?, -).\np(a, b).")
        assert len(p.blocks) == 2
        assert {d.predicate for d in p.blocks} == {("p", 2)}

    def test_commit_parse(self):
        p = parse_program("p(X) :- ( nonvar(X) -> q(X) ; r(X) ), s(X).\nq(a).\nr(a).\ns(a).")
        commit = p.rules[0].body[0]
        assert isinstance(commit, Commit)
        assert commit.condition == t("nonvar(X)")
        assert commit.then_branch == (t("q(X)"),)
        assert commit.else_branch == (t("r(X)"),)
        assert p.rules[0].body[1] == t("s(X)")

    def test_commit_condition_restricted(self):
        with pytest.raises(ParseError):
            parse_program("p(X) :- ( q(X) -> r(X) ; s(X) ).")

    def test_parenthesized_plain_atom_in_body(self):
        p = parse_program("p(X) :- (q(X)).\nq(a).")
        assert p.rules[0].body == (t("q(X)"),)

    def test_arity_inconsistency_is_an_error(self):
        with pytest.raises(ParseError):
            parse_program("p(a). p(a,b).")

    def test_undefined_body_predicate_is_a_warning(self):
        p = parse_program("p(X) :- q(X).")
        assert any("q/1" in w for w in p.warnings)
        assert not parse_program("p(X) :- X = a.").warnings

    def test_comments_ignored(self):
        p = parse_program("% a comment\np(a). % trailing\n")
        assert len(p.rules) == 1

    def test_head_cannot_be_variable(self):
        with pytest.raises(ParseError):
            parse_program("X :- p(a).")


def test_print_parse_round_trip_for_corpus():
    for name, program in builtin_corpus().items():
        assert parse_program(format_program(program)) == program, name
