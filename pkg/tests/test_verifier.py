"""Tests for the bounded verification checks and level mappings."""
import random

import pytest

from _helpers import t
from logicbench.engine import SelectionStrategy, build_tree, solve
from logicbench.programs import builtin_corpus, parse_program
from logicbench.specs import (
    DEFAULT_BASE_SIGNATURE,
    Specification,
    spec_S1,
    spec_S2,
    spec_S3_0,
)
from logicbench.syntax import parse_query
from logicbench.terms import Compound, Signature, herbrand_universe
from logicbench.verifier import (
    BUILTIN_MAPPINGS,
    CheckReport,
    bottom_up_model,
    check_bounded_query,
    check_correctness,
    check_coverage,
    check_cssld_condition,
    check_recurrent,
    ground_completeness_probe,
    level,
    mapping_by_name,
    mapping_for_p1,
    mapping_for_p3,
    weighted_sum_mapping,
)


@pytest.fixture(scope="module")
def corpus():
    return builtin_corpus()


@pytest.fixture(scope="module")
def mutant(corpus):
    buggy = parse_program("sat_cl([H|Pairs]) :- sat_cl([Pairs]).").rules[0]
    return corpus["P1"].replace_rule("sat_cl#2", buggy).with_name("P1_mutant")


def _chain_spec():
    def is_chain(term):
        while term.functor == "s" and len(term.args) == 1:
            term = term.args[0]
        return term == Compound("0")

    return is_chain


# ---------------------------------------------------------------------------
# Independent level evaluators (plain recursion, separate from the shipped
# closed-form rules)
# ---------------------------------------------------------------------------

def _slow_weight(term):
    if term.functor == "[|]" and len(term.args) == 2:
        return _slow_weight(term.args[0]) + _slow_weight(term.args[1])
    return 1


def _slow_listsize(term):
    if term.functor == "[|]" and len(term.args) == 2:
        return _slow_listsize(term.args[1]) + 1
    return 0


def _slow_p1_level(atom):
    name = atom.functor
    if name in ("sat_cnf", "sat_cl"):
        return _slow_weight(atom.args[0])
    if name == "=":
        return 0
    return sum(_slow_weight(a) for a in atom.args)


def _slow_p3_level(atom):
    name, arity = atom.functor, len(atom.args)
    if (name, arity) == ("sat", 2):
        return max(3 * _slow_weight(atom.args[0]), _slow_listsize(atom.args[1])) + 2
    if name in ("sat_cnf", "sat_cl"):
        return 3 * _slow_weight(atom.args[0]) + 1
    if name == "sat_cl3":
        return 3 * _slow_weight(atom.args[0]) + 1
    if name == "sat_cl5":
        return 3 * _slow_weight(atom.args[4]) + 3
    if name == "sat_cl5a":
        return 3 * _slow_weight(atom.args[4]) + 2
    if name == "tflist":
        return _slow_listsize(atom.args[0])
    if name in ("tf", "="):
        return 0
    return sum(_slow_weight(a) for a in atom.args)


class TestLevelMappings:
    def test_weight_of_single_pair_clause(self):
        assert level(mapping_for_p1(), t("[true-true]")) == 2

    def test_weight_of_two_clause_formula(self):
        # 2 for each one-pair clause plus 1 for the spine
        assert level(mapping_for_p1(), t("sat_cnf([[true-true],[false-false]])")) == 5

    def test_truth_value_atoms_have_level_zero(self):
        assert level(mapping_for_p3(), t("tf(true)")) == 0
        assert level(mapping_for_p3(), t("a=a")) == 0

    def test_clause_shift_rule_levels(self):
        # head 3|t|+4 vs body 3|t|+1 for the pair-shift rule, here |t|=1
        p3 = mapping_for_p3()
        assert level(p3, t("sat_cl([true-false])")) == 7
        assert level(p3, t("sat_cl3([],false,true)")) == 4

    def test_every_term_has_positive_weight(self):
        lm = mapping_for_p1()
        for term in herbrand_universe(DEFAULT_BASE_SIGNATURE, 5):
            assert lm.term_level(term) > 0

    def test_agreement_with_independent_evaluator(self):
        rng = random.Random(20240811)
        universe = herbrand_universe(DEFAULT_BASE_SIGNATURE, 7)
        p1, p3 = mapping_for_p1(), mapping_for_p3()
        shapes = [("sat_cnf", 1), ("sat_cl", 1), ("=", 2), ("sat_cl3", 3),
                  ("sat_cl5", 5), ("sat_cl5a", 5), ("tflist", 1), ("tf", 1), ("sat", 2)]
        for _ in range(100):
            name, arity = rng.choice(shapes)
            atom = Compound(name, tuple(rng.choice(universe) for _ in range(arity)))
            assert p1.atom_level(atom) == _slow_p1_level(atom)
            assert p3.atom_level(atom) == _slow_p3_level(atom)

    def test_builtin_lookup(self):
        assert set(BUILTIN_MAPPINGS()) == {"P1", "P3"}
        with pytest.raises(KeyError):
            mapping_by_name("P9")

    def test_nonground_atom_rejected(self):
        with pytest.raises(ValueError):
            mapping_for_p1().atom_level(t("sat_cnf(X)"))

    def test_weighted_sum_mapping_hook(self):
        lm = weighted_sum_mapping("user", {("p", 2): ((2, 1), 5)})
        assert lm.atom_level(t("p([a],b)")) == 2 * 2 + 1 * 1 + 5


class TestBoundedQueries:
    def test_intended_cnf_query_is_bounded(self):
        # the pair arguments contribute weight 1 no matter how they are
        # instantiated; checked against explicit groundings below
        result = check_bounded_query(
            parse_query("sat_cnf([[true-X,false-Y],[false-X]])"), mapping_for_p1()
        )
        assert result.bounded and result.value == 6
        lm = mapping_for_p1()
        for x in (t("true"), t("false"), t("[a,a]")):
            for y in (t("a"), t("[]")):
                ground = t("sat_cnf([[true-%s,false-%s],[false-%s]])"
                           % (x, y, x))
                assert lm.atom_level(ground) == 6

    def test_intended_sat_query_is_bounded(self):
        result = check_bounded_query(
            parse_query("sat([[true-X],[false-Y]],[X,Y])"), mapping_for_p3()
        )
        assert result.bounded
        lm = mapping_for_p3()
        for x, y in ((t("true"), t("false")), (t("a"), t("[a]"))):
            ground = t("sat([[true-%s],[false-%s]],[%s,%s])" % (x, y, x, y))
            assert lm.atom_level(ground) == result.value

    def test_variable_in_weight_position_is_unknown(self):
        lm = weighted_sum_mapping("user", {("p", 1): ((1,), 0)})
        assert not check_bounded_query(parse_query("p(X)"), lm).bounded

    def test_open_list_tail_is_unknown(self):
        result = check_bounded_query(parse_query("tflist([true|T])"), mapping_for_p3())
        assert not result.bounded


class TestCorrectness:
    def test_p1_satisfies_the_condition(self, corpus):
        report = check_correctness(corpus["P1"], spec_S1(), bound=6)
        assert report.passed
        assert report.stats["instances_checked"] > 0

    def test_mutant_fails_with_the_expected_witness(self, corpus, mutant):
        report = check_correctness(mutant, spec_S1(), bound=6)
        assert not report.passed
        heads = {w.head for w in report.witnesses}
        assert t("sat_cl([a|true-true])") in heads
        witness = next(w for w in report.witnesses if w.head == t("sat_cl([a|true-true])"))
        assert witness.body == (t("sat_cl([true-true])"),)

    def test_refined_programs_satisfy_the_full_correctness_spec(self, corpus):
        from logicbench.specs import spec_S3

        for name in ("P3", "P31", "P32"):
            assert check_correctness(corpus[name], spec_S3(), bound=6).passed, name

    def test_overly_general_spec_fails_on_the_step_rule(self, corpus):
        generous = spec_S1().with_extra("S1_plus", {("sat_cl", 1): lambda args: True})
        report = check_correctness(corpus["P1"], generous, bound=6)
        assert not report.passed
        assert {w.rule_label for w in report.witnesses} == {"sat_cnf#2"}

    def test_pass_is_monotone_downward(self, corpus, mutant):
        # no FAIL can appear at a smaller bound when the bigger bound passed
        for b in (2, 3, 4, 5):
            assert check_correctness(corpus["P1"], spec_S1(), bound=b).passed
        # and witnesses at smaller bounds persist at larger ones
        small = set(check_correctness(mutant, spec_S1(), bound=4).witnesses)
        big = set(check_correctness(mutant, spec_S1(), bound=6).witnesses)
        assert small <= big

    def test_report_shape(self, corpus):
        report = check_correctness(corpus["P1"], spec_S1(), bound=3)
        assert isinstance(report, CheckReport)
        payload = report.to_dict()
        assert payload["verdict"] == "PASS"
        assert payload["witnesses"] == []
        assert "bounded check" in payload["notes"][0]

    def test_eq_pre_evaluation_equals_membership_treatment(self, corpus):
        # the shipped checks unify '=' sides up front; treating '=' body
        # atoms as ordinary atoms judged by the specification's diagonal
        # gives the same witness sets (naive cross-check on the rules that
        # actually carry '=')
        import itertools

        from logicbench.terms import Substitution, atom_size, vars_of

        def naive_witness_heads(rule, spec, universe, bound):
            free = vars_of(rule.head)
            for item in rule.body:
                vars_of(item, free)
            heads = set()
            for assignment in itertools.product(universe, repeat=len(free)):
                sub = Substitution({v.name: val for v, val in zip(free, assignment)})
                head = sub.apply(rule.head)
                body = [sub.apply(b) for b in rule.body]
                if atom_size(head) > bound or any(atom_size(b) > bound for b in body):
                    continue
                if all(spec.contains(b) for b in body) and not spec.contains(head):
                    heads.add(head)
            return heads

        S1 = spec_S1()
        sig = Signature.of(("true", 0), ("-", 2), ("[|]", 2), ("[]", 0))
        universe = herbrand_universe(sig, 5)
        eq_rules = [r for r in corpus["P1"].rules
                    if any(b.functor == "=" for b in r.body) or r.predicate == ("=", 2)]
        assert eq_rules
        report = check_correctness(corpus["P1"], S1, sig, bound=5, slack=0)
        for rule in eq_rules:
            assert naive_witness_heads(rule, S1, universe, 5) == {
                w.head for w in report.witnesses if w.rule_label == rule.label
            } == set()
        # a violating '=' rule yields identical nonempty witness sets
        buggy = parse_program("p(X) :- X = t.\n=(Y, Y).", "eq-bug")
        diag_only = Specification(
            "DIAG",
            {("=", 2): lambda args: args[0] == args[1],
             ("p", 1): lambda args: False},
            base_signature=Signature.of(("t", 0), ("u", 0)),
        )
        small = herbrand_universe(diag_only.base_signature, 2)
        report = check_correctness(buggy, diag_only, diag_only.base_signature,
                                   bound=2, slack=0)
        got = {w.head for w in report.witnesses if w.rule_label == "p#1"}
        assert got == naive_witness_heads(buggy.rules[0], diag_only, small, 2) == {t("p(t)")}


class TestCoverage:
    def test_p1_covers_its_specification(self, corpus):
        assert check_coverage(corpus["P1"], spec_S1(), bound=6).passed

    def test_refined_programs_cover_the_completeness_spec(self, corpus):
        for name in ("P3", "P31", "P32"):
            assert check_coverage(corpus[name], spec_S3_0(), bound=6).passed, name

    def test_too_strong_spec_leaves_atoms_uncovered(self, corpus):
        report = check_coverage(corpus["P3"], spec_S2(), bound=7)
        assert not report.passed
        assert t("sat_cl([a,true-true])") in report.witnesses

    def test_uncovered_base_case(self):
        program = parse_program("p(s(X)) :- p(X).", "no-base")
        is_chain = _chain_spec()
        spec = Specification(
            "CHAIN", {("p", 1): lambda args: is_chain(args[0])},
            base_signature=Signature.of(("0", 0), ("s", 1)),
        )
        report = check_coverage(program, spec, bound=4)
        assert not report.passed
        assert t("p(0)") in report.witnesses

    def test_covering_bodies_may_exceed_the_head_bound(self):
        # covering p(a) needs the free body variable grounded to a term
        # larger than the head bound, reachable only through the slack
        program = parse_program("p(X) :- q(Y).\nq(f(f(a))).", "slacky")
        spec = Specification(
            "SLACK",
            {("p", 1): lambda args: args[0] == t("a"),
             ("q", 1): lambda args: args[0] == t("f(f(a))")},
            base_signature=Signature.of(("a", 0), ("f", 1)),
        )
        assert check_coverage(program, spec, bound=2, slack=1).passed
        assert not check_coverage(program, spec, bound=2, slack=0).passed


class TestRecurrence:
    def test_p1_is_recurrent_under_its_mapping(self, corpus):
        assert check_recurrent(corpus["P1"], mapping_for_p1(), bound=6).passed

    def test_p3_is_recurrent_under_its_mapping(self, corpus):
        report = check_recurrent(corpus["P3"], mapping_for_p3(), bound=6)
        assert report.passed
        # a larger bound exercises the rules whose smallest instances are big
        assert check_recurrent(corpus["P3"], mapping_for_p3(), bound=8).passed

    def test_self_loop_fails(self):
        loop = parse_program("p(X) :- p(X).", "loop")
        for name in ("P1", "P3"):
            report = check_recurrent(
                loop, mapping_by_name(name), sig=Signature.of(("a", 0)), bound=2
            )
            assert not report.passed

    def test_growing_body_fails(self):
        grow = parse_program("p(X) :- p(s(X)).", "grow")
        lm = weighted_sum_mapping("size", {("p", 1): ((1,), 0)})
        report = check_recurrent(grow, lm, sig=Signature.of(("a", 0), ("s", 1)), bound=3)
        assert not report.passed


class TestRecurrenceImpliesTermination:
    def test_bounded_queries_terminate_under_both_strategies(self, corpus):
        queries = [
            ("P1", mapping_for_p1(), "sat_cnf([[true-X,false-Y],[false-X]])"),
            ("P3", mapping_for_p3(), "sat([[true-X],[false-X,false-Y]],[X,Y])"),
        ]
        for name, lm, qtext in queries:
            q = parse_query(qtext)
            assert check_bounded_query(q, lm).bounded
            for strategy in (SelectionStrategy.LEFTMOST, SelectionStrategy.RIGHTMOST):
                tree = build_tree(corpus[name], q, strategy)
                assert tree.exhaustive, (name, strategy)


class TestCsSldCondition:
    def test_both_prunings_cover_the_completeness_spec(self, corpus):
        report = check_cssld_condition([corpus["P31"], corpus["P32"]], spec_S3_0(), bound=6)
        assert report.passed
        assert len(report.reports) == 2

    def test_counterexample_prunings_each_miss_a_chain(self, corpus):
        is_chain = _chain_spec()

        def p_atoms(args):
            return args[0] in (t("a"), t("b")) and is_chain(args[1])

        spec = Specification(
            "CHAINS",
            {("q", 1): lambda args: is_chain(args[0]), ("p", 2): p_atoms},
            base_signature=Signature.of(("0", 0), ("s", 1), ("a", 0), ("b", 0)),
        )
        report = check_cssld_condition(
            [corpus["CSSLD_PI1"], corpus["CSSLD_PI2"]], spec, bound=4
        )
        assert not report.passed
        assert all(not r.passed for r in report.reports)
        assert t("p(b,s(0))") in report.reports[0].witnesses
        assert t("p(a,s(0))") in report.reports[1].witnesses

    def test_single_program_degenerate(self, corpus):
        report = check_cssld_condition([corpus["P1"]], spec_S1(), bound=5)
        assert report.passed


class TestBottomUpModel:
    def test_p1_model_examples(self, corpus):
        sig = corpus["P1"].signature.merge(DEFAULT_BASE_SIGNATURE)
        model = bottom_up_model(corpus["P1"], sig, term_bound=6)
        assert t("sat_cnf([])") in model
        assert t("sat_cl([true-true])") in model
        assert t("sat_cl([true-false])") not in model
        assert model.fixpoint_reached

    def test_empty_program(self):
        model = bottom_up_model(parse_program("", "empty"), Signature.of(("a", 0)), 3)
        assert model.atoms == frozenset()

    def test_single_fact(self):
        model = bottom_up_model(parse_program("p(a).", "fact"), term_bound=3)
        assert model.atoms == frozenset({t("p(a)")})
        assert model.iterations <= 2

    def test_iteration_cap_reports_no_fixpoint(self, corpus):
        model = bottom_up_model(corpus["P1"], term_bound=6, iteration_cap=1)
        assert not model.fixpoint_reached

    def test_head_only_variables_are_enumerated(self):
        program = parse_program("q(X) :- p(Y).\np(a).", "headvar")
        model = bottom_up_model(program, Signature.of(("a", 0), ("b", 0)), 2)
        assert t("q(a)") in model and t("q(b)") in model


class TestGroundCompletenessProbe:
    def test_p1_is_ground_complete_for_s1(self, corpus):
        assert ground_completeness_probe(corpus["P1"], spec_S1(), bound=5).passed

    def test_missing_base_fact_is_reported(self, corpus):
        report = ground_completeness_probe(
            corpus["P1"].without_rules("sat_cnf#1"), spec_S1(), bound=5
        )
        assert not report.passed
        assert t("sat_cnf([])") in report.witnesses

    def test_refined_program_is_ground_complete_for_its_spec(self, corpus):
        report = ground_completeness_probe(corpus["P3"], spec_S3_0(), bound=5)
        assert report.passed
        assert report.stats["fixpoint_reached"]

    def test_looping_program_with_finite_ground_derivations(self):
        # the general program loops on q(X), yet every ground-program
        # derivation is finite, so the probe accepts
        program = parse_program("p(s(X)) :- p(X).\np(0).\nq(X) :- p(Y).", "apx")
        is_chain = _chain_spec()
        spec = Specification(
            "APX",
            {("p", 1): lambda args: is_chain(args[0]),
             ("q", 1): lambda args: args[0] == Compound("0")},
            base_signature=Signature.of(("0", 0), ("s", 1)),
        )
        outcome = solve(program, parse_query("q(X)"),
                        budget=__import__("logicbench.engine", fromlist=["Budget"]).Budget(max_steps=300))
        assert outcome.budget_hit  # the SLD search indeed diverges
        assert ground_completeness_probe(program, spec, bound=4).passed


class TestModelSandwich:
    def test_p1_model_matches_s1_at_desk_scale(self, corpus):
        S1 = spec_S1()
        sig = corpus["P1"].signature.merge(S1.base_signature)
        model = bottom_up_model(corpus["P1"], sig, term_bound=7)
        for atom in model.atoms:
            assert S1.contains(atom)
        for atom in S1.enumerate(sig, 5):
            assert atom in model
