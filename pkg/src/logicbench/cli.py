"""Command-line entry point.

Exit codes: 0 for PASS or a decided SAT/UNSAT verdict, 1 for FAIL or a found
defect, 2 for usage and parse errors, 3 for budget cutoffs and INDETERMINATE
results.  The LOGICBENCH_BUDGET environment variable overrides the default
step budget.
"""
from __future__ import annotations

import csv
import json
import sys

import click

from . import sat as satmod
from .diagnosis import (
    INCORRECT_INSTANCE,
    UNCOVERED_ATOM,
    diagnose_incompleteness,
    diagnose_incorrectness,
)
from .engine import Budget, SelectionStrategy, build_tree, solve
from .programs import builtin_corpus, format_program, parse_program
from .specs import spec_by_name
from .syntax import ParseError, parse_query, parse_term
from .terms import format_term
from .verifier import (
    check_correctness,
    check_coverage,
    check_cssld_condition,
    check_recurrent,
    mapping_by_name,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INDETERMINATE = 3

_STRATEGIES = {
    "leftmost": SelectionStrategy.LEFTMOST,
    "rightmost": SelectionStrategy.RIGHTMOST,
    "leftmost-selectable": SelectionStrategy.LEFTMOST_SELECTABLE,
}


def _fail_usage(message: str):
    click.echo("error: %s" % message, err=True)
    sys.exit(EXIT_USAGE)


def _load_program(source: str):
    if source.startswith("corpus:"):
        name = source.split(":", 1)[1]
        corpus = builtin_corpus()
        if name not in corpus:
            _fail_usage("unknown corpus program %r (have: %s)" % (name, ", ".join(sorted(corpus))))
        return corpus[name]
    try:
        with open(source, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        _fail_usage(str(exc))
    try:
        program = parse_program(text, source)
    except ParseError as exc:
        _fail_usage("parse error in %s: %s" % (source, exc))
    for warning in program.warnings:
        click.echo("warning: %s" % warning, err=True)
    return program


def _parse_query_arg(text: str):
    try:
        return parse_query(text)
    except ParseError as exc:
        _fail_usage("bad query: %s" % exc)


def _parse_sig_option(extension: str):
    symbols = []
    for part in extension.split(","):
        part = part.strip()
        if not part:
            continue
        if "/" not in part:
            _fail_usage("signature entries look like name/arity, got %r" % part)
        name, _, arity = part.rpartition("/")
        if not arity.isdigit():
            _fail_usage("bad arity in signature entry %r" % part)
        symbols.append((name, int(arity)))
    return symbols


def _budget(max_steps, max_depth):
    try:
        budget = Budget.from_env()
        if max_steps or max_depth:
            budget = Budget(
                max_depth=max_depth or budget.max_depth,
                max_steps=max_steps or budget.max_steps,
            )
    except ValueError as exc:
        _fail_usage(str(exc))
    return budget


def _emit_json(payload: dict):
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@click.group()
def main():
    """Logic-program workbench: run queries, check programs against
    specifications, diagnose defects, and solve CNF instances."""


@main.group()
def corpus():
    """Built-in program corpus."""


@corpus.command("list")
def corpus_list():
    """List the built-in programs."""
    for name, program in sorted(builtin_corpus().items()):
        blocks = " +%d block" % len(program.blocks) if program.blocks else ""
        click.echo("%-22s %2d rules%s" % (name, len(program.rules), blocks))


@corpus.command("show")
@click.argument("name")
def corpus_show(name):
    """Print a corpus program in source syntax."""
    program = _load_program("corpus:" + name)
    click.echo(format_program(program), nl=False)


@main.command("solve")
@click.argument("program_source")
@click.argument("query_text")
@click.option("--strategy", type=click.Choice(sorted(_STRATEGIES)), default="leftmost")
@click.option("--max-steps", type=int, default=None)
@click.option("--max-depth", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
def solve_cmd(program_source, query_text, strategy, max_steps, max_depth, as_json):
    """Run a query and print the answers."""
    program = _load_program(program_source)
    query = _parse_query_arg(query_text)
    try:
        outcome = solve(program, query, _STRATEGIES[strategy], _budget(max_steps, max_depth))
    except ValueError as exc:
        _fail_usage(str(exc))
    if as_json:
        _emit_json(
            {
                "answers": [
                    {
                        "atoms": [format_term(a) for a in ans.atoms],
                        "bindings": {
                            v: format_term(t) for v, t in sorted(ans.substitution.items())
                        },
                    }
                    for ans in outcome.answers
                ],
                "exhaustive": outcome.exhaustive,
                "floundered": outcome.floundered,
                "budget_hit": outcome.budget_hit,
            }
        )
    else:
        for ans in outcome.answers:
            click.echo(repr(ans))
        click.echo(
            "%d answer(s); exhaustive=%s floundered=%s budget_hit=%s"
            % (len(outcome.answers), outcome.exhaustive, outcome.floundered, outcome.budget_hit)
        )
    sys.exit(EXIT_INDETERMINATE if outcome.budget_hit else EXIT_PASS)


@main.command("sat")
@click.argument("dimacs_file")
@click.option("--variant", type=click.Choice(satmod.VARIANTS), default="p3")
@click.option("--max-steps", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
def sat_cmd(dimacs_file, variant, max_steps, as_json):
    """Solve a DIMACS cnf file with one of the corpus solver variants."""
    try:
        with open(dimacs_file, "r", encoding="utf-8") as handle:
            formula = satmod.parse_dimacs(handle.read())
    except OSError as exc:
        _fail_usage(str(exc))
    except satmod.DimacsError as exc:
        _fail_usage(str(exc))
    for warning in formula.warnings:
        click.echo("warning: %s" % warning, err=True)
    result = satmod.solve_sat(formula, variant, _budget(max_steps, None))
    if as_json:
        _emit_json(result.to_dict())
    else:
        click.echo(satmod.render_solver_output(result, formula.num_vars))
    sys.exit(EXIT_PASS if result.verdict in (satmod.SAT, satmod.UNSAT) else EXIT_INDETERMINATE)


@main.command("check")
@click.argument("check_type", type=click.Choice(["correctness", "coverage", "recurrence", "cssld"]))
@click.argument("program_sources", nargs=-1, required=True)
@click.option("--spec", "spec_name", default=None, help="specification name (S1, S2, S2_0, S3, S3_0)")
@click.option("--mapping", "mapping_name", default=None, help="level mapping for recurrence (P1 or P3)")
@click.option("--bound", type=int, default=6, show_default=True)
@click.option("--slack", type=int, default=2, show_default=True)
@click.option("--sig", "sig_extension", default="", help="extra functors, e.g. 'b/0,f/1'")
@click.option("--json", "as_json", is_flag=True)
@click.option("--csv", "csv_path", default=None, help="write witnesses as CSV")
@click.option("--fig", "fig_path", default=None, help="write a summary figure (PNG)")
def check_cmd(check_type, program_sources, spec_name, mapping_name, bound, slack,
              sig_extension, as_json, csv_path, fig_path):
    """Bounded verification checks against a specification."""
    programs = [_load_program(src) for src in program_sources]
    if bound < 1 or slack < 0:
        _fail_usage("bound must be >= 1 and slack >= 0")
    extra_symbols = _parse_sig_option(sig_extension) if sig_extension else []

    def signature_for(program, spec):
        sig = program.signature
        if spec is not None:
            sig = sig.merge(spec.base_signature)
        if extra_symbols:
            sig = sig.extend(*extra_symbols)
        return sig

    if check_type == "recurrence":
        if len(programs) != 1:
            _fail_usage("recurrence checks one program")
        program = programs[0]
        name = mapping_name or ("P1" if program.name == "P1" else "P3")
        try:
            lm = mapping_by_name(name)
        except KeyError as exc:
            _fail_usage(str(exc))
        report = check_recurrent(program, lm, signature_for(program, None), bound, slack)
    else:
        if not spec_name:
            _fail_usage("--spec is required for %s" % check_type)
        try:
            spec = spec_by_name(spec_name)
        except KeyError as exc:
            _fail_usage(str(exc))
        if check_type == "correctness":
            if len(programs) != 1:
                _fail_usage("correctness checks one program")
            report = check_correctness(
                programs[0], spec, signature_for(programs[0], spec), bound, slack
            )
        elif check_type == "coverage":
            if len(programs) != 1:
                _fail_usage("coverage checks one program")
            report = check_coverage(
                programs[0], spec, signature_for(programs[0], spec), bound, slack
            )
        else:  # cssld: per-program coverage of the common spec
            if len(programs) < 2:
                _fail_usage("cssld checks need at least two programs")
            report = check_cssld_condition(
                programs, spec, signature_for(programs[0], spec), bound, slack
            )

    if csv_path is not None and hasattr(report, "witnesses"):
        with open(csv_path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["index", "witness"])
            for i, w in enumerate(report.witness_strings()):
                writer.writerow([i, w])
    if fig_path is not None and hasattr(report, "witnesses"):
        from .render import save_report_png

        save_report_png(report, fig_path)

    if as_json:
        _emit_json(report.to_dict())
    else:
        click.echo(report.summary())
    sys.exit(EXIT_PASS if report.passed else EXIT_FAIL)


@main.group()
def diagnose():
    """Declarative diagnosis from a symptom."""


@diagnose.command("wrong-answer")
@click.argument("program_source")
@click.option("--spec", "spec_name", required=True)
@click.option("--atom", "atom_text", required=True, help="the wrong ground answer")
@click.option("--bound", type=int, default=6, show_default=True)
@click.option("--max-steps", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
def diagnose_wrong(program_source, spec_name, atom_text, bound, max_steps, as_json):
    """Locate the incorrect rule instance behind a wrong answer."""
    program = _load_program(program_source)
    try:
        spec = spec_by_name(spec_name)
        atom = parse_term(atom_text)
    except (KeyError, ParseError) as exc:
        _fail_usage(str(exc))
    diagnosis = diagnose_incorrectness(
        program, spec, atom, bound=bound, budget=_budget(max_steps, None)
    )
    _emit_diagnosis(diagnosis, as_json)


@diagnose.command("missing-answer")
@click.argument("program_source")
@click.option("--spec", "spec_name", required=True)
@click.option("--query", "query_text", required=True)
@click.option("--bound", type=int, default=6, show_default=True)
@click.option("--max-steps", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
def diagnose_missing(program_source, spec_name, query_text, bound, max_steps, as_json):
    """Locate an uncovered specified atom behind a missing answer."""
    program = _load_program(program_source)
    try:
        spec = spec_by_name(spec_name)
    except KeyError as exc:
        _fail_usage(str(exc))
    query = _parse_query_arg(query_text)
    diagnosis = diagnose_incompleteness(
        program, spec, query, bound=bound, budget=_budget(max_steps, None)
    )
    _emit_diagnosis(diagnosis, as_json)


def _emit_diagnosis(diagnosis, as_json):
    if as_json:
        _emit_json(
            {
                "kind": diagnosis.kind,
                "instance": repr(diagnosis.instance) if diagnosis.instance else None,
                "atom": format_term(diagnosis.atom) if diagnosis.atom else None,
                "reason": diagnosis.reason,
                "justification": list(diagnosis.justification),
            }
        )
    else:
        click.echo(diagnosis.summary())
    if diagnosis.kind in (INCORRECT_INSTANCE, UNCOVERED_ATOM):
        sys.exit(EXIT_FAIL)
    if "budget" in diagnosis.reason:
        sys.exit(EXIT_INDETERMINATE)
    sys.exit(EXIT_PASS)


@main.command("tree")
@click.argument("program_source")
@click.argument("query_text")
@click.option("--out", "out_path", required=True, help="write the tree as JSON")
@click.option("--png", "png_path", default=None, help="also render the tree as a figure")
@click.option("--strategy", type=click.Choice(sorted(_STRATEGIES)), default="leftmost")
@click.option("--max-steps", type=int, default=None)
@click.option("--max-depth", type=int, default=None)
def tree_cmd(program_source, query_text, out_path, png_path, strategy, max_steps, max_depth):
    """Materialize a derivation tree and export it."""
    program = _load_program(program_source)
    query = _parse_query_arg(query_text)
    try:
        tree = build_tree(program, query, _STRATEGIES[strategy], _budget(max_steps, max_depth))
    except ValueError as exc:
        _fail_usage(str(exc))
    with open(out_path, "w", encoding="utf-8") as handle:
        handle.write(tree.to_json())
        handle.write("\n")
    if png_path:
        from .render import save_tree_png

        save_tree_png(tree, png_path)
    click.echo(
        "%d nodes, %d answer(s); exhaustive=%s floundered=%s"
        % (len(tree.nodes), len(tree.answers), tree.exhaustive, tree.floundered)
    )
    sys.exit(EXIT_INDETERMINATE if tree.budget_hit else EXIT_PASS)


if __name__ == "__main__":
    main()
