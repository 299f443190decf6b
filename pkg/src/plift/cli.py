"""Command-line front end.

Exit codes: 0 every selected constraint holds for all variants; 1 at
least one violation (or an --oracle disagreement); 2 usage or document
error; 3 solver failure or unknown.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import oracle as oracle_mod
from . import smt
from .bundle import (Bundle, configuration_from_file, dump_model,
                     load_bundle)
from .binding import bind
from .errors import (BundleError, InvalidConfiguration, PliftError,
                     SolverParseError, SolverProcessError, UnknownFeature)
from .lifting import lift, print_lifted
from .variability import enumerate_configurations, make_configuration

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3


def bundle_options(fn):
    @click.option("--metamodel", "metamodel_path", required=True,
                  type=click.Path(path_type=Path), help="Metamodel document.")
    @click.option("--model", "model_path", required=True,
                  type=click.Path(path_type=Path), help="Model document.")
    @click.option("--features", "features_path", required=True,
                  type=click.Path(path_type=Path),
                  help="Feature-model document.")
    @click.option("--presence", "presence_path", default=None,
                  type=click.Path(path_type=Path),
                  help="Presence-condition document (default: all present).")
    @click.option("--constraints", "constraints_path", default=None,
                  type=click.Path(path_type=Path),
                  help="Constraints document.")
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)
    return wrapper


def _load(metamodel_path, model_path, features_path, presence_path,
          constraints_path) -> Bundle:
    try:
        return load_bundle(metamodel_path, model_path, features_path,
                           presence_path, constraints_path)
    except PliftError as exc:
        raise click.exceptions.Exit(_usage_error(str(exc)))


def _usage_error(message: str) -> int:
    click.echo(f"error: {message}", err=True)
    return EXIT_USAGE


@click.group()
def main():
    """Family-based constraint checking for annotated model product lines."""


@main.command()
@bundle_options
@click.option("--constraint", "names", multiple=True,
              help="Check only this constraint (repeatable).")
@click.option("--solver", default=None,
              help="Solver command (default: PLIFT_SOLVER or the bundled "
                   "fragment solver).")
@click.option("--timeout", type=float, default=None,
              help="Solver timeout in seconds.")
@click.option("--oracle", "with_oracle", is_flag=True,
              help="Cross-check against the brute-force oracle and fail "
                   "on disagreement.")
@click.option("--format", "fmt", type=click.Choice(("text", "json")),
              default="text")
def check(metamodel_path, model_path, features_path, presence_path,
          constraints_path, names, solver, timeout, with_oracle, fmt):
    """Verify constraints for all variants at once."""
    bundle = _load(metamodel_path, model_path, features_path, presence_path,
                   constraints_path)
    selected = _select_constraints(bundle, names)
    results = []
    exit_code = EXIT_OK
    for name, tc in selected.items():
        entry = {"constraint": name, "verdict": None, "config": None,
                 "confirmed": None, "reason": None}
        try:
            if with_oracle:
                report = oracle_mod.equivalence_test(
                    bundle.product_line, tc, solver_cmd=solver,
                    timeout=timeout)
                if not report.agree:
                    entry["verdict"] = "disagreement"
                    entry["reason"] = (
                        f"oracle={type(report.oracle_verdict).__name__} "
                        f"smt={type(report.smt_verdict).__name__} "
                        f"{report.detail}")
                    results.append(entry)
                    exit_code = max(exit_code, EXIT_VIOLATION)
                    continue
                verdict = report.smt_verdict
            else:
                verdict = smt.check(bundle.product_line, tc,
                                    solver_cmd=solver, timeout=timeout)
        except (SolverProcessError, SolverParseError) as exc:
            entry["verdict"] = "solver-error"
            entry["reason"] = str(exc)
            results.append(entry)
            exit_code = max(exit_code, EXIT_SOLVER)
            continue
        if isinstance(verdict, smt.AllVariantsSatisfy):
            entry["verdict"] = "satisfies"
        elif isinstance(verdict, smt.Violation):
            entry["verdict"] = "violation"
            entry["config"] = dict(verdict.config.assignment)
            entry["confirmed"] = verdict.confirmed
            exit_code = max(exit_code, EXIT_VIOLATION)
        else:
            entry["verdict"] = "unknown"
            entry["reason"] = verdict.reason
            exit_code = max(exit_code, EXIT_SOLVER)
        results.append(entry)
    _print_report(results, fmt)
    sys.exit(exit_code)


def _select_constraints(bundle: Bundle, names):
    if not bundle.constraints:
        raise click.exceptions.Exit(
            _usage_error("the bundle declares no constraints"))
    if not names:
        return bundle.constraints
    selected = {}
    for name in names:
        if name not in bundle.constraints:
            raise click.exceptions.Exit(
                _usage_error(f"unknown constraint '{name}'"))
        selected[name] = bundle.constraints[name]
    return selected


def _print_report(results, fmt):
    if fmt == "json":
        click.echo(json.dumps({"results": results}, indent=2))
        return
    for entry in results:
        name, verdict = entry["constraint"], entry["verdict"]
        if verdict == "satisfies":
            click.echo(f"{name}: all variants satisfy")
        elif verdict == "violation":
            config = ", ".join(f"{k}={'true' if v else 'false'}"
                               for k, v in entry["config"].items())
            status = "confirmed" if entry["confirmed"] else "UNCONFIRMED"
            click.echo(f"{name}: VIOLATION ({status}) at {{{config}}}")
        else:
            click.echo(f"{name}: {verdict}: {entry['reason']}")


@main.command("lift")
@bundle_options
@click.argument("name")
def lift_cmd(metamodel_path, model_path, features_path, presence_path,
             constraints_path, name):
    """Print the lifted form of one constraint."""
    bundle = _load(metamodel_path, model_path, features_path, presence_path,
                   constraints_path)
    if name not in bundle.constraints:
        sys.exit(_usage_error(f"unknown constraint '{name}'"))
    click.echo(print_lifted(lift(bundle.constraints[name])))


@main.command("bind")
@bundle_options
@click.option("--config", "config_path", required=True,
              type=click.Path(path_type=Path),
              help="Configuration document: feature -> true/false.")
def bind_cmd(metamodel_path, model_path, features_path, presence_path,
             constraints_path, config_path):
    """Derive the concrete variant for one configuration."""
    bundle = _load(metamodel_path, model_path, features_path, presence_path,
                   constraints_path)
    try:
        assignment = configuration_from_file(config_path)
        config = make_configuration(bundle.product_line.feature_model,
                                    assignment)
    except (BundleError, InvalidConfiguration, UnknownFeature) as exc:
        sys.exit(_usage_error(str(exc)))
    variant = bind(bundle.product_line, config)
    click.echo(dump_model(variant.graph), nl=False)


@main.command("emit-smt")
@bundle_options
@click.argument("name")
@click.option("--out", "out_path", default=None,
              type=click.Path(path_type=Path),
              help="Write the script here instead of stdout.")
def emit_smt_cmd(metamodel_path, model_path, features_path, presence_path,
                 constraints_path, name, out_path):
    """Write the SMT-LIB translation for offline inspection."""
    bundle = _load(metamodel_path, model_path, features_path, presence_path,
                   constraints_path)
    if name not in bundle.constraints:
        sys.exit(_usage_error(f"unknown constraint '{name}'"))
    try:
        script = smt.emit_smt(bundle.product_line,
                              lift(bundle.constraints[name]))
    except PliftError as exc:
        sys.exit(_usage_error(str(exc)))
    if out_path is None:
        click.echo(script.text, nl=False)
    else:
        Path(out_path).write_text(script.text, encoding="utf-8")


@main.command()
@bundle_options
def enumerate(metamodel_path, model_path, features_path, presence_path,
              constraints_path):
    """List every valid configuration, one per line."""
    bundle = _load(metamodel_path, model_path, features_path, presence_path,
                   constraints_path)
    for config in enumerate_configurations(
            bundle.product_line.feature_model):
        click.echo(str(config))


if __name__ == "__main__":
    main()
