"""Command-line interface: ``run``, ``sweep``, ``oracle`` and ``verify``.

Exit codes: 0 success, 2 configuration error, 3 unmeasured setting pair,
4 property-suite failure.
"""

import logging
import os
import sys
from dataclasses import replace

import click

from . import kernels, oracle
from .config import load_config, parse_model_spec
from .errors import ConfigError
from .inequalities import chsh_combination
from .report import dumps
from .runner import SWEEP_HEADER, run_experiment, run_sweep
from .verify import DEFAULT_SEED, run_suites

EXIT_CONFIG = 2
EXIT_UNMEASURED = 3
EXIT_PROPERTY = 4


def _load(path, seed, workers, trials):
    try:
        cfg = load_config(path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except OSError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    if workers is not None:
        cfg = replace(cfg, workers=workers)
    if trials is not None:
        cfg = replace(cfg, trials=trials)
    return cfg


def _summary(report):
    ch = report.chsh
    lines = []
    for name, form in zip(
        ("conditional", "absolute", "generalized", "weak_absolute", "weak_bellian", "weak_bellian_4"), ch.forms()
    ):
        if form is None:
            lines.append(f"{name:>15}: unavailable")
            continue
        bound = "n/a" if form.bound is None else f"{form.bound:g}"
        flag = {True: "VIOLATED", False: "ok", None: "-"}[form.violated]
        lines.append(f"{name:>15}: {form.value:.6f} +/- {form.standard_error:.6f}  bound {bound:>4}  {flag}")
    lines.append(f"{'identity':>15}: max|C - pQ| = {report.identity_residual:.3g}")
    return "\n".join(lines)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Bell/CHSH experiments on a single probability space."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Override run.seed.")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Override run.workers.")
@click.option("--trials", type=click.IntRange(min=1), default=None, help="Override run.trials.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None, help="Override out.report.")
@click.option("--dump", "dump_path", type=click.Path(dir_okay=False), default=None, help="Override out.trials.")
@click.option("--timing", is_flag=True, help="Record wall time in the report (breaks byte stability).")
def run(config, seed, workers, trials, report_path, dump_path, timing):
    """Run one experiment and write its JSON report."""
    cfg = _load(config, seed, workers, trials)
    if report_path is not None:
        cfg = replace(cfg, out_report=report_path)
    if dump_path is not None:
        cfg = replace(cfg, out_trials=dump_path)
    report = run_experiment(cfg, record_timing=timing)
    if cfg.out_report:
        click.echo(_summary(report))
    else:
        click.echo(report.to_json(), nl=False)
    if not report.complete:
        cells = ", ".join(f"({i},{j})" for i, j in report.unmeasured)
        click.echo(f"unmeasured setting pairs: {cells}; conditional section unavailable", err=True)
        sys.exit(EXIT_UNMEASURED)


@main.command()
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None)
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option("--trials", type=click.IntRange(min=1), default=None)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None, help="Override out.csv.")
def sweep(config, seed, workers, trials, csv_path):
    """Vary one analyser angle over a grid and tabulate the CHSH values."""
    cfg = _load(config, seed, workers, trials)
    if cfg.sweep is None:
        click.echo("config error: sweep: configuration has no [sweep] section", err=True)
        sys.exit(EXIT_CONFIG)
    if csv_path is not None:
        cfg = replace(cfg, out_csv=csv_path)
    result = run_sweep(cfg)
    if not cfg.out_csv:
        from .report import format_float

        click.echo(",".join(SWEEP_HEADER))
        for row in result.rows:
            click.echo(",".join("" if v is None else format_float(v) if isinstance(v, float) else str(v).lower() if isinstance(v, bool) else str(v) for v in row))
    if any(r.conditional is None for r in result.reports):
        sys.exit(EXIT_UNMEASURED)


@main.command("oracle")
@click.argument("model_spec")
def oracle_cmd(model_spec):
    """Exact correlations for MODEL_SPEC, a config file, 'deterministic' or 'tsirelson'."""
    if model_spec == "deterministic":
        best = oracle.maximize_chsh_deterministic()
        out = {
            "max_chsh_conditional": best.value,
            "max_chsh_absolute_uniform": best.absolute_uniform,
            "visited": best.visited,
            "argmax": [list(s.signs) for s in best.argmax],
        }
    elif model_spec == "tsirelson":
        opt = oracle.tsirelson_optimum()
        out = {
            "angles": list(opt.angles),
            "value": opt.value,
            "grid_points": opt.grid_points,
            "grid_max": opt.grid_max,
            "grid_argmax": list(opt.grid_argmax),
        }
    else:
        try:
            if os.path.isfile(model_spec):
                spec = load_config(model_spec).source
            else:
                spec = parse_model_spec(model_spec)
            source = spec.build()
        except (ConfigError, ValueError) as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        table = oracle.exact_table(source)
        q = table.as_array()
        out = {
            "source": table.source,
            "conditional": q,
            "rational": [[str(v) for v in row] for row in table.values] if table.is_rational else None,
            "chsh_conditional": float(table.chsh()),
            "chsh_absolute_uniform": abs(float(chsh_combination(q / 4))),
        }
    click.echo(dumps(out), nl=False)


@main.command()
@click.argument("suite", default="all", type=click.Choice(["all", "oracle", "estimators", "soundness"]))
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
def verify(suite, seed):
    """Run the built-in property suites; exit 4 if any property fails."""
    click.echo(f"kernel backend: {kernels.ACTIVE}")
    results = run_suites(suite, seed)
    for r in results:
        click.echo(r.line())
    failed = [r for r in results if not r.passed]
    click.echo(f"{len(results) - len(failed)}/{len(results)} properties passed")
    if failed:
        sys.exit(EXIT_PROPERTY)


if __name__ == "__main__":
    main()
