"""Command-line interface: ``lvbench eval ...`` and ``lvbench suite ...``.

Exit codes: 0 success, 2 some samples or metrics failed, 1 fatal error.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable

import click

from . import suite_tools
from .config import ConfigError, load_config
from .core import Suite, dump_suite, load_suite, validate_suite
from .pipeline import run_evaluation
from .providers import ProviderHub
from .reporting import FORMATS, emit_correlations, emit_tables, parse_pair

EXIT_OK, EXIT_FATAL, EXIT_PARTIAL = 0, 1, 2


def _config(config_path: str | None, overrides: tuple[str, ...]) -> dict[str, Any]:
    try:
        return load_config(config_path, overrides=overrides)
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from exc


config_option = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="YAML or JSON config file.")
set_option = click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help="Override a config value, e.g. metrics.clarity.trials=5.")


@click.group()
@click.option("-v", "--verbose", count=True, help="Repeat for more logging.")
def main(verbose: int) -> None:
    """Evaluate long-form text-to-video generations."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


# ------------------------------------------------------------------- eval


@main.group("eval")
def eval_group() -> None:
    """Run evaluations and export tables."""


@eval_group.command("run")
@click.option("--suite", "suite_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--videos", "videos_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--method", default=None, help="Method name for the report (default: videos directory name).")
@config_option
@set_option
def eval_run(suite_path: str, videos_dir: str, out_path: str, method: str | None, config_path: str | None, overrides: tuple[str, ...]) -> None:
    """Score every sample of SUITE against <id>.<ext> videos and write a report."""
    cfg = _config(config_path, overrides)
    try:
        report, code = run_evaluation(suite_path, videos_dir, cfg, out_path, method=method)
    except (ValueError, OSError) as exc:
        raise click.ClickException(str(exc)) from exc
    failed = report["failed_samples"]
    click.echo(f"wrote {out_path}: {len(report['samples'])} samples, {failed} failed, overall {report['overall_mean']}")
    sys.exit(code)


@eval_group.command("tables")
@click.argument("reports", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="markdown", show_default=True)
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
def eval_tables(reports: tuple[str, ...], fmt: str, out_dir: str) -> None:
    """Write percent tables (one row per report) and radar-plot data."""
    for path in emit_tables(reports, fmt, out_dir):
        click.echo(str(path))


@eval_group.command("correlate")
@click.argument("reports", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pair", "pairs", multiple=True, metavar="M1:M2", help="Metric or dimension pair; repeatable. Defaults to the standard eight pairs.")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="csv", show_default=True)
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
def eval_correlate(reports: tuple[str, ...], pairs: tuple[str, ...], fmt: str, out_dir: str) -> None:
    """Correlate sample-level scores across the given reports."""
    try:
        kwargs = {"pairs": [parse_pair(p) for p in pairs]} if pairs else {}
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    rows = emit_correlations(reports, out_dir=out_dir, fmt=fmt, **kwargs)
    for r in rows:
        coeffs = " ".join("—" if r[k] is None else f"{r[k]:.4f}" for k in ("pearson", "spearman", "kendall"))
        click.echo(f"{r['metric_1']} ~ {r['metric_2']} (n={r['n']}, {r['status']}): {coeffs}")


# ------------------------------------------------------------------ suite


@main.group("suite")
def suite_group() -> None:
    """Validate and augment prompt suites."""


@suite_group.command("validate")
@click.argument("suite_path", type=click.Path(exists=True, dir_okay=False))
@config_option
@set_option
def suite_validate(suite_path: str, config_path: str | None, overrides: tuple[str, ...]) -> None:
    """Report invariant violations; exits 1 if any."""
    cfg = _config(config_path, overrides)
    suite = load_suite(suite_path)
    problems = validate_suite(suite, themes=cfg.get("themes"), questions_per_dimension=int(cfg["metrics"]["herd"]["questions_per_dimension"]))
    for sid, probs in problems.items():
        for p in probs:
            click.echo(f"{sid or '<suite>'}: {p}")
    click.echo(f"{len(suite.samples)} samples, {len(problems)} with problems")
    sys.exit(EXIT_FATAL if problems else EXIT_OK)


def _augment(suite_path: str, config_path: str | None, overrides: tuple[str, ...], dry_run: bool, update: Callable[[Any, ProviderHub], Any]) -> None:
    cfg = _config(config_path, overrides)
    hub = ProviderHub.from_config(cfg)
    suite = load_suite(suite_path)
    failures = 0
    records = []
    for rec in suite.samples:
        try:
            records.append(update(rec, hub))
        except Exception as exc:  # noqa: BLE001 - keep going, report at the end
            failures += 1
            click.echo(f"{rec.id}: {exc}", err=True)
            records.append(rec)
    new = Suite(suite.version, tuple(records))
    if dry_run:
        click.echo(dump_suite(new), nl=False)
    else:
        dump_suite(new, suite_path)
        click.echo(f"updated {suite_path} ({len(records) - failures} records)")
    sys.exit(EXIT_PARTIAL if failures else EXIT_OK)


dry_run_option = click.option("--dry-run", is_flag=True, help="Print the augmented suite instead of rewriting the file.")


@suite_group.command("complexity")
@click.argument("suite_path", type=click.Path(exists=True, dir_okay=False))
@config_option
@set_option
@dry_run_option
def suite_complexity(suite_path: str, config_path: str | None, overrides: tuple[str, ...], dry_run: bool) -> None:
    """Score semantic, structural and control complexity of each prompt."""
    _augment(suite_path, config_path, overrides, dry_run, lambda r, hub: dataclasses.replace(r, complexity=suite_tools.score_prompt_complexity(r.prompt_text, hub)))


@suite_group.command("actions")
@click.argument("suite_path", type=click.Path(exists=True, dir_okay=False))
@config_option
@set_option
@dry_run_option
def suite_actions(suite_path: str, config_path: str | None, overrides: tuple[str, ...], dry_run: bool) -> None:
    """Extract human (subject, action) pairs from each prompt."""
    _augment(suite_path, config_path, overrides, dry_run, lambda r, hub: dataclasses.replace(r, human_actions=tuple(suite_tools.extract_human_actions(r.prompt_text, hub))))


@suite_group.command("events")
@click.argument("suite_path", type=click.Path(exists=True, dir_okay=False))
@config_option
@set_option
@dry_run_option
def suite_events(suite_path: str, config_path: str | None, overrides: tuple[str, ...], dry_run: bool) -> None:
    """Extract ground-truth events from each prompt base."""
    _augment(suite_path, config_path, overrides, dry_run, lambda r, hub: dataclasses.replace(r, ground_truth_events=tuple(suite_tools.ground_truth_events(r, hub))))


@suite_group.command("herd-questions")
@click.argument("suite_path", type=click.Path(exists=True, dir_okay=False))
@config_option
@set_option
@dry_run_option
def suite_herd_questions(suite_path: str, config_path: str | None, overrides: tuple[str, ...], dry_run: bool) -> None:
    """Generate HERD questions (seven dimensions) with polarity labels."""
    per_dim = int(_config(config_path, overrides)["metrics"]["herd"]["questions_per_dimension"])

    def update(rec: Any, hub: ProviderHub) -> Any:
        questions, flags = suite_tools.build_herd_questions(rec, hub, per_dimension=per_dim)
        for f in flags:
            click.echo(f"{rec.id}: {f['dimension']} slot {f['slot']}: duplicate question kept", err=True)
        return dataclasses.replace(rec, herd_questions=tuple(questions))

    _augment(suite_path, config_path, overrides, dry_run, update)


@suite_group.command("split-events")
@click.argument("suite_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Where to write {id: [sub-prompts]} (default: stdout).")
@config_option
@set_option
@click.option("--dry-run", is_flag=True, help="Print to stdout even when --out is given.")
def suite_split_events(suite_path: str, out_path: str | None, config_path: str | None, overrides: tuple[str, ...], dry_run: bool) -> None:
    """Write one generation prompt per ground-truth event, for multi-prompt generators."""
    cfg = _config(config_path, overrides)
    hub = ProviderHub.from_config(cfg)
    result: dict[str, list[str]] = {}
    failures = 0
    for rec in load_suite(suite_path).samples:
        try:
            result[rec.id] = suite_tools.split_event_prompts(rec.prompt_base, rec.ground_truth_events, hub)
        except Exception as exc:  # noqa: BLE001
            failures += 1
            click.echo(f"{rec.id}: {exc}", err=True)
    text = json.dumps(result, indent=2, ensure_ascii=False) + "\n"
    if dry_run or not out_path:
        click.echo(text, nl=False)
    else:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    sys.exit(EXIT_PARTIAL if failures else EXIT_OK)


if __name__ == "__main__":
    main()
