import json
import logging
import tomllib
from datetime import timedelta
from pathlib import Path
from time import time

import click
import humanize
from pydantic import ValidationError
from rich import print
from rich.logging import RichHandler
from rich.table import Table

from whquant.cli.config import RunConfig
from whquant.cli.output import (
    RunManifest,
    emit_csv,
    emit_manifest,
    emit_plot,
    package_versions,
)
from whquant.cli.pipelines import PipelineResult, run_pipeline
from whquant.const import OUTPUT_ENV
from whquant.exceptions import WHQuantError

EXIT_INVALID_CONFIG = 2
EXIT_NUMERICAL = 3
MAX_TABLE_ROWS = 12

logger = logging.getLogger("whquant")


def _configure_logging(quiet: bool) -> None:
    level = logging.WARNING if quiet else logging.INFO
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        logger.addHandler(RichHandler(rich_tracebacks=False, show_path=False))
    logger.setLevel(level)


def _summary_table(result: PipelineResult) -> Table:
    name, frame = next(iter(result.tables.items()))
    table = Table(title=f"{result.command}: {name}")
    for column in frame.columns:
        table.add_column(str(column), no_wrap=True)
    for row in frame.head(MAX_TABLE_ROWS).itertuples(index=False):
        table.add_row(*(f"{v:.6g}" if isinstance(v, float) else str(v) for v in row))
    if len(frame) > MAX_TABLE_ROWS:
        table.caption = f"{len(frame) - MAX_TABLE_ROWS} more rows in {name}.csv"
    return table


@click.group("whquant")
def main() -> None:
    """
    whquant CLI
    """


@main.command("run")
@click.option(
    "-c",
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="TOML run configuration, see `whquant schema`",
)
@click.option(
    "-o",
    "--output",
    required=False,
    default=None,
    envvar=OUTPUT_ENV,
    show_envvar=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Output directory, overrides output_dir in the config",
)
@click.option(
    "--seedless",
    is_flag=True,
    default=False,
    help="Accepted and ignored: every computation is deterministic",
)
@click.option("-q", "--quiet", is_flag=True, default=False, help="Only log warnings")
@click.pass_context
def run(
    ctx: click.Context,
    config_path: Path,
    output: Path | None = None,
    seedless: bool = False,
    quiet: bool = False,
) -> None:
    """
    Run one command described by a config file and write its artifacts.

    Exit status is 2 for an invalid config and 3 when a numerical precondition fails
    or the artifacts cannot be written.
    """
    _configure_logging(quiet)
    start_time = time()
    try:
        config = RunConfig.from_toml(config_path)
    except (ValidationError, tomllib.TOMLDecodeError) as e:
        logger.error("Invalid config %s:\n%s", config_path, e)
        ctx.exit(EXIT_INVALID_CONFIG)

    out_dir = output if output is not None else config.output_dir
    try:
        result = run_pipeline(config, progress=not quiet)
    except WHQuantError as e:
        logger.error("%s failed: %s", config.command, e)
        ctx.exit(EXIT_NUMERICAL)

    for flag in result.flags:
        logger.warning(flag)

    manifest = RunManifest(
        command=str(config.command),
        config_hash=config.config_hash(),
        versions=package_versions(),
        timings=result.timings,
        flags=list(result.flags),
    )
    try:
        for name, frame in result.tables.items():
            manifest.artifacts.append(emit_csv(frame, out_dir / f"{name}.csv"))
        if config.emit_plots:
            for plot in result.plots:
                manifest.artifacts.append(emit_plot(plot, out_dir / f"{plot.name}.svg"))
        emit_manifest(manifest, out_dir / "manifest.json")
    except (WHQuantError, OSError) as e:
        logger.error("Could not write artifacts to %s: %s", out_dir, e)
        ctx.exit(EXIT_NUMERICAL)

    if not quiet:
        print(_summary_table(result))
        duration = time() - start_time
        for artifact in manifest.artifacts:
            click.echo(
                f"Wrote {artifact.path} ({humanize.naturalsize(artifact.size, binary=True)})"
            )
        click.echo(f"Duration: {humanize.precisedelta(timedelta(seconds=duration))}")


@main.command("schema")
def schema() -> None:
    """Print the JSON schema of run configs"""
    click.echo(json.dumps(RunConfig.model_json_schema(by_alias=True), indent=2))
