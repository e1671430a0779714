"""Operator command line: ingest, train, prioritize, eval, synth, serve."""
from __future__ import annotations

import csv
import dataclasses
import datetime as dt
import json
import logging
import sys
import threading
from pathlib import Path

import click
import yaml

import uvicorn

from .api import create_app
from .config import AppConfig, load_config
from .errors import ReviewRankError
from .evaluation import cross_validate
from .model_io import load_model
from .scheduler import JobScheduler
from .service import ReviewService
from .synth import (
    DEFAULT_FIXTURE_BINS,
    emit_fixture_server_payloads,
    informative_planted_spec,
    sample_dataset,
    uniform_planted_spec,
    write_fixture_file,
)

logger = logging.getLogger(__name__)


def _service(config: AppConfig) -> ReviewService:
    return ReviewService(config)


def _require_config(ctx: click.Context) -> AppConfig:
    path = ctx.obj.get("config_path")
    if not path:
        raise click.UsageError("a config file is required (--config or REVIEWRANK_CONFIG)")
    if not Path(path).exists():
        raise click.UsageError(f"config file not found: {path}")
    try:
        return load_config(path)
    except ReviewRankError as exc:
        raise click.UsageError(str(exc)) from exc


@click.group()
@click.option(
    "--config",
    "config_path",
    envvar="REVIEWRANK_CONFIG",
    type=click.Path(),
    default=None,
    help="Path to the YAML config file.",
)
@click.pass_context
def main(ctx: click.Context, config_path: str | None) -> None:
    """Prioritize code-review requests with a learned merge-probability model."""
    logging.basicConfig(
        stream=sys.stdout, level=logging.WARNING, format="%(asctime)s %(name)s %(message)s"
    )
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path


@main.command()
@click.pass_context
def ingest(ctx: click.Context) -> None:
    """Fetch closed changes from the review server into the dataset store."""
    config = _require_config(ctx)
    try:
        summary = _service(config).ingest()
    except ReviewRankError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"fetched {summary.fetched} changes, stored {summary.stored} training rows")


@main.command()
@click.pass_context
def train(ctx: click.Context) -> None:
    """Train the model on the stored dataset and persist the artifact."""
    config = _require_config(ctx)
    try:
        summary = _service(config).retrain()
    except ReviewRankError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(
        f"trained on {summary.training_rows} rows at {summary.trained_at}; "
        f"model written to {config.model_path}"
    )


@main.command()
@click.option("--user", required=True, help="Reviewer account id.")
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["table", "structured-text"]),
    default="table",
)
@click.pass_context
def prioritize(ctx: click.Context, user: str, output_format: str) -> None:
    """Rank the user's open review requests."""
    config = _require_config(ctx)
    service = _service(config)
    try:
        if config.model_path.exists():
            service.slot.swap(load_model(config.model_path))
        else:
            service.retrain()
        payload = service.prioritize_for_user(user)
    except ReviewRankError as exc:
        raise click.ClickException(str(exc)) from exc
    if output_format == "structured-text":
        click.echo(json.dumps(payload, indent=2))
        return
    click.echo(f"open review requests for {user} (model of {payload['model_trained_at']}):")
    header = f"{'rank':>4}  {'change id':<28} {'type':<13} {'conflict':<8} {'prob':>6}  subject"
    click.echo(header)
    for item in payload["items"]:
        marker = "~" if item["degraded"] else " "
        click.echo(
            f"{item['rank']:>4}  {item['change_id']:<28} {item['change_type']:<13} "
            f"{item['merge_conflict']:<8} {item['merge_probability']:>6.3f}{marker} "
            f"{item['subject']}"
        )


@main.command(name="eval")
@click.option("--k", default=5, show_default=True, help="Number of folds.")
@click.option("--seed", default=0, show_default=True, help="Fold-shuffle seed.")
@click.option(
    "--out",
    type=click.Path(path_type=Path),
    default=Path("eval_report.json"),
    show_default=True,
)
@click.pass_context
def eval_command(ctx: click.Context, k: int, seed: int, out: Path) -> None:
    """Cross-validate the model on the stored dataset and write the report."""
    config = _require_config(ctx)
    service = _service(config)
    rows = [r for r in service.store.load() if r.outcome is not None]
    try:
        report = cross_validate(
            rows, structure=config.structure(), alpha=config.alpha, k=k, seed=seed
        )
    except (ReviewRankError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json(), encoding="utf-8")
    roc_path = out.with_suffix(".roc.csv")
    with roc_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["fpr", "tpr"])
        writer.writerows(report.roc_points)
    click.echo(
        f"k={report.folds} seed={report.seed} "
        f"rmse={report.aggregate_rmse:.4f} mae={report.aggregate_mae:.4f} auc={report.auc:.4f}"
    )
    click.echo(f"report written to {out}, ROC points to {roc_path}")


@main.command()
@click.option(
    "--spec",
    "spec_path",
    required=True,
    type=click.Path(exists=True, path_type=Path),
    help="Planted-model spec (YAML/JSON).",
)
@click.option(
    "--out",
    type=click.Path(path_type=Path),
    default=Path("fixture_changes.json"),
    show_default=True,
)
def synth(spec_path: Path, out: Path) -> None:
    """Generate fixture review-server payloads from a planted model spec."""
    doc = yaml.safe_load(spec_path.read_text(encoding="utf-8")) or {}
    known = {"preset", "n_rows", "seed", "reviewer", "open_requests", "now",
             "merge_conflict_yes", "change_type_weights"}
    unknown = set(doc) - known
    if unknown:
        raise click.ClickException(f"unknown planted-spec keys: {sorted(unknown)}")
    preset = doc.get("preset", "informative")
    builders = {"informative": informative_planted_spec, "uniform": uniform_planted_spec}
    if preset not in builders:
        raise click.ClickException(f"unknown preset {preset!r}; use informative or uniform")
    n_rows = int(doc.get("n_rows", 200))
    open_requests = int(doc.get("open_requests", 0))
    spec = builders[preset](n_rows + open_requests, int(doc.get("seed", 0)))
    overrides = {}
    if "merge_conflict_yes" in doc:
        overrides["merge_conflict_yes"] = float(doc["merge_conflict_yes"])
    if "change_type_weights" in doc:
        overrides["change_type_weights"] = {
            str(k): float(v) for k, v in doc["change_type_weights"].items()
        }
    if overrides:
        spec = dataclasses.replace(spec, **overrides)
    now = (
        dt.datetime.fromisoformat(str(doc["now"]))
        if "now" in doc
        else dt.datetime.now(dt.timezone.utc)
    )
    rows = sample_dataset(spec)
    closed, opened = rows[: n_rows], [
        dataclasses.replace(r, outcome=None) for r in rows[n_rows:]
    ]
    payloads = emit_fixture_server_payloads(
        closed, DEFAULT_FIXTURE_BINS, now, reviewer=doc.get("reviewer")
    )
    payloads.extend(
        emit_fixture_server_payloads(opened, DEFAULT_FIXTURE_BINS, now, reviewer=doc.get("reviewer"))
    )
    out.parent.mkdir(parents=True, exist_ok=True)
    write_fixture_file(out, payloads)
    click.echo(
        f"wrote {len(payloads)} fixture changes ({len(closed)} closed, "
        f"{len(opened)} open) to {out}"
    )
    click.echo(f"serve them with: python -m reviewrank.fixture_server {out}")


@main.command()
@click.option("--host", default=None, help="Bind host (overrides config).")
@click.option("--port", default=None, type=int, help="Bind port (overrides config).")
@click.pass_context
def serve(ctx: click.Context, host: str | None, port: int | None) -> None:
    """Run the HTTP service with the daily-ingest / weekly-retrain scheduler."""
    config = _require_config(ctx)
    logging.getLogger().setLevel(logging.INFO)  # job log lines belong on stdout here
    service = _service(config)
    service.startup()
    scheduler = JobScheduler(service.ingest, service.retrain, config.schedule)
    threading.Thread(target=scheduler.run, daemon=True, name="scheduler").start()
    app = create_app(service)
    uvicorn.run(app, host=host or config.host, port=port or config.port, log_level="info")


if __name__ == "__main__":
    main()
