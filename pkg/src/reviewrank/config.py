"""YAML configuration for the pipeline and service.

Credentials never live in the file: `auth_env` names an environment variable
holding the review-server token. Unknown keys are rejected so typos surface
immediately.
"""
from __future__ import annotations

import datetime as dt
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .bn import FACTOR_VARS, STATUS_VAR, NetworkStructure, structure_from_edges
from .errors import ConfigError
from .factors import DEFAULT_CHANGE_TYPE_RULES, ChangeTypeRules

DEFAULT_EDGES = tuple((f, STATUS_VAR) for f in FACTOR_VARS)


@dataclass(frozen=True)
class ScheduleConfig:
    ingest_time: dt.time = dt.time(2, 0)
    retrain_weekday: int = 6  # Monday=0 .. Sunday=6
    retrain_time: dt.time = dt.time(3, 0)

    def __post_init__(self) -> None:
        if not 0 <= self.retrain_weekday <= 6:
            raise ConfigError(f"retrain_weekday must be 0..6, got {self.retrain_weekday}")


@dataclass(frozen=True)
class AppConfig:
    review_server_url: str
    store_path: Path
    model_path: Path
    auth_env: str | None = None
    page_size: int = 100
    ingest_window_days: int = 180
    alpha: float = 1.0
    structure_edges: tuple[tuple[str, str], ...] = DEFAULT_EDGES
    change_type_rules: ChangeTypeRules = DEFAULT_CHANGE_TYPE_RULES
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    host: str = "127.0.0.1"
    port: int = 8400

    def structure(self) -> NetworkStructure:
        return structure_from_edges(self.structure_edges)

    def token(self) -> str | None:
        if not self.auth_env:
            return None
        return os.environ.get(self.auth_env)

    def ingest_queries(self) -> list[str]:
        window = f"-age:{self.ingest_window_days}d"
        return [f"status:merged {window}", f"status:abandoned {window}"]


_TOP_KEYS = {"review_server", "store", "model", "change_type_rules", "schedule", "service"}


def _parse_time(text: str) -> dt.time:
    try:
        hour, minute = text.split(":")
        return dt.time(int(hour), int(minute))
    except (ValueError, AttributeError) as exc:
        raise ConfigError(f"bad time of day {text!r}; expected HH:MM") from exc


_WEEKDAYS = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")


def _check_keys(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")


def load_config(path: str | Path) -> AppConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a mapping")
    _check_keys(doc, _TOP_KEYS, "config")

    server = doc.get("review_server") or {}
    _check_keys(server, {"url", "auth_env", "page_size", "ingest_window_days"}, "review_server")
    if "url" not in server:
        raise ConfigError("review_server.url is required")

    store = doc.get("store") or {}
    _check_keys(store, {"path"}, "store")
    if "path" not in store:
        raise ConfigError("store.path is required")

    model = doc.get("model") or {}
    _check_keys(model, {"path", "alpha", "structure_edges"}, "model")
    if "path" not in model:
        raise ConfigError("model.path is required")
    alpha = float(model.get("alpha", 1.0))
    if alpha <= 0:
        raise ConfigError(f"model.alpha must be positive, got {alpha}")
    edges = tuple(
        (str(parent), str(child)) for parent, child in model.get("structure_edges", DEFAULT_EDGES)
    )

    rules_doc = doc.get("change_type_rules")
    if rules_doc is None:
        rules: ChangeTypeRules = DEFAULT_CHANGE_TYPE_RULES
    else:
        _check_keys(rules_doc, {"TroubleReport", "Feature", "Refactoring"}, "change_type_rules")
        rules = tuple(
            (change_type, tuple(str(k) for k in keywords))
            for change_type, keywords in rules_doc.items()
        )

    schedule_doc = doc.get("schedule") or {}
    _check_keys(schedule_doc, {"ingest_time", "retrain_day", "retrain_time"}, "schedule")
    retrain_day = schedule_doc.get("retrain_day", "sunday")
    if str(retrain_day).lower() not in _WEEKDAYS:
        raise ConfigError(f"unknown retrain_day {retrain_day!r}")
    schedule = ScheduleConfig(
        ingest_time=_parse_time(schedule_doc.get("ingest_time", "02:00")),
        retrain_weekday=_WEEKDAYS.index(str(retrain_day).lower()),
        retrain_time=_parse_time(schedule_doc.get("retrain_time", "03:00")),
    )

    service_doc = doc.get("service") or {}
    _check_keys(service_doc, {"host", "port"}, "service")

    base = path.parent

    def _resolve(raw: str) -> Path:
        p = Path(raw)
        return p if p.is_absolute() else base / p

    config = AppConfig(
        review_server_url=str(server["url"]),
        store_path=_resolve(str(store["path"])),
        model_path=_resolve(str(model["path"])),
        auth_env=server.get("auth_env"),
        page_size=int(server.get("page_size", 100)),
        ingest_window_days=int(server.get("ingest_window_days", 180)),
        alpha=alpha,
        structure_edges=edges,
        change_type_rules=rules,
        schedule=schedule,
        host=str(service_doc.get("host", "127.0.0.1")),
        port=int(service_doc.get("port", 8400)),
    )
    config.structure()  # surface bad edge sets now, not at first training
    return config
