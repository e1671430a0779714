"""Serving core: live prioritization, retraining with atomic model swap, ETL job.

The served model sits behind a swap-safe slot. Requests read the reference
once and work against that immutable model for their whole lifetime, so a
retrain that lands mid-request never tears a response; it only affects
requests that start afterwards.
"""
from __future__ import annotations

import datetime as dt
import logging
import threading
from dataclasses import dataclass, replace
from typing import Callable

from .binning import categorize, fit_bins
from .bn import (
    AGE_STATES,
    PATCHES_STATES,
    SIZE_STATES,
    TrainedModel,
    infer_merge_probability,
    learn_cpts,
    validate_model,
)
from .config import AppConfig
from .errors import (
    DegenerateEvidenceError,
    EmptyDatasetError,
    NoModelError,
    ReviewRankError,
)
from .factors import (
    build_factor_vector,
    compute_raw_factors,
    evidence_from,
    training_assignment,
)
from .gerrit import GerritClient
from .model_io import load_model, save_model
from .prioritize import PrioritizedItem, prioritize
from .store import DatasetStore

logger = logging.getLogger(__name__)

FALLBACK_PROBABILITY = 0.5

#: Health turns WARN when the last ingest is older than twice the daily cadence.
STALE_INGEST_AFTER = dt.timedelta(days=2)


def _utcnow() -> dt.datetime:
    return dt.datetime.now(dt.timezone.utc)


class ModelSlot:
    """Atomically swappable reference to the currently served model."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._model: TrainedModel | None = None

    def get(self) -> TrainedModel | None:
        with self._lock:
            return self._model

    def swap(self, model: TrainedModel) -> None:
        validate_model(model)
        with self._lock:
            self._model = model


@dataclass(frozen=True)
class IngestSummary:
    fetched: int
    stored: int


@dataclass(frozen=True)
class TrainSummary:
    trained_at: str
    training_rows: int


class ReviewService:
    def __init__(
        self,
        config: AppConfig,
        store: DatasetStore | None = None,
        client: GerritClient | None = None,
        clock: Callable[[], dt.datetime] = _utcnow,
    ) -> None:
        self.config = config
        self.store = store or DatasetStore(config.store_path)
        self.client = client or GerritClient(
            config.review_server_url, token=config.token(), page_size=config.page_size
        )
        self.clock = clock
        self.slot = ModelSlot()
        self._train_lock = threading.Lock()
        self.last_ingest_at: dt.datetime | None = None
        self.last_train_at: dt.datetime | None = None

    # -- startup ---------------------------------------------------------

    def startup(self) -> None:
        """Train from the store if it has data; otherwise fall back to a saved artifact."""
        try:
            self.retrain()
            return
        except EmptyDatasetError:
            pass
        if self.config.model_path.exists():
            model = load_model(self.config.model_path)
            self.slot.swap(model)
            logger.info("loaded model artifact from %s", self.config.model_path)
        else:
            logger.warning("starting without a model; prioritize is unavailable until data arrives")

    # -- jobs ------------------------------------------------------------

    def ingest(self) -> IngestSummary:
        """Fetch closed changes in the configured window and upsert their factor rows."""
        snapshot_time = self.clock()
        changes = []
        for query in self.config.ingest_queries():
            changes.extend(self.client.fetch_changes(query))
        closed = [c for c in changes if c.status in ("merged", "abandoned")]
        if not closed:
            self.last_ingest_at = snapshot_time
            return IngestSummary(fetched=len(changes), stored=0)
        bins = fit_bins(
            *zip(*(self._raw_triple(c, snapshot_time) for c in closed))
        )
        rows = [
            build_factor_vector(c, bins, snapshot_time, self.config.change_type_rules)
            for c in closed
        ]
        stored = self.store.upsert(rows)
        self.last_ingest_at = snapshot_time
        logger.info("job=ingest outcome=ok fetched=%d stored=%d", len(changes), stored)
        return IngestSummary(fetched=len(changes), stored=stored)

    @staticmethod
    def _raw_triple(change, now):
        raw = compute_raw_factors(change, now)
        return raw.age_minutes, raw.size_lines, raw.revision_count

    def retrain(self) -> TrainSummary:
        """Train on the current dataset and swap atomically; failure keeps the old model."""
        with self._train_lock:
            rows = [r for r in self.store.load() if r.outcome is not None]
            if not rows:
                raise EmptyDatasetError("dataset is empty")
            model = self._train(rows)
            self.slot.swap(model)
            save_model(model, self.config.model_path)
            self.last_train_at = model.trained_at
            logger.info(
                "job=retrain outcome=ok rows=%d trained_at=%s",
                model.training_rows,
                model.trained_at.isoformat(),
            )
            return TrainSummary(
                trained_at=model.trained_at.isoformat(), training_rows=model.training_rows
            )

    def _train(self, rows) -> TrainedModel:
        if all(r.has_raw_values for r in rows):
            bins = fit_bins(
                [r.age_minutes for r in rows],
                [r.size_lines for r in rows],
                [r.revision_count for r in rows],
            )
            rows = [
                replace(
                    r,
                    age_cat=categorize(r.age_minutes, bins.age_minutes, AGE_STATES),
                    size_cat=categorize(r.size_lines, bins.size_lines, SIZE_STATES),
                    patches_cat=categorize(
                        r.revision_count, bins.revision_count, PATCHES_STATES
                    ),
                )
                for r in rows
            ]
        else:
            bins = None
        return learn_cpts(
            [training_assignment(r) for r in rows],
            self.config.structure(),
            self.config.alpha,
            bins=bins,
            trained_at=self.clock(),
        )

    # -- request handling --------------------------------------------------

    def prioritize_for_user(self, user: str) -> dict:
        """Live-fetch the user's open requests, infer probabilities, rank them.

        The model reference is read once; the whole response is computed
        against that immutable snapshot even if a retrain swaps mid-flight.
        """
        model = self.slot.get()
        if model is None:
            raise NoModelError("no trained model is available yet")
        return self.prioritize_with_model(model, user)

    def prioritize_with_model(self, model: TrainedModel, user: str) -> dict:
        if model.bins is None:
            raise ReviewRankError("served model carries no bin thresholds")
        changes = self.client.fetch_changes(f"status:open reviewer:{user}")
        now = self.clock()
        items = []
        for change in changes:
            vector = build_factor_vector(change, model.bins, now, self.config.change_type_rules)
            try:
                probability = infer_merge_probability(model, evidence_from(vector))
                degraded = False
            except DegenerateEvidenceError:
                probability = FALLBACK_PROBABILITY
                degraded = True
            items.append(
                PrioritizedItem(
                    change_id=change.change_id,
                    subject=change.subject,
                    merge_conflict=vector.merge_conflict,
                    change_type=vector.change_type,
                    merge_probability=probability,
                    age_minutes=vector.age_minutes,
                    degraded=degraded,
                )
            )
        ranked = prioritize(items)
        return {
            "user": user,
            "model_trained_at": model.trained_at.isoformat(),
            "items": [
                {
                    "rank": item.rank,
                    "change_id": item.change_id,
                    "subject": item.subject,
                    "change_type": item.change_type,
                    "merge_conflict": item.merge_conflict,
                    "merge_probability": item.merge_probability,
                    "age_minutes": item.age_minutes,
                    "degraded": item.degraded,
                }
                for item in ranked
            ],
        }

    def model_info(self) -> dict:
        model = self.slot.get()
        if model is None:
            return {"model": None}
        return {
            "model": {
                "trained_at": model.trained_at.isoformat(),
                "training_rows": model.training_rows,
                "smoothing_alpha": model.smoothing_alpha,
                "variables": list(model.structure.names),
                "edges": [list(e) for e in model.structure.edges],
            }
        }

    def health(self) -> dict:
        now = self.clock()
        status = "ok"
        if self.last_ingest_at is not None and now - self.last_ingest_at > STALE_INGEST_AFTER:
            status = "warn"
        return {
            "status": status,
            "model_loaded": self.slot.get() is not None,
            "last_ingest_at": self.last_ingest_at.isoformat() if self.last_ingest_at else None,
            "last_train_at": self.last_train_at.isoformat() if self.last_train_at else None,
        }
