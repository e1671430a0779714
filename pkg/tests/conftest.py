from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import pytest

from reviewrank.config import AppConfig
from reviewrank.factors import FactorVector
from reviewrank.fixture_server import FixtureReviewServer
from reviewrank.service import ReviewService
from reviewrank.synth import (
    DEFAULT_FIXTURE_BINS,
    emit_fixture_server_payloads,
    fixture_payload,
    informative_planted_spec,
    sample_dataset,
)

UTC = dt.timezone.utc
FIXED_NOW = dt.datetime(2024, 6, 1, 12, 0, tzinfo=UTC)


def open_vector(
    change_id: str,
    change_type: str = "Feature",
    merge_conflict: str = "No",
    age_cat: str = "Medium",
    size_cat: str = "Medium",
    patches_cat: str = "Medium",
    test_verdict: str = "+1",
    peer_review: str = "0",
) -> FactorVector:
    return FactorVector(
        change_id=change_id,
        age_cat=age_cat,
        size_cat=size_cat,
        patches_cat=patches_cat,
        test_verdict=test_verdict,
        peer_review=peer_review,
        change_type=change_type,
        merge_conflict=merge_conflict,
        outcome=None,
    )


#: The reviewer u1 has three open requests: a clean trouble report, a clean
#: feature, and a conflicted trouble report; plus two clean features whose
#: test verdicts drive very different merge probabilities.
OPEN_VECTORS = [
    open_vector("open-tr-clean", change_type="TroubleReport", size_cat="Small"),
    open_vector("open-feature-clean", change_type="Feature"),
    open_vector("open-tr-conflict", change_type="TroubleReport", merge_conflict="Yes"),
    open_vector("open-feature-strong", change_type="Feature", size_cat="Small"),
    open_vector(
        "open-feature-weak", change_type="Feature", size_cat="Large", test_verdict="-1"
    ),
]


def build_fixture_changes(n_closed: int = 80, seed: int = 33) -> list[dict]:
    closed = sample_dataset(informative_planted_spec(n_closed, seed=seed))
    payloads = emit_fixture_server_payloads(closed, DEFAULT_FIXTURE_BINS, FIXED_NOW)
    for i, vector in enumerate(OPEN_VECTORS):
        payloads.append(
            fixture_payload(
                vector, 9000 + i, DEFAULT_FIXTURE_BINS, FIXED_NOW, reviewer="u1"
            )
        )
    return payloads


@dataclass
class Scene:
    server: FixtureReviewServer
    config: AppConfig
    service: ReviewService


@pytest.fixture()
def scene(tmp_path):
    server = FixtureReviewServer(build_fixture_changes()).start()
    config = AppConfig(
        review_server_url=server.base_url,
        store_path=tmp_path / "dataset.sqlite",
        model_path=tmp_path / "model.json",
    )
    service = ReviewService(config, clock=lambda: FIXED_NOW)
    try:
        yield Scene(server=server, config=config, service=service)
    finally:
        server.stop()


@pytest.fixture()
def trained_scene(scene):
    scene.service.ingest()
    scene.service.retrain()
    return scene
