from __future__ import annotations

import datetime as dt
import json
from pathlib import Path

import pytest

from reviewrank.errors import ConfigError, ProtocolError, TransientServerError
from reviewrank.fixture_server import FixtureReviewServer
from reviewrank.gerrit import GerritClient, parse_change, parse_timestamp

DATA = Path(__file__).parent / "data"


def load_fixture_page():
    return json.loads((DATA / "gerrit_changes_page.json").read_text(encoding="utf-8"))


class TestFieldMapping:
    def test_golden_records_byte_exact(self):
        records = [parse_change(payload).as_record() for payload in load_fixture_page()]
        rendered = json.dumps(records, indent=2, sort_keys=True) + "\n"
        expected = (DATA / "expected_raw_changes.json").read_text(encoding="utf-8")
        assert rendered == expected

    def test_derived_example_change(self):
        change = parse_change(load_fixture_page()[0])
        assert change.verified_label == 1
        assert change.code_review_label == -1
        assert change.revision_count == 4

    def test_timestamp_formats(self):
        assert parse_timestamp("2024-01-01 10:00:00.000000000") == dt.datetime(
            2024, 1, 1, 10, tzinfo=dt.timezone.utc
        )
        assert parse_timestamp("2023-12-25T00:00:00Z") == dt.datetime(
            2023, 12, 25, tzinfo=dt.timezone.utc
        )
        assert parse_timestamp("2024-02-03 04:05:06.789000000").microsecond == 789000

    def test_worst_standing_vote_wins(self):
        payload = load_fixture_page()[0]
        payload["labels"]["Code-Review"]["all"] = [{"value": 2}, {"value": -2}, {"value": 1}]
        assert parse_change(payload).code_review_label == -2

    def test_no_votes_is_zero(self):
        payload = load_fixture_page()[2]
        assert parse_change(payload).verified_label == 0
        assert parse_change(payload).code_review_label == 0

    def test_unknown_status_rejected(self):
        payload = load_fixture_page()[0]
        payload["status"] = "DRAFTY"
        with pytest.raises(ProtocolError, match="DRAFTY"):
            parse_change(payload)

    def test_out_of_domain_vote_rejected(self):
        payload = load_fixture_page()[0]
        payload["labels"]["Verified"]["all"] = [{"value": 2}]
        with pytest.raises(ProtocolError):
            parse_change(payload)

    def test_missing_required_field_rejected(self):
        payload = load_fixture_page()[0]
        del payload["created"]
        with pytest.raises(ProtocolError):
            parse_change(payload)


@pytest.fixture()
def fixture_server():
    with FixtureReviewServer(load_fixture_page()) as server:
        yield server


class TestClient:
    def test_pagination_three_changes_two_requests(self, fixture_server):
        client = GerritClient(fixture_server.base_url, page_size=2)
        changes = client.fetch_changes("")
        assert len(changes) == 3
        assert len(fixture_server.request_paths) == 2

    def test_ids_unique_across_pages(self, fixture_server):
        client = GerritClient(fixture_server.base_url, page_size=1)
        changes = client.fetch_changes("")
        assert len({c.change_id for c in changes}) == 3

    def test_empty_query_result(self, fixture_server):
        client = GerritClient(fixture_server.base_url, page_size=10)
        assert client.fetch_changes("status:open reviewer:nobody") == []

    def test_status_filter(self, fixture_server):
        client = GerritClient(fixture_server.base_url, page_size=10)
        open_changes = client.fetch_changes("status:open")
        assert [c.change_id for c in open_changes] == ["demo/proj~master~I0001"]

    def test_reviewer_filter(self, fixture_server):
        client = GerritClient(fixture_server.base_url, page_size=10)
        changes = client.fetch_changes("reviewer:u1")
        assert [c.change_id for c in changes] == ["demo/proj~master~I0001"]

    def test_auth_required(self):
        with FixtureReviewServer(load_fixture_page(), require_token="sekrit") as server:
            with pytest.raises(ConfigError, match="401"):
                GerritClient(server.base_url).fetch_changes("")
            ok = GerritClient(server.base_url, token="sekrit").fetch_changes("")
            assert len(ok) == 3

    def test_transient_failure_retried_then_succeeds(self, fixture_server):
        fixture_server.fail_next = 1
        client = GerritClient(fixture_server.base_url, retry_wait=0.01)
        assert len(client.fetch_changes("")) == 3

    def test_unreachable_server_transient_error(self):
        client = GerritClient("http://127.0.0.1:9", max_retries=2, retry_wait=0.01)
        with pytest.raises(TransientServerError):
            client.fetch_changes("")

    def test_persistent_5xx_transient_error(self, fixture_server):
        fixture_server.fail_next = 10
        client = GerritClient(fixture_server.base_url, max_retries=2, retry_wait=0.01)
        with pytest.raises(TransientServerError):
            client.fetch_changes("")

    def test_idempotent_for_static_server(self, fixture_server):
        client = GerritClient(fixture_server.base_url, page_size=2)
        first = [c.as_record() for c in client.fetch_changes("")]
        second = [c.as_record() for c in client.fetch_changes("")]
        assert first == second

    def test_page_size_validated(self):
        with pytest.raises(ValueError):
            GerritClient("http://example.invalid", page_size=0)
