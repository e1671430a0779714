"""Client for a Gerrit-compatible review server.

Speaks the `/changes/` query endpoint with `q`, `n` (page size) and `S`
(offset) parameters and follows pagination until exhaustion. Responses may
carry the usual `)]}'` prefix line before the JSON body.

Field mapping from a change payload to RawChange:

    change_id       <- "id"
    project         <- "project"
    created_at      <- "created" ("YYYY-MM-DD HH:MM:SS[.fff...]" or ISO 8601, UTC)
    status          <- "status" (NEW -> open, MERGED -> merged, ABANDONED -> abandoned)
    insertions      <- "insertions" (default 0)
    deletions       <- "deletions" (default 0)
    revision_count  <- len("revisions"), at least 1
    verified_label  <- worst standing vote in labels["Verified"]["all"] (0 if none)
    code_review_label <- worst standing vote in labels["Code-Review"]["all"] (0 if none)
    mergeable       <- "mergeable" (absent -> None, treated downstream as no conflict)
    subject         <- "subject"
    message         <- revisions[current_revision]["commit"]["message"] (else subject)
    reviewer_ids    <- usernames or account ids under reviewers["REVIEWER"]
"""
from __future__ import annotations

import datetime as dt
import json
import logging
import time
from dataclasses import dataclass

import requests

from .errors import ConfigError, ProtocolError, TransientServerError

logger = logging.getLogger(__name__)

XSSI_PREFIX = ")]}'"

_STATUS_MAP = {"NEW": "open", "MERGED": "merged", "ABANDONED": "abandoned"}


@dataclass(frozen=True)
class RawChange:
    """One code-review request as extracted from the review server."""

    change_id: str
    project: str
    created_at: dt.datetime
    status: str
    insertions: int
    deletions: int
    revision_count: int
    verified_label: int
    code_review_label: int
    mergeable: bool | None
    subject: str
    message: str
    reviewer_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.status not in ("open", "merged", "abandoned"):
            raise ValueError(f"status must be open/merged/abandoned, got {self.status!r}")
        if self.insertions < 0 or self.deletions < 0:
            raise ValueError("insertions and deletions must be >= 0")
        if self.revision_count < 1:
            raise ValueError("revision_count must be >= 1")
        if self.verified_label not in (-1, 0, 1):
            raise ValueError(f"verified_label {self.verified_label} outside {{-1, 0, +1}}")
        if not -2 <= self.code_review_label <= 2:
            raise ValueError(f"code_review_label {self.code_review_label} outside [-2, +2]")

    def as_record(self) -> dict:
        """Canonical plain-dict view, used by the field-mapping golden tests."""
        return {
            "change_id": self.change_id,
            "project": self.project,
            "created_at": self.created_at.isoformat(),
            "status": self.status,
            "insertions": self.insertions,
            "deletions": self.deletions,
            "revision_count": self.revision_count,
            "verified_label": self.verified_label,
            "code_review_label": self.code_review_label,
            "mergeable": self.mergeable,
            "subject": self.subject,
            "message": self.message,
            "reviewer_ids": list(self.reviewer_ids),
        }


def _excerpt(payload) -> str:
    text = payload if isinstance(payload, str) else json.dumps(payload, default=str)
    return text[:200]


def parse_timestamp(value: str) -> dt.datetime:
    """Accept Gerrit's space-separated form (with nanoseconds) or ISO 8601; UTC assumed."""
    text = value.strip()
    if " " in text and "T" not in text:
        base, _, frac = text.partition(".")
        parsed = dt.datetime.strptime(base, "%Y-%m-%d %H:%M:%S")
        if frac:
            parsed = parsed.replace(microsecond=int(frac[:6].ljust(6, "0")))
    else:
        parsed = dt.datetime.fromisoformat(text.replace("Z", "+00:00"))
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=dt.timezone.utc)
    return parsed.astimezone(dt.timezone.utc)


def _worst_vote(label_info: dict | None) -> int:
    """Aggregate the standing votes on a label: most negative nonzero vote wins."""
    votes = [
        entry["value"]
        for entry in (label_info or {}).get("all", [])
        if entry.get("value") is not None
    ]
    standing = [v for v in votes if v != 0]
    return min(standing) if standing else 0


def parse_change(payload: dict) -> RawChange:
    """Map one change payload onto RawChange; malformed input raises ProtocolError."""
    try:
        status_raw = payload["status"]
        status = _STATUS_MAP.get(str(status_raw).upper())
        if status is None:
            raise ProtocolError(
                f"unknown change status {status_raw!r} in payload {_excerpt(payload)}"
            )
        revisions = payload.get("revisions") or {}
        message = payload["subject"]
        current = payload.get("current_revision")
        if current and current in revisions:
            message = revisions[current].get("commit", {}).get("message", message)
        labels = payload.get("labels") or {}
        reviewers = []
        for entry in (payload.get("reviewers") or {}).get("REVIEWER", []):
            ident = entry.get("username") or entry.get("_account_id")
            if ident is not None:
                reviewers.append(str(ident))
        return RawChange(
            change_id=str(payload["id"]),
            project=str(payload["project"]),
            created_at=parse_timestamp(payload["created"]),
            status=status,
            insertions=int(payload.get("insertions", 0)),
            deletions=int(payload.get("deletions", 0)),
            revision_count=max(1, len(revisions)),
            verified_label=_worst_vote(labels.get("Verified")),
            code_review_label=_worst_vote(labels.get("Code-Review")),
            mergeable=payload.get("mergeable"),
            subject=str(payload["subject"]),
            message=str(message),
            reviewer_ids=tuple(reviewers),
        )
    except ProtocolError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError(f"malformed change payload ({exc!r}): {_excerpt(payload)}") from exc


def _strip_xssi(text: str) -> str:
    if text.startswith(XSSI_PREFIX):
        return text[len(XSSI_PREFIX):].lstrip("\n")
    return text


class GerritClient:
    """Paginated reader of the changes endpoint with bounded retries."""

    def __init__(
        self,
        base_url: str,
        token: str | None = None,
        page_size: int = 100,
        session: requests.Session | None = None,
        max_retries: int = 3,
        retry_wait: float = 0.2,
        timeout: float = 10.0,
    ) -> None:
        if page_size < 1:
            raise ValueError("page_size must be >= 1")
        self.base_url = base_url.rstrip("/")
        self.token = token
        self.page_size = page_size
        self.max_retries = max_retries
        self.retry_wait = retry_wait
        self.timeout = timeout
        self._session = session or requests.Session()

    def fetch_changes(self, query: str) -> list[RawChange]:
        """All changes matching `query`, following pagination until exhaustion."""
        changes: list[RawChange] = []
        offset = 0
        while True:
            page = self._fetch_page(query, offset)
            changes.extend(parse_change(item) for item in page)
            if len(page) < self.page_size or not page[-1].get("_more_changes"):
                return changes
            offset += len(page)

    def _fetch_page(self, query: str, offset: int) -> list[dict]:
        params = {"q": query, "n": str(self.page_size), "S": str(offset)}
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        url = f"{self.base_url}/changes/"
        last_error: Exception | None = None
        for attempt in range(self.max_retries):
            try:
                response = self._session.get(
                    url, params=params, headers=headers, timeout=self.timeout
                )
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_error = exc
                logger.warning("review server unreachable (attempt %d): %s", attempt + 1, exc)
                time.sleep(self.retry_wait * (attempt + 1))
                continue
            if response.status_code in (401, 403):
                raise ConfigError(
                    f"review server rejected credentials (HTTP {response.status_code})"
                )
            if response.status_code >= 500:
                last_error = TransientServerError(
                    f"review server error HTTP {response.status_code}"
                )
                time.sleep(self.retry_wait * (attempt + 1))
                continue
            if response.status_code != 200:
                raise ProtocolError(
                    f"unexpected HTTP {response.status_code}: {_excerpt(response.text)}"
                )
            try:
                payload = json.loads(_strip_xssi(response.text))
            except json.JSONDecodeError as exc:
                raise ProtocolError(
                    f"response is not valid JSON: {_excerpt(response.text)}"
                ) from exc
            if not isinstance(payload, list):
                raise ProtocolError(f"expected a JSON list of changes: {_excerpt(payload)}")
            return payload
        raise TransientServerError(
            f"review server unreachable after {self.max_retries} attempts: {last_error}"
        )
