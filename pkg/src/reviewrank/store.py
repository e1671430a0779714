"""Embedded single-file dataset store for training rows.

SQLite, one table, upsert keyed by change_id: re-ingesting a change replaces
its values but keeps its original position, so reads come back in first
insertion order. A connection is opened per operation, which keeps the store
safe to read from any thread while the scheduler's ETL job writes.
"""
from __future__ import annotations

import sqlite3
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Iterator

from .errors import StorageError
from .factors import FactorVector

_SCHEMA = """
CREATE TABLE IF NOT EXISTS factor_vectors (
  change_id TEXT PRIMARY KEY,
  age_cat TEXT NOT NULL,
  size_cat TEXT NOT NULL,
  patches_cat TEXT NOT NULL,
  test_verdict TEXT NOT NULL,
  peer_review TEXT NOT NULL,
  change_type TEXT NOT NULL,
  merge_conflict TEXT NOT NULL,
  outcome TEXT,
  age_minutes REAL,
  size_lines INTEGER,
  revision_count INTEGER
);
"""

_COLUMNS = (
    "change_id",
    "age_cat",
    "size_cat",
    "patches_cat",
    "test_verdict",
    "peer_review",
    "change_type",
    "merge_conflict",
    "outcome",
    "age_minutes",
    "size_lines",
    "revision_count",
)


class DatasetStore:
    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self._connect() as conn:
                conn.executescript(_SCHEMA)
        except (OSError, sqlite3.Error) as exc:
            raise StorageError(f"cannot open dataset store at {self.path}: {exc}") from exc

    @contextmanager
    def _connect(self) -> Iterator[sqlite3.Connection]:
        try:
            conn = sqlite3.connect(self.path)
        except sqlite3.Error as exc:
            raise StorageError(f"cannot open dataset store at {self.path}: {exc}") from exc
        try:
            yield conn
            conn.commit()
        except sqlite3.Error as exc:
            conn.rollback()
            raise StorageError(f"dataset store failure: {exc}") from exc
        finally:
            conn.close()

    def upsert(self, rows: Iterable[FactorVector]) -> int:
        """Insert or replace by change_id; returns the number of rows written."""
        assignments = ", ".join(f"{c}=excluded.{c}" for c in _COLUMNS[1:])
        sql = (
            f"INSERT INTO factor_vectors ({', '.join(_COLUMNS)}) "
            f"VALUES ({', '.join('?' for _ in _COLUMNS)}) "
            f"ON CONFLICT(change_id) DO UPDATE SET {assignments}"
        )
        written = 0
        with self._connect() as conn:
            for row in rows:
                conn.execute(
                    sql,
                    (
                        row.change_id,
                        row.age_cat,
                        row.size_cat,
                        row.patches_cat,
                        row.test_verdict,
                        row.peer_review,
                        row.change_type,
                        row.merge_conflict,
                        row.outcome,
                        row.age_minutes,
                        row.size_lines,
                        row.revision_count,
                    ),
                )
                written += 1
        return written

    def load(self) -> list[FactorVector]:
        """All rows in first-insertion order."""
        with self._connect() as conn:
            cursor = conn.execute(
                f"SELECT {', '.join(_COLUMNS)} FROM factor_vectors ORDER BY rowid"
            )
            return [FactorVector(**dict(zip(_COLUMNS, values))) for values in cursor.fetchall()]

    def count(self) -> int:
        with self._connect() as conn:
            (n,) = conn.execute("SELECT COUNT(*) FROM factor_vectors").fetchone()
            return n
