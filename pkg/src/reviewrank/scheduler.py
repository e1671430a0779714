"""Daily-ingest / weekly-retrain scheduler.

Jobs run inline on the scheduler's own loop. A tick whose time passes while
an earlier run is still executing is recorded as skipped, never queued. Job
failures are logged and the loop carries on to the next tick; the scheduler
itself never crashes.

The clock and sleep functions are injectable, so tests drive simulated days
through the loop deterministically.
"""
from __future__ import annotations

import datetime as dt
import logging
import time as time_module
from dataclasses import dataclass
from typing import Callable

from .config import ScheduleConfig

logger = logging.getLogger(__name__)


def _utcnow() -> dt.datetime:
    return dt.datetime.now(dt.timezone.utc)


def next_daily(after: dt.datetime, at: dt.time) -> dt.datetime:
    """First instant strictly after `after` with the given time of day."""
    candidate = after.replace(hour=at.hour, minute=at.minute, second=0, microsecond=0)
    if candidate <= after:
        candidate += dt.timedelta(days=1)
    return candidate


def next_weekly(after: dt.datetime, weekday: int, at: dt.time) -> dt.datetime:
    candidate = next_daily(after, at)
    while candidate.weekday() != weekday:
        candidate += dt.timedelta(days=1)
    return candidate


@dataclass(frozen=True)
class JobRecord:
    job: str
    scheduled_for: dt.datetime
    outcome: str  # ok | error | skipped
    detail: str = ""


@dataclass
class _JobState:
    name: str
    run: Callable[[], object]
    next_due: dt.datetime
    advance: Callable[[dt.datetime], dt.datetime]


class JobScheduler:
    def __init__(
        self,
        ingest: Callable[[], object],
        retrain: Callable[[], object],
        schedule: ScheduleConfig,
        clock: Callable[[], dt.datetime] = _utcnow,
        sleep: Callable[[float], None] = time_module.sleep,
    ) -> None:
        self._schedule = schedule
        self._clock = clock
        self._sleep = sleep
        now = clock()
        self._jobs = [
            _JobState(
                name="ingest",
                run=ingest,
                next_due=next_daily(now, schedule.ingest_time),
                advance=lambda after: next_daily(after, schedule.ingest_time),
            ),
            _JobState(
                name="retrain",
                run=retrain,
                next_due=next_weekly(now, schedule.retrain_weekday, schedule.retrain_time),
                advance=lambda after: next_weekly(
                    after, schedule.retrain_weekday, schedule.retrain_time
                ),
            ),
        ]
        self.records: list[JobRecord] = []

    def run(self, until: dt.datetime | None = None) -> list[JobRecord]:
        """Run ticks forever, or through `until` when given (tests, drills)."""
        while True:
            due = min(self._jobs, key=lambda j: j.next_due)
            if until is not None and due.next_due > until:
                return self.records
            wait = (due.next_due - self._clock()).total_seconds()
            if wait > 0:
                self._sleep(wait)
            self._execute(due)

    def _execute(self, job: _JobState) -> None:
        scheduled_for = job.next_due
        try:
            job.run()
            outcome, detail = "ok", ""
        except Exception as exc:  # jobs must never kill the scheduler
            outcome, detail = "error", str(exc)
            logger.error("job=%s scheduled_for=%s outcome=error: %s",
                         job.name, scheduled_for.isoformat(), exc)
        else:
            logger.info("job=%s scheduled_for=%s outcome=ok",
                        job.name, scheduled_for.isoformat())
        self.records.append(JobRecord(job.name, scheduled_for, outcome, detail))

        # Ticks that went by while the job ran are skipped, not queued.
        job.next_due = job.advance(scheduled_for)
        now = self._clock()
        while job.next_due <= now:
            logger.warning("job=%s scheduled_for=%s outcome=skipped (previous run still active)",
                           job.name, job.next_due.isoformat())
            self.records.append(
                JobRecord(job.name, job.next_due, "skipped", "previous run still active")
            )
            job.next_due = job.advance(job.next_due)

    def counts(self) -> dict[str, dict[str, int]]:
        summary: dict[str, dict[str, int]] = {}
        for record in self.records:
            per_job = summary.setdefault(record.job, {"ok": 0, "error": 0, "skipped": 0})
            per_job[record.outcome] += 1
        return summary


def run_scheduler(
    ingest: Callable[[], object],
    retrain: Callable[[], object],
    schedule: ScheduleConfig,
) -> None:
    """Run the production scheduler loop; never returns."""
    JobScheduler(ingest, retrain, schedule).run()
