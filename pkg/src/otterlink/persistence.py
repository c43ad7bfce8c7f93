"""Append-only record log plus periodic snapshot.

Every applied record is one JSON object per line in ``events.log``; a
snapshot captures full engine state and the log watermark. Restore loads the
snapshot and replays the log suffix. A torn or corrupt tail is truncated at
the last valid record and reported, never silently read past.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path

logger = logging.getLogger(__name__)

LOG_NAME = "events.log"
SNAPSHOT_NAME = "snapshot.json"


@dataclass(frozen=True)
class CorruptLog:
    """Report of a truncated-at-corruption recovery."""

    recovered: int
    truncated_at_byte: int
    reason: str


class RecordLog:
    """One JSON record per line, flushed before the caller acknowledges."""

    def __init__(self, directory: str | Path):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.path = self.dir / LOG_NAME
        self._fh = open(self.path, "a", encoding="utf-8")

    def append(self, record: dict) -> None:
        self._fh.write(json.dumps(record, sort_keys=True) + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        self._fh.close()

    @staticmethod
    def read_all(directory: str | Path) -> tuple[list[dict], CorruptLog | None]:
        """Read records, truncating the file at the first invalid line."""
        path = Path(directory) / LOG_NAME
        if not path.exists():
            return [], None
        records: list[dict] = []
        valid_bytes = 0
        report = None
        raw = path.read_bytes()
        offset = 0
        for line in raw.splitlines(keepends=True):
            stripped = line.strip()
            complete = line.endswith(b"\n")
            if stripped:
                try:
                    record = json.loads(stripped)
                    if not isinstance(record, dict) or not complete:
                        raise ValueError("torn record")
                    records.append(record)
                except (ValueError, json.JSONDecodeError) as exc:
                    report = CorruptLog(
                        recovered=len(records),
                        truncated_at_byte=offset,
                        reason=str(exc),
                    )
                    break
            offset += len(line)
            valid_bytes = offset
        if report is not None:
            logger.warning(
                "corrupt log %s: %s; truncating to %d records",
                path,
                report.reason,
                report.recovered,
            )
            with open(path, "r+b") as fh:
                fh.truncate(report.truncated_at_byte)
        return records, report


def save_snapshot(directory: str | Path, log_seq: int, state: dict) -> None:
    """Atomically write the snapshot (tmp file + rename)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    tmp = directory / (SNAPSHOT_NAME + ".tmp")
    tmp.write_text(
        json.dumps({"log_seq": log_seq, "state": state}, sort_keys=True),
        encoding="utf-8",
    )
    os.replace(tmp, directory / SNAPSHOT_NAME)


def load_snapshot(directory: str | Path) -> tuple[int, dict] | None:
    path = Path(directory) / SNAPSHOT_NAME
    if not path.exists():
        return None
    data = json.loads(path.read_text(encoding="utf-8"))
    return int(data["log_seq"]), data["state"]
