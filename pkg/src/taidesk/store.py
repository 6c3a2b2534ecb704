"""Durable document storage with per-key compare-and-swap and NDJSON export.

Two backends share one contract: :class:`MemoryStore` for tests and replays,
:class:`FileStore` which additionally appends every accepted write to an
NDJSON log and rebuilds state from it on open (last version per key wins).

Export format (also used as the import format and the FileStore log):
UTF-8, one JSON document per line, keys sorted, records ordered by
(kind, key). Timestamps inside payloads are RFC 3339. The format is
byte-stable: exporting, importing into a fresh store, and exporting again
yields identical bytes.
"""

from __future__ import annotations

import json
import threading
from copy import deepcopy
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Sequence, TextIO

from .errors import StaleVersion, StorageFailure
from .rfc3339 import parse_rfc3339

REDACTED = "[REDACTED]"


class RecordKind(Enum):
    WORK_ITEM = "WORK_ITEM"
    METRICS_EVENT = "METRICS_EVENT"
    SURVEY_RESPONSE = "SURVEY_RESPONSE"


@dataclass(frozen=True)
class StoredRecord:
    kind: RecordKind
    key: str
    version: int
    payload: dict


@dataclass(frozen=True)
class ExportFilter:
    """Conjunctive record filter; None fields match everything."""

    course_id: Optional[str] = None
    kind: Optional[RecordKind] = None
    state: Optional[str] = None
    since: Optional[datetime] = None
    until: Optional[datetime] = None


def record_course_id(record: StoredRecord) -> Optional[str]:
    return record.payload.get("course_id")


def record_state(record: StoredRecord) -> Optional[str]:
    return record.payload.get("state")


def record_timestamp(record: StoredRecord) -> Optional[datetime]:
    """The record's canonical timestamp for time-range filtering.

    Work items use their post's created_at; event payloads use 'at'.
    Records without a timestamp only match unbounded time ranges.
    """
    if record.kind is RecordKind.WORK_ITEM:
        raw = record.payload.get("post", {}).get("created_at")
    else:
        raw = record.payload.get("at") or record.payload.get("created_at")
    return parse_rfc3339(raw) if raw else None


def matches(record: StoredRecord, flt: ExportFilter) -> bool:
    if flt.kind is not None and record.kind is not flt.kind:
        return False
    if flt.course_id is not None and record_course_id(record) != flt.course_id:
        return False
    if flt.state is not None and record_state(record) != flt.state:
        return False
    if flt.since is not None or flt.until is not None:
        ts = record_timestamp(record)
        if ts is None:
            return False
        if flt.since is not None and ts < flt.since:
            return False
        if flt.until is not None and ts > flt.until:
            return False
    return True


class MemoryStore:
    """Thread-safe in-memory document store with CAS semantics."""

    def __init__(self) -> None:
        self._records: dict[tuple[str, str], StoredRecord] = {}
        self._lock = threading.RLock()

    # --- writes --------------------------------------------------------------

    def save(self, kind: RecordKind, key: str, payload: dict, expected_version: int) -> int:
        """Compare-and-swap write; expected_version is 0 for creation."""
        with self._lock:
            current = self._records.get((kind.value, key))
            current_version = current.version if current else 0
            if expected_version != current_version:
                raise StaleVersion(
                    f"{kind.value}/{key}: expected version {expected_version}, "
                    f"stored {current_version}"
                )
            record = StoredRecord(kind, key, current_version + 1, deepcopy(payload))
            self._records[(kind.value, key)] = record
            self._persist(record)
            return record.version

    def _persist(self, record: StoredRecord) -> None:
        pass  # memory backend keeps nothing outside the dict

    # --- reads ---------------------------------------------------------------

    def get(self, kind: RecordKind, key: str) -> Optional[StoredRecord]:
        with self._lock:
            return self._records.get((kind.value, key))

    def records(self, kind: Optional[RecordKind] = None) -> List[StoredRecord]:
        """Consistent snapshot, ordered by (kind, key)."""
        with self._lock:
            snapshot = list(self._records.values())
        if kind is not None:
            snapshot = [r for r in snapshot if r.kind is kind]
        snapshot.sort(key=lambda r: (r.kind.value, r.key))
        return snapshot

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    # --- export / import -----------------------------------------------------

    def export_lines(
        self,
        flt: Optional[ExportFilter] = None,
        redact: Sequence[str] = (),
    ) -> Iterator[str]:
        """Matching records as NDJSON lines (without trailing newlines)."""
        flt = flt or ExportFilter()
        for record in self.records():
            if not matches(record, flt):
                continue
            line = json.dumps(
                {
                    "kind": record.kind.value,
                    "key": record.key,
                    "version": record.version,
                    "payload": record.payload,
                },
                sort_keys=True,
                ensure_ascii=False,
                separators=(",", ":"),
            )
            for secret in redact:
                if secret:
                    line = line.replace(secret, REDACTED)
            yield line

    def export_json(
        self,
        out: TextIO,
        flt: Optional[ExportFilter] = None,
        redact: Sequence[str] = (),
    ) -> int:
        """Stream matching records to ``out``; returns the record count."""
        count = 0
        for line in self.export_lines(flt, redact):
            out.write(line + "\n")
            count += 1
        return count

    def import_lines(self, lines: Iterable[str]) -> int:
        """Load an export into this store; (kind, key) collisions are errors."""
        count = 0
        for i, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                record = StoredRecord(
                    kind=RecordKind(doc["kind"]),
                    key=doc["key"],
                    version=int(doc["version"]),
                    payload=doc["payload"],
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise StorageFailure(f"import line {i}: {exc}") from exc
            with self._lock:
                if (record.kind.value, record.key) in self._records:
                    raise StorageFailure(
                        f"import line {i}: {record.kind.value}/{record.key} already exists"
                    )
                self._records[(record.kind.value, record.key)] = record
                self._persist(record)
            count += 1
        return count


class FileStore(MemoryStore):
    """MemoryStore plus an append-only NDJSON log for durability."""

    def __init__(self, path: str | Path) -> None:
        super().__init__()
        self.path = Path(path)
        if self.path.exists():
            self._replay_log()

    def _replay_log(self) -> None:
        try:
            text = self.path.read_text(encoding="utf-8")
        except OSError as exc:
            raise StorageFailure(f"cannot read store log: {exc}") from exc
        for i, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                record = StoredRecord(
                    kind=RecordKind(doc["kind"]),
                    key=doc["key"],
                    version=int(doc["version"]),
                    payload=doc["payload"],
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise StorageFailure(f"store log line {i}: {exc}") from exc
            self._records[(record.kind.value, record.key)] = record

    def _persist(self, record: StoredRecord) -> None:
        line = json.dumps(
            {
                "kind": record.kind.value,
                "key": record.key,
                "version": record.version,
                "payload": record.payload,
            },
            sort_keys=True,
            ensure_ascii=False,
            separators=(",", ":"),
        )
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
        except OSError as exc:
            raise StorageFailure(f"cannot append to store log: {exc}") from exc
