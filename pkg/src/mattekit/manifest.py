"""Dataset manifest: per-sample records, the status state machine, and
crash-safe persistence.

The manifest is a single JSON document with stable key order, written
atomically (temp file + rename) so a file on disk always parses. A
sidecar lock file enforces one writer at a time. Timestamps honor the
SOURCE_DATE_EPOCH convention so batch runs can be made byte-reproducible.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .connectivity import ScreeningStats
from .errors import ManifestError, ManifestLockError, StateTransitionError

MANIFEST_FORMAT = "mattekit-manifest-v1"

STATUSES = ("pending", "flagged", "accepted", "rejected", "refined")

_TRANSITIONS: dict[str, set[str]] = {
    "pending": {"flagged", "accepted", "rejected"},
    "flagged": {"accepted", "rejected"},
    "accepted": {"refined"},
    "rejected": set(),
    "refined": set(),
}


def utcnow() -> str:
    """Current UTC time, or the SOURCE_DATE_EPOCH override, as ISO 8601."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = float(epoch) if epoch else time.time()
    return datetime.fromtimestamp(t, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class SampleRecord:
    """One dataset sample as it moves through the pipeline."""

    id: str
    paths: dict = field(default_factory=dict)  # kind -> path relative to manifest dir
    composites: list = field(default_factory=list)
    status: str = "pending"
    screening: ScreeningStats | None = None
    metrics: dict | None = None
    chroma: dict | None = None
    decided_by: str | None = None
    error: str | None = None
    created_at: str = ""
    updated_at: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ManifestError(f"unknown status {self.status!r}")
        if not self.created_at:
            self.created_at = utcnow()
        if not self.updated_at:
            self.updated_at = self.created_at

    def transition(self, new_status: str, decided_by: str) -> None:
        """Move to a new status, enforcing the allowed graph.

        Leaving `flagged` requires a human decision.
        """
        if new_status not in STATUSES:
            raise StateTransitionError(f"unknown status {new_status!r}")
        if new_status not in _TRANSITIONS[self.status]:
            raise StateTransitionError(
                f"sample {self.id}: cannot go {self.status} -> {new_status}"
            )
        if self.status == "flagged" and decided_by != "human":
            raise StateTransitionError(
                f"sample {self.id}: leaving flagged requires a human decision"
            )
        if decided_by not in ("auto", "human"):
            raise StateTransitionError(f"decided_by must be auto or human, got {decided_by!r}")
        self.status = new_status
        self.decided_by = decided_by
        self.updated_at = utcnow()

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "paths": dict(sorted(self.paths.items())),
            "composites": list(self.composites),
            "status": self.status,
            "screening": self.screening.to_dict() if self.screening else None,
            "metrics": self.metrics,
            "chroma": self.chroma,
            "decided_by": self.decided_by,
            "error": self.error,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SampleRecord":
        return cls(
            id=str(d["id"]),
            paths=dict(d.get("paths", {})),
            composites=list(d.get("composites", [])),
            status=str(d.get("status", "pending")),
            screening=ScreeningStats.from_dict(d["screening"]) if d.get("screening") else None,
            metrics=d.get("metrics"),
            chroma=d.get("chroma"),
            decided_by=d.get("decided_by"),
            error=d.get("error"),
            created_at=str(d.get("created_at", "")),
            updated_at=str(d.get("updated_at", "")),
        )


@dataclass
class DatasetManifest:
    """The whole dataset state: samples, vocabulary, config snapshot."""

    version: int = 0
    samples: dict[str, SampleRecord] = field(default_factory=dict)
    attributes: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    issues: list = field(default_factory=list)

    def add(self, record: SampleRecord) -> None:
        if record.id in self.samples:
            raise ManifestError(f"duplicate sample id {record.id!r}")
        self.samples[record.id] = record

    def get(self, sample_id: str) -> SampleRecord:
        try:
            return self.samples[sample_id]
        except KeyError:
            raise ManifestError(f"no sample with id {sample_id!r}") from None

    def by_status(self, status: str) -> list[SampleRecord]:
        return [r for _, r in sorted(self.samples.items()) if r.status == status]

    def status_counts(self) -> dict[str, int]:
        counts = {s: 0 for s in STATUSES}
        for r in self.samples.values():
            counts[r.status] += 1
        return counts

    def record_issue(self, stage: str, subject: str, message: str) -> None:
        self.issues.append({"stage": stage, "subject": subject, "message": message})

    def to_dict(self) -> dict:
        return {
            "format": MANIFEST_FORMAT,
            "version": self.version,
            "samples": [r.to_dict() for _, r in sorted(self.samples.items())],
            "attributes": self.attributes,
            "config": self.config,
            "issues": self.issues,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetManifest":
        if d.get("format") != MANIFEST_FORMAT:
            raise ManifestError(f"unrecognized manifest format {d.get('format')!r}")
        m = cls(
            version=int(d.get("version", 0)),
            attributes=d.get("attributes", {}),
            config=d.get("config", {}),
            issues=list(d.get("issues", [])),
        )
        for rec in d.get("samples", []):
            m.add(SampleRecord.from_dict(rec))
        return m

    def save(self, path) -> None:
        """Atomic write: serialize to a temp file, fsync, rename over."""
        path = Path(path)
        self.version += 1
        data = json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(data + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_dict(json.load(fh))
        except FileNotFoundError:
            raise
        except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
            raise ManifestError(f"cannot load manifest {path}: {exc}") from exc


class ManifestLock:
    """Exclusive advisory lock via an O_EXCL sidecar file holding the PID.

    A lock whose recorded process is gone counts as stale and is stolen.
    """

    def __init__(self, manifest_path):
        self.lock_path = Path(str(manifest_path) + ".lock")
        self._held = False

    def acquire(self) -> "ManifestLock":
        try:
            fd = os.open(self.lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            if self._stale():
                self.lock_path.unlink(missing_ok=True)
                return self.acquire()
            raise ManifestLockError(
                f"{self.lock_path} exists; another writer holds the manifest"
            ) from None
        with os.fdopen(fd, "w") as fh:
            fh.write(str(os.getpid()))
        self._held = True
        return self

    def _stale(self) -> bool:
        try:
            pid = int(self.lock_path.read_text().strip())
        except (OSError, ValueError):
            return False
        try:
            os.kill(pid, 0)
        except ProcessLookupError:
            return True
        except PermissionError:
            return False
        return False

    def release(self) -> None:
        if self._held:
            self.lock_path.unlink(missing_ok=True)
            self._held = False

    def __enter__(self) -> "ManifestLock":
        return self.acquire()

    def __exit__(self, *exc) -> None:
        self.release()
