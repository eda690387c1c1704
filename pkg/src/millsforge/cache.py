"""On-disk cache of chains and search frontiers.

File layout::

    MILLSFORGE v1
    record <key> sha256=<hex> lines=<n>
    <n payload lines>
    end

Writes go to a temporary file that replaces the original, under an
advisory lock on ``<path>.lock``.  A record whose checksum or line count
does not match refuses to load.
"""
from __future__ import annotations

import contextlib
import fcntl
import hashlib
import os
import tempfile
from dataclasses import dataclass

from .errors import IntegrityError

MAGIC = "MILLSFORGE v1"
VERSION = 1
ENV_VAR = "MILLSFORGE_CACHE"


@dataclass(frozen=True)
class CacheRecord:
    key: str
    payload: str
    version: int = VERSION

    @property
    def checksum(self) -> str:
        return hashlib.sha256(self.payload.encode()).hexdigest()


def default_path() -> str | None:
    return os.environ.get(ENV_VAR) or None


@contextlib.contextmanager
def _locked(path: str):
    with open(path + ".lock", "a") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def _parse(text: str) -> dict[str, CacheRecord]:
    lines = text.split("\n")
    if not lines or lines[0] != MAGIC:
        raise IntegrityError("not a cache file (bad header)")
    records = {}
    i = 1
    while i < len(lines):
        line = lines[i]
        if not line:
            i += 1
            continue
        parts = line.split(" ")
        if parts[0] != "record" or len(parts) < 4:
            raise IntegrityError(f"cache line {i + 1}: expected a record header")
        key = " ".join(parts[1:-2])
        try:
            digest = parts[-2].removeprefix("sha256=")
            count = int(parts[-1].removeprefix("lines="))
        except ValueError as exc:
            raise IntegrityError(f"cache line {i + 1}: bad record header") from exc
        body = lines[i + 1 : i + 1 + count]
        end = i + 1 + count
        if len(body) != count or end >= len(lines) or lines[end] != "end":
            raise IntegrityError(f"record {key!r} is truncated")
        record = CacheRecord(key, "\n".join(body) + "\n")
        if record.checksum != digest:
            raise IntegrityError(f"record {key!r} fails its checksum")
        records[key] = record
        i = end + 1
    return records


def _render(records: dict[str, CacheRecord]) -> str:
    out = [MAGIC]
    for key in sorted(records):
        rec = records[key]
        body = rec.payload.rstrip("\n").split("\n")
        out.append(f"record {key} sha256={rec.checksum} lines={len(body)}")
        out.extend(body)
        out.append("end")
    return "\n".join(out) + "\n"


def load_all(path: str) -> dict[str, CacheRecord]:
    if not os.path.exists(path):
        return {}
    with _locked(path), open(path) as fh:
        return _parse(fh.read())


def cache_load(path: str, key: str) -> CacheRecord | None:
    return load_all(path).get(key)


def cache_store(path: str, record: CacheRecord) -> None:
    if "\n" in record.key:
        raise ValueError("cache keys are single lines")
    # payloads are stored as whole lines
    record = CacheRecord(record.key, record.payload.rstrip("\n") + "\n", record.version)
    directory = os.path.dirname(os.path.abspath(path))
    with _locked(path):
        records = {}
        if os.path.exists(path):
            with open(path) as fh:
                records = _parse(fh.read())
        records[record.key] = record
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".millsforge-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(_render(records))
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except BaseException:
            with contextlib.suppress(FileNotFoundError):
                os.unlink(tmp)
            raise
