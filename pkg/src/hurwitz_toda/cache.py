"""In-process memo tables with an optional content-addressed disk store.

Entries are files named by the SHA-256 of ``(operation, canonical args)``.
Each file stores its payload next to a checksum of that payload; a missing,
unreadable or mismatching file is treated as a miss and recomputed.
"""

from __future__ import annotations

import functools
import hashlib
import json
import logging
import os
import tempfile
import threading
from pathlib import Path
from typing import Any, Callable

log = logging.getLogger(__name__)

_store: "DiskCache | None" = None
_memos: list[dict] = []
_lock = threading.Lock()


class DiskCache:
    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(operation: str, args: Any) -> str:
        canon = json.dumps([operation, args], sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def _path(self, key: str) -> Path:
        return self.directory / key[:2] / f"{key}.json"

    def get(self, operation: str, args: Any) -> Any:
        path = self._path(self.key(operation, args))
        try:
            record = json.loads(path.read_text())
            payload = json.dumps(record["payload"], sort_keys=True, separators=(",", ":"))
            if hashlib.sha256(payload.encode()).hexdigest() != record["checksum"]:
                raise ValueError("checksum mismatch")
        except FileNotFoundError:
            self.misses += 1
            return None
        except (OSError, ValueError, KeyError, TypeError) as exc:
            log.warning("discarding corrupt cache entry %s: %s", path.name, exc)
            self.misses += 1
            return None
        self.hits += 1
        return record["payload"]

    def put(self, operation: str, args: Any, payload: Any) -> None:
        path = self._path(self.key(operation, args))
        path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        record = {
            "operation": operation,
            "args": args,
            "checksum": hashlib.sha256(text.encode()).hexdigest(),
            "payload": payload,
        }
        # write-then-rename so concurrent readers never see a partial file
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(record, fh, sort_keys=True)
        os.replace(tmp, path)


def set_store(store: DiskCache | None) -> None:
    global _store
    _store = store


def get_store() -> DiskCache | None:
    return _store


def clear_memory() -> None:
    """Drop every in-process memo table (the disk store is untouched)."""
    with _lock:
        for table in _memos:
            table.clear()


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, tuple):
        return [_jsonable(x) for x in obj]
    return obj


def memoize(
    operation: str,
    encode: Callable[[Any], Any] = lambda v: v,
    decode: Callable[[Any], Any] = lambda v: v,
):
    """Memoize a pure function of hashable, JSON-friendly arguments.

    Lookups go to the in-process table first, then to the active disk store
    (if any); fresh results are written to both.
    """

    def wrap(fn):
        table: dict = {}
        _memos.append(table)

        @functools.wraps(fn)
        def inner(*args):
            try:
                return table[args]
            except KeyError:
                pass
            store = _store
            value = None
            if store is not None:
                payload = store.get(operation, _jsonable(args))
                if payload is not None:
                    value = decode(payload)
            if value is None:
                value = fn(*args)
                if store is not None:
                    store.put(operation, _jsonable(args), encode(value))
            with _lock:
                table[args] = value
            return value

        inner.cache_table = table
        return inner

    return wrap
