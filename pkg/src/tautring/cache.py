"""Content-addressed on-disk cache for computed basis data.

Entries are keyed by a hash of a canonical-JSON key document (presentation
content hash, degree, engine version, ...), so any change to a presentation
or to the engine's column conventions silently misses instead of serving
stale rows.  Writes go through a temporary file and an atomic rename; reads
verify an embedded payload digest and treat any mismatch as a miss, deleting
the corrupt file so the caller recomputes.
"""

import hashlib
import json
import os
import tempfile

from .algebra import canonical_json

#: echelon data is stored only for bases with at most this many rows;
#: larger degrees cache their dimensions and pivot columns only.
ECHELON_ROW_LIMIT_DEFAULT = 20_000

_SCHEMA = "tautring-cache-1"


def _digest(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class CacheStore:
    """A directory of content-addressed JSON entries."""

    def __init__(self, directory, echelon_row_limit=ECHELON_ROW_LIMIT_DEFAULT):
        self.directory = os.path.abspath(directory)
        self.echelon_row_limit = echelon_row_limit
        os.makedirs(self.directory, exist_ok=True)

    def _path_for(self, key):
        return os.path.join(self.directory, _digest(canonical_json(key)) + ".json")

    def get(self, key):
        """The payload stored under ``key``, or None on miss/corruption."""
        path = self._path_for(key)
        try:
            with open(path, "r", encoding="utf-8") as handle:
                body = json.load(handle)
        except (OSError, ValueError):
            return None
        try:
            ok = (
                body["schema"] == _SCHEMA
                and body["digest"] == _digest(canonical_json(body["payload"]))
            )
        except (KeyError, TypeError):
            ok = False
        if not ok:
            try:
                os.unlink(path)
            except OSError:
                pass
            return None
        return body["payload"]

    def put(self, key, payload):
        """Store ``payload`` under ``key`` atomically (temp file + rename)."""
        body = {
            "schema": _SCHEMA,
            "key": key,
            "payload": payload,
            "digest": _digest(canonical_json(payload)),
        }
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                json.dump(body, handle, sort_keys=True, separators=(",", ":"))
            os.replace(tmp, self._path_for(key))
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def entries(self):
        """[(content hash, size in bytes)] for every entry, sorted."""
        out = []
        try:
            names = os.listdir(self.directory)
        except OSError:
            return out
        for name in sorted(names):
            if not name.endswith(".json"):
                continue
            path = os.path.join(self.directory, name)
            try:
                size = os.stat(path).st_size
            except OSError:
                continue
            out.append((name[: -len(".json")], size))
        return out

    def stats(self):
        entries = self.entries()
        return {
            "directory": self.directory,
            "entry_count": len(entries),
            "total_bytes": sum(size for _, size in entries),
            "entries": [
                {"content_hash": h, "bytes": size} for h, size in entries
            ],
        }

    def clear(self):
        """Remove every entry; returns the number removed."""
        removed = 0
        for content_hash, _ in self.entries():
            path = os.path.join(self.directory, content_hash + ".json")
            try:
                os.unlink(path)
                removed += 1
            except OSError:
                pass
        return removed
