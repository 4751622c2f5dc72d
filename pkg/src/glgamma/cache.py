"""Deterministic JSON cache with schema versioning and content hashes.

Entries are single JSON files {schema, key, hash, payload} written
atomically (temp file in the target directory, then rename).  A load
returns the payload only when the schema version matches and the
payload's content hash verifies; a corrupted entry is a miss with a
warning, a version mismatch is a silent miss.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import warnings
from pathlib import Path

import numpy as np

from .characters import Cusp2Datum, Datum, GL1Datum
from .glclasses import get_group
from .whittaker import special_value_profile

SCHEMA_VERSION = "1"


# ---------------------------------------------------------------------------
# storage primitives
# ---------------------------------------------------------------------------

def default_cache_dir() -> Path:
    env = os.environ.get("GLGAMMA_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "glgamma"


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def content_hash(payload) -> str:
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


def cache_path(cache_dir: Path | str, key: str) -> Path:
    return Path(cache_dir) / f"{key}.json"


def cache_store(cache_dir: Path | str, key: str, payload) -> Path:
    """Write {schema, key, hash, payload} atomically; return the path."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    entry = {"schema": SCHEMA_VERSION, "key": key,
             "hash": content_hash(payload), "payload": payload}
    target = cache_path(cache_dir, key)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            json.dump(entry, handle, sort_keys=True, indent=1)
            handle.write("\n")
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def cache_load(cache_dir: Path | str, key: str):
    """Payload for the key, or None on miss/version-mismatch/corruption."""
    target = cache_path(cache_dir, key)
    if not target.exists():
        return None
    try:
        entry = json.loads(target.read_text())
    except (OSError, json.JSONDecodeError):
        warnings.warn(f"cache entry {target} is unreadable; ignoring")
        return None
    if entry.get("schema") != SCHEMA_VERSION:
        return None
    payload = entry.get("payload")
    if content_hash(payload) != entry.get("hash"):
        warnings.warn(f"cache entry {target} failed its content hash; "
                      "ignoring")
        return None
    return payload


def cache_entries(cache_dir: Path | str) -> list[str]:
    cache_dir = Path(cache_dir)
    if not cache_dir.is_dir():
        return []
    return sorted(p.stem for p in cache_dir.glob("*.json"))


def cache_clear(cache_dir: Path | str) -> int:
    cache_dir = Path(cache_dir)
    count = 0
    if cache_dir.is_dir():
        for p in cache_dir.glob("*.json"):
            p.unlink()
            count += 1
    return count


# ---------------------------------------------------------------------------
# payload builders
# ---------------------------------------------------------------------------

def _json_label(label):
    """Nested class-label tuples as JSON-native nested lists."""
    if isinstance(label, tuple):
        return [_json_label(x) for x in label]
    return label


def format_datum(d: Datum) -> str:
    if isinstance(d, GL1Datum):
        return f"gl1:{d.a}"
    assert isinstance(d, Cusp2Datum)
    return f"cusp2:{d.t}"


def format_data(data: tuple[Datum, ...]) -> str:
    return "+".join(format_datum(d) for d in data)


def group_key(q: int, n: int) -> str:
    return f"group-q{q}-n{n}"


def group_payload(q: int, n: int) -> dict:
    """Class list of GL_n(F_q) in canonical order."""
    ctx = get_group(q, n)
    return {"q": q, "n": n, "order": ctx.order,
            "classes": [{"label": _json_label(info.label),
                         "size": info.size,
                         "rep": np.asarray(info.rep).tolist()}
                        for info in ctx.classes]}


def profile_key(q: int, tau: tuple[Datum, ...], c: int, t: int) -> str:
    return f"profile-q{q}-tau{format_data(tau).replace(':', '_')}-c{c}-t{t}"


def profile_payload(q: int, tau: tuple[Datum, ...], c: int,
                    t: int = 1) -> dict:
    """Special-value profile of (tau, c), exact values per class."""
    prof = special_value_profile(q, tau, c, t)
    ctx = get_group(q, c)
    return {"q": q, "tau": format_data(tau), "c": c, "t": t,
            "values": [{"label": _json_label(info.label),
                        "value": val.serialize()}
                       for info, val in zip(ctx.classes, prof.values)]}
