"""File-backed cache for sweep cells.

Provides `get_cached` and `set_cached`. Entries are stored under
`config.CACHE_DIR` as JSON files named by SHA256(key). TTL support is
available via an `expires_at` timestamp in the stored object. Sweep cells
are keyed by `cell_key`, the canonical JSON of the cell parameters plus
the tolerances that produced the result.
"""
from typing import Any, Dict, Optional
import hashlib
import json
import logging
import os
import time

from . import config

logger = logging.getLogger(__name__)

CACHE_VERSION = 1


def cache_dir() -> str:
    path = config.CACHE_DIR
    os.makedirs(path, exist_ok=True)
    return path


def cell_key(cell: Dict[str, Any]) -> str:
    payload = {"version": CACHE_VERSION, "cell": cell, "tolerances": {
        "ko_tol": config.KO_TOL,
        "bracket_tol": config.BRACKET_TOL,
        "ivp_rel_tol": config.IVP_REL_TOL,
        "threshold": config.BLOWUP_THRESHOLD,
    }}
    return json.dumps(payload, sort_keys=True)


def _key_to_path(key: str) -> str:
    h = hashlib.sha256(key.encode("utf-8")).hexdigest()
    return os.path.join(cache_dir(), f"{h}.json")


def get_cached(key: str) -> Optional[Any]:
    path = _key_to_path(key)
    if not os.path.exists(path):
        return None
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except (OSError, ValueError):
        logger.warning("Failed to read cache file %s; recomputing", path)
        return None
    expires_at = payload.get("expires_at")
    if expires_at and time.time() > expires_at:
        try:
            os.remove(path)
        except OSError:
            logger.exception("Failed to remove expired cache file %s", path)
        return None
    return payload.get("value")


def set_cached(key: str, value: Any, ttl_seconds: Optional[int] = None) -> None:
    path = _key_to_path(key)
    payload: Dict[str, Any] = {"key": key, "value": value}
    if ttl_seconds is not None:
        payload["expires_at"] = time.time() + ttl_seconds
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(payload, f, ensure_ascii=False)
        os.replace(tmp, path)
    except OSError:
        # a cache miss next time is the only consequence
        logger.exception("Failed to write cache file %s", path)


def purge_cache(older_than_seconds: int = 60 * 60 * 24 * 7) -> int:
    """Remove cache files older than `older_than_seconds`.

    Returns the number of files removed.
    """
    removed = 0
    directory = cache_dir()
    now = time.time()
    for fname in os.listdir(directory):
        if fname == "last_cleanup.json":
            continue
        path = os.path.join(directory, fname)
        try:
            if now - os.path.getmtime(path) > older_than_seconds:
                os.remove(path)
                removed += 1
        except OSError:
            logger.exception("Failed to inspect/remove cache file %s", path)
    set_last_cleanup(now)
    logger.info("purged %d cache entries from %s", removed, directory)
    return removed


def get_last_cleanup() -> float:
    """Return the timestamp (epoch) of the last cleanup, or 0 if none."""
    p = os.path.join(cache_dir(), "last_cleanup.json")
    try:
        if os.path.exists(p):
            with open(p, "r", encoding="utf-8") as f:
                return float(json.load(f).get("last", 0))
    except (OSError, ValueError):
        logger.warning("unreadable cleanup marker %s", p)
    return 0.0


def set_last_cleanup(ts: float) -> None:
    p = os.path.join(cache_dir(), "last_cleanup.json")
    try:
        with open(p, "w", encoding="utf-8") as f:
            json.dump({"last": ts}, f)
    except OSError:
        logger.exception("Failed to write cleanup marker %s", p)
