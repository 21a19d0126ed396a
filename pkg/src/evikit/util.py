"""Small shared helpers: worker caps, config hashing, text tables."""

from __future__ import annotations

import hashlib
import json
import os
from typing import Any, Mapping, Sequence

from .errors import ConfigError

THREADS_ENV = "EVIKIT_THREADS"


def worker_count() -> int:
    """Worker parallelism cap from EVIKIT_THREADS (default: min(8, cpu count))."""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
        if n < 1:
            raise ConfigError(f"{THREADS_ENV} must be >= 1, got {n}")
        return n
    return min(8, os.cpu_count() or 1)


def config_hash(config: Mapping[str, Any]) -> str:
    """Stable 12-hex digest of a flag mapping; paths and env must be excluded by the caller."""
    canon = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:12]


def format_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Plain aligned text table."""
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(cells: Sequence[str]) -> str:
        return "  ".join(c.ljust(widths[i]) for i, c in enumerate(cells)).rstrip()
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines)
