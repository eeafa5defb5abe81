"""Worker-count resolution for the optional thread parallelism."""

from __future__ import annotations

import os


def env_workers(default: int | None = None) -> int:
    """Worker cap from WB_WORKERS, else ``default``, else a small CPU-based cap."""
    raw = os.environ.get("WB_WORKERS")
    if raw is not None:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"WB_WORKERS must be a positive integer, got {raw!r}") from None
        if value < 1:
            raise ValueError(f"WB_WORKERS must be a positive integer, got {value}")
        return value
    if default is not None:
        return default
    return max(1, min(4, os.cpu_count() or 1))
