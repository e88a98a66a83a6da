"""Thread pool for chunked evaluation, capped by ``NORMESH_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def workers() -> int:
    """``NORMESH_THREADS`` if set to a positive integer, else CPU count."""
    raw = os.environ.get("NORMESH_THREADS", "0").strip() or "0"
    try:
        k = int(raw)
    except ValueError:
        k = 0
    if k <= 0:
        k = os.cpu_count() or 1
    return k


def chunked_rows(fn, X: np.ndarray, chunk: int = 1 << 14) -> np.ndarray:
    """Apply ``fn`` to row blocks of ``X`` and stack the results in order."""
    n = len(X)
    starts = list(range(0, n, chunk))
    k = min(workers(), len(starts))
    if k <= 1:
        return np.concatenate([fn(X[s:s + chunk]) for s in starts]) if starts else fn(X)
    with ThreadPoolExecutor(max_workers=k) as pool:
        parts = list(pool.map(lambda s: fn(X[s:s + chunk]), starts))
    return np.concatenate(parts)
