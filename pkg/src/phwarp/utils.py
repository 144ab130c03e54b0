"""Small helpers shared across modules."""
from __future__ import annotations

import os
import tempfile
from pathlib import Path


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` via a sibling temp file and ``os.replace``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def n_jobs_from_env(default: int = 1) -> int:
    """Worker count for matrix computations, read from ``PHWARP_THREADS``."""
    raw = os.environ.get("PHWARP_THREADS")
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError:
        return default
    return n if n != 0 else default
