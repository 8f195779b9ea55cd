"""
Cache of Frobenius data per curve, persisted as a plain-text file.

File layout::

    # curve=y^2=1*x^3+1*x^1 g=1
    3,0,3
    5,-2,5

one ``p,c_{2g-1},...,c_0`` row per prime, sorted by p. Rows with a single
coefficient hold trace-only data.
"""

import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from .errors import InconsistencyError
from .lpoly import CurveSpec, FrobData, FrobTrace, frob_poly, frob_trace, parse_cache_row
from .monitoring import structured_log

logger = logging.getLogger(__name__)


def cache_header(curve: CurveSpec) -> str:
    """First line of a cache file: the canonical curve and its genus."""
    return f"# curve={curve.canonical()} g={curve.genus}"


class ApCache:
    """In-memory Frobenius cache for one curve, backed by a cache file."""

    def __init__(self, path: Union[str, Path], curve: CurveSpec):
        self.path = Path(path)
        self.curve = curve
        self._entries: Dict[int, FrobData] = {}
        self._dirty = False
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        lines = self.path.read_text().splitlines()
        if not lines or lines[0].strip() != cache_header(self.curve):
            found = lines[0] if lines else "<empty file>"
            raise InconsistencyError(
                f"cache {self.path} belongs to another curve: {found!r}"
            )
        for line in lines[1:]:
            if not line.strip():
                continue
            data = parse_cache_row(line, self.curve.genus)
            self._entries[data.p] = data
        structured_log("DEBUG", "cache loaded", path=str(self.path), entries=len(self._entries))

    def get(self, p: int) -> Optional[FrobData]:
        """Get cached data at p."""
        return self._entries.get(p)

    def set(self, data: FrobData) -> None:
        """Store data at its prime."""
        self._entries[data.p] = data
        self._dirty = True

    def delete(self, p: int) -> bool:
        """Drop the entry for p; True if one was present."""
        if p in self._entries:
            del self._entries[p]
            self._dirty = True
            return True
        return False

    def clear(self) -> None:
        self._entries.clear()
        self._dirty = True

    def primes(self) -> List[int]:
        """Cached primes in increasing order."""
        return sorted(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, p: int) -> bool:
        return p in self._entries

    def render(self) -> str:
        """Header plus one sorted row per prime."""
        rows = [cache_header(self.curve)]
        rows.extend(self._entries[p].cache_row() for p in self.primes())
        return "\n".join(rows) + "\n"

    def flush(self) -> Path:
        """Write the sorted cache file (atomic replace)."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".apcache-")
        try:
            with os.fdopen(fd, "w") as handle:
                handle.write(self.render())
            os.replace(tmp, self.path)
        except Exception:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self._dirty = False
        return self.path

    def verify_random(self, rng: np.random.Generator) -> Optional[int]:
        """Recompute one randomly chosen cached entry; returns its prime."""
        primes = self.primes()
        if not primes:
            return None
        p = primes[int(rng.integers(len(primes)))]
        cached = self._entries[p]
        fresh = frob_trace(self.curve, p) if isinstance(cached, FrobTrace) else frob_poly(self.curve, p)
        if fresh != cached:
            raise InconsistencyError(
                f"cached entry at p={p} ({cached.cache_row()}) does not match "
                f"recomputation ({fresh.cache_row()})"
            )
        structured_log("INFO", "cache entry verified", p=p)
        return p
