"""
Cache Manager: namespaced LRU memo caches with hit/miss statistics.
"""

import threading
from typing import Any, Callable, Dict, Hashable

from cachetools import LRUCache

_MISSING = object()


class CacheManager:
    """
    In-memory caches:
    - one LRU cache per namespace (rewrite, normalize, bubbles, action, hecke, qgln)
    - hit/miss counters per namespace
    - thread-safe get-or-compute
    """

    def __init__(self, maxsize: int = 200_000):
        """
        Args:
            maxsize: capacity of each namespace cache
        """
        self.maxsize = maxsize
        self._caches: Dict[str, LRUCache] = {}
        self._stats: Dict[str, Dict[str, int]] = {}
        self._lock = threading.RLock()

    # --- Namespaces ---

    def namespace(self, name: str) -> LRUCache:
        with self._lock:
            if name not in self._caches:
                self._caches[name] = LRUCache(maxsize=self.maxsize)
                self._stats[name] = {"hits": 0, "misses": 0}
            return self._caches[name]

    # --- Lookup ---

    def get(self, name: str, key: Hashable) -> Any:
        cache = self.namespace(name)
        with self._lock:
            value = cache.get(key, _MISSING)
            if value is _MISSING:
                self._stats[name]["misses"] += 1
                return None
            self._stats[name]["hits"] += 1
            return value

    def put(self, name: str, key: Hashable, value: Any) -> None:
        cache = self.namespace(name)
        with self._lock:
            cache[key] = value

    def get_or_compute(self, name: str, key: Hashable, compute: Callable[[], Any]) -> Any:
        """
        Return the cached value for key, computing and storing it on a miss.
        The computation runs outside the lock; recursive computations are allowed.
        """
        cache = self.namespace(name)
        with self._lock:
            value = cache.get(key, _MISSING)
            if value is not _MISSING:
                self._stats[name]["hits"] += 1
                return value
            self._stats[name]["misses"] += 1
        value = compute()
        with self._lock:
            cache[key] = value
        return value

    # --- Maintenance ---

    def clear(self, name: str = "") -> None:
        with self._lock:
            names = [name] if name else list(self._caches)
            for n in names:
                if n in self._caches:
                    self._caches[n].clear()
                    self._stats[n] = {"hits": 0, "misses": 0}

    def get_stats(self) -> Dict[str, Dict[str, int]]:
        with self._lock:
            return {
                name: {**stats, "size": len(self._caches[name])}
                for name, stats in self._stats.items()
            }


cache_manager = CacheManager()
