import uuid
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Dict, List, Optional, Tuple


@dataclass(frozen=True)
class CacheEntry:
    """Where and when the primary invocation of a signature finished."""
    task_id: str
    node_id: str
    outputs: Tuple[str, ...]
    end_s: float


class InvocationCache:
    """
    Run-scoped memoization of deterministic task invocations.

    A signature is in flight from the moment its first instance is queued until
    that instance publishes its outputs. Later instances of an in-flight
    signature are parked and released as hits when the primary completes.
    """

    def __init__(self):
        """Initialize an empty cache."""
        self.entries: Dict[str, CacheEntry] = {}
        self.in_flight: Dict[str, str] = {}
        self.parked: Dict[str, List[str]] = {}
        self.hits = 0
        self.misses = 0
        self.session_id = str(uuid.uuid4())
        self.created_at = datetime.now()

    def get(self, key: str) -> Optional[CacheEntry]:
        """
        Completed entry for a signature.

        Args:
            key: Invocation signature

        Returns:
            CacheEntry or None if the signature has not completed
        """
        return self.entries.get(key)

    def has(self, key: str) -> bool:
        return key in self.entries

    def is_in_flight(self, key: str) -> bool:
        return key in self.in_flight

    def begin(self, key: str, task_id: str) -> None:
        """Mark ``task_id`` as the instance that will execute ``key``."""
        self.in_flight[key] = task_id
        self.misses += 1

    def park(self, key: str, task_id: str) -> None:
        self.parked.setdefault(key, []).append(task_id)

    def record_hit(self) -> None:
        self.hits += 1

    def set(self, key: str, entry: CacheEntry) -> List[str]:
        """
        Store the primary's result and release its parked duplicates.

        Returns:
            Ids of the parked tasks, in parking order
        """
        self.entries[key] = entry
        self.in_flight.pop(key, None)
        return self.parked.pop(key, [])

    def clear(self):
        """Clear all cached results."""
        self.entries.clear()
        self.in_flight.clear()
        self.parked.clear()
        self.hits = self.misses = 0
        self.session_id = str(uuid.uuid4())
        self.created_at = datetime.now()

    def get_stats(self) -> Dict[str, Any]:
        """Get cache statistics."""
        return {
            "session_id": self.session_id,
            "created_at": self.created_at.isoformat(),
            "cache_size": len(self.entries),
            "hits": self.hits,
            "misses": self.misses,
            "in_flight": len(self.in_flight),
            "parked": sum(len(waiting) for waiting in self.parked.values()),
        }
