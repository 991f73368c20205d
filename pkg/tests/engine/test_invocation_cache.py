"""
Tests for engine/invocation_cache.py - Run-scoped invocation cache
"""
import pytest

from wes_sim.engine.invocation_cache import CacheEntry, InvocationCache


class TestInvocationCache:
    """Test InvocationCache class"""

    @pytest.fixture
    def cache(self):
        """Create cache instance"""
        return InvocationCache()

    @pytest.fixture
    def entry(self):
        return CacheEntry("1-align/p01/control", "yc-01", ("p01/control.bam",), 120.0)

    def test_cache_initialization(self, cache):
        """Test cache initializes correctly"""
        assert cache.entries == {}
        assert cache.session_id is not None
        assert cache.created_at is not None

    def test_set_and_get(self, cache, entry):
        """Test storing and reading a completed invocation"""
        cache.begin("sig", entry.task_id)
        cache.set("sig", entry)

        assert cache.get("sig") == entry
        assert cache.has("sig") is True
        assert cache.is_in_flight("sig") is False

    def test_get_nonexistent(self, cache):
        """Test getting nonexistent cache entry"""
        assert cache.get("missing") is None
        assert cache.has("missing") is False

    def test_parked_duplicates_released_in_order(self, cache, entry):
        """Test duplicates wait for the primary and come back in parking order"""
        cache.begin("sig", entry.task_id)
        cache.park("sig", "1-align/p02/control")
        cache.park("sig", "1-align/p03/control")

        assert cache.is_in_flight("sig") is True
        assert cache.set("sig", entry) == ["1-align/p02/control", "1-align/p03/control"]
        assert cache.set("other", entry) == []

    def test_clear(self, cache, entry):
        """Test clearing cache"""
        cache.begin("sig", entry.task_id)
        cache.set("sig", entry)
        old_session = cache.session_id

        cache.clear()

        assert len(cache.entries) == 0
        assert cache.session_id != old_session

    def test_get_stats(self, cache, entry):
        """Test cache statistics"""
        cache.begin("sig", entry.task_id)
        cache.park("sig", "dup")
        cache.record_hit()

        stats = cache.get_stats()

        assert stats["misses"] == 1
        assert stats["hits"] == 1
        assert stats["in_flight"] == 1
        assert stats["parked"] == 1
        assert stats["cache_size"] == 0
        assert "session_id" in stats
