"""Michael-Scott queue with atomic multi-point queries.

Head, tail, and per-node next links are versioned cells sharing one camera;
a query takes a snapshot handle and resolves every link it follows at that
cut.  Enqueues linearize at the tail swing (scheme L2), so queries read the
tail at the cut and never chase an unswung next link.  A node's next link is
successfully written at most once, which both keeps snapshot reads of next
links constant-time and allows the safe-field build (``versioned_next=
False``) to leave them unversioned without changing any query result.

Keys must not be None; None is the empty indication.
"""

from __future__ import annotations

from contextlib import contextmanager

from . import instrument, reclaim
from .atomic import PlainCell
from .camera import Camera
from .reclaim import EpochManager
from .vcas import VersionedCas


class QueueNode:
    __slots__ = ("key", "next", "_poisoned")

    def __init__(self, key) -> None:
        self.key = key
        self.next = None
        self._poisoned = False

    def _poison(self) -> None:
        self._poisoned = True
        self.key = reclaim._TRAP


class MsQueue:
    def __init__(self, camera: Camera | None = None,
                 epoch: EpochManager | None = None,
                 versioned_next: bool = True) -> None:
        self.camera = camera or Camera()
        self.epoch = epoch or EpochManager()
        self._versioned_next = versioned_next
        dummy = QueueNode(None)
        dummy.next = self._next_cell(None)
        self._head = VersionedCas(dummy, self.camera, self.epoch)
        self._tail = VersionedCas(dummy, self.camera, self.epoch)

    def _next_cell(self, value):
        if self._versioned_next:
            return VersionedCas(value, self.camera, self.epoch, max_success=1)
        return PlainCell(value, max_success=1)

    # -- updates ---------------------------------------------------------------

    def enqueue(self, key) -> None:
        node = QueueNode(key)
        node.next = self._next_cell(None)
        with self.epoch.maybe_pinned():
            while True:
                last = self._tail.read()
                nxt = last.next.read()
                if nxt is None:
                    if last.next.cas(None, node):
                        self._tail.cas(last, node)
                        return
                else:
                    self._tail.cas(last, nxt)   # help a lagging tail

    def dequeue(self):
        with self.epoch.maybe_pinned():
            while True:
                first = self._head.read()
                last = self._tail.read()
                nxt = first.next.read()
                if first is last:
                    if nxt is None:
                        return None
                    self._tail.cas(last, nxt)   # tail lags; head must not pass it
                else:
                    key = nxt.key
                    if self._head.cas(first, nxt):
                        self.epoch.retire(first)
                        if self._versioned_next:
                            first.next.retire_head()
                        return key

    # -- queries (each runs against one snapshot cut) ---------------------------

    @contextmanager
    def _query(self):
        with self.epoch.maybe_pinned():
            handle = self.epoch.snapshot(self.camera)
            try:
                yield handle
            finally:
                self.epoch.release_snapshot(handle)

    def peek_endpoints(self):
        with self._query() as h:
            head = self._head.read_snapshot(h)
            tail = self._tail.read_snapshot(h)
            if head is tail:
                return (None, None)
            first = head.next.read_snapshot(h)
            return (first.key, tail.key)

    def scan(self, at: int | None = None) -> list:
        """Full contents, head-to-tail order, at one cut.

        ``at`` replays an earlier handle; the caller must then hold the pin
        under which that handle was taken.
        """
        if at is not None:
            return self._scan_at(at)
        with self._query() as h:
            return self._scan_at(h)

    def _scan_at(self, h: int) -> list:
        out = []
        node = self._head.read_snapshot(h)
        last = self._tail.read_snapshot(h)
        while node is not last:
            if reclaim.POISON_ON:
                reclaim.check_live(node)
            node = node.next.read_snapshot(h)
            out.append(node.key)
        return out

    def ith(self, i: int):
        """The i-th element (1-based) from the head at the cut, else None."""
        if i < 1:
            raise ValueError("ith index is 1-based")
        with self._query() as h:
            node = self._head.read_snapshot(h)
            last = self._tail.read_snapshot(h)
            visits = 1
            for _ in range(i):
                if node is last:
                    return None
                node = node.next.read_snapshot(h)
                visits += 1
            if instrument.ENABLED and visits > i + 1:
                instrument.violation(f"queue ith({i}) visited {visits} nodes")
            return node.key

    # -- counters ---------------------------------------------------------------

    @property
    def dequeue_count(self) -> int:
        return self._head.succ_cas_count

    @property
    def enqueue_count(self) -> int:
        return self._tail.succ_cas_count
