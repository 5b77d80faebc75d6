"""Harris sorted linked list with atomic range/multisearch/ith queries.

Each node's next field is one versioned cell holding a (link, marked) pair;
marking a node is a versioned CAS from (link, False) to (link, True), so the
history can reconstruct logical-deletion timing.  A deletion linearizes at
the marking CAS; queries resolve every next field at their snapshot cut and
skip any node whose own next is marked at that cut, even if the physical
unlink happened later.

Sentinel nodes bound the list below and above every key; they are never
marked or removed.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager

from . import instrument, reclaim
from .camera import Camera
from .reclaim import EpochManager
from .vcas import VersionedCas


class _Bound:
    """Key strictly below (sign -1) or above (sign +1) every user key."""

    __slots__ = ("_sign",)

    def __init__(self, sign: int) -> None:
        self._sign = sign

    def __lt__(self, other):
        return self is not other and self._sign < 0
    def __gt__(self, other):
        return self is not other and self._sign > 0
    def __le__(self, other):
        return self is other or self._sign < 0
    def __ge__(self, other):
        return self is other or self._sign > 0
    def __repr__(self):
        return "-inf" if self._sign < 0 else "+inf"


NEG_INF = _Bound(-1)
POS_INF = _Bound(+1)


class ListNode:
    __slots__ = ("key", "next", "_poisoned")

    def __init__(self, key) -> None:
        self.key = key
        self.next = None
        self._poisoned = False

    def _poison(self) -> None:
        self._poisoned = True
        self.key = reclaim._TRAP


class HarrisList:
    def __init__(self, camera: Camera | None = None,
                 epoch: EpochManager | None = None) -> None:
        self.camera = camera or Camera()
        self.epoch = epoch or EpochManager()
        self.tail = ListNode(POS_INF)
        self.tail.next = VersionedCas((None, False), self.camera, self.epoch)
        self.head = ListNode(NEG_INF)
        self.head.next = VersionedCas((self.tail, False), self.camera, self.epoch)
        self._count_lock = threading.Lock()
        self.insert_count = 0
        self.delete_count = 0

    # -- internal search with physical cleanup ----------------------------------

    def _find(self, key):
        """Returns (pred, curr): curr is the first unmarked node with
        key >= search key; unlinks marked runs it passes."""
        while True:
            pred = self.head
            curr = pred.next.read()[0]
            restart = False
            while True:
                if reclaim.POISON_ON:
                    reclaim.check_live(curr)
                succ, cmark = curr.next.read()
                if cmark:
                    if not pred.next.cas((curr, False), (succ, False)):
                        restart = True
                        break
                    self._retire_node(curr)
                    curr = succ
                else:
                    if curr.key >= key:
                        return pred, curr
                    pred, curr = curr, succ
            if restart:
                continue

    def _retire_node(self, node: ListNode) -> None:
        self.epoch.retire(node)
        node.next.retire_head()

    def _bump(self, which: str) -> None:
        with self._count_lock:
            if which == "ins":
                self.insert_count += 1
            else:
                self.delete_count += 1

    # -- updates -----------------------------------------------------------------

    def insert(self, key) -> bool:
        with self.epoch.maybe_pinned():
            while True:
                pred, curr = self._find(key)
                if curr.key == key:
                    return False
                node = ListNode(key)
                node.next = VersionedCas((curr, False), self.camera, self.epoch)
                if pred.next.cas((curr, False), (node, False)):
                    self._bump("ins")
                    return True

    def delete(self, key) -> bool:
        with self.epoch.maybe_pinned():
            while True:
                pred, curr = self._find(key)
                if curr.key != key:
                    return False
                succ, marked = curr.next.read()
                if marked:
                    continue
                if curr.next.cas((succ, False), (succ, True)):
                    self._bump("del")
                    if pred.next.cas((curr, False), (succ, False)):
                        self._retire_node(curr)
                    else:
                        self._find(key)   # leave cleanup to a fresh search
                    return True

    def contains(self, key) -> bool:
        with self.epoch.maybe_pinned():
            curr = self.head.next.read()[0]
            while curr.key < key:
                if reclaim.POISON_ON:
                    reclaim.check_live(curr)
                curr = curr.next.read()[0]
            if curr.key != key:
                return False
            return not curr.next.read()[1]

    # -- snapshot queries ----------------------------------------------------------

    def get_next(self, node: ListNode, handle: int):
        """First successor of ``node`` at the cut whose own next is unmarked;
        skips logically deleted nodes.  Returns None past the high sentinel."""
        n = node.next.read_snapshot(handle)[0]
        skips = 0
        while n is not None:
            if reclaim.POISON_ON:
                reclaim.check_live(n)
            link, marked = n.next.read_snapshot(handle)
            if not marked:
                break
            n = link
            skips += 1
        if instrument.ENABLED and skips:
            bound = threading.active_count() + 2 * self._update_count() + 2
            if skips > bound:
                instrument.violation(f"list query skipped {skips} marked nodes")
        return n

    def _update_count(self) -> int:
        with self._count_lock:
            return self.insert_count + self.delete_count

    @contextmanager
    def _query(self):
        with self.epoch.maybe_pinned():
            handle = self.epoch.snapshot(self.camera)
            try:
                yield handle
            finally:
                self.epoch.release_snapshot(handle)

    def range_query(self, start, end) -> list:
        if start > end:
            raise ValueError("range start exceeds end")
        with self._query() as h:
            out = []
            node = self.get_next(self.head, h)
            while node is not self.tail and node.key <= end:
                if node.key >= start:
                    out.append(node.key)
                node = self.get_next(node, h)
            return out

    def multisearch(self, keys) -> dict:
        targets = sorted(set(keys))
        with self._query() as h:
            found = {k: False for k in targets}
            i = 0
            node = self.get_next(self.head, h)
            while node is not self.tail and i < len(targets):
                while i < len(targets) and targets[i] < node.key:
                    i += 1
                if i < len(targets) and targets[i] == node.key:
                    found[targets[i]] = True
                    i += 1
                node = self.get_next(node, h)
            return found

    def ith(self, i: int):
        if i < 1:
            raise ValueError("ith index is 1-based")
        with self._query() as h:
            node = self.get_next(self.head, h)
            seen = 0
            while node is not self.tail:
                seen += 1
                if seen == i:
                    return node.key
                node = self.get_next(node, h)
            return None
