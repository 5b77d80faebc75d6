"""Sequential specifications used as ground truth.

Three families: the versioned-cell spec (a committed-value log plus a
logical clock), a FIFO queue, and ordered sets (one flat, one mirroring the
leaf-oriented tree so shape-dependent queries like height are defined).
``replay`` folds ``step`` over a single-threaded history; the concurrent
suites diff structure outputs against these, so nothing here may import the
concurrent modules.

Snapshot handles follow the concrete counter behavior: every snapshot
returns the clock and bumps it, so replayed handles line up one-for-one with
the handles a real camera hands out in a single-threaded run.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field


class OracleError(ValueError):
    """History violates a precondition of the sequential specification."""


# ---------------------------------------------------------------------------
# Versioned cell + camera
# ---------------------------------------------------------------------------

@dataclass
class SeqVcas:
    """Append-only log of committed values with a logical clock."""

    committed_log: list = field(default_factory=list)   # (value, logical_time)
    clock: int = 0

    @classmethod
    def create(cls, initial, clock: int = 0) -> "SeqVcas":
        return cls(committed_log=[(initial, clock)], clock=clock)

    def step(self, op):
        kind = op[0]
        if kind == "vread":
            return self.committed_log[-1][0]
        if kind == "vcas":
            _, old, new = op
            cur = self.committed_log[-1][0]
            if cur != old:
                return False
            if new != old:
                self.committed_log.append((new, self.clock))
            return True
        if kind == "snapshot":
            handle = self.clock
            self.clock += 1
            return handle
        if kind == "readsnapshot":
            _, handle = op
            if not 0 <= handle < self.clock:
                raise OracleError(f"handle {handle} was never issued")
            for value, t in reversed(self.committed_log):
                if t <= handle:
                    return value
            raise OracleError(f"handle {handle} predates the cell")
        raise OracleError(f"unknown operation {kind!r}")


# ---------------------------------------------------------------------------
# FIFO queue
# ---------------------------------------------------------------------------

class SeqQueue:
    """FIFO with the multi-point queries; remembers states per handle."""

    def __init__(self) -> None:
        self.items: list = []
        self.clock = 0
        self._cuts: dict[int, tuple] = {}

    def step(self, op):
        kind = op[0]
        if kind == "enqueue":
            self.items.append(op[1])
            return None
        if kind == "dequeue":
            return self.items.pop(0) if self.items else None
        if kind == "snapshot":
            handle = self.clock
            self.clock += 1
            self._cuts[handle] = tuple(self.items)
            return handle
        if kind == "scan":
            at = op[1] if len(op) > 1 else None
            items = list(self._cuts[at]) if at is not None else list(self.items)
            return items
        if kind == "peek":
            items = self.items
            return (items[0], items[-1]) if items else (None, None)
        if kind == "ith":
            i = op[1]
            if i < 1:
                raise OracleError("ith index is 1-based")
            return self.items[i - 1] if i <= len(self.items) else None
        raise OracleError(f"unknown operation {kind!r}")


# ---------------------------------------------------------------------------
# Ordered set (flat view: Harris list)
# ---------------------------------------------------------------------------

class SeqOrderedSet:
    """Sorted-list set with the list-shaped multi-point queries."""

    def __init__(self) -> None:
        self.keys: list = []

    def step(self, op):
        kind = op[0]
        if kind == "insert":
            k = op[1]
            i = bisect.bisect_left(self.keys, k)
            if i < len(self.keys) and self.keys[i] == k:
                return False
            self.keys.insert(i, k)
            return True
        if kind == "delete":
            k = op[1]
            i = bisect.bisect_left(self.keys, k)
            if i < len(self.keys) and self.keys[i] == k:
                del self.keys[i]
                return True
            return False
        if kind == "contains":
            k = op[1]
            i = bisect.bisect_left(self.keys, k)
            return i < len(self.keys) and self.keys[i] == k
        if kind == "range":
            _, s, e = op
            if s > e:
                raise OracleError("empty-interval range")
            lo = bisect.bisect_left(self.keys, s)
            hi = bisect.bisect_right(self.keys, e)
            return self.keys[lo:hi]
        if kind == "multisearch":
            return {k: self.step(("contains", k)) for k in op[1]}
        if kind == "ith":
            i = op[1]
            if i < 1:
                raise OracleError("ith index is 1-based")
            return self.keys[i - 1] if i <= len(self.keys) else None
        raise OracleError(f"unknown operation {kind!r}")


# ---------------------------------------------------------------------------
# Leaf-oriented BST (shape-faithful mirror)
# ---------------------------------------------------------------------------

class _SeqLeaf:
    __slots__ = ("key",)

    def __init__(self, key):
        self.key = key


class _SeqInternal:
    __slots__ = ("key", "left", "right")

    def __init__(self, key, left, right):
        self.key = key
        self.left = left
        self.right = right


class SeqLeafBst:
    """Sequential leaf-oriented BST with the exact splice rules of the
    concurrent tree, so shape queries (height) are comparable."""

    def __init__(self, sentinel_lo, sentinel_hi) -> None:
        self._lo = sentinel_lo
        self._hi = sentinel_hi
        self.root = _SeqInternal(sentinel_hi, _SeqLeaf(sentinel_lo),
                                 _SeqLeaf(sentinel_hi))

    def _search(self, key):
        gp, p, l = None, self.root, None
        l = p.left if key < p.key else p.right
        while isinstance(l, _SeqInternal):
            gp, p = p, l
            l = p.left if key < p.key else p.right
        return gp, p, l

    def _is_real(self, leaf) -> bool:
        return leaf.key != self._lo and leaf.key != self._hi

    def step(self, op):
        kind = op[0]
        if kind == "insert":
            k = op[1]
            _, p, l = self._search(k)
            if l.key == k:
                return False
            new_leaf, sib = _SeqLeaf(k), _SeqLeaf(l.key)
            if k < l.key:
                ni = _SeqInternal(l.key, new_leaf, sib)
            else:
                ni = _SeqInternal(k, sib, new_leaf)
            if l.key < p.key:
                p.left = ni
            else:
                p.right = ni
            return True
        if kind == "delete":
            k = op[1]
            gp, p, l = self._search(k)
            if l.key != k:
                return False
            sibling = p.right if l.key < p.key else p.left
            if p.key < gp.key:
                gp.left = sibling
            else:
                gp.right = sibling
            return True
        if kind == "find":
            _, _, l = self._search(op[1])
            return l.key == op[1]
        if kind == "range":
            _, s, e = op
            if s > e:
                raise OracleError("empty-interval range")
            out = []
            self._collect(self.root, s, e, out)
            return out
        if kind == "range_sum":
            _, a, b = op
            if a > b:
                raise OracleError("empty-interval range")
            out = []
            self._collect(self.root, a, b, out)
            return sum(out)
        if kind == "succ":
            _, k, c = op
            if c < 1:
                raise OracleError("succ needs c >= 1")
            out = []
            self._succ(self.root, k, c, out)
            return out
        if kind == "findif":
            _, s, e, pred = op
            if s > e:
                raise OracleError("empty-interval range")
            return self._findif(self.root, s, e, pred)
        if kind == "multisearch":
            return {k: self.step(("find", k)) for k in op[1]}
        if kind == "height":
            best = self._depth(self.root, 0)
            return best - 1 if best else 0
        raise OracleError(f"unknown operation {kind!r}")

    def _collect(self, node, s, e, out):
        if isinstance(node, _SeqLeaf):
            if self._is_real(node) and s <= node.key <= e:
                out.append(node.key)
            return
        if s < node.key:
            self._collect(node.left, s, e, out)
        if e >= node.key:
            self._collect(node.right, s, e, out)

    def _succ(self, node, k, c, out):
        if len(out) >= c:
            return
        if isinstance(node, _SeqLeaf):
            if self._is_real(node) and node.key > k:
                out.append(node.key)
            return
        if k < node.key:
            self._succ(node.left, k, c, out)
        self._succ(node.right, k, c, out)

    def _findif(self, node, s, e, pred):
        if isinstance(node, _SeqLeaf):
            if self._is_real(node) and s <= node.key < e and pred(node.key):
                return node.key
            return None
        if s < node.key:
            hit = self._findif(node.left, s, e, pred)
            if hit is not None:
                return hit
        if e > node.key:
            return self._findif(node.right, s, e, pred)
        return None

    def _depth(self, node, d):
        if isinstance(node, _SeqLeaf):
            return d if self._is_real(node) else 0
        return max(self._depth(node.left, d + 1), self._depth(node.right, d + 1))


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------

def step(state, op):
    """One transition of whichever sequential spec ``state`` is."""
    return state.step(op)


def replay(state, history) -> list:
    """Fold ``step`` over a single-threaded history, returning all results."""
    return [state.step(op) for op in history]
