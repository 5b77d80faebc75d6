import pytest

from chronocas import (Camera, DirectVersionedCas, INVALID_NEXTV,
                       RecordedOnceError, Versionable, VersionedCas)
from chronocas.lincheck import Recorder, explore
from chronocas.oracle import SeqVcas


class Node(Versionable):
    __slots__ = ("payload",)

    def __init__(self, payload):
        super().__init__()
        self.payload = payload

    def __repr__(self):
        return f"Node({self.payload})"


def test_nil_initial():
    cell = DirectVersionedCas(None, Camera())
    assert cell.read() is None


def test_node_initial_normalized():
    cam = Camera()
    a = Node("a")
    cell = DirectVersionedCas(a, cam)
    assert a.ts == 0
    assert a.nextv is None
    assert cell.read() is a


def test_shared_initial_node_lists_stay_disjoint():
    cam = Camera()
    a = Node("a")
    c1 = DirectVersionedCas(a, cam)
    c2 = DirectVersionedCas(a, cam)
    h = cam.take_snapshot()
    b, c = Node("b"), Node("c")
    assert c1.cas(a, b)
    assert c2.cas(a, c)
    # both histories bottom out at a without touching a.nextv
    assert c1.read_snapshot(h) is a
    assert c2.read_snapshot(h) is a
    assert c1.read() is b and c2.read() is c


def test_init_nextv_examples():
    cam = Camera()
    n = Node(1)
    cell = DirectVersionedCas(None, cam)
    assert n.nextv is INVALID_NEXTV
    cell.init_nextv(n)
    assert n.nextv is None
    cell.init_nextv(n)   # already concrete: unchanged
    assert n.nextv is None


def test_cas_from_nil():
    cam = Camera()
    cell = DirectVersionedCas(None, cam)
    a = Node("a")
    assert cell.cas(None, a) is True
    assert cell.read() is a


def test_snapshot_before_swap():
    cam = Camera()
    a = Node("a")
    cell = DirectVersionedCas(a, cam)
    h = cam.take_snapshot()
    b = Node("b")
    assert cell.cas(a, b)
    assert cell.read_snapshot(h) is a
    assert cell.read() is b


def test_nil_at_cut_reads_nil():
    cam = Camera()
    cell = DirectVersionedCas(None, cam)
    h = cam.take_snapshot()
    a = Node("a")
    assert cell.cas(None, a)
    assert cell.read_snapshot(h) is None


def test_stale_old_value_fails():
    cam = Camera()
    a = Node("a")
    cell = DirectVersionedCas(a, cam)
    b, c = Node("b"), Node("c")
    assert cell.cas(a, b) is True
    assert cell.cas(a, c) is False


def test_recorded_once_violation_detected():
    cam = Camera()
    c1 = DirectVersionedCas(None, cam)
    c2 = DirectVersionedCas(None, cam)
    a = Node("a")
    assert c1.cas(None, a)
    with pytest.raises(RecordedOnceError):
        c2.cas(None, a)


def test_oracle_equivalence_single_thread():
    """A recorded-once single-thread history gives identical results on the
    direct cell, the indirect cell, and the sequential oracle."""
    import random
    rng = random.Random(99)
    cam_d, cam_i = Camera(), Camera()
    first = Node(0)
    direct = DirectVersionedCas(first, cam_d)
    indirect = VersionedCas(first, cam_i)
    ref = SeqVcas.create(first, clock=0)
    handles = []
    cur = first
    for i in range(1, 400):
        roll = rng.random()
        if roll < 0.4:
            nxt = Node(i)
            got_d = direct.cas(cur, nxt)
            got_i = indirect.cas(cur, nxt)
            want = ref.step(("vcas", cur, nxt))
            assert got_d == got_i == want
            cur = nxt
        elif roll < 0.6:
            hd, hi = cam_d.take_snapshot(), cam_i.take_snapshot()
            want = ref.step(("snapshot",))
            assert hd == hi == want
            handles.append(want)
        elif roll < 0.8 and handles:
            h = rng.choice(handles)
            want = ref.step(("readsnapshot", h))
            assert direct.read_snapshot(h) is want
            assert indirect.read_snapshot(h) is want
        else:
            want = ref.step(("vread",))
            assert direct.read() is want
            assert indirect.read() is want


def test_distinct_values_across_history():
    cam = Camera()
    cell = DirectVersionedCas(None, cam)
    seen = set()
    cur = None
    for i in range(50):
        n = Node(i)
        assert cell.cas(cur, n)
        assert id(n) not in seen
        seen.add(id(n))
        cur = n


def test_racing_init_nextv_vs_publication():
    """The normalization CAS and the publication CAS race to a single
    outcome: nextv ends up nil or the intended older link, never the
    invalid marker."""
    def make():
        cam = Camera()
        a = Node("a")
        cell = DirectVersionedCas(a, cam)
        b = Node("b")
        rec = Recorder()

        def publisher():
            rec.run(0, "cas", ("a", "b"), lambda: cell.cas(a, b))

        def normalizer():
            rec.run(1, "initnextv", (), lambda: cell.init_nextv(b))

        def finish():
            link = "nil" if b.nextv is None else getattr(b.nextv, "payload", "?")
            return link, cell.read().payload
        return [publisher, normalizer], finish

    res = explore(make)
    assert res.complete
    for link, head in res.histories:
        assert link in ("nil", "a")   # never the invalid marker
        assert head == "b"
