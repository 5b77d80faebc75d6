"""Atomic multi-point queries on the Michael-Scott queue.

scan / peek_endpoints / ith each take one snapshot and resolve every link at
that cut, so their answers are states the queue actually passed through,
even while other threads keep enqueueing and dequeueing.
"""

import threading

from chronocas import MsQueue

q = MsQueue()
q.enqueue(3)
q.enqueue(10)

print("scan:", q.scan())
print("endpoints:", q.peek_endpoints())
print("2nd element:", q.ith(2), "| 5th element:", q.ith(5))

# The classic worked scenario: pin, snapshot, mutate, then read the cut.
guard = q.epoch.pin()
cut = q.epoch.snapshot(q.camera)
q.enqueue(10)
q.dequeue()
print("scan at the old cut:", q.scan(at=cut), "(the mutations came later)")
q.epoch.release_snapshot(cut)
q.epoch.unpin(guard)
print("scan now:           ", q.scan())

# Under contention every scan is still some real intermediate state.
stop = threading.Event()

def churn():
    k = 100
    while not stop.is_set():
        q.enqueue(k)
        q.dequeue()
        k += 1

t = threading.Thread(target=churn)
t.start()
lengths = {len(q.scan()) for _ in range(2000)}
stop.set()
t.join()
print("scan lengths observed while racing a churn thread:", sorted(lengths))
