"""Shared-memory access gate.

Every algorithm-relevant shared access (reads and CAS attempts on mutable
cells) funnels through :func:`step` before it executes.  In normal use the
gate is a near-free branch.  Two hooks can be armed:

* a cooperative step controller (installed by ``lincheck.explore``), which
  suspends the calling worker thread until the scheduler grants it the next
  step, serializing shared accesses in a chosen order;
* a step counter, used by structural tests that assert constant step bounds.

Immutable fields (a version node's value and older-version link, node keys)
are read without gating: once published they never change, so their reads
commute with every schedule.
"""

from __future__ import annotations

import threading

_controller = None  # set by lincheck.explore for the duration of one run
_counter = None     # set by tests that count shared accesses single-threaded


def step() -> None:
    """Mark one shared-memory access."""
    c = _controller
    if c is not None:
        c.on_access(threading.current_thread())
    k = _counter
    if k is not None:
        k.count += 1


class StepCounter:
    """Counts gated accesses.  Intended for single-threaded structural tests."""

    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0

    def __enter__(self) -> "StepCounter":
        global _counter
        self.count = 0
        _counter = self
        return self

    def __exit__(self, *exc) -> None:
        global _counter
        _counter = None


def install_controller(controller) -> None:
    global _controller
    _controller = controller


def remove_controller() -> None:
    global _controller
    _controller = None
