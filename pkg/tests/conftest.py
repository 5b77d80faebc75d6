import pytest

from chronocas import instrument
from chronocas import reclaim


@pytest.fixture(autouse=True)
def _clean_global_modes():
    """Instrumentation and poisoning are process-global; tests that enable
    them must not leak into their neighbors."""
    yield
    instrument.enable(False)
    instrument.reset()
    reclaim.enable_poisoning(False)
