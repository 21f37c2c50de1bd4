import os

import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ufhc.sequence_space import SparseVector

settings.register_profile("default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

coefs = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False).filter(lambda c: abs(c) > 1e-6)


@st.composite
def sparse_vectors(draw, max_index=200, max_support=20, min_support=0):
    idx = draw(st.lists(st.integers(0, max_index), min_size=min_support, max_size=max_support, unique=True))
    vals = draw(st.lists(coefs, min_size=len(idx), max_size=len(idx)))
    return SparseVector.from_pairs(zip(idx, vals))


def random_sparse(rng, max_index=200, max_support=20, scale=1.0):
    k = int(rng.integers(1, max_support + 1))
    idx = rng.choice(max_index + 1, size=k, replace=False)
    return SparseVector.from_arrays(idx, scale * rng.uniform(-1, 1, k))


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, title, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {title}{' - ' + detail if detail else ''}")
