import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from polaralg import PolarTensor


def conv_oracle(a, b):
    """Circular convolution over all trailing axes by explicit enumeration.

    Deliberately independent of the package kernels: plain Python loops over
    multi-indices of the angular block, one radius at a time.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ang = a.shape[1:]
    out = np.zeros_like(a)
    cells = list(itertools.product(*[range(n) for n in ang]))
    for r in range(a.shape[0]):
        for t in cells:
            acc = 0j
            for k in cells:
                j = tuple((ti - ki) % n for ti, ki, n in zip(t, k, ang))
                acc += a[(r,) + k] * b[(r,) + j]
            out[(r,) + t] = acc
    return out


def random_tensor(rng, shape, complex_=True):
    x = rng.standard_normal(shape)
    if complex_:
        x = x + 1j * rng.standard_normal(shape)
    return PolarTensor(x)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


small_shapes = st.tuples(st.integers(1, 4), st.integers(1, 9))


@st.composite
def tensor_pairs(draw, count=2, shape_strategy=small_shapes):
    shape = draw(shape_strategy)
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return tuple(random_tensor(rng, shape) for _ in range(count))


# verdict lines from tests/test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES = []


def report(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
