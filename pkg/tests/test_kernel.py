"""Kernel equivalence: the compiled closure must match the pure fallback."""

import pytest

from cicsim import _kernel
from cicsim._reach_py import closure_masks as py_closure
from cicsim.rng import SplitMix64

try:
    from cicsim._reach_c import closure_masks as c_closure
except ImportError:
    c_closure = None


def random_adjacency(rng, m, density=0.2):
    adj = []
    for _ in range(m):
        bits = 0
        for j in range(m):
            if rng.random() < density:
                bits |= 1 << j
        adj.append(bits)
    return adj


def test_python_closure_basics():
    assert py_closure([]) == []
    assert py_closure([0]) == [1]
    # chain 0 -> 1 -> 2
    assert py_closure([0b010, 0b100, 0]) == [0b111, 0b110, 0b100]
    # 2-cycle
    assert py_closure([0b10, 0b01]) == [0b11, 0b11]


@pytest.mark.skipif(c_closure is None, reason="compiled kernel not built")
def test_compiled_matches_python_on_random_graphs():
    rng = SplitMix64(2024)
    for m in (1, 2, 7, 16, 33, 64):
        for _ in range(8):
            adj = random_adjacency(rng, m)
            assert c_closure(adj) == py_closure(adj), (m, adj)


@pytest.mark.skipif(c_closure is None, reason="compiled kernel not built")
def test_compiled_delegates_beyond_64_nodes():
    rng = SplitMix64(7)
    adj = random_adjacency(rng, 70, density=0.05)
    assert c_closure(adj) == py_closure(adj)


def test_selected_kernel_reports_name():
    assert _kernel.KERNEL in ("cython", "python")
    assert _kernel.closure_masks([0b10, 0]) == [0b11, 0b10]
