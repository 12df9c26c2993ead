"""Shared helpers for the test suite."""

from collections import Counter

import pytest

from frugaldp.bit_tape import BitTape


def collect_histogram(sampler, n, seed):
    """Run ``sampler(tape)`` n times on one seeded tape; return (Counter, bits)."""
    tape = BitTape(seed=seed)
    hist = Counter()
    for _ in range(n):
        hist[sampler(tape)] += 1
    return hist, tape.bits_consumed


@pytest.fixture
def tape():
    return BitTape(seed=0xC0FFEE)
