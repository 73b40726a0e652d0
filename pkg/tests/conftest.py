import itertools

import numpy as np
import pytest

from replaylearn.hypotheses import HypothesisClass, random_class


def brute_closure(masks, n):
    """Intersections of every nonempty subfamily, by direct enumeration."""
    full = (1 << n) - 1
    out = set()
    for r in range(1, len(masks) + 1):
        for combo in itertools.combinations(masks, r):
            acc = full
            for m in combo:
                acc &= m
            out.add(acc)
    return out


def brute_tdim(masks, n):
    """Largest k with points x_1..x_k and h_0..h_k, h_i(x_j) = [j <= i]; tries every ordered point tuple."""
    best = 0
    for k in range(1, n + 1):
        found = False
        for pts in itertools.permutations(range(n), k):
            ok = all(
                any(all(((m >> pts[j]) & 1) == (j < i) for j in range(k)) for m in masks)
                for i in range(k + 1)
            )
            if ok:
                found = True
                break
        if not found:
            break
        best = k
    return best


def random_classes(count, n_max, size_max, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, n_max + 1))
        size = int(rng.integers(1, min(size_max, 1 << n) + 1))
        out.append(random_class(n, size, rng))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def cls(n, *point_sets):
    """Class from 0-based point sets."""
    masks = [sum(1 << x for x in s) for s in point_sets]
    return HypothesisClass.from_masks(n, masks)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion; printed now and in the session summary."""

    def record(criterion, ok, detail):
        line = f"{criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
