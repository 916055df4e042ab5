"""Brute-force reference implementations used by the tests."""
from __future__ import annotations

import itertools
import random

import numpy as np


def grid(n, r):
    """All integer points of ``[-r, r]^n`` as an ``(m, n)`` array."""
    axis = np.arange(-r, r + 1, dtype=np.int64)
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def dioph_brute(rows, n, r=50):
    """Some ``(slopes, c)`` in ``[-r, r]^(n+1)`` with ``a.s + c == v`` for every row, else None.

    ``c`` is determined by each row once the slopes are fixed, so scanning
    the slopes and solving for ``c`` covers the whole box.
    """
    ys = grid(n, r)
    if not rows:
        return (0,) * n, 0
    cs = None
    ok = np.ones(len(ys), dtype=bool)
    for a, v in rows:
        c = v - ys @ np.array(a, dtype=np.int64)
        if cs is None:
            cs = c
        else:
            ok &= c == cs
    ok &= np.abs(cs) <= r
    idx = np.flatnonzero(ok)
    if len(idx) == 0:
        return None
    i = idx[0]
    return tuple(int(x) for x in ys[i]), int(cs[i])


def feas_brute(rows, n, r=20):
    """Some ``(slopes, c)`` in ``[-r, r]^(n+1)`` satisfying all separation rows, else None."""
    pts = grid(n + 1, r)
    ys, cs = pts[:, :n], pts[:, n]
    ok = np.ones(len(pts), dtype=bool)
    for a, positive in rows:
        lhs = ys @ np.array(a, dtype=np.int64)
        ok &= (lhs >= cs) if positive else (lhs < cs)
    idx = np.flatnonzero(ok)
    if len(idx) == 0:
        return None
    return tuple(int(x) for x in ys[idx[0]]), int(cs[idx[0]])


def check_dioph(rows, slopes, c):
    return all(sum(x * s for x, s in zip(a, slopes)) + c == v for a, v in rows)


def check_feas(rows, slopes, c):
    return all((sum(x * s for x, s in zip(a, slopes)) >= c) == bool(pos) for a, pos in rows)


def binary_entropy(p):
    if p in (0, 1):
        return 0.0
    return -p * np.log2(p) - (1 - p) * np.log2(1 - p)


def random_points(rng: random.Random, n, count, lo=-30, hi=30):
    seen = set()
    while len(seen) < count:
        seen.add(tuple(rng.randint(lo, hi) for _ in range(n)))
    return sorted(seen)


def random_function_points(rng, n, count):
    """Points from a random mix of a few affine pieces plus noise."""
    args = random_points(rng, n, count)
    pieces = [(tuple(rng.randint(-3, 3) for _ in range(n)), rng.randint(-10, 10))
              for _ in range(rng.randint(1, 3))]
    out = []
    for x in args:
        if rng.random() < 0.2:
            v = rng.randint(-30, 30)
        else:
            s, c = pieces[sum(x) % len(pieces)]
            v = sum(a * b for a, b in zip(s, x)) + c
        out.append((x, v))
    return out


def random_predicate_points(rng, n, count):
    """Labels from a random halfspace combination, flipped with small probability."""
    args = random_points(rng, n, count)
    hs = [(tuple(rng.randint(-3, 3) for _ in range(n)), rng.randint(-20, 20))
          for _ in range(rng.randint(1, 2))]
    out = []
    for x in args:
        lab = all(sum(a * b for a, b in zip(s, x)) >= c for s, c in hs)
        if rng.random() < 0.1:
            lab = not lab
        out.append((x, lab))
    return out


def all_subsets(items, k):
    return list(itertools.combinations(sorted(items), k))
