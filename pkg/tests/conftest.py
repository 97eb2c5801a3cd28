"""Shared builders for small trees used across the suite."""

from __future__ import annotations

import itertools
from collections import Counter

from ddmtest import LinearizedTree


def path_tree(n: int) -> LinearizedTree:
    return LinearizedTree(n, [(i, i + 1) for i in range(1, n)])


def star_tree(n: int, hub: int = 1) -> LinearizedTree:
    return LinearizedTree(n, [(hub, v) for v in range(1, n + 1) if v != hub])


def caterpillar_tree(n: int) -> LinearizedTree:
    """A mixed-shape tree for n >= 5: a path with one extra leaf on vertex 2."""
    if n < 5:
        raise ValueError("needs n >= 5")
    edges = [(i, i + 1) for i in range(1, n - 1)] + [(2, n)]
    return LinearizedTree(n, edges)


def brute_force_distribution(tree: LinearizedTree,
                             noncrossing: bool = False) -> Counter:
    """Oracle: walk the n! arrangements with plain Python, no package code."""
    counts: Counter[int] = Counter()
    verts = range(1, tree.n + 1)
    for perm in itertools.permutations(range(1, tree.n + 1)):
        pos = {v: perm[v - 1] for v in verts}
        spans = [(min(pos[u], pos[v]), max(pos[u], pos[v]))
                 for u, v in tree.edges]
        if noncrossing:
            crossing = any(
                a < c < b < d or c < a < d < b
                for i, (a, b) in enumerate(spans)
                for (c, d) in spans[i + 1:])
            if crossing:
                continue
        counts[sum(b - a for a, b in spans)] += 1
    return counts
