"""Huffman's algorithm over (N, <=, 1+max).

Repeatedly merging the two smallest values gives the minimal root label over
all full binary trees whose leaves carry the given values, with each inner
node labeled one more than the larger child.  With all-zero leaves this
recovers ceil(log2 n), the increment in Van Voorhis's classic bound.
"""

from __future__ import annotations

import heapq
from functools import lru_cache

BRUTE_FORCE_CAP = 8


def huffman_min(values) -> int:
    """Minimal root value of a 1+max tree over the given nonempty multiset."""
    heap = list(values)
    if not heap:
        raise ValueError("huffman_min requires a nonempty multiset")
    heapq.heapify(heap)
    while len(heap) > 1:
        a = heapq.heappop(heap)
        b = heapq.heappop(heap)
        heapq.heappush(heap, 1 + max(a, b))
    return heap[0]


def huffman_min_bruteforce(values) -> int:
    """Exhaustive minimum over every full binary tree shape; test oracle."""
    leaves = tuple(sorted(values))
    if not leaves:
        raise ValueError("huffman_min_bruteforce requires a nonempty multiset")
    if len(leaves) > BRUTE_FORCE_CAP:
        raise ValueError(f"brute force capped at {BRUTE_FORCE_CAP} leaves")
    return _best_root(leaves)


@lru_cache(maxsize=None)
def _best_root(leaves: tuple) -> int:
    if len(leaves) == 1:
        return leaves[0]
    best = None
    n = len(leaves)
    # Split the multiset over the root's two subtrees; fixing index 0 on the
    # left halves the symmetric double counting.
    for pick in range(1 << (n - 1)):
        left = [leaves[0]]
        right = []
        for t in range(1, n):
            (left if pick >> (t - 1) & 1 else right).append(leaves[t])
        if not right:
            continue
        root = 1 + max(_best_root(tuple(left)), _best_root(tuple(right)))
        if best is None or root < best:
            best = root
    return best
