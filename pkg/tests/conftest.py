"""Shared test helpers: independent oracles the implementation is checked against.

Everything here recomputes results from first principles (threshold sets,
breadth-first network search, exhaustive transform enumeration) rather than
reusing the production shortcuts, so agreement is meaningful.
"""

from __future__ import annotations

import itertools
import random

import pytest

from sortnetsize.seqset import BoolSeqSet


def threshold_set(y) -> BoolSeqSet:
    """T(y) for a permutation sequence y of (1, ..., w): pointwise thresholds."""
    w = len(y)
    codes = []
    for k in range(1, w + 2):
        code = 0
        for i, v in enumerate(y):
            if v >= k:
                code |= 1 << i
        codes.append(code)
    return BoolSeqSet.of(w, codes)


_threshold_families = {}


def all_threshold_sets(w):
    if w not in _threshold_families:
        _threshold_families[w] = [
            threshold_set(y) for y in itertools.permutations(range(1, w + 1))
        ]
    return _threshold_families[w]


def interior_oracle(x: BoolSeqSet) -> BoolSeqSet:
    """Union of all threshold sets contained in x; the definition, verbatim."""
    bits = 0
    for t in all_threshold_sets(x.width):
        if t.bits & ~x.bits == 0:
            bits |= t.bits
    return BoolSeqSet(x.width, bits)


def random_well_behaved(w, rng, max_parts=4) -> BoolSeqSet:
    """Union of a few random threshold sets."""
    bits = 0
    for _ in range(rng.randint(1, max_parts)):
        y = list(range(1, w + 1))
        rng.shuffle(y)
        bits |= threshold_set(tuple(y)).bits
    return BoolSeqSet(w, bits)


def apply_comparator_code(code, i, j):
    """Elementwise comparator semantics recomputed per member."""
    bi = code >> i & 1
    bj = code >> j & 1
    lo, hi = min(bi, bj), max(bi, bj)
    return code & ~(1 << i | 1 << j) | lo << i | hi << j


def comparator_image(width, bits, i, j):
    out = 0
    for v in range(1 << width):
        if bits >> v & 1:
            out |= 1 << apply_comparator_code(v, i, j)
    return out


def is_chain(width, bits):
    """All members pairwise comparable in the product order, i.e. sortable
    by a permutation alone (the set fits inside one threshold set)."""
    members = [v for v in range(1 << width) if bits >> v & 1]
    members.sort(key=lambda v: v.bit_count())
    for a, b in zip(members, members[1:]):
        if a & ~b:
            return False
        if a.bit_count() == b.bit_count():
            return False
    return True


class ExhaustiveMinSize:
    """Exact s(X) for arbitrary subsets by breadth-first network search.

    s(X) is the length of the shortest standard-comparator word taking X to
    a set sortable by a permutation alone; this depends on nothing but the
    comparator action and the chain test above.
    """

    def __init__(self, width):
        self.width = width
        self.cache = {}
        self.comparators = [
            (i, j) for i in range(width - 1) for j in range(i + 1, width)
        ]

    def __call__(self, bits) -> int:
        hit = self.cache.get(bits)
        if hit is not None:
            return hit
        frontier = {bits}
        seen = {bits}
        depth = 0
        while True:
            for b in frontier:
                if is_chain(self.width, b):
                    self.cache[bits] = depth
                    return depth
            nxt = set()
            for b in frontier:
                for i, j in self.comparators:
                    img = comparator_image(self.width, b, i, j)
                    if img not in seen:
                        seen.add(img)
                        nxt.add(img)
            frontier = nxt
            depth += 1


_exhaustive = {}


def exhaustive_min_size(width) -> ExhaustiveMinSize:
    if width not in _exhaustive:
        _exhaustive[width] = ExhaustiveMinSize(width)
    return _exhaustive[width]


def brute_canonical_bits(x: BoolSeqSet) -> int:
    """Smallest bitmap over every permutation and negation; w! * 2 transforms."""
    from sortnetsize.seqset import transform

    best = None
    for perm in itertools.permutations(range(x.width)):
        for neg in (False, True):
            bits = transform(x, perm, neg).bits
            if best is None or bits < best:
                best = bits
    return best


def brute_subsumes(x: BoolSeqSet, y: BoolSeqSet) -> bool:
    from sortnetsize.seqset import transform

    for perm in itertools.permutations(range(x.width)):
        for neg in (False, True):
            if transform(x, perm, neg).issubset(y):
                return True
    return False


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
