"""Subsumption testing and non-subsumed filtering of bound partitions.

X subsumes Y when some permuted (and optionally negated) copy of X is a
subset of Y; then any lower bound certified for X transfers to Y.  Testing a
pair starts with cheap order-preserving abstractions: the member count,
popcount histogram and weight of the whole set and of each one-channel
pruning.  Surviving pairs build a bipartite channel-compatibility graph
whose perfect matchings are the candidate permutations, enumerated smallest
degree first with forward checking and verified by an exact subset test.

Parts of a bounds dump are filtered to their subsumption-minimal antichain,
and the same spatial index answers the redirect queries used to rewrite
certificate premises onto non-subsumed sets.
"""

from __future__ import annotations

import numpy as np

from .seqset import (
    BoolSeqSet,
    WidthError,
    channel_mask,
    negate_bits,
    permute_bits,
    popcount_mask,
    prune_bits,
    weight_bits,
)

MATCHING_CAP = 1_000_000

TREE_FANOUT = 16


class MatchingCapExceeded(RuntimeError):
    """A pair required more candidate matchings than the configured cap."""


def _stats(width: int, bits: int):
    """Member count, popcount histogram and weight, as one int vector."""
    n = bits.bit_count()
    hist = [0] * (width + 1)
    wsum = 0
    for k in range(width + 1):
        ck = (bits & popcount_mask(width, k)).bit_count()
        hist[k] = ck
    for i in range(width):
        ones = (bits & channel_mask(width, i)).bit_count()
        wsum += 2 * ones * (n - ones)
    return [n] + hist + [wsum]


def abstraction(width: int, bits: int):
    """(dominance vector, per-channel stats of each pruning) as numpy arrays.

    Every component only grows when moving to a superset and is invariant
    under channel permutation, with channel rows matched through the
    permutation; this makes componentwise <= a sound non-subsumption filter.
    The dominance vector holds the whole-set statistics plus each column of
    the channel-stat matrix in sorted order: any channel matching maps rows
    injectively onto dominating rows, so sorted columns must dominate too.
    This puts most of the matching test into one vector comparison.
    """
    glob = np.array(_stats(width, bits), dtype=np.int64)
    chan = np.array(
        [_stats(width - 1, prune_bits(width, bits, i)) for i in range(width)],
        dtype=np.int64,
    )
    return np.concatenate((glob, np.sort(chan, axis=0).ravel())), chan


def _compat_matrix(chan_x: np.ndarray, chan_y: np.ndarray) -> np.ndarray:
    """edge[i, j] iff channel i of X may map to channel j of Y."""
    return np.all(chan_x[:, None, :] <= chan_y[None, :, :], axis=2)


def _max_matching(adj: np.ndarray) -> int:
    """Size of a maximum bipartite matching (Kuhn's algorithm)."""
    w = adj.shape[0]
    match_of = [-1] * w

    def try_assign(i, seen):
        for j in range(w):
            if adj[i, j] and not seen[j]:
                seen[j] = True
                if match_of[j] == -1 or try_assign(match_of[j], seen):
                    match_of[j] = i
                    return True
        return False

    size = 0
    for i in range(w):
        if try_assign(i, [False] * w):
            size += 1
    return size


def _enumerate_matchings(width, adj, xbits, ybits):
    """Permutations from perfect matchings, tested by exact subset inclusion."""
    order = sorted(range(width), key=lambda i: int(adj[i].sum()))
    cand = [[j for j in range(width) if adj[i, j]] for i in range(width)]
    assign = [-1] * width
    used = [False] * width
    tried = 0

    def rec(pos):
        nonlocal tried
        if pos == width:
            tried += 1
            if tried > MATCHING_CAP:
                raise MatchingCapExceeded(f"exceeded {MATCHING_CAP} candidate matchings")
            perm = [0] * width
            for i in range(width):
                perm[i] = assign[i]
            if permute_bits(width, xbits, perm) & ~ybits == 0:
                return tuple(perm)
            return None
        i = order[pos]
        for j in cand[i]:
            if used[j]:
                continue
            # forward check: every unassigned channel keeps a free candidate
            used[j] = True
            assign[i] = j
            ok = all(
                any(not used[jj] for jj in cand[order[q]]) for q in range(pos + 1, width)
            )
            if ok:
                hit = rec(pos + 1)
                if hit is not None:
                    return hit
            used[j] = False
            assign[i] = -1
        return None

    return rec(0)


def _perm_subsumes(width, xbits, ybits, gx=None, cx=None, gy=None, cy=None):
    """Some permutation taking X into a subset of Y, or None."""
    if xbits & ~ybits == 0:
        return tuple(range(width))
    if gx is None:
        gx, cx = abstraction(width, xbits)
    if gy is None:
        gy, cy = abstraction(width, ybits)
    if np.any(gx > gy):
        return None
    adj = _compat_matrix(cx, cy)
    if not np.all(adj.any(axis=1)):
        return None
    if _max_matching(adj) < width:
        return None
    return _enumerate_matchings(width, adj, xbits, ybits)


def subsumes(x: BoolSeqSet, y: BoolSeqSet) -> bool:
    """True iff transform(x, perm, neg) is a subset of y for some perm, neg."""
    return subsumption_witness(x, y) is not None


def subsumption_witness(x: BoolSeqSet, y: BoolSeqSet):
    """(perm, negate) with transform(x, perm, negate) <= y, or None."""
    if x.width != y.width:
        raise WidthError(f"width mismatch: {x.width} != {y.width}")
    width = x.width
    hit = _perm_subsumes(width, x.bits, y.bits)
    if hit is not None:
        return hit, False
    hit = _perm_subsumes(width, negate_bits(width, x.bits), y.bits)
    if hit is not None:
        return hit, True
    return None


# ---------------------------------------------------------------------------
# Spatial index over abstraction points

_FIELD_BITS = 41  # 40 value bits plus one guard bit per component


def _pack_vector(vec) -> int:
    packed = 0
    shift = 0
    for v in vec:
        packed |= int(v) << shift
        shift += _FIELD_BITS
    return packed


def _guard_mask(ncomp: int) -> int:
    guard = 0
    for c in range(ncomp):
        guard |= 1 << (_FIELD_BITS * c + _FIELD_BITS - 1)
    return guard


def _dominated(packed_small: int, packed_big: int, guard: int) -> bool:
    """Componentwise small <= big over packed 40-bit fields, in one subtract.

    Each minuend field is topped up with its guard bit, so per-field
    differences never borrow across fields; the guard survives exactly when
    that field of packed_big is at least the field of packed_small.
    """
    return ((packed_big | guard) - packed_small) & guard == guard


class _Node:
    __slots__ = ("packed_min", "children", "items")

    def __init__(self, packed_min, children, items):
        self.packed_min = packed_min
        self.children = children
        self.items = items


class SubsumptionIndex:
    """Bulk-loaded spatial tree over stored sets' abstraction vectors.

    Nodes keep componentwise minima of their subtree packed into a single
    integer, so a whole subtree is skipped with one arithmetic test when
    even those minima do not fit under the query's statistics.
    """

    def __init__(self, width: int, items):
        """items: iterable of (bits, payload); payload returned on hits."""
        self.width = width
        self.entries = []
        for bits, payload in items:
            glob, chan = abstraction(width, bits)
            self.entries.append((bits, payload, glob, chan, _pack_vector(glob)))
        self.guard = _guard_mask(len(self.entries[0][2])) if self.entries else 0
        self.root = self._build(list(range(len(self.entries))))

    def _build(self, idxs):
        if not idxs:
            return None
        gmin = self.entries[idxs[0]][2].copy()
        for t in idxs[1:]:
            np.minimum(gmin, self.entries[t][2], out=gmin)
        if len(idxs) <= TREE_FANOUT:
            return _Node(_pack_vector(gmin), None, idxs)
        points = np.array([self.entries[t][2] for t in idxs])
        spans = points.max(axis=0) - points.min(axis=0)
        dim = int(spans.argmax())
        order = np.argsort(points[:, dim], kind="stable")
        chunks = np.array_split(order, TREE_FANOUT)
        children = []
        for chunk in chunks:
            if len(chunk):
                children.append(self._build([idxs[int(t)] for t in chunk]))
        return _Node(_pack_vector(gmin), children, None)

    def _candidates_packed(self, packed_query):
        out = []
        guard = self.guard
        stack = [self.root] if self.root is not None else []
        while stack:
            node = stack.pop()
            if not _dominated(node.packed_min, packed_query, guard):
                continue
            if node.items is not None:
                for t in node.items:
                    if _dominated(self.entries[t][4], packed_query, guard):
                        out.append(t)
            else:
                stack.extend(node.children)
        return out

    def candidates(self, query_bits: int):
        """Indices whose abstractions fit under the query's, tree-pruned."""
        gq, _ = abstraction(self.width, query_bits)
        return self._candidates_packed(_pack_vector(gq))

    def candidates_linear(self, query_bits: int):
        """Same result as candidates() by linear scan; completeness oracle."""
        gq, _ = abstraction(self.width, query_bits)
        return [
            t
            for t, (_, _, gx, _, _) in enumerate(self.entries)
            if not np.any(gx > gq)
        ]

    def find_embedding(self, query_bits: int, skip_bits=None):
        """(payload, perm, negate) for a stored set embedding into the query."""
        # transform(stored, perm, neg) <= query  iff  stored perm-embeds
        # into the negated query for neg=True
        for neg in (False, True):
            qbits = query_bits if not neg else negate_bits(self.width, query_bits)
            gq, cq = abstraction(self.width, qbits)
            for t in self._candidates_packed(_pack_vector(gq)):
                bits, payload, gx, cx, _ = self.entries[t]
                if skip_bits is not None and bits == skip_bits:
                    continue
                perm = _perm_subsumes(self.width, bits, qbits, gx, cx, gq, cq)
                if perm is not None:
                    return payload, perm, neg
        return None


def filter_nonsubsumed(part, width: int | None = None, threads: int = 1):
    """Subsumption-minimal antichain of a list of same-(width, bound) sets.

    Every dropped set is subsumed by some survivor; distinct canonical sets
    of equal size cannot subsume each other, so scanning by increasing
    member count against the already-kept survivors is complete.  Input
    order among kept sets is preserved.
    """
    if not part:
        return []
    if width is None:
        width = part[0].width if isinstance(part[0], BoolSeqSet) else None
    raw = [x.bits if isinstance(x, BoolSeqSet) else x for x in part]
    kept_flags = [False] * len(raw)
    survivors = _SurvivorPool(width)

    # A subsumer never has more members, so scanning size groups in
    # increasing order sees every potential subsumer of a set no later than
    # the set itself.  Equal-size groups may contain mutually-subsuming
    # (similar) sets; within a group the earlier set wins.
    groups = {}
    for t in range(len(raw)):
        groups.setdefault(raw[t].bit_count(), []).append(t)

    def against_survivors(t):
        return t, survivors.covers(raw[t])

    pool = None
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        pool = ThreadPoolExecutor(max_workers=threads)
    try:
        for size in sorted(groups):
            group = groups[size]
            if pool is not None:
                stage = list(pool.map(against_survivors, group))
            else:
                stage = [against_survivors(t) for t in group]
            fresh = _SurvivorPool(width)  # same-size survivors, in order
            for t, covered in stage:
                if covered or fresh.covers(raw[t]):
                    continue
                fresh.add(raw[t])
                kept_flags[t] = True
            survivors.extend(fresh)
    finally:
        if pool is not None:
            pool.shutdown()
    return [part[t] for t in range(len(raw)) if kept_flags[t]]


class _SurvivorPool:
    """Kept sets with their abstractions stacked for bulk prefiltering."""

    def __init__(self, width):
        self.width = width
        self.bits = []
        self.chans = []
        self.glob_rows = []
        self.glob_matrix = None  # stacked lazily; queries vectorize over it

    def add(self, bits):
        glob, chan = abstraction(self.width, bits)
        self.bits.append(bits)
        self.chans.append(chan)
        self.glob_rows.append(glob)
        self.glob_matrix = None

    def extend(self, other):
        self.bits.extend(other.bits)
        self.chans.extend(other.chans)
        self.glob_rows.extend(other.glob_rows)
        self.glob_matrix = None

    def covers(self, bits) -> bool:
        """Does any pooled set (other than an identical copy) subsume bits?"""
        if not self.bits:
            return False
        if self.glob_matrix is None:
            self.glob_matrix = np.array(self.glob_rows, dtype=np.int64)
        width = self.width
        for qbits in (bits, negate_bits(width, bits)):
            gq, cq = abstraction(width, qbits)
            passing = np.flatnonzero(~(self.glob_matrix > gq).any(axis=1))
            for t in passing:
                sbits = self.bits[int(t)]
                if sbits == bits:
                    continue
                if (
                    _perm_subsumes(
                        width, sbits, qbits, self.glob_matrix[t], self.chans[int(t)], gq, cq
                    )
                    is not None
                ):
                    return True
        return False


class RedirectIndex:
    """Per-width redirect onto the non-subsumed dump set of maximal bound."""

    def __init__(self, parts):
        """parts: {(width, bound): [bits]} of already-filtered sets."""
        items_by_width = {}
        for (width, bound), masks in sorted(parts.items()):
            items_by_width.setdefault(width, []).extend(
                (m, (m, bound)) for m in masks
            )
        self.by_width = {
            width: SubsumptionIndex(width, items)
            for width, items in items_by_width.items()
        }

    def redirect(self, width: int, bits: int):
        """(bits', bound, perm, negate) maximizing bound with bits' embedding
        into the queried set, or None when no stored set embeds."""
        index = self.by_width.get(width)
        if index is None:
            return None
        best = None
        for neg in (False, True):
            qbits = bits if not neg else negate_bits(width, bits)
            gq, cq = abstraction(width, qbits)
            found = index._candidates_packed(_pack_vector(gq))
            # highest bound first, then stable by insertion, so the exact
            # tests stop at the strongest embeddable set deterministically
            found.sort(key=lambda t: (-index.entries[t][1][1], t))
            for t in found:
                sbits, (_, bound), gx, cx, _ = index.entries[t]
                if best is not None and bound <= best[1]:
                    break
                perm = _perm_subsumes(width, sbits, qbits, gx, cx, gq, cq)
                if perm is not None:
                    best = (sbits, bound, perm, neg)
                    break
        return best
