"""Canonical representatives of sequence sets under permutation and negation.

A sequence set is viewed as a hypergraph whose vertices are the channels and
whose hyperedges are the member codes.  Channel relabelings that map one set
onto another are exactly the hypergraph isomorphisms, so a canonical labeling
of the bipartite channel/member incidence structure yields a canonical
representative under permutations.  Negation contributes at most one more
candidate, so labeling the set and its negation and keeping the smaller
bitmap canonicalizes under the full similarity relation.

The labeling is individualization-refinement with channels as the only
individualized side.  Refinement interleaves two invariants: per-channel
member counts split by Hamming-weight class and by co-membership with other
channel color classes (cheap, pure bit counting), and a member-side round
that colors hyperedges by their incident channel colors (vectorized; only
needed when the cheap rounds stall).  Ties branch on every channel of the
first largest cell; automorphisms discovered at equal-bitmap leaves prune
sibling branches.  The representative is the minimal leaf bitmap, compared
as a big integer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seqset import (
    BoolSeqSet,
    WidthError,
    channel_mask,
    negate_bits,
    permute_bits,
    popcount_mask,
)

_MEMO_MIN_FRACTION = 4  # memoize raw sets holding at least a quarter of the cube
_MEMO_CAP = 1 << 18

_memo: dict = {}

_mix_pool = np.array([], dtype=np.uint64)


def _mix(n: int) -> np.ndarray:
    """Fixed odd multipliers used to hash count vectors order-sensitively."""
    global _mix_pool
    if len(_mix_pool) < n:
        size = max(64, 2 * n)
        pool = (np.arange(1, size + 1, dtype=np.uint64) * np.uint64(0x9E3779B97F4A7C15)) ** np.uint64(3)
        _mix_pool = pool | np.uint64(1)
    return _mix_pool[:n]


@dataclass(frozen=True)
class CanonicalForm:
    """Canonical set plus the transform witnessing input ~ set."""

    set: BoolSeqSet
    witness: tuple  # (permutation tuple, negate flag)


def canonicalize(x: BoolSeqSet) -> CanonicalForm:
    """Canonical representative of [x] under channel permutation and negation."""
    perm, bits, negate = _canonical_label_full(x.width, x.bits)
    return CanonicalForm(BoolSeqSet(x.width, bits), (perm, negate))


def canonical_bits(width: int, bits: int) -> int:
    """Canonical bitmap only; the hot path used by the search."""
    if bits.bit_count() * _MEMO_MIN_FRACTION >= 1 << width:
        key = (width, bits)
        hit = _memo.get(key)
        if hit is not None:
            return hit
        result = _canonical_label_full(width, bits)[1]
        if len(_memo) < _MEMO_CAP:
            _memo[key] = result
        return result
    return _canonical_label_full(width, bits)[1]


def find_similarity_witness(x: BoolSeqSet, y: BoolSeqSet):
    """Some (perm, negate) with transform(x, perm, negate) == y, or None."""
    if x.width != y.width:
        raise WidthError(f"width mismatch: {x.width} != {y.width}")
    cx = canonicalize(x)
    cy = canonicalize(y)
    if cx.set != cy.set:
        return None
    px, bx = cx.witness
    py, by = cy.witness
    inv_py = _invert(py)
    return tuple(inv_py[px[i]] for i in range(x.width)), bx ^ by


def _invert(perm):
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


def _canonical_label_full(width: int, bits: int):
    """(witness permutation, canonical bitmap, negate flag) for both polarities."""
    keys, keys_neg = _initial_keys_both(width, bits)
    perm0, bm0 = _label(width, bits, keys)
    nbits = negate_bits(width, bits)
    perm1, bm1 = _label(width, nbits, keys_neg)
    if bm1 < bm0:
        return perm1, bm1, True
    return perm0, bm0, False


def _initial_keys_both(width: int, bits: int):
    """Per-channel invariant keys of a set and its negation in one pass.

    The key packs, per Hamming-weight class, how many members of that class
    contain the channel.  Negating maps weight-k members containing i to
    weight-(width-k) members not containing i, so both key families come
    from the same count pass.
    """
    rows = []
    totals = []
    for k in range(width + 1):
        mk = bits & popcount_mask(width, k)
        tk = mk.bit_count()
        totals.append(tk)
        if tk and k:
            rows.append(tuple((mk & channel_mask(width, i)).bit_count() for i in range(width)))
        else:
            rows.append(None)
    keys = [0] * width
    keys_neg = [0] * width
    for k in range(1, width + 1):
        if rows[k] is not None:
            row = rows[k]
            for i in range(width):
                keys[i] = keys[i] << 21 | (k << 11 | row[i])
        src = width - k
        if totals[src]:
            row = rows[src]
            ri = (0,) * width if row is None else row
            for i in range(width):
                keys_neg[i] = keys_neg[i] << 21 | (k << 11 | (totals[src] - ri[i]))
    return keys, keys_neg


def _dense_rank(keys):
    order = {key: rank for rank, key in enumerate(sorted(set(keys)))}
    return [order[key] for key in keys], len(order)


def _pair_counts(width: int, bits: int):
    cmasks = [bits & channel_mask(width, i) for i in range(width)]
    pair = [[0] * width for _ in range(width)]
    for i in range(width):
        row = pair[i]
        mi = cmasks[i]
        for j in range(i + 1, width):
            c = (mi & cmasks[j]).bit_count()
            row[j] = c
            pair[j][i] = c
    return pair


def _pair_refine(width, colors, ncolors, pair):
    """Refine channel colors by co-membership counts with each color class."""
    rng = range(width)
    while ncolors < width:
        keys = []
        for i in rng:
            row = pair[i]
            ci = colors[i]
            sig = sorted(colors[j] << 11 | row[j] for j in rng if j != i)
            keys.append((ci, tuple(sig)))
        colors2, n2 = _dense_rank(keys)
        if n2 == ncolors:
            break
        colors, ncolors = colors2, n2
    return colors, ncolors


def _label(width: int, bits: int, init_keys):
    """Minimal bitmap over permutation relabelings, with its witness."""
    if bits == 0 or bits == (1 << (1 << width)) - 1:
        return tuple(range(width)), bits
    colors, ncolors = _dense_rank(init_keys)
    if ncolors < width:
        colors, ncolors = _pair_refine(width, colors, ncolors, _pair_counts(width, bits))
    if ncolors == width:
        perm = tuple(colors)
        return perm, permute_bits(width, bits, perm)
    return _LabelSearch(width, bits, colors).run()


class _LabelSearch:
    """Individualization-refinement over one polarity of one set."""

    def __init__(self, width, bits, colors):
        self.width = width
        self.bits = bits
        self.colors0 = colors
        self.pair = _pair_counts(width, bits)
        self.best_bm = None
        self.best_perm = None
        self.autos = []
        codes = np.flatnonzero(
            np.unpackbits(
                np.frombuffer(
                    bits.to_bytes(max(1, (1 << width) >> 3), "little"), dtype=np.uint8
                ),
                bitorder="little",
            )[: 1 << width]
        )
        incidence = (codes[:, None] >> np.arange(width)) & 1
        self.rows, self.cols = np.nonzero(incidence)
        self.nmembers = len(codes)

    def run(self):
        self._descend(self.colors0, ())
        return self.best_perm, self.best_bm

    def _member_round(self, colors, ncolors):
        """Channels -> member colors -> channels, one invariant pass."""
        nm = self.nmembers
        ccol = np.asarray(colors, dtype=np.int64)
        ecounts = np.bincount(
            self.rows * ncolors + ccol[self.cols], minlength=nm * ncolors
        ).reshape(nm, ncolors)
        ekeys = ecounts.astype(np.uint64) @ _mix(ncolors)
        _, ecol = np.unique(ekeys, return_inverse=True)
        nedge = int(ecol.max()) + 1 if nm else 0
        ccounts = np.bincount(
            self.cols * nedge + ecol[self.rows], minlength=self.width * nedge
        ).reshape(self.width, nedge)
        csig = ccounts.astype(np.uint64) @ _mix(nedge)
        keys = [(colors[i], int(csig[i])) for i in range(self.width)]
        return _dense_rank(keys)

    def _refine(self, colors, ncolors):
        while ncolors < self.width:
            colors, ncolors = _pair_refine(self.width, colors, ncolors, self.pair)
            if ncolors == self.width:
                break
            colors2, n2 = self._member_round(colors, ncolors)
            if n2 == ncolors:
                break
            colors, ncolors = colors2, n2
        return colors, ncolors

    def _descend(self, colors, fixed):
        colors, ncolors = self._refine(colors, len(set(colors)))
        width = self.width
        if ncolors == width:
            perm = tuple(colors)
            bm = permute_bits(width, self.bits, perm)
            if self.best_bm is None or bm < self.best_bm:
                self.best_bm = bm
                self.best_perm = perm
            elif bm == self.best_bm and perm != self.best_perm:
                inv_best = _invert(self.best_perm)
                self.autos.append(tuple(inv_best[perm[i]] for i in range(width)))
            return
        cells = {}
        for c in range(width):
            cells.setdefault(colors[c], []).append(c)
        target = None
        for color in sorted(cells):
            cell = cells[color]
            if len(cell) > 1 and (target is None or len(cell) > len(target)):
                target = cell
        usable = [a for a in self.autos if all(a[f] == f for f in fixed)]
        branched = []
        for v in target:
            if any(self._same_orbit(v, u, usable) for u in branched):
                continue
            branched.append(v)
            bumped, _ = _dense_rank([(colors[c], 0 if c == v else 1) for c in range(width)])
            self._descend(bumped, fixed + (v,))
            usable = [a for a in self.autos if all(a[f] == f for f in fixed)]

    def _same_orbit(self, v, u, autos):
        if not autos:
            return False
        seen = {u}
        frontier = [u]
        while frontier:
            nxt = []
            for c in frontier:
                for a in autos:
                    img = a[c]
                    if img == v:
                        return True
                    if img not in seen:
                        seen.add(img)
                        nxt.append(img)
            frontier = nxt

        return False
