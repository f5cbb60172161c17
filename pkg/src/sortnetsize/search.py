"""Successive-approximation dynamic program for minimal sorting network sizes.

Every well-behaved sequence set X is associated with an integer interval
[lo, hi] known to contain s(X), the minimal comparator count sorting X.  The
table starts from an implicit default: {0} for trivially sortable sets and
[1, shat(w)] otherwise, where shat is a table of known upper bounds.  Bounds
are then repeatedly tightened using three interleaved strategies:

* copying the bound of the pruned set when only one channel is prunable,
* the Huffman lower bound over the pruned well-behaved interiors, and
* the successor recurrence s(X) = 1 + min over comparator images.

An entry whose interval is a singleton is fathomed; fathoming the canonical
full cube of width n yields s(n).  Only entries that differ from the default
are ever stored, keyed by canonical bitmap.
"""

from __future__ import annotations

import json
import math
import os
import sys
import threading
from concurrent.futures import ThreadPoolExecutor, wait, FIRST_COMPLETED

from .canon import canonical_bits
from .huffman import huffman_min
from .seqset import (
    BoolSeqSet,
    bitmap_byte_length,
    negate_bits,
    pruned_interior_bits,
    successor_bits,
    weight_bits,
)

#: Known upper bounds shat(n) for 1 <= n <= 12, from long-known networks.
UPPER_BOUNDS = (0, 1, 3, 5, 9, 12, 16, 19, 25, 29, 35, 39)

MAX_CHANNELS = len(UPPER_BOUNDS)

MEMO_WIDTH_CAP = 6


class SearchError(Exception):
    pass


class InternalInconsistencyError(SearchError):
    """A bound update produced an empty interval; indicates a bug."""


class DumpError(SearchError):
    """A bounds dump directory is missing, truncated or inconsistent."""


def _trivial(width: int, bits: int) -> bool:
    return bits.bit_count() <= width + 1


class _Entry:
    __slots__ = ("lo", "hi", "succ", "hleaves", "pruned", "u")

    def __init__(self, lo, hi):
        self.lo = lo
        self.hi = hi
        self.succ = None  # list of canonical masks, or None marker per trivial image
        self.hleaves = None  # per polarity list of canonical pruned-interior masks
        self.pruned = None  # False, or the canonical pruned interior (unique channel)
        self.u = None  # best value the Huffman bound can still certify


class BoundsTable:
    """Sparse per-width map from canonical bitmap to bounding interval."""

    def __init__(self, upper_bounds=UPPER_BOUNDS):
        self.upper_bounds = tuple(upper_bounds)
        self.entries = {}  # width -> {bits: _Entry}
        self.improve_calls = 0
        self._lock = threading.Lock()

    def default_bounds(self, width: int, bits: int):
        if _trivial(width, bits):
            return 0, 0
        return 1, self.upper_bounds[width - 1]

    def bounds(self, width: int, bits: int):
        entry = self.entries.get(width, {}).get(bits)
        if entry is not None:
            return entry.lo, entry.hi
        return self.default_bounds(width, bits)

    def entry(self, width: int, bits: int) -> _Entry:
        per_width = self.entries.setdefault(width, {})
        entry = per_width.get(bits)
        if entry is None:
            with self._lock:  # a concurrent creator must win exactly once
                entry = per_width.get(bits)
                if entry is None:
                    lo, hi = self.default_bounds(width, bits)
                    entry = _Entry(lo, hi)
                    per_width[bits] = entry
        return entry

    def shrink(self, entry: _Entry, lo: int, hi: int) -> None:
        with self._lock:
            new_lo = max(entry.lo, lo)
            new_hi = min(entry.hi, hi)
            if new_lo > new_hi:
                raise InternalInconsistencyError(
                    f"interval [{entry.lo},{entry.hi}] shrank to empty via [{lo},{hi}]"
                )
            entry.lo = new_lo
            entry.hi = new_hi

    def stored_items(self):
        """(width, bits, lo, hi) for entries that differ from the default."""
        for width in sorted(self.entries):
            for bits in sorted(self.entries[width]):
                entry = self.entries[width][bits]
                if (entry.lo, entry.hi) != self.default_bounds(width, bits):
                    yield width, bits, entry.lo, entry.hi


# ---------------------------------------------------------------------------
# Bound update strategies


def _leaf_bounds(table, width, item):
    if item is None:  # trivially sortable image, b = {0}
        return 0, 0
    return table.bounds(width, item)


def _successor_cache(table, width, bits, entry):
    if entry.succ is None:
        succ = []
        seen = set()
        for _, ybits in successor_bits(width, bits):
            if ybits in seen:
                continue
            seen.add(ybits)
            if _trivial(width, ybits):
                succ.append(None)
            else:
                succ.append(canonical_bits(width, ybits))
        if not succ:
            raise InternalInconsistencyError(
                "non-fathomed set has no successors; successor recurrence is stuck"
            )
        entry.succ = succ
    return entry.succ


def _huffman_cache(table, width, bits, entry):
    if entry.hleaves is None:
        polarities = []
        for zbits in (bits, negate_bits(width, bits)):
            leaves = []
            for i in range(width):
                if not zbits >> (1 << i) & 1:
                    continue
                pbits = pruned_interior_bits(width, zbits, i, well_behaved=True)
                if _trivial(width - 1, pbits):
                    leaves.append(None)
                else:
                    leaves.append(canonical_bits(width - 1, pbits))
            if not leaves:
                raise InternalInconsistencyError(
                    "nonempty well-behaved set with no prunable channels"
                )
            polarities.append(leaves)
        entry.hleaves = polarities
    return entry.hleaves


def _pruned_cache(table, width, bits, entry):
    """Canonical pruned interior when X or its negation has a unique prunable channel."""
    if entry.pruned is None:
        entry.pruned = False
        for zbits in (bits, negate_bits(width, bits)):
            channels = [i for i in range(width) if zbits >> (1 << i) & 1]
            if len(channels) == 1:
                pbits = pruned_interior_bits(width, zbits, channels[0], well_behaved=True)
                if _trivial(width - 1, pbits):
                    raise InternalInconsistencyError(
                        "unique-prunable set pruned to a trivially sortable set"
                    )
                entry.pruned = canonical_bits(width - 1, pbits)
                break
    return entry.pruned


def successor_update(table, width, bits, entry=None) -> None:
    """Intersect b(X) with 1 + componentwise min over canonical successors."""
    entry = entry or table.entry(width, bits)
    if entry.lo == entry.hi:
        return
    best_lo = None
    best_hi = None
    for item in _successor_cache(table, width, bits, entry):
        lo, hi = _leaf_bounds(table, width, item)
        if best_lo is None or lo < best_lo:
            best_lo = lo
        if best_hi is None or hi < best_hi:
            best_hi = hi
    table.shrink(entry, 1 + best_lo, 1 + best_hi)


def huffman_update(table, width, bits, entry=None) -> bool:
    """Intersect b(X) with the Huffman lower bound; True when exhausted.

    Both polarities are evaluated since the bound is not symmetric under
    negation.  The best still-certifiable value is cached so later improve
    passes can skip the strategy entirely.
    """
    entry = entry or table.entry(width, bits)
    if entry.lo == entry.hi:
        return True
    best_lo = 0
    ceiling = 0
    for leaves in _huffman_cache(table, width, bits, entry):
        los = []
        his = []
        for item in leaves:
            lo, hi = _leaf_bounds(table, width - 1, item)
            los.append(lo)
            his.append(hi)
        h_lo = huffman_min(los)
        h_hi = huffman_min(his)
        if h_lo > best_lo:
            best_lo = h_lo
        if h_hi > ceiling:
            ceiling = h_hi
    table.shrink(entry, best_lo, entry.hi)
    entry.u = ceiling
    return entry.lo >= ceiling


def improve(table, width, bits) -> None:
    """Strictly shrink b(X) for a non-fathomed canonical well-behaved X.

    Strategy order: copy from the pruned set when a polarity has exactly one
    prunable channel, then the Huffman bound while its cached ceiling still
    exceeds lo, then the successor step.  Each strategy keeps recursing into
    the best candidate subproblem until this set's lower bound improves or
    the interval becomes a singleton.
    """
    entry = table.entry(width, bits)
    lo0 = entry.lo
    if lo0 == entry.hi:
        return
    table.improve_calls += 1

    pruned = _pruned_cache(table, width, bits, entry)
    if pruned is not False:
        while True:
            ylo, yhi = table.bounds(width - 1, pruned)
            table.shrink(entry, ylo, yhi)
            if entry.lo > lo0 or entry.lo == entry.hi:
                return
            improve(table, width - 1, pruned)

    if entry.u is None or entry.u > entry.lo:
        while True:
            done = huffman_update(table, width, bits, entry)
            if entry.lo > lo0 or entry.lo == entry.hi:
                return
            if done:
                break
            best = None
            best_key = None
            for leaves in entry.hleaves:
                for item in leaves:
                    if item is None:
                        continue
                    lo, hi = table.bounds(width - 1, item)
                    if lo == hi:
                        continue
                    key = (lo, item.bit_count(), hi)
                    if best_key is None or key < best_key:
                        best_key = key
                        best = item
            if best is None:
                continue  # all fathomed now; next update returns done
            improve(table, width - 1, best)

    while True:
        successor_update(table, width, bits, entry)
        if entry.lo > lo0 or entry.lo == entry.hi:
            return
        # Only successors sitting at the minimal lower bound block the
        # recurrence; recursing anywhere else cannot move this bound.
        min_lo = None
        for item in entry.succ:
            lo = 0 if item is None else table.bounds(width, item)[0]
            if min_lo is None or lo < min_lo:
                min_lo = lo
        best = None
        best_key = None
        for item in entry.succ:
            if item is None:
                continue
            lo, hi = table.bounds(width, item)
            if lo == hi or lo > min_lo:
                continue
            key = (item.bit_count(), lo, hi)
            if best_key is None or key < best_key:
                best_key = key
                best = item
        if best is None:
            continue  # progress lemma: the next update fathoms X
        improve(table, width, best)


# ---------------------------------------------------------------------------
# Entry points


def _solve_canonical(table, width, bits, threads=1):
    entry = table.entry(width, bits)
    if threads > 1:
        _drain_parallel(table, width, bits, entry, threads)
    while entry.lo != entry.hi:
        improve(table, width, bits)
    return entry.lo


def _frontier(table, width, bits, entry, limit):
    """Highest-priority non-fathomed subproblems feeding this entry's bound."""
    candidates = []
    if entry.hleaves is not None:
        for leaves in entry.hleaves:
            for item in leaves:
                if item is not None:
                    lo, hi = table.bounds(width - 1, item)
                    if lo != hi:
                        candidates.append(((lo, item.bit_count(), hi), width - 1, item))
    if entry.succ is not None:
        for item in entry.succ:
            if item is not None:
                lo, hi = table.bounds(width, item)
                if lo != hi:
                    candidates.append(((item.bit_count(), lo, hi), width, item))
    candidates.sort(key=lambda t: t[0])
    seen = set()
    picked = []
    for _, w, item in candidates:
        if (w, item) not in seen:
            seen.add((w, item))
            picked.append((w, item))
        if len(picked) >= limit:
            break
    return picked


def _drain_parallel(table, width, bits, entry, threads):
    """Worker pool over a recomputed pending frontier of subproblems.

    Pending tasks are re-derived (and thereby stale ones canceled) after
    every completed batch; each worker runs the sequential improve routine,
    whose updates are individually serialized by the table.  The final
    fathomed value is the same as in sequential mode.
    """
    with ThreadPoolExecutor(max_workers=threads) as pool:
        while entry.lo != entry.hi:
            improve(table, width, bits)
            if entry.lo == entry.hi:
                break
            pending = _frontier(table, width, bits, entry, 2 * threads)
            if not pending:
                continue
            futures = [pool.submit(_improve_quiet, table, w, item) for w, item in pending]
            while futures:
                done, rest = wait(futures, return_when=FIRST_COMPLETED)
                for fut in done:
                    fut.result()
                futures = list(rest)
                if entry.lo == entry.hi:
                    break


def _improve_quiet(table, width, bits):
    entry = table.entry(width, bits)
    if entry.lo != entry.hi:
        improve(table, width, bits)


def min_size(n: int, table: BoundsTable | None = None, threads: int = 1):
    """s(n) for 1 <= n <= 12, plus the final bounds table."""
    if not 1 <= n <= MAX_CHANNELS:
        raise SearchError(f"channel count {n} outside supported range 1..{MAX_CHANNELS}")
    table = table if table is not None else BoundsTable()
    value = minimal_size(BoolSeqSet.full(n), table, threads=threads)
    return value, table


def minimal_size(x: BoolSeqSet, table: BoundsTable | None = None, threads: int = 1) -> int:
    """Exact s(X) for a well-behaved sequence set via successive approximation."""
    table = table if table is not None else BoundsTable()
    if _trivial(x.width, x.bits):
        return 0
    limit = sys.getrecursionlimit()
    if limit < 200_000:
        sys.setrecursionlimit(200_000)
    try:
        cbits = canonical_bits(x.width, x.bits)
        return _solve_canonical(table, x.width, cbits, threads=threads)
    finally:
        sys.setrecursionlimit(limit)


def memo_min_size(x: BoolSeqSet, _memo=None) -> int:
    """Exact s(X) by full memoized recursion over canonical successors.

    Oracle-scale: widths above MEMO_WIDTH_CAP are rejected.  X must be
    well-behaved for the |X| <= w + 1 base case to be valid.
    """
    if x.width > MEMO_WIDTH_CAP:
        raise SearchError(f"memo_min_size capped at width {MEMO_WIDTH_CAP}")
    memo = _memo if _memo is not None else {}

    def rec(width, bits):
        if _trivial(width, bits):
            return 0
        key = (width, bits)
        hit = memo.get(key)
        if hit is not None:
            return hit
        best = None
        seen = set()
        for _, ybits in successor_bits(width, bits):
            cb = canonical_bits(width, ybits)
            if cb in seen:
                continue
            seen.add(cb)
            val = rec(width, cb)
            if best is None or val < best:
                best = val
        if best is None:
            raise InternalInconsistencyError("non-trivial set with no successors")
        memo[key] = 1 + best
        return 1 + best

    limit = sys.getrecursionlimit()
    if limit < 200_000:
        sys.setrecursionlimit(200_000)
    try:
        return rec(x.width, canonical_bits(x.width, x.bits))
    finally:
        sys.setrecursionlimit(limit)


def van_voorhis_chain(known_n: int, known_s: int, target: int) -> int:
    """Fold s(k) >= s(k-1) + ceil(log2 k) from a known value up to target."""
    if target < known_n:
        raise SearchError("target below the known channel count")
    value = known_s
    for k in range(known_n + 1, target + 1):
        value += (k - 1).bit_length()  # ceil(log2 k)
    return value


# ---------------------------------------------------------------------------
# Bounds dump: one file per (width, lower bound) part


def write_dump(table: BoundsTable, directory: str, n: int, s_value: int) -> None:
    os.makedirs(directory, exist_ok=True)
    parts = {}
    for width, bits, lo, _hi in table.stored_items():
        parts.setdefault((width, lo), []).append(bits)
    manifest_parts = []
    for (width, lo), masks in sorted(parts.items()):
        masks.sort()
        name = f"w{width}_k{lo}.bnd"
        nbytes = bitmap_byte_length(width)
        with open(os.path.join(directory, name), "wb") as fh:
            fh.write(bytes([width]))
            fh.write(len(masks).to_bytes(8, "little"))
            for mask in masks:
                fh.write(mask.to_bytes(nbytes, "little"))
        manifest_parts.append(
            {"width": width, "lower_bound": lo, "count": len(masks), "file": name}
        )
    manifest = {
        "n": n,
        "s": s_value,
        "upper_bounds": list(table.upper_bounds),
        "parts": manifest_parts,
    }
    with open(os.path.join(directory, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")


def load_dump(directory: str):
    """(manifest, {(width, lo): [masks]}) from a dump directory."""
    path = os.path.join(directory, "manifest.json")
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DumpError(f"cannot read manifest: {exc}") from exc
    for key in ("n", "s", "upper_bounds", "parts"):
        if key not in manifest:
            raise DumpError(f"manifest missing field {key!r}")
    parts = {}
    for spec in manifest["parts"]:
        width, lo = spec["width"], spec["lower_bound"]
        nbytes = bitmap_byte_length(width)
        try:
            with open(os.path.join(directory, spec["file"]), "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise DumpError(f"cannot read part {spec['file']}: {exc}") from exc
        if len(raw) < 9 or raw[0] != width:
            raise DumpError(f"part {spec['file']} has a bad header")
        count = int.from_bytes(raw[1:9], "little")
        if count != spec["count"] or len(raw) != 9 + count * nbytes:
            raise DumpError(f"part {spec['file']} is truncated")
        masks = [
            int.from_bytes(raw[9 + t * nbytes : 9 + (t + 1) * nbytes], "little")
            for t in range(count)
        ]
        parts[(width, lo)] = masks
    return manifest, parts
