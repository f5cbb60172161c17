import math

import pytest

from sortnetsize.search import (
    BoundsTable,
    DumpError,
    SearchError,
    UPPER_BOUNDS,
    huffman_update,
    improve,
    load_dump,
    memo_min_size,
    min_size,
    minimal_size,
    successor_update,
    van_voorhis_chain,
    write_dump,
)
from sortnetsize.canon import canonical_bits
from sortnetsize.seqset import BoolSeqSet

from conftest import exhaustive_min_size, random_well_behaved


KNOWN = {1: 0, 2: 1, 3: 3, 4: 5, 5: 9, 6: 12, 7: 16, 8: 19}


def test_min_size_small():
    for n in range(1, 7):
        value, _ = min_size(n)
        assert value == KNOWN[n], n


def test_min_size_range_check():
    with pytest.raises(SearchError):
        min_size(0)
    with pytest.raises(SearchError):
        min_size(13)


def test_member_of_interval_invariant(rng):
    """Every stored interval brackets the exact value (small widths)."""
    table = BoundsTable()
    for _ in range(25):
        x = random_well_behaved(4, rng)
        minimal_size(x, table)
    oracle = exhaustive_min_size(4)
    for width, bits, lo, hi in table.stored_items():
        s = memo_min_size(BoolSeqSet(width, bits))
        assert lo <= s <= hi
        if width == 4:
            assert s == oracle(bits)


def test_intervals_only_shrink_monotone(rng):
    table = BoundsTable()
    x = random_well_behaved(5, rng)
    from sortnetsize.search import _trivial

    if _trivial(x.width, x.bits):
        return
    cbits = canonical_bits(x.width, x.bits)
    entry = table.entry(x.width, cbits)
    prev = (entry.lo, entry.hi)
    while entry.lo != entry.hi:
        improve(table, x.width, cbits)
        assert entry.lo >= prev[0] and entry.hi <= prev[1]
        assert (entry.lo, entry.hi) != prev
        prev = (entry.lo, entry.hi)


def test_successor_update_fathoms_cube2():
    table = BoundsTable()
    bits = canonical_bits(2, 0b1111)
    entry = table.entry(2, bits)
    successor_update(table, 2, bits, entry)
    assert (entry.lo, entry.hi) == (1, 1)


def test_huffman_update_on_cube_reaches_van_voorhis():
    # once B^{w-1} is fathomed the Huffman bound gives s(w-1) + ceil(log2 w)
    table = BoundsTable()
    assert minimal_size(BoolSeqSet.full(4), table) == 5
    bits5 = canonical_bits(5, (1 << 32) - 1)
    entry = table.entry(5, bits5)
    while True:
        done = huffman_update(table, 5, bits5, entry)
        if done:
            break
        # drive the pruned-cube subproblem to a fixpoint
        for leaves in entry.hleaves:
            for item in leaves:
                if item is not None:
                    lo, hi = table.bounds(4, item)
                    if lo != hi:
                        improve(table, 4, item)
    assert entry.lo >= KNOWN[4] + math.ceil(math.log2(5))


def test_huffman_update_fathomed_noop():
    table = BoundsTable()
    bits = canonical_bits(2, 0b1111)
    entry = table.entry(2, bits)
    successor_update(table, 2, bits, entry)
    assert huffman_update(table, 2, bits, entry) is True


def test_memo_min_size_matches_known():
    assert memo_min_size(BoolSeqSet.full(4)) == 5
    assert memo_min_size(BoolSeqSet.full(5)) == 9
    assert memo_min_size(BoolSeqSet.of(3, [0, 1, 3, 7])) == 0


def test_memo_width_cap():
    with pytest.raises(SearchError):
        memo_min_size(BoolSeqSet.full(7))


def test_memo_vs_successive_random(rng):
    table = BoundsTable()
    for _ in range(60):
        w = rng.randint(2, 5)
        x = random_well_behaved(w, rng)
        assert memo_min_size(x) == minimal_size(x, table), (w, x.bits)


def test_exhaustive_oracle_agrees(rng):
    oracle = exhaustive_min_size(4)
    table = BoundsTable()
    for _ in range(20):
        x = random_well_behaved(4, rng)
        assert minimal_size(x, table) == oracle(x.bits)


def test_van_voorhis_chain():
    assert van_voorhis_chain(11, 35, 12) == 39
    assert van_voorhis_chain(9, 25, 10) == 29
    assert van_voorhis_chain(9, 25, 9) == 25
    assert van_voorhis_chain(1, 0, 4) == 0 + 1 + 2 + 2
    with pytest.raises(SearchError):
        van_voorhis_chain(9, 25, 8)


def test_upper_bound_table():
    assert UPPER_BOUNDS == (0, 1, 3, 5, 9, 12, 16, 19, 25, 29, 35, 39)


def test_dump_roundtrip(tmp_path):
    value, table = min_size(5)
    d = tmp_path / "dump"
    write_dump(table, str(d), 5, value)
    manifest, parts = load_dump(str(d))
    assert manifest["n"] == 5 and manifest["s"] == 9
    stored = {(w, lo): [] for w, _, lo, _ in table.stored_items()}
    for w, bits, lo, _ in table.stored_items():
        stored[(w, lo)].append(bits)
    assert {k: sorted(v) for k, v in stored.items()} == parts
    # every part file is named and counted consistently
    for spec in manifest["parts"]:
        assert spec["count"] == len(parts[(spec["width"], spec["lower_bound"])])


def test_dump_corruption_detected(tmp_path):
    value, table = min_size(5)
    d = tmp_path / "dump"
    write_dump(table, str(d), 5, value)
    manifest, _ = load_dump(str(d))
    victim = d / manifest["parts"][0]["file"]
    raw = victim.read_bytes()
    victim.write_bytes(raw[:-1])
    with pytest.raises(DumpError):
        load_dump(str(d))
    with pytest.raises(DumpError):
        load_dump(str(tmp_path / "missing"))


def test_parallel_matches_sequential():
    seq, _ = min_size(6)
    par, _ = min_size(6, threads=2)
    assert seq == par == 12


def test_table_bounds_defaults():
    table = BoundsTable()
    # trivially sortable -> fathomed at zero, not stored
    assert table.bounds(3, 0b10001001) == (0, 0)
    assert table.bounds(3, (1 << 8) - 1) == (1, 3)
    assert list(table.stored_items()) == []
