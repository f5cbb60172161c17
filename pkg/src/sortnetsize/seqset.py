"""Sets of Boolean sequences and the operations the size search is built on.

A sequence of width ``w`` assigns a Boolean value to each of ``w`` channels
and is stored as an integer code in ``[0, 2**w)`` whose bit ``i`` is the
value of channel ``i``.  A set of such sequences is stored as a bit-vector
of length ``2**w``, held in a single Python integer: bit ``v`` of
``BoolSeqSet.bits`` is set exactly when the sequence with code ``v`` is a
member.  This makes the comparator action, channel permutations and the
hypercube searches below cheap bulk bit operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

MAX_WIDTH = 16

_REVERSED_BYTE = bytes(int(f"{b:08b}"[::-1], 2) for b in range(256))


class WidthError(ValueError):
    """A width is out of range or two operands disagree on width."""


def _check_width(width: int) -> None:
    if not 1 <= width <= MAX_WIDTH:
        raise WidthError(f"width must be in 1..{MAX_WIDTH}, got {width}")


@lru_cache(maxsize=None)
def channel_mask(width: int, i: int) -> int:
    """Bit-vector of all codes ``v`` in ``[0, 2**width)`` with bit ``i`` set."""
    period = 1 << (i + 1)
    block = ((1 << (1 << i)) - 1) << (1 << i)
    repeat = ((1 << (1 << width)) - 1) // ((1 << period) - 1)
    return repeat * block


@lru_cache(maxsize=None)
def popcount_mask(width: int, k: int) -> int:
    """Bit-vector of all codes of Hamming weight ``k``."""
    m = 0
    for v in range(1 << width):
        if v.bit_count() == k:
            m |= 1 << v
    return m


@lru_cache(maxsize=None)
def _swap_masks(width: int, i: int, j: int):
    """Masks used to move codes between the (i=1,j=0) and (i=0,j=1) slices."""
    ci, cj = channel_mask(width, i), channel_mask(width, j)
    sel10 = ci & ~cj
    sel01 = cj & ~ci
    return sel10, sel01, (1 << j) - (1 << i)


def comparator_bits(width: int, bits: int, i: int, j: int) -> int:
    """Comparator action on a raw bit-vector: min to channel i, max to j (i < j)."""
    sel10, _, delta = _swap_masks(width, i, j)
    moved = bits & sel10
    return (bits & ~sel10) | (moved << delta)


def exchange_bits(width: int, bits: int, i: int, j: int) -> int:
    """Transposition of channels i and j on a raw bit-vector."""
    if i > j:
        i, j = j, i
    sel10, sel01, delta = _swap_masks(width, i, j)
    return (bits & ~(sel10 | sel01)) | ((bits & sel10) << delta) | ((bits & sel01) >> delta)


def negate_bits(width: int, bits: int) -> int:
    """Elementwise Boolean negation: code v becomes its complement."""
    size = 1 << width
    if size >= 8:
        raw = bits.to_bytes(size >> 3, "little")
        return int.from_bytes(raw.translate(_REVERSED_BYTE)[::-1], "little")
    out = 0
    full = size - 1
    while bits:
        v = bits.bit_length() - 1
        bits ^= 1 << v
        out |= 1 << (full - v)
    return out


def permute_bits(width: int, bits: int, perm) -> int:
    """Permutation action on a raw bit-vector: bit i of each code moves to perm[i]."""
    for i, j in _perm_transpositions(tuple(perm)):
        bits = exchange_bits(width, bits, i, j)
    return bits


@lru_cache(maxsize=None)
def _perm_transpositions(perm: tuple) -> tuple:
    """Decompose a permutation into transpositions realizing it left to right."""
    cur = list(range(len(perm)))
    pos = list(range(len(perm)))
    swaps = []
    for c in range(len(perm)):
        want = perm[c]
        have = pos[c]
        if have != want:
            other = cur[want]
            swaps.append((have, want))
            cur[have], cur[want] = cur[want], cur[have]
            pos[c], pos[other] = want, have
    return tuple(swaps)


def prune_bits(width: int, bits: int, i: int) -> int:
    """Keep codes with bit i set and delete that bit (higher bits shift down)."""
    low = (1 << (1 << i)) - 1
    step = 1 << (i + 1)
    out = 0
    shift = 1 << i
    for h in range(1 << (width - 1 - i)):
        out |= ((bits >> (h * step + shift)) & low) << (h * shift)
    return out


def member_codes(bits: int):
    """Iterate set codes in increasing order."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


@dataclass(frozen=True)
class Comparator:
    """Standard comparator [i, j] with i < j: min lands on i, max on j."""

    i: int
    j: int

    def __post_init__(self):
        if not 0 <= self.i < self.j:
            raise ValueError(f"comparator must have 0 <= i < j, got [{self.i}, {self.j}]")


@dataclass(frozen=True)
class BoolSeqSet:
    """A set of Boolean sequences of fixed width, as a packed bit-vector."""

    width: int
    bits: int

    def __post_init__(self):
        _check_width(self.width)
        if not 0 <= self.bits < 1 << (1 << self.width):
            raise ValueError("bit-vector has bits outside [0, 2**width)")

    @classmethod
    def full(cls, width: int) -> "BoolSeqSet":
        return cls(width, (1 << (1 << width)) - 1)

    @classmethod
    def empty(cls, width: int) -> "BoolSeqSet":
        return cls(width, 0)

    @classmethod
    def of(cls, width: int, codes) -> "BoolSeqSet":
        bits = 0
        for v in codes:
            if not 0 <= v < 1 << width:
                raise ValueError(f"code {v} out of range for width {width}")
            bits |= 1 << v
        return cls(width, bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, code: int) -> bool:
        return 0 <= code < 1 << self.width and self.bits >> code & 1 == 1

    def __iter__(self):
        return member_codes(self.bits)

    def issubset(self, other: "BoolSeqSet") -> bool:
        return self.width == other.width and self.bits & ~other.bits == 0

    def to_bytes(self) -> bytes:
        """Packed form: bit v of the set is bit (v & 7) of byte (v >> 3)."""
        nbytes = max(1, (1 << self.width) >> 3)
        return self.bits.to_bytes(nbytes, "little")

    @classmethod
    def from_bytes(cls, width: int, raw: bytes) -> "BoolSeqSet":
        _check_width(width)
        nbytes = max(1, (1 << width) >> 3)
        if len(raw) != nbytes:
            raise ValueError(f"expected {nbytes} bytes for width {width}, got {len(raw)}")
        return cls(width, int.from_bytes(raw, "little"))


def bitmap_byte_length(width: int) -> int:
    return max(1, (1 << width) >> 3)


def _same_width(x: BoolSeqSet, y_width: int) -> None:
    if x.width != y_width:
        raise WidthError(f"width mismatch: {x.width} != {y_width}")


def apply_comparator(x: BoolSeqSet, c: Comparator) -> BoolSeqSet:
    """Elementwise comparator action { s^[i,j] | s in X }."""
    if c.j >= x.width:
        raise WidthError(f"comparator [{c.i}, {c.j}] does not fit width {x.width}")
    return BoolSeqSet(x.width, comparator_bits(x.width, x.bits, c.i, c.j))


def transform(x: BoolSeqSet, perm, negate: bool = False) -> BoolSeqSet:
    """Apply a channel permutation elementwise, then optional Boolean negation.

    ``perm`` maps channel c to perm[c]; it must be a bijection on range(width).
    """
    perm = tuple(perm)
    if len(perm) != x.width:
        raise WidthError(f"permutation of length {len(perm)} for width {x.width}")
    if sorted(perm) != list(range(x.width)):
        raise ValueError(f"not a permutation: {perm}")
    bits = permute_bits(x.width, x.bits, perm)
    if negate:
        bits = negate_bits(x.width, bits)
    return BoolSeqSet(x.width, bits)


def prune(x: BoolSeqSet, i: int) -> BoolSeqSet:
    """Members with channel i set, with that channel deleted; width drops by one."""
    if x.width < 2:
        raise WidthError("cannot prune a width-1 set")
    if not 0 <= i < x.width:
        raise ValueError(f"channel {i} out of range for width {x.width}")
    return BoolSeqSet(x.width - 1, prune_bits(x.width, x.bits, i))


def prunable_channels(x: BoolSeqSet) -> tuple:
    """Channels whose one-hot sequence is a member, in increasing order."""
    return tuple(i for i in range(x.width) if x.bits >> (1 << i) & 1)


def weight(x: BoolSeqSet) -> int:
    """Sum of Hamming distances over all ordered member pairs."""
    return weight_bits(x.width, x.bits)


def weight_bits(width: int, bits: int) -> int:
    n = bits.bit_count()
    total = 0
    for i in range(width):
        ones = (bits & channel_mask(width, i)).bit_count()
        total += 2 * ones * (n - ones)
    return total


def successors(x: BoolSeqSet):
    """Comparator images that are not permutation-similar to X.

    Returns (comparator, image) pairs for each standard comparator whose
    image differs from both X and X with the two channels transposed; by the
    strict-weight-decrease argument those two equalities are exactly the
    permutation-similar (redundant) cases.
    """
    out = []
    for (i, j), ybits in successor_bits(x.width, x.bits):
        out.append((Comparator(i, j), BoolSeqSet(x.width, ybits)))
    return out


def successor_bits(width: int, bits: int):
    out = []
    for i in range(width - 1):
        for j in range(i + 1, width):
            ybits = comparator_bits(width, bits, i, j)
            if ybits == bits:
                continue
            if ybits == exchange_bits(width, bits, i, j):
                continue
            out.append(((i, j), ybits))
    return out


def interior(x: BoolSeqSet) -> BoolSeqSet:
    """Largest well-behaved subset: members on some all-zeros-to-all-ones chain in X."""
    return BoolSeqSet(x.width, interior_bits(x.width, x.bits))


def _forward_reach(width: int, bits: int, start: int) -> int:
    """Members reachable from ``start`` by repeatedly setting one bit, inside X."""
    reached = 0
    cur = bits & start
    while cur:
        reached |= cur
        nxt = 0
        for i in range(width):
            nxt |= (cur & ~channel_mask(width, i)) << (1 << i)
        cur = nxt & bits & ~reached
    return reached


def _backward_reach(width: int, bits: int) -> int:
    """Members from which the all-ones code is reachable, inside X."""
    top = 1 << ((1 << width) - 1)
    reached = 0
    cur = bits & top
    while cur:
        reached |= cur
        nxt = 0
        for i in range(width):
            nxt |= (cur & channel_mask(width, i)) >> (1 << i)
        cur = nxt & bits & ~reached
    return reached


def interior_bits(width: int, bits: int) -> int:
    return _forward_reach(width, bits, 1) & _backward_reach(width, bits)


def pruned_interior(x: BoolSeqSet, i: int, well_behaved: bool = False) -> BoolSeqSet:
    """interior(prune(x, i)) for a prunable channel i.

    The pruning is folded into the forward search by starting it at the
    one-hot code of channel i; when the caller knows X is well-behaved the
    backward search is redundant and skipped.
    """
    if i not in prunable_channels(x):
        raise ValueError(f"channel {i} is not prunable")
    return BoolSeqSet(x.width - 1, pruned_interior_bits(x.width, x.bits, i, well_behaved))


def pruned_interior_bits(width: int, bits: int, i: int, well_behaved: bool = False) -> int:
    fwd = _forward_reach(width, bits, 1 << (1 << i))
    if not well_behaved:
        fwd &= _backward_reach(width, fwd)
    return prune_bits(width, fwd, i)


def is_trivially_sortable(x: BoolSeqSet) -> bool:
    """For well-behaved X: sortable with zero comparators iff |X| <= width + 1."""
    return len(x) <= x.width + 1
