"""Comparator networks as executable objects.

A network is an ordered list of operations on ``width`` channels: ``("c", i,
j)`` writes min(x_i, x_j) to channel i and the max to channel j (any
orientation of i, j), and ``("x", i, j)`` exchanges the two channels.  Size
counts comparators only; exchanges are free rewiring.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .seqset import WidthError, _check_width


@dataclass
class ComparatorNetwork:
    width: int
    ops: list = field(default_factory=list)

    def __post_init__(self):
        _check_width(self.width)
        for op in self.ops:
            kind, i, j = op
            if kind not in ("c", "x"):
                raise ValueError(f"unknown op kind {kind!r}")
            if i == j or not (0 <= i < self.width and 0 <= j < self.width):
                raise ValueError(f"bad channels in op {op}")

    def comparator(self, i: int, j: int) -> "ComparatorNetwork":
        self.ops.append(("c", i, j))
        return self

    def exchange(self, i: int, j: int) -> "ComparatorNetwork":
        self.ops.append(("x", i, j))
        return self

    @property
    def size(self) -> int:
        """Number of comparator operations (exchanges are free)."""
        return sum(1 for op in self.ops if op[0] == "c")

    def to_text(self) -> str:
        lines = [f"width {self.width}"]
        lines += [f"{kind} {i} {j}" for kind, i, j in self.ops]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ComparatorNetwork":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("width "):
            raise ValueError("network file must start with 'width w'")
        width = int(lines[0].split()[1])
        ops = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 3 or parts[0] not in ("c", "x"):
                raise ValueError(f"bad network line: {ln!r}")
            ops.append((parts[0], int(parts[1]), int(parts[2])))
        return cls(width, ops)


def apply_network(net: ComparatorNetwork, x: int) -> int:
    """Left-to-right action on a sequence code; bit i of x is channel i."""
    if not 0 <= x < 1 << net.width:
        raise WidthError(f"code {x} out of range for width {net.width}")
    for kind, i, j in net.ops:
        bi = x >> i & 1
        bj = x >> j & 1
        if kind == "c":
            lo, hi = bi & bj, bi | bj
            x = x & ~(1 << i | 1 << j) | lo << i | hi << j
        elif bi != bj:
            x ^= 1 << i | 1 << j
    return x


def _is_sorted_code(x: int, width: int) -> bool:
    """Channel values are non-decreasing: some suffix of ones after zeros."""
    inv = (1 << width) - 1 - x
    return inv & (inv + 1) == 0


def is_sorting_network(net: ComparatorNetwork) -> bool:
    """Zero-one principle: sorts every input iff it sorts every Boolean input."""
    return all(_is_sorted_code(apply_network(net, x), net.width) for x in range(1 << net.width))


def standardize(net: ComparatorNetwork) -> ComparatorNetwork:
    """Equivalent network of i<j comparators followed by exchanges only.

    Exchanges are commuted rightwards past each comparator, renaming its
    channels; reversed comparators emit their standard twin plus one more
    trailing exchange.  The action is preserved exactly and the comparator
    count is unchanged.
    """
    width = net.width
    suffix = list(range(width))  # suffix[c] = where the value on wire c goes
    out = []
    inv = list(range(width))
    for kind, a, b in net.ops:
        if kind == "x":
            for c in range(width):
                if suffix[c] == a:
                    suffix[c] = b
                elif suffix[c] == b:
                    suffix[c] = a
        else:
            c1, c2 = inv[a], inv[b]  # channels feeding this comparator now
            if c1 < c2:
                out.append(("c", c1, c2))
            else:
                out.append(("c", c2, c1))
                suffix[c1], suffix[c2] = suffix[c2], suffix[c1]
        for c in range(width):
            inv[suffix[c]] = c
    result = ComparatorNetwork(width, out)
    for i, j in _perm_exchanges(suffix):
        result.exchange(i, j)
    return result


def _perm_exchanges(perm):
    """Transpositions whose left-to-right action realizes the permutation."""
    perm = list(perm)
    width = len(perm)
    cur = list(range(width))
    pos = list(range(width))
    swaps = []
    for c in range(width):
        want = perm[c]
        have = pos[c]
        if have != want:
            other = cur[want]
            swaps.append((have, want))
            cur[have], cur[want] = cur[want], cur[have]
            pos[c], pos[other] = want, have
    return swaps


def prune_network(net: ComparatorNetwork, i: int):
    """Remove the max-following path from input i; returns (net', removed).

    Follows the circuit wire that a maximal value entering at channel i
    takes, deleting every comparator gate on it and shortcutting the other
    port pairs.  Requires the traced path to end at the last output, which
    holds for (partial) sorting networks.
    """
    width = net.width
    if width < 2:
        raise WidthError("cannot prune a width-1 network")
    if not 0 <= i < width:
        raise ValueError(f"channel {i} out of range")
    phantom = -1
    phys = [c - (c > i) for c in range(width)]
    phys[i] = phantom
    cur = i
    out = []
    removed = 0
    for kind, a, b in net.ops:
        if kind == "x":
            phys[a], phys[b] = phys[b], phys[a]
            if cur == a:
                cur = b
            elif cur == b:
                cur = a
        elif cur == a or cur == b:
            other = a + b - cur
            removed += 1
            phys[a] = phys[other]
            phys[b] = phantom
            cur = b
        else:
            out.append(("c", phys[a], phys[b]))
    if cur != width - 1:
        raise ValueError(
            f"pruned max path ends at output {cur}, not {width - 1}; "
            "input is not a (partial) sorting network on a prunable set"
        )
    pruned = ComparatorNetwork(width - 1, out)
    tail = [0] * (width - 1)
    for c in range(width - 1):
        tail[phys[c]] = c
    if tail != list(range(width - 1)):
        for a, b in _perm_exchanges(tail):
            pruned.exchange(a, b)
    return pruned, removed


def batcher_network(width: int) -> ComparatorNetwork:
    """Odd-even merge sorting network; optimal size for width <= 8."""
    _check_width(width)
    next_pot = 1 << (width - 1).bit_length() if width > 1 else 1
    # Padding lanes all sit past the end, as if holding maximal values.
    lanes = list(range(width)) + [None] * (next_pot - width)
    net = ComparatorNetwork(width)
    for a, b in _batcher_sort(lanes):
        if a is not None and b is not None:
            net.comparator(a, b)
    return net


def _batcher_sort(lanes):
    if len(lanes) == 2:
        yield (lanes[0], lanes[1])
    elif len(lanes) > 2:
        mid = len(lanes) // 2
        yield from _batcher_sort(lanes[:mid])
        yield from _batcher_sort(lanes[mid:])
        yield from _batcher_merge(lanes)


def _batcher_merge(lanes):
    if len(lanes) == 2:
        yield (lanes[0], lanes[1])
    elif len(lanes) > 2:
        yield from _batcher_merge(lanes[0::2])
        yield from _batcher_merge(lanes[1::2])
        for a, b in zip(lanes[1::2], lanes[2::2]):
            yield (a, b)
