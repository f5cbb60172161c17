"""Sequence sets: comparator actions, pruning, interiors, the Huffman bound.

Run:  python3 demos/02_sequence_sets_and_bounds.py
"""

from sortnetsize import (
    BoolSeqSet,
    Comparator,
    apply_comparator,
    huffman_min,
    interior,
    prunable_channels,
    prune,
    weight,
)

# s(X) is the fewest comparators sorting every sequence in X.  The search
# works on whole sets at once: a comparator acts elementwise.
cube = BoolSeqSet.full(6)
print("|B^6| =", len(cube), " weight =", weight(cube))

x = cube
for i, j in [(0, 1), (2, 3), (0, 2), (1, 3), (4, 5), (0, 4), (3, 5)]:
    x = apply_comparator(x, Comparator(i, j))
print("after seven comparators:", len(x), "members, weight", weight(x))

# Pruning keeps the members with a 1 on a chosen channel and deletes the
# channel; it mirrors removing a max path from a partial sorting network.
x = prune(prune(x, 5), 4)
print("after pruning channels 5 and 4:", sorted(x), "width", x.width)
print("prunable channels now:", prunable_channels(x))

# This very set is ill-behaved: one member sits on no chain from all-zeros
# to all-ones inside the set, so no pruning sequence can account for it.
# The well-behaved interior drops exactly that member.
inner = interior(x)
print("well-behaved interior drops:", sorted(set(x) - set(inner)))

# The Huffman bound: a partial sorting network for X yields, per prunable
# channel, a network for the pruned set; packing the removed comparator
# paths into a binary tree gives s(X) >= H_{1+max} of the pruned bounds.
print("\nhuffman_min examples")
print("  four zeros ->", huffman_min([0, 0, 0, 0]), " (= ceil(log2 4))")
print("  {1,2,3}    ->", huffman_min([1, 2, 3]))

# With all-zero leaves this is exactly Van Voorhis's s(n) >= s(n-1) + ceil(log2 n).
