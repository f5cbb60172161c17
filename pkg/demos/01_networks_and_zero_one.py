"""Comparator networks, the zero-one principle, standard form, and pruning.

Run:  python3 demos/01_networks_and_zero_one.py
"""

from sortnetsize import (
    ComparatorNetwork,
    apply_network,
    batcher_network,
    is_sorting_network,
    prune_network,
    standardize,
)

# A comparator network is a sequence of comparators ("c", i, j): min of the
# two channel values lands on i, max on j; exchanges ("x", i, j) just swap.
# This one mixes orientations and exchanges, yet sorts all of B^3.
net = ComparatorNetwork(3, [("c", 2, 0), ("x", 0, 1), ("c", 0, 2), ("x", 1, 2), ("c", 1, 2)])

print("network:", net.ops)
print("size (comparators only):", net.size)

# The zero-one principle: a network sorts every input sequence exactly if it
# sorts every Boolean input, so 2^w evaluations decide sortingness.
print("sorts all Boolean inputs:", is_sorting_network(net))

# Bit i of the integer code is the value on channel i.
x = 0b101
print(f"acting on {x:03b} ->", format(apply_network(net, x), "03b"))

# Every network rewrites into an equivalent standard form: ascending
# comparators first, exchanges last, same size and same action.
std = standardize(net)
print("standard form:", std.ops)
assert all(apply_network(std, v) == apply_network(net, v) for v in range(8))

# Pruning removes the path a maximal value takes from a chosen input; for a
# sorting network the result is a sorting network one channel smaller.
five = batcher_network(5)
print("\n5-channel odd-even merge network, size", five.size)
for i in range(5):
    pruned, removed = prune_network(five, i)
    print(f"  prune input {i}: removes {removed} comparators -> size {pruned.size},",
          "sorts" if is_sorting_network(pruned) else "BROKEN")

# The best channel removes at least ceil(log2 5) = 3 comparators; iterating
# this observation is exactly Van Voorhis's lower bound argument.
