"""The successive-approximation search for s(n), and chained lower bounds.

Run:  python3 demos/03_minimal_size_search.py
"""

import time
from collections import Counter

from sortnetsize import min_size, van_voorhis_chain

# Each well-behaved set holds an interval [lo, hi] around its exact size.
# Improving interleaves three strategies: copying the pruned set's bound
# when only one channel is prunable, the Huffman lower bound over pruned
# interiors, and the 1 + min successor recurrence.  Fathoming the full cube
# of width n yields s(n).
print("n  s(n)  seconds  stored sets")
for n in range(1, 8):
    t0 = time.perf_counter()
    value, table = min_size(n)
    dt = time.perf_counter() - t0
    stored = list(table.stored_items())
    print(f"{n}  {value:4d}  {dt:7.2f}  {len(stored)}")

# The stored table is sparse: sets whose interval still equals the default
# (trivially sortable -> {0}, otherwise [1, known upper bound]) are omitted.
widths = Counter(w for w, _, _, _ in stored)
print("width histogram of stored sets for n=7:", dict(sorted(widths.items())))

# Knowing one value exactly extends upward: s(k) >= s(k-1) + ceil(log2 k).
print("\nvan Voorhis chains")
print("  from s(9)=25  to n=10:", van_voorhis_chain(9, 25, 10))
print("  from s(11)=35 to n=12:", van_voorhis_chain(11, 35, 12))

# n=9 completes in minutes in pure Python:
#   python3 -m sortnetsize search 9 --dump /tmp/dump9
