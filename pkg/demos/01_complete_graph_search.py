"""Search on the complete graph: the analog of Grover's algorithm.

With gamma = 1/(n-1) the marked vertex and the uniform state over the other
vertices are degenerate, and the walk rotates between them in time about
pi sqrt(n) / 2.
"""

import math

from qwsearch import SearchInstance, complete, run_search

for n in (64, 256, 1024):
    si = SearchInstance(complete(n), w=0)
    tr = run_search(si)
    print(f"n={n:5d}  gamma={si.gamma:.5f}  peak P_w={tr.peak_value:.4f} at t={tr.peak_time:7.2f}"
          f"  (pi sqrt(n)/2 = {math.pi * math.sqrt(n) / 2:7.2f})")
