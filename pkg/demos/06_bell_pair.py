"""Sharing a Bell pair between Alice and Bob through Charlie.

Starting from an excitation on Charlie's qubit, the network evolves into
(|a> + |b>)/sqrt 2 at T = pi sqrt(n) / 2; the antisymmetric combination is
never populated by symmetry, up to degree fluctuations.
"""

import numpy as np

from qwsearch import ProtocolSpec, erdos_renyi, run_bell
from qwsearch.protocols import bell_leakage

n = 1000
for seed in range(42, 47):
    spec = ProtocolSpec.auto(erdos_renyi(n, 0.1, seed), "bell")
    res = run_bell(spec)
    leak = bell_leakage(spec, np.linspace(0, res.predicted_time, 200)).max()
    print(f"seed={seed} (w,a,b)={spec.endpoints} F(T={res.predicted_time:.2f})={res.fidelity_at_predicted_time:.3f}"
          f" max leakage={leak:.4f}")
