"""Moving a single excitation between two non-adjacent qubits of a random
network. Sender and receiver lower their site energies to -1; the transfer
completes at T = pi sqrt(n/2)."""

import numpy as np

from qwsearch import ProtocolSpec, erdos_renyi, run_transfer
from qwsearch.protocols import three_level_fidelity

for n, p in ((100, 0.2), (500, 0.1), (1000, 0.1)):
    res = run_transfer(ProtocolSpec.auto(erdos_renyi(n, p, seed=42), "transfer"))
    print(f"n={n:5d} p={p}: endpoints={res.spec.endpoints} T={res.predicted_time:6.2f}"
          f"  F(T)={res.fidelity_at_predicted_time:.3f}  peak={res.peak_fidelity:.3f} at t={res.trace.peak_time:.2f}")

res = run_transfer(ProtocolSpec.auto(erdos_renyi(1000, 0.1, seed=42), "transfer"), steps=11,
                   t_max=2 * np.pi * np.sqrt(500))
print("t, full network, three-level chain")
for t, f in zip(res.trace.times, res.trace.probabilities):
    print(f"{t:7.2f} {f:.3f} {three_level_fidelity('transfer', 1000, t):.3f}")
