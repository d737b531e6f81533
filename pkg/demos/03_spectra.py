"""Adjacency spectra of G(n, p): the Perron value near np, a near-uniform
principal eigenvector and a semicircular bulk."""

import math

import numpy as np

from qwsearch import erdos_renyi, spectral_report
from qwsearch.spectra import adjacency_spectrum, empirical_bulk_density, semicircle_density, semicircle_l1_distance

n, p = 2000, 0.1
g = erdos_renyi(n, p, seed=42)
spec = adjacency_spectrum(g)
rep = spectral_report(g, 1 / (n * p), spec)
print(f"lambda1={rep.lambda1:.2f} (np={n * p:.0f})  lambda2={rep.lambda2:.2f}  c={rep.ratio_c:.4f}")
print(f"alpha=<s|v1>={rep.alpha:.5f}  alpha^2 - rhs = {rep.alpha**2 - rep.delocalization_rhs:.4f}")

edges, dens = empirical_bulk_density(spec, bins=50)
print(f"L1 distance to the semicircle: {semicircle_l1_distance(edges, dens, n, p):.4f}")
R = 2 * math.sqrt(n * p * (1 - p))
centers = 0.5 * (edges[:-1] + edges[1:])
for k in range(0, 50, 7):
    bar = "#" * int(round(dens[k] * 3000))
    print(f"{centers[k]:7.2f} {dens[k]:.5f} {semicircle_density(centers[k], n, p):.5f} {bar}")
print(f"bulk edge +-{R:.2f}; extreme bulk eigenvalues {spec.eigenvalues[1]:.2f}, {spec.eigenvalues[-1]:.2f}")
print("mean lambda1 over 20 draws of G(300, 0.5):",
      round(float(np.mean([adjacency_spectrum(erdos_renyi(300, 0.5, s)).lambda1 for s in range(20)])), 3))
