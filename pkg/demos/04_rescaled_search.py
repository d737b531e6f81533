"""Search with a rescaled graph Hamiltonian.

Given the spectrum of a normalized graph Hamiltonian H1 (top eigenvalue 1,
the rest within [-c, c]), a rescaling (1 + r) H1 can always be found that
puts the search in resonance; evolving for pi/(2 delta) then finds the
marked vertex with probability at least about (1 - c)/(1 + c).
"""

import math

import numpy as np

from qwsearch import SearchInstance, lemma1_bound, random_regular
from qwsearch.dynamics import Propagator, state_basis, state_uniform
from qwsearch.search import rescaled_search_overlap, lemma1_rescaling, delta_estimate, rescale_eigenvalues
from qwsearch.spectra import Spectrum

rng = np.random.default_rng(1)
for c in (0.1, 0.3, 0.5):
    lam = np.r_[1.0, np.sort(rng.uniform(-c, c, 49))[::-1]]
    a = rng.normal(size=50)
    out = rescaled_search_overlap(lam, a / np.linalg.norm(a))
    print(f"synthetic c={c}: r={out['r']:+.4f} delta={out['delta']:.4f} P={out['probability']:.3f}"
          f" >= bound {lemma1_bound(out['c']):.3f}")

n, d = 500, 4
g = random_regular(n, d, seed=3)
base = SearchInstance(g, w=0)
h1 = base.normalized_h1_spectrum()
c = float(np.abs(h1.eigenvalues[1:]).max())
r = lemma1_rescaling(h1, 0)
delta = delta_estimate(Spectrum(rescale_eigenvalues(h1.eigenvalues, r), h1.eigenvectors), 0)
si = SearchInstance(g, w=0, rescale_r=r)
T = math.pi / (2 * delta)
P = float(Propagator(si.hamiltonian, state_uniform(n), state_basis(n, 0)).probability(T))
print(f"{d}-regular n={n}: c={c:.3f} r={r:+.4f} T={T:.1f} P(T)={P:.3f} bound={lemma1_bound(c):.3f}")
