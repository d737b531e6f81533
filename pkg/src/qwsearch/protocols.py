"""State transfer and Bell-pair generation on a network of XX-coupled
qubits, in the single-excitation sector.

Transfer: sender ``i`` and receiver ``j`` set their site energies to -1;
all couplings are ``gamma = 1/(np)``. The excitation arrives at
``T = pi sqrt(n/2)``.

Bell pair: Charlie (``w``), Alice (``a``) and Bob (``b``) set their site
energies to -1 and the couplings at Charlie become ``sqrt(2)/d_C``. Starting
from ``|w>``, the state ``(|a> + |b>)/sqrt 2`` is reached at
``T = pi sqrt(n) / 2``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import (
    DEFAULT_STEPS,
    EvolutionTrace,
    Hamiltonian,
    Propagator,
    state_basis,
    state_superposition,
    state_uniform_excluding,
    trace_probability,
)
from .graphs import Graph, independent_vertices
from .spectra import adjacency_spectrum

KINDS = ("transfer", "bell")


class ProtocolError(ValueError):
    pass


class AdjacentEndpointsWarning(UserWarning):
    pass


def default_gamma(g: Graph) -> float:
    """``1/(np)`` for G(n, p), ``1/lambda_1`` for any other graph."""
    if g.model == "erdos_renyi" and g.param:
        return 1.0 / (g.n * g.param)
    lam1 = adjacency_spectrum(g).lambda1
    if lam1 <= 0:
        raise ProtocolError("graph has no edges; gamma undefined")
    return 1.0 / lam1


@dataclass(frozen=True, eq=False)
class ProtocolSpec:
    """``endpoints`` is ``(i, j)`` for transfer and ``(w, a, b)`` for bell."""

    graph: Graph
    kind: str
    endpoints: tuple[int, ...]
    gamma: float | None = None
    charlie_coupling: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ProtocolError(f"unknown protocol kind {self.kind!r}")
        ends = tuple(int(v) for v in self.endpoints)
        want = 2 if self.kind == "transfer" else 3
        if len(ends) != want:
            raise ProtocolError(f"{self.kind} needs {want} endpoints, got {ends}")
        if len(set(ends)) != want:
            raise ProtocolError(f"endpoints must be distinct, got {ends}")
        if any(not 0 <= v < self.graph.n for v in ends):
            raise ProtocolError(f"endpoints {ends} out of range for n={self.graph.n}")
        object.__setattr__(self, "endpoints", ends)
        adjacent = [(u, v) for k, u in enumerate(ends) for v in ends[k + 1:] if self.graph.has_edge(u, v)]
        if adjacent:
            warnings.warn(f"endpoints {adjacent} are adjacent; protocol fidelity will degrade",
                          AdjacentEndpointsWarning, stacklevel=3)
        if self.gamma is None:
            object.__setattr__(self, "gamma", default_gamma(self.graph))
        if self.kind == "bell" and self.charlie_coupling is None:
            d_c = int(self.graph.degrees[ends[0]])
            if d_c == 0:
                raise ProtocolError(f"Charlie's vertex {ends[0]} is isolated")
            object.__setattr__(self, "charlie_coupling", math.sqrt(2.0) / d_c)

    @classmethod
    def auto(cls, graph: Graph, kind: str, first: int | None = None, **kw) -> "ProtocolSpec":
        """Spec with the lexicographically smallest pairwise non-adjacent
        endpoints."""
        k = 2 if kind == "transfer" else 3
        return cls(graph, kind, independent_vertices(graph, k, first=first), **kw)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def predicted_time(self) -> float:
        return transfer_time(self.n) if self.kind == "transfer" else bell_time(self.n)


def transfer_time(n: int) -> float:
    return math.pi * math.sqrt(n / 2.0)


def bell_time(n: int) -> float:
    return math.pi * math.sqrt(n) / 2.0


def build_transfer_hamiltonian(spec: ProtocolSpec) -> Hamiltonian:
    """``-|i><i| - |j><j| - gamma A``."""
    i, j = spec.endpoints
    H = -spec.gamma * spec.graph.as_float()
    H[i, i] -= 1.0
    H[j, j] -= 1.0
    return Hamiltonian(H)


def build_bell_hamiltonian(spec: ProtocolSpec) -> Hamiltonian:
    """Site energies -1 at ``w, a, b``; Charlie's edges carry
    ``-charlie_coupling``, every other edge ``-gamma``."""
    w, a, b = spec.endpoints
    if spec.graph.degrees[w] == 0:
        raise ProtocolError(f"Charlie's vertex {w} is isolated")
    A = spec.graph.as_float()
    H = -spec.gamma * A
    H[w, :] = -spec.charlie_coupling * A[w, :]
    H[:, w] = -spec.charlie_coupling * A[:, w]
    for v in (w, a, b):
        H[v, v] = -1.0
    return Hamiltonian(H)


def build_protocol_hamiltonian(spec: ProtocolSpec) -> Hamiltonian:
    return build_transfer_hamiltonian(spec) if spec.kind == "transfer" else build_bell_hamiltonian(spec)


def effective_3level(kind: str, n: int) -> np.ndarray:
    """Projected Hamiltonian on the resonant subspace: diagonal -1,
    nearest-neighbour couplings ``-1/sqrt(n)`` (transfer) or
    ``-sqrt(2/n)`` (bell), zero corners."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if kind == "transfer":
        g = 1.0 / math.sqrt(n)
    elif kind == "bell":
        g = math.sqrt(2.0 / n)
    else:
        raise ProtocolError(f"unknown protocol kind {kind!r}")
    return np.array([[-1.0, -g, 0.0], [-g, -1.0, -g], [0.0, -g, -1.0]])


def three_level_fidelity(kind: str, n: int, t):
    """End-to-end probability of the 3-level chain, ``sin^4(g t / sqrt 2)``.

    The commonly quoted ``sin^2`` form has the same zeros and maxima.
    """
    g = -effective_3level(kind, n)[0, 1]
    return np.sin(g * np.asarray(t, dtype=float) / math.sqrt(2.0)) ** 4


def subspace_basis(spec: ProtocolSpec) -> np.ndarray:
    """Orthonormal columns spanning the resonant subspace.

    transfer: ``|i>, |s_{not ij}>, |j>``; bell: ``|w>, |s_{not wab}>, |s_ab>``.
    """
    n = spec.n
    if spec.kind == "transfer":
        i, j = spec.endpoints
        cols = [state_basis(n, i), state_uniform_excluding(n, {i, j}), state_basis(n, j)]
    else:
        w, a, b = spec.endpoints
        cols = [state_basis(n, w), state_uniform_excluding(n, {w, a, b}), state_superposition(n, [a, b])]
    return np.column_stack([c.real for c in cols])


def project(H: Hamiltonian, basis: np.ndarray) -> np.ndarray:
    """Matrix elements ``<u|H|v>`` over the columns of ``basis``."""
    return basis.T @ H.matrix @ basis


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    kind: str
    spec: ProtocolSpec
    trace: EvolutionTrace
    predicted_time: float
    fidelity_at_predicted_time: float
    peak_fidelity: float

    def summary(self) -> dict:
        g = self.spec.graph
        return {
            "kind": self.kind,
            "n": g.n,
            "p": g.param if g.model == "erdos_renyi" else None,
            "seed": g.seed,
            "endpoints": list(self.spec.endpoints),
            "gamma": float(self.spec.gamma),
            "predicted_time": float(self.predicted_time),
            "fidelity_at_predicted_time": float(self.fidelity_at_predicted_time),
            "peak_fidelity": float(self.peak_fidelity),
            "peak_time": float(self.trace.peak_time),
        }

    def to_json(self, path: str | Path | None = None) -> str:
        text = json.dumps(self.summary())
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    def to_csv(self, path: str | Path | None = None) -> str:
        return self.trace.to_csv(path, header=("t", "fidelity"))


def _run(spec: ProtocolSpec, H: Hamiltonian, psi0, target, t_max, steps) -> ProtocolResult:
    T = spec.predicted_time
    t_max = 2.0 * T if t_max is None else t_max
    trace = trace_probability(H, psi0, target, t_max, steps)
    at_T = float(Propagator(H, psi0, target).probability(T))
    return ProtocolResult(spec.kind, spec, trace, T, at_T, trace.peak_value)


def run_transfer(spec: ProtocolSpec, t_max: float | None = None, steps: int = DEFAULT_STEPS) -> ProtocolResult:
    """``|<j|exp(-iHt)|i>|^2`` over ``[0, t_max]`` (default ``2T``)."""
    if spec.kind != "transfer":
        raise ProtocolError("run_transfer needs a transfer spec")
    i, j = spec.endpoints
    H = build_transfer_hamiltonian(spec)
    return _run(spec, H, state_basis(spec.n, i), state_basis(spec.n, j), t_max, steps)


def run_bell(spec: ProtocolSpec, t_max: float | None = None, steps: int = DEFAULT_STEPS) -> ProtocolResult:
    """``|<s_ab|exp(-iHt)|w>|^2`` over ``[0, t_max]`` (default ``2T``)."""
    if spec.kind != "bell":
        raise ProtocolError("run_bell needs a bell spec")
    w, a, b = spec.endpoints
    H = build_bell_hamiltonian(spec)
    return _run(spec, H, state_basis(spec.n, w), state_superposition(spec.n, [a, b]), t_max, steps)


def bell_leakage(spec: ProtocolSpec, times) -> np.ndarray:
    """Population of the antisymmetric state ``(|a> - |b>)/sqrt 2``."""
    w, a, b = spec.endpoints
    H = build_bell_hamiltonian(spec)
    minus = state_superposition(spec.n, [a, b], [1.0, -1.0])
    return Propagator(H, state_basis(spec.n, w), minus).probability(times)
