"""Unitary time evolution ``psi(t) = exp(-iHt) psi0`` for real symmetric
Hamiltonians (hbar = 1).

States are plain complex numpy vectors. The propagator works in the real
eigenbasis of ``H``; an RK4 integrator is kept as an independent check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .spectra import Spectrum, eigendecompose

NORM_TOL = 1e-9
GOLDEN_TOL = 1e-6
DEFAULT_STEPS = 400
PEAK_RTOL = 0.01


class IntegrationError(ArithmeticError):
    pass


# -- states -------------------------------------------------------------

def _normalized(psi: np.ndarray) -> np.ndarray:
    return psi / np.linalg.norm(psi)


def state_uniform(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("empty support")
    return np.full(n, 1.0 / math.sqrt(n), dtype=complex)


def state_basis(n: int, k: int) -> np.ndarray:
    if not 0 <= k < n:
        raise ValueError(f"vertex {k} out of range for n={n}")
    psi = np.zeros(n, dtype=complex)
    psi[k] = 1.0
    return psi


def state_uniform_excluding(n: int, excluded) -> np.ndarray:
    """Equal superposition over every vertex not in ``excluded``."""
    excluded = set(int(v) for v in excluded)
    if any(not 0 <= v < n for v in excluded):
        raise ValueError(f"excluded vertices out of range for n={n}")
    if len(excluded) >= n:
        raise ValueError("empty support")
    psi = np.ones(n, dtype=complex)
    psi[list(excluded)] = 0.0
    return _normalized(psi)


def state_superposition(n: int, vertices, signs=None) -> np.ndarray:
    """``sum_k signs[k] |vertices[k]>`` normalized, e.g. ``(|a> - |b>)/sqrt 2``."""
    vertices = list(vertices)
    if not vertices:
        raise ValueError("empty support")
    signs = np.ones(len(vertices)) if signs is None else np.asarray(signs, dtype=float)
    psi = np.zeros(n, dtype=complex)
    np.add.at(psi, vertices, signs)
    return _normalized(psi)


def check_state(psi: np.ndarray, tol: float = NORM_TOL) -> None:
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state is not normalized: norm = {norm}")


# -- Hamiltonian ----------------------------------------------------------

class Hamiltonian:
    """Real symmetric matrix with a lazily computed eigendecomposition."""

    def __init__(self, matrix):
        M = np.array(matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"Hamiltonian must be square, got shape {M.shape}")
        scale = max(1.0, float(np.abs(M).max(initial=0.0)))
        if np.abs(M - M.T).max(initial=0.0) > 1e-12 * scale:
            raise ValueError("Hamiltonian must be symmetric")
        M.setflags(write=False)
        self.matrix = M

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> Spectrum:
        return eigendecompose(self.matrix)

    def energy(self, psi: np.ndarray) -> float:
        return float(np.real(np.vdot(psi, self.matrix @ psi)))

    def __repr__(self):
        return f"Hamiltonian(dim={self.dim})"


def _as_hamiltonian(H) -> Hamiltonian:
    return H if isinstance(H, Hamiltonian) else Hamiltonian(H)


def _check_dims(H: Hamiltonian, *states):
    for psi in states:
        if psi.shape != (H.dim,):
            raise ValueError(f"dimension mismatch: state {psi.shape} vs Hamiltonian {H.dim}")


def evolve(H, psi0: np.ndarray, t: float) -> np.ndarray:
    """``exp(-iHt) psi0`` through ``V exp(-i lambda t) V^T``."""
    H = _as_hamiltonian(H)
    psi0 = np.asarray(psi0, dtype=complex)
    _check_dims(H, psi0)
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    V = H.spectrum.eigenvectors
    lam = H.spectrum.eigenvalues
    return V @ (np.exp(-1j * lam * t) * (V.T @ psi0))


def evolve_ode(H, psi0: np.ndarray, t: float, dt: float) -> np.ndarray:
    """Classical RK4 for ``dpsi/dt = -iH psi`` with ``ceil(|t|/dt)`` equal
    steps. No renormalization; norm drift is left visible."""
    H = _as_hamiltonian(H)
    psi = np.array(psi0, dtype=complex)
    _check_dims(H, psi)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    steps = math.ceil(abs(t) / dt)
    if steps == 0:
        return psi
    h = t / steps
    M = H.matrix

    def f(y):
        return -1j * (M @ y)

    for _ in range(steps):
        k1 = f(psi)
        k2 = f(psi + 0.5 * h * k1)
        k3 = f(psi + 0.5 * h * k2)
        k4 = f(psi + h * k3)
        psi = psi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(psi)):
            raise IntegrationError("non-finite amplitude during RK4 integration")
    return psi


def evolve_ode_path(H, psi0, times, dt: float) -> np.ndarray:
    """RK4 states at increasing ``times`` (rows), starting from ``t = 0``."""
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValueError("times must be non-negative and increasing")
    out = np.empty((times.size, len(psi0)), dtype=complex)
    psi, t_prev = np.asarray(psi0, dtype=complex), 0.0
    for k, t in enumerate(times):
        psi = evolve_ode(H, psi, t - t_prev, dt)
        out[k] = psi
        t_prev = t
    return out


# -- traces -------------------------------------------------------------

class Propagator:
    """Amplitude ``<target| exp(-iHt) |psi0>`` as a function of t, after one
    factorization of H."""

    def __init__(self, H, psi0, target):
        H = _as_hamiltonian(H)
        psi0 = np.asarray(psi0, dtype=complex)
        target = np.asarray(target, dtype=complex)
        _check_dims(H, psi0, target)
        V = H.spectrum.eigenvectors
        self.energies = H.spectrum.eigenvalues
        self.weights = (V.T @ target).conj() * (V.T @ psi0)

    def amplitude(self, t):
        t = np.asarray(t, dtype=float)
        phases = np.exp(-1j * np.multiply.outer(t, self.energies))
        return phases @ self.weights

    def probability(self, t):
        return np.abs(self.amplitude(t)) ** 2


def golden_section_max(f, a: float, b: float, tol: float = GOLDEN_TOL, max_iter: int = 200):
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    times: np.ndarray
    probabilities: np.ndarray
    peak_value: float
    peak_time: float

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(self.probabilities < -NORM_TOL) or np.any(self.probabilities > 1 + NORM_TOL):
            raise ValueError("probabilities must lie in [0, 1]")

    def to_csv(self, path: str | Path | None = None, header=("t", "probability")) -> str:
        lines = [",".join(header)]
        lines += [f"{float(t)!r},{float(P)!r}" for t, P in zip(self.times, self.probabilities)]
        text = "\n".join(lines) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text

    def summary(self) -> dict:
        return {"peak_value": float(self.peak_value), "peak_time": float(self.peak_time)}

    def summary_json(self, path: str | Path | None = None) -> str:
        text = json.dumps(self.summary())
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    @classmethod
    def from_csv(cls, path: str | Path) -> "EvolutionTrace":
        rows = Path(path).read_text().splitlines()[1:]
        data = np.array([[float(x) for x in r.split(",")[:2]] for r in rows])
        k = int(np.argmax(data[:, 1]))
        return cls(data[:, 0], data[:, 1], float(data[k, 1]), float(data[k, 0]))


def first_peak_index(values: np.ndarray, rtol: float = PEAK_RTOL) -> int:
    """Earliest local maximum within ``rtol`` (relative) of the global maximum.

    Several Rabi periods can produce near-equal maxima; the first one is the
    running time of the protocol.
    """
    top = values.max()
    good = values >= (1.0 - rtol) * top
    left = np.r_[True, values[1:] >= values[:-1]]
    right = np.r_[values[:-1] >= values[1:], True]
    return int(np.flatnonzero(good & left & right)[0])


def trace_probability(H, psi0, target, t_max: float, steps: int = DEFAULT_STEPS, refine: bool = True,
                      peak_rtol: float = PEAK_RTOL) -> EvolutionTrace:
    """``|<target|exp(-iHt)|psi0>|^2`` on ``linspace(0, t_max, steps)``.

    The peak is the first grid maximum within ``peak_rtol`` of the largest
    value, refined by golden-section search within one grid step.
    """
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    if t_max <= 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    prop = Propagator(H, psi0, target)
    times = np.linspace(0.0, t_max, steps)
    probs = prop.probability(times)
    k = first_peak_index(probs, peak_rtol)
    peak_t, peak_p = float(times[k]), float(probs[k])
    if refine:
        step = times[1] - times[0]
        lo, hi = max(0.0, times[k] - step), min(t_max, times[k] + step)
        t_ref, p_ref = golden_section_max(lambda t: float(prop.probability(t)), lo, hi)
        if p_ref > peak_p:
            peak_t, peak_p = t_ref, p_ref
    return EvolutionTrace(times, probs, peak_p, peak_t)
