"""Spatial search by continuous-time quantum walk.

The search Hamiltonian is ``H = -|w><w| - gamma (1 + r) A``. With
``gamma = 1/lambda_1`` the rescaled adjacency ``H1 = gamma A`` has top
eigenvalue 1; a spectral ratio ``c < 1`` then guarantees a success
probability of at least ``(1 - c)/(1 + c)`` after time ``pi / (2 delta)``,
once ``H1`` is stretched by a factor ``1 + r`` that balances the
resolvent sum of the marked vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .dynamics import (
    DEFAULT_STEPS,
    EvolutionTrace,
    Hamiltonian,
    Propagator,
    state_basis,
    state_uniform,
    state_uniform_excluding,
    trace_probability,
)
from .graphs import Graph
from .spectra import Spectrum, adjacency_spectrum, spectral_ratio, spectral_report

GAMMA_MODES = ("exact_inverse_lambda1", "mean_field_inv_np", "manual")
BISECTION_TOL = 1e-12
BISECTION_MAX_ITER = 200
DEFAULT_MARGIN = 0.05


class ConditionViolated(ValueError):
    """The spectral ratio is not strictly below one."""


# -- gamma ----------------------------------------------------------------

def choose_gamma(g: Graph, mode: str = "exact_inverse_lambda1", spectrum: Spectrum | None = None) -> float:
    """Hopping rate that puts ``|s>`` and ``|w>`` on resonance.

    ``exact_inverse_lambda1`` gives ``1/lambda_1`` (``1/d`` for a d-regular
    graph); ``mean_field_inv_np`` gives ``1/(np)`` for G(n, p).
    """
    if mode == "mean_field_inv_np":
        if g.model != "erdos_renyi":
            raise ValueError("mean-field gamma = 1/(np) needs an Erdos-Renyi graph")
        if not g.param:
            raise ValueError("mean-field gamma undefined for p = 0")
        return 1.0 / (g.n * g.param)
    if mode == "exact_inverse_lambda1":
        if g.model == "random_regular":
            if g.param == 0:
                raise ValueError("lambda_1 = 0 for the empty graph; gamma undefined")
            return 1.0 / g.param
        lam1 = (spectrum or adjacency_spectrum(g)).lambda1
        if lam1 <= 1e-12:
            raise ValueError(f"lambda_1 = {lam1} <= 0; gamma = 1/lambda_1 undefined")
        return 1.0 / lam1
    raise ValueError(f"unknown gamma mode {mode!r}; manual gamma is passed as a number")


# -- rescaling machinery on a normalized spectrum ----------------------------------

def _split_overlaps(eigenvalues, overlaps):
    lam = np.asarray(eigenvalues, dtype=float)
    a = np.asarray(overlaps, dtype=float)
    if lam.shape != a.shape or lam.size < 1:
        raise ValueError("eigenvalues and overlaps must be equal-length vectors")
    return lam, a


def _check_normalized(lam, tol=1e-9):
    if abs(lam[0] - 1.0) > tol:
        raise ValueError(f"top eigenvalue must be 1 (normalize by gamma first), got {lam[0]}")
    c = float(np.abs(lam[1:]).max(initial=0.0))
    if c >= 1.0:
        raise ConditionViolated(f"spectral ratio c = {c} >= 1")
    return c


def rescaling_bracket(c: float) -> tuple[float, float]:
    return -c / (1.0 + c), c / (1.0 - c)


def rescaling_residual(r: float, eigenvalues, overlaps) -> float:
    """``sum_{i>1} a_i^2 / ((1+r)(1-lambda_i)) - sum_{i>1} a_i^2``."""
    lam, a = _split_overlaps(eigenvalues, overlaps)
    a2 = a[1:] ** 2
    return float(np.sum(a2 / ((1.0 + r) * (1.0 - lam[1:]))) - a2.sum())


def rescaling_from_overlaps(eigenvalues, overlaps) -> float:
    """Root ``r`` of :func:`rescaling_residual` inside the bracket
    ``[-c/(1+c), c/(1-c)]``, found by bisection.

    ``eigenvalues`` are descending with ``eigenvalues[0] == 1``; ``overlaps``
    are ``a_i = <w|v_i>``.
    """
    lam, a = _split_overlaps(eigenvalues, overlaps)
    c = _check_normalized(lam)
    lo, hi = rescaling_bracket(c)
    f_lo = rescaling_residual(lo, lam, a)
    f_hi = rescaling_residual(hi, lam, a)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo < 0 or f_hi > 0:
        # residual is decreasing in r, so it must go from >= 0 to <= 0
        scale = max(1.0, float(np.sum(a[1:] ** 2)))
        if abs(f_lo) <= 1e-13 * scale:
            return lo
        if abs(f_hi) <= 1e-13 * scale:
            return hi
        raise ArithmeticError(f"bracket [{lo}, {hi}] does not straddle a root: f = ({f_lo}, {f_hi})")
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        f_mid = rescaling_residual(mid, lam, a)
        if f_mid == 0.0:
            return mid
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= BISECTION_TOL:
            break
    return 0.5 * (lo + hi)


def lemma1_rescaling(spectrum_of_H1: Spectrum, w: int) -> float:
    """Rescaling ``r`` for the marked vertex ``w`` of a normalized ``H1``."""
    return rescaling_from_overlaps(spectrum_of_H1.eigenvalues, spectrum_of_H1.eigenvectors[w, :])


def rescale_eigenvalues(eigenvalues, r: float) -> np.ndarray:
    """Eigenvalues of ``(1+r) H1 - r I``; the top one stays at 1."""
    return (1.0 + r) * np.asarray(eigenvalues, dtype=float) - r


def delta_from_overlaps(eigenvalues, overlaps) -> float:
    """Positive root ``|a_1| / sqrt(sum_{i>1} a_i^2 / (1 - lambda_i)^2)``."""
    lam, a = _split_overlaps(eigenvalues, overlaps)
    denom = float(np.sum(a[1:] ** 2 / (1.0 - lam[1:]) ** 2))
    if denom <= 0.0:
        raise ArithmeticError("marked vertex has no weight outside v_1; delta is undefined")
    return abs(float(a[0])) / math.sqrt(denom)


def delta_estimate(spectrum_of_H1: Spectrum, w: int) -> float:
    """Splitting of the two resonant eigenvalues from 1. Evolution time of
    the search is ``pi / (2 delta)``."""
    return delta_from_overlaps(spectrum_of_H1.eigenvalues, spectrum_of_H1.eigenvectors[w, :])


def lemma1_bound(c: float) -> float:
    if not 0.0 <= c < 1.0:
        raise ConditionViolated(f"bound needs 0 <= c < 1, got c = {c}")
    return (1.0 - c) / (1.0 + c)


def rescaled_search_overlap(eigenvalues, overlaps) -> dict:
    """Run the full construction in the eigenbasis of ``H1``.

    Builds ``(1 + r) H1 + |w><w|`` (the ``-rI`` shift is a global phase),
    starts from ``v_1`` and evolves for ``pi / (2 delta)``. Returns ``r``,
    ``delta``, the evolution time, the residual and ``|<w|f>|^2``.
    """
    lam, a = _split_overlaps(eigenvalues, overlaps)
    a = a / np.linalg.norm(a)
    r = rescaling_from_overlaps(lam, a)
    delta = delta_from_overlaps(rescale_eigenvalues(lam, r), a)
    t = math.pi / (2.0 * delta)
    H = np.diag((1.0 + r) * lam) + np.outer(a, a)
    start = np.zeros(lam.size)
    start[0] = 1.0
    prob = float(Propagator(H, start, a).probability(t))
    return {
        "r": r,
        "delta": delta,
        "time": t,
        "residual": rescaling_residual(r, lam, a),
        "c": float(np.abs(lam[1:]).max(initial=0.0)),
        "probability": prob,
    }


# -- perturbative prediction ---------------------------------------------------

@dataclass(frozen=True)
class PerturbationPrediction:
    """Two-level prediction in ``span{|w>, |s_wbar>}``.

    ``delta = gamma*lambda_1 - 1`` is the detuning of ``|s>`` from ``|w>``;
    ``Omega`` is half the splitting of the resonant pair. The success
    probability is ``amplitude * sin^2(Omega t)``, peaking at
    ``pi / (2 Omega)``. The printed variant ``sin^2(Omega t / 2)`` peaks at
    ``pi / Omega`` and is kept as ``literal_peak_time``.
    """

    n: int
    delta: float
    Omega: float
    amplitude: float
    mu: float
    kappa: float
    predicted_peak_time: float
    literal_peak_time: float

    def probability(self, t):
        return self.amplitude * np.sin(self.Omega * np.asarray(t, dtype=float)) ** 2

    def literal_probability(self, t):
        return self.amplitude * np.sin(0.5 * self.Omega * np.asarray(t, dtype=float)) ** 2

    def eigenstates(self, w: int) -> tuple[np.ndarray, np.ndarray]:
        """Approximate ``(|lambda_+>, |lambda_->)`` as real vectors."""
        e_w = state_basis(self.n, w).real
        s_wbar = state_uniform_excluding(self.n, {w}).real
        inv = 1.0 / math.sqrt(self.n)
        plus = (inv * e_w - self.mu * s_wbar) / self.kappa
        minus = (self.mu * e_w + inv * s_wbar) / self.kappa
        return plus, minus


def perturbation_prediction(n: int, gamma: float, lambda1: float) -> PerturbationPrediction:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    delta = gamma * lambda1 - 1.0
    if not math.isfinite(delta):
        raise ValueError("detuning must be finite")
    Omega = math.sqrt(delta**2 / 4.0 + 1.0 / n)
    mu = delta / 2.0 + Omega
    return PerturbationPrediction(
        n=n,
        delta=delta,
        Omega=Omega,
        amplitude=1.0 / (1.0 + n * delta**2 / 4.0),
        mu=mu,
        kappa=math.sqrt(mu**2 + 1.0 / n),
        predicted_peak_time=math.pi / (2.0 * Omega),
        literal_peak_time=math.pi / Omega,
    )


def grover_probability(t, n: int):
    """``sin^2(t / sqrt n)``: resonant two-level success probability."""
    return np.sin(np.asarray(t, dtype=float) / math.sqrt(n)) ** 2


# -- search instance -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SearchInstance:
    graph: Graph
    w: int = 0
    gamma: float | None = None
    gamma_mode: str = "exact_inverse_lambda1"
    rescale_r: float | None = None

    def __post_init__(self):
        if self.gamma_mode not in GAMMA_MODES:
            raise ValueError(f"unknown gamma mode {self.gamma_mode!r}")
        if not 0 <= self.w < self.graph.n:
            raise ValueError(f"marked vertex w={self.w} out of range for n={self.graph.n}")
        if self.gamma is None:
            if self.gamma_mode == "manual":
                raise ValueError("manual gamma mode needs an explicit gamma")
            object.__setattr__(
                self, "gamma", choose_gamma(self.graph, self.gamma_mode, self.adjacency_spectrum)
            )
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.rescale_r is not None:
            c = spectral_ratio(self.adjacency_spectrum.eigenvalues)
            lo, hi = rescaling_bracket(c) if c < 1 else (-math.inf, math.inf)
            if not lo - 1e-12 <= self.rescale_r <= hi + 1e-12:
                raise ValueError(f"rescale_r={self.rescale_r} outside [{lo}, {hi}] for c={c}")

    @cached_property
    def adjacency_spectrum(self) -> Spectrum:
        return adjacency_spectrum(self.graph)

    @cached_property
    def hamiltonian(self) -> Hamiltonian:
        return build_search_hamiltonian(self)

    def normalized_h1_spectrum(self) -> Spectrum:
        """Spectrum of ``A / lambda_1`` (top eigenvalue exactly 1)."""
        spec = self.adjacency_spectrum
        return spec.scaled(1.0 / spec.lambda1)


def build_search_hamiltonian(si: SearchInstance) -> Hamiltonian:
    """``-|w><w| - gamma (1 + r) A``, with ``r = 0`` unless rescaled."""
    r = si.rescale_r or 0.0
    H = -si.gamma * (1.0 + r) * si.graph.as_float()
    H[si.w, si.w] -= 1.0
    return Hamiltonian(H)


def default_search_time(n: int) -> float:
    return 2.0 * math.pi * math.sqrt(n)


def run_search(si: SearchInstance, t_max: float | None = None, steps: int = DEFAULT_STEPS) -> EvolutionTrace:
    """Success probability ``|<w|exp(-iHt)|s>|^2`` from the uniform state."""
    n = si.graph.n
    t_max = default_search_time(n) if t_max is None else t_max
    return trace_probability(si.hamiltonian, state_uniform(n), state_basis(n, si.w), t_max, steps)


def lowest_pair_separation(energies) -> dict:
    """Whether the two lowest Hamiltonian eigenvalues stand apart from the
    rest: the gap to the third eigenvalue must exceed the pair splitting."""
    E = np.sort(np.asarray(energies, dtype=float))
    splitting = float(E[1] - E[0])
    gap = float(E[2] - E[1]) if E.size > 2 else math.inf
    return {"splitting": splitting, "gap": gap, "separated": gap > splitting}


@dataclass(frozen=True)
class OptimalityReport:
    condition_met: bool
    c: float
    alpha: float
    bound: float
    margin: float


def check_optimality_condition(g: Graph, gamma: float | None = None, margin: float = DEFAULT_MARGIN,
                               spectrum: Spectrum | None = None) -> OptimalityReport:
    """Spectral ratio ``c < 1 - margin`` and delocalization ``alpha >= 1 - margin``."""
    spec = spectrum or adjacency_spectrum(g)
    if spec.lambda1 <= 1e-12:
        return OptimalityReport(False, math.inf, math.nan, math.nan, margin)
    rep = spectral_report(g, gamma if gamma else 1.0 / spec.lambda1, spec)
    c = rep.ratio_c
    bound = lemma1_bound(c) if c < 1 else math.nan
    met = c < 1.0 - margin and rep.alpha >= 1.0 - margin
    return OptimalityReport(bool(met), c, rep.alpha, bound, margin)


def search_report(si: SearchInstance, trace: EvolutionTrace | None = None) -> dict:
    """JSON-ready summary of one search instance."""
    g = si.graph
    trace = trace or run_search(si)
    spec = si.adjacency_spectrum
    rep = spectral_report(g, si.gamma, spec)
    pred = perturbation_prediction(g.n, si.gamma, rep.lambda1)
    r = lemma_delta = math.nan
    if 0 <= rep.ratio_c < 1 and g.n > 1:
        h1 = si.normalized_h1_spectrum()
        r = lemma1_rescaling(h1, si.w)
        try:
            lemma_delta = delta_from_overlaps(rescale_eigenvalues(h1.eigenvalues, r), h1.eigenvectors[si.w])
        except ArithmeticError:
            pass
    out = {
        "n": g.n,
        "model": g.model,
        "p": g.param if g.model == "erdos_renyi" else None,
        "d": g.param if g.model == "random_regular" else None,
        "seed": g.seed,
        "w": si.w,
        "gamma": si.gamma,
        "gamma_mode": si.gamma_mode,
        "lambda1": rep.lambda1,
        "lambda2": rep.lambda2,
        "c": rep.ratio_c,
        "alpha": rep.alpha,
        "r": r,
        "delta": pred.delta,
        "lemma_delta": lemma_delta,
        "peak_value": trace.peak_value,
        "peak_time": trace.peak_time,
        "predicted_amplitude": pred.amplitude,
        "predicted_peak_time": pred.predicted_peak_time,
        "literal_peak_time": pred.literal_peak_time,
    }
    return {k: _jsonable(v) for k, v in out.items()}


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v
