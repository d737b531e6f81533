"""Dense eigendecomposition and the spectral statistics used to certify
optimal search: Perron eigenpair, spectral ratio, delocalization of the
principal eigenvector and the semicircle law for the bulk.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .graphs import Graph

SYMMETRY_RTOL = 1e-12
DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues sorted descending; column ``k`` of ``eigenvectors`` pairs
    with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def source_dim(self) -> int:
        return self.eigenvalues.size

    @property
    def lambda1(self) -> float:
        return float(self.eigenvalues[0])

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T

    def scaled(self, factor: float, shift: float = 0.0) -> "Spectrum":
        """Spectrum of ``factor * M + shift * I``; factor must be positive
        so the descending order is kept."""
        if factor <= 0:
            raise ValueError("factor must be positive")
        return Spectrum(factor * self.eigenvalues + shift, self.eigenvectors)

    def multiplicities(self, rtol: float = DEGENERACY_RTOL) -> list[tuple[float, int]]:
        """Group eigenvalues equal within ``rtol * max(1, |lambda_1|)``."""
        tol = rtol * max(1.0, abs(self.eigenvalues[0]))
        groups: list[tuple[float, int]] = []
        start = 0
        vals = self.eigenvalues
        for k in range(1, vals.size + 1):
            if k == vals.size or vals[start] - vals[k] > tol:
                groups.append((float(vals[start:k].mean()), k - start))
                start = k
        return groups

    def to_csv(self, path: str | Path | None = None) -> str:
        lines = ["index,eigenvalue"]
        lines += [f"{k},{float(v)!r}" for k, v in enumerate(self.eigenvalues)]
        text = "\n".join(lines) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text


def _fix_signs(V: np.ndarray) -> np.ndarray:
    # largest-magnitude component positive; argmax picks the lowest index on ties
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def eigendecompose(A) -> Spectrum:
    """Full eigendecomposition of a real symmetric matrix.

    Raises ``ValueError`` for non-square or non-symmetric input.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    if np.abs(A - A.T).max(initial=0.0) > SYMMETRY_RTOL * scale:
        raise ValueError("matrix is not symmetric")
    vals, vecs = np.linalg.eigh(A)
    vals = vals[::-1].copy()
    vecs = _fix_signs(vecs[:, ::-1])
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return Spectrum(vals, vecs)


def adjacency_spectrum(g: Graph) -> Spectrum:
    return eigendecompose(g.as_float())


def spectral_ratio(eigenvalues: np.ndarray) -> float:
    """``max(|lambda_2|, |lambda_n|) / lambda_1``.

    Every non-principal eigenvalue is bounded, not just the second one.
    Returns ``inf`` when ``lambda_1 <= 0``.
    """
    lam1 = float(eigenvalues[0])
    if eigenvalues.size == 1:
        return 0.0
    if lam1 <= 0:
        return math.inf
    return float(np.abs(eigenvalues[1:]).max() / lam1)


def principal_overlap(spectrum: Spectrum) -> float:
    """``|<s|v_1>|`` for the uniform superposition ``s``."""
    n = spectrum.source_dim
    return float(min(1.0, abs(spectrum.eigenvectors[:, 0].sum()) / math.sqrt(n)))


def wigner_radius(n: int, p: float) -> float:
    """Semicircle radius of the bulk of ``A / (np)`` for G(n, p)."""
    return 2.0 * math.sqrt((1.0 - p) / (n * p))


def delocalization_bound(n: int, p: float, gamma_lambda1: float) -> float:
    """Right-hand side of ``alpha^2 >= gamma*lambda_1 - (2 + (np)^(-1/4) log n) / sqrt(np)``."""
    np_ = n * p
    return gamma_lambda1 - (2.0 + np_ ** -0.25 * math.log(n)) / math.sqrt(np_)


def lambda2_upper_bound(n: int, p: float, constant: float = 3.0) -> float:
    """Finite-n surrogate ``2 sqrt(np) + constant (np)^(1/4) log n`` for the
    second adjacency eigenvalue of G(n, p)."""
    np_ = n * p
    return 2.0 * math.sqrt(np_) + constant * np_ ** 0.25 * math.log(n)


@dataclass(frozen=True)
class SpectralReport:
    lambda1: float
    lambda2: float
    lambda_min: float
    ratio_c: float
    alpha: float
    delocalization_rhs: float
    wigner_radius: float

    @property
    def beta(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.alpha**2))

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, path: str | Path | None = None) -> str:
        # NaN/inf are emitted as JSON null
        data = {k: (v if math.isfinite(v) else None) for k, v in self.to_dict().items()}
        text = json.dumps(data)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text


def spectral_report(g: Graph, gamma: float, spectrum: Spectrum | None = None) -> SpectralReport:
    """Spectral summary of the adjacency matrix of ``g``.

    ``delocalization_rhs`` and ``wigner_radius`` are only defined for
    Erdos-Renyi graphs with ``0 < p < 1``; they are NaN otherwise.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    spec = spectrum if spectrum is not None else adjacency_spectrum(g)
    vals = spec.eigenvalues
    rhs = radius = math.nan
    if g.model == "erdos_renyi" and g.param is not None and 0.0 < g.param < 1.0:
        rhs = delocalization_bound(g.n, g.param, gamma * vals[0])
        radius = wigner_radius(g.n, g.param)
    return SpectralReport(
        lambda1=float(vals[0]),
        lambda2=float(vals[1]) if vals.size > 1 else math.nan,
        lambda_min=float(vals[-1]),
        ratio_c=spectral_ratio(vals),
        alpha=principal_overlap(spec),
        delocalization_rhs=rhs,
        wigner_radius=radius,
    )


def _check_semicircle_params(n, p):
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"semicircle law needs 0 < p < 1 (non-degenerate variance), got p={p}")


def semicircle_density(lam, n: int, p: float):
    """Wigner semicircle density of the adjacency bulk of G(n, p),
    normalized to unit mass. Vectorized over ``lam``."""
    _check_semicircle_params(n, p)
    var = n * p * (1.0 - p)
    lam = np.asarray(lam, dtype=float)
    inside = lam**2 < 4.0 * var
    rho = np.zeros_like(lam)
    rho[inside] = np.sqrt(4.0 * var - lam[inside] ** 2) / (2.0 * np.pi * var)
    return float(rho) if rho.ndim == 0 else rho


def semicircle_cdf(lam, n: int, p: float):
    """Cumulative distribution of :func:`semicircle_density`."""
    _check_semicircle_params(n, p)
    R = 2.0 * math.sqrt(n * p * (1.0 - p))
    x = np.clip(np.asarray(lam, dtype=float) / R, -1.0, 1.0)
    F = 0.5 + (x * np.sqrt(1.0 - x**2) + np.arcsin(x)) / np.pi
    return float(F) if F.ndim == 0 else F


def empirical_bulk_density(spectrum: Spectrum, bins: int = 50):
    """Normalized histogram of all eigenvalues except the Perron value.

    Returns ``(edges, density)``; the density integrates to one. A bulk
    with zero width is put in a single bin centred on its value.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    bulk = spectrum.eigenvalues[1:] if spectrum.source_dim > 1 else spectrum.eigenvalues
    lo, hi = float(bulk.min()), float(bulk.max())
    if hi - lo <= DEGENERACY_RTOL * max(1.0, abs(lo)):
        half = 0.5
        edges = np.linspace(lo - half, hi + half, bins + 1)
        density = np.zeros(bins)
        k = min(int(np.searchsorted(edges, lo, side="right")) - 1, bins - 1)
        density[k] = 1.0 / (edges[k + 1] - edges[k])
        return edges, density
    density, edges = np.histogram(bulk, bins=bins, range=(lo, hi), density=True)
    return edges, density


def histogram_to_csv(edges, density, path: str | Path | None = None) -> str:
    lines = ["bin_left,bin_right,density"]
    lines += [f"{float(a)!r},{float(b)!r},{float(d)!r}" for a, b, d in zip(edges[:-1], edges[1:], density)]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def semicircle_l1_distance(edges, density, n: int, p: float) -> float:
    """L1 distance between a histogram and the semicircle law.

    Uses the exact semicircle mass of each bin, plus the semicircle mass
    falling outside the histogram range.
    """
    F = semicircle_cdf(edges, n, p)
    widths = np.diff(edges)
    inside = np.abs(density * widths - np.diff(F)).sum()
    outside = F[0] + (1.0 - F[-1])
    return float(inside + outside)


def normalized_laplacian(g: Graph) -> np.ndarray:
    """``L' = I - D^{-1/2} A D^{-1/2}``.

    Rows and columns of isolated vertices in ``D^{-1/2} A D^{-1/2}`` are
    zero, so their diagonal entry of ``L'`` is 1.
    """
    deg = g.degrees.astype(float)
    inv_sqrt = np.zeros_like(deg)
    np.divide(1.0, np.sqrt(deg), out=inv_sqrt, where=deg > 0)
    M = inv_sqrt[:, None] * g.as_float() * inv_sqrt[None, :]
    return np.eye(g.n) - M


def isolated_vertices(g: Graph) -> np.ndarray:
    return np.flatnonzero(g.degrees == 0)
