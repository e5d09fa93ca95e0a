"""Fourier-side representation of the Galerkin field and exact grid calculus.

A field with cutoff N is stored through its coefficients z_k on the centred
(2N+1) x (2N+1) grid, index [k1+N, k2+N], with respect to the orthonormal
basis e_k(x) = L^{-1} exp(i (2*pi/L) k.x).  Real fields satisfy
z_{-k} = conj(z_k) with z_0 real; the mean value is z_0 / L.

Nonlinear operations go through collocation on an M x M grid with
M >= 3(2N+1).  That padding makes the pointwise cube an exactly represented
trigonometric polynomial and the quadrature of any product of degree <= 4N
exact, which the potential decomposition identities rely on.  Batched
variants operate on arrays of shape (..., 2N+1, 2N+1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.fft import next_fast_len

from .errors import ConfigError
from .spectra import DomainSpec, lambda_grid

DEFAULT_SOBOLEV_ORDER = -0.25


@dataclass(frozen=True)
class FieldCoeffs:
    """Immutable coefficient array of a real Galerkin field."""

    spec: DomainSpec
    z: np.ndarray

    def __post_init__(self):
        n = 2 * self.spec.N + 1
        if self.z.shape != (n, n):
            raise ConfigError(f"coefficient array must have shape {(n, n)}")
        z = np.array(self.z, dtype=complex)  # own the buffer before freezing it
        z.flags.writeable = False
        object.__setattr__(self, "z", z)

    @property
    def mean(self) -> float:
        """Spatial mean, z_0 / L (e_0 = 1/L)."""
        n = self.spec.N
        return float(self.z[n, n].real) / self.spec.L

    def reality_defect(self) -> float:
        """max |z_{-k} - conj(z_k)|; zero for a genuinely real field."""
        return float(np.abs(self.z - np.conj(self.z[::-1, ::-1])).max())

    def is_real_field(self, tol: float = 1e-10) -> bool:
        return self.reality_defect() <= tol * max(1.0, float(np.abs(self.z).max()))


@dataclass(frozen=True)
class RealField:
    """Collocation samples on the uniform M x M grid with x = 0 included."""

    spec: DomainSpec
    grid: np.ndarray

    @property
    def resolution(self) -> int:
        return self.grid.shape[-1]


def zero_field(spec: DomainSpec) -> FieldCoeffs:
    n = 2 * spec.N + 1
    return FieldCoeffs(spec, np.zeros((n, n), dtype=complex))


def constant_field(spec: DomainSpec, value: float) -> FieldCoeffs:
    """phi = value everywhere, i.e. z_0 = value * L."""
    n = 2 * spec.N + 1
    z = np.zeros((n, n), dtype=complex)
    z[spec.N, spec.N] = value * spec.L
    return FieldCoeffs(spec, z)


def single_mode(spec: DomainSpec, k1: int, k2: int, amplitude: complex) -> FieldCoeffs:
    """Real field amplitude*e_k + conj(amplitude)*e_{-k} (just amplitude*e_0 for k=0)."""
    n = 2 * spec.N + 1
    z = np.zeros((n, n), dtype=complex)
    z[spec.N + k1, spec.N + k2] = amplitude
    if (k1, k2) != (0, 0):
        z[spec.N - k1, spec.N - k2] = np.conj(amplitude)
    else:
        z[spec.N, spec.N] = complex(amplitude).real
    return FieldCoeffs(spec, z)


def min_padded_resolution(n_cutoff: int) -> int:
    """Smallest FFT-friendly M >= 3(2N+1)."""
    return next_fast_len(3 * (2 * n_cutoff + 1), real=True)


@lru_cache(maxsize=128)
def _embed_indices(n_cutoff: int, m: int) -> np.ndarray:
    """Positions of wavenumbers -N..N in an M-point DFT axis."""
    return np.arange(-n_cutoff, n_cutoff + 1) % m


def coeffs_to_grid(z: np.ndarray, spec: DomainSpec, m: int) -> np.ndarray:
    """Exact collocation values of the field on the M x M grid (batched)."""
    n = spec.N
    if m < 2 * n + 1:
        raise ConfigError(f"resolution {m} below Nyquist requirement {2 * n + 1}")
    idx = _embed_indices(n, m)
    big = np.zeros(z.shape[:-2] + (m, m), dtype=complex)
    big[..., idx[:, None], idx[None, :]] = z
    grid = np.fft.ifft2(big, axes=(-2, -1)) * (m * m / spec.L)
    return np.ascontiguousarray(grid.real)


def grid_to_coeffs(grid: np.ndarray, spec: DomainSpec) -> np.ndarray:
    """Fourier coefficients z_k, |k| <= N, of grid samples (batched)."""
    m = grid.shape[-1]
    n = spec.N
    idx = _embed_indices(n, m)
    big = np.fft.fft2(grid, axes=(-2, -1)) * (spec.L / (m * m))
    return big[..., idx[:, None], idx[None, :]]


def to_real(f: FieldCoeffs, m: int | None = None) -> RealField:
    """Exact trigonometric interpolation onto the M x M collocation grid."""
    if m is None:
        m = min_padded_resolution(f.spec.N)
    return RealField(f.spec, coeffs_to_grid(f.z, f.spec, m))


def from_real(rf: RealField, spec: DomainSpec | None = None) -> FieldCoeffs:
    """Projection of grid samples back onto the modes |k| <= N."""
    spec = spec or rf.spec
    if rf.resolution < 2 * spec.N + 1:
        raise ConfigError("resolution too small to resolve the requested cutoff")
    return FieldCoeffs(spec, grid_to_coeffs(rf.grid, spec))


def cubic_batch(z: np.ndarray, spec: DomainSpec) -> np.ndarray:
    """Coefficients of P_N(phi^3), exact via zero-padded collocation."""
    m = min_padded_resolution(spec.N)
    grid = coeffs_to_grid(z, spec, m)
    return grid_to_coeffs(grid ** 3, spec)


def cubic_projected(f: FieldCoeffs) -> FieldCoeffs:
    """P_N(phi^3) as a field; coefficients are exact, not merely dealiased."""
    return FieldCoeffs(f.spec, cubic_batch(f.z, f.spec))


def decompose(f: FieldCoeffs) -> tuple[float, FieldCoeffs]:
    """Split into (mean, fluctuation); recomposition is exact."""
    z = f.z.copy()
    n = f.spec.N
    mean = float(z[n, n].real) / f.spec.L
    z[n, n] = 0.0
    return mean, FieldCoeffs(f.spec, z)


def recompose(mean: float, fluct: FieldCoeffs) -> FieldCoeffs:
    z = fluct.z.copy()
    n = fluct.spec.N
    z[n, n] += mean * fluct.spec.L
    return FieldCoeffs(fluct.spec, z)


@lru_cache(maxsize=128)
def sobolev_weights(spec: DomainSpec, s: float) -> np.ndarray:
    """Mode weights (1 + (2*pi/L)^2 |k|_2^2)^s on the centred grid, s < 0."""
    if s >= 0:
        raise ConfigError("Sobolev order must be negative")
    k = np.arange(-spec.N, spec.N + 1, dtype=float)
    c2 = (2.0 * np.pi / spec.L) ** 2
    w = (1.0 + c2 * (k[:, None] ** 2 + k[None, :] ** 2)) ** s
    w.flags.writeable = False
    return w


def sobolev_norm(f: FieldCoeffs, s: float = DEFAULT_SOBOLEV_ORDER) -> float:
    """Negative-order norm ||f||_{H^s} = sqrt(sum_k w_k |z_k|^2)."""
    w = sobolev_weights(f.spec, s)
    return float(np.sqrt(np.sum(w * np.abs(f.z) ** 2)))


def l2_norm_sq(f: FieldCoeffs) -> float:
    """Parseval: integral of phi^2 equals sum |z_k|^2."""
    return float(np.sum(np.abs(f.z) ** 2))


def quadrature_integral(grid: np.ndarray, spec: DomainSpec) -> np.ndarray:
    """(L/M)^2 * sum of grid values; exact for resolved trigonometric polynomials."""
    m = grid.shape[-1]
    return np.sum(grid, axis=(-2, -1)) * (spec.L / m) ** 2


def symmetrize_reality(z: np.ndarray) -> np.ndarray:
    """Project a coefficient array onto the reality constraint."""
    return 0.5 * (z + np.conj(z[..., ::-1, ::-1]))


def mode_laplacian(spec: DomainSpec) -> np.ndarray:
    """lambda_k grid shared with the spectra module."""
    return lambda_grid(spec)
