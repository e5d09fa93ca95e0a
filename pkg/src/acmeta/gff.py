"""Gaussian measures on mode space, Wick-power integrals and Monte Carlo.

A measure is a product of per-mode Gaussians with density proportional to
exp(-1/2 * sum_k a_k |y_k|^2), summed over the full centred index set (each
+-k pair appears twice, k = 0 once).  Under this convention the complex
coefficient of mode k has E|y_k|^2 = 1/a_k and the zero mode is a real
Gaussian of variance 1/a_0.  Named stiffness choices:

    gamma          a_0 = |lambda_0|, a_k = lambda_k        (saddle measure)
    gamma_plus     a_k = lambda_k + 3 for all |k| <= N     (well measure)
    gamma_perp0    k != 0 only, a_k = lambda_k             (fluctuations)
    gamma_perp_z0  k != 0 only, a_k = lambda_k + 3 z0^2/L^2

gamma_plus deliberately includes the k = 0 mode (stiffness lambda_0 + 3 = 2):
the quadratic form produced by expanding the potential around phi = 1 has a
2*y_0^2/2 term, and the Gaussian product in the partition identity runs over
all |k| <= N.

Monte Carlo uses counter-based Philox streams.  Sample index space is split
into fixed chunks of `CHUNK` samples; chunk j draws from the stream keyed by
(seed, j), which makes every estimate a pure function of (seed, n_samples)
regardless of scheduling or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
from scipy.signal import convolve2d

from .errors import ConfigError, InvalidEstimateError
from .field import coeffs_to_grid, min_padded_resolution, quadrature_integral
from .spectra import DomainSpec, lambda_grid
from .wick import hermite

CHUNK = 1024
_GRID_SUBBATCH = 256


def philox_stream(seed: int, stream: int) -> np.random.Generator:
    """Independent generator for (seed, stream): Philox counter block 2^128*stream."""
    bitgen = np.random.Philox(key=np.uint64(seed & (2 ** 64 - 1)),
                              counter=[0, 0, int(stream), 0])
    return np.random.Generator(bitgen)


@dataclass(frozen=True)
class MeasureSpec:
    """Product Gaussian on the coefficients of a cutoff-N field."""

    spec: DomainSpec
    stiffness: np.ndarray      # a_k on the centred grid; np.inf marks excluded modes
    include_zero_mode: bool
    name: str = "custom"

    def __post_init__(self):
        a = np.array(self.stiffness, dtype=float)
        if np.any(a[np.isfinite(a)] <= 0.0):
            raise ConfigError("measure stiffness must be positive on included modes")
        a.flags.writeable = False
        object.__setattr__(self, "stiffness", a)

    @property
    def amplitude(self) -> np.ndarray:
        """Per-mode standard deviation 1/sqrt(a_k), zero on excluded modes."""
        with np.errstate(divide="ignore"):
            amp = 1.0 / np.sqrt(self.stiffness)
        return np.where(np.isfinite(self.stiffness), amp, 0.0)

    @property
    def pointwise_variance(self) -> float:
        """E[phi(x)^2] = L^-2 sum_included 1/a_k, the measure's own Wick constant."""
        a = self.stiffness
        inv = np.where(np.isfinite(a), 1.0 / a, 0.0)
        return float(math.fsum(inv.ravel())) / self.spec.L ** 2


def gamma_measure(spec: DomainSpec) -> MeasureSpec:
    """Saddle measure: |lambda_0| on the unstable mode, lambda_k transversally."""
    a = lambda_grid(spec).copy()
    a[spec.N, spec.N] = abs(a[spec.N, spec.N])
    return MeasureSpec(spec, a, include_zero_mode=True, name="gamma")


def gamma_plus(spec: DomainSpec) -> MeasureSpec:
    a = lambda_grid(spec) + 3.0
    return MeasureSpec(spec, a, include_zero_mode=True, name="gamma_plus")


def gamma_perp0(spec: DomainSpec) -> MeasureSpec:
    a = lambda_grid(spec).copy()
    a[spec.N, spec.N] = np.inf
    return MeasureSpec(spec, a, include_zero_mode=False, name="gamma_perp0")


def gamma_perp_z0(spec: DomainSpec, z0: float) -> MeasureSpec:
    a = lambda_grid(spec) + 3.0 * z0 ** 2 / spec.L ** 2
    a[spec.N, spec.N] = np.inf
    return MeasureSpec(spec, a, include_zero_mode=False, name="gamma_perp_z0")


def sample_batch(m: MeasureSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """size independent coefficient arrays, reality constraint built in.

    Draw iid complex g with E|g|^2 = 1, then z = (g + conj(g[rev]))/sqrt(2):
    the symmetrisation keeps unit variance per mode, makes z_{-k} = conj(z_k)
    exact, and leaves the pair amplitudes independent.
    """
    n = 2 * m.spec.N + 1
    g = rng.standard_normal((size, n, n, 2)).view(complex)[..., 0] / math.sqrt(2.0)
    z = (g + np.conj(g[:, ::-1, ::-1])) / math.sqrt(2.0)
    return z * m.amplitude


def sample(m: MeasureSpec, rng: np.random.Generator):
    """One draw as FieldCoeffs."""
    from .field import FieldCoeffs

    return FieldCoeffs(m.spec, sample_batch(m, 1, rng)[0])


def wick_integrals_multi(
    z: np.ndarray, spec: DomainSpec, degrees_constants: list[tuple[int, float]]
) -> np.ndarray:
    """integral of H_n(phi(x), c) dx for several (n, c) pairs at once.

    Returns shape (len(degrees_constants), B).  The collocation grid is built
    once per sub-batch and shared across degrees; sub-batching keeps the
    padded grids within a fixed memory budget.
    """
    for n, _ in degrees_constants:
        if not 0 <= n <= 4:
            raise ConfigError("Wick integrals support degrees 0..4")
    mres = min_padded_resolution(spec.N)
    b = z.shape[0]
    out = np.empty((len(degrees_constants), b))
    for lo in range(0, b, _GRID_SUBBATCH):
        hi = min(lo + _GRID_SUBBATCH, b)
        grid = coeffs_to_grid(z[lo:hi], spec, mres)
        for row, (n, c) in enumerate(degrees_constants):
            out[row, lo:hi] = quadrature_integral(hermite(n, grid, c), spec)
    return out


def wick_integral_batch(z: np.ndarray, spec: DomainSpec, n: int, c: float) -> np.ndarray:
    """integral of H_n(phi(x), c) dx per batch entry, exact on the padded grid."""
    return wick_integrals_multi(z, spec, [(n, c)])[0]


def wick_integral(f, n: int, c: float) -> float:
    return float(wick_integral_batch(f.z[None, ...], f.spec, n, c)[0])


def covariance_sum_exact(spec: DomainSpec, m_sq: float, n: int, cutoff: int) -> float:
    """Variance of U_n = integral of the n-th Wick power of the mass-m field.

    Equals n! * L^(4-2n) * sum_{k_1+...+k_n=0, |k_i|<=cutoff} prod 1/|lambda_{k_i}+m^2|,
    evaluated by repeated self-convolution of the weight array.  The n! and the
    L power are fixed by the Isserlis oracle (Var(z_0^2 - 1) = 2 at cutoff 0)
    and by Monte Carlo at every L.
    """
    if not 1 <= n <= 4:
        raise ConfigError("covariance sums support degrees 1..4")
    if cutoff > 32:
        raise ConfigError("covariance sums capped at cutoff 32 (combinatorial cost)")
    sub = DomainSpec(spec.L, cutoff, spec.bc)
    a = 1.0 / np.abs(lambda_grid(sub) + m_sq)
    conv = a
    for _ in range(n - 1):
        conv = convolve2d(conv, a, mode="full")
    centre = (conv.shape[0] - 1) // 2
    return math.factorial(n) * spec.L ** (4 - 2 * n) * float(conv[centre, centre])


@dataclass(frozen=True)
class McEstimate:
    """Monte-Carlo mean with its standard error and provenance."""

    value: float
    stderr: float
    n_samples: int
    seed: int
    n_nonfinite: int = 0
    antithetic: bool = False

    @property
    def valid(self) -> bool:
        return self.n_nonfinite == 0 and math.isfinite(self.value)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "n_nonfinite": self.n_nonfinite,
            "antithetic": self.antithetic,
        }


def expect_functional(
    m: MeasureSpec,
    functional: Callable[[np.ndarray, DomainSpec], np.ndarray],
    n_samples: int,
    seed: int,
    antithetic: bool = False,
) -> McEstimate:
    """Sample mean of a batch functional F(z_batch, spec) -> (B,) values.

    With antithetic=True each draw is averaged with its negation, which
    cancels the odd part of F exactly.  Accumulation is chunked pairwise, and
    chunk j always consumes the (seed, j) stream, so the estimate depends on
    (seed, n_samples) only.
    """
    if n_samples < 100:
        raise ConfigError("n_samples must be at least 100")
    values = np.empty(n_samples)
    done = 0
    chunk_idx = 0
    while done < n_samples:
        b = min(CHUNK, n_samples - done)
        rng = philox_stream(seed, chunk_idx)
        z = sample_batch(m, b, rng)
        v = np.asarray(functional(z, m.spec), dtype=float)
        if antithetic:
            v = 0.5 * (v + np.asarray(functional(-z, m.spec), dtype=float))
        values[done : done + b] = v
        done += b
        chunk_idx += 1
    bad = int(np.count_nonzero(~np.isfinite(values)))
    good = values[np.isfinite(values)]
    if good.size == 0:
        raise InvalidEstimateError("all functional evaluations were non-finite")
    mean = float(np.mean(good))
    stderr = float(np.std(good, ddof=1) / math.sqrt(good.size)) if good.size > 1 else math.inf
    return McEstimate(mean, stderr, n_samples, seed, n_nonfinite=bad,
                      antithetic=antithetic)


def scalar_functional(f: Callable) -> Callable[[np.ndarray, DomainSpec], np.ndarray]:
    """Adapt a per-field functional of FieldCoeffs to the batch signature."""
    from .field import FieldCoeffs

    def batched(z: np.ndarray, spec: DomainSpec) -> np.ndarray:
        return np.array([f(FieldCoeffs(spec, zi)) for zi in z])

    return batched


def nelson_moment_check(
    m: MeasureSpec, n: int, p: int, n_samples: int, seed: int
) -> dict:
    """Empirical moment-equivalence report for X = U_{n,N} under m.

    Checks E[X^p]^(1/p) <= C_n (p-1)^(n/2) E[X^2]^(1/2) for the even moment
    order p, reporting the implied constant.  U_{n,N} lives in the
    homogeneous chaos of degree n, for which the sharp constant is 1.
    """
    if p not in (2, 4, 6):
        raise ConfigError("supported moment orders: 2, 4, 6")
    if not 1 <= n <= 4:
        raise ConfigError("Wick degree must be 1..4")
    c = m.pointwise_variance
    values = []
    done = 0
    chunk_idx = 0
    while done < n_samples:
        b = min(CHUNK, n_samples - done)
        rng = philox_stream(seed, chunk_idx)
        z = sample_batch(m, b, rng)
        values.append(wick_integral_batch(z, m.spec, n, c))
        done += b
        chunk_idx += 1
    x = np.concatenate(values)
    m2 = float(np.mean(x ** 2))
    mp = float(np.mean(x ** p))
    if m2 == 0.0:
        return {"degenerate": True, "satisfied": True, "implied_constant": 0.0,
                "moment_order": p, "degree": n, "mean": float(np.mean(x))}
    implied = mp ** (1.0 / p) / ((p - 1) ** (n / 2.0) * math.sqrt(m2))
    return {
        "degenerate": False,
        "satisfied": bool(implied <= 1.25),
        "implied_constant": float(implied),
        "moment_order": p,
        "degree": n,
        "mean": float(np.mean(x)),
        "second_moment": m2,
        "p_moment": mp,
        "n_samples": n_samples,
        "seed": seed,
    }
