"""Torus spectra, renormalisation constants and the regularised rate prefactor.

Linearising the double-well dynamics around the transition state ``phi = 0``
gives the eigenvalues

    lambda_k = (2*pi/L)**2 * (k1**2 + k2**2) - 1,   k in Z^2, |k| <= N,

where ``|k| = max(|k1|, |k2|)``.  With Neumann boundary conditions ``2*pi/L``
is replaced by ``pi/L`` and the wave vectors range over ``N_0^2``.  Around
the stable states ``phi = +-1`` the eigenvalues are ``nu_k = lambda_k + 3``.
For admissible domain sizes (``L < 2*pi`` periodic, ``L < pi`` Neumann) all
``lambda_k`` with ``k != 0`` are positive while ``lambda_0 = -1``.

The renormalisation constant ``C_N = L**-2 * sum 1/|lambda_k|`` diverges
logarithmically in the cutoff.  As a consequence the plain spectral product
``prod(1 + 3/lambda_k)`` diverges as well, and a finite transition-rate
prefactor only exists for the regularised product
``prod (1 + 3/lambda_k) * exp(-3/lambda_k)`` (the diagonal Carleman-Fredholm
determinant of ``Id + 3|(-Delta - 1)^{-1}|``).

All spectral sums are accumulated with compensated summation (``math.fsum``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError

PERIODIC = "periodic"
NEUMANN = "neumann"

# Largest cutoff enumerated as a dense grid; above this, sums run over
# |k|_inf shells to keep memory flat.
_GRID_CUTOFF = 1024


@dataclass(frozen=True)
class DomainSpec:
    """Square torus of side L with a spectral Galerkin cutoff N.

    The admissible ranges 0 < L < 2*pi (periodic) and 0 < L < pi (Neumann)
    guarantee lambda_k > 0 for every k != 0, so that phi = 0 is the unique
    saddle between the wells.
    """

    L: float
    N: int
    bc: str = PERIODIC

    def __post_init__(self):
        if self.bc not in (PERIODIC, NEUMANN):
            raise ConfigError(f"unknown boundary type {self.bc!r}")
        lmax = 2.0 * math.pi if self.bc == PERIODIC else math.pi
        if not 0.0 < self.L < lmax:
            raise ConfigError(
                f"L={self.L} outside (0, {lmax:.6g}) for {self.bc} boundary conditions"
            )
        if not (isinstance(self.N, (int, np.integer)) and self.N >= 0):
            raise ConfigError(f"cutoff N={self.N} must be a nonnegative integer")

    @property
    def wavenumber_factor(self) -> float:
        """c such that lambda_k = c**2 * (k1**2 + k2**2) - 1."""
        return (2.0 * math.pi if self.bc == PERIODIC else math.pi) / self.L

    @property
    def n_modes(self) -> int:
        n = self.N
        return (2 * n + 1) ** 2 if self.bc == PERIODIC else (n + 1) ** 2


@dataclass(frozen=True)
class ModeIndex:
    """Integer wave vector with the sup-norm used for the cutoff."""

    k1: int
    k2: int

    @property
    def norm(self) -> int:
        return max(abs(self.k1), abs(self.k2))


@dataclass(frozen=True)
class SpectralConstants:
    """Renormalisation constants, all of dimension 1/length**2.

    c_n      : L**-2 * sum_{|k|<=N} 1/|lambda_k|
    c_n_perp : L**-2 * sum_{0<|k|<=N} 1/lambda_k  (= c_n - 1/L**2)
    c_n_plus : L**-2 * sum_{0<|k|<=N} 1/(lambda_k + 3)
    delta_c  : c_n - c_n_plus, the exact difference including the k = 0 term
    """

    c_n: float
    c_n_perp: float
    c_n_plus: float
    delta_c: float


def eigenvalue(spec: DomainSpec, k) -> float:
    """lambda_k for a single mode; pass k as ModeIndex or (k1, k2)."""
    k1, k2 = (k.k1, k.k2) if isinstance(k, ModeIndex) else (int(k[0]), int(k[1]))
    if spec.bc == NEUMANN and (k1 < 0 or k2 < 0):
        raise ConfigError("Neumann modes require k1, k2 >= 0")
    c = spec.wavenumber_factor
    return c * c * (k1 * k1 + k2 * k2) - 1.0


def nu(spec: DomainSpec, k) -> float:
    """nu_k = lambda_k + 3, the curvature at the stable states."""
    return eigenvalue(spec, k) + 3.0


def lambda_grid(spec: DomainSpec) -> np.ndarray:
    """lambda_k on the centred (2N+1)x(2N+1) grid, index [k1+N, k2+N].

    Periodic boundary conditions only; this layout backs every field-space
    computation downstream.
    """
    if spec.bc != PERIODIC:
        raise ConfigError("lambda_grid is defined for periodic boundary conditions")
    k = np.arange(-spec.N, spec.N + 1, dtype=float)
    c2 = spec.wavenumber_factor ** 2
    return c2 * (k[:, None] ** 2 + k[None, :] ** 2) - 1.0


def _nonzero_lambdas_grid(spec: DomainSpec, cutoff: int) -> np.ndarray:
    """Flat array of lambda_k over 0 < |k| <= cutoff."""
    if spec.bc == PERIODIC:
        k = np.arange(-cutoff, cutoff + 1, dtype=float)
    else:
        k = np.arange(0, cutoff + 1, dtype=float)
    c2 = spec.wavenumber_factor ** 2
    lam = c2 * (k[:, None] ** 2 + k[None, :] ** 2) - 1.0
    if spec.bc == PERIODIC:
        lam[cutoff, cutoff] = np.nan
    else:
        lam[0, 0] = np.nan
    flat = lam.ravel()
    return flat[~np.isnan(flat)]


def _shells(spec: DomainSpec, m: int):
    """(lambda values, multiplicities) on the shell |k|_inf = m."""
    c2 = spec.wavenumber_factor ** 2
    j = np.arange(0, m + 1, dtype=float)
    lam = c2 * (m * m + j * j) - 1.0
    if spec.bc == PERIODIC:
        mult = np.full(m + 1, 8.0)
        mult[0] = 4.0
        mult[m] = 4.0
    else:
        mult = np.full(m + 1, 2.0)
        mult[m] = 1.0
    return lam, mult


def _sum_nonzero(spec: DomainSpec, cutoff: int, term) -> float:
    """Compensated sum of term(lambda_k) over 0 < |k| <= cutoff.

    term maps an ndarray of eigenvalues to an ndarray of summands.
    """
    if cutoff <= _GRID_CUTOFF:
        lam = _nonzero_lambdas_grid(spec, cutoff)
        return math.fsum(term(lam))
    parts = []
    for m in range(1, cutoff + 1):
        lam, mult = _shells(spec, m)
        parts.append(float(np.dot(mult, term(lam))))
    return math.fsum(parts)


@lru_cache(maxsize=256)
def renorm_constants(spec: DomainSpec) -> SpectralConstants:
    """C_N and its companions for the given domain and cutoff."""
    inv_l2 = 1.0 / spec.L ** 2
    if spec.N == 0:
        return SpectralConstants(c_n=inv_l2, c_n_perp=0.0, c_n_plus=0.0, delta_c=inv_l2)
    s_perp = _sum_nonzero(spec, spec.N, lambda lam: 1.0 / lam)
    s_plus = _sum_nonzero(spec, spec.N, lambda lam: 1.0 / (lam + 3.0))
    c_n_perp = inv_l2 * s_perp
    c_n_plus = inv_l2 * s_plus
    c_n = c_n_perp + inv_l2  # k = 0 contributes 1/(L^2 |lambda_0|) = 1/L^2
    return SpectralConstants(
        c_n=c_n, c_n_perp=c_n_perp, c_n_plus=c_n_plus, delta_c=c_n - c_n_plus
    )


def lambda_squared_tail_bound(spec: DomainSpec, cutoff: int) -> float:
    """Rigorous upper bound on sum_{|k| > cutoff} lambda_k**-2.

    On the shell |k|_inf = m every eigenvalue is at least c**2 m**2 - 1 and
    the shell has 8m (periodic) or 2m+1 (Neumann) modes; the shell sums are
    dominated by the decreasing integrand 8t/(c^2 t^2 - 1)^2 (resp. 3t/...),
    whose integral over [cutoff, inf) is elementary.
    """
    if cutoff < 1:
        raise ConfigError("tail bound requires cutoff >= 1")
    c2 = spec.wavenumber_factor ** 2
    denom = c2 * (c2 * cutoff * cutoff - 1.0)
    if denom <= 0.0:
        raise ConfigError("cutoff too small for a positive spectral gap")
    count = 4.0 if spec.bc == PERIODIC else 1.5
    return count / denom


@dataclass(frozen=True)
class PrefactorResult:
    """Regularised prefactor of the mean transition time.

    prefactor  : 2*pi * sqrt(e^{3/|l0|} / (|l0| (l0+3)) * prod_{0<|k|<=K}
                 e^{3/lambda_k} / (1 + 3/lambda_k))
    tail_bound : upper bound on the omitted log-product
                 sum_{|k|>K} [3/lambda_k - log(1 + 3/lambda_k)]; the
                 relative truncation error of `prefactor` is at most
                 exp(tail_bound / 2) - 1.
    cutoff     : the K actually used.
    """

    prefactor: float
    tail_bound: float
    cutoff: int

    @property
    def relative_error_bound(self) -> float:
        return math.expm1(self.tail_bound / 2.0)


def _log_product_nonzero(spec: DomainSpec, cutoff: int) -> float:
    """sum_{0<|k|<=cutoff} [3/lambda_k - log(1 + 3/lambda_k)] (each term >= 0)."""
    if cutoff == 0:
        return 0.0
    return _sum_nonzero(spec, cutoff, lambda lam: 3.0 / lam - np.log1p(3.0 / lam))


def ek_prefactor(
    spec: DomainSpec,
    cutoff: int | str = "limit",
    tol: float = 1e-8,
    k_max: int = 65536,
) -> PrefactorResult:
    """Sharp prefactor of the mean transition time, saddle factor included.

    The k = 0 saddle direction contributes e^{3/|lambda_0|} / (|lambda_0|
    (lambda_0 + 3)); every other mode contributes the regularised factor
    e^{3/lambda_k} / (1 + 3/lambda_k) whose logarithm is bounded by
    (3/lambda_k)^2 / 2, so the product converges and truncation admits the
    computable tail bound of `lambda_squared_tail_bound`.

    cutoff="limit" doubles K until the relative truncation error drops
    below tol; raises ConfigError if k_max is insufficient.
    """
    lam0 = -1.0
    head = math.exp(3.0 / abs(lam0)) / (abs(lam0) * (lam0 + 3.0))

    def assemble(k: int) -> PrefactorResult:
        log_prod = _log_product_nonzero(spec, k)
        pref = 2.0 * math.pi * math.sqrt(head * math.exp(log_prod))
        tb = 4.5 * lambda_squared_tail_bound(spec, max(k, 1))
        return PrefactorResult(prefactor=pref, tail_bound=tb, cutoff=k)

    if cutoff != "limit":
        k = int(cutoff)
        if k < 0:
            raise ConfigError("cutoff must be nonnegative")
        if k > 0:
            return assemble(k)
        # K = 0: the tail covers every nonzero mode, so add shell 1 explicitly.
        lam1, mult1 = _shells(spec, 1)
        tb = 4.5 * (float(np.dot(mult1, lam1 ** -2.0)) + lambda_squared_tail_bound(spec, 1))
        return PrefactorResult(
            prefactor=2.0 * math.pi * math.sqrt(head), tail_bound=tb, cutoff=0
        )

    k = 16
    while True:
        res = assemble(k)
        if res.relative_error_bound < tol:
            return res
        if k >= k_max:
            raise ConfigError(
                f"prefactor tolerance {tol} unreachable within cutoff budget {k_max}"
            )
        k = min(2 * k, k_max)


@dataclass(frozen=True)
class Det2Result:
    """Diagonal regularised determinant of Id + 3|(-Delta-1)^{-1}| at cutoff K.

    det2 converges as K grows; raw_product = det2 * exp(Tr T) diverges like
    a power of K because Tr T = sum 3/lambda_k grows logarithmically.
    """

    det2: float
    raw_product: float
    log_det2: float
    log_raw_product: float
    trace: float
    cutoff: int


def det2_diagonal(spec: DomainSpec, cutoff: int) -> Det2Result:
    """det2(K) = prod_{0<|k|<=K} (1 + 3/lambda_k) e^{-3/lambda_k} and the raw product."""
    if cutoff < 0:
        raise ConfigError("cutoff must be nonnegative")
    if cutoff == 0:
        return Det2Result(1.0, 1.0, 0.0, 0.0, 0.0, 0)
    log_raw = _sum_nonzero(spec, cutoff, lambda lam: np.log1p(3.0 / lam))
    trace = _sum_nonzero(spec, cutoff, lambda lam: 3.0 / lam)
    log_det2 = log_raw - trace
    return Det2Result(
        det2=math.exp(log_det2),
        raw_product=math.exp(log_raw),
        log_det2=log_det2,
        log_raw_product=log_raw,
        trace=trace,
        cutoff=cutoff,
    )


def raw_product_log_slope(spec: DomainSpec) -> float:
    """Limit of log raw_product(2K) - log raw_product(K) per octave.

    The shell sums of 1/|k|_2^2 over K < |k|_inf <= 2K tend to 2*pi*log 2
    by scale invariance, so the raw log-product grows by
    3 * L^2 * log(2) / (2*pi) per doubling of the cutoff.
    """
    return 3.0 * spec.L ** 2 * math.log(2.0) / (2.0 * math.pi)
