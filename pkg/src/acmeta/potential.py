"""The renormalised double-well potential and its exact decompositions.

For a cutoff-N field phi with coefficients z the potential is

    V_N[phi] = 1/2 * sum_k lambda_k |z_k|^2
             + 1/4 * integral of H_4(phi(x), eps*C_N) dx,

the quartic term being the fourth Wick power with constant eps*C_N (its
expansion contains the counterterm -(3/2) eps C_N integral phi^2 and the
constant (3/4) eps^2 C_N^2 L^2).  The drift of the stochastic dynamics is
the negative gradient in the isometric real coordinates (z_0, sqrt(2) Re z_k,
sqrt(2) Im z_k), which in mode form reads

    drift_k = (-lambda_k + 3 eps C_N) z_k - [P_N phi^3]_k.

Two exact algebraic splittings of V_N are implemented:

* around the saddle, in mean + rescaled transverse fluctuation coordinates
  (z_0, y_perp) with z_perp = sqrt(eps) y_perp
  (``decompose_perp``), and
* around the well phi = 1, with phi = 1 + sqrt(eps) phi_hat
  (``decompose_plus``).

Both reproduce V_N to rounding error; they are identities, not expansions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import ConfigError
from .field import (
    FieldCoeffs,
    coeffs_to_grid,
    cubic_batch,
    min_padded_resolution,
    quadrature_integral,
)
from .gff import wick_integrals_multi
from .spectra import DomainSpec, lambda_grid, renorm_constants
from .wick import hermite


def value_batch(z: np.ndarray, spec: DomainSpec, eps: float) -> np.ndarray:
    """V_N for a batch of coefficient arrays."""
    lam = lambda_grid(spec)
    quad_form = 0.5 * np.sum(lam * np.abs(z) ** 2, axis=(-2, -1))
    c_n = renorm_constants(spec).c_n
    m = min_padded_resolution(spec.N)
    grid = coeffs_to_grid(z, spec, m)
    quartic = 0.25 * quadrature_integral(hermite(4, grid, eps * c_n), spec)
    return quad_form + quartic


def value(f: FieldCoeffs, eps: float) -> float:
    """V_N[phi]."""
    return float(value_batch(f.z[None, ...], f.spec, eps)[0])


def drift_batch(z: np.ndarray, spec: DomainSpec, eps: float,
                drop_wick_cubic: bool = False) -> np.ndarray:
    """Negative potential gradient in mode form (batched).

    drop_wick_cubic removes the renormalised cubic P_N phi^3 - 3 eps C_N phi
    as a unit, leaving the pure linear flow -lambda_k z_k (used by the
    Ornstein-Uhlenbeck validation of the integrator).
    """
    lam = lambda_grid(spec)
    if drop_wick_cubic:
        return -lam * z
    c_n = renorm_constants(spec).c_n
    return (-lam + 3.0 * eps * c_n) * z - cubic_batch(z, spec)


def drift(f: FieldCoeffs, eps: float) -> FieldCoeffs:
    """-grad V_N as a field; validated against finite differences of value()."""
    return FieldCoeffs(f.spec, drift_batch(f.z[None, ...], f.spec, eps)[0])


def field_to_real_vector(f: FieldCoeffs) -> np.ndarray:
    """Isometric real coordinates (z_0, sqrt(2) Re z_k, sqrt(2) Im z_k).

    The mapping preserves sum_k |z_k|^2, so gradients of V_N in these
    coordinates are the mode-form drift with the same scaling.
    """
    n = f.spec.N
    z = f.z
    coords = [float(z[n, n].real)]
    for i in range(2 * n + 1):
        for j in range(2 * n + 1):
            k1, k2 = i - n, j - n
            if (k1, k2) > (0, 0):
                coords.append(math.sqrt(2.0) * z[i, j].real)
                coords.append(math.sqrt(2.0) * z[i, j].imag)
    return np.array(coords)


def real_vector_to_field(vec: np.ndarray, spec: DomainSpec) -> FieldCoeffs:
    n = spec.N
    z = np.zeros((2 * n + 1, 2 * n + 1), dtype=complex)
    z[n, n] = vec[0]
    pos = 1
    for i in range(2 * n + 1):
        for j in range(2 * n + 1):
            k1, k2 = i - n, j - n
            if (k1, k2) > (0, 0):
                val = (vec[pos] + 1j * vec[pos + 1]) / math.sqrt(2.0)
                z[i, j] = val
                z[2 * n - i, 2 * n - j] = np.conj(val)
                pos += 2
    return FieldCoeffs(spec, z)


@dataclass(frozen=True)
class PerpDecomposition:
    """Saddle-frame split V_N(z_0, sqrt(eps) y_perp)/eps = q/eps + q1 + g + w.

    q  : double well z_0^4/(4 L^2) - |lambda_0| z_0^2 / 2 in the mean direction
    q1 : -3 z_0^2/(2 L^2) + 3 eps/(4 L^2)
    g  : transverse Gaussian form 1/2 sum_{k!=0} lambda_k |y_k|^2
    w  : Wick remainder 3(z_0^2-eps)/(2L^2) U_2 + (z_0/L) sqrt(eps) U_3 + eps/4 U_4
    """

    q: float
    q1: float
    g: float
    w: float

    def total(self, eps: float) -> float:
        return self.q / eps + self.q1 + self.g + self.w


def _perp_wick_integrals(fluct_z: np.ndarray, spec: DomainSpec) -> np.ndarray:
    c_perp = renorm_constants(spec).c_n_perp
    return wick_integrals_multi(
        fluct_z, spec, [(2, c_perp), (3, c_perp), (4, c_perp)]
    )


def _check_zero_mean(fluct: FieldCoeffs):
    n = fluct.spec.N
    if abs(fluct.z[n, n]) > 1e-12 * max(1.0, float(np.abs(fluct.z).max())):
        raise ConfigError("fluctuation must have zero mean")


def double_well_q(spec: DomainSpec, z0: float) -> float:
    return z0 ** 4 / (4.0 * spec.L ** 2) - 0.5 * z0 ** 2


def decompose_perp(z0: float, fluct: FieldCoeffs, eps: float) -> PerpDecomposition:
    """Exact saddle-frame decomposition; fluct are the rescaled y_perp coefficients."""
    _check_zero_mean(fluct)
    spec = fluct.spec
    l2 = spec.L ** 2
    lam = lambda_grid(spec)
    g = 0.5 * float(np.sum(lam * np.abs(fluct.z) ** 2))  # zero mode is zero anyway
    u2, u3, u4 = _perp_wick_integrals(fluct.z[None, ...], spec)[:, 0]
    w = (
        1.5 * (z0 ** 2 - eps) / l2 * u2
        + (z0 / spec.L) * math.sqrt(eps) * u3
        + 0.25 * eps * u4
    )
    q1 = -1.5 * z0 ** 2 / l2 + 0.75 * eps / l2
    return PerpDecomposition(q=double_well_q(spec, z0), q1=q1, g=float(g), w=float(w))


def decompose_plus(f: FieldCoeffs, eps: float) -> dict:
    """Exact well-frame split V_N(1 + sqrt(eps) phi_hat)/eps = q + g_plus + w_plus.

    f holds the coefficients of the rescaled fluctuation phi_hat around the
    well.  q carries the barrier depth -L^2/(4 eps), the renormalisation term
    -(3/2) L^2 C_N which deepens the well as N grows, and the constant
    (3/4) L^2 eps (C_N - C_{N,+})^2.  The Wick remainder w_plus uses the
    well constant C_{N,+}; the transformation between the two constants
    introduces the exact difference delta_c including its k = 0 part.
    """
    spec = f.spec
    consts = renorm_constants(spec)
    l2 = spec.L ** 2
    dc = consts.delta_c
    q = -l2 / (4.0 * eps) - 1.5 * l2 * consts.c_n + 0.75 * l2 * eps * dc * dc
    lam = lambda_grid(spec)
    g_plus = 0.5 * float(np.sum((lam + 3.0) * np.abs(f.z) ** 2))
    cp = consts.c_n_plus
    u1, u2, u3, u4 = wick_integrals_multi(
        f.z[None, ...], spec, [(1, cp), (2, cp), (3, cp), (4, cp)]
    )[:, 0]
    w_plus = (
        math.sqrt(eps) * u3
        + 0.25 * eps * u4
        - 3.0 * dc * (0.5 * eps * u2 + math.sqrt(eps) * u1)
    )
    return {"q": float(q), "g_plus": g_plus, "w_plus": float(w_plus)}


def w_mu(z0: float, fluct: FieldCoeffs, eps: float, mu: float) -> dict:
    """Interpolated Wick remainder and its uniform lower bound.

    value = 3 z_0^2/(2L^2) U_2 + mu * (-3 eps/(2L^2) U_2 + (z_0/L) sqrt(eps) U_3
    + eps/4 U_4); for mu in (0, 3/2) it never drops below -D_N(z_0, mu, eps)
    with D_N = (3/2) z_0^2 C_N + (3/4) mu eps C_N^2 L^2 (3/(1 - 2 mu/3) - 1).
    """
    if not 0.0 < mu < 1.5:
        raise ConfigError("mu must lie in the open interval (0, 3/2)")
    _check_zero_mean(fluct)
    spec = fluct.spec
    l2 = spec.L ** 2
    u2, u3, u4 = _perp_wick_integrals(fluct.z[None, ...], spec)[:, 0]
    val = 1.5 * z0 ** 2 / l2 * u2 + mu * (
        -1.5 * eps / l2 * u2 + (z0 / spec.L) * math.sqrt(eps) * u3 + 0.25 * eps * u4
    )
    c_n = renorm_constants(spec).c_n
    d_n = 1.5 * z0 ** 2 * c_n + 0.75 * mu * eps * c_n ** 2 * l2 * (
        3.0 / (1.0 - 2.0 * mu / 3.0) - 1.0
    )
    return {"value": float(val), "lower_bound": -float(d_n)}


def w_mu_batch(z0, u2, u3, u4, spec: DomainSpec, eps: float, mu: float):
    """Vectorised w^(mu) from precomputed transverse Wick integrals."""
    l2 = spec.L ** 2
    return 1.5 * z0 ** 2 / l2 * u2 + mu * (
        -1.5 * eps / l2 * u2 + (z0 / spec.L) * np.sqrt(eps) * u3 + 0.25 * eps * u4
    )


def k_factor_log(spec: DomainSpec, z0: float) -> float:
    """log K(z_0) = 1/2 sum_{k!=0} [zeta_k - log(1+zeta_k)], zeta_k = 3 z_0^2/(L^2 lambda_k)."""
    if spec.N == 0:
        return 0.0
    lam = lambda_grid(spec).copy()
    n = spec.N
    lam[n, n] = np.inf
    zeta = 3.0 * z0 ** 2 / (spec.L ** 2 * lam)
    return 0.5 * float(math.fsum((zeta - np.log1p(zeta)).ravel()[np.isfinite(zeta.ravel())]))


def k_factor(spec: DomainSpec, z0: float) -> float:
    """Change-of-mass normalisation K(z_0) >= 1 between the transverse measures."""
    return math.exp(k_factor_log(spec, z0))


def k_factor_quartic_bound(spec: DomainSpec) -> float:
    """M_1 with log K(z_0) <= M_1 z_0^4, from 2 log K <= 1/2 sum zeta_k^2."""
    if spec.N == 0:
        return 0.0
    lam = lambda_grid(spec).copy()
    n = spec.N
    lam[n, n] = np.inf
    s2 = float(math.fsum((lam ** -2.0).ravel()[np.isfinite(lam.ravel())]))
    return 9.0 * s2 / (4.0 * spec.L ** 4)


def h_plus(z0: float, delta: float, eps: float) -> dict:
    """Capped Gaussian-integral committor profile in the mean direction.

    value(z0) = int_{z0}^{delta} e^{-|l0| t^2/(2 eps)} dt / int_{-delta}^{delta},
    clamped to 1 below -delta and 0 above delta; derivative vanishes outside
    (-delta, delta).  The normalising integral squared is
    (2 pi eps/|l0|) erf(delta sqrt(|l0|/(2 eps)))^2.
    """
    if not (0.0 < delta):
        raise ConfigError("delta must be positive")
    if eps <= 0.0:
        raise ConfigError("eps must be positive")
    lam0 = 1.0  # |lambda_0|
    scale = math.sqrt(2.0 * eps / lam0)
    denom = math.sqrt(math.pi) * scale / 2.0 * 2.0 * erf(delta / scale)
    if z0 <= -delta:
        return {"value": 1.0, "derivative": 0.0}
    if z0 >= delta:
        return {"value": 0.0, "derivative": 0.0}
    numer = math.sqrt(math.pi) * scale / 2.0 * (erf(delta / scale) - erf(z0 / scale))
    return {
        "value": numer / denom,
        "derivative": -math.exp(-lam0 * z0 ** 2 / (2.0 * eps)) / denom,
    }
