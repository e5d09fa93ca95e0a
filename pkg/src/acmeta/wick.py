"""Hermite polynomials H_n(X, C) and an exact Gaussian moment oracle.

The two-parameter Hermite polynomials are defined by the recursion

    H_0 = 1,    H_n = X * H_{n-1} - C * d/dX H_{n-1},

so that H_n(X, 0) = X^n and, for a centred Gaussian X with variance C,
H_n(X, C) is the n-th Wick power :X^n:.  Everything here is exact: the
coefficient tables are integers produced by the recursion, and the moment
oracle expands Hermite products into raw monomials and applies the Isserlis
pairing formula, using rational arithmetic whenever the covariance data is
rational.

For monic Hermite polynomials of jointly centred Gaussians with matching
variance parameters,

    E[H_n(X, Var X) H_m(Y, Var Y)] = 0            (n != m)
                                   = n! E[XY]^n   (n == m),

including the n! factor; the oracle is the ground truth for it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

MAX_DEGREE = 6


@lru_cache(maxsize=None)
def hermite_coefficients(n: int) -> tuple[tuple[int, int, int], ...]:
    """Integer coefficient table of H_n as tuples (coef, x_power, c_power).

    Built from the recursion itself, so tests comparing against the closed
    forms exercise the recursion exactly.
    """
    if not 0 <= n <= MAX_DEGREE:
        raise ValueError(f"Hermite degree {n} outside supported range 0..{MAX_DEGREE}")
    if n == 0:
        return ((1, 0, 0),)
    table: dict[tuple[int, int], int] = {}
    for coef, i, j in hermite_coefficients(n - 1):
        table[(i + 1, j)] = table.get((i + 1, j), 0) + coef        # X * H_{n-1}
        if i >= 1:
            table[(i - 1, j + 1)] = table.get((i - 1, j + 1), 0) - i * coef
    return tuple(
        (c, i, j) for (i, j), c in sorted(table.items(), reverse=True) if c != 0
    )


def hermite(n: int, x, c):
    """Value of H_n(x, c); broadcasts over ndarray inputs."""
    coeffs = hermite_coefficients(n)
    x = np.asarray(x) if isinstance(x, np.ndarray) else x
    total = 0
    for coef, i, j in coeffs:
        total = total + coef * x ** i * (c ** j if j else 1)
    return total


def hermite_shift(n: int, x, v, c):
    """Binomial form sum_j binom(n,j) H_{n-j}(x, c) v^j; equals H_n(x+v, c)."""
    total = 0
    for j in range(n + 1):
        total = total + comb(n, j) * hermite(n - j, x, c) * v ** j
    return total


def hermite_reconstant(n: int, x, c, c_bar):
    """Re-express H_n(x, c) through Hermite polynomials with constant c_bar.

    Supported for n <= 4; identical to hermite(n, x, c) for all real inputs.
    """
    d = c - c_bar
    if n == 0:
        return hermite(0, x, c_bar)
    if n == 1:
        return hermite(1, x, c_bar)
    if n == 2:
        return hermite(2, x, c_bar) - d
    if n == 3:
        return hermite(3, x, c_bar) - 3 * d * hermite(1, x, c_bar)
    if n == 4:
        return hermite(4, x, c_bar) - 6 * d * hermite(2, x, c_bar) + 3 * d ** 2
    raise ValueError("constant transformation implemented for degrees 0..4")


@dataclass(frozen=True)
class GaussianVector:
    """Small jointly Gaussian vector given by its covariance matrix.

    The matrix must be symmetric positive semidefinite; this is checked by an
    attempted Cholesky factorisation (with an eigenvalue fallback for the
    semidefinite boundary).  Entries may be ints, Fractions or floats; exact
    entries keep the moment oracle exact.
    """

    covariance: tuple

    def __post_init__(self):
        sigma = self.as_array()
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise ValueError("covariance must be a square matrix")
        if sigma.shape[0] > 8:
            raise ValueError("GaussianVector supports dimension <= 8")
        if not np.allclose(sigma, sigma.T, rtol=0.0, atol=1e-12):
            raise ValueError("covariance must be symmetric")
        try:
            np.linalg.cholesky(sigma + 1e-12 * np.eye(sigma.shape[0]))
        except np.linalg.LinAlgError as exc:
            if np.linalg.eigvalsh(sigma).min() < -1e-10:
                raise ValueError("covariance must be positive semidefinite") from exc

    @classmethod
    def from_matrix(cls, sigma) -> "GaussianVector":
        return cls(tuple(tuple(row) for row in sigma))

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.covariance])

    def cov(self, a: int, b: int):
        return self.covariance[a][b]

    @property
    def dim(self) -> int:
        return len(self.covariance)


def _isserlis(labels: tuple[int, ...], gv: GaussianVector):
    """E[prod_i X_{labels[i]}] via recursive pairing; 0 for odd degree."""
    if len(labels) == 0:
        return 1
    if len(labels) % 2 == 1:
        return 0
    return _isserlis_cached(labels, gv)


@lru_cache(maxsize=100000)
def _isserlis_cached(labels: tuple[int, ...], gv: GaussianVector):
    first, rest = labels[0], labels[1:]
    total = 0
    for idx in range(len(rest)):
        cov = gv.cov(first, rest[idx])
        if cov == 0:
            continue
        total = total + cov * _isserlis(rest[:idx] + rest[idx + 1 :], gv)
    return total


def wick_moment_oracle(gv: GaussianVector, monomial) -> float:
    """Exact E[prod_i H_{n_i}(X_{v_i}, C_i)] for jointly Gaussian X.

    monomial is a list of (variable index, Hermite degree, constant) triples
    with total degree at most 12.  Constants given as ints or Fractions are
    handled exactly; the result is returned as a float (and as an exact
    Fraction when all inputs are rational, via `.as_integer_ratio` semantics
    of the returned Fraction converted lazily).
    """
    total_degree = sum(n for _, n, _ in monomial)
    if total_degree > 12:
        raise ValueError("total polynomial degree exceeds the oracle budget (12)")
    for v, n, _ in monomial:
        if not 0 <= v < gv.dim:
            raise ValueError(f"variable index {v} out of range")
        if not 0 <= n <= MAX_DEGREE:
            raise ValueError(f"Hermite degree {n} outside supported range")

    exact = all(isinstance(c, (int, Fraction)) for _, _, c in monomial) and all(
        isinstance(v, (int, Fraction)) for row in gv.covariance for v in row
    )

    terms = [(1 if exact else 1.0, ())]  # (scalar, tuple of variable labels)
    for v, n, c in monomial:
        c_val = Fraction(c) if exact else float(c)
        new_terms = []
        for coef, i, j in hermite_coefficients(n):
            w = coef * (c_val ** j if j else 1)
            for scalar, labels in terms:
                new_terms.append((scalar * w, labels + (v,) * i))
        terms = new_terms

    result = 0
    for scalar, labels in terms:
        if scalar == 0:
            continue
        result = result + scalar * _isserlis(tuple(sorted(labels)), gv)
    return float(result)
