"""Time integration of the renormalised stochastic dynamics and hitting times.

The Galerkin system is the Ito SDE dz = -grad V_N(z) dt + sqrt(2 eps) dW on
the reality-constrained coefficients.  The default integrator treats the
linear part (-lambda_k + 3 eps C_N) z_k exactly per mode (exponential Euler:
exact Ornstein-Uhlenbeck update of both mean and variance) and the projected
cubic explicitly; an Euler-Maruyama scheme is available for cross-checks but
is only stable for dt * max lambda_k <= 2.

Noise streams are counter-based: path i consumes the Philox stream keyed by
(seed, i) regardless of scheduling, so a run is a pure function of
(seed, n_paths).  Paths are integrated in parallel slots; each slot works
through a fixed queue of path indices (slot s handles paths s, s + B, ...),
which keeps the estimate free of completion-order selection bias.

Hitting is checked after every step against the target set

    B = { mean in [1-delta, 1+delta],  ||phi_perp||_{H^s} <= r sqrt(eps log(1/eps)) }

(A is the mirror image around mean -1).  Paths that reach t_max are censored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError, ConfigError, InvalidEstimateError
from .field import FieldCoeffs, constant_field, sobolev_weights, symmetrize_reality
from .gff import McEstimate, philox_stream
from .potential import value_batch
from .spectra import DomainSpec, lambda_grid, renorm_constants

EXPONENTIAL_EULER = "exponential-euler"
EULER_MARUYAMA = "euler-maruyama"

_RESYMMETRIZE_EVERY = 512  # guard against fp drift of the reality constraint
_FINITE_CHECK_EVERY = 64
_NOISE_BUDGET_BYTES = 128 * 2 ** 20


@dataclass(frozen=True)
class SimConfig:
    eps: float
    dt: float
    t_max: float
    seed: int = 0
    integrator: str = EXPONENTIAL_EULER
    drop_wick_cubic: bool = False  # pure OU dynamics, for integrator validation

    def __post_init__(self):
        if self.eps < 0.0:
            raise ConfigError("eps must be nonnegative")
        if self.dt <= 0.0 or self.t_max <= 0.0:
            raise ConfigError("dt and t_max must be positive")
        if self.integrator not in (EXPONENTIAL_EULER, EULER_MARUYAMA):
            raise ConfigError(f"unknown integrator {self.integrator!r}")


@dataclass(frozen=True)
class HitSets:
    """Neighbourhoods of the two wells used as source and target sets."""

    delta: float = 0.5
    s: float = -0.25
    r: float = 5.0

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ConfigError("delta must lie in (0, 1)")
        if self.s >= 0.0:
            raise ConfigError("Sobolev order s must be negative")
        if self.r <= 0.0:
            raise ConfigError("radius constant r must be positive")

    @property
    def rho(self) -> float:
        return 1.0 - self.delta

    def radius(self, eps: float) -> float:
        """Fluctuation radius r * sqrt(eps log(1/eps)); infinite for eps >= 1."""
        if eps <= 0.0:
            return 0.0
        lg = math.log(1.0 / eps)
        return self.r * math.sqrt(eps * lg) if lg > 0.0 else math.inf


@dataclass(frozen=True)
class TransitionSample:
    tau: float
    censored: bool
    n_steps: int


@dataclass
class TransitionResult:
    samples: list
    estimate: McEstimate
    censored_fraction: float
    valid: bool
    t_max: float
    integrator: str

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate.to_dict(),
            "censored_fraction": self.censored_fraction,
            "valid": self.valid,
            "t_max": self.t_max,
            "integrator": self.integrator,
            "n_paths": len(self.samples),
        }


class _Stepper:
    """Precomputed per-mode update arrays plus exact small-DFT cubic."""

    def __init__(self, spec: DomainSpec, cfg: SimConfig):
        self.spec = spec
        self.cfg = cfg
        lam = lambda_grid(spec)
        if cfg.drop_wick_cubic:
            c = -lam
        else:
            c = -lam + 3.0 * cfg.eps * renorm_constants(spec).c_n
        dt = cfg.dt
        if cfg.integrator == EULER_MARUYAMA:
            lam_max = float(lam.max())
            if dt * lam_max > 2.0:
                raise ConfigError(
                    f"Euler-Maruyama unstable: dt*lambda_max = {dt * lam_max:.3g} > 2"
                )
            self.propagator = 1.0 + c * dt
            self.cubic_weight = dt
            self.noise_std = np.full_like(c, math.sqrt(2.0 * cfg.eps * dt))
        else:
            e = np.exp(c * dt)
            self.propagator = e
            with np.errstate(divide="ignore", invalid="ignore"):
                phi1 = np.where(np.abs(c) > 1e-12, np.expm1(c * dt) / c, dt)
                var = np.where(
                    np.abs(c) > 1e-12,
                    cfg.eps * np.expm1(2.0 * c * dt) / c,
                    2.0 * cfg.eps * dt,
                )
            self.cubic_weight = phi1
            self.noise_std = np.sqrt(var)
        # Exact collocation via small DFT matrices: grid = Re(F z F^T)/L on the
        # padded M x M grid (M = 3(2N+1)), coefficients of phi^3 back through
        # the conjugate pair.  Much faster than generic FFTs at these sizes.
        n = spec.N
        m = 3 * (2 * n + 1)
        k = np.arange(-n, n + 1)
        mm = np.arange(m)
        self._fwd = np.exp(2j * np.pi * np.outer(mm, k) / m)
        self._fwd_t = np.ascontiguousarray(self._fwd.T)
        self._inv = np.ascontiguousarray(self._fwd.conj().T)
        self._inv_t = np.ascontiguousarray(self._inv.T)
        self._scale = spec.L / (m * m)
        self._inv_l = 1.0 / spec.L

    def cubic(self, z: np.ndarray) -> np.ndarray:
        grid = np.ascontiguousarray((self._fwd @ z @ self._fwd_t).real) * self._inv_l
        g3 = grid * grid * grid  # elementwise products beat the generic pow kernel
        return (self._inv @ g3.astype(complex) @ self._inv_t) * self._scale

    def advance(self, z: np.ndarray, noise: np.ndarray) -> np.ndarray:
        """One step for a batch; noise is unit reality-constrained complex."""
        if self.cfg.drop_wick_cubic:
            return self.propagator * z + self.noise_std * noise
        return (
            self.propagator * z
            - self.cubic_weight * self.cubic(z)
            + self.noise_std * noise
        )


def unit_reality_noise(rng: np.random.Generator, n_modes: int, size: int) -> np.ndarray:
    """size unit-variance complex arrays with z_{-k} = conj(z_k), z_0 real N(0,1)."""
    g = rng.standard_normal((size, n_modes, n_modes, 2)).view(complex)[..., 0]
    g /= math.sqrt(2.0)
    return (g + np.conj(g[:, ::-1, ::-1])) / math.sqrt(2.0)


def step(state: FieldCoeffs, cfg: SimConfig, rng: np.random.Generator) -> FieldCoeffs:
    """Single time step of one field; reality constraint preserved exactly."""
    stepper = _Stepper(state.spec, cfg)
    n = 2 * state.spec.N + 1
    noise = unit_reality_noise(rng, n, 1)
    z = stepper.advance(state.z[None, ...], noise)[0]
    if not np.all(np.isfinite(z)):
        raise BlowUpError("non-finite state after one step")
    return FieldCoeffs(state.spec, z)


def membership(f: FieldCoeffs, h: HitSets, eps: float) -> dict:
    """Tests phi against the two wells: mean interval plus fluctuation radius."""
    mean = f.mean
    n = f.spec.N
    w = sobolev_weights(f.spec, h.s).copy()
    w[n, n] = 0.0
    fluct_norm = math.sqrt(float(np.sum(w * np.abs(f.z) ** 2)))
    rad = h.radius(eps)
    in_ball = fluct_norm <= rad
    return {
        "in_A": bool(abs(mean + 1.0) <= h.delta and in_ball),
        "in_B": bool(abs(mean - 1.0) <= h.delta and in_ball),
    }


class _SlotNoise:
    """Blocked per-path noise; slot s buffers the stream of its current path."""

    def __init__(self, seed: int, n_modes: int, n_slots: int):
        self.seed = seed
        self.n_modes = n_modes
        self.block = int(
            np.clip(_NOISE_BUDGET_BYTES // (16 * max(1, n_slots) * n_modes ** 2), 16, 512)
        )
        self.buf = np.zeros((n_slots, self.block, n_modes, n_modes), dtype=complex)
        self.cur = np.full(n_slots, self.block, dtype=np.int64)
        self.rngs: list = [None] * n_slots

    def attach(self, slot: int, path: int):
        self.rngs[slot] = philox_stream(self.seed, path)
        self.buf[slot] = unit_reality_noise(self.rngs[slot], self.n_modes, self.block)
        self.cur[slot] = 0

    def take(self, slots: np.ndarray) -> np.ndarray:
        exhausted = slots[self.cur[slots] >= self.block]
        for s in exhausted:
            self.buf[s] = unit_reality_noise(self.rngs[s], self.n_modes, self.block)
            self.cur[s] = 0
        out = self.buf[slots, self.cur[slots]]
        self.cur[slots] += 1
        return out


def sample_transition_times(
    spec: DomainSpec,
    cfg: SimConfig,
    h: HitSets,
    n_paths: int,
    start: FieldCoeffs | None = None,
    max_slots: int | None = None,
) -> TransitionResult:
    """Mean first-hitting time of B for n_paths independent paths.

    Every path starts from phi = -1 (or the supplied field) and runs until it
    enters B or reaches t_max.  The estimate averages uncensored paths and is
    flagged invalid when more than 1 percent of paths were censored; it
    raises when no path arrives at all.
    """
    if n_paths < 1:
        raise ConfigError("need at least one path")
    if max_slots is None:
        # larger batches thrash cache once the padded grids are involved
        max_slots = 2048 if spec.N == 0 else 256
    if start is None:
        start = constant_field(spec, -1.0)
    stepper = _Stepper(spec, cfg)
    n = 2 * spec.N + 1
    weights = sobolev_weights(spec, h.s).copy()
    weights[spec.N, spec.N] = 0.0
    radius_sq = h.radius(cfg.eps) ** 2
    max_steps = int(math.ceil(cfg.t_max / cfg.dt))

    n_slots = min(n_paths, max_slots)
    noise = _SlotNoise(cfg.seed, n, n_slots)
    taus = np.full(n_paths, np.nan)
    censored = np.zeros(n_paths, dtype=bool)
    n_steps = np.zeros(n_paths, dtype=np.int64)

    slot_path = np.arange(n_slots)
    for s in range(n_slots):
        noise.attach(s, s)
    z = np.broadcast_to(start.z, (n_slots, n, n)).copy()
    steps = np.zeros(n_slots, dtype=np.int64)
    active = np.ones(n_slots, dtype=bool)
    next_path = n_slots

    def finish(slot: int, tau: float, was_censored: bool):
        nonlocal next_path
        p = int(slot_path[slot])
        taus[p] = tau
        censored[p] = was_censored
        n_steps[p] = steps[slot]
        if next_path < n_paths:
            slot_path[slot] = next_path
            noise.attach(slot, next_path)
            z[slot] = start.z
            steps[slot] = 0
            next_path += 1
        else:
            active[slot] = False

    if membership(start, h, cfg.eps)["in_B"]:
        for p in range(n_paths):
            taus[p] = 0.0
        samples = [TransitionSample(0.0, False, 0) for _ in range(n_paths)]
        est = McEstimate(0.0, 0.0, n_paths, cfg.seed)
        return TransitionResult(samples, est, 0.0, True, cfg.t_max, cfg.integrator)

    iteration = 0
    while np.any(active):
        idx = np.nonzero(active)[0]
        eta = noise.take(idx)
        z[idx] = stepper.advance(z[idx], eta)
        steps[idx] += 1
        iteration += 1
        if iteration % _RESYMMETRIZE_EVERY == 0:
            z[idx] = symmetrize_reality(z[idx])
        if iteration % _FINITE_CHECK_EVERY == 0 and not np.all(np.isfinite(z[idx])):
            bad = [int(slot_path[s]) for s in idx if not np.all(np.isfinite(z[s]))]
            raise BlowUpError(
                f"non-finite state in paths {bad} at step {iteration} "
                f"(eps={cfg.eps}, dt={cfg.dt}, integrator={cfg.integrator})"
            )
        mean = z[idx, spec.N, spec.N].real / spec.L
        fluct_sq = np.einsum("sij,ij->s", np.abs(z[idx]) ** 2, weights)
        hit = (np.abs(mean - 1.0) <= h.delta) & (fluct_sq <= radius_sq)
        timed_out = steps[idx] >= max_steps
        if hit.any() or timed_out.any():
            for slot, is_hit, is_out in zip(idx, hit, timed_out):
                if is_hit:
                    finish(int(slot), steps[slot] * cfg.dt, False)
                elif is_out:
                    finish(int(slot), cfg.t_max, True)

    samples = [
        TransitionSample(float(taus[i]), bool(censored[i]), int(n_steps[i]))
        for i in range(n_paths)
    ]
    unc = taus[~censored]
    if unc.size == 0:
        raise InvalidEstimateError("all paths were censored; increase t_max")
    frac = float(np.count_nonzero(censored)) / n_paths
    mean_tau = float(np.mean(unc))
    stderr = float(np.std(unc, ddof=1) / math.sqrt(unc.size)) if unc.size > 1 else math.inf
    est = McEstimate(mean_tau, stderr, int(unc.size), cfg.seed)
    return TransitionResult(
        samples=samples,
        estimate=est,
        censored_fraction=frac,
        valid=frac < 0.01,
        t_max=cfg.t_max,
        integrator=cfg.integrator,
    )


@dataclass
class TrajectoryRecord:
    """Decimated observables of a single path (for the CSV dump)."""

    t: np.ndarray
    mean: np.ndarray
    fluct_norm: np.ndarray
    energy: np.ndarray
    hit_b: bool
    tau: float


def simulate_trajectory(
    spec: DomainSpec,
    cfg: SimConfig,
    h: HitSets,
    start: FieldCoeffs | None = None,
    record_every: int = 10,
    path_id: int = 0,
) -> TrajectoryRecord:
    """Single path with decimated (t, mean, H^s norm, V_N) records."""
    if start is None:
        start = constant_field(spec, -1.0)
    stepper = _Stepper(spec, cfg)
    n = 2 * spec.N + 1
    rng = philox_stream(cfg.seed, path_id)
    weights = sobolev_weights(spec, h.s).copy()
    weights[spec.N, spec.N] = 0.0
    radius_sq = h.radius(cfg.eps) ** 2
    max_steps = int(math.ceil(cfg.t_max / cfg.dt))

    z = start.z[None, ...].copy()
    rows_t, rows_mean, rows_norm, rows_energy = [], [], [], []
    hit = False
    tau = cfg.t_max

    def record(step_no: int):
        rows_t.append(step_no * cfg.dt)
        rows_mean.append(float(z[0, spec.N, spec.N].real) / spec.L)
        rows_norm.append(math.sqrt(float(np.sum(weights * np.abs(z[0]) ** 2))))
        rows_energy.append(float(value_batch(z, spec, cfg.eps)[0]))

    record(0)
    for step_no in range(1, max_steps + 1):
        z = stepper.advance(z, unit_reality_noise(rng, n, 1))
        if step_no % _FINITE_CHECK_EVERY == 0 and not np.all(np.isfinite(z)):
            raise BlowUpError(f"non-finite state at step {step_no}")
        if step_no % record_every == 0:
            record(step_no)
        mean = float(z[0, spec.N, spec.N].real) / spec.L
        fluct_sq = float(np.sum(weights * np.abs(z[0]) ** 2))
        if abs(mean - 1.0) <= h.delta and fluct_sq <= radius_sq:
            hit = True
            tau = step_no * cfg.dt
            record(step_no)
            break
    return TrajectoryRecord(
        t=np.array(rows_t),
        mean=np.array(rows_mean),
        fluct_norm=np.array(rows_norm),
        energy=np.array(rows_energy),
        hit_b=hit,
        tau=tau,
    )
