"""Experiment runner: reproducible commands, JSON summaries, CSV tables.

Every command materialises an ExperimentConfig, stamps its content hash and
seed into the outputs, and writes `summary.json` (sorted keys, repr-exact
floats) plus `samples.csv` where per-sample data exists.  Numeric results are
a pure function of (config, seed); wall-clock time lives in a separate
`meta` block outside the determinism contract.

Exit codes: 0 success, 2 invalid estimate, 3 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import selfcheck
from .dynamics import HitSets, SimConfig, sample_transition_times, simulate_trajectory
from .errors import ConfigError, InvalidEstimateError
from .estimators import (
    CapacityBounds,
    capacity_lower_mc,
    capacity_upper_mc,
    ek_theory,
    expected_time_pt,
    oracle_1d,
    partition_lower_mc,
    partition_upper,
)
from .spectra import DomainSpec, det2_diagonal, ek_prefactor, renorm_constants

SCHEMA_VERSION = 1


@dataclass
class ExperimentConfig:
    """Flat, unit-explicit experiment parameters (lengths in L, times in t)."""

    command: str
    L: float = 1.0
    bc: str = "periodic"
    N: int = 4
    eps: list = dc_field(default_factory=lambda: [0.1])
    delta: float = 0.5
    s: float = -0.25
    r: float = 5.0
    dt: float = 0.01
    t_max: float = 0.0          # 0 means derive from the predicted mean time
    paths: int = 200
    samples: int = 20000
    seed: int = 1
    cutoff: int = -1            # -1 means limit mode for the prefactor
    tol: float = 1e-8
    theta: float = 0.0
    outdir: str = "out"

    def validate(self):
        DomainSpec(self.L, self.N, self.bc)  # re-checks the physical invariants
        if any(e <= 0 for e in self.eps):
            raise ConfigError("eps values must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError("delta must lie in (0, 1)")
        if self.s >= 0:
            raise ConfigError("s must be negative")
        if self.paths < 1 or self.samples < 100:
            raise ConfigError("paths must be >= 1 and samples >= 100")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        data = json.loads(text)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @property
    def content_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def emit_report(outdir: Path, config: ExperimentConfig, results: dict,
                samples_rows: list | None = None,
                samples_header: list | None = None,
                wall_clock: float = 0.0) -> Path:
    """Write summary.json (+ samples.csv); numeric fields are deterministic."""
    outdir.mkdir(parents=True, exist_ok=True)
    record = {
        "schema_version": SCHEMA_VERSION,
        "experiment_id": f"{config.command}-{config.content_hash}",
        "config_hash": config.content_hash,
        "config": json.loads(config.to_json()),
        "results": results,
        "meta": {"wall_clock_s": wall_clock},
    }
    path = outdir / "summary.json"
    path.write_text(json.dumps(record, sort_keys=True, indent=2, allow_nan=True) + "\n")
    if samples_rows is not None:
        with open(outdir / "samples.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(samples_header or [])
            writer.writerows(samples_rows)
    return path


def _hit_sets(cfg: ExperimentConfig) -> HitSets:
    return HitSets(delta=cfg.delta, s=cfg.s, r=cfg.r)


def _spec(cfg: ExperimentConfig) -> DomainSpec:
    return DomainSpec(cfg.L, cfg.N, cfg.bc)


def cmd_prefactor(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    cutoff = "limit" if cfg.cutoff < 0 else cfg.cutoff
    res = ek_prefactor(_spec(cfg), cutoff, tol=cfg.tol)
    return (
        {
            "prefactor": res.prefactor,
            "tail_bound": res.tail_bound,
            "relative_error_bound": res.relative_error_bound,
            "cutoff_used": res.cutoff,
        },
        [],
        [],
    )


def cmd_constants(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    spec = _spec(cfg)
    consts = renorm_constants(spec)
    d2 = det2_diagonal(spec, spec.N) if spec.N > 0 else None
    out = {
        "C_N": consts.c_n,
        "C_N_perp": consts.c_n_perp,
        "C_N_plus": consts.c_n_plus,
        "delta_C": consts.delta_c,
    }
    if d2 is not None:
        out["det2"] = d2.det2
        out["raw_product"] = d2.raw_product
    return out, [], []


def cmd_oracle1d(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    rows = []
    out = {}
    for eps in cfg.eps:
        res = oracle_1d(cfg.L, eps, cfg.delta)
        out[f"eps={eps}"] = res.to_dict()
        for z in np.linspace(-(1 - cfg.delta) * cfg.L, (1 - cfg.delta) * cfg.L, 21):
            rows.append([eps, float(z), res.committor(float(z))])
    return out, rows, ["eps", "z0", "committor"]


def cmd_simulate(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    spec = _spec(cfg)
    hit = _hit_sets(cfg)
    out = {}
    rows = []
    for eps in cfg.eps:
        theory = ek_theory(spec, eps)
        t_max = cfg.t_max if cfg.t_max > 0 else 50.0 * theory.value
        sim = SimConfig(eps=eps, dt=cfg.dt, t_max=t_max, seed=cfg.seed)
        result = sample_transition_times(spec, sim, hit, cfg.paths)
        if not result.valid:
            raise InvalidEstimateError(
                f"censored fraction {result.censored_fraction:.3f} too large at eps={eps}"
            )
        out[f"eps={eps}"] = result.to_dict()
        for i, s in enumerate(result.samples):
            rows.append([eps, i, s.tau, int(s.censored), s.n_steps])
    return out, rows, ["eps", "path", "tau", "censored", "n_steps"]


def cmd_capacity(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    spec = _spec(cfg)
    hit = _hit_sets(cfg)
    out = {}
    for eps in cfg.eps:
        upper = capacity_upper_mc(spec, eps, cfg.delta, cfg.samples, cfg.seed)
        lower = capacity_lower_mc(spec, eps, hit, cfg.samples, cfg.seed + 1)
        bounds = CapacityBounds(upper=upper, lower=lower)
        if not bounds.consistent():
            raise InvalidEstimateError(f"capacity bounds inverted at eps={eps}")
        out[f"eps={eps}"] = {
            "upper": upper.to_dict(),
            "lower": lower.to_dict(),
            "consistent": bounds.consistent(),
        }
    return out, [], []


def cmd_partition(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    spec = _spec(cfg)
    out = {}
    for eps in cfg.eps:
        lower = partition_lower_mc(spec, eps, cfg.samples, cfg.seed)
        upper = partition_upper(spec, eps, cfg.samples, cfg.seed + 1)
        out[f"eps={eps}"] = {
            "lower": lower.to_dict(),
            "upper": upper["upper"].to_dict(),
            "mc_exact": upper["mc_exact"].to_dict(),
            "envelope_m": upper["envelope_m"],
        }
    return out, [], []


def cmd_theory_vs_sim(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    spec = _spec(cfg)
    hit = _hit_sets(cfg)
    out = {}
    rows = []
    for eps in cfg.eps:
        theory = ek_theory(spec, eps, theta=cfg.theta)
        t_max = cfg.t_max if cfg.t_max > 0 else 50.0 * theory.value
        sim = SimConfig(eps=eps, dt=cfg.dt, t_max=t_max, seed=cfg.seed)
        result = sample_transition_times(spec, sim, hit, cfg.paths)
        est = result.estimate
        ratio = est.value / theory.value
        out[f"eps={eps}"] = {
            "E_sim": est.value,
            "stderr": est.stderr,
            "E_theory": theory.value,
            "ratio": ratio,
            "censored_fraction": result.censored_fraction,
            "theory": theory.to_dict(),
            "valid": result.valid,
        }
        rows.append([eps, est.value, est.stderr, theory.value, ratio])
        if not result.valid:
            raise InvalidEstimateError(f"too many censored paths at eps={eps}")
    return out, rows, ["eps", "E_sim", "stderr", "E_theory", "ratio"]


def cmd_selftest(cfg: ExperimentConfig) -> tuple[dict, list, list]:
    report = selfcheck.run_all(seed=cfg.seed)
    if not report["all_passed"]:
        raise InvalidEstimateError("selftest failures: " + ", ".join(report["failures"]))
    return report, [], []


_COMMANDS = {
    "prefactor": cmd_prefactor,
    "constants": cmd_constants,
    "simulate": cmd_simulate,
    "capacity": cmd_capacity,
    "partition": cmd_partition,
    "theory-vs-sim": cmd_theory_vs_sim,
    "oracle1d": cmd_oracle1d,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="acmeta",
        description="Renormalised stochastic phase-field metastability toolkit",
    )
    p.add_argument("command", choices=sorted(_COMMANDS))
    p.add_argument("--config", type=str, default=None, help="JSON config file")
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--bc", type=str, default=None, choices=["periodic", "neumann"])
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--eps", type=str, default=None, help="comma-separated list")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--t-max", dest="t_max", type=float, default=None)
    p.add_argument("--paths", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--limit", action="store_true", help="prefactor limit mode")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--outdir", type=str, default=None)
    p.add_argument("--traj", type=str, default=None,
                   help="write a decimated trajectory CSV (simulate only)")
    return p


def config_from_args(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.from_json(Path(args.config).read_text())
        cfg.command = args.command
    else:
        cfg = ExperimentConfig(command=args.command)
    for key in ("L", "bc", "N", "delta", "s", "r", "dt", "t_max", "paths",
                "samples", "seed", "cutoff", "tol", "theta", "outdir"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if args.eps is not None:
        cfg.eps = [float(x) for x in args.eps.split(",") if x]
    if args.limit:
        cfg.cutoff = -1
    cfg.validate()
    return cfg


def _write_trajectory(path: str, cfg: ExperimentConfig):
    spec = _spec(cfg)
    hit = _hit_sets(cfg)
    eps = cfg.eps[0]
    theory = ek_theory(spec, eps)
    t_max = cfg.t_max if cfg.t_max > 0 else 50.0 * theory.value
    sim = SimConfig(eps=eps, dt=cfg.dt, t_max=t_max, seed=cfg.seed)
    rec = simulate_trajectory(spec, sim, hit)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "mean", "fluct_norm_hs", "energy"])
        for row in zip(rec.t, rec.mean, rec.fluct_norm, rec.energy):
            writer.writerow(list(row))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigError, json.JSONDecodeError, FileNotFoundError, TypeError) as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return 3
    t0 = time.monotonic()
    try:
        results, rows, header = _COMMANDS[cfg.command](cfg)
        if args.traj and cfg.command == "simulate":
            _write_trajectory(args.traj, cfg)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return 3
    except InvalidEstimateError as exc:
        print(json.dumps({"error": "invalid_estimate", "message": str(exc)}),
              file=sys.stderr)
        return 2
    wall = time.monotonic() - t0
    path = emit_report(Path(cfg.outdir), cfg, results,
                       samples_rows=rows or None,
                       samples_header=header or None,
                       wall_clock=wall)
    print(json.dumps({"summary": str(path), "experiment_id":
                      f"{cfg.command}-{cfg.content_hash}"}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
