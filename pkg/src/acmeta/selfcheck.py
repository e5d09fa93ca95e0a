"""Fast invariant suite behind the `selftest` command (seconds, not minutes).

Each check returns (name, passed, detail).  These are exact algebraic or
oracle identities; statistical checks live in the full test suite.
"""

from __future__ import annotations

import math

import numpy as np

from . import potential, wick
from .field import (
    FieldCoeffs,
    constant_field,
    cubic_projected,
    decompose,
    from_real,
    to_real,
)
from .gff import covariance_sum_exact, philox_stream, gamma_perp0, sample_batch
from .spectra import DomainSpec, det2_diagonal, ek_prefactor, renorm_constants


def _random_field(spec: DomainSpec, rng) -> FieldCoeffs:
    n = 2 * spec.N + 1
    g = rng.standard_normal((n, n, 2)).view(complex)[..., 0]
    z = 0.5 * (g + np.conj(g[::-1, ::-1]))
    return FieldCoeffs(spec, z)


def check_hermite(seed: int):
    rng = philox_stream(seed, 0)
    xs = rng.uniform(-5, 5, 40)
    cs = rng.uniform(0.1, 10, 40)
    closed = {
        2: lambda x, c: x * x - c,
        3: lambda x, c: x ** 3 - 3 * c * x,
        4: lambda x, c: x ** 4 - 6 * c * x * x + 3 * c * c,
    }
    worst = 0.0
    for n, f in closed.items():
        a = wick.hermite(n, xs, cs)
        b = f(xs, cs)
        worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))))
    for n in range(5):
        a = wick.hermite_shift(n, 0.7, -1.3, 2.1)
        b = wick.hermite(n, 0.7 - 1.3, 2.1)
        worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    return "hermite-identities", worst < 1e-12, f"max rel err {worst:.2e}"


def check_roundtrip(seed: int):
    spec = DomainSpec(1.3, 3)
    rng = philox_stream(seed, 1)
    f = _random_field(spec, rng)
    back = from_real(to_real(f), spec)
    err = float(np.max(np.abs(back.z - f.z)))
    return "transform-roundtrip", err < 1e-12, f"max err {err:.2e}"


def check_cubic(seed: int):
    from scipy.signal import convolve2d

    spec = DomainSpec(1.0, 2)
    rng = philox_stream(seed, 2)
    f = _random_field(spec, rng)
    got = cubic_projected(f).z
    n = spec.N
    # independent oracle: triple linear convolution of the coefficient array
    conv = convolve2d(convolve2d(f.z, f.z, mode="full"), f.z, mode="full")
    centre = (conv.shape[0] - 1) // 2
    want = conv[centre - n : centre + n + 1, centre - n : centre + n + 1] / spec.L ** 2
    err = float(np.max(np.abs(got - want)) / max(1.0, float(np.max(np.abs(want)))))
    return "cubic-convolution", err < 1e-10, f"rel err {err:.2e}"


def check_decompositions(seed: int):
    spec = DomainSpec(1.0, 2)
    eps = 0.1
    rng = philox_stream(seed, 3)
    worst = 0.0
    for _ in range(10):
        f = _random_field(spec, rng)
        mean, fluct = decompose(f)
        z0 = mean * spec.L
        dec = potential.decompose_perp(z0, fluct, eps)
        # scale: the full field with z_perp = sqrt(eps) * fluct coefficients
        z_full = math.sqrt(eps) * fluct.z.copy()
        z_full[spec.N, spec.N] = z0
        v = potential.value(FieldCoeffs(spec, z_full), eps)
        err = abs(dec.total(eps) - v / eps) / max(1.0, abs(v / eps))
        worst = max(worst, err)

        plus = potential.decompose_plus(f, eps)
        z_full2 = math.sqrt(eps) * f.z.copy()
        z_full2[spec.N, spec.N] += spec.L
        v2 = potential.value(FieldCoeffs(spec, z_full2), eps)
        total2 = plus["q"] + plus["g_plus"] + plus["w_plus"]
        err2 = abs(total2 - v2 / eps) / max(1.0, abs(v2 / eps))
        worst = max(worst, err2)
    return "potential-decompositions", worst < 1e-9, f"max rel err {worst:.2e}"


def check_symmetry(seed: int):
    # the well-exchange symmetry of the potential is phi -> -phi
    spec = DomainSpec(1.0, 2)
    rng = philox_stream(seed, 4)
    worst = 0.0
    for _ in range(10):
        f = _random_field(spec, rng)
        v1 = potential.value(f, 0.07)
        v2 = potential.value(FieldCoeffs(spec, -f.z), 0.07)
        worst = max(worst, abs(v1 - v2) / max(1.0, abs(v1)))
    return "negation-symmetry", worst < 1e-12, f"max rel err {worst:.2e}"


def check_constants(seed: int):
    spec = DomainSpec(math.pi, 1)
    consts = renorm_constants(spec)
    expect = (1.0 / math.pi ** 2) * (1.0 + 4.0 / 3.0 + 4.0 / 7.0)
    ok1 = abs(consts.c_n - expect) < 1e-12
    ok2 = abs(consts.c_n - consts.c_n_perp - 1.0 / spec.L ** 2) < 1e-14
    var = covariance_sum_exact(DomainSpec(1.0, 0), 0.0, 2, 0)
    ok3 = abs(var - 2.0) < 1e-12
    return "renorm-constants", ok1 and ok2 and ok3, f"C_1 = {consts.c_n:.6f}"


def check_prefactor(seed: int):
    spec = DomainSpec(1.0, 0)
    res = ek_prefactor(spec, cutoff=0)
    want = 2.0 * math.pi * math.sqrt(math.exp(3.0) / 2.0)
    ok1 = abs(res.prefactor - want) < 1e-10
    d2 = det2_diagonal(spec, 8)
    ok2 = abs(d2.det2 * math.exp(d2.trace) - d2.raw_product) < 1e-9 * d2.raw_product
    return "prefactor-det2", ok1 and ok2, f"K=0 value {res.prefactor:.4f}"


def check_sampler(seed: int):
    spec = DomainSpec(1.0, 3)
    m = gamma_perp0(spec)
    z = sample_batch(m, 256, philox_stream(seed, 5))
    defect = float(np.max(np.abs(z - np.conj(z[:, ::-1, ::-1]))))
    centre = float(np.max(np.abs(z[:, spec.N, spec.N])))
    return "sampler-reality", defect < 1e-14 and centre == 0.0, f"defect {defect:.1e}"


CHECKS = [
    check_hermite,
    check_roundtrip,
    check_cubic,
    check_decompositions,
    check_symmetry,
    check_constants,
    check_prefactor,
    check_sampler,
]


def run_all(seed: int = 1) -> dict:
    results = []
    failures = []
    for check in CHECKS:
        name, ok, detail = check(seed)
        results.append({"name": name, "passed": bool(ok), "detail": detail})
        if not ok:
            failures.append(name)
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return {"checks": results, "all_passed": not failures, "failures": failures}
