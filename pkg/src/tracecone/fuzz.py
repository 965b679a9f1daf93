"""Seeded property suites for the cone geometry and the unitarization pipeline.

Every suite runs ``trials`` independent trials; trial ``i`` draws from
``numpy.random.default_rng(seed + i)``, so results do not depend on how
trials are scheduled.  Each property is reported once with the worst value
measured over all trials.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .algebra import (
    BlockAlgebra,
    norm2,
    positivize,
    spectral_map,
    trace,
    uniform_norm,
)
from .circumcenter import circumcenter, max_radius
from .geometry import (
    Band,
    GeodesicSegment,
    congruence,
    distance,
    geodesic_eval,
    hull_expand,
    in_band,
    linear_distance,
    midpoint,
    nearest_distance,
)
from .sampling import random_hermitian, random_invertible, random_positive
from .synth import synthesize
from .unitarization import close_group, unitarize_group, verify_certificate

SUITES = ("metric", "band", "hull", "circumcenter", "unitarize")

ALGEBRAS = (
    BlockAlgebra.matrices(2),
    BlockAlgebra.matrices(4),
    BlockAlgebra((2, 3), (0.4, 0.6)),
)


@dataclass
class CheckRecord:
    name: str
    status: str
    measured: float
    tolerance: float | None

    def to_dict(self):
        return asdict(self)


def thread_count() -> int:
    """Worker count from ``TRACECONE_THREADS`` (0 or unset: one per CPU)."""
    raw = os.environ.get("TRACECONE_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def _rel(x, y) -> float:
    return norm2(x - y) / (1.0 + norm2(y))


# Each trial returns {property: (measured, tolerance)}; measured <= tolerance passes.
# A tolerance of None marks an informational measurement.


def metric_trial(rng, alg) -> dict:
    out = {}
    x, y = random_hermitian(alg, rng), random_hermitian(alg, rng)
    out["trace_property"] = (abs(trace(x @ y) - trace(y @ x)) / (1 + norm2(x) * norm2(y)), 1e-10)
    out["norm_ordering"] = (norm2(x) - uniform_norm(x), 1e-12)

    a = random_positive(alg, rng, 1e-3, 1e3)
    scale = 1.0 + uniform_norm(a)
    rt_exp = uniform_norm(spectral_map(spectral_map(a, "log"), "exp") - a) / scale
    sq = spectral_map(a, "sqrt")
    rt_sqrt = uniform_norm(sq @ sq - a) / scale
    out["spectral_roundtrip"] = (max(rt_exp, rt_sqrt), 1e-9)
    s, t = rng.uniform(-1, 1, size=2)
    comp = spectral_map(a, "power", s) @ spectral_map(a, "power", t)
    whole = spectral_map(a, "power", s + t)
    out["power_composition"] = (uniform_norm(comp - whole) / (1 + uniform_norm(whole)), 1e-9)

    a = random_positive(alg, rng, 1e-1, 1e1)
    p = random_hermitian(alg, rng, 0.5)
    b = positivize(a + p @ p.H + 1e-3 * alg.identity())
    diff = spectral_map(b, "sqrt") - spectral_map(a, "sqrt")
    low = min(np.linalg.eigvalsh(0.5 * (d + d.conj().T))[0] for d in diff.blocks)
    out["operator_monotone_sqrt"] = (-low, 1e-9)

    a, b, c = (random_positive(alg, rng, 1e-2, 1e2) for _ in range(3))
    seg = GeodesicSegment(a, b)
    # geodesic_eval short-cuts t = 0 and 1, so evaluate the closed form directly.
    blocks0 = [r @ ((u * lam ** 0.0) @ u.conj().T) @ r for r, (lam, u) in zip(seg.a_sqrt, seg.w_eig)]
    blocks1 = [r @ ((u * lam) @ u.conj().T) @ r for r, (lam, u) in zip(seg.a_sqrt, seg.w_eig)]
    out["endpoints"] = (
        max(_rel(alg.element(blocks0), a), _rel(alg.element(blocks1), b)),
        1e-9,
    )
    t = float(rng.uniform())
    out["inversion_symmetry"] = (_rel(seg(t), geodesic_eval(GeodesicSegment(b, a), 1 - t)), 1e-9)

    dab, dba = distance(a, b), distance(b, a)
    out["symmetry"] = (abs(dab - dba), 1e-8)
    out["triangle"] = (distance(a, c) - dab - distance(b, c), 1e-8)

    z = midpoint(a, b)
    out["midpoint_halves"] = (max(abs(distance(a, z) - dab / 2), abs(distance(z, b) - dab / 2)), 1e-8)
    worst = -np.inf
    for _ in range(20):
        w = random_positive(alg, rng, 1e-2, 1e2)
        lhs = dab ** 2 + 4 * distance(w, z) ** 2
        rhs = 2 * (distance(w, a) ** 2 + distance(w, b) ** 2)
        worst = max(worst, lhs - rhs)
    out["semi_parallelogram"] = (worst, 1e-8)

    a2, b2 = random_positive(alg, rng, 1e-2, 1e2), random_positive(alg, rng, 1e-2, 1e2)
    out["distance_convexity"] = (convexity_violation(a, b, a2, b2), 1e-8)

    g = random_invertible(alg, rng, 1e3)
    ga, gb = congruence(g, a), congruence(g, b)
    out["isometry"] = (abs(distance(ga, gb) - dab) / (1 + dab), 1e-8)
    gseg = GeodesicSegment(ga, gb)
    eq = 0.0
    for t in (0.25, 0.5, 0.75):
        lhs = congruence(g, seg(t))
        rhs = gseg(t)
        eq = max(eq, norm2(lhs - rhs) / norm2(rhs))
    out["equivariance"] = (eq, 1e-8)
    return out


def convexity_violation(a1, b1, a2, b2, points: int = 11) -> float:
    """Worst midpoint-convexity violation of ``t -> d(gamma_1(t), gamma_2(t))`` on a grid."""
    s1, s2 = GeodesicSegment(a1, b1), GeodesicSegment(a2, b2)
    ts = np.linspace(0.0, 1.0, points)
    d = [distance(s1(float(t)), s2(float(t))) for t in ts]
    return max(d[i] - 0.5 * (d[i - 1] + d[i + 1]) for i in range(1, points - 1))


def band_trial(rng, alg, band=Band(0.25, 4.0), pairs=5) -> dict:
    worst_bound = -np.inf
    worst_convex = 0
    up = down = 0.0
    for _ in range(pairs):
        a, b = random_positive(alg, rng, band.c1, band.c2), random_positive(alg, rng, band.c1, band.c2)
        d = distance(a, b)
        lin = linear_distance(a, b)
        worst_bound = max(worst_bound, d - band.diameter_bound)
        if d > 0:
            up = max(up, lin / d)
            down = max(down, d / lin)
        seg = GeodesicSegment(a, b)
        worst_convex += sum(not in_band(seg(float(t)), band) for t in np.linspace(0, 1, 7))
    return {
        "band_d2_bound": (worst_bound, 1e-8),
        "band_geodesic_convexity": (float(worst_convex), 0.0),
        "norm_equivalence_linear_over_d2": (up, None),
        "norm_equivalence_d2_over_linear": (down, None),
    }


def hull_trial(rng, alg=None, band=Band(0.25, 4.0)) -> dict:
    alg = alg or BlockAlgebra.matrices(2)
    pts = [random_positive(alg, rng, band.c1, band.c2) for _ in range(3)]
    hull = hull_expand(pts, depth=3, samples_per_pair=3, max_points=60, seed=int(rng.integers(2**31)))
    outside = sum(not in_band(p, band) for gen in hull.generations for p in gen)
    monotone = all(
        nearest_distance(p, later) <= 1e-9
        for earlier, later in zip(hull.generations, hull.generations[1:])
        for p in earlier
    )
    # Closure: midpoints of nearby proxies of two hull points land next to the hull.
    x, y = hull.generations[1][0], hull.generations[1][-1]
    eps = 1e-7
    xp = positivize(x + eps * random_hermitian(alg, rng))
    yp = positivize(y + eps * random_hermitian(alg, rng))
    proxy = nearest_distance(midpoint(xp, yp), hull.generations[2])
    return {
        "hull_in_band": (float(outside), 0.0),
        "hull_monotone": (0.0 if monotone else 1.0, 0.0),
        "hull_closure_proxy": (proxy, 1e-5),
    }


def circumcenter_trial(rng, alg, tol=1e-8) -> dict:
    out = {}
    x, y = random_positive(alg, rng), random_positive(alg, rng)
    ball = circumcenter([x, y], tol=tol)
    d = distance(x, y)
    out["two_point_radius"] = (abs(ball.radius - d / 2), tol)
    out["two_point_center"] = (distance(ball.center, midpoint(x, y)), 10 * tol)

    n = int(rng.integers(3, 7))
    S = [random_positive(alg, rng, 0.1, 10) for _ in range(n)]
    ball = circumcenter(S, tol=tol)
    out["radius_is_max_distance"] = (abs(ball.radius - max_radius(ball.center, S)[0]), 1e-9)
    hist = np.asarray(ball.radius_history)
    out["history_monotone"] = (float(np.max(np.diff(hist), initial=0.0)), 1e-7)
    worst = -np.inf
    for _ in range(50):
        z = _perturb(ball.center, rng, 0.1)
        worst = max(worst, ball.radius - max_radius(z, S)[0])
    out["minimality"] = (worst, tol)
    g = random_invertible(alg, rng, 10)
    moved = circumcenter([congruence(g, p) for p in S], tol=tol)
    out["equivariance"] = (distance(moved.center, congruence(g, ball.center)), 10 * tol)
    out["converged"] = (0.0 if ball.converged else 1.0, 0.0)
    return out


def _perturb(center, rng, radius):
    """A point at ``d_2`` distance at most ``radius`` from ``center``."""
    alg = center.algebra
    v = random_hermitian(alg, rng)
    v = v * (radius * rng.uniform() / norm2(v))
    r = spectral_map(center, "sqrt")
    return positivize(r @ spectral_map(v, "exp") @ r)


def unitarize_trial(rng, tol=1e-8) -> dict:
    choice = int(rng.integers(4))
    group = [f"cyclic-{rng.integers(2, 13)}", f"dihedral-{rng.integers(2, 9)}", "perm-3",
             f"random-unitary-order-{rng.choice([4, 6, 8, 12, 24, 48])}"][choice]
    dims = [(3,), (4,), (2, 3), (3, 1)][int(rng.integers(4))]
    inst, hidden = synthesize(dims, group, cond=math.sqrt(10), seed=int(rng.integers(2**31)))
    table = close_group(inst.generators)
    out = {"group_order": (float(table.order != hidden["order"]), 0.0)}
    cert = unitarize_group(table, tol=tol)
    out["residual_unitarity"] = (cert.residual_unitarity, 10 * tol)
    out["residual_fixed_point"] = (cert.residual_fixed_point, 10 * tol)
    out["orbit_band"] = (0.0 if cert.orbit_band_ok else 1.0, 0.0)
    out["unitarizer_band"] = (0.0 if cert.unitarizer_band_ok else 1.0, 0.0)
    out["verify_certificate"] = (0.0 if verify_certificate(cert, table, 10 * tol) else 1.0, 0.0)

    s, s_inv = cert.unitarizer, cert.unitarizer.inv()
    h1 = table.elements[int(rng.integers(table.order))]
    h2 = table.elements[int(rng.integers(table.order))]
    lhs = (s @ h1 @ s_inv) @ (s @ h2 @ s_inv)
    rhs = s @ (h1 @ h2) @ s_inv
    out["morphism"] = (uniform_norm(lhs - rhs) / (1 + uniform_norm(rhs)), 1e-9)

    kcert = unitarize_group(table, tol=tol, method="karcher")
    out["karcher_verifies"] = (0.0 if verify_certificate(kcert, table, 1e-6) else 1.0, 0.0)
    sv = 0.0
    for h in table.elements:
        for c in (cert, kcert):
            u = c.conjugate(h)
            sv = max(sv, max(np.abs(np.linalg.svd(b, compute_uv=False) - 1).max() for b in u.blocks))
    out["unitarized_singular_values"] = (sv, 1e-6)

    again = close_group([cert.conjugate(g) for g in inst.generators])
    cert2 = unitarize_group(again, tol=tol)
    s2 = cert2.unitarizer
    out["idempotence"] = (distance(positivize(s2 @ s2.H), s2.algebra.identity()), 1e-8)
    return out


def _trial(suite: str, seed: int, index: int) -> dict:
    rng = np.random.default_rng(seed + index)
    alg = ALGEBRAS[index % len(ALGEBRAS)]
    if suite == "metric":
        return metric_trial(rng, alg)
    if suite == "band":
        return band_trial(rng, alg)
    if suite == "hull":
        return hull_trial(rng)
    if suite == "circumcenter":
        return circumcenter_trial(rng, alg)
    if suite == "unitarize":
        return unitarize_trial(rng)
    raise ValueError(f"unknown suite {suite!r}")


def run_suite(suite: str, trials: int, seed: int, threads: int | None = None) -> list[CheckRecord]:
    """Run one suite and aggregate the worst measurement per property."""
    threads = threads or thread_count()
    if threads > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda i: _trial(suite, seed, i), range(trials)))
    else:
        results = [_trial(suite, seed, i) for i in range(trials)]
    worst: dict[str, tuple[float, float | None]] = {}
    for res in results:
        for name, (value, tol) in res.items():
            prev = worst.get(name)
            if prev is None or value > prev[0] or (math.isnan(value) and not math.isnan(prev[0])):
                worst[name] = (float(value), tol)
    records = []
    for name, (value, tol) in worst.items():
        if tol is None:
            status = "PASS" if math.isfinite(value) else "FAIL"
        else:
            status = "PASS" if value <= tol else "FAIL"
        records.append(CheckRecord(f"{suite}.{name}", status, value, tol))
    return records


def run_fuzz(suite: str, trials: int, seed: int, threads: int | None = None) -> list[CheckRecord]:
    suites = SUITES if suite == "all" else (suite,)
    records = []
    for s in suites:
        records += run_suite(s, trials, seed, threads)
    return records
