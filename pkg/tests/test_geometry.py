import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tracecone.algebra import norm2, positivize, spectral_map, uniform_norm
from tracecone.errors import BudgetExceeded, NotInvertible
from tracecone.fuzz import convexity_violation
from tracecone.geometry import (
    Band,
    GeodesicSegment,
    congruence,
    distance,
    geodesic,
    geodesic_eval,
    hull_expand,
    in_band,
    linear_distance,
    midpoint,
    nearest_distance,
)
from tracecone.sampling import random_invertible, random_positive, random_unitary

from conftest import ALGEBRAS

E2 = math.exp(2.0)


def close(x, y, tol=1e-12):
    return uniform_norm(x - y) <= tol * (1 + uniform_norm(y))


class TestGeodesic:
    def test_from_identity_is_power(self, m2, rng):
        b = random_positive(m2, rng)
        assert close(geodesic(m2.identity(), b, 0.7), spectral_map(b, "power", 0.7), 1e-10)

    def test_diagonal_half(self, m2):
        assert close(geodesic(m2.identity(), m2.diag([4.0, 0.25]), 0.5), m2.diag([2.0, 0.5]))

    def test_scalar(self, scalars):
        x = geodesic(scalars.identity(), scalars.diag([E2]), 0.3)
        assert x.blocks[0][0, 0].real == pytest.approx(math.exp(0.6), rel=1e-13)

    def test_endpoints(self, alg, rng):
        for _ in range(20):
            a, b = random_positive(alg, rng), random_positive(alg, rng)
            seg = GeodesicSegment(a, b)
            assert close(geodesic_eval(seg, 0.0), a, 1e-9)
            assert close(geodesic_eval(seg, 1.0), b, 1e-9)
            assert close(seg(0.4), GeodesicSegment(b, a)(0.6), 1e-9)


class TestDistance:
    def test_examples(self, m2, scalars):
        a = m2.diag([3.0, 0.2])
        assert distance(a, a) == pytest.approx(0.0, abs=1e-14)
        assert distance(scalars.identity(), scalars.diag([E2])) == pytest.approx(2.0, rel=1e-14)
        assert distance(m2.identity(), m2.diag([E2, 1 / E2])) == pytest.approx(2.0, rel=1e-14)

    def test_matches_log_oracle(self, alg, rng):
        # oracle: norm2 of the matrix log of the whitened point, via scipy
        from scipy.linalg import logm, sqrtm

        for _ in range(10):
            a, b = random_positive(alg, rng, 0.1, 10), random_positive(alg, rng, 0.1, 10)
            blocks = []
            for ab, bb in zip(a.blocks, b.blocks):
                r = np.linalg.inv(sqrtm(ab))
                blocks.append(logm(r @ bb @ r))
            assert distance(a, b) == pytest.approx(norm2(alg.element(blocks)), rel=1e-8)

    def test_metric_axioms(self, alg, rng):
        for _ in range(30):
            a, b, c = (random_positive(alg, rng) for _ in range(3))
            assert distance(a, b) == pytest.approx(distance(b, a), abs=1e-8)
            assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-8

    def test_semi_parallelogram(self, alg, rng):
        for _ in range(20):
            x, y, w = (random_positive(alg, rng) for _ in range(3))
            z = midpoint(x, y)
            lhs = distance(x, y) ** 2 + 4 * distance(w, z) ** 2
            assert lhs <= 2 * (distance(w, x) ** 2 + distance(w, y) ** 2) + 1e-8

    def test_convexity_along_geodesics(self, alg, rng):
        for _ in range(10):
            pts = [random_positive(alg, rng) for _ in range(4)]
            assert convexity_violation(*pts) <= 1e-8


class TestMidpoint:
    def test_examples(self, m2, scalars, rng):
        a = random_positive(m2, rng)
        assert close(midpoint(a, a), a, 1e-10)
        assert close(midpoint(m2.identity(), m2.diag([4.0, 0.25])), m2.diag([2.0, 0.5]))
        assert midpoint(scalars.identity(), scalars.diag([4.0])).blocks[0][0, 0].real == pytest.approx(2.0)

    def test_halves_distance(self, alg, rng):
        a, b = random_positive(alg, rng), random_positive(alg, rng)
        z, d = midpoint(a, b), distance(a, b)
        assert distance(a, z) == pytest.approx(d / 2, abs=1e-9)
        assert distance(z, b) == pytest.approx(d / 2, abs=1e-9)


class TestCongruence:
    def test_examples(self, m2, rng):
        a = random_positive(m2, rng)
        assert close(congruence(m2.identity(), a), a)
        assert close(congruence(m2.diag([2.0, 1.0]), m2.identity()), m2.diag([4.0, 1.0]))
        assert close(congruence(random_unitary(m2, rng), m2.identity()), m2.identity(), 1e-12)

    def test_singular(self, m2):
        with pytest.raises(NotInvertible):
            congruence(m2.diag([1.0, 0.0]), m2.identity())

    def test_isometry_and_equivariance(self, alg, rng):
        for _ in range(20):
            g = random_invertible(alg, rng, 1e3)
            a, b = random_positive(alg, rng), random_positive(alg, rng)
            d = distance(a, b)
            assert abs(distance(congruence(g, a), congruence(g, b)) - d) <= 1e-8 * (1 + d)
            ga, gb = congruence(g, a), congruence(g, b)
            for t in (0.25, 0.5, 0.75):
                lhs, rhs = congruence(g, geodesic(a, b, t)), geodesic(ga, gb, t)
                assert norm2(lhs - rhs) <= 1e-8 * norm2(rhs)


class TestBand:
    def test_examples(self, m2):
        band = Band(0.5, 2.0)
        assert in_band(m2.identity(), band)
        assert not in_band(m2.diag([4.0, 0.25]), band)
        assert in_band(m2.diag([2.0, 0.5]), band)
        assert m2.diag([2.0, 0.5]) in band

    def test_invalid(self):
        with pytest.raises(ValueError):
            Band(2.0, 1.0)
        with pytest.raises(ValueError):
            Band(0.0, 1.0)

    def test_degenerate_band_is_identity_only(self, m2):
        assert in_band(m2.identity(), Band(1.0, 1.0))
        assert not in_band(m2.diag([1.01, 1.0]), Band(1.0, 1.0))

    def test_diameter(self, alg, rng):
        band = Band(0.25, 4.0)
        for _ in range(50):
            a, b = random_positive(alg, rng, 0.25, 4.0), random_positive(alg, rng, 0.25, 4.0)
            d = distance(a, b)
            assert d <= band.diameter_bound + 1e-8
            assert np.isfinite(linear_distance(a, b) / d)

    def test_geodesically_convex(self, alg, rng):
        band = Band(0.25, 4.0)
        for _ in range(20):
            a, b = random_positive(alg, rng, 0.25, 4.0), random_positive(alg, rng, 0.25, 4.0)
            assert all(in_band(geodesic(a, b, t), band) for t in np.linspace(0, 1, 7))


class TestHull:
    def test_single_point(self, m2, rng):
        a = random_positive(m2, rng)
        hull = hull_expand([a], depth=4)
        assert all(len(gen) == 1 for gen in hull.generations)

    def test_midpoint_in_second_generation(self, m2):
        hull = hull_expand([m2.identity(), m2.diag([4.0, 0.25])], depth=2, samples_per_pair=3)
        assert nearest_distance(positivize(m2.diag([2.0, 0.5])), hull.generations[1]) <= 1e-12
        assert len(hull.points) == 3

    def test_stays_in_band(self, rng):
        alg = ALGEBRAS["M2+M3"]
        band = Band(0.5, 3.0)
        pts = [random_positive(alg, rng, 0.5, 3.0) for _ in range(4)]
        hull = hull_expand(pts, depth=3, max_points=400, seed=5)
        assert all(in_band(p, band) for gen in hull.generations for p in gen)
        assert any(hull.subsampled)
        assert all(len(gen) <= 400 for gen in hull.generations)

    def test_generations_nested(self, m2, rng):
        pts = [random_positive(m2, rng) for _ in range(3)]
        hull = hull_expand(pts, depth=3, samples_per_pair=3)
        for earlier, later in zip(hull.generations, hull.generations[1:]):
            assert all(nearest_distance(p, later) <= 1e-9 for p in earlier)

    def test_deterministic(self, m2, rng):
        pts = [random_positive(m2, rng) for _ in range(5)]
        h1 = hull_expand(pts, depth=3, max_points=100, seed=3)
        h2 = hull_expand(pts, depth=3, max_points=100, seed=3)
        assert all(np.array_equal(p.blocks[0], q.blocks[0]) for p, q in zip(h1.points, h2.points))

    def test_budget(self, m2, rng):
        pts = [random_positive(m2, rng) for _ in range(5)]
        with pytest.raises(BudgetExceeded):
            hull_expand(pts, depth=3, max_points=50, subsample=False)

    def test_closure_proxy(self, m2, rng):
        # midpoints of slightly perturbed hull points stay next to the next generation
        pts = [random_positive(m2, rng, 0.25, 4.0) for _ in range(3)]
        hull = hull_expand(pts, depth=3, samples_per_pair=3)
        x, y = hull.generations[1][0], hull.generations[1][-1]
        noise = 1e-7 * m2.diag([1.0, -1.0])
        proxy = midpoint(positivize(x + noise), positivize(y - noise))
        assert nearest_distance(proxy, hull.generations[2]) <= 1e-5


@settings(max_examples=50, deadline=None)
@given(
    name=st.sampled_from(sorted(ALGEBRAS)),
    seed=st.integers(0, 2**32 - 1),
    s=st.floats(0.0, 1.0),
    t=st.floats(0.0, 1.0),
)
def test_geodesic_is_constant_speed(name, seed, s, t):
    alg = ALGEBRAS[name]
    rng = np.random.default_rng(seed)
    a, b = random_positive(alg, rng), random_positive(alg, rng)
    d = distance(a, b)
    assert distance(geodesic(a, b, s), geodesic(a, b, t)) == pytest.approx(abs(s - t) * d, abs=1e-8 * (1 + d))
