import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tracecone.algebra import (
    AlgebraElement,
    BlockAlgebra,
    hermitian_eig,
    norm2,
    positivize,
    spectral_map,
    trace,
    uniform_norm,
)
from tracecone.errors import IllConditioned, MalformedElement, NotHermitian, NotPositive
from tracecone.sampling import random_hermitian, random_positive

from conftest import ALGEBRAS


class TestBlockAlgebra:
    def test_rejects_unnormalized_trace(self):
        with pytest.raises(ValueError, match="trace not normalized"):
            BlockAlgebra((2, 2), (0.5, 0.4))

    def test_rejects_zero_weight(self):
        with pytest.raises(ValueError):
            BlockAlgebra((2, 2), (1.0, 0.0))

    def test_rejects_empty_block(self):
        with pytest.raises(ValueError):
            BlockAlgebra((0,), (1.0,))

    def test_from_dims_equal_weights(self):
        alg = BlockAlgebra.from_dims((1, 2, 3))
        assert np.allclose(alg.trace_weights, 1 / 3)
        assert alg.real_dim == 1 + 4 + 9

    def test_block_shape_mismatch(self, m2):
        with pytest.raises(MalformedElement):
            AlgebraElement(m2, [np.eye(3)])


class TestTrace:
    def test_identity(self, alg):
        assert trace(alg.identity()) == pytest.approx(1.0, abs=1e-15)

    def test_weighted_scalars(self):
        alg = BlockAlgebra((1, 1), (0.5, 0.5))
        assert trace(alg.diag([3.0], [5.0])) == pytest.approx(4.0)

    def test_diagonal(self, m2):
        assert trace(m2.diag([2.0, 0.5])).real == pytest.approx(1.25)

    def test_trace_property(self, alg, rng):
        for _ in range(100):
            x = alg.element([b + 1j * rng.standard_normal(b.shape) for b in random_hermitian(alg, rng).blocks])
            y = random_hermitian(alg, rng)
            scale = norm2(x) * norm2(y)
            assert abs(trace(x @ y) - trace(y @ x)) <= 1e-10 * (1 + scale)


class TestNorms:
    def test_norm2_examples(self, m2):
        assert norm2(m2.zeros()) == 0.0
        assert norm2(m2.identity()) == pytest.approx(1.0)
        assert norm2(m2.diag([2.0, -2.0])) == pytest.approx(2.0)

    def test_uniform_examples(self, m2):
        assert uniform_norm(m2.identity()) == pytest.approx(1.0)
        assert uniform_norm(m2.diag([3.0, -5.0])) == pytest.approx(5.0)
        assert uniform_norm(m2.element([[[0, -2], [0.5, 0]]])) == pytest.approx(2.0)

    def test_norm_ordering(self, alg, rng):
        for _ in range(50):
            x = random_hermitian(alg, rng, scale=3.0)
            assert norm2(x) <= uniform_norm(x) + 1e-12

    def test_faithfulness(self, alg, rng):
        # each block contributes at least lambda_i/n_i * ||x_i||^2 to norm2^2
        floor = min(alg.block_scales)
        for _ in range(50):
            x = random_hermitian(alg, rng)
            assert norm2(x) ** 2 >= floor * uniform_norm(x) ** 2 - 1e-12


class TestSpectral:
    def test_eig_examples(self, m2):
        assert np.allclose(hermitian_eig(m2.identity())[0][0], 1.0)
        vals, vecs = hermitian_eig(m2.diag([1.0, 4.0]))[0]
        assert np.allclose(vals, [1.0, 4.0])
        assert np.allclose(np.abs(vecs), np.eye(2))
        vals, _ = hermitian_eig(m2.element([[[0, 1], [1, 0]]]))[0]
        assert np.allclose(vals, [-1.0, 1.0])

    def test_eig_rejects_non_hermitian(self, m2):
        with pytest.raises(NotHermitian):
            hermitian_eig(m2.element([[[0, 1], [0, 0]]]))

    def test_map_identity(self, m2):
        one = m2.identity()
        for f, t in (("power", 0.37), ("sqrt", None)):
            assert np.allclose(spectral_map(one, f, t).blocks[0], np.eye(2))

    def test_sqrt_and_log(self, m2):
        a = m2.diag([4.0, 0.25])
        assert np.allclose(spectral_map(a, "sqrt").blocks[0], np.diag([2.0, 0.5]))
        lg = spectral_map(a, "log")
        assert np.allclose(lg.blocks[0], np.diag([math.log(4), -math.log(4)]))
        assert norm2(lg) == pytest.approx(math.log(4))

    def test_ill_conditioned(self, m2):
        with pytest.raises(IllConditioned):
            spectral_map(m2.diag([1e7, 1e-7]), "log")

    def test_round_trips(self, alg, rng):
        for _ in range(30):
            a = random_positive(alg, rng, 1e-3, 1e3)
            scale = 1 + uniform_norm(a)
            back = spectral_map(spectral_map(a, "log"), "exp")
            assert uniform_norm(back - a) <= 1e-9 * scale
            r = spectral_map(a, "sqrt")
            assert uniform_norm(r @ r - a) <= 1e-9 * scale

    def test_power_composition(self, alg, rng):
        for s, t in ((0.3, 0.9), (-1.2, 0.5), (2.0, -0.25)):
            a = random_positive(alg, rng, 0.1, 10)
            lhs = spectral_map(a, "power", s + t)
            rhs = spectral_map(a, "power", s) @ spectral_map(a, "power", t)
            assert uniform_norm(lhs - rhs) <= 1e-9 * (1 + uniform_norm(lhs))

    def test_sqrt_operator_monotone(self, alg, rng):
        for _ in range(30):
            a = random_positive(alg, rng, 0.1, 10)
            p = alg.element([rng.standard_normal(b.shape) + 1j * rng.standard_normal(b.shape) for b in a.blocks])
            b = a + p.H @ p + 1e-3 * alg.identity()
            gap = spectral_map(b, "sqrt") - spectral_map(a, "sqrt")
            assert min(v.min() for v, _ in hermitian_eig(gap)) >= -1e-9


class TestPositivize:
    def test_identity(self, m2):
        p = positivize(m2.identity())
        assert p.min_eig == p.max_eig == pytest.approx(1.0)

    def test_diagonal(self, m2):
        p = positivize(m2.diag([4.0, 0.25]))
        assert (p.min_eig, p.max_eig) == pytest.approx((0.25, 4.0))

    def test_singular(self, m2):
        with pytest.raises(NotPositive):
            positivize(m2.diag([1.0, 0.0]))

    def test_symmetrizes_within_tolerance(self, m2):
        x = m2.element([[[2.0, 1e-13], [0.0, 1.0]]])
        p = positivize(x)
        assert np.allclose(p.blocks[0], p.blocks[0].conj().T, atol=0)


@settings(max_examples=60, deadline=None)
@given(
    name=st.sampled_from(sorted(ALGEBRAS)),
    seed=st.integers(0, 2**32 - 1),
    t=st.floats(-2.0, 2.0),
)
def test_power_is_exp_of_scaled_log(name, seed, t):
    alg = ALGEBRAS[name]
    a = random_positive(alg, np.random.default_rng(seed), 1e-2, 1e2)
    lhs = spectral_map(a, "power", t)
    rhs = spectral_map(t * spectral_map(a, "log"), "exp")
    assert uniform_norm(lhs - rhs) <= 1e-9 * (1 + uniform_norm(lhs))


@settings(max_examples=60, deadline=None)
@given(
    entries=st.lists(st.floats(1e-3, 1e3), min_size=2, max_size=2),
    weight=st.floats(0.05, 0.95),
)
def test_trace_of_diagonal_is_weighted_average(entries, weight):
    alg = BlockAlgebra((1, 1), (weight, 1 - weight))
    x = alg.diag([entries[0]], [entries[1]])
    assert trace(x).real == pytest.approx(weight * entries[0] + (1 - weight) * entries[1], rel=1e-12)
