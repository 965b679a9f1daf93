import numpy as np
import pytest

from tracecone.algebra import AlgebraElement, positivize, uniform_norm
from tracecone.errors import NotInvertible, OrderExceeded
from tracecone.geometry import distance
from tracecone.synth import (
    cyclic,
    dihedral,
    full_octahedral,
    groups_of_order,
    octahedral,
    quaternion,
    symmetric,
    synthesize,
    tetrahedral,
)
from tracecone.unitarization import (
    certificate_checks,
    close_group,
    orbit_of_identity,
    unitarize,
    unitarize_group,
    verify_certificate,
)

H = [[0.0, -2.0], [0.5, 0.0]]


@pytest.fixture
def hand(m2):
    return m2.element([H])


def same(x, y, tol=1e-12):
    return uniform_norm(x - y) <= tol


class TestCloseGroup:
    def test_empty_is_trivial(self, m2):
        table = close_group([], algebra=m2)
        assert table.order == 1 and table.uniform_bound == 1.0 and table.closed

    def test_hand_generator(self, m2, hand):
        table = close_group([hand])
        assert table.order == 4
        assert table.uniform_bound == pytest.approx(2.0)
        one = m2.identity()
        for x in (one, -1.0 * one, hand, -1.0 * hand):
            assert table.index_of(x) >= 0

    def test_unbounded(self, m2):
        with pytest.raises(OrderExceeded) as info:
            close_group([m2.diag([2.0, 0.5])])
        assert info.value.norm_growth
        assert "norm growth detected" in str(info.value)

    def test_order_cap(self, m2, hand):
        with pytest.raises(OrderExceeded) as info:
            close_group([hand], max_order=3)
        assert not info.value.norm_growth
        assert not info.value.table.closed

    def test_singular(self, m2):
        with pytest.raises(NotInvertible):
            close_group([m2.diag([1.0, 0.0])])

    @pytest.mark.parametrize(
        "model",
        [cyclic(7), dihedral(5), symmetric(3), symmetric(4), quaternion(), tetrahedral(), octahedral(),
         full_octahedral()],
        ids=lambda m: m.name,
    )
    def test_catalog_orders(self, model):
        from tracecone.algebra import BlockAlgebra

        alg = BlockAlgebra.matrices(model.dim)
        table = close_group([alg.element([g]) for g in model.generators])
        assert table.order == model.order

    def test_table_invariants(self, rng):
        inst, _ = synthesize([3], "dihedral-4", cond=3.0, seed=11)
        table = close_group(inst.generators)
        M = table.uniform_bound
        assert M == pytest.approx(max(uniform_norm(h) for h in table.elements), rel=1e-12)
        assert all(table.index_of(h.inv()) >= 0 for h in table.elements)
        assert all(uniform_norm(h.inv()) <= M * (1 + 1e-9) for h in table.elements)
        for h in table.elements[:4]:
            for k in table.elements[:4]:
                assert table.index_of(h @ k) >= 0

    def test_groups_of_order_catalog(self):
        assert any(g.name == "quaternion" for g in groups_of_order(8, 2))
        assert all(g.order == 12 for g in groups_of_order(12, 3))
        small = groups_of_order(48, 2)
        assert small and all(g.dim <= 2 and g.order == 48 for g in small)


class TestOrbit:
    def test_trivial(self, m2):
        orbit = orbit_of_identity(close_group([], algebra=m2))
        assert len(orbit) == 1 and same(orbit[0], m2.identity())

    def test_hand(self, m2, hand):
        orbit = orbit_of_identity(close_group([hand]))
        assert len(orbit) == 2
        assert same(orbit[0], m2.identity())
        assert same(orbit[1], m2.diag([4.0, 0.25]))

    def test_unitary_group(self, m2):
        table = close_group([m2.element([dihedral(6).generators[0]]), m2.element([dihedral(6).generators[1]])])
        orbit = orbit_of_identity(table)
        assert len(orbit) == 1

    def test_partial_refused(self, hand):
        with pytest.raises(OrderExceeded) as info:
            close_group([hand], max_order=3)
        with pytest.raises(ValueError):
            orbit_of_identity(info.value.table)
        assert len(orbit_of_identity(info.value.table, allow_partial=True)) >= 1


class TestUnitarize:
    def test_unitary_generators(self, m2):
        inst, _ = synthesize([2], "cyclic-4", cond=1.0, seed=0)
        cert = unitarize(inst.generators)
        assert same(cert.center, m2.identity(), 1e-12)
        assert same(cert.unitarizer, m2.identity(), 1e-12)
        assert cert.residual_unitarity <= 1e-12

    def test_hand(self, m2, hand):
        cert = unitarize([hand])
        r = 2 ** -0.5
        assert distance(cert.center, m2.diag([2.0, 0.5])) <= 1e-8
        assert same(cert.unitarizer, m2.diag([r, 1 / r]), 1e-9)
        assert np.allclose(cert.conjugate(hand).blocks[0], [[0, -1], [1, 0]], atol=1e-8)
        assert cert.residual_unitarity <= 1e-9
        assert cert.band.c1 == pytest.approx(0.5) and cert.band.c2 == pytest.approx(2.0)
        # the hand check h a h* = a
        a = m2.diag([2.0, 0.5])
        assert same(hand @ a @ hand.H, a, 1e-15)

    @pytest.mark.parametrize("group", ["cyclic-6", "dihedral-5", "perm-3", "random-unitary-order-24"])
    @pytest.mark.parametrize("method", ["circumcenter", "karcher"])
    def test_synthesized(self, group, method):
        inst, hidden = synthesize([3, 2], group, cond=10 ** 0.5, seed=3, weights=[0.7, 0.3])
        table = close_group(inst.generators)
        assert table.order == hidden["order"]
        cert = unitarize_group(table, method=method)
        assert cert.converged
        assert cert.residual_unitarity <= 1e-7
        assert cert.residual_fixed_point <= 1e-7
        assert cert.orbit_band_ok and cert.unitarizer_band_ok
        assert verify_certificate(cert, table, 1e-7)

    def test_morphism(self):
        inst, _ = synthesize([3], "perm-3", cond=3.0, seed=5)
        table = close_group(inst.generators)
        cert = unitarize_group(table)
        for h in table.elements:
            for k in table.elements:
                lhs = cert.conjugate(h) @ cert.conjugate(k)
                assert uniform_norm(lhs - cert.conjugate(h @ k)) <= 1e-9 * (1 + uniform_norm(lhs))

    def test_idempotent(self):
        inst, _ = synthesize([2, 2], "dihedral-3", cond=3.0, seed=2)
        cert = unitarize(inst.generators)
        again = unitarize([cert.conjugate(g) for g in inst.generators])
        s = again.unitarizer
        assert distance(positivize(s @ s.H), s.algebra.identity()) <= 1e-8

    def test_unbounded_raises(self, m2):
        with pytest.raises(OrderExceeded):
            unitarize([m2.diag([2.0, 0.5])], allow_partial=True)

    def test_unknown_method(self, hand):
        with pytest.raises(ValueError):
            unitarize([hand], method="newton")


class TestVerify:
    def test_trivial(self, m2):
        table = close_group([], algebra=m2)
        assert verify_certificate(unitarize_group(table), table, 1e-10)

    def test_hand(self, hand):
        table = close_group([hand])
        assert verify_certificate(unitarize_group(table), table, 1e-8)

    def test_identity_unitarizer_rejected(self, m2, hand):
        table = close_group([hand])
        cert = unitarize_group(table)
        cert.unitarizer = positivize(m2.identity())
        cert.center = positivize(m2.identity())
        checks = {c["name"]: c for c in certificate_checks(cert, table, 1e-8)}
        assert not verify_certificate(cert, table, 1e-8)
        # the residual is max ||h h* - 1|| = 4 - 1
        assert checks["residual_unitarity"]["measured"] == pytest.approx(3.0)

    def test_inconsistent_pair_rejected(self, m2, hand):
        table = close_group([hand])
        cert = unitarize_group(table)
        cert.center = positivize(m2.identity())
        assert not verify_certificate(cert, table, 1e-8)

    def test_garbage_rejected(self, m2, hand):
        table = close_group([hand])
        cert = unitarize_group(table)
        cert.unitarizer = AlgebraElement(m2, [np.zeros((2, 2))])
        assert not verify_certificate(cert, table, 1e-8)
