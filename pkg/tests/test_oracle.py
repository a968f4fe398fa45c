import itertools
import random

import pytest

from coarseact.boxes import NEG_INF, GroundSpace, box_set, points_set
from coarseact.bornology import bornology_axiom_check
from coarseact.actions import (
    action_bornological_check,
    action_homomorphism_check,
    group_bornological_check,
    group_table_check,
)
from coarseact.coarse import MetricBall, OrbitPair, close_finite_base
from coarseact.oracle import (
    cross_check,
    existence_truncation_bound,
    naive_closure,
    oracle_entourage_member,
    oracle_neighborhood,
    oracle_transporter,
    random_instance,
)

from conftest import Z


class TestOracleTransporter:
    def test_shift_enumeration(self, shift):
        got, notes, _ = oracle_transporter(shift, box_set((0, 1)), box_set((5, 6)), 20, 30)
        assert got == [(4,), (5,), (6,)]
        assert notes == []

    def test_trivial_action_full_window(self, trivial):
        got, _, _ = oracle_transporter(trivial, points_set((0,)), points_set((0,)), 6, 6)
        assert got == [(n,) for n in range(-6, 7)]

    def test_hyperbola_quadrants_with_bound(self, hyperbola):
        q = box_set((NEG_INF, 0), (NEG_INF, 0))
        bound = existence_truncation_bound(hyperbola, q, q, 20)
        got, notes, _ = oracle_transporter(hyperbola, q, q, 20, max(64, bound))
        assert got == [(n,) for n in range(-20, 21)]
        assert notes == []

    def test_window_monotone(self, shift):
        small, _, _ = oracle_transporter(shift, box_set((0, 3)), box_set((2, 9)), 6, 20)
        large, _, _ = oracle_transporter(shift, box_set((0, 3)), box_set((2, 9)), 12, 20)
        assert set(small) <= set(large)
        assert set(small) == {l for l in large if abs(l[0]) <= 6}

    def test_advisory_when_uncertifiable(self, shift):
        got, notes, _ = oracle_transporter(
            shift, box_set((NEG_INF, 0)), box_set((5, 6)), 4, 2
        )
        assert notes  # window below the certified bound


class TestOracleMembership:
    def test_orbit_pair_explicit_search(self, hyperbola):
        e = OrbitPair(hyperbola, box_set((NEG_INF, 0), (NEG_INF, 0)))
        assert oracle_entourage_member(e, ((5, -5), (0, -10)), 20, 16) is True
        assert oracle_entourage_member(e, ((0, 0), (-3, 2)), 20, 16) is False

    def test_neighborhood_sweep(self, shift):
        e = MetricBall(Z, 2)
        got = oracle_neighborhood(e, points_set((0,)), 8, 8)
        assert got == {(v,) for v in range(-2, 3)}


class TestNaiveClosure:
    @pytest.mark.parametrize("size", [2, 3, 4])
    def test_matches_symbolic_closure(self, size):
        labels = tuple(range(size))
        space = GroundSpace.finite(labels)
        rng = random.Random(size * 11)
        pairs = list(itertools.product(labels, repeat=2))
        for _ in range(8):
            base = [
                frozenset(rng.sample(pairs, rng.randint(1, min(5, len(pairs)))))
                for _ in range(rng.randint(1, 3))
            ]
            _, naive_anti = naive_closure(space, base)
            symbolic = close_finite_base(space, base)
            assert tuple(symbolic.maximal) == naive_anti

    def test_family_materialized_small(self):
        space = GroundSpace.finite((0, 1))
        family, anti = naive_closure(space, [frozenset({(0, 1)})])
        # closure of a single off-diagonal pair over two points absorbs to full
        assert anti == (frozenset(itertools.product((0, 1), repeat=2)),)
        assert len(family) == 16


class TestRandomInstances:
    def test_deterministic(self):
        assert random_instance(0, "lattice-k1") == random_instance(0, "lattice-k1")
        assert random_instance(0, "finite") == random_instance(0, "finite")

    def test_seeds_pass_axiom_checks(self):
        for seed in range(1, 101):
            inst = random_instance(seed, "lattice-k1")
            assert bornology_axiom_check(inst.space_bornology).passed
            assert bornology_axiom_check(inst.group.bornology).passed

    def test_lattice_k2_valid(self):
        for seed in range(1, 21):
            inst = random_instance(seed, "lattice-k2")
            assert inst.group.rank == 2
            assert group_bornological_check(inst.group).passed
            assert action_bornological_check(inst).passed

    def test_finite_group_tables_verified(self):
        for seed in range(0, 20):
            inst = random_instance(seed, "finite")
            assert group_table_check(inst.group).passed
            assert action_homomorphism_check(inst).passed

    def test_unknown_profile(self):
        with pytest.raises(Exception):
            random_instance(0, "lattice-k9")


class TestCrossCheck:
    def test_flagships_pass(self, shift, hyperbola, trivial):
        reports = cross_check([shift, hyperbola, trivial], window=16)
        assert all(r.passed for r in reports)

    def test_deterministic_reports(self, shift):
        r1 = cross_check([shift], window=12)
        r2 = cross_check([shift], window=12)
        assert [(r.primitive, r.mismatches) for r in r1] == [
            (r.primitive, r.mismatches) for r in r2
        ]

    def test_fault_injection_difference_box(self, shift, monkeypatch):
        # off-by-one in the transporter difference set must be caught
        import coarseact.actions as actions_mod
        from coarseact.boxes import Box, difference_box as real

        def faulty(target, source):
            out = real(target, source)
            if out.empty or out.upper[0] == float("inf"):
                return out
            return Box(out.lower, tuple(u + 1 for u in out.upper))

        monkeypatch.setattr(actions_mod, "difference_box", faulty)
        reports = cross_check([shift], primitives=("transporter",), window=16)
        assert any(not r.passed for r in reports)

    def test_fault_injection_box_intersect(self, hyperbola, monkeypatch):
        import coarseact.coarse as coarse_mod
        from coarseact.boxes import box_intersect as real, Box

        def faulty(b1, b2):
            out = real(b1, b2)
            if out.empty:
                return out
            return Box(tuple(l - 1 for l in out.lower), out.upper)

        monkeypatch.setattr(coarse_mod, "box_intersect", faulty)
        reports = cross_check([hyperbola], primitives=("entourage",), window=16)
        assert any(not r.passed for r in reports)

    def test_fault_injection_self_difference(self, shift, monkeypatch):
        import coarseact.coarse as coarse_mod
        from coarseact.boxes import difference_box as real, Box

        def faulty(target, source):
            out = real(target, source)
            if out.empty or not out.is_bounded():
                return out
            return Box(out.lower, tuple(u + 2 for u in out.upper))

        monkeypatch.setattr(coarse_mod, "difference_box", faulty)
        reports = cross_check([shift], primitives=("entourage", "neighborhood"),
                              window=16)
        assert any(not r.passed for r in reports)
