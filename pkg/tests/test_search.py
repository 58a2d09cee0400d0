import math
import random

import pytest

from reference_data import (
    GOOD_CANDIDATE,
    LC_REJECTED_IDENTS,
    REJECTED_CANDIDATE,
    SOLUTION_18_IDENTS,
)
from diskpack.domain import build_domain
from diskpack.geom import axis, dist
from diskpack.search import (
    InvalidCellStructure,
    PairingSolution,
    _BoundaryStructure,
    bananas,
    candidates,
    compatibility_matrix,
    compatible_pairings,
    complete_pairing,
    edge_coverage,
    full_coverage,
    solution_cycles,
    trace_cycles,
    verify_topology,
)


class TestBananas:
    def test_distances_below_minimum_omitted(self, n14):
        fam = bananas(n14.p1, n14.dset)
        t = n14.p1.cls.translation_length
        # glide: minimal displacement is the translation length
        assert all(d >= t - 1e-9 for d, _ in fam)
        assert 0.0 not in [d for d, _ in fam]

    def test_sampled_points_displaced_exactly(self, n14):
        fam = bananas(n14.p1, n14.dset)
        g = n14.p1.map
        checked = 0
        for d, curves in fam[:10]:
            for c in curves:
                for i in range(10):
                    z = c.point_at(0.6 * i)
                    if abs(z) < 0.995:
                        assert dist(z, g(z)) == pytest.approx(d, abs=1e-6)
                        checked += 1
        assert checked > 20

    def test_curves_share_axis_ideal_points(self, n14):
        A = axis(n14.p2.map)
        fam = bananas(n14.p2, n14.dset)
        _, curves = fam[0]
        for c in curves:
            for p in A.ideal_points():
                assert abs(c.side(p)) < 1e-9

    def test_offset_bound_prunes(self, n14):
        full = bananas(n14.p1, n14.dset)
        pruned = bananas(n14.p1, n14.dset, max_offset=1.0)
        assert len(pruned) < len(full)


class TestCandidates:
    def test_reference_points_present(self, n14):
        pts = [c.point for c in n14.C]
        for target in (0j, GOOD_CANDIDATE, REJECTED_CANDIDATE):
            best = min(pts, key=lambda z: abs(z - target))
            assert abs(best - target) < 1e-3

    def test_sorted_and_deduplicated(self, n14):
        pts = [c.point for c in n14.C]
        keys = [(z.real, z.imag) for z in pts]
        assert keys == sorted(keys)
        for i in range(len(pts) - 1):
            assert abs(pts[i] - pts[i + 1]) > 1e-6

    def test_all_inside_domain(self, n14):
        for c in n14.C[::37]:
            assert n14.F.contains(c.point)

    def test_seed_distances_recorded_and_admissible(self, n14):
        # the recorded displacements re-verify far inside the matching
        # tolerance contract
        for c in n14.C[::17]:
            d1, d2 = c.seed_distances
            assert n14.dset.is_admissible(d1) and n14.dset.is_admissible(d2)
            assert dist(c.point, n14.p1.map(c.point)) == pytest.approx(d1, abs=1e-9)
            assert dist(c.point, n14.p2.map(c.point)) == pytest.approx(d2, abs=1e-9)

    def test_same_seed_rejected(self, n14):
        with pytest.raises(ValueError):
            candidates(n14.p1, n14.p1, n14.dset, n14.F)


class TestCompatiblePairings:
    def test_rejected_candidate_matches_reference_list(self, n14):
        c2 = min(n14.C, key=lambda c: abs(c.point - REJECTED_CANDIDATE))
        Lc = compatible_pairings(c2, n14.L, n14.dset)
        assert {p.identification for p in Lc} == LC_REJECTED_IDENTS

    def test_origin_compatible_with_reference_solution(self, n14):
        origin = min(n14.C, key=lambda c: abs(c.point))
        Lc = compatible_pairings(origin, n14.L, n14.dset)
        idents = {p.identification for p in Lc}
        assert SOLUTION_18_IDENTS <= idents

    def test_matrix_agrees_with_scalar(self, n14):
        pts = [c.point for c in n14.C[:40]]
        m = compatibility_matrix(pts, n14.L, n14.dset)
        for i in (0, 7, 23):
            scalar = {p.record for p in compatible_pairings(pts[i], n14.L, n14.dset)}
            vector = {p.record for p, ok in zip(n14.L, m[i]) if ok}
            assert scalar == vector

    def test_closed_under_inversion(self, n14):
        c2 = min(n14.C, key=lambda c: abs(c.point - REJECTED_CANDIDATE))
        Lc = compatible_pairings(c2, n14.L, n14.dset)
        records = {p.record for p in Lc}
        for rev, sp, se, dp, de in records:
            assert (rev, dp, de, sp, se) in records


class TestEdgeCoverage:
    def test_rejected_candidate_misses_edge_3(self, n14):
        c2 = min(n14.C, key=lambda c: abs(c.point - REJECTED_CANDIDATE))
        cov = edge_coverage(compatible_pairings(c2, n14.L, n14.dset), n14.F)
        assert cov[(0, 3)] == []
        assert not full_coverage(cov)

    def test_good_candidate_fully_covered(self, n14):
        c1 = min(n14.C, key=lambda c: abs(c.point - GOOD_CANDIDATE))
        cov = edge_coverage(compatible_pairings(c1, n14.L, n14.dset), n14.F)
        assert full_coverage(cov)
        assert len(cov[(0, 3)]) >= 6

    def test_whole_list_covers_everything(self):
        F = build_domain(7, [])
        from diskpack.domain import enumerate_pairings

        L = enumerate_pairings(F)
        assert full_coverage(edge_coverage(L, F))


class TestCompletePairing:
    def test_singleton_cover_returned_verbatim(self, n14, n14_solution):
        by_record = {p.record: p for p in n14.L}
        both = []
        for p in n14_solution.reference.pairings:
            both.append(p)
            both.append(
                by_record[(p.reversing, p.dst.poly, p.dst.edge, p.src.poly, p.src.edge)]
            )
        sols = complete_pairing(both, n14.F, limit=8)
        assert len(sols) == 1
        assert sols[0].identifications == SOLUTION_18_IDENTS

    def test_reference_solution_found(self, n14_solution):
        idents = [s.identifications for s in n14_solution.solutions]
        assert SOLUTION_18_IDENTS in idents

    def test_missing_edge_gives_no_solution(self, n14, n14_solution):
        pruned = [p for p in n14_solution.Lc if (0, 3) not in (p.src.key, p.dst.key)]
        assert complete_pairing(pruned, n14.F, limit=4) == []

    def test_order_independence(self, n14, n14_solution):
        shuffled = list(n14_solution.Lc)
        random.Random(7).shuffle(shuffled)
        sols_a = complete_pairing(n14_solution.Lc, n14.F, limit=100000)
        sols_b = complete_pairing(shuffled, n14.F, limit=100000)
        assert {s.identifications for s in sols_a} == {
            s.identifications for s in sols_b
        }
        assert len(sols_a) == len(sols_b) == 165

    def test_limit_caps_output(self, n14, n14_solution):
        sols = complete_pairing(n14_solution.Lc, n14.F, limit=5)
        assert len(sols) == 5

    def test_vertex_cycles_close_at_two_pi(self, n14_solution):
        for sol in n14_solution.solutions[:10]:
            for _, total in sol.vertex_cycles:
                assert total == pytest.approx(2 * math.pi, abs=1e-6)


class TestCycleMachinery:
    def test_torus_mock(self):
        # square with opposite sides glued: slots 0..3 in one cycle of
        # quarter-turn wedges; V - E + F = 1 - 2 + 1 = 0
        links = {0: 1, 1: 2, 2: 3, 3: 0}
        angles = {i: math.pi / 2 for i in range(4)}
        cycles = trace_cycles(links, angles)
        assert len(cycles) == 1
        assert cycles[0][1] == pytest.approx(2 * math.pi)
        vertices, edges, faces = 1, 2, 1
        assert vertices - edges + faces == 0

    def test_non_permutation_detected(self):
        with pytest.raises(InvalidCellStructure):
            trace_cycles({0: 1, 1: 0, 2: 1}, {0: 1.0, 1: 1.0, 2: 1.0})

    def test_solution_cycles_pair_up(self, n14, n14_solution):
        struct = _BoundaryStructure(n14.F)
        cycles = solution_cycles(n14_solution.reference.pairings, struct)
        assert len(cycles) == 13  # quotient boundary vertices
        for verts, total in cycles:
            assert total == pytest.approx(2 * math.pi, abs=1e-9)

    def test_global_angle_bookkeeping(self, n14, n14_solution):
        # the cycle angle sums together account for every boundary vertex's
        # interior angle exactly once
        struct = _BoundaryStructure(n14.F)
        cycles = solution_cycles(n14_solution.reference.pairings, struct)
        total = sum(t for _, t in cycles)
        boundary_angle = sum(
            struct.angles[v]
            for v in range(len(struct.points))
            if v not in struct.interior
        )
        assert total == pytest.approx(boundary_angle, abs=1e-5)


class TestVerifyTopology:
    def test_reference_solution_counts(self, n14, n14_solution):
        topo = verify_topology(n14_solution.reference, n14.F)
        assert topo == {
            "faces": 3,
            "edges": 21,
            "vertices": 14,
            "euler_characteristic": -4,
            "orientable": False,
            "genus": 6,
        }

    def test_euler_relation_nk(self, n14, n14_solution):
        # N k = 6 (k - chi) holds exactly for accepted solutions
        topo = verify_topology(n14_solution.reference, n14.F)
        chi = topo["euler_characteristic"]
        assert n14.F.n * n14.F.k == 6 * (n14.F.k - chi)

    def test_orientable_branch(self, n14, n14_solution):
        mock = PairingSolution(
            n14_solution.reference.pairings, n14_solution.reference.vertex_cycles, 0
        )
        topo = verify_topology(mock, n14.F)
        assert topo["orientable"] is True
        assert topo["genus"] == 3  # chi = -4 = 2 - 2g

    def test_bad_angle_rejected(self, n14, n14_solution):
        verts, _ = n14_solution.reference.vertex_cycles[0]
        broken = ((verts, 2 * math.pi + 1e-3),) + n14_solution.reference.vertex_cycles[1:]
        mock = PairingSolution(n14_solution.reference.pairings, broken, 4)
        with pytest.raises(InvalidCellStructure):
            verify_topology(mock, n14.F)
