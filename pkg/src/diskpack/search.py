"""Brute-force search core: bananas, candidate points, filtering, completion.

A banana is the locus of points displaced a fixed admissible distance by a
side pairing: two hypercycles symmetric about the axis (the axis itself for
the minimal displacement of a hyperbolic map).  Candidate centers of hidden
packings are intersections of bananas of two seed pairings that land inside
the fundamental domain.  The completion step is a backtracking search for a
perfect matching of the boundary edges by compatible pairings under the
Poincare condition that every vertex cycle closes with total angle 2 pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import FundamentalDomain, SidePairing
from .geom import (
    CoincidentCurves,
    GeneralizedCircle,
    Isometry,
    axis,
    displacement_offset,
    dist,
    dist_to_geodesic,
    hypercycle,
    intersect,
)
from .tess import DistanceSet

CANDIDATE_DEDUP = 1e-6
ANGLE_TOL = 1e-6
WEDGE = 2.0 * math.pi / 3.0


class InvalidCellStructure(ValueError):
    pass


@dataclass(frozen=True)
class Candidate:
    point: complex
    seed_pair: tuple[SidePairing, SidePairing]
    seed_distances: tuple[float, float]


def _banana_records(
    p: SidePairing, dset: DistanceSet, max_offset: float | None = None
) -> tuple[GeneralizedCircle, list[tuple[float, float, GeneralizedCircle]]]:
    """Axis and (distance, signed sinh offset, curve) records of p's bananas."""
    A = axis(p.map)
    recs = []
    for d in dset.values:
        delta = displacement_offset(p.cls, d)
        if delta is None:
            continue
        if max_offset is not None and delta > max_offset:
            continue
        if delta == 0.0:
            recs.append((d, 0.0, A))
        else:
            tau = math.sinh(delta)
            recs.append((d, tau, hypercycle(A, delta, 1)))
            recs.append((d, -tau, hypercycle(A, delta, -1)))
    return A, recs


def bananas(
    p: SidePairing, dset: DistanceSet, max_offset: float | None = None
) -> list[tuple[float, list[GeneralizedCircle]]]:
    """Displacement loci of p at every admissible distance that has one.

    Distances below the minimal displacement are skipped; the distance equal
    to the translation length of a hyperbolic map contributes the axis as a
    single degenerate curve.  ``max_offset`` drops loci farther than that
    from the axis (used to restrict to curves that can meet the domain).
    """
    _, recs = _banana_records(p, dset, max_offset)
    grouped: dict[float, list[GeneralizedCircle]] = {}
    order: list[float] = []
    for d, _, curve in recs:
        if d not in grouped:
            grouped[d] = []
            order.append(d)
        grouped[d].append(curve)
    return [(d, grouped[d]) for d in order]


def _domain_offset_bound(F: FundamentalDomain, A: GeneralizedCircle) -> float:
    # distance to a geodesic is convex, so the max over each convex tile is
    # attained at a corner
    return max(
        dist_to_geodesic(v, A) for poly in F.corners for v in poly
    ) + 1e-6


def _contains_many(F: FundamentalDomain, zs: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Vectorized FundamentalDomain.contains over an array of points."""
    x, y = zs.real, zs.imag
    denom = 1.0 - (x * x + y * y)
    strict = np.zeros(zs.shape, dtype=bool)
    near_count = np.zeros(zs.shape, dtype=np.int32)
    for poly in range(F.k):
        margin = np.full(zs.shape, np.inf)
        for e in F.edges[poly]:
            c = e.carrier
            if c.kind == "circle":
                s = ((x - c.center.real) ** 2 + (y - c.center.imag) ** 2 - c.radius**2) / (
                    c.radius * denom
                )
            else:
                s = 2.0 * (c.normal.real * x + c.normal.imag * y - c.offset) / denom
            margin = np.minimum(margin, e.inward * s)
        strict |= margin > tol
        near_count += margin >= -tol
    return strict | (near_count >= 2)


INTERSECT_RADIUS_CUT = 1e5


def _chordify(curve: GeneralizedCircle, A: GeneralizedCircle) -> GeneralizedCircle:
    """Replace an extreme-radius hypercycle circle by the chord of the axis's
    ideal points for intersection purposes (the Newton polish afterwards
    removes the sub-1e-5 approximation error)."""
    if curve.kind == "circle" and curve.radius > INTERSECT_RADIUS_CUT:
        u, v = A.ideal_points()
        sep = abs(v - u)
        normal = 1j * (v - u) / sep
        return GeneralizedCircle.line(normal, (normal.conjugate() * u).real)
    return curve


def _split_curves(records, A):
    circles, lines = [], []
    for d, tau, c in records:
        c = _chordify(c, A)
        (circles if c.kind == "circle" else lines).append((d, tau, c))
    return circles, lines


def _sigma_and_grad(A: GeneralizedCircle, x, y):
    """Signed sinh-distance to the geodesic A and its gradient, vectorized."""
    D = 1.0 - (x * x + y * y)
    if A.kind == "circle":
        cx, cy, r = A.center.real, A.center.imag, A.radius
        num = (x - cx) ** 2 + (y - cy) ** 2 - r * r
        s = num / (r * D)
        sx = (2.0 * (x - cx) * D + 2.0 * x * num) / (r * D * D)
        sy = (2.0 * (y - cy) * D + 2.0 * y * num) / (r * D * D)
    else:
        nx, ny = A.normal.real, A.normal.imag
        p = nx * x + ny * y - A.offset
        s = 2.0 * p / D
        sx = (2.0 * nx * D + 4.0 * x * p) / (D * D)
        sy = (2.0 * ny * D + 4.0 * y * p) / (D * D)
    return s, sx, sy


def _newton_polish(A1, tau1, A2, tau2, zs, iterations: int = 3):
    """Move raw intersection points onto the exact displacement loci.

    Solves signed_offset(z, A1) = tau1, signed_offset(z, A2) = tau2 by Newton
    iteration; points with a singular Jacobian or a wild step keep their raw
    position (near-tangent intersections, harmless after deduplication).
    """
    x, y = zs.real.copy(), zs.imag.copy()
    for _ in range(iterations):
        s1, s1x, s1y = _sigma_and_grad(A1, x, y)
        s2, s2x, s2y = _sigma_and_grad(A2, x, y)
        r1, r2 = s1 - tau1, s2 - tau2
        det = s1x * s2y - s1y * s2x
        ok = np.abs(det) > 1e-12
        safe_det = np.where(ok, det, 1.0)
        dx = (-r1 * s2y + r2 * s1y) / safe_det
        dy = (-r2 * s1x + r1 * s2x) / safe_det
        step_ok = ok & (dx * dx + dy * dy < 2.5e-3)
        x = np.where(step_ok, x + dx, x)
        y = np.where(step_ok, y + dy, y)
    return x + 1j * y


def _circle_pair_intersections(circ1, circ2, block=256):
    """Raw intersection points of two circle families with parent records."""
    if not circ1 or not circ2:
        return None
    c1 = np.array([c.center for _, _, c in circ1])
    r1 = np.array([c.radius for _, _, c in circ1])
    c2 = np.array([c.center for _, _, c in circ2])
    r2 = np.array([c.radius for _, _, c in circ2])
    d1 = np.array([d for d, _, _ in circ1])
    t1 = np.array([t for _, t, _ in circ1])
    d2 = np.array([d for d, _, _ in circ2])
    t2 = np.array([t for _, t, _ in circ2])
    pts, out1, out2 = [], [], []
    for start in range(0, len(circ1), block):
        sl = slice(start, start + block)
        dc = c2[None, :] - c1[sl, None]
        dd = np.abs(dc)
        coincident = (dd <= 1e-9) & (np.abs(r2[None, :] - r1[sl, None]) <= 1e-9)
        if coincident.any():
            raise CoincidentCurves("seed pairings share a displacement curve")
        with np.errstate(divide="ignore", invalid="ignore"):
            a = (dd * dd + r1[sl, None] ** 2 - r2[None, :] ** 2) / (2.0 * dd)
            h2 = r1[sl, None] ** 2 - a * a
            ok = (dd > 1e-9) & (h2 >= -1e-12)
            h = np.sqrt(np.where(h2 > 0.0, h2, 0.0))
            u = dc / np.where(dd > 0.0, dd, 1.0)
            base = c1[sl, None] + a * u
            side = h * (1j * u)
        for cand in (base + side, base - side):
            m = ok & (np.abs(cand) < 1.0)
            if m.any():
                ii, jj = np.nonzero(m)
                pts.append(cand[m])
                out1.append(np.stack([d1[sl][ii], t1[sl][ii]], axis=1))
                out2.append(np.stack([d2[jj], t2[jj]], axis=1))
    if not pts:
        return None
    return np.concatenate(pts), np.concatenate(out1), np.concatenate(out2)


def candidates(
    p1: SidePairing,
    p2: SidePairing,
    dset: DistanceSet,
    F: FundamentalDomain,
    dedup: float = CANDIDATE_DEDUP,
) -> list[Candidate]:
    """Intersections of p1's bananas with p2's bananas that lie in F.

    Deduplicated at ``dedup`` point distance and sorted by (re, im).
    """
    if p1.record == p2.record:
        raise ValueError("seed pairings must be distinct")
    A1, recs1 = _banana_records(p1, dset, _domain_offset_bound(F, axis(p1.map)))
    A2, recs2 = _banana_records(p2, dset, _domain_offset_bound(F, axis(p2.map)))
    circ1, lines1 = _split_curves(recs1, A1)
    circ2, lines2 = _split_curves(recs2, A2)

    pieces = []
    hit = _circle_pair_intersections(circ1, circ2)
    if hit is not None:
        pieces.append(hit)
    # lines are rare (hypercycles through antipodal ideal points); scalar path
    scalar: list[tuple[complex, float, float, float, float]] = []
    for d_a, t_a, la in lines1:
        for d_b, t_b, cb in circ2 + lines2:
            for z in intersect(la, cb):
                scalar.append((z, d_a, t_a, d_b, t_b))
    for d_a, t_a, ca in circ1:
        for d_b, t_b, lb in lines2:
            for z in intersect(ca, lb):
                scalar.append((z, d_a, t_a, d_b, t_b))
    if scalar:
        pieces.append(
            (
                np.array([rec[0] for rec in scalar]),
                np.array([[rec[1], rec[2]] for rec in scalar]),
                np.array([[rec[3], rec[4]] for rec in scalar]),
            )
        )
    if not pieces:
        return []
    zs = np.concatenate([p[0] for p in pieces])
    rec1 = np.concatenate([p[1] for p in pieces])
    rec2 = np.concatenate([p[2] for p in pieces])

    zs = _newton_polish(A1, rec1[:, 1], A2, rec2[:, 1], zs)
    keep = (np.abs(zs) < 1.0) & _contains_many(F, zs)
    raw = [
        (z, d_a, d_b)
        for z, d_a, d_b, ok in zip(zs, rec1[:, 0], rec2[:, 0], keep)
        if ok
    ]
    raw.sort(key=lambda rec: (rec[0].real, rec[0].imag))

    out: list[Candidate] = []
    for z, d_a, d_b in raw:
        dup = False
        for c in reversed(out):
            if z.real - c.point.real > dedup:
                break
            if abs(z - c.point) <= dedup:
                dup = True
                break
        if not dup:
            out.append(Candidate(complex(z), (p1, p2), (float(d_a), float(d_b))))
    out.sort(key=lambda c: (c.point.real, c.point.imag))
    return out


def compatible_pairings(
    c: Candidate | complex, L: list[SidePairing], dset: DistanceSet
) -> list[SidePairing]:
    """The sublist of L displacing the candidate by an admissible distance."""
    z = c.point if isinstance(c, Candidate) else c
    return [p for p in L if dset.is_admissible(dist(z, p.map(z)))]


def compatibility_matrix(
    points: list[complex], L: list[SidePairing], dset: DistanceSet
) -> np.ndarray:
    """Boolean matrix admissible[i, j]: pairing L[j] displaces points[i] admissibly."""
    zs = np.array(points)
    vals = np.array(dset.values)
    out = np.zeros((len(points), len(L)), dtype=bool)
    for j, p in enumerate(L):
        w = np.conj(zs) if p.reversing else zs
        img = (p.map.a * w + p.map.b) / (np.conj(p.map.b) * w + np.conj(p.map.a))
        d = 2.0 * np.arctanh(np.abs(img - zs) / np.abs(1.0 - np.conj(img) * zs))
        idx = np.searchsorted(vals, d)
        lo = np.clip(idx - 1, 0, len(vals) - 1)
        hi = np.clip(idx, 0, len(vals) - 1)
        near = np.minimum(np.abs(vals[lo] - d), np.abs(vals[hi] - d))
        out[:, j] = near <= dset.match_tol
    return out


def edge_coverage(
    Lc: list[SidePairing], F: FundamentalDomain
) -> dict[tuple[int, int], list[SidePairing]]:
    """Per boundary edge, the entries of Lc touching it (as src or dst)."""
    cov: dict[tuple[int, int], list[SidePairing]] = {e.key: [] for e in F.boundary}
    for p in Lc:
        if p.src.key in cov:
            cov[p.src.key].append(p)
        if p.dst.key in cov:
            cov[p.dst.key].append(p)
    return cov


def full_coverage(cov: dict) -> bool:
    return all(cov.values())


@dataclass(frozen=True)
class PairingSolution:
    pairings: tuple[SidePairing, ...]  # one entry per identification, src key minimal
    vertex_cycles: tuple[tuple[tuple[complex, ...], float], ...]
    reversing_count: int

    @property
    def identifications(self) -> frozenset:
        return frozenset(p.identification for p in self.pairings)


class _BoundaryStructure:
    """Vertex classes and the corner slots used for vertex-cycle tracing.

    A slot is a pair (boundary vertex, incident boundary edge); every
    boundary vertex carries exactly two.  Choosing a pairing g for edge e
    sends each endpoint v of e to an endpoint v' of the target edge, and the
    cycle continues across the corner of F at v' along its other boundary
    edge.  This walk is a permutation of the slots; each vertex cycle of the
    quotient appears as a mirror pair of slot cycles, and the wedge angle at
    v is consumed once per slot step, so a valid cycle closes at total 2 pi.
    """

    def __init__(self, F: FundamentalDomain):
        self.F = F
        classes = F.vertex_classes()
        self.points: list[complex] = []
        self.angles: list[float] = []
        self.interior: list[int] = []
        index_of: dict[tuple[int, int], int] = {}
        for point, members in classes:
            idx = len(self.points)
            self.points.append(point)
            self.angles.append(WEDGE * len(members))
            for key in members:
                index_of[key] = idx
            if len(members) * WEDGE > 2.0 * math.pi - ANGLE_TOL:
                self.interior.append(idx)
        self.corner_class = index_of

        boundary_keys = {e.key for e in F.boundary}
        self.incident: dict[int, list[tuple[int, int]]] = {}
        for e in F.boundary:
            for corner in (e.edge - 1, e.edge):
                v = index_of[(e.poly, corner % F.n)]
                self.incident.setdefault(v, []).append(e.key)
        for v, keys in self.incident.items():
            if len(keys) != 2:
                raise InvalidCellStructure(
                    f"boundary vertex {v} has {len(keys)} incident boundary edges"
                )
            if v in self.interior:
                raise InvalidCellStructure("interior vertex lies on the boundary")

        self.slot_of: dict[tuple[tuple[int, int], int], int] = {}
        self.slots: list[tuple[tuple[int, int], int]] = []
        for v in sorted(self.incident):
            for key in self.incident[v]:
                self.slot_of[(key, v)] = len(self.slots)
                self.slots.append((key, v))
        self.slot_angle = [self.angles[v] for _, v in self.slots]
        self._boundary_keys = boundary_keys

    def vertex_at(self, z: complex) -> int:
        for idx, p in enumerate(self.points):
            if abs(z - p) < 1e-6:
                return idx
        raise InvalidCellStructure(f"pairing image {z} is not a vertex of the domain")

    def _links_one_direction(self, src_key, dst_key, mp: Isometry):
        out = []
        for v in (v for (key, v) in self.slots if key == src_key):
            w = self.vertex_at(mp(self.points[v]))
            if dst_key not in self.incident.get(w, ()):
                raise InvalidCellStructure(
                    f"pairing sends vertex {v} off the endpoints of {dst_key}"
                )
            other = next(k for k in self.incident[w] if k != dst_key)
            out.append((self.slot_of[(src_key, v)], self.slot_of[(other, w)]))
        return out

    def links_for(self, p: SidePairing) -> list[tuple[int, int]]:
        """The four slot links induced by choosing identification p."""
        return self._links_one_direction(
            p.src.key, p.dst.key, p.map
        ) + self._links_one_direction(p.dst.key, p.src.key, p.map.inverse())


def trace_cycles(links: dict[int, int], angles: dict[int, float]):
    """Cycles of the permutation ``links`` with their angle sums."""
    seen = set()
    cycles = []
    for start in sorted(links):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        cur = links[start]
        while cur != start:
            if cur in seen or cur not in links:
                raise InvalidCellStructure("vertex links do not form a permutation")
            cyc.append(cur)
            seen.add(cur)
            cur = links[cur]
        cycles.append((tuple(cyc), sum(angles[v] for v in cyc)))
    return cycles


class _ChainState:
    """Partial vertex permutation with chain angle accounting."""

    __slots__ = ("succ", "pred", "head", "chains", "closed")

    def __init__(self):
        self.succ: dict[int, int] = {}
        self.pred: dict[int, int] = {}
        self.head: dict[int, int] = {}
        self.chains: dict[int, tuple[int, float]] = {}  # head -> (tail, consumed)
        self.closed: list[tuple[int, float]] = []  # (head, total angle)

    def copy(self) -> "_ChainState":
        st = _ChainState.__new__(_ChainState)
        st.succ = dict(self.succ)
        st.pred = dict(self.pred)
        st.head = dict(self.head)
        st.chains = dict(self.chains)
        st.closed = list(self.closed)
        return st

    def add_link(self, u: int, w: int, angles: list[float], tol: float = ANGLE_TOL) -> bool:
        if u in self.succ or w in self.pred:
            return False
        self.succ[u] = w
        self.pred[w] = u
        hu = self.head.get(u, u)
        if hu not in self.chains:
            self.chains[hu] = (hu, 0.0)
            self.head[hu] = hu
        tail_u, sum_u = self.chains[hu]
        if tail_u != u:
            return False
        if w == hu:
            total = sum_u + angles[u]
            del self.chains[hu]
            if abs(total - 2.0 * math.pi) > tol:
                return False
            self.closed.append((hu, total))
            return True
        hw = self.head.get(w, w)
        if hw not in self.chains:
            self.chains[hw] = (hw, 0.0)
            self.head[hw] = hw
        tail_w, sum_w = self.chains[hw]
        merged = sum_u + angles[u] + sum_w
        if merged + angles[tail_w] > 2.0 * math.pi + tol:
            return False
        del self.chains[hw]
        self.chains[hu] = (tail_w, merged)
        node = w
        while True:
            self.head[node] = hu
            if node == tail_w:
                break
            node = self.succ[node]
        return True


def complete_pairing(
    Lc: list[SidePairing],
    F: FundamentalDomain,
    limit: int = 32,
    require_reversing: bool = True,
) -> list[PairingSolution]:
    """Backtracking completion of Lc into full side-pairing sets.

    Picks the unmatched boundary edge with the fewest live options, tries its
    compatible pairings in canonical order, and prunes on the Poincare vertex
    condition: a closing cycle must total 2 pi and a partial chain may never
    exceed it.  Returns up to ``limit`` solutions in deterministic order;
    an empty list means the search space is exhausted with no solution.
    """
    struct = _BoundaryStructure(F)
    by_src: dict[tuple[int, int], list[SidePairing]] = {e.key: [] for e in F.boundary}
    for p in sorted(set(Lc), key=SidePairing.sort_key):
        if p.src.key in by_src and p.dst.key in by_src and p.src.key != p.dst.key:
            by_src[p.src.key].append(p)
    link_cache: dict[tuple, list[tuple[int, int]]] = {}
    for plist in by_src.values():
        for p in plist:
            if p.record not in link_cache:
                link_cache[p.record] = struct.links_for(p)

    edge_keys = sorted(by_src)
    solutions: list[PairingSolution] = []

    def descend(matched: dict, state: _ChainState):
        if len(solutions) >= limit:
            return
        unmatched = [k for k in edge_keys if k not in matched]
        if not unmatched:
            _emit_solution(matched, struct, solutions, require_reversing)
            return
        best_key, best_opts = None, None
        for key in unmatched:
            opts = [p for p in by_src[key] if p.dst.key not in matched]
            if best_opts is None or len(opts) < len(best_opts):
                best_key, best_opts = key, opts
                if not opts:
                    return
        for p in best_opts:
            st = state.copy()
            ok = True
            for u, w in link_cache[p.record]:
                if not st.add_link(u, w, struct.slot_angle):
                    ok = False
                    break
            if not ok:
                continue
            matched[best_key] = p
            matched[p.dst.key] = p
            descend(matched, st)
            del matched[best_key]
            del matched[p.dst.key]
            if len(solutions) >= limit:
                return

    descend({}, _ChainState())
    return solutions


def solution_cycles(
    pairings, struct: _BoundaryStructure
) -> list[tuple[tuple[int, ...], float]]:
    """Vertex cycles of a full identification set, one per mirror pair.

    Returns (vertex class ids in cycle order, angle sum) for each quotient
    vertex coming from the boundary.
    """
    links: dict[int, int] = {}
    for p in pairings:
        for u, w in struct.links_for(p):
            if u in links:
                raise InvalidCellStructure("boundary edge identified twice")
            links[u] = w
    if len(links) != len(struct.slots):
        raise InvalidCellStructure("identifications do not cover the boundary")
    slot_cycles = trace_cycles(links, dict(enumerate(struct.slot_angle)))
    by_vertex_set: dict[frozenset, list[tuple[tuple[int, ...], float]]] = {}
    for cyc, total in slot_cycles:
        verts = tuple(struct.slots[s][1] for s in cyc)
        by_vertex_set.setdefault(frozenset(verts), []).append((verts, total))
    out = []
    for group in by_vertex_set.values():
        if len(group) != 2:
            raise InvalidCellStructure(
                "slot cycles do not pair up; an identification fixes a vertex"
            )
        out.append(min(group))
    out.sort()
    return out


def _emit_solution(matched, struct, solutions, require_reversing):
    chosen = {}
    for p in matched.values():
        chosen[p.identification] = min(
            chosen.get(p.identification, p), p, key=SidePairing.sort_key
        )
    pairings = tuple(sorted(chosen.values(), key=SidePairing.sort_key))
    reversing_count = sum(1 for p in pairings if p.reversing)
    if require_reversing and reversing_count == 0:
        return
    cycles = solution_cycles(pairings, struct)
    for _, total in cycles:
        if abs(total - 2.0 * math.pi) > ANGLE_TOL:
            raise InvalidCellStructure(f"vertex cycle closes at {total}")
    vertex_cycles = tuple(
        (tuple(struct.points[v] for v in cyc), total) for cyc, total in cycles
    )
    solutions.append(PairingSolution(pairings, vertex_cycles, reversing_count))


def verify_topology(sol: PairingSolution, F: FundamentalDomain) -> dict:
    """Cell counts and genus of the quotient surface."""
    struct = _BoundaryStructure(F)
    for _, total in sol.vertex_cycles:
        if abs(total - 2.0 * math.pi) > ANGLE_TOL:
            raise InvalidCellStructure(f"vertex cycle angle sum {total} != 2 pi")
    faces = F.k
    edges = len(F.internal_edges) + len(sol.pairings)
    vertices = len(sol.vertex_cycles) + len(struct.interior)
    chi = vertices - edges + faces
    orientable = sol.reversing_count == 0
    if orientable:
        if (2 - chi) % 2 != 0:
            raise InvalidCellStructure(f"orientable surface with odd 2 - chi = {2 - chi}")
        genus = (2 - chi) // 2
    else:
        genus = 2 - chi
    return {
        "faces": faces,
        "edges": edges,
        "vertices": vertices,
        "euler_characteristic": chi,
        "orientable": orientable,
        "genus": genus,
    }
