"""Fundamental domains built from tessellation tiles, and their side pairings.

A domain is a connected union of k tiles: tile 0 is the central tile, every
further tile is attached across an edge of an earlier one and takes its edge
labels through the neighbor map, so an attached tile's edge 0 is the shared
edge and labels increase counterclockwise.

Side pairings identify ordered pairs of boundary edges.  For each ordered
pair there is one conformal matching (endpoints crossed, so the inward side
of the source maps to the outward side of the target) and one reversing
matching (endpoints parallel).  Matchings whose isometry is not hyperbolic
or glide (for instance the vertex rotations arising between edges that share
an endpoint) cannot occur in a torsion-free uniformizing group and are
dropped from the list.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geom import (
    GLIDE,
    HYPERBOLIC,
    GeneralizedCircle,
    Isometry,
    IsometryClass,
    classify,
    dist,
    geodesic_through,
    segment_aligner,
    signed_offset,
)
from .tess import TriangleGenerators, triangle_generators

EDGE_MATCH_TOL = 1e-9
INSIDE_TOL = 1e-9


class OverlappingPolygons(ValueError):
    pass


class DisconnectedAssembly(ValueError):
    pass


@dataclass(frozen=True)
class Attachment:
    parent: int
    parent_edge: int


@dataclass(frozen=True)
class EdgeRef:
    poly: int
    edge: int
    endpoints: tuple[complex, complex]  # counterclockwise around the polygon
    carrier: GeneralizedCircle
    inward: int  # sign of carrier.side() on the polygon-center side

    @property
    def key(self) -> tuple[int, int]:
        return (self.poly, self.edge)

    def margin(self, z: complex) -> float:
        """Signed sinh-distance to the carrier, positive on the inward side."""
        return self.inward * signed_offset(z, self.carrier)


@dataclass(frozen=True)
class FundamentalDomain:
    n: int
    k: int
    gens: TriangleGenerators
    placements: tuple[Isometry, ...]
    corners: tuple[tuple[complex, ...], ...]
    edges: tuple[tuple[EdgeRef, ...], ...]  # all edges, [poly][edge]
    internal_edges: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    boundary: tuple[EdgeRef, ...]

    @property
    def metrics(self):
        return self.gens.metrics

    def center(self, poly: int) -> complex:
        return self.placements[poly](0j)

    def edge_ref(self, poly: int, edge: int) -> EdgeRef:
        return self.edges[poly][edge]

    def is_internal(self, poly: int, edge: int) -> bool:
        return any((poly, edge) in pair for pair in self.internal_edges)

    def polygon_margin(self, z: complex, poly: int) -> float:
        return min(e.margin(z) for e in self.edges[poly])

    def contains(self, z: complex, tol: float = INSIDE_TOL) -> bool:
        """True when z is strictly inside some tile or on an internal edge."""
        near = 0
        for poly in range(self.k):
            m = self.polygon_margin(z, poly)
            if m > tol:
                return True
            if m >= -tol:
                near += 1
        return near >= 2

    def vertex_classes(self) -> list[tuple[complex, list[tuple[int, int]]]]:
        """Geometric vertices with the tile corners meeting there.

        A corner (poly, j) sits between edges j and j+1 of its tile; corners
        of different tiles closer than the matching tolerance are one vertex.
        """
        classes: list[tuple[complex, list[tuple[int, int]]]] = []
        for poly in range(self.k):
            for j, v in enumerate(self.corners[poly]):
                for point, members in classes:
                    if abs(v - point) < EDGE_MATCH_TOL:
                        members.append((poly, j))
                        break
                else:
                    classes.append((v, [(poly, j)]))
        return classes


def build_domain(
    n: int, attachments: list[Attachment], frame: Isometry | None = None
) -> FundamentalDomain:
    """Place k = len(attachments) + 1 tiles; tile i >= 1 follows attachments[i-1].

    ``frame`` is an optional conformal isometry applied to the whole assembly
    (a global rotation matching a figure's orientation); tile 0 is the image
    of the central tile under it.
    """
    gens = triangle_generators(n)
    metrics = gens.metrics
    if frame is not None and frame.reversing:
        raise ValueError("frame must be orientation-preserving")
    placements = [frame if frame is not None else Isometry.identity()]
    used: set[tuple[int, int]] = set()
    for i, att in enumerate(attachments, start=1):
        if not 0 <= att.parent < i:
            raise DisconnectedAssembly(
                f"attachment {i - 1} references polygon {att.parent}, "
                f"but only polygons 0..{i - 1} are placed"
            )
        if not 0 <= att.parent_edge < n:
            raise ValueError(f"edge label {att.parent_edge} out of range for n={n}")
        if (att.parent, att.parent_edge) in used:
            raise OverlappingPolygons(
                f"edge {att.parent_edge} of polygon {att.parent} already carries a tile"
            )
        used.add((att.parent, att.parent_edge))
        placements.append(placements[att.parent] * gens.rm[att.parent_edge])
    k = len(placements)

    centers = [p(0j) for p in placements]
    for i in range(k):
        for j in range(i + 1, k):
            if dist(centers[i], centers[j]) < 2.0 * metrics.inradius - 1e-9:
                raise OverlappingPolygons(f"polygons {i} and {j} overlap")

    base = metrics.corners()
    corners = tuple(tuple(p(v) for v in base) for p in placements)

    edges: list[list[EdgeRef]] = []
    for poly in range(k):
        row = []
        for e in range(n):
            u, v = corners[poly][e - 1], corners[poly][e]
            carrier = geodesic_through(u, v)
            inward = 1 if carrier.side(centers[poly]) > 0 else -1
            row.append(EdgeRef(poly, e, (u, v), carrier, inward))
        edges.append(row)

    internal = []
    for i in range(k):
        for j in range(i + 1, k):
            for e in range(n):
                for f in range(n):
                    if _same_edge(edges[i][e], edges[j][f]):
                        internal.append(((i, e), (j, f)))
    internal_keys = {key for pair in internal for key in pair}
    boundary = tuple(
        edges[poly][e]
        for poly in range(k)
        for e in range(n)
        if (poly, e) not in internal_keys
    )
    return FundamentalDomain(
        n=n,
        k=k,
        gens=gens,
        placements=tuple(placements),
        corners=corners,
        edges=tuple(tuple(row) for row in edges),
        internal_edges=tuple(internal),
        boundary=boundary,
    )


def _same_edge(e1: EdgeRef, e2: EdgeRef) -> bool:
    (a, b), (c, d) = e1.endpoints, e2.endpoints
    return (abs(a - c) < EDGE_MATCH_TOL and abs(b - d) < EDGE_MATCH_TOL) or (
        abs(a - d) < EDGE_MATCH_TOL and abs(b - c) < EDGE_MATCH_TOL
    )


@dataclass(frozen=True)
class SidePairing:
    map: Isometry
    src: EdgeRef
    dst: EdgeRef
    reversing: bool
    cls: IsometryClass

    @property
    def record(self) -> tuple[bool, int, int, int, int]:
        return (self.reversing, self.src.poly, self.src.edge, self.dst.poly, self.dst.edge)

    @property
    def identification(self) -> tuple[bool, tuple[int, int], tuple[int, int]]:
        """Direction-free form: (reversing, smaller edge key, larger edge key)."""
        ends = sorted([self.src.key, self.dst.key])
        return (self.reversing, ends[0], ends[1])

    @property
    def type_tag(self) -> str:
        return "or-hyperbolic" if self.reversing else "hyperbolic"

    @property
    def label(self) -> str:
        return f"de pol{self.src.poly + 1} a pol{self.dst.poly + 1}"

    def sort_key(self):
        return (self.src.poly, self.src.edge, self.reversing, self.dst.poly, self.dst.edge)


def pairing_between(F: FundamentalDomain, src: EdgeRef, dst: EdgeRef, reversing: bool) -> Isometry:
    """The matching of src onto dst carrying the inward side of src outward."""
    u1, u2 = src.endpoints
    v1, v2 = dst.endpoints
    h1 = segment_aligner(u1, u2)
    if reversing:
        # endpoints kept parallel; the orientation flip crosses the sides
        return segment_aligner(v1, v2).inverse() * Isometry(1.0, 0.0, True) * h1
    # endpoints crossed; conformality crosses the sides
    return segment_aligner(v2, v1).inverse() * h1


def enumerate_pairings(F: FundamentalDomain) -> list[SidePairing]:
    """All axial side pairings between ordered pairs of distinct boundary edges.

    Generates 2 E (E-1) matchings and keeps those classified hyperbolic
    (conformal) or glide (reversing); vertex-fixing elliptics and mirror
    reflections are impossible in a torsion-free group and are discarded.
    """
    out = []
    for src in F.boundary:
        for dst in F.boundary:
            if src.key == dst.key:
                continue
            for reversing in (False, True):
                m = pairing_between(F, src, dst, reversing)
                cls = classify(m)
                want = GLIDE if reversing else HYPERBOLIC
                if cls.tag != want:
                    continue
                out.append(SidePairing(m, src, dst, reversing, cls))
    out.sort(key=SidePairing.sort_key)
    return out


def find_pairing(
    L: list[SidePairing],
    reversing: bool,
    src_poly: int,
    src_edge: int,
    dst_poly: int,
    dst_edge: int,
) -> SidePairing:
    """Look up a pairing by its record (0-based polygon indices)."""
    record = (reversing, src_poly, src_edge, dst_poly, dst_edge)
    for p in L:
        if p.record == record:
            return p
    raise KeyError(f"no side pairing with record {record}")


def contains_point(F: FundamentalDomain, z: complex) -> bool:
    return F.contains(z)


def pairing_json(p: SidePairing) -> dict:
    """JSON record; polygon indices are 1-based to match the printed labels."""
    m = p.map
    mat = [m.a, m.b, m.b.conjugate(), m.a.conjugate()]
    return {
        "type": p.type_tag,
        "label": p.label,
        "src": {"poly": p.src.poly + 1, "edge": p.src.edge},
        "dst": {"poly": p.dst.poly + 1, "edge": p.dst.edge},
        "matrix": [[z.real, z.imag] for z in mat],
        "reversing": p.reversing,
    }
