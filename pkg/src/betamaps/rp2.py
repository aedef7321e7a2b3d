"""Suitably labelled planar maps with two local minima and pointed maps on the projective plane.

The forward direction cuts a slit along a canonical good path, glues the
opened map to its mirror image and reads the result as the orientation
covering of a projective map.  The backward direction lifts a pointed
projective map, cuts the cover along its equilibrium loop and closes the
slit again.

Rotation order at a vertex is the order of the vertex permutation, which is
taken to be clockwise.  Vertices are canonical rotation tuples as returned
by ``SuitablyLabelledMap.vertex_of``.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .maps import (FlaggedMap, HalfEdgeMap, StructureError, SuitablyLabelledMap,
                   flagged_euler, is_orientable, lift_flagged, project_covering,
                   verify_orientation_reversing)
from .perms import Label, LabelLike, Perm, as_label, bar_conjugate, restriction

Vertex = Tuple[Label, ...]


class PreconditionError(ValueError):
    """An argument outside the domain of a construction."""


# Paths ------------------------------------------------------------------------

@dataclass(frozen=True)
class PathSeq:
    """Half-edges ``(g1, ..., g2l)``: odd/even neighbours form an edge, even/odd share a vertex."""

    half_edges: Tuple[Label, ...]

    def __post_init__(self):
        object.__setattr__(self, "half_edges", tuple(as_label(h) for h in self.half_edges))
        if not self.half_edges or len(self.half_edges) % 2:
            raise StructureError("a path has a positive even number of half-edges")

    @classmethod
    def of(cls, *half_edges: LabelLike) -> "PathSeq":
        return cls(tuple(half_edges))

    def __len__(self):
        return len(self.half_edges) // 2

    def __iter__(self):
        return iter(self.half_edges)

    def edges(self) -> List[Tuple[Label, Label]]:
        g = self.half_edges
        return [(g[2 * i], g[2 * i + 1]) for i in range(len(self))]

    def inverse(self) -> "PathSeq":
        return PathSeq(self.half_edges[::-1])

    def concat(self, other: "PathSeq") -> "PathSeq":
        return PathSeq(self.half_edges + other.half_edges)

    def subpath(self, start: int, stop: int) -> "PathSeq":
        """Edges ``start+1 .. stop``, i.e. from vertex ``start`` to vertex ``stop``."""
        if not 0 <= start < stop <= len(self):
            raise ValueError("subpath indices out of range")
        return PathSeq(self.half_edges[2 * start:2 * stop])

    def vertices(self, m: SuitablyLabelledMap) -> List[Vertex]:
        """``v0 = vert(g1)`` then ``vi = vert(g_2i)``."""
        g = self.half_edges
        return [m.vertex_of(g[0])] + [m.vertex_of(g[2 * i + 1]) for i in range(len(self))]

    def is_valid(self, m: SuitablyLabelledMap) -> bool:
        g = self.half_edges
        if any(h not in m.labels for h in g):
            return False
        for i in range(len(self)):
            if m.map.edges(g[2 * i]) != g[2 * i + 1]:
                return False
            if i + 1 < len(self) and m.vertex_of(g[2 * i + 1]) != m.vertex_of(g[2 * i + 2]):
                return False
        return True

    def is_simple(self, m: SuitablyLabelledMap) -> bool:
        g = self.half_edges
        starts = [m.vertex_of(g[2 * i]) for i in range(len(self))]
        ends = [m.vertex_of(g[2 * i + 1]) for i in range(len(self))]
        return len(set(starts)) == len(starts) and len(set(ends)) == len(ends)

    def is_loop(self, m: SuitablyLabelledMap) -> bool:
        return m.vertex_of(self.half_edges[0]) == m.vertex_of(self.half_edges[-1])

    def label_trace(self, m: SuitablyLabelledMap) -> Tuple[int, ...]:
        return tuple(m.label(v) for v in self.vertices(m))


def _local_extrema(trace: Sequence[int]) -> Tuple[List[int], List[int]]:
    minima, maxima = [], []
    for i, x in enumerate(trace):
        nbrs = [trace[j] for j in (i - 1, i + 1) if 0 <= j < len(trace)]
        if all(x <= y for y in nbrs):
            minima.append(i)
        if all(x >= y for y in nbrs):
            maxima.append(i)
    return minima, maxima


def is_good_trace(trace: Sequence[int]) -> bool:
    """Minima exactly at both ends with equal values; one maximum or two adjacent ones."""
    if len(trace) < 2:
        return False
    minima, maxima = _local_extrema(trace)
    if minima != [0, len(trace) - 1] or trace[0] != trace[-1]:
        return False
    return len(maxima) == 1 or (len(maxima) == 2 and maxima[1] == maxima[0] + 1)


def is_good_path(m: SuitablyLabelledMap, g: PathSeq) -> bool:
    if not g.is_valid(m) or not g.is_simple(m):
        return False
    vs = g.vertices(m)
    return vs[0] != vs[-1] and is_good_trace(g.label_trace(m))


def is_good_loop(m: SuitablyLabelledMap, g: PathSeq) -> bool:
    """A simple loop that splits, at some vertex, into two good halves with equal traces."""
    if not g.is_valid(m) or not g.is_loop(m) or not g.is_simple(m) or len(g) % 2:
        return False
    half = len(g) // 2
    hs = g.half_edges
    for shift in range(len(g)):
        rot = PathSeq(hs[2 * shift:] + hs[:2 * shift])
        first, second = rot.subpath(0, half), rot.subpath(half, len(g))
        if (is_good_path(m, first) and is_good_path(m, second)
                and first.label_trace(m) == second.label_trace(m)):
            return True
    return False


def face_loop(m: SuitablyLabelledMap, face: Sequence[Label]) -> PathSeq:
    """The loop running along a simple face, with the face on the left of each odd half-edge."""
    out: List[Label] = []
    for h in face:
        out += [h, m.map.edges(h)]
    return PathSeq(tuple(out))


# Slits, mirrors and gluing ------------------------------------------------------

@dataclass(frozen=True)
class BoundaryMap:
    """A labelled map with a distinguished simple face, given as its cycle."""

    map: SuitablyLabelledMap
    face: Tuple[Label, ...]

    def __post_init__(self):
        face = tuple(as_label(h) for h in self.face)
        object.__setattr__(self, "face", face)
        phi = self.map.map.faces()
        if not face or _rotate_to(phi.cycle_of(face[0]), face[0]) != face:
            raise StructureError("the boundary is not a face of the map")
        edges = {frozenset((h, self.map.map.edges(h))) for h in face}
        if len(edges) != len(face):
            raise StructureError("the boundary face is not simple")

    def interior(self) -> FrozenSet[Label]:
        return frozenset(self.map.map.half_edges) - frozenset(self.face)

    def interior_faces(self) -> Perm:
        """Face permutation with the boundary cycle removed."""
        return restriction(self.map.map.faces(), self.interior())

    def boundary_loop(self) -> PathSeq:
        return face_loop(self.map, self.face)


def _rotate_to(cyc: Tuple[Label, ...], start: Label) -> Tuple[Label, ...]:
    k = cyc.index(start)
    return cyc[k:] + cyc[:k]


def _inherited_labels(m: HalfEdgeMap, labels: Dict[Label, int]) -> Dict[Label, int]:
    # every new vertex keeps at least one half-edge of the vertex it came from
    out: Dict[Label, int] = {}
    for cyc in m.vertices.cycles():
        known = {labels[h] for h in cyc if h in labels}
        if len(known) != 1:
            raise StructureError(f"vertex {cyc} does not inherit a single label")
        value = known.pop()
        for h in cyc:
            out[h] = value
    return out


def open_slit(m: SuitablyLabelledMap, g: PathSeq) -> BoundaryMap:
    """Cut ``m`` open along a good path, adding a boundary face on the barred copies of ``g``."""
    if any(h.barred for h in m.labels):
        raise PreconditionError("the map must carry unbarred half-edge labels only")
    if not is_good_path(m, g):
        raise PreconditionError("the slit must follow a good path")
    gs = g.half_edges
    size = len(gs)
    barred = [h.bar() for h in gs]
    # face cycle: bar(g_{2l-1}), bar(g_{2l-3}), ..., bar(g_1), bar(g_2), bar(g_4), ..., bar(g_{2l})
    odd = [barred[i] for i in range(size - 2, -1, -2)]
    even = [barred[i] for i in range(1, size, 2)]
    boundary = tuple(odd + even)
    phi = m.map.faces() * Perm.from_cycles([boundary])
    alpha = dict(m.map.edges.items())
    for a in range(size):
        # g_a is matched with bar(g_{2l+1-a}) in 1-based indexing
        alpha[gs[a]] = barred[size - 1 - a]
        alpha[barred[size - 1 - a]] = gs[a]
    opened = HalfEdgeMap.from_faces(phi, Perm(alpha))
    labels = _inherited_labels(opened, m.labels)
    return BoundaryMap(SuitablyLabelledMap(opened, labels), boundary)


def close_slit(bm: BoundaryMap) -> SuitablyLabelledMap:
    """Glue the boundary of an opened map back onto itself.

    The boundary is folded at its two vertices of minimal label on the loop:
    the ``j``-th edge from one fold point is identified with the ``j``-th edge
    going the other way.
    """
    m = bm.map
    loop = bm.boundary_loop()
    rotated = _loop_from_fold(m, loop)
    if rotated is None:
        raise PreconditionError("the boundary is not a good loop")
    edges = rotated.edges()
    half = len(edges) // 2
    inner = bm.interior()
    alpha = {h: m.map.edges(h) for h in inner if m.map.edges(h) in inner}
    for j in range(half):
        a = _interior_end(edges[j], inner)
        b = _interior_end(edges[len(edges) - 1 - j], inner)
        alpha[a], alpha[b] = b, a
    closed = HalfEdgeMap.from_faces(bm.interior_faces(), Perm(alpha))
    labels = {h: m.labels[h] for h in inner}
    return SuitablyLabelledMap(closed, labels)


def _interior_end(edge: Tuple[Label, Label], inner: FrozenSet[Label]) -> Label:
    ends = [h for h in edge if h in inner]
    if len(ends) != 1:
        raise StructureError(f"boundary edge {edge} does not have exactly one interior side")
    return ends[0]


def _loop_from_fold(m: SuitablyLabelledMap, loop: PathSeq) -> Optional[PathSeq]:
    """The rotation of a loop splitting it into two good halves with equal traces."""
    hs = loop.half_edges
    half = len(loop) // 2
    if len(loop) % 2:
        return None
    for shift in range(len(loop)):
        rot = PathSeq(hs[2 * shift:] + hs[:2 * shift])
        first, second = rot.subpath(0, half), rot.subpath(half, len(loop))
        if (is_good_path(m, first) and is_good_path(m, second)
                and first.label_trace(m) == second.label_trace(m)):
            return rot
    return None


def mirror(m: SuitablyLabelledMap) -> SuitablyLabelledMap:
    """Reverse every rotation and bar every half-edge.

    The vertex permutation of the result is ``alpha' sigma' alpha'^-1``, so the
    mirror of the vertex holding ``x`` holds ``bar(alpha(x))``.
    """
    alpha = bar_conjugate(m.map.edges)
    phi = bar_conjugate(m.map.faces())
    image = HalfEdgeMap.from_faces(phi, alpha)
    labels = {y: m.labels[m.map.edges(y.bar())] for y in image.half_edges}
    return SuitablyLabelledMap(image, labels)


def mirror_boundary(bm: BoundaryMap) -> BoundaryMap:
    face = tuple(h.bar() for h in reversed(bm.face))
    return BoundaryMap(mirror(bm.map), face)


def bar_involution(labels) -> Perm:
    return Perm({as_label(x): as_label(x).bar() for x in labels})


def glue_mirror(bm: BoundaryMap) -> Tuple[SuitablyLabelledMap, Perm]:
    """Glue an opened map to its mirror along the boundary; returns the map and ``inv = bar``."""
    if _loop_from_fold(bm.map, bm.boundary_loop()) is None:
        raise PreconditionError("the boundary is not a good loop")
    other = mirror_boundary(bm)
    inner, inner_bar = bm.interior(), other.interior()
    if any(h.barred for h in inner) or any(not h.barred for h in inner_bar):
        raise PreconditionError("interior half-edges must be unbarred in the opened map")
    phi = bm.interior_faces() * other.interior_faces()
    alpha = {h: bm.map.map.edges(h) for h in inner}
    alpha.update({h: other.map.map.edges(h) for h in inner_bar})
    glued_alpha = Perm(alpha)
    if set(glued_alpha.universe) != inner | inner_bar:
        raise StructureError("boundary edges do not match across the two sides")
    glued = HalfEdgeMap.from_faces(phi, glued_alpha)
    labels = {h: bm.map.labels[h] for h in inner}
    labels.update({h: other.map.labels[h] for h in inner_bar})
    out = SuitablyLabelledMap(glued, labels)
    inv = bar_involution(glued.half_edges)
    ok, problems = verify_orientation_reversing(glued, inv)
    if not ok:
        raise StructureError(f"bar is not orientation-reversing on the glued map: {problems}")
    return out, inv


# Roots and leftmost geodesics -----------------------------------------------------

def _face_pair_key(x: Label, phi: Perm) -> int:
    return min(h.index for h in phi.cycle_of(x))


def root_half_edge(m: SuitablyLabelledMap) -> Label:
    """The smallest unbarred half-edge at a label-0 vertex lying on the anchor face.

    The anchor face pair is the one with the smallest underlying label among
    the faces touching label-0 vertices.  Relabelling any other face pair
    leaves the root unchanged.
    """
    phi = m.map.faces()
    zero = [h for h, v in m.labels.items() if v == 0]
    if not zero:
        raise StructureError("no vertex has label 0")
    anchor = min(_face_pair_key(h, phi) for h in zero)
    candidates = [h for h in zero if not h.barred and _face_pair_key(h, phi) == anchor]
    if not candidates:
        raise StructureError("no unbarred half-edge on the anchor face at a label-0 vertex")
    return min(candidates)


def _graph_distances(m: SuitablyLabelledMap, target: Vertex) -> Dict[Vertex, int]:
    dist = {target: 0}
    queue = deque([target])
    while queue:
        v = queue.popleft()
        for w in m.neighbours(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def clockwise(m: SuitablyLabelledMap) -> Perm:
    return m.map.vertices.inverse()


def rotation_index(m: SuitablyLabelledMap, local_root: Label, h: Label) -> int:
    """Position of ``h`` clockwise from ``local_root`` at their common vertex."""
    sigma = clockwise(m)
    k, x = 0, local_root
    while x != h:
        x = sigma(x)
        k += 1
        if x == local_root:
            raise StructureError(f"{h!r} is not at the vertex of {local_root!r}")
    return k


def path_key(m: SuitablyLabelledMap, local_root: Label, g: PathSeq) -> Tuple[int, ...]:
    """Choice indices along ``g``; smaller keys are further left, a prefix is left of its extensions."""
    hs = g.half_edges
    key = [rotation_index(m, local_root, hs[0])]
    for i in range(1, len(g)):
        key.append(rotation_index(m, hs[2 * i - 1], hs[2 * i]))
    return tuple(key)


def leftmost_geodesic(m: SuitablyLabelledMap, local_root: Label, target: Vertex) -> PathSeq:
    """Greedy left-first walk that stays on some shortest path to ``target``."""
    source = m.vertex_of(local_root)
    target = m.vertex_of(target[0])
    if source == target:
        raise ValueError("a geodesic needs two distinct vertices")
    dist = _graph_distances(m, target)
    if source not in dist:
        raise StructureError("the target is not reachable")
    sigma, alpha = clockwise(m), m.map.edges
    out: List[Label] = []
    here, root, first = source, local_root, True
    while here != target:
        h = root if first else sigma(root)
        while True:
            if m.vertex_of(alpha(h)) in dist and dist[m.vertex_of(alpha(h))] == dist[here] - 1:
                break
            h = sigma(h)
        out += [h, alpha(h)]
        here, root, first = m.vertex_of(alpha(h)), alpha(h), False
    return PathSeq(tuple(out))


@dataclass(frozen=True)
class RootedLabelledMap:
    map: SuitablyLabelledMap
    root: Label

    @classmethod
    def of(cls, m: SuitablyLabelledMap) -> "RootedLabelledMap":
        return cls(m, root_half_edge(m))

    @property
    def root_vertex(self) -> Vertex:
        return self.map.vertex_of(self.root)

    def leftmost_geodesic(self, target: Vertex) -> PathSeq:
        return leftmost_geodesic(self.map, self.root, target)

    def local_roots(self) -> Dict[Vertex, Label]:
        """At each other vertex, the half-edge after the arrival of its leftmost geodesic."""
        sigma = clockwise(self.map)
        out = {self.root_vertex: self.root}
        for v in self.map.vertex_cycles():
            v = self.map.vertex_of(v[0])
            if v != self.root_vertex:
                out[v] = sigma(self.leftmost_geodesic(v).half_edges[-1])
        return out

    def vertex_order(self) -> List[Vertex]:
        """Vertices from left to right; the root vertex comes first."""
        others = [self.map.vertex_of(v[0]) for v in self.map.vertex_cycles()]
        others = [v for v in others if v != self.root_vertex]
        others.sort(key=lambda v: path_key(self.map, self.root, self.leftmost_geodesic(v)))
        return [self.root_vertex] + others


@dataclass(frozen=True)
class GoodGeodesic:
    path: PathSeq
    start: Vertex
    end: Vertex
    full: PathSeq


def leftmost_good_geodesic(m: SuitablyLabelledMap) -> GoodGeodesic:
    """The tail of the leftmost geodesic from the root to the second local minimum.

    It starts at the last vertex before the second minimum carrying the same
    label, which is the root vertex itself when both minima are labelled 0.
    """
    minima = m.local_minima()
    if len(minima) != 2:
        raise PreconditionError(f"expected two local minima, found {len(minima)}")
    rooted = RootedLabelledMap.of(m)
    v_root = rooted.root_vertex
    others = [m.vertex_of(v[0]) for v in minima if m.vertex_of(v[0]) != v_root]
    if len(others) != 1:
        raise PreconditionError("the root is not one of the two local minima")
    v_end = others[0]
    full = rooted.leftmost_geodesic(v_end)
    vs = full.vertices(m)
    level = m.label(v_end)
    hits = [i for i, v in enumerate(vs[:-1]) if m.label(v) == level]
    if len(hits) != 1:
        raise StructureError(f"{len(hits)} vertices before the second minimum share its label")
    sub = full.subpath(hits[0], len(full))
    if not is_good_path(m, sub):
        raise StructureError("the chosen good geodesic is not a good path")
    return GoodGeodesic(sub, vs[hits[0]], v_end, full)


# Equilibrium loops ---------------------------------------------------------------

def mirror_vertex(m: SuitablyLabelledMap, inv: Perm, v: Vertex) -> Vertex:
    return m.vertex_of(m.map.edges(inv(v[0])))


def mirror_path(m: SuitablyLabelledMap, inv: Perm, g: PathSeq) -> PathSeq:
    """Image of a path under ``inv``; each edge is traversed from the mirrored start."""
    out: List[Label] = []
    for a, b in g.edges():
        out += [inv(b), inv(a)]
    return PathSeq(tuple(out))


@dataclass(frozen=True)
class EquilibriumLoop:
    loop: PathSeq
    fold: Vertex          # first vertex of the loop, reached from the root side
    far_fold: Vertex      # its mirror image, halfway round the loop
    crossings: int        # vertices shared by the geodesic and its mirror


def equilibrium_loop(m: SuitablyLabelledMap, inv: Perm) -> EquilibriumLoop:
    ok, problems = verify_orientation_reversing(m.map, inv)
    if not ok:
        raise StructureError(f"inv is not orientation-reversing: {problems}")
    if any(m.labels[h] != m.labels[m.map.edges(inv(h))] for h in m.labels):
        raise StructureError("inv does not preserve vertex labels")
    root = root_half_edge(m)
    v_root = m.vertex_of(root)
    v_far = mirror_vertex(m, inv, v_root)
    path = leftmost_geodesic(m, root, v_far)
    image = mirror_path(m, inv, path)
    vs = path.vertices(m)
    mirrored = {mirror_vertex(m, inv, v) for v in vs}
    shared = [i for i, v in enumerate(vs) if v in mirrored]
    k = len(shared)
    if k % 2:
        raise StructureError(f"odd number ({k}) of shared vertices")
    a, b = shared[k // 2 - 1], shared[k // 2]
    if mirror_vertex(m, inv, vs[a]) != vs[b]:
        raise StructureError("the middle shared vertices are not mirror images")
    loop = path.subpath(a, b).concat(image.subpath(a, b))
    if not is_good_loop(m, loop):
        raise StructureError("the equilibrium loop is not a good loop")
    return EquilibriumLoop(loop, vs[a], vs[b], k)


def root_side_faces(m: SuitablyLabelledMap, loop: PathSeq) -> FrozenSet[Tuple[Label, ...]]:
    """Face cycles reachable from the root face without crossing the loop."""
    phi, alpha = m.map.faces(), m.map.edges
    cut = {frozenset(e) for e in loop.edges()}
    start = _canonical(phi.cycle_of(root_half_edge(m)))
    seen = {start}
    queue = deque([start])
    while queue:
        f = queue.popleft()
        for h in f:
            if frozenset((h, alpha(h))) in cut:
                continue
            g = _canonical(phi.cycle_of(alpha(h)))
            if g not in seen:
                seen.add(g)
                queue.append(g)
    return frozenset(seen)


# Face-pair flips -----------------------------------------------------------------

def face_pairs(fm: FlaggedMap) -> List[Tuple[Label, ...]]:
    """Unbarred face cycles, each starting at its minimum, sorted by minimum."""
    out = []
    for cyc in fm.faces().cycles():
        if all(not h.barred for h in cyc):
            out.append(_rotate_to(cyc, min(cyc)))
        elif any(not h.barred for h in cyc):
            raise PreconditionError("a face mixes barred and unbarred labels")
    return sorted(out, key=lambda c: c[0])


def flip_relabelling(cycle: Sequence[Label]) -> Dict[Label, Label]:
    """Swap ``x_m`` with ``bar(x_{-m})``; keeps the faces and the bar involution."""
    k = len(cycle)
    r = {}
    for m_, x in enumerate(cycle):
        y = cycle[(-m_) % k].bar()
        r[x], r[y] = y, x
    return r


def _relabel_flagged(fm: FlaggedMap, r: Dict[Label, Label]) -> FlaggedMap:
    full = {x: r.get(x, x) for x in fm.flags}
    point = None if fm.point is None else full[fm.point]
    return FlaggedMap(fm.tau.conjugate_by(full), fm.rho.conjugate_by(full),
                      fm.mu.conjugate_by(full), point)


def flippable_pairs(fm: FlaggedMap) -> List[Tuple[Label, ...]]:
    """Face pairs other than the one anchoring the root, in order of smallest label."""
    lifted = _lift_pointed(fm)
    anchor = _face_pair_key(root_half_edge(lifted), lifted.map.faces())
    return [c for c in face_pairs(fm) if c[0].index != anchor]


def apply_flips(fm: FlaggedMap, flips: str) -> FlaggedMap:
    pairs = flippable_pairs(fm)
    if len(flips) != len(pairs) or set(flips) - {"0", "1"}:
        raise PreconditionError(f"flip vector must be a 0/1 string of length {len(pairs)}")
    r: Dict[Label, Label] = {}
    for bit, cyc in zip(flips, pairs):
        if bit == "1":
            r.update(flip_relabelling(cyc))
    return _relabel_flagged(fm, r)


def flip_vectors(fm: FlaggedMap) -> List[str]:
    k = len(flippable_pairs(fm))
    return [format(i, f"0{k}b") if k else "" for i in range(2 ** k)]


# The correspondence ----------------------------------------------------------------

def _check_two_minima(m: SuitablyLabelledMap):
    if not m.is_suitable():
        raise PreconditionError("the map is not suitably labelled")
    if len(m.local_minima()) != 2:
        raise PreconditionError("the map must have exactly two local minima")
    if m.map.genus() != 0:
        raise PreconditionError("the map must be planar")


def slit_and_glue(m: SuitablyLabelledMap) -> Tuple[SuitablyLabelledMap, Perm, GoodGeodesic, BoundaryMap]:
    _check_two_minima(m)
    chosen = leftmost_good_geodesic(m)
    opened = open_slit(m, chosen.path)
    glued, inv = glue_mirror(opened)
    return glued, inv, chosen, opened


def to_projective(m: SuitablyLabelledMap, flips: Optional[str] = None) -> FlaggedMap:
    """Pointed projective map of a planar two-minima map; ``flips`` picks a fiber element."""
    glued, inv, _, _ = slit_and_glue(m)
    root = root_half_edge(glued)
    # the projected vertex of a lifted vertex v carries the flags bar(v)
    fm = project_covering(glued.map, inv, point=root.bar())
    if flips:
        fm = apply_flips(fm, flips)
    return fm


def _lift_pointed(fm: FlaggedMap) -> SuitablyLabelledMap:
    if fm.point is None:
        raise PreconditionError("the projective map must be pointed")
    if not fm.is_connected() or is_orientable(fm) or flagged_euler(fm) != 1:
        raise PreconditionError("expected a connected non-orientable map of Euler characteristic 1")
    if any(fm.rho(x) != x.bar() for x in fm.flags):
        raise PreconditionError("rho must be the bar involution")
    cover, _ = lift_flagged(fm)
    lifts = {h.bar() for h in fm.pointed_vertex()}
    starts = {_canonical(cover.vertices.cycle_of(h)): 0 for h in lifts}
    dist = _cover_distances(cover, starts)
    labels = {}
    for cyc, d in dist.items():
        for h in cyc:
            labels[h] = d
    return SuitablyLabelledMap(cover, labels)


def _canonical(cyc: Tuple[Label, ...]) -> Tuple[Label, ...]:
    return _rotate_to(cyc, min(cyc))


def _cover_distances(cover: HalfEdgeMap, starts: Dict[Tuple[Label, ...], int]) -> Dict[Tuple[Label, ...], int]:
    dist = dict(starts)
    queue = deque(starts)
    while queue:
        v = queue.popleft()
        for h in v:
            w = _canonical(cover.vertices.cycle_of(cover.edges(h)))
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def projective_flips(fm: FlaggedMap) -> str:
    """Which non-anchor face pairs sit on the root side with barred labels."""
    lifted = _lift_pointed(fm)
    inv = bar_involution(lifted.map.half_edges)
    eq = equilibrium_loop(lifted, inv)
    plus = root_side_faces(lifted, eq.loop)
    barred_plus = {min(h.index for h in f) for f in plus if f[0].barred}
    return "".join("1" if c[0].index in barred_plus else "0" for c in flippable_pairs(fm))


def from_projective(fm: FlaggedMap, flips: Optional[str] = None) -> SuitablyLabelledMap:
    """Planar two-minima map of a pointed projective map.

    ``flips`` is applied to ``fm`` first; the result does not depend on it.
    """
    if flips:
        fm = apply_flips(fm, flips)
    own = projective_flips(fm)
    if "1" in own:
        fm = apply_flips(fm, own)
    lifted = _lift_pointed(fm)
    inv = bar_involution(lifted.map.half_edges)
    eq = equilibrium_loop(lifted, inv)
    plus = root_side_faces(lifted, eq.loop)
    if any(h.barred for f in plus for h in f):
        raise StructureError("the root side still carries barred faces after flipping")
    inner = frozenset(h for f in plus for h in f)
    edges = eq.loop.edges()
    half = len(edges) // 2
    alpha = {h: lifted.map.edges(h) for h in inner if lifted.map.edges(h) in inner}
    for j in range(half):
        a = _interior_end(edges[j], inner)
        b = _interior_end(edges[len(edges) - 1 - j], inner)
        alpha[a], alpha[b] = b, a
    closed = HalfEdgeMap.from_faces(restriction(lifted.map.faces(), inner), Perm(alpha))
    out = SuitablyLabelledMap(closed, {h: lifted.labels[h] for h in inner})
    if len(out.local_minima()) != 2:
        raise StructureError("closing the slit did not give two local minima")
    return out


# Relabelling a second minimum ----------------------------------------------------

def _single_minimum(m: SuitablyLabelledMap) -> Vertex:
    minima = m.local_minima()
    if len(minima) != 1:
        raise PreconditionError("the map must have exactly one local minimum")
    return m.vertex_of(minima[0][0])


def _relabel_from(m: SuitablyLabelledMap, sources: Dict[Vertex, int]) -> SuitablyLabelledMap:
    dist = m.distances_from(sources)
    labels = {}
    for v, d in dist.items():
        for h in v:
            labels[h] = d
    return SuitablyLabelledMap(m.map, labels)


def phi1(m: SuitablyLabelledMap, v: Vertex, k: int) -> SuitablyLabelledMap:
    """Give ``v`` the label ``k`` and relabel by distance to the two minima."""
    low = _single_minimum(m)
    v = m.vertex_of(v[0])
    if v == low:
        raise PreconditionError("v must not be the minimum")
    reach = _graph_distances(m, low)[v]
    if not 1 <= k < reach:
        raise PreconditionError(f"k must satisfy 1 <= k < {reach}")
    return _relabel_from(m, {low: 0, v: k})


def phi1_inverse(m: SuitablyLabelledMap) -> Tuple[SuitablyLabelledMap, Vertex, int]:
    zero = [m.vertex_of(v[0]) for v in m.local_minima() if m.label(v) == 0]
    minima = [m.vertex_of(v[0]) for v in m.local_minima()]
    if len(minima) != 2 or len(zero) != 1:
        raise PreconditionError("expected two local minima, exactly one of them labelled 0")
    other = next(v for v in minima if v != zero[0])
    return _relabel_from(m, {zero[0]: 0}), other, m.label(other)


def phi2(m: SuitablyLabelledMap, v: Vertex) -> SuitablyLabelledMap:
    """Give ``v`` the label 0 and relabel by distance to the two minima."""
    low = _single_minimum(m)
    v = m.vertex_of(v[0])
    if v == low:
        raise PreconditionError("v must not be the minimum")
    return _relabel_from(m, {low: 0, v: 0})


def phi2_preimages(m: SuitablyLabelledMap) -> List[Tuple[SuitablyLabelledMap, Vertex]]:
    zero = [m.vertex_of(v[0]) for v in m.local_minima() if m.label(v) == 0]
    if len(zero) != 2 or len(m.local_minima()) != 2:
        raise PreconditionError("expected two local minima, both labelled 0")
    return [(_relabel_from(m, {z: 0}), other) for z, other in (zero, zero[::-1])]


def verify_theta(theta: Perm, two_minima: Iterable[SuitablyLabelledMap],
                 pointed: Optional[Iterable[FlaggedMap]] = None) -> Counter:
    """Round trips, fibers and the equilibrium-loop identity over planar two-minima maps.

    ``pointed``, when given, is an independent list of pointed projective maps;
    every one of them must land in ``two_minima`` with fibers of size
    ``2^(#theta - 1)``.
    """
    tally: Counter = Counter()
    fiber = 2 ** (theta.num_cycles() - 1)
    maps = list(two_minima)
    images = set()
    for m in maps:
        tally["maps"] += 1
        glued, inv, chosen, opened = slit_and_glue(m)
        if glued.map.genus() != 0 or not glued.is_suitable():
            tally["glue-fail"] += 1
        if close_slit(opened) != m:
            tally["close-slit-fail"] += 1
        eq = equilibrium_loop(glued, inv)
        if eq.crossings % 2:
            tally["parity-fail"] += 1
        slit_edges = {frozenset((h, glued.map.edges(h))) for h in chosen.path}
        if {frozenset(e) for e in eq.loop.edges()} != slit_edges:
            tally["equilibrium-fail"] += 1
        base = to_projective(m)
        members = {to_projective(m, f) for f in flip_vectors(base)}
        images |= members
        if len(members) != fiber:
            tally["fiber-size-fail"] += 1
        for fm in members:
            if from_projective(fm) != m:
                tally["roundtrip-fail"] += 1
            if to_projective(m, projective_flips(fm)) != fm:
                tally["flip-roundtrip-fail"] += 1
    tally["pointed-images"] = len(images)
    if len(images) != fiber * len(maps):
        tally["injective-fail"] += 1
    if pointed is not None:
        pointed = list(pointed)
        tally["pointed"] = len(pointed)
        known = set(maps)
        counts = Counter(from_projective(fm) for fm in pointed)
        if set(counts) != known or set(counts.values()) - {fiber}:
            tally["reference-fail"] += 1
        if set(pointed) != images:
            tally["reference-fail"] += 1
    return tally
