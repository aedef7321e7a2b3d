"""Permutational models of hypermaps, maps and flagged (possibly non-orientable) maps."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .perms import Label, LabelLike, Perm, as_label, is_transitive, orbits


class StructureError(ValueError):
    """Input that violates a structural invariant of the model."""


# Orientable hypermaps and maps --------------------------------------------

@dataclass(frozen=True)
class Hypermap:
    theta: Perm
    sigma: Perm

    def __post_init__(self):
        if set(self.theta.universe) != set(self.sigma.universe):
            raise StructureError("black and white permutations act on different labels")

    def faces(self) -> Perm:
        return faces(self)

    def is_connected(self) -> bool:
        return is_transitive([self.theta, self.sigma])

    def to_json(self) -> str:
        return json.dumps({"theta": str(self.theta), "sigma": str(self.sigma)})

    @classmethod
    def from_json(cls, text: str) -> "Hypermap":
        obj = json.loads(text)
        return cls(Perm.parse(obj["theta"]), Perm.parse(obj["sigma"]))


def faces(h: Hypermap) -> Perm:
    """``phi = theta^-1 sigma^-1``."""
    return h.theta.inverse() * h.sigma.inverse()


def euler_genus(h: Hypermap) -> int:
    if not h.is_connected():
        raise StructureError("hypermap is not connected")
    n = len(h.theta)
    chi = h.theta.num_cycles() + h.sigma.num_cycles() - n + faces(h).num_cycles()
    if chi > 2 or chi % 2:
        raise StructureError(f"Euler characteristic {chi} is not 2 - 2g")
    return (2 - chi) // 2


@dataclass(frozen=True)
class HalfEdgeMap:
    """A map given by its vertex rotation and its edge matching on half-edge labels."""

    vertices: Perm
    edges: Perm

    def __post_init__(self):
        if set(self.vertices.universe) != set(self.edges.universe):
            raise StructureError("vertex and edge permutations act on different labels")
        if not self.edges.is_matching():
            raise StructureError("edge permutation is not a fixed-point-free involution")

    @classmethod
    def from_faces(cls, phi: Perm, alpha: Perm) -> "HalfEdgeMap":
        """The map with face permutation ``phi`` and matching ``alpha``."""
        return cls(alpha.inverse() * phi.inverse(), alpha)

    def faces(self) -> Perm:
        return self.vertices.inverse() * self.edges.inverse()

    def as_hypermap(self) -> Hypermap:
        return Hypermap(self.vertices, self.edges)

    def is_connected(self) -> bool:
        return is_transitive([self.vertices, self.edges])

    def genus(self) -> int:
        return euler_genus(self.as_hypermap())

    def euler_characteristic(self) -> int:
        return self.vertices.num_cycles() - self.edges.num_cycles() + self.faces().num_cycles()

    @property
    def half_edges(self) -> Tuple[Label, ...]:
        return self.vertices.universe

    def to_json_obj(self) -> dict:
        return {"theta": str(self.vertices), "sigma": str(self.edges)}


# Suitably labelled maps ----------------------------------------------------

class SuitablyLabelledMap:
    """A map with integer vertex labels, stored per half-edge.

    Equality is literal on the permutations and the labels.
    """

    __slots__ = ("map", "labels", "_key")

    def __init__(self, m: HalfEdgeMap, labels: Dict[LabelLike, int]):
        self.map = m
        self.labels = {as_label(h): int(v) for h, v in labels.items()}
        if set(self.labels) != set(m.half_edges):
            raise StructureError("labels must cover every half-edge")
        for cyc in m.vertices.cycles():
            if len({self.labels[h] for h in cyc}) != 1:
                raise StructureError("labels differ around a vertex")
        self._key = None

    @classmethod
    def from_vertex_labels(cls, m: HalfEdgeMap, vertex_labels: Dict[Tuple[Label, ...], int]):
        labels = {}
        for cyc in m.vertices.cycles():
            for h in cyc:
                labels[h] = vertex_labels[cyc]
        return cls(m, labels)

    # structure
    def vertex_cycles(self) -> List[Tuple[Label, ...]]:
        return self.map.vertices.cycles()

    def vertex_of(self, h: LabelLike) -> Tuple[Label, ...]:
        h = as_label(h)
        cyc = self.map.vertices.cycle_of(h)
        k = cyc.index(min(cyc))
        return cyc[k:] + cyc[:k]

    def label(self, v) -> int:
        """Label of a vertex given as a cycle or as any of its half-edges."""
        h = v[0] if isinstance(v, tuple) else v
        return self.labels[as_label(h)]

    def neighbours(self, v: Tuple[Label, ...]) -> List[Tuple[Label, ...]]:
        return [self.vertex_of(self.map.edges(h)) for h in v]

    def is_suitable(self) -> bool:
        if min(self.labels.values()) != 0:
            return False
        return all(abs(self.labels[h] - self.labels[self.map.edges(h)]) <= 1
                   for h in self.map.half_edges)

    def frustrated_edges(self) -> List[Tuple[Label, Label]]:
        return [c for c in self.map.edges.cycles() if self.labels[c[0]] == self.labels[c[1]]]

    def local_minima(self) -> List[Tuple[Label, ...]]:
        """Vertices with no strictly smaller neighbour."""
        out = []
        for v in self.vertex_cycles():
            lv = self.labels[v[0]]
            if all(self.labels[self.map.edges(h)] >= lv for h in v):
                out.append(v)
        return out

    def non_minima(self) -> List[Tuple[Label, ...]]:
        mins = set(self.local_minima())
        return [v for v in self.vertex_cycles() if v not in mins]

    def distances_from(self, sources: Dict[Tuple[Label, ...], int]) -> Dict[Tuple[Label, ...], int]:
        """Least ``offset + graph distance`` over the given source vertices."""
        return vertex_distances(self, sources)

    def key(self):
        if self._key is None:
            self._key = (self.map.vertices, self.map.edges,
                         tuple(sorted(self.labels.items())))
        return self._key

    def __eq__(self, other):
        return isinstance(other, SuitablyLabelledMap) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_json_obj(self) -> dict:
        return {
            "theta": str(self.map.vertices),
            "sigma": str(self.map.edges),
            "labels": {"(" + ",".join(repr(h) for h in v) + ")": self.label(v)
                       for v in self.vertex_cycles()},
            "frustrated": ["(%r,%r)" % e for e in self.frustrated_edges()],
        }

    def __repr__(self):
        labs = ",".join(f"{self.label(v)}" for v in self.vertex_cycles())
        return f"SuitablyLabelledMap(V={self.map.vertices}, E={self.map.edges}, labels=[{labs}])"


def vertex_distances(m: SuitablyLabelledMap, sources: Dict[Tuple[Label, ...], int]):
    """Dijkstra over unit-weight edges seeded with per-source offsets."""
    import heapq
    dist: Dict[Tuple[Label, ...], int] = {}
    heap = [(d, v) for v, d in sources.items()]
    heapq.heapify(heap)
    while heap:
        d, v = heapq.heappop(heap)
        if v in dist:
            continue
        dist[v] = d
        for w in m.neighbours(v):
            if w not in dist:
                heapq.heappush(heap, (d + 1, w))
    return dist


# Flagged maps ---------------------------------------------------------------

@dataclass(frozen=True)
class FlaggedMap:
    tau: Perm
    rho: Perm
    mu: Perm
    point: Optional[Label] = None

    def __post_init__(self):
        u = set(self.tau.universe)
        if set(self.rho.universe) != u or set(self.mu.universe) != u:
            raise StructureError("the three matchings act on different flag sets")
        for name in ("tau", "rho", "mu"):
            if not getattr(self, name).is_matching():
                raise StructureError(f"{name} is not a fixed-point-free involution")

    @property
    def flags(self) -> Tuple[Label, ...]:
        return self.tau.universe

    def faces(self) -> Perm:
        return flagged_faces(self)

    def vertex_perm(self) -> Perm:
        return self.mu * self.tau

    def edge_perm(self) -> Perm:
        return self.tau * self.rho

    def counts(self) -> Tuple[int, int, int]:
        return (self.vertex_perm().num_cycles() // 2,
                self.edge_perm().num_cycles() // 2,
                self.faces().num_cycles() // 2)

    def is_connected(self) -> bool:
        return is_transitive([self.tau, self.rho, self.mu])

    def vertex_of(self, flag: LabelLike) -> frozenset:
        """A vertex as the set of its flags (orbit under ``mu`` and ``tau``)."""
        return _orbit_of(as_label(flag), [self.mu, self.tau])

    def vertices(self) -> List[frozenset]:
        seen, out = set(), []
        for f in self.flags:
            if f not in seen:
                v = self.vertex_of(f)
                seen |= v
                out.append(v)
        return out

    def with_point(self, point: Optional[LabelLike]) -> "FlaggedMap":
        return FlaggedMap(self.tau, self.rho, self.mu, None if point is None else as_label(point))

    def pointed_vertex(self) -> Optional[frozenset]:
        return None if self.point is None else self.vertex_of(self.point)

    def key(self):
        return (self.tau, self.rho, self.mu, self.pointed_vertex())

    def __eq__(self, other):
        return isinstance(other, FlaggedMap) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_json_obj(self) -> dict:
        obj = {"tau": str(self.tau), "rho": str(self.rho), "mu": str(self.mu)}
        if self.point is not None:
            obj["point"] = "(" + ",".join(repr(f) for f in sorted(self.pointed_vertex())) + ")"
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FlaggedMap":
        point = None
        if "point" in obj:
            body = obj["point"].strip("()").split(",")
            point = Label.parse(body[0])
        return cls(Perm.parse(obj["tau"]), Perm.parse(obj["rho"]), Perm.parse(obj["mu"]), point)


def _orbit_of(x: Label, gens: List[Perm]) -> frozenset:
    seen = {x}
    stack = [x]
    while stack:
        y = stack.pop()
        for g in gens:
            z = g(y)
            if z not in seen:
                seen.add(z)
                stack.append(z)
    return frozenset(seen)


def flagged_faces(fm: FlaggedMap) -> Perm:
    return fm.rho * fm.mu


def flagged_euler(fm: FlaggedMap) -> int:
    if not fm.is_connected():
        raise StructureError("flagged map is not connected")
    v, e, f = fm.counts()
    return v - e + f


def is_orientable(fm: FlaggedMap) -> bool:
    if not fm.is_connected():
        raise StructureError("flagged map is not connected")
    return len(orbits([fm.vertex_perm(), fm.edge_perm()])) == 2


# Orientation covering --------------------------------------------------------

def _single_cycle(cyc: Tuple[Label, ...]) -> Dict[Label, Label]:
    return {a: b for a, b in zip(cyc, cyc[1:] + cyc[:1])}


def verify_orientation_reversing(m: HalfEdgeMap, inv: Perm) -> Tuple[bool, List[str]]:
    """Check the two clauses; returns ``(ok, violated clause ids)``."""
    problems: List[str] = []
    if set(inv.universe) != set(m.half_edges) or not inv.is_matching():
        return False, ["matching"]
    phi, alpha, sigma = m.faces(), m.edges, m.vertices
    if phi * inv != inv * phi.inverse():
        problems.append("reverse-faces")
    if alpha * inv != inv * alpha.inverse():
        problems.append("reverse-edges")

    def twisted(c: Dict[Label, Label]) -> Dict[Label, Label]:
        # (inv c inv)^-1 as a map on inv(support)
        return {inv(b): inv(a) for a, b in c.items()}

    for cyc in phi.cycles():
        c = _single_cycle(cyc)
        if twisted(c) == c:
            problems.append("fixed-face")
            break
    for cyc in alpha.cycles():
        c = _single_cycle(cyc)
        if twisted(c) == c:
            problems.append("fixed-edge")
            break
    for cyc in sigma.cycles():
        c = _single_cycle(cyc)
        conj = {alpha(a): alpha(b) for a, b in c.items()}
        if twisted(c) == conj:
            problems.append("fixed-vertex")
            break
    return not problems, problems


def project_covering(m: HalfEdgeMap, inv: Perm, point: Optional[LabelLike] = None) -> FlaggedMap:
    ok, problems = verify_orientation_reversing(m, inv)
    if not ok:
        raise StructureError(f"matching is not orientation-reversing: {', '.join(problems)}")
    phi = m.faces()
    fm = FlaggedMap(m.edges * inv, inv, inv * phi)
    return fm.with_point(point)


def lift_flagged(fm: FlaggedMap) -> Tuple[HalfEdgeMap, Perm]:
    """The orientation covering: half-edges are flags, ``inv = rho``."""
    if is_orientable(fm):
        raise StructureError("an orientable map has a disconnected double cover")
    alpha = fm.tau * fm.rho
    phi = fm.rho * fm.mu
    m = HalfEdgeMap.from_faces(phi, alpha)
    return m, fm.rho
