"""Bridge configurations, well-labelled hypermaps and suitably labelled maps.

Conventions: every cycle lists half-edges (or edges) clockwise around its
vertex, faces are ``theta^-1 sigma^-1``, and walking counterclockwise
from white corner ``i`` inside a face reaches corner ``sigma theta (i)``.

The intermediate map with frustrated edges doubled is encoded on
``I`` plus its barred copy: the decreasing half-edge created at corner
``i`` carries the label ``i`` and its counterpart carries ``i'``.
"""

from __future__ import annotations

from collections import Counter
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from .maps import HalfEdgeMap, Hypermap, StructureError, SuitablyLabelledMap
from .motzkin import MotzkinBridge, compatible_perms, enumerate_bridges, step_sets
from .perms import Label, LabelLike, Perm, as_label, is_transitive, jump, restriction


class WellLabelledHypermap:
    """A hypermap on edge labels ``I`` with labelled white vertices.

    ``labels[i]`` is the label of the white vertex holding edge ``i``;
    ``frustrated`` is the set of edges on marked white vertices.
    """

    __slots__ = ("hypermap", "labels", "frustrated", "_key")

    def __init__(self, hypermap: Hypermap, labels: Dict[LabelLike, int],
                 frustrated: Iterable[LabelLike] = ()):
        self.hypermap = hypermap
        self.labels = {as_label(k): int(v) for k, v in labels.items()}
        self.frustrated = frozenset(as_label(x) for x in frustrated)
        if set(self.labels) != set(hypermap.theta.universe):
            raise StructureError("white labels must be given for every edge")
        sigma = hypermap.sigma
        for cyc in sigma.cycles():
            if len({self.labels[i] for i in cyc}) != 1:
                raise StructureError("edges of one white vertex carry different labels")
            marked = {i in self.frustrated for i in cyc}
            if len(marked) != 1:
                raise StructureError("frustration must mark whole white vertices")
        self._key = None

    @property
    def theta(self) -> Perm:
        return self.hypermap.theta

    @property
    def sigma(self) -> Perm:
        return self.hypermap.sigma

    @property
    def edges(self) -> Tuple[Label, ...]:
        return self.hypermap.theta.universe

    def faces(self) -> Perm:
        return self.hypermap.faces()

    def white_vertices(self) -> List[Tuple[Label, ...]]:
        return self.sigma.cycles()

    def black_vertices(self) -> List[Tuple[Label, ...]]:
        return self.theta.cycles()

    def label(self, i: LabelLike) -> int:
        return self.labels[as_label(i)]

    def problems(self) -> List[str]:
        """Violated clauses of the well-labelled definition (empty when valid)."""
        out = []
        if not self.labels:
            return ["empty"]
        if min(self.labels.values()) != 1:
            out.append("min-label")
        th = self.theta
        for i in self.edges:
            if self.labels[th(i)] < self.labels[i] - 1:
                out.append("clockwise-drop")
                break
        for cyc in self.white_vertices():
            if cyc[0] not in self.frustrated:
                continue
            if len(cyc) != 2:
                out.append("frustrated-degree")
                break
            lw = self.labels[cyc[0]]
            if any(self.labels[th.inverse()(i)] > lw for i in cyc):
                out.append("frustrated-mark")
                break
        return out

    def membership_problems(self, theta: Perm) -> List[str]:
        """Clauses of membership in the class attached to ``theta``."""
        out = self.problems()
        I = set(self.edges)
        if not I <= set(theta.universe):
            return out + ["edge-set"]
        if self.theta != restriction(theta, I):
            out.append("black-restriction")
        for i in self.edges:
            j = self.theta(i)
            lhs = self.labels[j]
            # a frustrated target sits one above its bridge height
            rhs = self.labels[i] + jump(theta, I, i) - 2 + (j in self.frustrated)
            if lhs != rhs:
                out.append("label-jump")
                break
        return out

    def key(self):
        if self._key is None:
            self._key = (self.theta, self.sigma, tuple(sorted(self.labels.items())),
                         tuple(sorted(self.frustrated)))
        return self._key

    def __eq__(self, other):
        return isinstance(other, WellLabelledHypermap) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_json_obj(self) -> dict:
        return {
            "theta": str(self.theta),
            "sigma": str(self.sigma),
            "labels": {"(" + ",".join(repr(i) for i in w) + ")": self.labels[w[0]]
                       for w in self.white_vertices()},
            "frustrated": ["(" + ",".join(repr(i) for i in w) + ")"
                           for w in self.white_vertices() if w[0] in self.frustrated],
        }

    def __repr__(self):
        return f"WellLabelledHypermap(theta={self.theta}, sigma={self.sigma})"


# Configurations <-> hypermaps -----------------------------------------------------

def configurations(theta: Perm) -> Iterator[Tuple[MotzkinBridge, Perm]]:
    """Every ``(gamma, sigma)`` with min-zero bridge, compatible ``sigma``, transitive pair."""
    for gamma in enumerate_bridges(theta):
        for sigma in compatible_perms(gamma):
            if is_transitive([theta, sigma]):
                yield gamma, sigma


def hypermap_from_config(gamma: MotzkinBridge, sigma: Perm) -> WellLabelledHypermap:
    theta = gamma.profile
    if not is_transitive([theta, sigma]):
        raise StructureError("profile and permutation do not act transitively")
    steps = step_sets(gamma)
    kept = steps.down | steps.flat
    theta_h = restriction(theta, kept)
    sigma_h = Perm({i: sigma(i) for i in kept})
    labels = {i: gamma(i) + (i in steps.flat) for i in kept}
    return WellLabelledHypermap(Hypermap(theta_h, sigma_h), labels, steps.flat)


def config_from_hypermap(h: WellLabelledHypermap, theta: Perm) -> Tuple[MotzkinBridge, Perm]:
    bad = h.membership_problems(theta)
    if bad:
        raise StructureError("hypermap is not in the class of theta: " + ", ".join(bad))
    I = set(h.edges)
    heights: Dict[Label, int] = {}
    for u in h.edges:
        heights[u] = h.labels[u] - (u in h.frustrated)
        x = theta(u)
        step = 1
        while x not in I:
            heights[x] = h.labels[u] - 2 + step
            x = theta(x)
            step += 1
    sigma = h.sigma.extend(theta.universe)
    return MotzkinBridge(theta, heights), sigma


# Forward construction ---------------------------------------------------------------

def _successors(h: WellLabelledHypermap) -> Dict[Label, Optional[Label]]:
    """Successor corner of each white corner, ``None`` for a face minimum."""
    ccw = h.sigma * h.theta
    face = h.faces()
    out: Dict[Label, Optional[Label]] = {}
    for cyc in face.cycles():
        low = min(h.labels[i] for i in cyc)
        for i in cyc:
            target = h.labels[i] - 1
            if h.labels[i] == low:
                out[i] = None
                continue
            j = ccw(i)
            while h.labels[j] != target:
                j = ccw(j)
            out[i] = j
    return out


def doubled_map(h: WellLabelledHypermap) -> SuitablyLabelledMap:
    """The map built face by face from ``h``, frustrated vertices kept.

    Decreasing half-edge ``i`` leaves corner ``i``; its counterpart ``i'``
    lands in the successor corner, or at the new vertex of the face.
    """
    face = h.faces()
    succ = _successors(h)
    arrivals: Dict[Label, List[Label]] = {i: [] for i in h.edges}
    for i, j in succ.items():
        if j is not None:
            arrivals[j].append(i)
    rotation: Dict[Label, Label] = {}
    labels: Dict[Label, int] = {}

    def close(cycle: List[Label], lab: int):
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            rotation[a] = b
        for a in cycle:
            labels[a] = lab

    for w in h.white_vertices():
        cycle: List[Label] = []
        for i in w:
            # arrivals nearer clockwise in the face come first
            dist = {}
            j, d = i, 0
            while len(dist) < len(arrivals[i]):
                if j in arrivals[i]:
                    dist[j] = d
                j = face(j)
                d += 1
            cycle.extend(j.bar() for j in sorted(arrivals[i], key=dist.get))
            cycle.append(i)
        close(cycle, h.labels[w[0]])
    for f in face.cycles():
        low = min(h.labels[i] for i in f)
        close([i.bar() for i in f if succ[i] is None], low - 1)
    alpha = Perm({x: (x.bar()) for x in rotation})
    return SuitablyLabelledMap(HalfEdgeMap(Perm(rotation), alpha), labels)


def _increasing_label(mhat: SuitablyLabelledMap, theta: Perm, x: Label) -> Label:
    phi_inv = mhat.map.faces().inverse()
    k, y = 1, phi_inv(x)
    while y.barred:
        k += 1
        y = phi_inv(y)
    return (theta ** k)(y)


def remove_frustrated(mhat: SuitablyLabelledMap, theta: Perm,
                      frustrated: FrozenSet[Label]) -> SuitablyLabelledMap:
    """Relabel counterparts and splice out the degree-2 frustrated vertices."""
    rename: Dict[Label, Label] = {}
    for x in mhat.map.half_edges:
        if not x.barred:
            if x not in frustrated:
                rename[x] = x
        elif x.bar() not in frustrated:
            rename[x] = _increasing_label(mhat, theta, x)
    V = mhat.map.vertices
    for cyc in V.cycles():
        if cyc[0].barred or cyc[0] not in frustrated:
            continue
        if len(cyc) != 2:
            raise StructureError("a frustrated vertex must have degree 2")
        i1, i2 = cyc
        rename[i1.bar()] = i2
        rename[i2.bar()] = i1
    rotation = {rename[x]: rename[V(x)] for x in rename}
    alpha = {}
    for x in rename:
        y = mhat.map.edges(x)
        if y in rename:
            alpha[rename[x]] = rename[y]
        else:
            # y sits on a frustrated vertex: jump across it
            other = V(y)
            alpha[rename[x]] = rename[other.bar()]
    labels = {rename[x]: mhat.labels[x] for x in rename}
    return SuitablyLabelledMap(HalfEdgeMap(Perm(rotation), Perm(alpha)), labels)


def bfg_forward(h: WellLabelledHypermap, theta: Optional[Perm] = None) -> SuitablyLabelledMap:
    """The suitably labelled map of ``h``; its faces are ``theta``.

    ``theta`` defaults to the black permutation of ``h``, which is right
    when no edge was dropped.
    """
    if theta is None:
        theta = h.theta
    mhat = doubled_map(h)
    return remove_frustrated(mhat, theta, h.frustrated)


# Inverse construction ---------------------------------------------------------------

def duplicate_frustrated(m: SuitablyLabelledMap) -> Tuple[SuitablyLabelledMap, FrozenSet[Label]]:
    """Insert a vertex one above each frustrated edge and rename counterparts.

    Returns the doubled map and the labels now sitting on inserted vertices.
    """
    alpha, V = m.map.edges, m.map.vertices
    rename: Dict[Label, Label] = {}
    flat = set()
    for x in m.map.half_edges:
        y = alpha(x)
        d = m.labels[y] - m.labels[x]
        if d == -1:
            rename[x] = x
        elif d == 1:
            rename[x] = y.bar()
        else:
            # inserted vertex carries the swapped labels
            rename[x] = y.bar()
            flat.add(x)
    rotation = {rename[x]: rename[V(x)] for x in m.map.half_edges}
    labels = {rename[x]: m.labels[x] for x in m.map.half_edges}
    for a, b in (c for c in alpha.cycles() if c[0] in flat):
        rotation[a], rotation[b] = b, a
        labels[a] = labels[b] = m.labels[a] + 1
    edges = Perm({x: x.bar() for x in rotation})
    mhat = SuitablyLabelledMap(HalfEdgeMap(Perm(rotation), edges), labels)
    return mhat, frozenset(flat)


def bfg_inverse(m: SuitablyLabelledMap) -> WellLabelledHypermap:
    """Black vertex per face, joined to the decreasing half-edges along it."""
    mhat, flat = duplicate_frustrated(m)
    I = [x for x in mhat.map.half_edges if not x.barred]
    theta_h = restriction(mhat.map.faces(), I)
    sigma_h = restriction(mhat.map.vertices, I)
    labels = {i: mhat.labels[i] for i in I}
    return WellLabelledHypermap(Hypermap(theta_h, sigma_h), labels, flat)


def psi(gamma: MotzkinBridge, sigma: Perm) -> SuitablyLabelledMap:
    h = hypermap_from_config(gamma, sigma)
    return bfg_forward(h, gamma.profile)


def psi_inverse(m: SuitablyLabelledMap, theta: Optional[Perm] = None) -> Tuple[MotzkinBridge, Perm]:
    if theta is None:
        theta = m.map.faces()
    return config_from_hypermap(bfg_inverse(m), theta)


# Distances and types ---------------------------------------------------------------------

def distances(m: SuitablyLabelledMap) -> Dict[Tuple[Label, ...], int]:
    """``d_v`` on non-minimum vertices, checked against the labels."""
    mins = m.local_minima()
    dist = m.distances_from({v: m.label(v) for v in mins})
    mins = set(mins)
    out = {v: dist[v] for v in m.vertex_cycles() if v not in mins}
    for v, d in out.items():
        if d != m.label(v):
            raise StructureError(f"vertex {v} has label {m.label(v)} but distance {d}")
    return out


def lower_completion(cw: Sequence[int]) -> Tuple[int, ...]:
    """Insert ``i-1, ..., j-1`` after each entry ``i`` followed by ``j >= i``."""
    cw = list(cw)
    out: List[int] = []
    for a, b in zip(cw, cw[1:] + cw[:1]):
        out.append(a)
        if a <= b:
            out.extend(range(a - 1, b))
    return tuple(out)


def black_cw_type(h: WellLabelledHypermap, b: Sequence[Label]) -> Tuple[int, ...]:
    return tuple(h.labels[i] for i in b)


def face_cw_type(m: SuitablyLabelledMap, f: Sequence[Label]) -> Tuple[int, ...]:
    return tuple(m.labels[x] for x in f)


def same_cyclic(a: Sequence[int], b: Sequence[int]) -> bool:
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        return False
    if not a:
        return True
    return any(a[k:] + a[:k] == b for k in range(len(a)))


# Correspondence checks ----------------------------------------------------------------------

def pi_cycles(m: SuitablyLabelledMap) -> Tuple[Dict[Tuple[Label, ...], Tuple[Label, ...]],
                                                List[Tuple[Label, Label]]]:
    """Per non-minimum vertex, its half-edges toward smaller labels in rotation order;
    and the frustrated edges."""
    alpha = m.map.edges
    per_vertex = {}
    for v in m.non_minima():
        lv = m.label(v)
        per_vertex[v] = tuple(x for x in v if m.labels[alpha(x)] < lv)
    return per_vertex, m.frustrated_edges()


def bfg_problems(h: WellLabelledHypermap, gamma: Optional[MotzkinBridge] = None,
                 sigma: Optional[Perm] = None, theta: Optional[Perm] = None) -> List[str]:
    """Every correspondence promised between ``h``, its doubled map and final map."""
    out: List[str] = []
    theta = theta if theta is not None else (gamma.profile if gamma is not None else h.theta)
    mhat = doubled_map(h)
    m = remove_frustrated(mhat, theta, h.frustrated)
    if m.map.faces() != theta:
        out.append("faces")
    if not m.is_suitable() or not mhat.is_suitable():
        out.append("suitable")
    try:
        distances(m)
    except StructureError:
        out.append("distance")
    # white vertices <-> non-minima of the doubled map, same label
    mins_hat = set(mhat.local_minima())
    whites = {tuple(w) for w in h.white_vertices()}
    for v in mhat.vertex_cycles():
        unbarred = tuple(x for x in v if not x.barred)
        if v in mins_hat:
            if unbarred:
                out.append("minimum-has-corner")
                break
        else:
            w = h.sigma.cycle_of(unbarred[0]) if unbarred else None
            if w is None or set(w) != set(unbarred) or mhat.label(v) != h.labels[w[0]]:
                out.append("white-vertex")
                break
    if len(mhat.vertex_cycles()) - len(mins_hat) != len(whites):
        out.append("white-count")
    # local maxima agree
    face = h.faces()
    for w in h.white_vertices():
        lw = h.labels[w[0]]
        white_max = all(h.labels[face(i)] <= lw for i in w)
        v = mhat.vertex_of(w[0])
        map_max = all(mhat.labels[mhat.map.edges(x)] <= lw for x in v)
        if white_max != map_max:
            out.append("local-maximum")
            break
    # faces of h <-> local minima labelled one below the face minimum
    if len(face.cycles()) != len(mins_hat):
        out.append("minimum-count")
    for f in face.cycles():
        low = min(h.labels[i] for i in f)
        ends = [i.bar() for i in f if low == h.labels[i]]
        v = mhat.vertex_of(ends[0])
        if v not in mins_hat or mhat.label(v) != low - 1:
            out.append("face-minimum")
            break
    # black cw-types complete to face cw-types
    phi_hat = mhat.map.faces()
    for b in h.black_vertices():
        fcyc = phi_hat.cycle_of(b[0])
        if not same_cyclic(lower_completion(black_cw_type(h, b)), face_cw_type(mhat, fcyc)):
            out.append("cw-type")
            break
    # permutation bullets on the final map
    if gamma is not None and sigma is not None:
        for x in theta.universe:
            if m.label(x) != gamma(x):
                out.append("label-is-height")
                break
        per_vertex, flat = pi_cycles(m)
        steps = step_sets(gamma)
        down_cycles = {frozenset(c) for c in sigma.cycles() if c[0] in steps.down}
        for v, pv in per_vertex.items():
            if not pv or not same_cycle(sigma, pv):
                out.append("vertex-cycle")
                break
            if frozenset(pv) not in down_cycles or m.label(v) != gamma(pv[0]):
                out.append("vertex-cycle")
                break
        for a, b in flat:
            if sigma(a) != b or a not in steps.flat:
                out.append("frustrated-cycle")
                break
        cycles = [pv for pv in per_vertex.values()] + [tuple(e) for e in flat]
        rebuilt = Perm.from_cycles(cycles, theta.universe)
        if rebuilt != sigma:
            out.append("sigma-product")
    return out


def same_cycle(perm: Perm, cyc: Sequence[Label]) -> bool:
    """Whether ``cyc`` is a cycle of ``perm`` up to rotation."""
    cyc = tuple(cyc)
    got = perm.cycle_of(cyc[0])
    return got == cyc


def verify_theta(theta: Perm, reference: Optional[Iterable[SuitablyLabelledMap]] = None) -> Counter:
    """Run every check on all configurations of ``theta``.

    Keys ending in ``-fail`` count failures; ``configurations`` and ``images``
    count objects.  With ``reference`` the image set must equal it exactly.
    """
    tally: Counter = Counter()
    images = set()
    for gamma, sigma in configurations(theta):
        tally["configurations"] += 1
        h = hypermap_from_config(gamma, sigma)
        for problem in bfg_problems(h, gamma, sigma, theta):
            tally[problem + "-fail"] += 1
        m = psi(gamma, sigma)
        images.add(m)
        if psi_inverse(m, theta) != (gamma, sigma):
            tally["config-roundtrip-fail"] += 1
        if bfg_inverse(m) != h:
            tally["hypermap-roundtrip-fail"] += 1
    tally["images"] = len(images)
    if len(images) != tally["configurations"]:
        tally["injective-fail"] += 1
    if reference is not None and images != set(reference):
        tally["reference-fail"] += 1
    return tally
