"""Permutations on finite sets of labels, with barred labels.

Composition is right to left: ``(p * q)(x) == p(q(x))``.  When the two
factors live on different universes each is extended by the identity to
the union, so products of permutations on disjoint label sets are plain
disjoint products.
"""

from __future__ import annotations

import re
from functools import total_ordering
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple, Union


@total_ordering
class Label:
    """A positive integer, optionally barred.

    Unbarred labels sort before barred ones; ties are broken numerically.
    """

    __slots__ = ("index", "barred", "_key")

    def __init__(self, index: int, barred: bool = False):
        if index < 1:
            raise ValueError(f"label index must be positive, got {index}")
        self.index = int(index)
        self.barred = bool(barred)
        self._key = (self.barred, self.index)

    def bar(self) -> "Label":
        return Label(self.index, not self.barred)

    def __eq__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return not self.barred and self.index == other
        if not isinstance(other, Label):
            return NotImplemented
        return self._key == other._key

    def __lt__(self, other):
        if isinstance(other, int):
            other = Label(other)
        return self._key < other._key

    def __hash__(self):
        return hash(self._key) if self.barred else hash(self.index)

    def __repr__(self):
        return f"{self.index}'" if self.barred else str(self.index)

    @classmethod
    def parse(cls, text: str) -> "Label":
        text = text.strip()
        if text.endswith("'"):
            return cls(int(text[:-1]), True)
        return cls(int(text))


LabelLike = Union[Label, int, str]


def as_label(x: LabelLike) -> Label:
    if isinstance(x, Label):
        return x
    if isinstance(x, str):
        return Label.parse(x)
    return Label(x)


def bar(x: LabelLike) -> Label:
    return as_label(x).bar()


def bar_set(labels: Iterable[LabelLike]) -> frozenset:
    return frozenset(bar(x) for x in labels)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


class Perm:
    """Immutable bijection of a finite, sorted universe of labels."""

    __slots__ = ("_universe", "_image", "_cycles", "_hash")

    def __init__(self, mapping: Dict[LabelLike, LabelLike]):
        image = {as_label(k): as_label(v) for k, v in mapping.items()}
        if set(image.values()) != set(image):
            raise ValueError("mapping is not a bijection of its domain")
        self._universe = tuple(sorted(image))
        self._image = image
        self._cycles = None
        self._hash = None

    # construction ---------------------------------------------------------

    @classmethod
    def identity(cls, universe: Iterable[LabelLike]) -> "Perm":
        return cls({x: x for x in universe})

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[LabelLike]],
                    universe: Iterable[LabelLike] = ()) -> "Perm":
        mapping: Dict[Label, Label] = {as_label(x): as_label(x) for x in universe}
        seen = set()
        for cyc in cycles:
            cyc = [as_label(x) for x in cyc]
            for x in cyc:
                if x in seen:
                    raise ValueError(f"label {x!r} appears twice")
                seen.add(x)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                mapping[a] = b
        return cls(mapping)

    @classmethod
    def parse(cls, text: str, universe: Iterable[LabelLike] = ()) -> "Perm":
        """Parse cycle notation such as ``"(1,2)(3',4)"``."""
        stripped = re.sub(r"\s+", "", text)
        if _CYCLE_RE.sub("", stripped):
            raise ValueError(f"cannot parse permutation {text!r}")
        cycles = []
        for body in _CYCLE_RE.findall(stripped):
            if not body:
                continue
            cycles.append([Label.parse(t) for t in body.split(",")])
        return cls.from_cycles(cycles, universe)

    # basic access ---------------------------------------------------------

    @property
    def universe(self) -> Tuple[Label, ...]:
        return self._universe

    def __len__(self):
        return len(self._universe)

    def __call__(self, x: LabelLike) -> Label:
        return self._image[as_label(x)]

    def items(self):
        return self._image.items()

    def as_dict(self) -> Dict[Label, Label]:
        return dict(self._image)

    def cycles(self) -> List[Tuple[Label, ...]]:
        """Canonical cycles: each starts at its least label, sorted by it."""
        if self._cycles is None:
            out = []
            seen = set()
            for x in self._universe:
                if x in seen:
                    continue
                cyc = [x]
                seen.add(x)
                y = self._image[x]
                while y != x:
                    cyc.append(y)
                    seen.add(y)
                    y = self._image[y]
                out.append(tuple(cyc))
            self._cycles = out
        return self._cycles

    def cycle_of(self, x: LabelLike) -> Tuple[Label, ...]:
        x = as_label(x)
        cyc = [x]
        y = self._image[x]
        while y != x:
            cyc.append(y)
            y = self._image[y]
        return tuple(cyc)

    def num_cycles(self) -> int:
        return len(self.cycles())

    def length(self) -> int:
        """Minimal number of transpositions: ``#universe - #cycles``."""
        return len(self._universe) - self.num_cycles()

    def support(self) -> frozenset:
        return frozenset(x for x, y in self._image.items() if x != y)

    def cycle_type(self) -> Tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def is_identity(self) -> bool:
        return all(x == y for x, y in self._image.items())

    def is_matching(self) -> bool:
        return all(len(c) == 2 for c in self.cycles())

    # algebra --------------------------------------------------------------

    def __mul__(self, other: "Perm") -> "Perm":
        if self._universe == other._universe:
            return Perm({x: self._image[other._image[x]] for x in self._universe})
        universe = set(self._universe) | set(other._universe)
        a, b = self._image, other._image
        out = {}
        for x in universe:
            y = b.get(x, x)
            out[x] = a.get(y, y)
        return Perm(out)

    def inverse(self) -> "Perm":
        return Perm({y: x for x, y in self._image.items()})

    def __pow__(self, k: int) -> "Perm":
        base = self if k >= 0 else self.inverse()
        out = Perm.identity(self._universe)
        for _ in range(abs(k)):
            out = base * out
        return out

    def extend(self, universe: Iterable[LabelLike]) -> "Perm":
        """Extend by fixed points to a larger universe."""
        mapping = dict(self._image)
        for x in universe:
            mapping.setdefault(as_label(x), as_label(x))
        return Perm(mapping)

    def conjugate_by(self, relabel: Dict[Label, Label]) -> "Perm":
        """The permutation ``r p r^-1`` for a relabelling ``r``."""
        return Perm({relabel[x]: relabel[y] for x, y in self._image.items()})

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Perm):
            return NotImplemented
        return self._image == other._image

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._image.items()))
        return self._hash

    def __str__(self):
        if not self._universe:
            return "()"
        return "".join("(" + ",".join(repr(x) for x in c) + ")" for c in self.cycles())

    def __repr__(self):
        return f"Perm({str(self)!r})"


def jump(pi: Perm, subset: Iterable[LabelLike], j: LabelLike) -> int:
    """Least ``p >= 1`` with ``pi^p(j)`` back in ``subset``."""
    subset = frozenset(as_label(x) for x in subset)
    j = as_label(j)
    if j not in subset:
        raise ValueError(f"{j!r} is not in the subset")
    p, y = 1, pi(j)
    while y not in subset:
        y = pi(y)
        p += 1
    return p


def restriction(pi: Perm, subset: Iterable[LabelLike]) -> Perm:
    """The permutation induced on ``subset`` by following ``pi`` until it returns."""
    subset = frozenset(as_label(x) for x in subset)
    missing = subset - set(pi.universe)
    if missing:
        raise ValueError(f"labels {sorted(missing)} are outside the universe")
    out = {}
    for j in subset:
        y = pi(j)
        while y not in subset:
            y = pi(y)
        out[j] = y
    return Perm(out)


def orbits(gens: Sequence[Perm]) -> List[frozenset]:
    """Orbits of the group generated by ``gens`` (all on one universe)."""
    if not gens:
        return []
    universe = gens[0].universe
    for g in gens[1:]:
        if g.universe != universe:
            raise ValueError("generators act on different universes")
    parent = {x: x for x in universe}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for x, y in g.items():
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry
    blocks: Dict[Label, set] = {}
    for x in universe:
        blocks.setdefault(find(x), set()).add(x)
    return sorted((frozenset(b) for b in blocks.values()), key=min)


def is_transitive(gens: Sequence[Perm]) -> bool:
    return len(orbits(gens)) == 1


def enumerate_matchings(labels: Iterable[LabelLike]) -> Iterator[Perm]:
    """All fixed-point-free involutions of ``labels``.

    The least unmatched label is paired with each larger label in turn.
    """
    items = sorted(as_label(x) for x in labels)
    if len(items) % 2:
        return
    for pairs in _pairings(items):
        yield Perm.from_cycles(pairs)


def _pairings(items: List) -> Iterator[List[Tuple]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k, partner in enumerate(rest):
        remaining = rest[:k] + rest[k + 1:]
        for tail in _pairings(remaining):
            yield [(first, partner)] + tail


def count_by_length(n: int, i: int) -> int:
    """Number of permutations of ``[n]`` with length ``i``.

    A permutation factors uniquely as a product of transpositions
    ``(a_1, b_1)...(a_i, b_i)`` with ``a_k < b_k`` and ``b_1 < ... < b_i``;
    adding the element ``n`` either fixes it or appends one transposition
    ``(a, n)`` with ``n - 1`` choices for ``a``.
    """
    if n < 0 or i < 0:
        return 0
    row = [1]
    for m in range(1, n + 1):
        new = [0] * m
        for k, c in enumerate(row):
            if k < m:
                new[k] += c
            if k + 1 < m:
                new[k + 1] += c * (m - 1)
        row = new
    return row[i] if i < len(row) else 0


def bar_conjugate(sigma: Perm) -> Perm:
    """Mirror image: each cycle ``(u1,...,ud)`` becomes ``(ud',...,u1')``."""
    return Perm({y.bar(): x.bar() for x, y in sigma.items()})


def disjoint_product(*perms: Perm) -> Perm:
    mapping: Dict[Label, Label] = {}
    for p in perms:
        for x, y in p.items():
            if x in mapping:
                raise ValueError("universes overlap")
            mapping[x] = y
    return Perm(mapping)


def all_perms(labels: Iterable[LabelLike]) -> Iterator[Perm]:
    from itertools import permutations
    items = sorted(as_label(x) for x in labels)
    for img in permutations(items):
        yield Perm(dict(zip(items, img)))


def transpositions(labels: Iterable[LabelLike]) -> Iterator[Perm]:
    items = sorted(as_label(x) for x in labels)
    for a, b in combinations(items, 2):
        yield Perm.from_cycles([(a, b)], items)
