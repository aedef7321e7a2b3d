"""Motzkin bridges along a profile permutation and their compatible permutations.

A bridge assigns a height to each label so that following the profile
changes the height by -1, 0 or +1.  Heights are enumerated cycle by cycle
as closed walks and then glued with a global minimum of zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .perms import Label, LabelLike, Perm, _pairings, as_label


@dataclass(frozen=True)
class StepClasses:
    up: frozenset
    flat: frozenset
    down: frozenset


class MotzkinBridge:
    __slots__ = ("profile", "_heights")

    def __init__(self, profile: Perm, heights: Dict[LabelLike, int]):
        self.profile = profile
        self._heights = {as_label(k): int(v) for k, v in heights.items()}
        if set(self._heights) != set(profile.universe):
            raise ValueError("heights must be given on the whole profile universe")
        for i in profile.universe:
            if abs(self._heights[profile(i)] - self._heights[i]) > 1:
                raise ValueError(f"height jumps by more than one after {i!r}")

    @classmethod
    def from_sequence(cls, profile: Perm, heights: Sequence[int]) -> "MotzkinBridge":
        return cls(profile, dict(zip(profile.universe, heights)))

    def __call__(self, i: LabelLike) -> int:
        return self._heights[as_label(i)]

    @property
    def heights(self) -> Dict[Label, int]:
        return dict(self._heights)

    def as_tuple(self) -> Tuple[int, ...]:
        return tuple(self._heights[i] for i in self.profile.universe)

    def min(self) -> int:
        return min(self._heights.values())

    def max(self) -> int:
        return max(self._heights.values())

    def shifted(self, c: int) -> "MotzkinBridge":
        return MotzkinBridge(self.profile, {k: v + c for k, v in self._heights.items()})

    def __eq__(self, other):
        return (isinstance(other, MotzkinBridge) and self.profile == other.profile
                and self._heights == other._heights)

    def __hash__(self):
        return hash((self.profile, self.as_tuple()))

    def __str__(self):
        return ",".join(str(h) for h in self.as_tuple())

    def __repr__(self):
        return f"MotzkinBridge({str(self.profile)!r}, [{self}])"


def step_sets(gamma: MotzkinBridge) -> StepClasses:
    up, flat, down = set(), set(), set()
    theta = gamma.profile
    for i in theta.universe:
        d = gamma(theta(i)) - gamma(i)
        (up if d == 1 else flat if d == 0 else down).add(i)
    return StepClasses(frozenset(up), frozenset(flat), frozenset(down))


def _closed_walks(length: int, top: int) -> List[Tuple[int, ...]]:
    """Height sequences ``h_0..h_{length-1}`` in ``[0, top]`` with cyclic steps in {-1,0,1}."""
    out = []
    for start in range(top + 1):
        seq = [start]

        def rec(pos):
            if pos == length:
                if abs(seq[-1] - start) <= 1:
                    out.append(tuple(seq))
                return
            last = seq[-1]
            remaining = length - pos
            for h in (last - 1, last, last + 1):
                # the walk must be able to come back to ``start``
                if 0 <= h <= top and abs(h - start) <= remaining:
                    seq.append(h)
                    rec(pos + 1)
                    seq.pop()

        rec(1)
    return out


def bridge_height_tuples(theta: Perm, top: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Height tuples (in universe order) of min-zero bridges with max at most ``top``.

    ``top`` defaults to half the size of the universe: a configuration
    whose profile and compatible permutation act transitively crosses
    every level with at least one down-step, so higher bridges never
    contribute.
    """
    k = len(theta)
    if top is None:
        top = k // 2
    index = {x: n for n, x in enumerate(theta.universe)}
    cycles = theta.cycles()
    walks = [_closed_walks(len(c), top) for c in cycles]
    heights = [0] * k
    for choice in product(*walks):
        if min(min(w) for w in choice) != 0:
            continue
        for cyc, w in zip(cycles, choice):
            for x, h in zip(cyc, w):
                heights[index[x]] = h
        yield tuple(heights)


def enumerate_bridges(theta: Perm, zero_min: bool = True,
                      top: Optional[int] = None) -> Iterator[MotzkinBridge]:
    """Bridges with minimum zero and heights bounded by ``top`` (default ``k // 2``).

    With ``zero_min`` false, every vertical shift that keeps the heights
    inside ``[0, top]`` is produced as well.
    """
    k = len(theta)
    if top is None:
        top = k // 2
    for hs in bridge_height_tuples(theta, top):
        base = MotzkinBridge.from_sequence(theta, hs)
        if zero_min:
            yield base
        else:
            for c in range(top - max(hs) + 1):
                yield base.shifted(c)


def _level_groups(gamma: MotzkinBridge, labels) -> Dict[int, List[Label]]:
    groups: Dict[int, List[Label]] = {}
    for i in sorted(labels):
        groups.setdefault(gamma(i), []).append(i)
    return groups


def compatible_perms(gamma: MotzkinBridge) -> Iterator[Perm]:
    """Every permutation compatible with ``gamma``.

    Identity on up-steps, any permutation of each level of down-steps, a
    perfect matching of each level of flat steps.
    """
    steps = step_sets(gamma)
    down_groups = list(_level_groups(gamma, steps.down).values())
    flat_groups = list(_level_groups(gamma, steps.flat).values())
    if any(len(g) % 2 for g in flat_groups):
        return
    factors = []
    for g in down_groups:
        factors.append([dict(zip(g, img)) for img in permutations(g)])
    for g in flat_groups:
        opts = []
        for pairs in _pairings(g):
            m = {}
            for a, b in pairs:
                m[a], m[b] = b, a
            opts.append(m)
        factors.append(opts)
    base = {i: i for i in steps.up}
    for parts in product(*factors):
        mapping = dict(base)
        for part in parts:
            mapping.update(part)
        yield Perm(mapping)


def is_compatible(gamma: MotzkinBridge, sigma: Perm) -> bool:
    if set(sigma.universe) != set(gamma.profile.universe):
        return False
    steps = step_sets(gamma)
    for i in sigma.universe:
        j = sigma(i)
        if gamma(j) != gamma(i):
            return False
        if i in steps.up and j != i:
            return False
        if i in steps.down and j not in steps.down:
            return False
        if i in steps.flat and (j == i or j not in steps.flat or sigma(j) != i):
            return False
    return True


def compatible_count(gamma: MotzkinBridge) -> int:
    """Size of the compatible set from local times: product of ``(t-1)!!`` and ``t!``."""
    from math import factorial
    steps = step_sets(gamma)
    total = 1
    for g in _level_groups(gamma, steps.flat).values():
        t = len(g)
        if t % 2:
            return 0
        total *= _double_factorial(t - 1)
    for g in _level_groups(gamma, steps.down).values():
        total *= factorial(len(g))
    return total


def _double_factorial(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


# Fast integer path used by the exact cumulant sums -------------------------

def _level_perm_options(levels: Dict[int, List[int]], matching: bool):
    opts = []
    for g in levels.values():
        if matching:
            if len(g) % 2:
                return None
            choices = []
            for pairs in _pairings(g):
                m = []
                for a, b in pairs:
                    m.append((a, b))
                    m.append((b, a))
                choices.append(m)
        else:
            choices = [list(zip(g, img)) for img in permutations(g)]
        opts.append(choices)
    return opts


def configurations(theta_images: Sequence[int], heights: Sequence[int]):
    """Compatible permutations for integer data, as image lists.

    ``theta_images[i]`` is the image of position ``i``; ``heights`` are the
    bridge heights by position.  Yields ``(sigma, down_positions)``.
    """
    k = len(theta_images)
    down_levels: Dict[int, List[int]] = {}
    flat_levels: Dict[int, List[int]] = {}
    down = []
    for i in range(k):
        d = heights[theta_images[i]] - heights[i]
        if d == 0:
            flat_levels.setdefault(heights[i], []).append(i)
        elif d == -1:
            down_levels.setdefault(heights[i], []).append(i)
            down.append(i)
    flat_opts = _level_perm_options(flat_levels, True)
    if flat_opts is None:
        return
    down_opts = _level_perm_options(down_levels, False)
    for parts in product(*down_opts, *flat_opts):
        sigma = list(range(k))
        for part in parts:
            for a, b in part:
                sigma[a] = b
        yield sigma, down
