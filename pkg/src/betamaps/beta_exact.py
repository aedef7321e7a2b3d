"""Exact joint moments and cumulants of power-sum traces of the beta ensemble.

Results are :class:`BivariatePoly` objects in ``N`` and ``u = 2/beta``.
The cumulant of a profile is a sum over pairs (bridge, compatible
permutation) that act transitively; shifting each bridge to every
admissible height and summing the resulting products with Faulhaber's
formula turns it into a polynomial in ``N``.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

from .motzkin import bridge_height_tuples, configurations
from .perms import Perm, count_by_length
from .poly import BivariatePoly

Profile = Tuple[int, ...]


def as_profile(parts: Iterable[int]) -> Profile:
    parts = tuple(int(p) for p in parts)
    if not parts or any(p < 1 for p in parts):
        raise ValueError(f"a profile is a nonempty list of positive integers, got {parts}")
    return parts


def theta_of_profile(parts: Iterable[int]) -> Perm:
    """The block-cycle permutation ``(1..k1)(k1+1..k1+k2)...``."""
    parts = as_profile(parts)
    cycles, start = [], 1
    for k in parts:
        cycles.append(list(range(start, start + k)))
        start += k
    return Perm.from_cycles(cycles)


# Bernoulli numbers and power sums ------------------------------------------

@lru_cache(maxsize=None)
def bernoulli(r: int) -> Fraction:
    """``B_r`` from ``sum_{k<=n} C(n+1,k) (-1)^k B_k = [n == 0]``; gives ``B_1 = +1/2``."""
    if r < 0:
        raise ValueError("index must be nonnegative")
    if r == 0:
        return Fraction(1)
    acc = sum(comb(r + 1, k) * (-1) ** k * bernoulli(k) for k in range(r))
    return -acc / (comb(r + 1, r) * (-1) ** r)


@lru_cache(maxsize=None)
def faulhaber_sum(u_exp: int) -> BivariatePoly:
    """``sum_{h=1}^N h^u_exp`` as a polynomial in ``N``."""
    terms = {}
    for r in range(u_exp + 1):
        s = u_exp - r
        terms[(s + 1, 0)] = comb(r + s, r) * bernoulli(r) / (s + 1)
    return BivariatePoly(terms)


def gaussian_moment(k: int) -> int:
    if k % 2:
        return 0
    out = 1
    for m in range(k - 1, 0, -2):
        out *= m
    return out


def chi_even_moment(n: int, alpha=None):
    """``E[(X/sqrt 2)^(2n)]`` for ``X`` chi-distributed with parameter ``alpha``.

    Without ``alpha`` the result is the coefficient list of the polynomial
    in ``alpha/2``; the sum over permutations by cycle count and the rising
    factorial are both formed and must agree.
    """
    if n < 1:
        raise ValueError("n must be positive")
    by_cycles = [Fraction(0)] * (n + 1)
    for i in range(n):
        by_cycles[n - i] += count_by_length(n, i)
    rising = [Fraction(1)]
    for i in range(1, n + 1):
        nxt = [Fraction(0)] * (len(rising) + 1)
        for d, c in enumerate(rising):
            nxt[d + 1] += c
            nxt[d] += c * (i - 1)
        rising = nxt
    if by_cycles != rising:
        raise AssertionError("cycle-count sum and rising factorial disagree")
    if alpha is None:
        return by_cycles
    x = Fraction(alpha) / 2
    return sum(c * x ** d for d, c in enumerate(by_cycles))


# Configuration sums ---------------------------------------------------------

def _elementary(values: Sequence[int]) -> List[int]:
    e = [1]
    for v in values:
        nxt = e + [0]
        for q in range(len(e), 0, -1):
            nxt[q] += nxt[q - 1] * v
        e = nxt
    return e


def _theta_data(theta: Perm):
    index = {x: n for n, x in enumerate(theta.universe)}
    images = [index[theta(x)] for x in theta.universe]
    cycle_id = [0] * len(images)
    for c, cyc in enumerate(theta.cycles()):
        for x in cyc:
            cycle_id[index[x]] = c
    return images, cycle_id, theta.num_cycles()


def _connected(sigma: List[int], cycle_id: List[int], ncycles: int) -> bool:
    if ncycles == 1:
        return True
    parent = list(range(ncycles))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    comps = ncycles
    for i, j in enumerate(sigma):
        a, b = find(cycle_id[i]), find(cycle_id[j])
        if a != b:
            parent[a] = b
            comps -= 1
            if comps == 1:
                return True
    return comps == 1


def _bracket_chunk(args) -> Dict[Tuple[int, int], int]:
    images, cycle_id, ncycles, chunk = args
    k = len(images)
    table: Dict[Tuple[int, int], int] = {}
    for heights in chunk:
        for sigma, down in configurations(images, heights):
            if not _connected(sigma, cycle_id, ncycles):
                continue
            seen = [False] * k
            ncyc = 0
            down_heights = []
            for i in range(k):
                if seen[i]:
                    continue
                ncyc += 1
                j = i
                while not seen[j]:
                    seen[j] = True
                    j = sigma[j]
            for i in down:
                seen[i] = False
            for i in down:
                if seen[i]:
                    continue
                down_heights.append(heights[i])
                j = i
                while not seen[j]:
                    seen[j] = True
                    j = sigma[j]
            p = k - ncyc
            for q, e in enumerate(_elementary(down_heights)):
                if e:
                    table[(p, q)] = table.get((p, q), 0) + e
    return table


@lru_cache(maxsize=None)
def _bracket_table_cached(theta_text: str, threads: int) -> Tuple[Tuple[Tuple[int, int], int], ...]:
    theta = Perm.parse(theta_text)
    images, cycle_id, ncycles = _theta_data(theta)
    bridges = list(bridge_height_tuples(theta))
    if threads <= 1 or len(bridges) < 64:
        partials = [_bracket_chunk((images, cycle_id, ncycles, bridges))]
    else:
        chunks = [bridges[i::threads] for i in range(threads)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(_bracket_chunk,
                                     [(images, cycle_id, ncycles, c) for c in chunks]))
    total: Dict[Tuple[int, int], int] = {}
    for part in partials:
        for key, v in part.items():
            total[key] = total.get(key, 0) + v
    return tuple(sorted(total.items()))


def bracket_table(theta: Perm, threads: int = 1) -> Dict[Tuple[int, int], int]:
    """All nonzero ``<e_q>_{theta,p}`` keyed by ``(p, q)``."""
    return dict(_bracket_table_cached(str(theta), max(1, int(threads))))


def bracket(theta: Perm, p: int, q: int) -> int:
    """Sum of ``e_q`` of the down-cycle heights over transitive configurations with ``|sigma| = p``."""
    if len(theta) % 2:
        raise ValueError("the profile permutation must act on an even number of labels")
    if p < 0 or q < 0 or p > len(theta) // 2:
        raise ValueError("p must lie in [0, n/2] and q must be nonnegative")
    return bracket_table(theta).get((p, q), 0)


def cumulant_terms(theta: Perm, threads: int = 1) -> Dict[Tuple[int, int, int, int], Fraction]:
    """Coefficient of ``u^p N^(s+1)`` for each ``(p, q, r, s)`` with ``p+q+r+s = n/2``."""
    n = len(theta)
    if n % 2:
        return {}
    half = n // 2
    out: Dict[Tuple[int, int, int, int], Fraction] = {}
    for (p, q), value in bracket_table(theta, threads).items():
        power = half - p - q
        for r in range(power + 1):
            s = power - r
            c = (-1) ** q * value * comb(r + s, r) * bernoulli(r) / (s + 1)
            if c:
                out[(p, q, r, s)] = c
    return out


def cumulant_of_theta(theta: Perm, threads: int = 1) -> BivariatePoly:
    out: Dict[Tuple[int, int], Fraction] = {}
    for (p, q, r, s), c in cumulant_terms(theta, threads).items():
        out[(s + 1, p)] = out.get((s + 1, p), 0) + c
    return BivariatePoly(out)


def cumulant_exact(parts: Iterable[int], threads: int = 1) -> BivariatePoly:
    """Joint cumulant of ``Tr T^k1, ..., Tr T^kl``."""
    parts = as_profile(parts)
    return _cumulant_sorted(tuple(sorted(parts)), max(1, int(threads)))


@lru_cache(maxsize=None)
def _cumulant_sorted(parts: Profile, threads: int) -> BivariatePoly:
    return cumulant_of_theta(theta_of_profile(parts), threads)


def cumulant_expansion(parts: Iterable[int], threads: int = 1) -> List[Tuple[int, BivariatePoly]]:
    """Coefficients of ``kappa / (u^(l-1) N^(n/2-l+2))`` in powers of ``1/N``.

    Entry ``(v, c)`` means ``c(u) N^(-v)``.
    """
    parts = as_profile(parts)
    n, l = sum(parts), len(parts)
    if n % 2:
        return []
    kappa = cumulant_exact(parts, threads)
    top = n // 2 - l + 2
    out = []
    for v in range(0, top + 1):
        coeff = kappa.coeff_N(top - v)
        if coeff:
            out.append((v, coeff.shift_u(-(l - 1))))
    return out


def reassemble_expansion(parts: Iterable[int], expansion: List[Tuple[int, BivariatePoly]]) -> BivariatePoly:
    parts = as_profile(parts)
    n, l = sum(parts), len(parts)
    top = n // 2 - l + 2
    total = BivariatePoly()
    for v, c in expansion:
        total = total + c.shift_u(l - 1).shift_N(top - v)
    return total


# Moments and the moment/cumulant relation ----------------------------------

def set_partitions(items: Sequence) -> Iterator[List[List]]:
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _key(parts: Iterable[int]) -> Profile:
    return tuple(sorted(parts))


def moments_from_cumulants(cumulants: Dict[Profile, BivariatePoly]) -> Dict[Profile, BivariatePoly]:
    """``m(k) = sum over set partitions of the product of block cumulants``."""
    table = {_key(k): v for k, v in cumulants.items()}
    out = {}
    for prof in table:
        total = BivariatePoly()
        for partition in set_partitions(prof):
            term = BivariatePoly.const(1)
            for block in partition:
                key = _key(block)
                if key not in table:
                    raise KeyError(f"missing cumulant for sub-profile {key}")
                term = term * table[key]
            total = total + term
        out[prof] = total
    return out


def cumulants_from_moments(moments: Dict[Profile, BivariatePoly]) -> Dict[Profile, BivariatePoly]:
    """Inverse of :func:`moments_from_cumulants`, solved by increasing profile length."""
    table = {_key(k): v for k, v in moments.items()}
    out: Dict[Profile, BivariatePoly] = {}
    for prof in sorted(table, key=len):
        total = table[prof]
        for partition in set_partitions(prof):
            if len(partition) == 1:
                continue
            term = BivariatePoly.const(1)
            for block in partition:
                key = _key(block)
                if key not in out:
                    if key not in table:
                        raise KeyError(f"missing moment for sub-profile {key}")
                    raise KeyError(f"sub-profile {key} not yet inverted")
                term = term * out[key]
            total = total - term
        out[prof] = total
    return out


def moment_exact(parts: Iterable[int], threads: int = 1) -> BivariatePoly:
    """Joint moment ``E[prod Tr T^ki]``.

    Orbits of a configuration shift independently, so the moment sum
    splits into products of cumulant sums over set partitions of the
    cycles.
    """
    parts = as_profile(parts)
    total = BivariatePoly()
    for partition in set_partitions(list(parts)):
        term = BivariatePoly.const(1)
        for block in partition:
            term = term * cumulant_exact(block, threads)
            if not term:
                break
        total = total + term
    return total


def catalan(m: int) -> int:
    return comb(2 * m, m) // (m + 1)
