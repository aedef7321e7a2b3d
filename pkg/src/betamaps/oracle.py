"""Independent checks: direct expectation over the tridiagonal model,
exhaustive map enumeration, Hermite power sums and a Monte Carlo sampler.

Nothing here imports the bridge machinery; the point is to disagree with
it if it is wrong.
"""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .maps import (FlaggedMap, HalfEdgeMap, SuitablyLabelledMap, flagged_euler,
                   is_orientable)
from .perms import Label, Perm, bar_conjugate, enumerate_matchings
from .poly import BivariatePoly

DEFAULT_CAP_N = 6
DEFAULT_CAP_K = 8


class CapExceeded(RuntimeError):
    """Raised when a brute-force sweep would exceed its configured size."""


# Direct expectation ----------------------------------------------------------

def _walk_signatures(N: int, k: int) -> Counter:
    """Closed walks of length ``k`` on the path ``1..N`` with loops.

    Each walk is reduced to ``(diag counts, edge counts)``: how often it
    sits on ``T[i,i]`` and how often it crosses ``{i, i+1}``.
    """
    sigs: Counter = Counter()
    diag = [0] * N
    edge = [0] * max(N - 1, 0)

    def rec(start, pos, steps):
        if steps == k:
            if pos == start:
                sigs[(tuple(diag), tuple(edge))] += 1
            return
        # cannot get back in time
        if abs(pos - start) > k - steps:
            return
        diag[pos] += 1
        rec(start, pos, steps + 1)
        diag[pos] -= 1
        if pos + 1 < N:
            edge[pos] += 1
            rec(start, pos + 1, steps + 1)
            edge[pos] -= 1
        if pos > 0:
            edge[pos - 1] += 1
            rec(start, pos - 1, steps + 1)
            edge[pos - 1] -= 1

    for start in range(N):
        rec(start, start, 0)
    return sigs


def _gaussian_even(d: int) -> int:
    if d % 2:
        return 0
    out = 1
    for j in range(d - 1, 0, -2):
        out *= j
    return out


def _entry_expectation(N: int, diag: Sequence[int], edge: Sequence[int]) -> BivariatePoly:
    """``E[prod T_ii^d_i prod T_{i,i+1}^{e_i}]`` as a polynomial in ``u``.

    ``T_ii = sqrt(u) a_i`` with ``a_i`` standard normal and
    ``T_{i,i+1} = sqrt(u) b_i`` with ``sqrt(2) b_i`` chi of parameter
    ``(N - i) beta``; then ``u^t E[b_i^{2t}] = prod_{j<t} (N - i + u j)``.
    """
    out = BivariatePoly.const(1)
    u = BivariatePoly.u()
    for d in diag:
        if d % 2:
            return BivariatePoly()
        out = out * BivariatePoly.monomial(0, d // 2, _gaussian_even(d))
    for i, e in enumerate(edge, start=1):
        if e % 2:
            return BivariatePoly()
        for j in range(e // 2):
            out = out * (u * j + (N - i))
    return out


def estimate_direct_cost(parts: Sequence[int], N: int) -> int:
    """Upper bound on walks visited: ``prod N * 3^(k_i - 1)``."""
    cost = 1
    for k in parts:
        cost *= N * 3 ** max(k - 1, 0)
    return cost


def moment_by_direct_expectation(parts: Sequence[int], N: int,
                                 cap_N: int = DEFAULT_CAP_N, cap_k: int = DEFAULT_CAP_K,
                                 force: bool = False) -> BivariatePoly:
    """``E[prod Tr T^{k_i}]`` at a fixed size ``N``, as a polynomial in ``u``.

    Sums over closed index walks, one per trace, with independent entries.
    """
    parts = [int(k) for k in parts]
    if N < 1 or any(k < 1 for k in parts):
        raise ValueError("need N >= 1 and positive parts")
    if not force and (N > cap_N or sum(parts) > cap_k):
        raise CapExceeded(
            f"direct expectation with N={N}, parts={parts} exceeds caps "
            f"(N <= {cap_N}, total degree <= {cap_k}); about "
            f"{estimate_direct_cost(parts, N)} walks; pass force=True to run anyway")
    if sum(parts) % 2:
        return BivariatePoly()
    combined: Counter = Counter({(tuple([0] * N), tuple([0] * (N - 1))): 1})
    for k in parts:
        nxt: Counter = Counter()
        sigs = _walk_signatures(N, k)
        for (d1, e1), c1 in combined.items():
            for (d2, e2), c2 in sigs.items():
                key = (tuple(a + b for a, b in zip(d1, d2)), tuple(a + b for a, b in zip(e1, e2)))
                nxt[key] += c1 * c2
        combined = nxt
    total = BivariatePoly()
    for (diag, edge), c in combined.items():
        total = total + _entry_expectation(N, diag, edge) * c
    return total


# Maps -------------------------------------------------------------------------

def _vertex_labellings(m: HalfEdgeMap) -> Iterator[Dict[Tuple[Label, ...], int]]:
    """Labellings with minimum 0 and steps of at most one across edges."""
    verts = m.vertices.cycles()
    owner = {h: v for v in verts for h in v}
    adj = {v: sorted({owner[m.edges(h)] for h in v}) for v in verts}
    # breadth-first order so every later vertex has an earlier neighbour
    order = [verts[0]]
    seen = {verts[0]}
    for v in order:
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                order.append(w)
    top = len(verts) - 1
    lab: Dict[Tuple[Label, ...], int] = {}

    def rec(idx):
        if idx == len(order):
            if min(lab.values()) == 0:
                yield dict(lab)
            return
        v = order[idx]
        placed = [lab[w] for w in adj[v] if w in lab]
        lo = max([0] + [x - 1 for x in placed])
        hi = min([top] + [x + 1 for x in placed])
        for x in range(lo, hi + 1):
            lab[v] = x
            yield from rec(idx + 1)
            del lab[v]

    for start in range(top + 1):
        lab[order[0]] = start
        yield from rec(1)
        del lab[order[0]]


def enumerate_suitably_labelled(theta: Perm,
                                predicate: Optional[Callable[[SuitablyLabelledMap], bool]] = None,
                                max_size: int = 8) -> List[SuitablyLabelledMap]:
    """Every connected map with face permutation ``theta`` and every suitable labelling."""
    if len(theta) > max_size:
        raise CapExceeded(f"map enumeration is capped at {max_size} half-edges")
    out = []
    for alpha in enumerate_matchings(theta.universe):
        m = HalfEdgeMap.from_faces(theta, alpha)
        if not m.is_connected():
            continue
        for vl in _vertex_labellings(m):
            sm = SuitablyLabelledMap.from_vertex_labels(m, vl)
            if predicate is None or predicate(sm):
                out.append(sm)
    return out


def two_minima(sm: SuitablyLabelledMap) -> bool:
    return len(sm.local_minima()) == 2


def planar_two_minima(sm: SuitablyLabelledMap) -> bool:
    """Membership in the two-minima class counted at sub-leading order (sphere only)."""
    return sm.map.genus() == 0 and len(sm.local_minima()) == 2


def planar_one_minimum(sm: SuitablyLabelledMap) -> bool:
    return sm.map.genus() == 0 and len(sm.local_minima()) == 1


def non_minimum_count(k: int) -> Callable[[SuitablyLabelledMap], bool]:
    return lambda sm: len(sm.non_minima()) == k


def signed_matchings(n_labels: Sequence[Label]) -> Iterator[Perm]:
    """Fixed-point-free involutions ``tau`` of ``[n, n']`` commuting with the bar.

    Also ``tau(i) != i'``, so ``tau * bar`` is fixed-point free.
    """
    for alpha in enumerate_matchings(n_labels):
        pairs = [c for c in alpha.cycles()]
        for mask in range(2 ** len(pairs)):
            mapping = {}
            for t, (a, b) in enumerate(pairs):
                if mask >> t & 1:
                    b = b.bar()
                mapping[a], mapping[b] = b, a
                mapping[a.bar()], mapping[b.bar()] = b.bar(), a.bar()
            yield Perm(mapping)


def enumerate_flagged_rp2(theta: Perm, max_size: int = 8,
                          pointed: bool = False) -> List[FlaggedMap]:
    """Connected non-orientable flagged maps of Euler characteristic 1 on ``[n, n']``.

    Faces are ``rho mu = theta theta'`` with ``rho`` the bar involution;
    ``tau`` ranges over every bar-commuting matching.  With ``pointed`` each
    map is repeated once per vertex, pointed at that vertex.
    """
    if len(theta) > max_size:
        raise CapExceeded(f"flag enumeration is capped at {max_size} labels")
    phi = theta * bar_conjugate(theta)
    rho = Perm({x: x.bar() for x in phi.universe})
    mu = rho * phi
    if not mu.is_matching():
        raise ValueError("the profile does not give a fixed-point-free mu")
    out = []
    for tau in signed_matchings(theta.universe):
        fm = FlaggedMap(tau, rho, mu)
        if not fm.is_connected() or is_orientable(fm) or flagged_euler(fm) != 1:
            continue
        if pointed:
            for v in fm.vertices():
                out.append(fm.with_point(min(v)))
        else:
            out.append(fm)
    return out


# Hermite ------------------------------------------------------------------------

@dataclass(frozen=True)
class HermitePoly:
    """Coefficients of the probabilists' ``He_N``, lowest degree first."""
    coeffs: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def hermite_poly(N: int) -> HermitePoly:
    """``He_{m+1} = x He_m - m He_{m-1}`` with ``He_0 = 1``, ``He_1 = x``."""
    if N < 0:
        raise ValueError("degree must be nonnegative")
    prev, cur = [1], [0, 1]
    if N == 0:
        return HermitePoly(tuple(prev))
    for m in range(1, N):
        nxt = [0] + cur
        for i, c in enumerate(prev):
            nxt[i] -= m * c
        prev, cur = cur, nxt
    return HermitePoly(tuple(cur))


def power_sums_from_coeffs(coeffs: Sequence[int], up_to: int) -> List[int]:
    """Newton's identities for a monic integer polynomial, lowest degree first.

    Returns ``[p_0, p_1, ..., p_up_to]`` over the roots.
    """
    deg = len(coeffs) - 1
    if coeffs[-1] != 1:
        raise ValueError("polynomial must be monic")
    # e-style coefficients: x^d + c_1 x^{d-1} + ... + c_d
    c = [coeffs[deg - j] for j in range(deg + 1)]
    p = [deg]
    for k in range(1, up_to + 1):
        s = k * c[k] if k <= deg else 0
        for j in range(1, min(k, deg + 1)):
            s += c[j] * p[k - j]
        p.append(-s)
    return p


def hermite_power_sums(N: int, n: int) -> int:
    """``sum_j h_j^n`` over the roots of ``He_N``, in exact integers."""
    value = power_sums_from_coeffs(hermite_poly(N).coeffs, n)[n]
    if n % 2:
        assert value == 0, "odd power sums of a symmetric root set vanish"
    return value


def beta_infinity_cumulant(n: int) -> BivariatePoly:
    """The ``u^0`` part of the normalized expansion of ``kappa_1(n)``, in ``N``."""
    from .beta_exact import cumulant_expansion
    if n < 2 or n % 2:
        raise ValueError("n must be even and at least 2")
    top = n // 2 + 1
    out = BivariatePoly()
    for order, coeff in cumulant_expansion([n]):
        c0 = coeff.coeff(0, 0)
        if c0 and top - order >= 0:
            out = out + BivariatePoly.monomial(top - order, 0, c0)
    return out


def hermite_two_leading_orders(n: int) -> Tuple[int, int]:
    """Closed forms for the two top coefficients of the Hermite power sum."""
    from .beta_exact import catalan
    return catalan(n // 2), -(2 ** (n - 1) - comb(n - 1, n // 2))


def s2_count_formula(n: int) -> int:
    """Closed form for the number of two-minima maps with one face of degree ``n``."""
    return (n // 2) * (2 ** (n - 1) - comb(n - 1, n // 2))


def average_distance_formula(n: int) -> Fraction:
    from .beta_exact import catalan
    m = n // 2
    return Fraction(2 ** (n - 2) * n, catalan(m) * (m + 1)) - Fraction(n * n, 8 * (m + 1))


def average_distance_from_leading_orders(n: int) -> Fraction:
    """``<d>/<1>`` solved from ``<1>/2 - (2/n)<d> = -(2^(n-1) - C(n-1, n/2))``.

    ``<1> = (n/2 + 1) Cat_{n/2}`` counts pointed planar trees.
    """
    from .beta_exact import catalan
    m = n // 2
    total = (m + 1) * catalan(m)
    return Fraction(n, 4) + Fraction(m * (2 ** (n - 1) - comb(n - 1, m)), total)


# Monte Carlo --------------------------------------------------------------------

MC_CHUNK = 5000


@dataclass
class MCEstimate:
    N: int
    beta: float
    n_samples: int
    seed: int
    means: Dict[Tuple[int, ...], float]
    stderrs: Dict[Tuple[int, ...], float]


def _mc_chunk(N, beta, size, seed_seq, profiles):
    import numpy as np
    rng = np.random.default_rng(seed_seq)
    u = 2.0 / beta
    a = rng.standard_normal((size, N))
    df = (N - np.arange(1, N)) * beta
    b = np.sqrt(rng.chisquare(df, size=(size, N - 1)) / 2.0)
    mats = np.zeros((size, N, N))
    idx = np.arange(N)
    mats[:, idx, idx] = a
    mats[:, idx[:-1], idx[1:]] = b
    mats[:, idx[1:], idx[:-1]] = b
    eig = np.linalg.eigvalsh(mats) * np.sqrt(u)
    need = sorted({k for p in profiles for k in p})
    traces = {k: (eig ** k).sum(axis=1) for k in need}
    out = {}
    for p in profiles:
        vals = np.ones(size)
        for k in p:
            vals = vals * traces[k]
        out[p] = (vals.sum(), (vals ** 2).sum())
    return out


def mc_sample(N: int, beta: float, n_samples: int, seed: int,
              profiles: Iterable[Sequence[int]] = ((2,), (4,)),
              threads: int = 1) -> MCEstimate:
    """Sample means of ``prod Tr T^{k_i}`` with standard errors.

    Samples are drawn in fixed chunks, each from its own spawned stream, so
    the result does not depend on ``threads``.
    """
    import numpy as np
    if not beta > 0:
        raise ValueError("beta must be positive")
    if N < 2 or n_samples < 2:
        raise ValueError("need N >= 2 and at least two samples")
    profiles = [tuple(int(k) for k in p) for p in profiles]
    sizes = [MC_CHUNK] * (n_samples // MC_CHUNK)
    if n_samples % MC_CHUNK:
        sizes.append(n_samples % MC_CHUNK)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, streams))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda j: _mc_chunk(N, beta, j[0], j[1], profiles), jobs))
    else:
        parts = [_mc_chunk(N, beta, s, ss, profiles) for s, ss in jobs]
    means, errs = {}, {}
    for p in profiles:
        s1 = sum(part[p][0] for part in parts)
        s2 = sum(part[p][1] for part in parts)
        mean = s1 / n_samples
        var = (s2 - n_samples * mean * mean) / (n_samples - 1)
        means[p] = float(mean)
        errs[p] = float(np.sqrt(max(var, 0.0) / n_samples))
    return MCEstimate(N, beta, n_samples, seed, means, errs)


# Reports ------------------------------------------------------------------------

def report(check: str, match: bool, **fields) -> str:
    obj = {"check": check}
    for k, v in fields.items():
        if isinstance(v, BivariatePoly):
            v = v.to_json_obj()
        elif isinstance(v, Fraction):
            v = str(v)
        elif isinstance(v, tuple):
            v = list(v)
        obj[k] = v
    obj["match"] = bool(match)
    return json.dumps(obj)
