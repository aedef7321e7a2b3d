"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s``; the summary block at the
end of the pytest report repeats every line.
"""

import sys
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb

import pytest

from betamaps import bfg, oracle, rp2
from betamaps.beta_exact import (bracket, catalan, cumulant_exact, cumulant_expansion,
                                 cumulant_terms, cumulants_from_moments, faulhaber_sum,
                                 moment_exact, theta_of_profile)
from betamaps.perms import Perm, all_perms
from betamaps.poly import BivariatePoly

N, U = BivariatePoly.N(), BivariatePoly.u()


def record(log, k, title, ok, detail=""):
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    log[k] = line
    print(line)
    assert ok, line


def partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


@lru_cache(maxsize=None)
def direct_moment(parts, N_value):
    return oracle.moment_by_direct_expectation(parts, N_value)


def sub_profiles(parts):
    idx = range(len(parts))
    return {tuple(sorted((parts[i] for i in c), reverse=True))
            for r in range(1, len(parts) + 1) for c in combinations(idx, r)}


def test_criterion_01_exact_identity_suite(acceptance_log):
    bad, checked = [], 0
    for total in range(1, 9):
        for parts in partitions(total):
            if len(parts) > 3:
                continue
            kappa = cumulant_exact(parts)
            for N_value in range(1, 7):
                moments = {s: direct_moment(s, N_value) for s in sub_profiles(parts)}
                derived = cumulants_from_moments(moments)[tuple(sorted(parts))]
                checked += 1
                if derived != kappa.evaluate(N=N_value):
                    bad.append((parts, N_value))
    record(acceptance_log, 1, "cumulants equal direct-expectation cumulants (sum <= 8, l <= 3, N <= 6)",
           not bad, f"{checked} cases, failures {bad[:5]}")


def test_criterion_02_two_anchor(acceptance_log):
    kappa_ok = cumulant_exact((2,)) == N * N + (U - 1) * N
    terms = cumulant_terms(Perm.parse("(1,2)"))
    contributions = {
        (0, 0, 0, 1): N * N,
        (1, 0, 0, 0): U * N,
        (0, 1, 0, 0): N * -2,
        (0, 0, 1, 0): N,
    }
    got = {key: BivariatePoly.monomial(s + 1, p, c) for key, c in terms.items() for p, q, r, s in [key]}
    record(acceptance_log, 2, "kappa(2) = N^2 + (2/beta - 1)N with terms N^2, uN, -2N, +N",
           kappa_ok and got == contributions, f"terms {sorted(terms.items())}")


def test_criterion_03_catalan_leading_order(acceptance_log):
    got = {n: cumulant_exact((n,)).coeff_N(n // 2 + 1) for n in (2, 4, 6, 8)}
    ok = all(got[n] == BivariatePoly.const(catalan(n // 2)) for n in got)
    record(acceptance_log, 3, "top coefficient of kappa_1(n) is Cat_{n/2} for n = 2, 4, 6, 8",
           ok and [catalan(n // 2) for n in got] == [1, 2, 5, 14], f"{ {n: str(c) for n, c in got.items()} }")


def test_criterion_04_two_minima_count(acceptance_log):
    got = {n: len(oracle.enumerate_suitably_labelled(theta_of_profile((n,)), oracle.planar_two_minima))
           for n in (2, 4, 6)}
    expected = {n: (n // 2) * (2 ** (n - 1) - comb(n - 1, n // 2)) for n in got}
    record(acceptance_log, 4, "#S2((1..n)) = (n/2)(2^(n-1) - C(n-1,n/2)) for n = 2, 4, 6",
           got == expected == {2: 1, 4: 10, 6: 66}, f"enumerated {got}")


def test_criterion_05_hermite_identity(acceptance_log):
    bad = []
    for n in range(1, 11):
        poly = oracle.beta_infinity_cumulant(n) if n % 2 == 0 else BivariatePoly()
        for N_value in range(1, 11):
            if poly.evaluate(N=N_value) != oracle.hermite_power_sums(N_value, n):
                bad.append((n, N_value))
    record(acceptance_log, 5, "beta -> infinity cumulant equals He_N root power sums (N, n <= 10)",
           not bad, f"failures {bad[:5]}")


def test_criterion_06_two_leading_orders(acceptance_log):
    bad = []
    for n in (2, 4, 6, 8):
        poly = oracle.beta_infinity_cumulant(n)
        top = n // 2 + 1
        got = (poly.coeff(top, 0), poly.coeff(top - 1, 0))
        if got != (catalan(n // 2), -(2 ** (n - 1) - comb(n - 1, n // 2))):
            bad.append((n, got))
    record(acceptance_log, 6, "two leading orders are Cat_{n/2} and -(2^(n-1) - C(n-1,n/2))",
           not bad, f"failures {bad}")


def test_criterion_07_bfg_bijection(acceptance_log):
    failures, thetas, configs = {}, 0, 0
    for n in range(1, 7):
        for theta in all_perms(range(1, n + 1)):
            tally = bfg.verify_theta(theta, oracle.enumerate_suitably_labelled(theta))
            thetas += 1
            configs += tally["configurations"]
            for key, v in tally.items():
                if key.endswith("-fail"):
                    failures[key] = failures.get(key, 0) + v
    record(acceptance_log, 7, "Psi is a bijection onto S(theta) for every theta with n <= 6",
           not failures, f"{thetas} permutations, {configs} configurations, failures {failures}")


def test_criterion_08_projective_correspondence(acceptance_log):
    details, ok = [], True
    for text in ("(1,2)", "(1,2,3,4)", "(1,2)(3,4)"):
        theta = Perm.parse(text)
        n, l = len(theta), theta.num_cycles()
        two = oracle.enumerate_suitably_labelled(theta, oracle.planar_two_minima)
        projective = oracle.enumerate_flagged_rp2(theta)
        pointed = oracle.enumerate_flagged_rp2(theta, pointed=True)
        tally = rp2.verify_theta(theta, two, pointed)
        fails = {k: v for k, v in tally.items() if k.endswith("-fail")}
        identity = (1 + n // 2 - l) * len(projective) == 2 ** (l - 1) * len(two)
        ok = ok and not fails and identity
        details.append(f"{text}: S2={len(two)} M={len(projective)} fails={fails}")
    record(acceptance_log, 8, "projective fibers are 2^(l-1), round trips hold, counting identity",
           ok, "; ".join(details))


def test_criterion_09_subleading_coefficient(acceptance_log):
    bad, checked = [], []
    for n in range(2, 9, 2):
        for parts in partitions(n):
            if len(parts) > 2:
                continue
            l = len(parts)
            theta = theta_of_profile(parts)
            count = len(oracle.enumerate_flagged_rp2(theta))
            coeff = dict(cumulant_expansion(parts)).get(1, BivariatePoly())
            expected = (U - 1) * Fraction(count, 2 ** (l - 1))
            checked.append((parts, count))
            if coeff != expected:
                bad.append((parts, str(coeff), str(expected)))
    record(acceptance_log, 9, "1/N coefficient equals 2^(1-l)(2/beta - 1)#M_1/2 (l <= 2, n <= 8)",
           not bad, f"{len(checked)} profiles, failures {bad[:3]}")


def test_criterion_10_faulhaber(acceptance_log):
    bad = [(u, n) for u in range(11) for n in range(0, 21)
           if faulhaber_sum(u).evaluate(N=n) != sum(h ** u for h in range(1, n + 1))]
    record(acceptance_log, 10, "Faulhaber sums match power sums (u <= 10, N <= 20), B_1 = +1/2",
           not bad, f"failures {bad[:5]}")


def test_criterion_11_average_distance(acceptance_log):
    got, printed = {}, {}
    for n in (2, 4, 6):
        theta = theta_of_profile((n,))
        got[n] = Fraction(bracket(theta, 0, 1), bracket(theta, 0, 0))
        printed[n] = oracle.average_distance_formula(n)
    record(acceptance_log, 11, "<e1>/<e0> at theta = (1..n), p = 0 matches the closed form",
           got == printed, f"brackets {dict((n, str(v)) for n, v in got.items())}, "
                           f"closed form {dict((n, str(v)) for n, v in printed.items())}")


def test_criterion_12_monte_carlo(acceptance_log):
    rows, ok = [], True
    for beta in (1.0, 2.0, 4.0):
        est = oracle.mc_sample(20, beta, 100_000, 2024, [(2,), (4,)])
        u = Fraction(2) / Fraction(beta)
        for p in ((2,), (4,)):
            exact = float(moment_exact(p).evaluate(N=20, u=u))
            z = (est.means[p] - exact) / est.stderrs[p]
            ok = ok and abs(z) < 5
            rows.append(f"beta={beta:g} Tr T^{p[0]}: z={z:+.2f}")
    record(acceptance_log, 12, "Monte Carlo trace moments within 5 standard errors (N = 20, 1e5 samples)",
           ok, ", ".join(rows))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
