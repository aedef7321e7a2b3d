"""Sparse polynomials in ``N`` and ``u`` with rational coefficients."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, Iterable, Tuple, Union

Number = Union[int, Fraction]


class BivariatePoly:
    """Immutable-by-convention mapping ``(N exponent, u exponent) -> Fraction``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Tuple[int, int], Number] = None):
        self.terms: Dict[Tuple[int, int], Fraction] = {}
        for key, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                self.terms[(int(key[0]), int(key[1]))] = c

    # constructors
    @classmethod
    def const(cls, c: Number) -> "BivariatePoly":
        return cls({(0, 0): c})

    @classmethod
    def N(cls) -> "BivariatePoly":
        return cls({(1, 0): 1})

    @classmethod
    def u(cls) -> "BivariatePoly":
        return cls({(0, 1): 1})

    @classmethod
    def monomial(cls, n_exp: int, u_exp: int, c: Number = 1) -> "BivariatePoly":
        return cls({(n_exp, u_exp): c})

    # arithmetic
    def _coerce(self, other) -> "BivariatePoly":
        if isinstance(other, BivariatePoly):
            return other
        return BivariatePoly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return BivariatePoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BivariatePoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: Dict[Tuple[int, int], Fraction] = {}
        for (a, b), c in self.terms.items():
            for (d, e), f in other.terms.items():
                key = (a + d, b + e)
                out[key] = out.get(key, 0) + c * f
        return BivariatePoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = BivariatePoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BivariatePoly.const(other)
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # queries
    def coeff(self, n_exp: int, u_exp: int) -> Fraction:
        return self.terms.get((n_exp, u_exp), Fraction(0))

    def coeff_N(self, n_exp: int) -> "BivariatePoly":
        """Coefficient of ``N^n_exp`` as a polynomial in ``u`` alone."""
        return BivariatePoly({(0, b): c for (a, b), c in self.terms.items() if a == n_exp})

    def coeff_u(self, u_exp: int) -> "BivariatePoly":
        return BivariatePoly({(a, 0): c for (a, b), c in self.terms.items() if b == u_exp})

    def degree_N(self) -> int:
        return max((a for a, _ in self.terms), default=-1)

    def degree_u(self) -> int:
        return max((b for _, b in self.terms), default=-1)

    def evaluate(self, N: Number = None, u: Number = None):
        """Substitute any subset of the variables; returns a number if both are given."""
        out: Dict[Tuple[int, int], Fraction] = {}
        for (a, b), c in self.terms.items():
            val = Fraction(c)
            na, nb = a, b
            if N is not None:
                val *= Fraction(N) ** a
                na = 0
            if u is not None:
                val *= Fraction(u) ** b
                nb = 0
            out[(na, nb)] = out.get((na, nb), 0) + val
        poly = BivariatePoly(out)
        if N is not None and u is not None:
            return poly.coeff(0, 0)
        return poly

    def shift_N(self, k: int) -> "BivariatePoly":
        """Multiply by ``N^k``; ``k`` may be negative when all exponents allow it."""
        out = {}
        for (a, b), c in self.terms.items():
            if a + k < 0:
                raise ValueError("negative power of N")
            out[(a + k, b)] = c
        return BivariatePoly(out)

    def shift_u(self, k: int) -> "BivariatePoly":
        out = {}
        for (a, b), c in self.terms.items():
            if b + k < 0:
                raise ValueError("negative power of u")
            out[(a, b + k)] = c
        return BivariatePoly(out)

    # interchange
    def sorted_terms(self) -> Iterable[Tuple[int, int, Fraction]]:
        for (a, b) in sorted(self.terms, key=lambda k: (-k[0], -k[1])):
            yield a, b, self.terms[(a, b)]

    def to_json_obj(self) -> dict:
        return {
            "vars": ["N", "u"],
            "terms": [{"N": a, "u": b, "coeff": _frac_str(c)} for a, b, c in self.sorted_terms()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "BivariatePoly":
        if obj.get("vars", ["N", "u"]) != ["N", "u"]:
            raise ValueError("expected variables ['N', 'u']")
        return cls({(t["N"], t["u"]): Fraction(t["coeff"]) for t in obj["terms"]})

    @classmethod
    def from_json(cls, text: str) -> "BivariatePoly":
        return cls.from_json_obj(json.loads(text))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for a, b, c in self.sorted_terms():
            mono = "*".join(s for s in (_power("N", a), _power("u", b)) if s)
            if not mono:
                parts.append(_frac_str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{_frac_str(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"BivariatePoly({self})"


def _power(var: str, e: int) -> str:
    if e == 0:
        return ""
    return var if e == 1 else f"{var}^{e}"


def _frac_str(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
