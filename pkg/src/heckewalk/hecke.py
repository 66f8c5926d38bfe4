"""
Exact arithmetic in the Hecke algebra H(W) with the probabilistic convention

    T_s T_w = T_{sw}                    if l(sw) = l(w) + 1
    T_s T_w = (1 - q) T_w + q T_{sw}    if l(sw) = l(w) - 1

Coefficients and ``q`` are :class:`fractions.Fraction`, so algebraic
identities can be checked with zero tolerance.  Elements are sparse: only
nonzero coefficients are stored.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from .coxeter import (
    CoxeterFamily, Family, GroupElement, _inverse, _is_ascent,
    _left_gen, _length, _reduced_word, identity,
)

__all__ = [
    "HeckeElement", "StochasticCheck", "as_fraction", "basis", "zero",
    "mul_gen_left", "mul", "involution", "mallows_block", "six_vertex_element",
    "is_stochastic", "embed", "to_json", "from_json", "NonStochasticError",
    "product", "require_stochastic", "q_factorial",
]

Number = Union[int, Fraction, str]

MAX_BLOCK = 7


class NonStochasticError(ValueError):
    pass


def as_fraction(x) -> Fraction:
    """Exact rational from int, Fraction, "p/r" string or float (exact binary value)."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class HeckeElement:
    """A finitely supported combination ``sum c_w T_w``.

    Internally keyed by one-line tuples; use :meth:`items` to get
    :class:`GroupElement` keys.
    """

    __slots__ = ("fam", "q", "_terms")

    def __init__(self, fam: CoxeterFamily, q, terms: Mapping = ()):
        self.fam = fam
        self.q = as_fraction(q)
        clean: dict[tuple[int, ...], Fraction] = {}
        for key, c in dict(terms).items():
            if isinstance(key, GroupElement):
                if key.fam != fam:
                    raise ValueError("term from a different group")
                key = key.images
            else:
                key = GroupElement(fam, key).images
            c = as_fraction(c)
            if c:
                clean[key] = clean.get(key, Fraction(0)) + c
        self._terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def _wrap(cls, fam, q, terms):
        obj = cls.__new__(cls)
        obj.fam, obj.q, obj._terms = fam, q, terms
        return obj

    # -- inspection
    def items(self) -> Iterator[tuple[GroupElement, Fraction]]:
        for key, c in self._terms.items():
            yield GroupElement._raw(self.fam, key), c

    def coefficient(self, w) -> Fraction:
        key = w.images if isinstance(w, GroupElement) else tuple(w)
        return self._terms.get(key, Fraction(0))

    @property
    def support(self) -> list[GroupElement]:
        return [GroupElement._raw(self.fam, k) for k in self._terms]

    def total(self) -> Fraction:
        return sum(self._terms.values(), Fraction(0))

    def __len__(self):
        return len(self._terms)

    # -- vector space structure
    def _check(self, other: "HeckeElement"):
        if not isinstance(other, HeckeElement):
            raise TypeError(f"expected HeckeElement, got {type(other).__name__}")
        if other.fam != self.fam or other.q != self.q:
            raise ValueError("Hecke elements live in different algebras")

    def __add__(self, other):
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return HeckeElement._wrap(self.fam, self.q, out)

    def __neg__(self):
        return HeckeElement._wrap(self.fam, self.q, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "HeckeElement":
        c = as_fraction(c)
        if not c:
            return zero(self.fam, self.q)
        return HeckeElement._wrap(self.fam, self.q, {k: v * c for k, v in self._terms.items()})

    def __rmul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, HeckeElement):
            return mul(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, HeckeElement):
            return NotImplemented
        return self.fam == other.fam and self.q == other.q and self._terms == other._terms

    def __hash__(self):
        return hash((self.fam, self.q, frozenset(self._terms.items())))

    def __repr__(self):
        body = " + ".join(f"{c}*T{list(k)}" for k, c in sorted(self._terms.items()))
        return f"HeckeElement({self.fam}, q={self.q}: {body or '0'})"


def zero(fam: CoxeterFamily, q) -> HeckeElement:
    return HeckeElement._wrap(fam, as_fraction(q), {})


def basis(w: GroupElement, q) -> HeckeElement:
    return HeckeElement._wrap(w.fam, as_fraction(q), {w.images: Fraction(1)})


@lru_cache(maxsize=None)
def _step(w: tuple[int, ...], s: int) -> tuple[tuple[int, ...], bool]:
    return _left_gen(w, s), _is_ascent(w, s)


def _gen_left(terms: dict, s: int, q: Fraction) -> dict:
    out: dict[tuple[int, ...], Fraction] = {}
    p = 1 - q
    for w, c in terms.items():
        sw, up = _step(w, s)
        if up:
            out[sw] = out.get(sw, 0) + c
        else:
            if p:
                out[w] = out.get(w, 0) + p * c
            if q:
                out[sw] = out.get(sw, 0) + q * c
    return {k: v for k, v in out.items() if v}


def mul_gen_left(s: int, h: HeckeElement) -> HeckeElement:
    """``T_s * h`` by the two defining rules."""
    h.fam.check_generator(s)
    return HeckeElement._wrap(h.fam, h.q, _gen_left(h._terms, s, h.q))


def _gen_left_int(terms: dict, s: int, p: int, r: int) -> dict:
    # r * T_s acting on an integer vector, for q = p / r
    out: dict[tuple[int, ...], int] = {}
    rp = r - p
    for w, c in terms.items():
        sw, up = _step(w, s)
        if up:
            out[sw] = out.get(sw, 0) + r * c
        else:
            if rp:
                out[w] = out.get(w, 0) + rp * c
            if p:
                out[sw] = out.get(sw, 0) + p * c
    return out


def _common_denominator(terms: dict) -> int:
    return math.lcm(*(c.denominator for c in terms.values())) if terms else 1


def _mul_terms(left: dict, right: dict, q: Fraction, typeb: bool) -> dict:
    # integer arithmetic over the common denominator D_left * D_right * r^L
    p, r = q.numerator, q.denominator
    d_left, d_right = _common_denominator(left), _common_denominator(right)
    right_int = {k: int(c * d_right) for k, c in right.items()}
    words = {u: _reduced_word(u, typeb) for u in left}
    top = max((len(wd) for wd in words.values()), default=0)
    acc: dict[tuple[int, ...], int] = {}
    for u, c in left.items():
        cur = right_int
        # T_u = T_{s_1} ... T_{s_r}; the rightmost factor acts first
        for s in reversed(words[u]):
            cur = _gen_left_int(cur, s, p, r)
        weight = int(c * d_left) * r ** (top - len(words[u]))
        for k, v in cur.items():
            acc[k] = acc.get(k, 0) + weight * v
    denom = d_left * d_right * r**top
    return {k: Fraction(v, denom) for k, v in acc.items() if v}


def mul(h1: HeckeElement, h2: HeckeElement) -> HeckeElement:
    h1._check(h2)
    return HeckeElement._wrap(
        h1.fam, h1.q, _mul_terms(h1._terms, h2._terms, h1.q, h1.fam.family is Family.B))


def product(elems: Iterable[HeckeElement]) -> HeckeElement:
    """Left-to-right product ``h_1 h_2 ... h_r``."""
    elems = list(elems)
    out = elems[-1]
    for h in reversed(elems[:-1]):
        out = mul(h, out)
    return out


def involution(h: HeckeElement) -> HeckeElement:
    """The linear map T_w -> T_{w^-1}."""
    return HeckeElement._wrap(h.fam, h.q, {_inverse(k): c for k, c in h._terms.items()})


def _block_perms(rank: int, a: int, b: int):
    for perm in itertools.permutations(range(a, b + 1)):
        images = tuple(range(1, a)) + perm + tuple(range(b + 1, rank + 1))
        yield images


def mallows_block(a: int, b: int, q, rank: int, normalized: bool = False) -> HeckeElement:
    """The block element sum_{w in S_[a;b]} q^{m(m-1)/2 - N(w)} T_w, m = b - a + 1.

    Left multiplication by the normalized version puts the contents of
    positions a..b into q-equilibrium.  The raw coefficients sum to the
    q-factorial [m]_q!.
    """
    q = as_fraction(q)
    if not 1 <= a < b <= rank:
        raise ValueError(f"need 1 <= a < b <= rank, got a={a}, b={b}, rank={rank}")
    m = b - a + 1
    if m > MAX_BLOCK:
        raise ValueError(f"block of size {m} is too large for exact enumeration")
    top = m * (m - 1) // 2
    fam = CoxeterFamily(Family.A, rank)
    terms = {w: q ** (top - _length(w, False)) for w in _block_perms(rank, a, b)}
    terms = {k: v for k, v in terms.items() if v}
    out = HeckeElement._wrap(fam, q, terms)
    if normalized:
        out = out.scale(1 / out.total())
    return out


def six_vertex_element(s: int, x, q, fam: CoxeterFamily) -> HeckeElement:
    """Y_{s,x} = x T_s + (1 - x) T_e."""
    x = as_fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    fam.check_generator(s)
    e = identity(fam)
    terms = {_left_gen(e.images, s): x, e.images: 1 - x}
    return HeckeElement._wrap(fam, as_fraction(q), {k: v for k, v in terms.items() if v})


def embed(h: HeckeElement, shift: int, rank: int) -> HeckeElement:
    """Image of ``h`` in H(S_rank) under the index shift i -> i + shift (type A)."""
    if h.fam.family is not Family.A:
        raise ValueError("embedding is defined for type A only")
    if shift < 0 or shift + h.fam.rank > rank:
        raise ValueError("shifted block does not fit")
    fam = CoxeterFamily(Family.A, rank)
    head = tuple(range(1, shift + 1))
    tail = tuple(range(shift + h.fam.rank + 1, rank + 1))
    terms = {head + tuple(v + shift for v in k) + tail: c for k, c in h._terms.items()}
    return HeckeElement._wrap(fam, h.q, terms)


@dataclass(frozen=True)
class StochasticCheck:
    ok: bool
    min_coeff: Fraction
    total: Fraction

    def __bool__(self):
        return self.ok


def is_stochastic(h: HeckeElement) -> StochasticCheck:
    vals = list(h._terms.values())
    lo = min(vals) if vals else Fraction(0)
    tot = sum(vals, Fraction(0))
    return StochasticCheck(bool(vals) and lo >= 0 and tot == 1, lo, tot)


def require_stochastic(h: HeckeElement) -> HeckeElement:
    check = is_stochastic(h)
    if not check:
        raise NonStochasticError(
            f"element is not stochastic (min coeff {check.min_coeff}, sum {check.total})")
    if not 0 <= h.q <= 1:
        raise NonStochasticError(f"q = {h.q} outside [0, 1]")
    return h


def _frac_str(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def to_json(h: HeckeElement) -> dict:
    return {
        "family": h.fam.family.value,
        "rank": h.fam.rank,
        "q": _frac_str(h.q),
        "terms": [{"word": list(k), "coeff": _frac_str(c)} for k, c in sorted(h._terms.items())],
    }


def from_json(obj: Union[dict, str]) -> HeckeElement:
    if isinstance(obj, str):
        obj = json.loads(obj)
    fam = CoxeterFamily(Family(obj["family"]), int(obj["rank"]))
    return HeckeElement(fam, Fraction(obj["q"]),
                        {tuple(t["word"]): Fraction(t["coeff"]) for t in obj["terms"]})


def q_factorial(m: int, q) -> Fraction:
    """[m]_q! = prod_{j=1}^m (1 + q + ... + q^{j-1})."""
    q = as_fraction(q)
    return math.prod((sum(q ** i for i in range(j)) for j in range(1, m + 1)), start=Fraction(1))
