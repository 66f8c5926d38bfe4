"""
Finite Coxeter groups of type A (symmetric group S_n) and type B
(hyperoctahedral group B_N) in one-line notation.

An element ``w`` is stored as the tuple ``(w(1), ..., w(rank))``.  We read
``w`` as a map from particle *types* to *positions*: ``w(t)`` is the position
of the particle of type ``t``.  For type B the image is signed; ``w(t) = -p``
means that position ``p`` holds the particle of type ``-t``.  Left
multiplication by a generator therefore acts on positions, which is exactly a
bond update of the particle system:

* ``s_i`` (``i >= 1``) exchanges the contents of positions ``i`` and ``i+1``;
* ``s_0`` (type B only) flips the sign of the type sitting at position 1.

>>> fam = CoxeterFamily(Family.A, 3)
>>> w = apply_generator_left(identity(fam), 1)
>>> w.images, length(w)
((2, 1, 3), 1)
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

__all__ = [
    "Family", "CoxeterFamily", "GroupElement", "identity",
    "apply_generator_left", "length", "inverse", "compose", "length_delta",
    "reduced_word", "cayley_length_oracle", "elements", "RankTooLargeError",
]

# the BFS oracle enumerates the whole group; keep it small
MAX_ORACLE_RANK = {"A": 7, "B": 4}


class RankTooLargeError(ValueError):
    """Raised when an enumeration would touch too many group elements."""


class Family(str, enum.Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class CoxeterFamily:
    family: Family
    rank: int

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.rank < 1:
            raise ValueError(f"rank must be positive, got {self.rank}")

    @property
    def generators(self) -> range:
        """Generator indices: 1..n-1 for type A, 0..N-1 for type B."""
        if self.family is Family.A:
            return range(1, self.rank)
        return range(0, self.rank)

    def coxeter_m(self, i: int, j: int) -> int:
        self.check_generator(i)
        self.check_generator(j)
        if i == j:
            return 1
        if abs(i - j) > 1:
            return 2
        if self.family is Family.B and min(i, j) == 0:
            return 4
        return 3

    @property
    def order(self) -> int:
        n = self.rank
        size = 1
        for j in range(2, n + 1):
            size *= j
        return size if self.family is Family.A else size * 2**n

    @property
    def longest_length(self) -> int:
        n = self.rank
        return n * (n - 1) // 2 if self.family is Family.A else n * n

    def check_generator(self, s: int) -> None:
        if s not in self.generators:
            raise ValueError(f"invalid generator s_{s} for {self.family.value}_{self.rank}")

    def __str__(self):
        return f"{self.family.value}{self.rank}"


@dataclass(frozen=True)
class GroupElement:
    fam: CoxeterFamily
    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(v) for v in self.images)
        object.__setattr__(self, "images", images)
        n = self.fam.rank
        if len(images) != n:
            raise ValueError(f"expected {n} images, got {len(images)}")
        if self.fam.family is Family.A:
            ok = sorted(images) == list(range(1, n + 1))
        else:
            ok = sorted(abs(v) for v in images) == list(range(1, n + 1))
        if not ok:
            raise ValueError(f"{images} is not an element of {self.fam}")

    @classmethod
    def _raw(cls, fam: CoxeterFamily, images: tuple[int, ...]) -> "GroupElement":
        # skips validation; images must already be valid
        obj = object.__new__(cls)
        object.__setattr__(obj, "fam", fam)
        object.__setattr__(obj, "images", images)
        return obj

    def __call__(self, t: int) -> int:
        """Image of a (possibly negative) type."""
        if t < 0:
            return -self.images[-t - 1]
        return self.images[t - 1]

    def position_word(self) -> tuple[int, ...]:
        """Types read off positions 1..rank, i.e. the one-line notation of w^-1."""
        return _inverse(self.images)

    def __repr__(self):
        return f"GroupElement({self.fam}, {list(self.images)})"


# -- tuple-level kernels (shared with the Hecke algebra code) -------------

def _left_gen(images: tuple[int, ...], s: int) -> tuple[int, ...]:
    if s == 0:
        return tuple(-v if abs(v) == 1 else v for v in images)
    out = []
    for v in images:
        a = abs(v)
        if a == s:
            out.append(s + 1 if v > 0 else -(s + 1))
        elif a == s + 1:
            out.append(s if v > 0 else -s)
        else:
            out.append(v)
    return tuple(out)


def _inverse(images: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(images)
    for t, v in enumerate(images, start=1):
        out[abs(v) - 1] = t if v > 0 else -t
    return tuple(out)


def _length(images: tuple[int, ...], typeb: bool) -> int:
    n = len(images)
    inv = 0
    for i in range(n):
        wi = images[i]
        for j in range(i + 1, n):
            if wi > images[j]:
                inv += 1
    if typeb:
        for i in range(n):
            wi = -images[i]
            for j in range(i, n):
                if wi > images[j]:
                    inv += 1
    return inv


def _is_ascent(images: tuple[int, ...], s: int) -> bool:
    """True iff l(s w) = l(w) + 1; compares the types at positions s, s+1."""
    if s == 0:
        # type sitting at position 1
        for t, v in enumerate(images, start=1):
            if abs(v) == 1:
                return v > 0
    ta = tb = 0
    for t, v in enumerate(images, start=1):
        a = abs(v)
        if a == s:
            ta = t if v > 0 else -t
        elif a == s + 1:
            tb = t if v > 0 else -t
    return ta < tb


def _compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(a[v - 1] if v > 0 else -a[-v - 1] for v in b)


@lru_cache(maxsize=None)
def _reduced_word(images: tuple[int, ...], typeb: bool) -> tuple[int, ...]:
    gens = range(0, len(images)) if typeb else range(1, len(images))
    word = []
    cur = images
    while True:
        for s in gens:
            if not _is_ascent(cur, s):
                word.append(s)
                cur = _left_gen(cur, s)
                break
        else:
            return tuple(word)


# -- public operations ----------------------------------------------------

def identity(fam: CoxeterFamily) -> GroupElement:
    return GroupElement._raw(fam, tuple(range(1, fam.rank + 1)))


def apply_generator_left(w: GroupElement, s: int) -> GroupElement:
    """Return ``s * w``: the bond (or boundary) update at positions s, s+1."""
    w.fam.check_generator(s)
    return GroupElement._raw(w.fam, _left_gen(w.images, s))


def length(w: GroupElement) -> int:
    """Coxeter length via inversion counting.

    Type A counts pairs i < j with w(i) > w(j).  Type B adds the pairs
    i <= j with -w(i) > w(j).
    """
    return _length(w.images, w.fam.family is Family.B)


def inverse(w: GroupElement) -> GroupElement:
    return GroupElement._raw(w.fam, _inverse(w.images))


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    """Group product ``a * b`` (apply b first)."""
    if a.fam != b.fam:
        raise ValueError("elements belong to different groups")
    return GroupElement._raw(a.fam, _compose(a.images, b.images))


def length_delta(w: GroupElement, s: int) -> int:
    w.fam.check_generator(s)
    return 1 if _is_ascent(w.images, s) else -1


def reduced_word(w: GroupElement) -> tuple[int, ...]:
    """Reduced word ``(s_1, ..., s_r)`` with ``w = s_1 s_2 ... s_r``.

    Built by greedy descent, always stripping the lowest-index left descent.
    """
    return _reduced_word(w.images, w.fam.family is Family.B)


def elements(fam: CoxeterFamily) -> Iterator[GroupElement]:
    n = fam.rank
    for perm in itertools.permutations(range(1, n + 1)):
        if fam.family is Family.A:
            yield GroupElement._raw(fam, perm)
        else:
            for signs in itertools.product((1, -1), repeat=n):
                yield GroupElement._raw(fam, tuple(p * e for p, e in zip(perm, signs)))


@lru_cache(maxsize=None)
def _cayley_distances(fam: CoxeterFamily) -> dict[tuple[int, ...], int]:
    start = tuple(range(1, fam.rank + 1))
    dist = {start: 0}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        d = dist[cur] + 1
        for s in fam.generators:
            nxt = _left_gen(cur, s)
            if nxt not in dist:
                dist[nxt] = d
                queue.append(nxt)
    return dist


def cayley_length_oracle(w: GroupElement) -> int:
    """Length as the BFS distance from e in the Cayley graph (test oracle)."""
    if w.fam.rank > MAX_ORACLE_RANK[w.fam.family.value]:
        raise RankTooLargeError(f"{w.fam} is too large to enumerate")
    return _cayley_distances(w.fam)[w.images]
