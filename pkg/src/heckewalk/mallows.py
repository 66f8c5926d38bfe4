"""
Mallows measures on S_n and their samplers.

Items carry a linear order ``a_1 < ... < a_n``.  An arrangement
``a_{c_1} ... a_{c_n}`` has probability proportional to
``q^{n(n-1)/2 - inv(c)}``, so for ``q < 1`` the mode is the reversed word
``a_n ... a_1``.  Samplers take an explicit :class:`numpy.random.Generator`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Sequence

import numpy as np

from .coxeter import Family, GroupElement

__all__ = [
    "MallowsSpec", "truncated_geometric", "truncated_geometric_pmf",
    "sample_mallows", "sample_mallows_reversed", "mallows_pmf",
    "mallows_normalizer", "mallows_normalizer_bruteforce",
    "sample_infinite_prefix", "equilibrate_block", "equilibrate_block_kernel",
    "inversions",
]


@dataclass(frozen=True)
class MallowsSpec:
    q: float | Fraction
    labels: tuple = ()

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not 0 <= self.q < 1:
            raise ValueError(f"Mallows parameter must lie in [0, 1), got {self.q}")
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be distinct")

    @classmethod
    def of_size(cls, n: int, q) -> "MallowsSpec":
        return cls(q, tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.labels)


def inversions(seq: Sequence) -> int:
    return sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])


def truncated_geometric(q: float, m: int, rng: np.random.Generator) -> int:
    """Draw G in {1..m} with P(G = z) proportional to q^(z-1), by inverse CDF."""
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1 or q == 0:
        rng.random()  # keep the stream aligned: one uniform per draw
        return 1
    q = float(q)
    u = rng.random()
    # P(G <= z) = (1 - q^z) / (1 - q^m)
    v = 1.0 - u * (1.0 - q**m)
    z = math.floor(math.log(v) / math.log(q)) + 1
    return min(max(z, 1), m)


def truncated_geometric_pmf(z: int, q, m: int):
    if not 1 <= z <= m:
        return 0 * q
    return q ** (z - 1) * (1 - q) / (1 - q**m)


def sample_mallows(spec: MallowsSpec, rng: np.random.Generator) -> tuple:
    """Deletion algorithm: start from a_n ... a_1 and repeatedly remove the
    letter at (truncated geometric) position G_{q, remaining}."""
    word = list(reversed(spec.labels))
    out = []
    for remaining in range(spec.n, 0, -1):
        g = truncated_geometric(spec.q, remaining, rng)
        out.append(word.pop(g - 1))
    return tuple(out)


def sample_mallows_reversed(spec: MallowsSpec, rng: np.random.Generator) -> tuple:
    """Mirror image of :func:`sample_mallows`: fills positions n, n-1, ...
    by deleting from a_1 ... a_n.  Same law, different use of the stream."""
    word = list(spec.labels)
    out = []
    for remaining in range(spec.n, 0, -1):
        g = truncated_geometric(spec.q, remaining, rng)
        out.append(word.pop(g - 1))
    return tuple(reversed(out))


def mallows_normalizer(n: int, q):
    """sum over S_n of q^inv(w), via the q-factorial product."""
    out = 1 + 0 * q
    for j in range(1, n + 1):
        out *= sum(q**i for i in range(j))
    return out


def mallows_normalizer_bruteforce(n: int, q):
    return sum(q ** inversions(p) for p in itertools.permutations(range(n)))


def mallows_pmf(arrangement: Sequence[Hashable], spec: MallowsSpec):
    """Exact when ``spec.q`` is a Fraction, float otherwise."""
    index = {a: i for i, a in enumerate(spec.labels)}
    try:
        c = [index[a] for a in arrangement]
    except KeyError as exc:
        raise ValueError(f"unknown label {exc.args[0]!r}") from None
    if sorted(c) != list(range(spec.n)):
        raise ValueError("arrangement is not a permutation of the labels")
    n, q = spec.n, spec.q
    return q ** (n * (n - 1) // 2 - inversions(c)) / mallows_normalizer(n, q)


def sample_infinite_prefix(q: float, depth: int, rng: np.random.Generator) -> list[int]:
    """First ``depth`` letters of the infinite Mallows permutation.

    Letters are 1-based indices into the ordered reservoir r_1 r_2 ...; each
    step removes the undeleted letter at a Geometric(1 - q) position.
    """
    if not 0 <= q < 1:
        raise ValueError("q must lie in [0, 1)")
    taken: list[int] = []  # kept sorted
    out = []
    for _ in range(depth):
        g = int(rng.geometric(1.0 - q))
        # the g-th reservoir letter not yet taken
        letter = g
        for t in taken:
            if t <= letter:
                letter += 1
            else:
                break
        out.append(letter)
        lo = np.searchsorted(taken, letter)
        taken.insert(int(lo), letter)
    return out


def _block_types(state: GroupElement, a: int, b: int) -> list[int]:
    if state.fam.family is not Family.A:
        raise ValueError("block equilibration is defined for type A")
    if not 1 <= a < b <= state.fam.rank:
        raise ValueError(f"invalid block [{a}; {b}] for rank {state.fam.rank}")
    word = state.position_word()
    return sorted(word[a - 1:b])


def _place(state: GroupElement, a: int, arrangement: Sequence[int]) -> GroupElement:
    images = list(state.images)
    for offset, t in enumerate(arrangement):
        images[t - 1] = a + offset
    return GroupElement._raw(state.fam, tuple(images))


def equilibrate_block(state: GroupElement, a: int, b: int, q, rng: np.random.Generator) -> GroupElement:
    """Resample the arrangement of the types in positions a..b from Mallows(q)."""
    types = _block_types(state, a, b)
    return _place(state, a, sample_mallows(MallowsSpec(q, tuple(types)), rng))


def equilibrate_block_kernel(state: GroupElement, a: int, b: int, q) -> dict[GroupElement, object]:
    """Exact output law of :func:`equilibrate_block` (enumerates the block)."""
    types = _block_types(state, a, b)
    spec = MallowsSpec(q, tuple(types))
    return {_place(state, a, arr): mallows_pmf(arr, spec)
            for arr in itertools.permutations(types)}
