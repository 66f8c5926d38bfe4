"""
Random walks on W generated by stochastic Hecke elements.

A stochastic element ``h = sum kappa_u T_u`` acts as a Markov kernel: from
state ``w`` the walk moves according to the coefficients of ``h T_w``.  The
kernels here come in two flavours:

* :class:`ExactKernel` wraps a stochastic :class:`HeckeElement`; its rows can be
  computed exactly and it samples by folding single-generator updates along a
  reduced word.
* :class:`SimKernel` wraps an arbitrary sampler ``(w, rng) -> w`` and may
  carry the exact element it is supposed to realise, for oracle tests.

Exact distributions are stored as Hecke elements, so propagating a law by a
kernel is just a product in the algebra.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np
from scipy import stats

from .coxeter import (
    CoxeterFamily, GroupElement, _is_ascent, _left_gen, _reduced_word,
    elements, length,
)
from .hecke import (
    HeckeElement, as_fraction, basis, mul, require_stochastic, zero,
)

__all__ = [
    "ExactKernel", "SimKernel", "WalkState", "step_basis", "step_element",
    "run_discrete", "run_continuous", "exact_distribution",
    "UniformizedSeries", "uniformization_series", "exact_ctmc_distribution",
    "mallows_stationary", "detailed_balance_residual", "transition_matrix",
    "total_variation", "as_distribution",
]

MAX_EXACT_RANK = {"A": 6, "B": 4}


def _check_exact_rank(fam: CoxeterFamily):
    if fam.rank > MAX_EXACT_RANK[fam.family.value]:
        raise ValueError(f"{fam} is too large for exact propagation")


# -- single steps ---------------------------------------------------------

def step_basis(w: GroupElement, s: int, q, rng: np.random.Generator) -> GroupElement:
    """One application of T_s: always move up; move down with probability q."""
    images = w.images
    if _is_ascent(images, s):
        return GroupElement._raw(w.fam, _left_gen(images, s))
    if rng.random() < float(q):
        return GroupElement._raw(w.fam, _left_gen(images, s))
    return w


def _fold_word(w: GroupElement, word: Sequence[int], q, rng) -> GroupElement:
    for s in reversed(word):
        w = step_basis(w, s, q, rng)
    return w


class ExactKernel:
    """Left multiplication by a stochastic Hecke element."""

    def __init__(self, element: HeckeElement, rate: float = 1.0, name: str = ""):
        self.element = require_stochastic(element)
        self.rate = float(rate)
        if self.rate <= 0:
            raise ValueError("rates must be positive")
        self.name = name
        self._support = [u.images for u, _ in element.items()]
        self._cum = np.cumsum([float(c) for _, c in element.items()])
        self._typeb = element.fam.family.value == "B"

    @property
    def exact(self) -> HeckeElement:
        return self.element

    def sample(self, w: GroupElement, rng: np.random.Generator) -> GroupElement:
        if len(self._support) == 1:
            u = self._support[0]
        else:
            idx = int(np.searchsorted(self._cum, rng.random() * self._cum[-1], side="right"))
            u = self._support[min(idx, len(self._support) - 1)]
        return _fold_word(w, _reduced_word(u, self._typeb), self.element.q, rng)

    def row(self, w: GroupElement) -> dict[GroupElement, Fraction]:
        return dict(mul(self.element, basis(w, self.element.q)).items())

    def __repr__(self):
        return f"ExactKernel({self.name or self.element!r}, rate={self.rate})"


class SimKernel:
    """A sampling procedure, optionally paired with the exact element it realises."""

    def __init__(self, sampler: Callable[[GroupElement, np.random.Generator], GroupElement],
                 rate: float = 1.0, exact: Optional[HeckeElement] = None, name: str = ""):
        self.sampler = sampler
        self.rate = float(rate)
        if self.rate <= 0:
            raise ValueError("rates must be positive")
        self.exact = require_stochastic(exact) if exact is not None else None
        self.name = name

    def sample(self, w: GroupElement, rng: np.random.Generator) -> GroupElement:
        return self.sampler(w, rng)

    def row(self, w: GroupElement) -> dict[GroupElement, Fraction]:
        if self.exact is None:
            raise ValueError(f"kernel {self.name!r} has no exact counterpart")
        return dict(mul(self.exact, basis(w, self.exact.q)).items())

    def __repr__(self):
        return f"SimKernel({self.name!r}, rate={self.rate})"


Kernel = Union[ExactKernel, SimKernel]


def step_element(w: GroupElement, h: HeckeElement, rng: np.random.Generator) -> GroupElement:
    """Sample the move w -> u.w with u ~ coefficients of h, through the Hecke rules."""
    return ExactKernel(h).sample(w, rng)


# -- trajectories ---------------------------------------------------------

@dataclass
class WalkState:
    current: GroupElement
    time: float = 0.0
    events: Optional[deque] = None

    def log(self, t, kernel_id):
        if self.events is not None:
            self.events.append((t, kernel_id))


def _event_log(log) -> Optional[deque]:
    if log is None or log is False:
        return None
    if log is True:
        return deque()
    return deque(maxlen=int(log))


def run_discrete(initial: GroupElement, kernels: Sequence[Kernel], steps: int,
                 rng: np.random.Generator, schedule: str = "uniform",
                 log=None) -> WalkState:
    """Discrete-time walk.

    ``schedule="uniform"`` picks a kernel uniformly at random at each step;
    ``"fixed"`` applies ``kernels[0], kernels[1], ...`` in order, cycling.
    ``log`` is None, True (full log) or an int K (keep the last K events).
    """
    state = WalkState(initial, 0, _event_log(log))
    w = initial
    n = len(kernels)
    for r in range(steps):
        if schedule == "uniform":
            i = int(rng.integers(n))
        elif schedule == "fixed":
            i = r % n
        else:
            raise ValueError(f"unknown schedule {schedule!r}")
        w = kernels[i].sample(w, rng)
        state.log(r + 1, i)
    state.current, state.time = w, steps
    return state


def run_continuous(initial: GroupElement, kernels: Sequence[Kernel], t_max: float,
                   rng: np.random.Generator, log=None) -> WalkState:
    """Continuous-time walk: kernel i fires at the points of a Poisson clock of
    rate ``kernels[i].rate``; simulated through the superposed clock."""
    state = WalkState(initial, 0.0, _event_log(log))
    rates = np.array([k.rate for k in kernels], dtype=float)
    if (rates <= 0).any():
        raise ValueError("rates must be positive")
    cum = np.cumsum(rates)
    total = cum[-1]
    t = 0.0
    w = initial
    while True:
        t += rng.exponential(1.0 / total)
        if t > t_max:
            break
        i = min(int(np.searchsorted(cum, rng.random() * total, side="right")), len(kernels) - 1)
        w = kernels[i].sample(w, rng)
        state.log(t, i)
    state.current, state.time = w, float(t_max)
    return state


# -- exact laws -----------------------------------------------------------

def as_distribution(initial, q) -> HeckeElement:
    """Point mass or mapping {GroupElement: prob} as a Hecke element."""
    if isinstance(initial, HeckeElement):
        return initial
    if isinstance(initial, GroupElement):
        return basis(initial, q)
    initial = dict(initial)
    fam = next(iter(initial)).fam
    return HeckeElement(fam, q, initial)


def _exact_element(k) -> HeckeElement:
    if isinstance(k, HeckeElement):
        return k
    if k.exact is None:
        raise ValueError(f"{k!r} has no exact element")
    return k.exact


def exact_distribution(initial, kernels: Sequence, steps: Optional[int] = None,
                       schedule: str = "fixed") -> HeckeElement:
    """Exact law after a discrete run.

    ``schedule="fixed"`` applies the kernels in the given order (``steps``
    defaults to one pass); ``"uniform"`` applies their average ``steps`` times.
    """
    elems = [_exact_element(k) for k in kernels]
    q = elems[0].q
    dist = as_distribution(initial, q)
    _check_exact_rank(dist.fam)
    if schedule == "fixed":
        steps = len(elems) if steps is None else steps
        for r in range(steps):
            dist = mul(elems[r % len(elems)], dist)
    elif schedule == "uniform":
        avg = zero(dist.fam, q)
        for h in elems:
            avg = avg + h.scale(Fraction(1, len(elems)))
        for _ in range(steps or 0):
            dist = mul(avg, dist)
    else:
        raise ValueError(f"unknown schedule {schedule!r}")
    return dist


@dataclass(frozen=True)
class UniformizedSeries:
    """``P_t = exp(-lam_t) * partial`` up to a Poisson tail below ``tail``.

    ``partial = sum_{n <= terms} lam_t^n / n! * U^n P_0`` is exact when the
    rates and ``t`` are rational.
    """
    lam_t: Fraction
    partial: HeckeElement
    terms: int
    tail: float

    def to_float(self) -> dict[GroupElement, float]:
        f = math.exp(-float(self.lam_t))
        return {w: f * float(c) for w, c in self.partial.items()}

    def probability(self, event: Callable[[GroupElement], bool]) -> float:
        return math.exp(-float(self.lam_t)) * float(self.exact_mass(event))

    def exact_mass(self, event: Callable[[GroupElement], bool]) -> Fraction:
        return sum((c for w, c in self.partial.items() if event(w)), Fraction(0))


def uniformization_series(initial, kernels: Sequence, t, tol: float = 1e-14,
                          rates: Optional[Sequence] = None) -> UniformizedSeries:
    """Continuous-time marginal by uniformization with exact rational terms."""
    elems = [_exact_element(k) for k in kernels]
    if rates is None:
        rates = [k.rate for k in kernels]
    rates = [as_fraction(r) for r in rates]
    lam = sum(rates, Fraction(0))
    q = elems[0].q
    dist = as_distribution(initial, q)
    _check_exact_rank(dist.fam)
    U = zero(dist.fam, q)
    for r, h in zip(rates, elems):
        U = U + h.scale(r / lam)
    lam_t = lam * as_fraction(t)
    mu = float(lam_t)
    n_terms = 0
    while stats.poisson.sf(n_terms, mu) >= tol:
        n_terms += 1
    partial = dist
    cur = dist
    weight = Fraction(1)
    for n in range(1, n_terms + 1):
        cur = mul(U, cur)
        weight = weight * lam_t / n
        partial = partial + cur.scale(weight)
    return UniformizedSeries(lam_t, partial, n_terms, float(stats.poisson.sf(n_terms, mu)))


def exact_ctmc_distribution(initial, kernels: Sequence, t, tol: float = 1e-14) -> dict[GroupElement, float]:
    return uniformization_series(initial, kernels, t, tol).to_float()


def mallows_stationary(fam: CoxeterFamily, q) -> dict[GroupElement, Fraction]:
    """pi(w) proportional to q^(l_max - l(w)), exact."""
    q = as_fraction(q)
    top = fam.longest_length
    weights = {w: q ** (top - length(w)) for w in elements(fam)}
    z = sum(weights.values(), Fraction(0))
    return {w: c / z for w, c in weights.items()}


def detailed_balance_residual(kernels: Sequence, q=None) -> Fraction:
    """max |pi(w) K(w, w') - pi(w') K(w', w)| over all pairs and kernels."""
    elems = [_exact_element(k) for k in kernels]
    q = elems[0].q if q is None else as_fraction(q)
    fam = elems[0].fam
    _check_exact_rank(fam)
    pi = mallows_stationary(fam, q)
    worst = Fraction(0)
    for h in elems:
        rows = {w: mul(h, basis(w, q)) for w in pi}
        for w, row in rows.items():
            for w2, k12 in row.items():
                k21 = rows[w2].coefficient(w)
                worst = max(worst, abs(pi[w] * k12 - pi[w2] * k21))
    return worst


def transition_matrix(kernel, states: Optional[Sequence[GroupElement]] = None, exact: bool = True):
    """Row-stochastic matrix of a kernel on ``states`` (default: all of W)."""
    h = _exact_element(kernel)
    states = list(elements(h.fam)) if states is None else list(states)
    index = {w.images: i for i, w in enumerate(states)}
    n = len(states)
    mat = [[Fraction(0)] * n for _ in range(n)] if exact else np.zeros((n, n))
    for i, w in enumerate(states):
        for w2, c in mul(h, basis(w, h.q)).items():
            mat[i][index[w2.images]] = c if exact else float(c)
    return mat, states


def total_variation(p: Mapping, r: Mapping) -> float:
    keys = set(p) | set(r)
    return 0.5 * sum(abs(float(p.get(k, 0)) - float(r.get(k, 0))) for k in keys)
