"""Exact identity checks for H(W): quadratic, braid, associativity, involution."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .coxeter import CoxeterFamily, apply_generator_left, elements, identity
from .hecke import HeckeElement, basis, involution, mul, product

__all__ = ["random_element", "random_stochastic", "generator_element", "quadratic_holds",
           "braid_holds", "associativity_holds", "antihomomorphism_holds",
           "run_algebra_checks"]


def generator_element(fam: CoxeterFamily, s: int, q) -> HeckeElement:
    return basis(apply_generator_left(identity(fam), s), q)


def random_element(fam: CoxeterFamily, q, rng: np.random.Generator, density: float = 1.0) -> HeckeElement:
    """Random integer-coefficient combination; ``density`` is the expected support fraction."""
    terms = {}
    for w in elements(fam):
        if rng.random() < density:
            terms[w] = int(rng.integers(-9, 10))
    return HeckeElement(fam, q, terms)


def random_stochastic(fam: CoxeterFamily, q, rng: np.random.Generator, support: int = 4) -> HeckeElement:
    ws = list(elements(fam))
    picks = rng.choice(len(ws), size=min(support, len(ws)), replace=False)
    weights = [int(rng.integers(1, 10)) for _ in picks]
    total = sum(weights)
    return HeckeElement(fam, q, {ws[i]: Fraction(c, total) for i, c in zip(picks, weights)})


def quadratic_holds(fam: CoxeterFamily, q) -> bool:
    """T_s^2 = (1 - q) T_s + q T_e for every generator."""
    e = basis(identity(fam), q)
    for s in fam.generators:
        ts = generator_element(fam, s, q)
        if mul(ts, ts) != ts.scale(1 - Fraction(q)) + e.scale(q):
            return False
    return True


def braid_holds(fam: CoxeterFamily, q) -> bool:
    """T_s T_t T_s ... = T_t T_s T_t ... (m(s, t) factors each) for all s != t."""
    gens = fam.generators
    for i, s in enumerate(gens):
        for t in gens[i + 1:]:
            m = fam.coxeter_m(s, t)
            ts, tt = generator_element(fam, s, q), generator_element(fam, t, q)
            left = product([ts, tt][j % 2] for j in range(m))
            right = product([tt, ts][j % 2] for j in range(m))
            if left != right:
                return False
    return True


def associativity_holds(fam: CoxeterFamily, q, triples: int, rng: np.random.Generator) -> bool:
    for _ in range(triples):
        a, b, c = (random_element(fam, q, rng) for _ in range(3))
        if mul(mul(a, b), c) != mul(a, mul(b, c)):
            return False
    return True


def antihomomorphism_holds(fam: CoxeterFamily, q, pairs: int, rng: np.random.Generator) -> bool:
    """i(h1 h2) = i(h2) i(h1) on random stochastic pairs."""
    for _ in range(pairs):
        h1, h2 = random_stochastic(fam, q, rng), random_stochastic(fam, q, rng)
        if involution(mul(h1, h2)) != mul(involution(h2), involution(h1)):
            return False
    return True


def run_algebra_checks(fam: CoxeterFamily, qs: Sequence, triples: int = 100, pairs: int = 50,
                       seed: int = 0) -> list[tuple[str, bool]]:
    out = []
    for q in qs:
        rng = np.random.default_rng([seed, Fraction(q).numerator, Fraction(q).denominator])
        tag = f"{fam} q={q}"
        out.append((f"quadratic {tag}", quadratic_holds(fam, q)))
        out.append((f"braid {tag}", braid_holds(fam, q)))
        out.append((f"associativity x{triples} {tag}", associativity_holds(fam, q, triples, rng)))
        out.append((f"anti-homomorphism x{pairs} {tag}", antihomomorphism_holds(fam, q, pairs, rng)))
    return out
