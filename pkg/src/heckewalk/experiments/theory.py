"""
Closed-form limits for the half-line and qTAZRP systems.

Functions that take probabilities accept floats or Fractions; with Fraction
inputs (and ``q`` rational where relevant) the result is an exact Fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from scipy.optimize import brentq

__all__ = [
    "TheoryValue", "RegimeError", "q_pochhammer", "rho_alpha",
    "block_occupancy_theory", "exit_probability_theory", "survival_theory",
    "kappa", "alpha_of_kappa", "qtazrp_marginal_theory",
    "qtazrp_marginal_pmf", "second_class_speed_cdf_theory", "theory_value",
    "THEORY_FUNCTIONS",
]


class RegimeError(ValueError):
    """Parameters outside the regime where the formula holds."""


@dataclass(frozen=True)
class TheoryValue:
    value: float
    formula: str
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= float(self.value) <= 1.0 and self.formula not in ("kappa", "alpha_of_kappa", "q_pochhammer"):
            raise ValueError(f"{self.formula} gave {self.value}, outside [0, 1]")

    def __float__(self) -> float:
        return float(self.value)


def _exact(*xs) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in xs)


def q_pochhammer(a, q, n: Optional[int] = None):
    """(a; q)_n, with n=None meaning the infinite product."""
    if n is not None:
        out = 1 + 0 * a * q
        for j in range(n):
            out *= 1 - a * q**j
        return out
    if abs(q) >= 1:
        raise ValueError("(a; q)_inf diverges for |q| >= 1")
    a, q = float(a), float(q)
    out, term = 1.0, a
    while abs(term) >= 1e-16:
        out *= 1.0 - term
        term *= q
    return out


def rho_alpha(z: int, alpha):
    """Density at distance z from the boundary for alpha >= 1/2, q = 0."""
    if z < 1:
        raise ValueError("z must be >= 1")
    exact = _exact(alpha)
    a = Fraction(alpha)  # floats convert exactly
    if a < Fraction(1, 2):
        raise RegimeError("rho_alpha needs alpha >= 1/2; below that the measure is Bernoulli(alpha)")
    if z == 1:
        out = 1 - 1 / (4 * a)
    else:
        fz1 = math.factorial(z - 1)
        acc = Fraction(0)
        for k in range(2, z + 1):
            comb = Fraction(math.factorial(2 * (z - 1) - k) * (k - 1),
                            fz1 * math.factorial(z - k))
            acc += comb * ((1 + k) * 2**k - a ** (-k))
        out = acc / 4**z
    return out if exact else float(out)


def block_occupancy_theory(z: int, m: int, alpha):
    """Probability that positions z..z+m-1 are all occupied (alpha >= 1/2, q = 0)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    rho = rho_alpha(z, alpha)
    return (1 + (2 * rho - 1) * m) / (2 ** m if isinstance(rho, Fraction) else 2.0**m)


def exit_probability_theory(k: int, l: int, alpha):
    """Limit probability that the tracked particle started at l exits (q = 0)."""
    if not 1 <= k <= l:
        raise ValueError("need 1 <= k <= l")
    if alpha >= Fraction(1, 2):
        rho = rho_alpha(k, alpha)
        den = 2 ** (l - k + 1)
        return (1 + (2 * rho - 1) * (l - k)) / (den if isinstance(rho, Fraction) else float(den))
    return alpha ** (l - k + 1)


def survival_theory(k: int, l: int, alpha, q):
    if not k <= l:
        raise ValueError("need k <= l")
    if alpha > Fraction(1, 2):
        raise RegimeError("no closed form for alpha > 1/2 when q != 0")
    if not 0 <= q < 1:
        raise ValueError("q must lie in [0, 1)")
    return alpha * (alpha + (1 - alpha) * q) ** (l - k)


def kappa(alpha: float, q: float) -> float:
    """sum_{j >= 0} q^j / (1 - alpha q^j)^2."""
    if not (0 <= alpha < 1 and 0 <= q < 1):
        raise ValueError("need 0 <= alpha < 1 and 0 <= q < 1")
    out, qj = 0.0, 1.0
    while True:
        term = qj / (1.0 - alpha * qj) ** 2
        out += term
        if term < 1e-16:
            return out
        qj *= q


def alpha_of_kappa(kap: float, q: float) -> float:
    """Inverse of alpha -> kappa(alpha, q) on [0, 1)."""
    lo = kappa(0.0, q)
    if kap < lo - 1e-15:
        raise ValueError(f"kappa must be >= 1/(1-q) = {lo}")
    if kap <= lo:
        return 0.0
    hi = 0.5
    while kappa(hi, q) < kap:
        hi = (1.0 + hi) / 2.0
    return brentq(lambda a: kappa(a, q) - kap, 0.0, hi, xtol=1e-15)


def qtazrp_marginal_theory(l: int, alpha, q):
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    if l < 0:
        return 0.0
    return q_pochhammer(alpha, q) * float(alpha) ** l / float(q_pochhammer(q, q, l))


def qtazrp_marginal_pmf(alpha, q, lmax: int) -> list[float]:
    return [qtazrp_marginal_theory(l, alpha, q) for l in range(lmax + 1)]


def second_class_speed_cdf_theory(s: int, alpha):
    """Limit of P(h(t)/t >= 1/kappa(alpha)) for a start at site s."""
    if s < 0 or not 0 <= alpha < 1:
        raise ValueError("need s >= 0 and 0 <= alpha < 1")
    if s == 0:
        return alpha
    return 1 - alpha**2 * (1 - alpha) ** (s - 1)


THEORY_FUNCTIONS = {
    "rho-alpha": (rho_alpha, ("z", "alpha")),
    "block-occupancy": (block_occupancy_theory, ("z", "m", "alpha")),
    "exit": (exit_probability_theory, ("k", "l", "alpha")),
    "survival": (survival_theory, ("k", "l", "alpha", "q")),
    "kappa": (kappa, ("alpha", "q")),
    "alpha-of-kappa": (alpha_of_kappa, ("kappa", "q")),
    "qtazrp-marginal": (qtazrp_marginal_theory, ("l", "alpha", "q")),
    "second-class-speed": (second_class_speed_cdf_theory, ("s", "alpha")),
    "q-pochhammer": (q_pochhammer, ("a", "q", "n")),
}


def theory_value(name: str, params: Mapping) -> TheoryValue:
    try:
        fn, keys = THEORY_FUNCTIONS[name]
    except KeyError:
        raise ValueError(f"unknown formula {name!r}; choose from {sorted(THEORY_FUNCTIONS)}") from None
    args = []
    for key in keys:
        if key not in params:
            if key == "n":
                args.append(None)
                continue
            raise ValueError(f"{name} needs parameter {key!r}")
        args.append(params[key])
    return TheoryValue(float(fn(*args)), name.replace("-", "_"), dict(params))
