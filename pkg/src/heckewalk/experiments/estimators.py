"""
Monte Carlo estimators for the half-line and qTAZRP limits.

All estimators are deterministic functions of their arguments: trials are
split into fixed chunks, each drawing from ``SeedSequence([seed, chunk])``.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..hecke import as_fraction, mul
from ..systems import (
    _gen_element, halfline_classes, make_halfline, second_class_initial,
    simulate_halfline, simulate_qtazrp,
)
from ..walks import uniformization_series
from .report import ExperimentResult, bernoulli_report
from .theory import (
    RegimeError, exit_probability_theory, kappa, qtazrp_marginal_pmf,
    second_class_speed_cdf_theory, survival_theory,
)

__all__ = [
    "estimate_survival", "estimate_exit", "estimate_qtazrp_marginal",
    "estimate_second_class_speed", "symmetry_masses", "PlateauError",
    "DiscardError", "MAX_DISCARD_FRACTION", "speed_bound",
]

MAX_DISCARD_FRACTION = 0.01


class PlateauError(RuntimeError):
    """The estimate still moves between t and 2t."""

    def __init__(self, msg: str, result: ExperimentResult):
        super().__init__(msg)
        self.result = result


class DiscardError(RuntimeError):
    pass


def _check_discards(contact: np.ndarray):
    frac = float(np.mean(contact)) if contact.size else 0.0
    if frac > MAX_DISCARD_FRACTION:
        raise DiscardError(f"{frac:.2%} of trials touched the window edge; enlarge the window")


def _theory_or_nan(fn, *args) -> float:
    try:
        return float(fn(*args))
    except RegimeError:
        return math.nan


def estimate_survival(k: int, l: int, alpha: float, q: float, t: float = 200.0,
                      window: int | None = None, trials: int = 100_000, seed: int = 0,
                      route: str = "direct") -> ExperimentResult:
    """Frequency of ``pi_t(k) < 0`` for the walk started at (l-1,l)...(k,k+1).

    ``route="symmetry"`` estimates the same probability from the walk started
    at the identity, followed by the discrete updates T_{l-1}, ..., T_k, by
    reading the sign of the type at position k.
    """
    start = time.perf_counter()
    N = int(window or 4 * t)
    if route == "direct":
        run = simulate_halfline(N, alpha, q, t, trials, seed, k=k, l=l)
        hits = run.flipped_end
    elif route == "symmetry":
        init = halfline_classes(N, k, k)
        run = simulate_halfline(N, alpha, q, t, trials, seed, init=init,
                                updates=list(range(l - 1, k - 1, -1)), obs_site=k)
        hits = run.site_class < 3
    else:
        raise ValueError(f"unknown route {route!r}")
    _check_discards(run.contact)
    keep = ~run.contact
    params = {"k": k, "l": l, "alpha": alpha, "q": q, "t": t, "window": N, "route": route}
    wall = time.perf_counter() - start
    rep = bernoulli_report(hits[keep], _theory_or_nan(survival_theory, k, l, alpha, q), seed,
                           int(run.contact.sum()), "survival", params, wall)
    return ExperimentResult((rep,), {}, wall)


def estimate_exit(k: int, l: int, alpha: float, t: float = 200.0, window: int | None = None,
                  trials: int = 100_000, seed: int = 0, strict: bool = True) -> ExperimentResult:
    """Frequency of an exit by time t at q = 0, with a plateau check against 2t."""
    start = time.perf_counter()
    N = int(window or 4 * t)
    run = simulate_halfline(N, alpha, 0.0, 2 * t, trials, seed, k=k, l=l, stop_on_flip=True)
    _check_discards(run.contact)
    keep = ~run.contact
    first = run.first_flip[keep]
    theory = float(exit_probability_theory(k, l, alpha))
    params = {"k": k, "l": l, "alpha": alpha, "t": t, "window": N}
    wall = time.perf_counter() - start
    rep = bernoulli_report(first <= t, theory, seed, int(run.contact.sum()), "exit", params, wall)
    rep2 = bernoulli_report(first <= 2 * t, theory, seed, int(run.contact.sum()), "exit-2t",
                            {**params, "t": 2 * t}, wall)
    drift = rep2.estimate - rep.estimate
    plateau = drift < 2 * rep2.stderr
    result = ExperimentResult((rep,), {"estimate_2t": rep2.estimate, "stderr_2t": rep2.stderr,
                                       "drift": drift, "plateau": plateau}, wall)
    if strict and not plateau:
        raise PlateauError(f"estimate moved by {drift:.4g} between t={t:g} and 2t "
                           f"(2 sigma = {2 * rep2.stderr:.3g})", result)
    return result


def estimate_qtazrp_marginal(N: int = 200, kappa_multiplier: float = 1.0, q: float = 0.5,
                             alpha: float = 0.5, trials: int = 100_000, seed: int = 0,
                             lmax: int = 8) -> ExperimentResult:
    """Law of the count at site N at time kappa(alpha) N times the multiplier."""
    start = time.perf_counter()
    t = kappa_multiplier * kappa(alpha, q) * N
    run = simulate_qtazrp(N + 2, q, t, trials, seed, observe=(N, N + 1))
    x, y = run.obs_a, run.obs_b
    top = int(max(x.max(), lmax)) if x.size else lmax
    pmf = qtazrp_marginal_pmf(alpha, q, top + 60)
    emp = np.bincount(x, minlength=top + 61) / x.size
    tv = 0.5 * float(np.abs(emp - np.asarray(pmf)).sum() + max(0.0, 1.0 - sum(pmf)))
    corr = float(np.corrcoef(x, y)[0, 1]) if x.std() > 0 and y.std() > 0 else 0.0
    wall = time.perf_counter() - start
    base = {"N": N, "q": q, "alpha": alpha, "t": t}
    reports = tuple(bernoulli_report(x == j, pmf[j], seed, 0, f"P(X={j})", {**base, "l": j}, wall)
                    for j in range(lmax + 1))
    diagnostics = {"tv": tv, "mean": float(x.mean()),
                   "neighbour_corr": corr, "neighbour_corr_z": corr * math.sqrt(x.size),
                   "neighbour_tv": _independence_tv(x, y)}
    return ExperimentResult(reports, diagnostics, wall)


def _independence_tv(x: np.ndarray, y: np.ndarray) -> float:
    """TV distance between the joint law of (x, y) and the product of its marginals."""
    m = int(max(x.max(), y.max())) + 1
    joint = np.zeros((m, m))
    np.add.at(joint, (x, y), 1.0)
    joint /= x.size
    prod = np.outer(joint.sum(1), joint.sum(0))
    return 0.5 * float(np.abs(joint - prod).sum())


def speed_bound(q: float, t: float) -> float:
    return (1 - q) + 5 / math.sqrt(t)


def estimate_second_class_speed(s: int, q: float = 0.5, alphas: Sequence[float] = (0.5,),
                                N: int = 200, trials: int = 10_000, seed: int = 0,
                                sites: int | None = None) -> ExperimentResult:
    """Tail frequency of h(t)/t >= 1/kappa(alpha) at t = kappa(alpha) N.

    h is nondecreasing, so the event is "h reached N by time kappa(alpha) N";
    one run up to the largest time serves the whole alpha grid.
    """
    start = time.perf_counter()
    times = [kappa(a, q) * N for a in alphas]
    t_max = max(times)
    n_sites = sites or int(t_max + 10 * math.sqrt(t_max)) + s + 10
    run = simulate_qtazrp(n_sites, q, t_max, trials, seed, second_class_site=s, target=N)
    _check_discards(run.contact)
    keep = ~run.contact
    wall = time.perf_counter() - start
    reports = []
    for a, t in zip(alphas, times):
        reports.append(bernoulli_report(run.hit_time[keep] <= t, second_class_speed_cdf_theory(s, a),
                                        seed, int(run.contact.sum()), f"tail(alpha={a:g})",
                                        {"s": s, "q": q, "alpha": a, "N": N, "t": t}, wall))
    speeds = run.position[keep] / t_max
    diagnostics = {"t_max": t_max, "max_speed": float(speeds.max()) if speeds.size else 0.0,
                   "speed_bound": speed_bound(q, t_max),
                   "bias": [r.theory - r.estimate for r in reports]}
    return ExperimentResult(tuple(reports), diagnostics, wall)


# -- exact check of the type-position symmetry ----------------------------

def symmetry_masses(k: int, l: int, alpha, q, t, N: int = 3) -> tuple[Fraction, Fraction]:
    """Unnormalized uniformized masses of the two sides of the symmetry.

    Left: walk from (l-1,l)...(k,k+1), event pi_t(k) < 0.
    Right: walk from the identity, then T_{l-1} first ... T_k last, event
    "the type at position k is negative".  Both share the factor exp(-Lambda t)
    and the same number of terms, so equal masses mean equal probabilities.
    """
    alpha, q, t = as_fraction(alpha), as_fraction(q), as_fraction(t)
    spec = make_halfline(N, alpha, q)
    rates = [alpha if s == 0 else Fraction(1) for s in spec.fam.generators]
    pi0 = second_class_initial(spec.fam, k, l)
    left = uniformization_series(pi0, spec.kernels, t, rates=rates)
    right = uniformization_series(spec.initial, spec.kernels, t, rates=rates)
    dist = right.partial
    for s in range(l - 1, k - 1, -1):
        dist = mul(_gen_element(spec.fam, s, q), dist)
    lhs = left.exact_mass(lambda w: w(k) < 0)
    rhs = sum((c for w, c in dist.items() if w.position_word()[k - 1] < 0), Fraction(0))
    if left.terms != right.terms:
        raise AssertionError("series lengths differ")
    return lhs, rhs
