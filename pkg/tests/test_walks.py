from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import linalg, stats

from heckewalk.algebra_checks import generator_element, random_stochastic
from heckewalk.coxeter import CoxeterFamily, Family, elements, identity
from heckewalk.hecke import basis, mul, six_vertex_element
from heckewalk.walks import (
    ExactKernel, SimKernel, detailed_balance_residual, exact_ctmc_distribution,
    exact_distribution, mallows_stationary, run_continuous, run_discrete,
    step_basis, total_variation, transition_matrix, uniformization_series,
)

HALF = Fraction(1, 2)
A3 = CoxeterFamily(Family.A, 3)
B2 = CoxeterFamily(Family.B, 2)


def generator_kernels(fam, q, rates=None):
    rates = rates or {}
    return [ExactKernel(generator_element(fam, s, q), rates.get(s, 1.0)) for s in fam.generators]


def test_step_basis_ascent_always_moves():
    rng = np.random.default_rng(0)
    e = identity(A3)
    assert all(step_basis(e, 1, 0.0, rng) != e for _ in range(10))


def test_exact_kernel_sampling_matches_row():
    rng = np.random.default_rng(1)
    h = random_stochastic(B2, Fraction(1, 3), rng, support=5)
    k = ExactKernel(h)
    for w in list(elements(B2))[::3]:
        row = k.row(w)
        draws = Counter(k.sample(w, rng) for _ in range(6000))
        keys = list(row)
        obs = [draws[x] for x in keys]
        exp = [float(row[x]) * 6000 for x in keys]
        assert set(draws) <= set(keys)
        if len(keys) > 1:
            assert stats.chisquare(obs, exp).pvalue > 1e-3


def test_non_stochastic_kernel_rejected():
    with pytest.raises(ValueError):
        ExactKernel(basis(identity(A3), HALF).scale(2))
    with pytest.raises(ValueError):
        SimKernel(lambda w, rng: w, rate=0.0)


def test_transition_matrix_rows_sum_to_one():
    mat, states = transition_matrix(ExactKernel(generator_element(B2, 0, HALF)))
    assert all(sum(row) == 1 for row in mat)
    assert len(states) == 8


def test_mallows_measure_is_reversible_for_generators():
    for fam in (A3, B2):
        kernels = generator_kernels(fam, Fraction(1, 3))
        assert detailed_balance_residual(kernels) == 0
    pi = mallows_stationary(A3, HALF)
    assert sum(pi.values()) == 1


def test_uniformization_matches_matrix_exponential():
    q = HALF
    kernels = generator_kernels(B2, q, {0: 0.5})
    ser = uniformization_series(identity(B2), kernels, Fraction(3, 2), rates=[HALF, 1])
    exact = ser.to_float()
    states = list(elements(B2))
    gen = np.zeros((8, 8))
    for k in kernels:
        mat, _ = transition_matrix(k, states, exact=False)
        gen += k.rate * (mat - np.eye(8))
    p = linalg.expm(1.5 * gen)[states.index(identity(B2))]
    assert max(abs(exact.get(w, 0.0) - p[i]) for i, w in enumerate(states)) < 1e-12
    assert abs(sum(exact.values()) - 1) < 1e-12


def test_continuous_simulation_matches_exact():
    rng = np.random.default_rng(2)
    kernels = generator_kernels(A3, HALF)
    exact = exact_ctmc_distribution(identity(A3), kernels, 1)
    draws = Counter(run_continuous(identity(A3), kernels, 1.0, rng).current for _ in range(20_000))
    emp = {w: c / 20_000 for w, c in draws.items()}
    assert total_variation(emp, exact) < 0.02


def test_fixed_schedule_exact_distribution_is_product():
    kernels = [ExactKernel(six_vertex_element(s, HALF, HALF, A3)) for s in (1, 2)]
    dist = exact_distribution(identity(A3), kernels)
    expected = mul(kernels[1].element, mul(kernels[0].element, basis(identity(A3), HALF)))
    assert dist == expected


def test_run_discrete_log_and_schedule():
    rng = np.random.default_rng(3)
    kernels = generator_kernels(A3, HALF)
    st = run_discrete(identity(A3), kernels, 7, rng, schedule="fixed", log=3)
    assert [i for _, i in st.events] == [0, 1, 0]
    with pytest.raises(ValueError):
        run_discrete(identity(A3), kernels, 1, rng, schedule="bogus")


def test_long_run_approaches_mallows():
    rng = np.random.default_rng(4)
    kernels = generator_kernels(A3, HALF)
    pi = mallows_stationary(A3, HALF)
    draws = Counter(run_discrete(identity(A3), kernels, 60, rng).current for _ in range(20_000))
    emp = {w: c / 20_000 for w, c in draws.items()}
    assert total_variation(emp, pi) < 0.02
