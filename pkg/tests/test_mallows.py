import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from heckewalk.coxeter import CoxeterFamily, Family, GroupElement, elements
from heckewalk.hecke import basis, mallows_block, mul
from heckewalk.mallows import (
    MallowsSpec, equilibrate_block, equilibrate_block_kernel, inversions,
    mallows_normalizer, mallows_normalizer_bruteforce, mallows_pmf,
    sample_infinite_prefix, sample_mallows, sample_mallows_reversed,
    truncated_geometric, truncated_geometric_pmf,
)

HALF = Fraction(1, 2)


def chi2_pvalue(samples, pmf):
    keys = list(pmf)
    counts = Counter(samples)
    assert set(counts) <= set(keys)
    obs = np.array([counts[k] for k in keys], float)
    exp = np.array([float(pmf[k]) for k in keys]) * len(samples)
    return stats.chisquare(obs, exp).pvalue


def test_normalizer_matches_bruteforce():
    for n in range(1, 6):
        assert mallows_normalizer(n, HALF) == mallows_normalizer_bruteforce(n, HALF)


def test_pmf_sums_to_one_and_mode_is_reversed():
    spec = MallowsSpec.of_size(4, HALF)
    perms = list(itertools.permutations(spec.labels))
    assert sum(mallows_pmf(p, spec) for p in perms) == 1
    assert max(perms, key=lambda p: mallows_pmf(p, spec)) == (4, 3, 2, 1)
    # weight q^(6 - inv): the sorted word has weight q^6
    assert mallows_pmf((1, 2, 3, 4), spec) / mallows_pmf((4, 3, 2, 1), spec) == HALF**6


def test_q_zero_is_deterministic():
    rng = np.random.default_rng(0)
    spec = MallowsSpec(0.0, ("a", "b", "c"))
    assert {sample_mallows(spec, rng) for _ in range(20)} == {("c", "b", "a")}


def test_truncated_geometric_law():
    rng = np.random.default_rng(1)
    m, q = 5, 0.6
    draws = [truncated_geometric(q, m, rng) for _ in range(20_000)]
    pmf = {z: truncated_geometric_pmf(z, q, m) for z in range(1, m + 1)}
    assert abs(sum(pmf.values()) - 1) < 1e-12
    assert chi2_pvalue(draws, pmf) > 1e-3


@pytest.mark.parametrize("sampler", [sample_mallows, sample_mallows_reversed])
def test_sampler_chi_square_s3(sampler):
    rng = np.random.default_rng(2)
    spec = MallowsSpec.of_size(3, 0.5)
    exact = MallowsSpec.of_size(3, HALF)
    pmf = {p: mallows_pmf(p, exact) for p in itertools.permutations(range(1, 4))}
    draws = [sampler(spec, rng) for _ in range(20_000)]
    assert chi2_pvalue(draws, pmf) > 1e-3


def test_invalid_parameters():
    with pytest.raises(ValueError):
        MallowsSpec(1.0, (1, 2))
    with pytest.raises(ValueError):
        MallowsSpec(0.5, (1, 1))
    with pytest.raises(ValueError):
        mallows_pmf((1, 2, 5), MallowsSpec.of_size(3, HALF))


def test_infinite_prefix_first_letter_geometric():
    rng = np.random.default_rng(3)
    q = 0.5
    firsts = [sample_infinite_prefix(q, 1, rng)[0] for _ in range(10_000)]
    assert abs(np.mean(firsts) - 1 / (1 - q)) < 0.05
    prefix = sample_infinite_prefix(q, 50, rng)
    assert len(set(prefix)) == 50


def test_equilibrate_block_kernel_matches_mallows_block_s3():
    fam = CoxeterFamily(Family.A, 3)
    block = mallows_block(1, 3, HALF, 3, normalized=True)
    for w in elements(fam):
        row = dict(mul(block, basis(w, HALF)).items())
        assert equilibrate_block_kernel(w, 1, 3, HALF) == row


def test_equilibrate_subblock_matches_hecke_s4():
    fam = CoxeterFamily(Family.A, 4)
    block = mallows_block(2, 4, Fraction(1, 3), 4, normalized=True)
    for w in elements(fam):
        row = dict(mul(block, basis(w, Fraction(1, 3))).items())
        assert equilibrate_block_kernel(w, 2, 4, Fraction(1, 3)) == row


def test_equilibrate_block_sampler_law():
    rng = np.random.default_rng(4)
    w = GroupElement(CoxeterFamily(Family.A, 4), (2, 4, 1, 3))
    exact = equilibrate_block_kernel(w, 1, 3, HALF)
    draws = [equilibrate_block(w, 1, 3, 0.5, rng) for _ in range(20_000)]
    assert chi2_pvalue(draws, exact) > 1e-3
    assert all(d.position_word()[3] == w.position_word()[3] for d in draws[:100])


def test_inversions():
    assert inversions((1, 2, 3)) == 0
    assert inversions((3, 2, 1)) == 3
