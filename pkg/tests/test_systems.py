from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from heckewalk.coxeter import CoxeterFamily, Family, GroupElement, elements, identity
from heckewalk.hecke import NonStochasticError, basis, is_stochastic
from heckewalk.mallows import MallowsSpec, mallows_pmf
from heckewalk.systems import (
    NonMonotoneMapError, QtazrpConfig, WindowContactError, _gen_element,
    asep_qm_jump_probabilities, halfline_classes, lump_kernel, make_asep_qm,
    make_general_m_exclusion, make_halfline, make_masep, make_qtazrp,
    make_second_class_halfline, make_six_vertex, project_types, qtazrp_rates,
    run_qtazrp, sample_six_vertex, simulate_halfline, simulate_qtazrp,
    six_vertex_row_element, threshold_map, type_class, window_guard,
)
from heckewalk.walks import mallows_stationary, uniformization_series

HALF = Fraction(1, 2)


def test_masep_single_bond_rates():
    spec = make_masep(2, HALF)
    (k,) = spec.kernels
    e = identity(spec.fam)
    swapped = GroupElement(spec.fam, (2, 1))
    assert k.row(e) == {swapped: 1}
    assert k.row(swapped) == {e: HALF, swapped: HALF}


def test_masep_projection_is_single_species_asep_s3():
    spec = make_masep(3, HALF)
    tm = threshold_map([1], ["particle", "hole"])
    for s, k in zip(spec.bonds, spec.kernels):
        lumped = lump_kernel(k, tm, spec.fam)
        for config, row in lumped.items():
            a, b = config[s - 1], config[s]
            moved = config[: s - 1] + (b, a) + config[s + 1:]
            if a == b:
                assert row == {config: 1}
            elif a == "particle":
                assert row == {moved: 1}
            else:
                assert row == {moved: HALF, config: HALF}


@pytest.mark.parametrize("cuts", [[1], [2], [1, 2], [1, 3], [2, 3], [1, 2, 3]])
def test_monotone_projections_are_lumpable_s4(cuts):
    spec = make_masep(4, Fraction(1, 3))
    tm = threshold_map(cuts, list(range(len(cuts) + 1)))
    for k in spec.kernels:
        lump_kernel(k, tm, spec.fam)


def test_non_monotone_map_rejected():
    w = identity(CoxeterFamily(Family.A, 3))
    with pytest.raises(NonMonotoneMapError):
        project_types(w, {1: "hole", 2: "particle", 3: "hole"}, classes=("particle", "hole"))
    assert project_types(w, None) == (1, 2, 3)


def test_halfline_boundary_rules():
    spec = make_halfline(3, HALF, HALF)
    boundary = spec.kernels[0]
    assert boundary.rate == 0.5
    e = identity(spec.fam)
    (after,), = [list(boundary.row(e))]
    assert spec.project(after) == ("particle", "hole", "hole")
    q0 = make_halfline(3, HALF, 0).kernels[0]
    assert q0.row(after) == {after: 1}


def test_closed_halfline_stationary_law_is_mallows():
    # every kernel of the closed B_N walk satisfies detailed balance w.r.t. Mallows,
    # whatever the boundary rate
    spec = make_halfline(2, Fraction(3, 10), HALF)
    pi = mallows_stationary(spec.fam, HALF)
    for k in spec.kernels:
        for w in pi:
            for w2, c in k.row(w).items():
                assert pi[w] * c == pi[w2] * k.row(w2).get(w, 0)


def test_second_class_initial_projection():
    spec = make_second_class_halfline(6, HALF, HALF, 2, 4)
    assert spec.initial(2) == 4
    assert spec.project(spec.initial) == ("first", "hole", "hole", "second", "hole", "hole")
    with pytest.raises(ValueError):
        make_second_class_halfline(3, HALF, HALF, 3, 2)


def test_exited_particle_never_returns_at_q0():
    k = 2
    spec = make_second_class_halfline(3, 1, 0, k, 3)
    for w in elements(spec.fam):
        if w(k) < 0:
            for kern in spec.kernels:
                assert all(w2(k) < 0 for w2 in kern.row(w))


def test_six_vertex_endpoints_and_lattice():
    rng = np.random.default_rng(0)
    still = make_six_vertex(3, 5, 2, 0, HALF)
    final, lattice = sample_six_vertex(still, rng)
    assert final == still.initial
    assert all(v.in_colors == v.out_colors for v in lattice.vertices)
    full = make_six_vertex(2, 4, 1, 1, HALF)
    final, lattice = sample_six_vertex(full, rng)
    # from the identity every bond is an ascent, so x = 1 swaps every time
    assert all(v.in_colors[::-1] == v.out_colors for v in lattice.vertices)
    spec = make_six_vertex(3, 5, 2, Fraction(1, 3), HALF)
    for _ in range(50):
        _, lattice = sample_six_vertex(spec, rng)
        assert lattice.conserves_colors() and lattice.rows_consistent()
    assert lattice.to_csv().splitlines()[0] == "row,col,in_left,in_right,out_left,out_right"
    assert len(lattice.to_csv().splitlines()) == 1 + 6


def test_six_vertex_row_elements_stochastic_s4():
    for x in (0, Fraction(1, 3), 1):
        for a, b in [(1, 4), (2, 4), (1, 3)]:
            assert is_stochastic(six_vertex_row_element(a, b, x, HALF, 4))


def test_asep_qm_with_m1_is_masep():
    spec = make_asep_qm(4, 1, HALF)
    plain = make_masep(4, HALF)
    assert [k.exact for k in spec.kernels] == [k.element for k in plain.kernels]


def test_asep_qm_jump_probability_values():
    right, left = asep_qm_jump_probabilities(1, 0, 2, HALF)
    assert right == Fraction(2, 3)
    assert left == 0


def lumped_jumps(kernel, fam, n1, n2, M):
    """Right/left single-species jump probabilities read from the exact kernel."""
    particles = n1 + n2
    word = [1] * n1 + [0] * (M - n1) + [1] * n2 + [0] * (M - n2)
    types_p = iter(range(1, particles + 1))
    types_h = iter(range(particles + 1, 2 * M + 1))
    pos_word = [next(types_p) if b else next(types_h) for b in word]
    images = [0] * (2 * M)
    for pos, t in enumerate(pos_word, 1):
        images[t - 1] = pos
    w = GroupElement(fam, tuple(images))
    right = left = Fraction(0)
    for w2, c in kernel.row(w).items():
        n1_new = sum(1 for t in w2.position_word()[:M] if t <= particles)
        if n1_new == n1 - 1:
            right += c
        elif n1_new == n1 + 1:
            left += c
    return right, left


@pytest.mark.parametrize("q", [HALF, Fraction(1, 3)])
def test_asep_qm_lumped_jumps_exact(q):
    spec = make_asep_qm(2, 2, q)
    (kernel,) = spec.kernels
    for n1 in range(3):
        for n2 in range(3):
            assert lumped_jumps(kernel, spec.fam, n1, n2, 2) == asep_qm_jump_probabilities(n1, n2, 2, q)


def test_asep_qm_blocks_stay_in_equilibrium():
    q = HALF
    spec = make_asep_qm(2, 2, q)
    (kernel,) = spec.kernels
    for w in elements(spec.fam):
        by_contents = {}
        for w2, c in kernel.row(w).items():
            pw = w2.position_word()
            key = (frozenset(pw[:2]), frozenset(pw[2:]))
            by_contents.setdefault(key, {})[pw] = c
        for (b1, b2), cond in by_contents.items():
            z = sum(cond.values())
            for pw, c in cond.items():
                expected = mallows_pmf(pw[:2], MallowsSpec(q, tuple(sorted(b1)))) * \
                    mallows_pmf(pw[2:], MallowsSpec(q, tuple(sorted(b2))))
                assert c / z == expected


def test_asep_qm_sampler_matches_exact():
    rng = np.random.default_rng(1)
    spec = make_asep_qm(2, 2, HALF)
    (kernel,) = spec.kernels
    w = GroupElement(spec.fam, (3, 1, 4, 2))
    row = kernel.row(w)
    draws = Counter(kernel.sample(w, rng) for _ in range(5000))
    keys = list(row)
    assert set(draws) <= set(keys)
    assert stats.chisquare([draws[x] for x in keys], [float(row[x]) * 5000 for x in keys]).pvalue > 1e-3


def test_general_m_exclusion_specializations():
    q = HALF
    fam2m = CoxeterFamily(Family.A, 4)
    y_bond = _gen_element(fam2m, 2, q)
    spec = make_general_m_exclusion(3, 2, q, y_bond)
    assert [k.exact for k in spec.kernels] == [k.exact for k in make_asep_qm(3, 2, q).kernels]
    y_e = basis(identity(fam2m), q)
    spec_e = make_general_m_exclusion(2, 2, q, y_e)
    for w in elements(spec_e.fam):
        blocks = (frozenset(w.position_word()[:2]), frozenset(w.position_word()[2:]))
        for w2 in spec_e.kernels[0].row(w):
            assert (frozenset(w2.position_word()[:2]), frozenset(w2.position_word()[2:])) == blocks
    with pytest.raises(NonStochasticError):
        make_general_m_exclusion(2, 2, q, y_e.scale(2))


def test_qtazrp_rates():
    q = 0.5
    rates = dict(((kind, site), r) for kind, site, r in qtazrp_rates(QtazrpConfig((0, 2, 0), 0), q))
    assert rates[("second", 0)] == 1 - q
    assert ("first", 0) not in rates  # an empty site never fires
    assert rates[("first", 1)] == 1 - q**2
    l = 3
    assert abs((1 - q**l) + q**l * (1 - q) - (1 - q ** (l + 1))) < 1e-15
    with pytest.raises(ValueError):
        QtazrpConfig((1, -1))
    with pytest.raises(ValueError):
        make_qtazrp(3, 1.0)


def test_qtazrp_fast_matches_reference():
    rng = np.random.default_rng(2)
    spec = make_qtazrp(4, 0.5)
    ref = np.array([run_qtazrp(spec, 3.0, rng).counts[2] for _ in range(4000)])
    fast = simulate_qtazrp(4, 0.5, 3.0, 4000, seed=3, observe=(2,)).obs_a
    se = np.sqrt(ref.var() / 4000 + fast.var() / 4000)
    assert abs(ref.mean() - fast.mean()) < 4 * se


def test_qtazrp_merging_second_class_gives_plain_law():
    rng = np.random.default_rng(4)
    spec2 = make_qtazrp(4, 0.5, second_class_site=1)
    plain = make_qtazrp(4, 0.5)
    start = QtazrpConfig((0, 1, 0, 0))
    merged, direct = [], []
    for _ in range(3000):
        c = run_qtazrp(spec2, 2.0, rng)
        merged.append([n + (c.second == j) for j, n in enumerate(c.counts)])
        direct.append(run_qtazrp(plain, 2.0, rng, initial=start).counts)
    merged, direct = np.array(merged, float), np.array(direct, float)
    se = np.sqrt(merged.var(0) / 3000 + direct.var(0) / 3000) + 1e-12
    assert np.all(np.abs(merged.mean(0) - direct.mean(0)) < 4 * se)


def test_window_guard():
    window_guard([(0.1, 1), (0.2, 2)], 10)
    with pytest.raises(WindowContactError):
        window_guard([(0.1, 1), (0.3, 9)], 10)


def test_halfline_classes_are_lumpable_b3():
    # the six parabolic classes give an exact Markov quotient
    for k in (1, 2, 3):
        spec = make_halfline(3, Fraction(3, 10), HALF)
        for kern in spec.kernels:
            lump_kernel(kern, lambda t: type_class(t, k), spec.fam)


@pytest.mark.parametrize("N,k,l", [(3, 1, 3), (3, 2, 3), (4, 1, 3)])
def test_fast_halfline_matches_exact(N, k, l):
    alpha, q, t = Fraction(3, 10), HALF, Fraction(1)
    spec = make_second_class_halfline(N, alpha, q, k, l)
    rates = [alpha if s == 0 else 1 for s in spec.fam.generators]
    exact = uniformization_series(spec.initial, spec.kernels, t, rates=rates).probability(lambda w: w(k) < 0)
    run = simulate_halfline(N, 0.3, 0.5, 1.0, 40_000, seed=7, k=k, l=l, guard=False)
    est = run.flipped_end.mean()
    se = np.sqrt(est * (1 - est) / 40_000)
    assert abs(est - exact) < 4 * se


def test_fast_halfline_deterministic_and_chunked():
    a = simulate_halfline(50, 0.3, 0.5, 5.0, 5000, seed=11, k=1, l=3)
    b = simulate_halfline(50, 0.3, 0.5, 5.0, 5000, seed=11, k=1, l=3)
    assert np.array_equal(a.flipped_end, b.flipped_end)
    assert np.array_equal(a.first_flip, b.first_flip)
    assert halfline_classes(5, 2, 4).tolist() == [3, 5, 5, 4, 5]


def test_fast_halfline_guard_flags_contact():
    run = simulate_halfline(3, 1.0, 0.0, 50.0, 200, seed=1, k=1, l=1)
    assert run.contact.all()
