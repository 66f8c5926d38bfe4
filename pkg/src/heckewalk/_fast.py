"""
Compiled event loops for the large systems.

Randomness comes from a numpy bit generator called through its ctypes
interface (``next_double(state)``), so every chunk of trials owns an
explicit, seedable stream.

Half-line classes
-----------------
The B_N walk with a tracked type ``k`` is simulated after lumping types into
six classes, each an orbit of a parabolic subgroup acting on types, listed in
the signed order:

    0: -N..-(k+1)   1: -k   2: -(k-1)..-1   3: 1..k-1   4: k   5: k+1..N

The sign flip at position 1 maps class c to 5 - c; classes 3..5 are the
positive types (an ascent for s_0).  Class 5 is the hole.  Bonds whose left
class is smaller fire at rate 1, bonds whose left class is larger at rate q;
both sets are kept as index lists so that every drawn event is a real move.
"""

import math

import numpy as np
from numba import njit

HOLE = 5
TRACKED = 4
TRACKED_FLIPPED = 1


@njit(cache=True, inline="always")
def _set_add(lst, pos, size, i):
    pos[i] = size
    lst[size] = i
    return size + 1


@njit(cache=True, inline="always")
def _set_remove(lst, pos, size, i):
    j = pos[i]
    last = lst[size - 1]
    lst[j] = last
    pos[last] = j
    pos[i] = -1
    return size - 1


@njit(cache=True)
def _halfline_chunk(next_double, state, n_trials, init, alpha, q, t_max, t_mid,
                    stop_on_flip, guard, updates, obs_site,
                    out_flip_end, out_flip_mid, out_first_flip, out_contact,
                    out_site_obs):
    """Run ``n_trials`` trajectories of the lumped half-line walk.

    With ``guard`` set, a trial stops and is flagged as soon as a non-hole
    reaches the last position (the finite window was too small); without it
    the system is the finite B_N walk itself.  After time ``t_max`` the bonds in ``updates`` (0-based; bond i joins
    positions i and i+1) receive one discrete Hecke update each, in order,
    and the class at ``obs_site`` is stored (skipped when obs_site < 0).
    """
    n = init.shape[0]
    cls = np.empty(n, np.int8)
    fwd = np.empty(n, np.int64)
    fwd_pos = np.full(n, -1, np.int64)
    bwd = np.empty(n, np.int64)
    bwd_pos = np.full(n, -1, np.int64)
    use_bwd = q > 0.0
    for trial in range(n_trials):
        for i in range(n):
            fwd_pos[i] = -1
            bwd_pos[i] = -1
        nf = 0
        nb = 0
        flipped = False
        for i in range(n):
            cls[i] = init[i]
            if init[i] == TRACKED_FLIPPED:
                flipped = True
        for i in range(n - 1):
            if cls[i] < cls[i + 1]:
                nf = _set_add(fwd, fwd_pos, nf, i)
            elif use_bwd and cls[i] > cls[i + 1]:
                nb = _set_add(bwd, bwd_pos, nb, i)
        contact = False
        first_flip = np.inf
        flip_mid = flipped
        mid_done = t_mid <= 0.0
        t = 0.0
        while True:
            lam = alpha + nf + q * nb
            t += -math.log(1.0 - next_double(state)) / lam
            if not mid_done and t > t_mid:
                flip_mid = flipped
                mid_done = True
            if t > t_max:
                break
            u = next_double(state) * lam
            if u < alpha:
                c = cls[0]
                if c >= 3 or u < alpha * q:
                    cls[0] = 5 - c
                    if c == TRACKED:
                        flipped = True
                        if t < first_flip:
                            first_flip = t
                    elif c == TRACKED_FLIPPED:
                        flipped = False
                    lo = 0
                    hi = 0
                else:
                    continue
            else:
                u -= alpha
                if u < nf:
                    k = int(u)
                    if k >= nf:
                        k = nf - 1
                    i = fwd[k]
                else:
                    k = int((u - nf) / q)
                    if k >= nb:
                        k = nb - 1
                    i = bwd[k]
                a = cls[i]
                cls[i] = cls[i + 1]
                cls[i + 1] = a
                if guard and i + 1 == n - 1 and cls[n - 1] != HOLE:
                    contact = True
                    break
                lo = i - 1 if i > 0 else 0
                hi = i + 1
            if hi > n - 2:
                hi = n - 2
            for j in range(lo, hi + 1):
                a = cls[j]
                b = cls[j + 1]
                want_f = a < b
                want_b = use_bwd and a > b
                if want_f:
                    if fwd_pos[j] < 0:
                        nf = _set_add(fwd, fwd_pos, nf, j)
                elif fwd_pos[j] >= 0:
                    nf = _set_remove(fwd, fwd_pos, nf, j)
                if want_b:
                    if bwd_pos[j] < 0:
                        nb = _set_add(bwd, bwd_pos, nb, j)
                elif bwd_pos[j] >= 0:
                    nb = _set_remove(bwd, bwd_pos, nb, j)
            if stop_on_flip and flipped:
                break
        if not mid_done:
            flip_mid = flipped
        out_flip_end[trial] = flipped
        out_flip_mid[trial] = flip_mid
        out_first_flip[trial] = first_flip
        out_contact[trial] = contact
        if obs_site >= 0:
            for j in range(updates.shape[0]):
                i = updates[j]
                a = cls[i]
                b = cls[i + 1]
                if a < b or (a > b and next_double(state) < q):
                    cls[i] = b
                    cls[i + 1] = a
            out_site_obs[trial] = cls[obs_site]


@njit(cache=True)
def _qtazrp_chunk(next_double, state, n_trials, n_sites, qpow, t_max, second_start,
                  target, obs_a, obs_b,
                  out_obs_a, out_obs_b, out_pos, out_hit, out_contact):
    """qTAZRP on sites 0..n_sites-1 fed by a rate-1 reservoir at site -1.

    A site with l first-class particles fires at rate 1 - q^l; the
    second-class particle (if ``second_start >= 0``) jumps at rate
    q^l (1 - q).  Candidate sites are those holding a particle; each is
    proposed at rate 1 and accepted with the true rate.  Particles leaving the
    last site are dropped.  ``out_hit`` is the first time the second-class
    particle reaches ``target``.  ``out_contact`` flags a second-class run in
    which anything reached the last site.
    """
    counts = np.zeros(n_sites, np.int64)
    cand = np.empty(n_sites, np.int64)
    cand_pos = np.full(n_sites, -1, np.int64)
    lmax = qpow.shape[0] - 2
    for trial in range(n_trials):
        for j in range(n_sites):
            counts[j] = 0
            cand_pos[j] = -1
        nc = 0
        h = second_start
        if h >= 0:
            nc = _set_add(cand, cand_pos, nc, h)
        hit = np.inf
        if h >= 0 and h >= target:
            hit = 0.0
        contact = False
        t = 0.0
        while True:
            lam = 1.0 + nc
            t += -math.log(1.0 - next_double(state)) / lam
            if t > t_max:
                break
            u = next_double(state) * lam
            if u < 1.0:
                counts[0] += 1
                if cand_pos[0] < 0:
                    nc = _set_add(cand, cand_pos, nc, 0)
                continue
            u -= 1.0
            k = int(u)
            if k >= nc:
                k = nc - 1
            frac = u - k
            j = cand[k]
            l = counts[j]
            if l > lmax:
                l = lmax
            if frac < 1.0 - qpow[l]:
                counts[j] -= 1
                if counts[j] == 0 and j != h:
                    nc = _set_remove(cand, cand_pos, nc, j)
                if j + 1 < n_sites:
                    counts[j + 1] += 1
                    if cand_pos[j + 1] < 0:
                        nc = _set_add(cand, cand_pos, nc, j + 1)
                    if second_start >= 0 and j + 1 == n_sites - 1:
                        contact = True
                        break
            elif j == h and frac < 1.0 - qpow[l + 1]:
                if counts[h] == 0:
                    nc = _set_remove(cand, cand_pos, nc, h)
                h += 1
                if cand_pos[h] < 0:
                    nc = _set_add(cand, cand_pos, nc, h)
                if h >= target and t < hit:
                    hit = t
                if h >= n_sites - 1:
                    contact = True
                    break
        if obs_a >= 0:
            out_obs_a[trial] = counts[obs_a]
        if obs_b >= 0:
            out_obs_b[trial] = counts[obs_b]
        out_pos[trial] = h
        out_hit[trial] = hit
        out_contact[trial] = contact
