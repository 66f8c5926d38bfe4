"""
Particle systems as walks on S_n and B_N.

Each ``make_*`` factory returns a :class:`SystemSpec`: the group, the
generating kernels with their clock rates, an initial element and a type
projection.  Small systems run through the generic drivers in
:mod:`heckewalk.walks`; the half-line and qTAZRP systems also have compiled
routes (:func:`simulate_halfline`, :func:`simulate_qtazrp`) for large windows.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Mapping, Optional, Sequence

import numpy as np

from . import _fast
from .coxeter import (
    CoxeterFamily, Family, GroupElement, apply_generator_left, elements,
    identity,
)
from .hecke import (
    HeckeElement, as_fraction, basis, embed, mallows_block, mul, product,
    require_stochastic, six_vertex_element,
)
from .mallows import equilibrate_block
from .walks import ExactKernel, SimKernel, step_basis

__all__ = [
    "SystemSpec", "WindowContactError", "NonMonotoneMapError",
    "make_masep", "make_halfline", "make_second_class_halfline",
    "make_six_vertex", "six_vertex_row_element", "sample_six_vertex",
    "Vertex", "VertexLattice", "make_asep_qm", "make_general_m_exclusion",
    "asep_qm_jump_probabilities", "QtazrpSpec", "QtazrpConfig", "make_qtazrp",
    "qtazrp_rates", "run_qtazrp", "project_types", "threshold_map",
    "lump_kernel", "window_guard", "halfline_classes", "simulate_halfline",
    "simulate_qtazrp", "HalflineRun", "QtazrpRun", "chunk_streams",
]

CHUNK = 4096


class WindowContactError(RuntimeError):
    """The finite window was too small for the requested horizon."""


class NonMonotoneMapError(ValueError):
    pass


@dataclass(frozen=True)
class SystemSpec:
    name: str
    fam: CoxeterFamily
    kernels: tuple
    initial: GroupElement
    type_map: Callable[[int], Hashable]
    schedule: str = "continuous"  # or "uniform" / "fixed" discrete schedules
    bonds: tuple = ()  # bond (generator) index touched by each kernel
    classes: tuple = ()  # label order, smallest = highest priority
    params: Mapping = field(default_factory=dict)

    def project(self, w: GroupElement) -> tuple:
        return project_types(w, self.type_map)

    def bond_events(self, events) -> list[tuple[float, int]]:
        """Map a walk's (time, kernel index) log to (time, bond) pairs."""
        return [(t, self.bonds[i]) for t, i in events]


# -- projections ----------------------------------------------------------

def threshold_map(thresholds: Sequence[int], labels: Sequence[Hashable]) -> Callable[[int], Hashable]:
    """Monotone map: types <= thresholds[0] -> labels[0], ..., rest -> labels[-1]."""
    if len(labels) != len(thresholds) + 1:
        raise ValueError("need one more label than thresholds")

    def type_map(t: int) -> Hashable:
        for cut, lab in zip(thresholds, labels):
            if t <= cut:
                return lab
        return labels[-1]
    return type_map


def project_types(state, type_map: Callable[[int], Hashable] | Mapping | None = None,
                  classes: Sequence[Hashable] = ()) -> tuple:
    """Labelled occupancy word: label of the type sitting at each position.

    With ``classes`` given the map must be monotone in the type order
    (class semantics), otherwise :class:`NonMonotoneMapError` is raised.
    """
    if isinstance(state, QtazrpConfig):
        return state.occupancy()
    word = state.position_word()
    if type_map is None:
        return word
    f = type_map.__getitem__ if isinstance(type_map, Mapping) else type_map
    if classes:
        rank = {c: i for i, c in enumerate(classes)}
        n = state.fam.rank
        types = range(1, n + 1) if state.fam.family is Family.A else \
            [t for t in range(-n, n + 1) if t]
        seen = [rank[f(t)] for t in types]
        if any(a > b for a, b in zip(seen, seen[1:])):
            raise NonMonotoneMapError("type map is not monotone")
    return tuple(f(t) for t in word)


def lump_kernel(kernel, type_map, fam: CoxeterFamily) -> dict[tuple, dict[tuple, Fraction]]:
    """Exact lumped kernel on projected configurations.

    Raises ValueError if two states with the same projection disagree, i.e.
    the projected process is not Markov for this kernel.
    """
    h = kernel if isinstance(kernel, HeckeElement) else kernel.exact
    out: dict[tuple, dict[tuple, Fraction]] = {}
    for w in elements(fam):
        src = project_types(w, type_map)
        row: dict[tuple, Fraction] = {}
        for w2, c in mul(h, basis(w, h.q)).items():
            dst = project_types(w2, type_map)
            row[dst] = row.get(dst, Fraction(0)) + c
        if src in out and out[src] != row:
            raise ValueError(f"kernel is not lumpable at {src}")
        out[src] = row
    return out


def window_guard(events, window: int) -> None:
    """Raise if any logged (time, bond) event touches the outermost bond.

    Bond i joins positions i and i+1 (1-based), so the outermost bond of a
    window of ``window`` positions is ``window - 1``.
    """
    for t, bond in events:
        if bond >= window - 1:
            raise WindowContactError(f"event at bond {bond} (t={t:g}) hit the window edge")


# -- multi-species ASEP ---------------------------------------------------

def _gen_element(fam: CoxeterFamily, s: int, q) -> HeckeElement:
    return basis(apply_generator_left(identity(fam), s), q)


def make_masep(n: int, q, time_mode: str = "continuous") -> SystemSpec:
    """Multi-species ASEP on n positions: one particle of each type 1..n.

    Smaller types have priority: type i overtakes type j > i to the right at
    rate 1, and is overtaken at rate q.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    fam = CoxeterFamily(Family.A, n)
    kernels = tuple(ExactKernel(_gen_element(fam, s, q), 1.0, name=f"s{s}") for s in fam.generators)
    schedule = "continuous" if time_mode == "continuous" else "uniform"
    return SystemSpec("masep", fam, kernels, identity(fam), lambda t: t, schedule,
                      tuple(fam.generators), tuple(range(1, n + 1)), {"n": n, "q": q})


def make_halfline(N: int, alpha, q) -> SystemSpec:
    """Half-line ASEP on B_N: bulk bonds at rate 1, boundary s_0 at rate alpha.

    Negative types are particles, positive types holes; the empty system is
    the identity.
    """
    if N < 1 or float(alpha) <= 0:
        raise ValueError("need N >= 1 and alpha > 0")
    fam = CoxeterFamily(Family.B, N)
    kernels = tuple(ExactKernel(_gen_element(fam, s, q), float(alpha) if s == 0 else 1.0,
                                name=f"s{s}") for s in fam.generators)
    return SystemSpec("halfline", fam, kernels, identity(fam),
                      lambda t: "particle" if t < 0 else "hole", "continuous",
                      tuple(fam.generators), ("particle", "hole"),
                      {"N": N, "alpha": alpha, "q": q})


def second_class_initial(fam: CoxeterFamily, k: int, l: int) -> GroupElement:
    """(l-1, l)(l-2, l-1)...(k, k+1): pi(k) = l, pi(i) = i - 1 for k < i <= l."""
    w = identity(fam)
    for s in range(k, l):
        w = apply_generator_left(w, s)
    return w


def make_second_class_halfline(N: int, alpha, q, k: int, l: int) -> SystemSpec:
    if not 1 <= k <= l <= N:
        raise ValueError(f"need 1 <= k <= l <= N, got k={k}, l={l}, N={N}")
    spec = make_halfline(N, alpha, q)

    def type_map(t: int) -> str:
        if t == -k:
            return "third"
        if t <= k - 1:
            return "first"
        if t == k:
            return "second"
        return "hole"
    return SystemSpec("second-class", spec.fam, spec.kernels,
                      second_class_initial(spec.fam, k, l), type_map, "continuous",
                      spec.bonds, ("first", "second", "third", "hole"),
                      {"N": N, "alpha": alpha, "q": q, "k": k, "l": l})


def second_class_in_system(w: GroupElement, k: int) -> bool:
    return w(k) > 0


# -- stochastic six-vertex ------------------------------------------------

def six_vertex_row_element(a: int, b: int, x, q, rank: int) -> HeckeElement:
    """W_{a,b} = Y_{(b-1,b),x} ... Y_{(a,a+1),x}."""
    fam = CoxeterFamily(Family.A, rank)
    return product(six_vertex_element(s, x, q, fam) for s in range(b - 1, a - 1, -1))


def make_six_vertex(a: int, b: int, rows: int, x, q, rank: Optional[int] = None) -> SystemSpec:
    """Fixed schedule W_{a-k,b-k} ... W_{a,b}; the row W_{a,b} acts first."""
    rank = b if rank is None else rank
    if not (a < b <= rank and a - rows >= 1):
        raise ValueError("rectangle does not fit in the group")
    fam = CoxeterFamily(Family.A, rank)
    kernels, bonds, layout = [], [], []
    for r in range(rows + 1):
        for s in range(a - r, b - r):
            kernels.append(ExactKernel(six_vertex_element(s, x, q, fam), name=f"Y{s}"))
            bonds.append(s)
            layout.append((r, s))
    return SystemSpec("six-vertex", fam, tuple(kernels), identity(fam), lambda t: t, "fixed",
                      tuple(bonds), tuple(range(1, rank + 1)),
                      {"a": a, "b": b, "rows": rows, "x": x, "q": q, "layout": tuple(layout)})


@dataclass(frozen=True)
class Vertex:
    row: int
    col: int
    in_colors: tuple[int, int]
    out_colors: tuple[int, int]

    def conserves(self) -> bool:
        return sorted(self.in_colors) == sorted(self.out_colors)


@dataclass
class VertexLattice:
    vertices: list[Vertex]

    def conserves_colors(self) -> bool:
        return all(v.conserves() for v in self.vertices)

    def rows_consistent(self) -> bool:
        """Within a row, the right output of one vertex feeds the next vertex."""
        by_row: dict[int, list[Vertex]] = {}
        for v in self.vertices:
            by_row.setdefault(v.row, []).append(v)
        for verts in by_row.values():
            for left, right in zip(verts, verts[1:]):
                if right.col != left.col + 1 or right.in_colors[0] != left.out_colors[1]:
                    return False
        return True

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["row", "col", "in_left", "in_right", "out_left", "out_right"])
        for v in self.vertices:
            writer.writerow([v.row, v.col, *v.in_colors, *v.out_colors])
        return buf.getvalue()


def sample_six_vertex(spec: SystemSpec, rng: np.random.Generator,
                      initial: Optional[GroupElement] = None) -> tuple[GroupElement, VertexLattice]:
    w = spec.initial if initial is None else initial
    verts = []
    for kernel, (r, s) in zip(spec.kernels, spec.params["layout"]):
        before = w.position_word()
        w = kernel.sample(w, rng)
        after = w.position_word()
        verts.append(Vertex(r, s, (before[s - 1], before[s]), (after[s - 1], after[s])))
    return w, VertexLattice(verts)


# -- ASEP(q, M) and general M-exclusion ----------------------------------

def _block_bounds(x: int, M: int) -> tuple[tuple[int, int], tuple[int, int]]:
    return ((x - 1) * M + 1, x * M), (x * M + 1, (x + 1) * M)


def _equilibrate(w, block, q, rng):
    a, b = block
    return equilibrate_block(w, a, b, q, rng) if a < b else w


def _block_element(block, q, rank) -> Optional[HeckeElement]:
    a, b = block
    return mallows_block(a, b, q, rank, normalized=True) if a < b else None


def _sandwich(middle: HeckeElement, blocks, q, rank) -> HeckeElement:
    factors = [m for m in (_block_element(bl, q, rank) for bl in blocks) if m is not None]
    return product(factors + [middle] + factors)


def _composite_kernel(x, M, n, q, middle_sampler, middle_exact, exact: bool, name):
    blocks = _block_bounds(x, M)
    qf = float(q)

    def sampler(w, rng):
        for bl in blocks:
            w = _equilibrate(w, bl, qf, rng)
        w = middle_sampler(w, rng)
        for bl in blocks:
            w = _equilibrate(w, bl, qf, rng)
        return w
    exact_el = _sandwich(middle_exact(), blocks, q, n) if exact else None
    return SimKernel(sampler, 1.0, exact_el, name=name)


def make_asep_qm(N: int, M: int, q) -> SystemSpec:
    """ASEP(q, M): N blocks of M positions; each generator equilibrates the two
    neighbouring blocks, updates the bond between them, and equilibrates again."""
    if N < 2 or M < 1:
        raise ValueError("need N >= 2 and M >= 1")
    n = N * M
    fam = CoxeterFamily(Family.A, n)
    exact = n <= 6
    kernels = []
    for x in range(1, N):
        s = x * M
        kernels.append(_composite_kernel(
            x, M, n, q,
            lambda w, rng, s=s: step_basis(w, s, q, rng),
            lambda s=s: _gen_element(fam, s, q), exact, f"asep-qm{x}"))
    return SystemSpec("asep-qm", fam, tuple(kernels), identity(fam), lambda t: t, "continuous",
                      tuple(x * M for x in range(1, N)), tuple(range(1, n + 1)),
                      {"N": N, "M": M, "q": q})


def make_general_m_exclusion(N: int, M: int, q, Y: HeckeElement) -> SystemSpec:
    """Same block sandwich with a caller-supplied stochastic Y on 2M letters
    (shifted onto blocks x, x+1) in place of the single bond update."""
    require_stochastic(Y)
    if Y.fam != CoxeterFamily(Family.A, 2 * M):
        raise ValueError("Y must live in H(S_2M)")
    if as_fraction(q) != Y.q:
        raise ValueError("Y has a different q")
    n = N * M
    fam = CoxeterFamily(Family.A, n)
    exact = n <= 6
    kernels = []
    for x in range(1, N):
        shifted = embed(Y, (x - 1) * M, n)
        inner = ExactKernel(shifted)
        kernels.append(_composite_kernel(
            x, M, n, q, inner.sample, lambda h=shifted: h, exact, f"m-excl{x}"))
    return SystemSpec("m-exclusion", fam, tuple(kernels), identity(fam), lambda t: t,
                      "continuous", tuple(x * M for x in range(1, N)),
                      tuple(range(1, n + 1)), {"N": N, "M": M, "q": q})


def asep_qm_jump_probabilities(n1: int, n2: int, M: int, q):
    """Single-species right/left jump probabilities between blocks with n1, n2 particles."""
    den = (1 - q**M) ** 2
    right = (1 - q**n1) * (1 - q ** (M - n2)) / den
    left = q ** (M - n2 + n1 + 1) * (1 - q**n2) * (1 - q ** (M - n1)) / den
    return right, left


# -- qTAZRP ---------------------------------------------------------------

@dataclass(frozen=True)
class QtazrpConfig:
    """First-class counts on sites 0..len-1 and the second-class site (or None)."""
    counts: tuple[int, ...]
    second: Optional[int] = None

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")
        if self.second is not None and not 0 <= self.second < len(self.counts):
            raise ValueError("second-class particle outside the sites")

    def occupancy(self) -> tuple:
        return tuple((c, int(self.second == j)) for j, c in enumerate(self.counts))


@dataclass(frozen=True)
class QtazrpSpec:
    sites: int
    q: float
    second_class_site: Optional[int] = None

    def initial(self) -> QtazrpConfig:
        return QtazrpConfig((0,) * self.sites, self.second_class_site)


def make_qtazrp(sites: int, q, second_class_site: Optional[int] = None) -> QtazrpSpec:
    if not 0 <= float(q) < 1:
        raise ValueError("q must lie in [0, 1)")
    if second_class_site is not None and not 0 <= second_class_site < sites:
        raise ValueError("second-class site outside the system")
    return QtazrpSpec(sites, q, second_class_site)


def qtazrp_rates(config: QtazrpConfig, q) -> list[tuple[str, int, object]]:
    """All transitions as (kind, site, rate); site -1 is the reservoir."""
    out = [("first", -1, 1 + 0 * q)]
    for j, l in enumerate(config.counts):
        if l:
            out.append(("first", j, 1 - q**l))
    if config.second is not None:
        l = config.counts[config.second]
        out.append(("second", config.second, q**l * (1 - q)))
    return out


def _apply_qtazrp(config: QtazrpConfig, kind: str, site: int) -> QtazrpConfig:
    counts = list(config.counts)
    second = config.second
    if kind == "first":
        if site >= 0:
            counts[site] -= 1
        if site + 1 < len(counts):
            counts[site + 1] += 1
    else:
        second = site + 1 if site + 1 < len(counts) else None
    return QtazrpConfig(tuple(counts), second)


def run_qtazrp(spec: QtazrpSpec, t_max: float, rng: np.random.Generator,
               initial: Optional[QtazrpConfig] = None) -> QtazrpConfig:
    """Reference Gillespie simulation (one rate per transition; slow)."""
    config = spec.initial() if initial is None else initial
    q = float(spec.q)
    t = 0.0
    while True:
        moves = qtazrp_rates(config, q)
        rates = np.array([float(r) for _, _, r in moves])
        total = rates.sum()
        t += rng.exponential(1.0 / total)
        if t > t_max:
            return config
        i = min(int(np.searchsorted(np.cumsum(rates), rng.random() * total, side="right")),
                len(moves) - 1)
        kind, site, _ = moves[i]
        config = _apply_qtazrp(config, kind, site)


# -- compiled routes ------------------------------------------------------

def chunk_streams(root_seed: int, trials: int):
    """Yield (chunk size, bit generator) pairs; chunk c draws from SeedSequence([root, c])."""
    for c, start in enumerate(range(0, trials, CHUNK)):
        yield min(CHUNK, trials - start), np.random.SFC64(np.random.SeedSequence([root_seed, c]))


HOLE, TRACKED, TRACKED_FLIPPED = _fast.HOLE, _fast.TRACKED, _fast.TRACKED_FLIPPED
FIRST_POS = 3
CLASS_LABELS = ("first", "third", "first", "first", "second", "hole")


def halfline_classes(N: int, k: int, l: int) -> np.ndarray:
    """Class word of the initial element (l-1,l)...(k,k+1) of B_N, see ``_fast``."""
    if not 1 <= k <= l <= N:
        raise ValueError(f"need 1 <= k <= l <= N, got k={k}, l={l}, N={N}")
    init = np.full(N, HOLE, np.int8)
    init[: k - 1] = FIRST_POS
    init[l - 1] = TRACKED
    return init


def type_class(t: int, k: int) -> int:
    """Class index of a signed type for tracked type k."""
    if t < -k:
        return 0
    if t == -k:
        return 1
    if t < 0:
        return 2
    if t < k:
        return 3
    if t == k:
        return 4
    return 5


@dataclass
class HalflineRun:
    flipped_end: np.ndarray
    flipped_mid: np.ndarray
    first_flip: np.ndarray
    contact: np.ndarray
    site_class: np.ndarray


def simulate_halfline(N: int, alpha: float, q: float, t_max: float, trials: int, seed: int,
                      init: Optional[np.ndarray] = None, k: int = 1, l: int = 1,
                      t_mid: float = 0.0, stop_on_flip: bool = False, guard: bool = True,
                      updates: Sequence[int] = (), obs_site: int = 0) -> HalflineRun:
    """Compiled half-line walk on B_N (window of N positions).

    ``updates`` are 1-based bonds (i joins i, i+1) applied after ``t_max``;
    ``obs_site`` (1-based, 0 = none) is read afterwards.
    """
    if stop_on_flip and q != 0:
        raise ValueError("stopping at the first flip is only valid for q = 0")
    init = halfline_classes(N, k, l) if init is None else np.asarray(init, np.int8)
    out = HalflineRun(np.zeros(trials, np.bool_), np.zeros(trials, np.bool_),
                      np.zeros(trials), np.zeros(trials, np.bool_), np.zeros(trials, np.int8))
    upd = np.asarray([b - 1 for b in updates], np.int64)
    start = 0
    for size, bg in chunk_streams(seed, trials):
        sl = slice(start, start + size)
        _fast._halfline_chunk(
            bg.ctypes.next_double, bg.ctypes.state_address, size, init, float(alpha),
            float(q), float(t_max), float(t_mid), stop_on_flip, guard, upd, obs_site - 1,
            out.flipped_end[sl], out.flipped_mid[sl], out.first_flip[sl], out.contact[sl],
            out.site_class[sl])
        start += size
    return out


@dataclass
class QtazrpRun:
    obs_a: np.ndarray
    obs_b: np.ndarray
    position: np.ndarray
    hit_time: np.ndarray
    contact: np.ndarray


def simulate_qtazrp(sites: int, q: float, t_max: float, trials: int, seed: int,
                    second_class_site: Optional[int] = None, target: int = 0,
                    observe: Sequence[int] = ()) -> QtazrpRun:
    """Compiled qTAZRP from empty sites; ``observe`` lists up to two sites whose
    counts are recorded at ``t_max``."""
    obs = list(observe) + [-1] * (2 - len(observe))
    lmax = 1
    while float(q) ** lmax > 0 and lmax < 100_000:
        lmax *= 2
    qpow = float(q) ** np.arange(lmax + 2, dtype=float)
    out = QtazrpRun(np.zeros(trials, np.int64), np.zeros(trials, np.int64),
                    np.zeros(trials, np.int64), np.zeros(trials), np.zeros(trials, np.bool_))
    s0 = -1 if second_class_site is None else int(second_class_site)
    start = 0
    for size, bg in chunk_streams(seed, trials):
        sl = slice(start, start + size)
        _fast._qtazrp_chunk(
            bg.ctypes.next_double, bg.ctypes.state_address, size, int(sites), qpow,
            float(t_max), s0, int(target), int(obs[0]), int(obs[1]),
            out.obs_a[sl], out.obs_b[sl], out.position[sl], out.hit_time[sl], out.contact[sl])
        start += size
    return out
