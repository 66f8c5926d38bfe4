"""Command line entry point: ``heckewalk <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import systems
from .algebra_checks import run_algebra_checks
from .coxeter import CoxeterFamily, Family
from .mallows import MallowsSpec, mallows_pmf, sample_mallows
from .walks import run_continuous, run_discrete

EXPERIMENTS = ("exit", "survival", "qtazrp-marginal", "second-class-speed")
MODELS = ("masep", "halfline", "second-class", "six-vertex", "asep-qm", "qtazrp")


def _number(text: str):
    """Parse '1/2' as a Fraction, '0.5' as a float, '3' as an int."""
    if "/" in text:
        return Fraction(text)
    try:
        return int(text)
    except ValueError:
        return float(text)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    return json.loads(Path(path).read_text())


def _write(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# -- commands -------------------------------------------------------------

def cmd_algebra_check(args) -> int:
    fam = CoxeterFamily(Family(args.family), args.rank)
    results = run_algebra_checks(fam, [_number(q) for q in args.q], args.triples, args.pairs, args.seed)
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 0 if all(ok for _, ok in results) else 1


def cmd_sample_mallows(args) -> int:
    spec = MallowsSpec.of_size(args.n, _number(args.q))
    rng = np.random.default_rng(args.seed)
    samples = [sample_mallows(spec, rng) for _ in range(args.trials)]
    if not args.histogram:
        for s in samples:
            print(" ".join(map(str, s)))
        return 0
    counts = Counter(samples)
    print("arrangement,count,frequency,pmf")
    for arr in sorted(counts):
        pmf = float(mallows_pmf(arr, spec))
        print(f"{' '.join(map(str, arr))},{counts[arr]},{counts[arr] / args.trials:.6g},{pmf:.6g}")
    return 0


def _build_model(model: str, cfg: dict):
    q = _number(str(cfg.get("q", "1/2")))
    if model == "masep":
        return systems.make_masep(cfg.get("rank", 4), q, cfg.get("time_mode", "continuous"))
    if model == "halfline":
        return systems.make_halfline(cfg.get("window", 4), _number(str(cfg.get("alpha", "1/2"))), q)
    if model == "second-class":
        return systems.make_second_class_halfline(cfg.get("window", 4), _number(str(cfg.get("alpha", "1/2"))),
                                                  q, cfg.get("k", 1), cfg.get("l", 2))
    if model == "six-vertex":
        return systems.make_six_vertex(cfg["a"], cfg["b"], cfg.get("rows", 1),
                                       _number(str(cfg.get("x", "1/2"))), q, cfg.get("rank"))
    if model == "asep-qm":
        return systems.make_asep_qm(cfg.get("N", 2), cfg.get("M", 2), q)
    if model == "qtazrp":
        return systems.make_qtazrp(cfg.get("sites", 10), float(q), cfg.get("s"))
    raise ValueError(f"unknown model {model!r}")


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    spec = _build_model(args.model, cfg)
    trials = int(cfg.get("trials", 1))
    t_max = float(cfg.get("t_max", 1.0))
    root = np.random.SeedSequence(int(cfg.get("seed", 0)))
    lines = []
    lattices = []
    for i, child in enumerate(root.spawn(trials)):
        rng = np.random.default_rng(child)
        if isinstance(spec, systems.QtazrpSpec):
            final = systems.run_qtazrp(spec, t_max, rng)
            lines.append({"trial": i, "counts": list(final.counts), "second": final.second})
            continue
        if spec.schedule == "fixed":
            final, lattice = systems.sample_six_vertex(spec, rng)
            lattices.append(lattice)
            events = len(spec.kernels)
        elif spec.schedule == "uniform":
            st = run_discrete(spec.initial, spec.kernels, int(cfg.get("steps", 10)), rng)
            final, events = st.current, len(st.events or ())
        else:
            st = run_continuous(spec.initial, spec.kernels, t_max, rng, log=True)
            if "window" in cfg and cfg.get("guard", False):
                systems.window_guard(spec.bond_events(st.events), spec.fam.rank)
            final, events = st.current, len(st.events)
        lines.append({"trial": i, "word": list(final.position_word()),
                      "labels": [str(x) for x in spec.project(final)], "events": events})
    _write("".join(json.dumps(line, sort_keys=True) + "\n" for line in lines), args.out)
    if args.lattice_csv and lattices:
        Path(args.lattice_csv).write_text("".join(lat.to_csv() for lat in lattices[:1]))
    return 0


def _run_experiment(name: str, cfg: dict):
    from . import experiments as ex
    kw = {k: v for k, v in cfg.items() if k not in ("zbound", "format")}
    if name == "exit":
        return ex.estimate_exit(**kw)
    if name == "survival":
        return ex.estimate_survival(**kw)
    if name == "qtazrp-marginal":
        return ex.estimate_qtazrp_marginal(**kw)
    if name == "second-class-speed":
        if "alphas" in kw:
            kw["alphas"] = tuple(kw["alphas"])
        return ex.estimate_second_class_speed(**kw)
    raise ValueError(f"unknown experiment {name!r}")


def cmd_experiment(args) -> int:
    from .experiments import PlateauError, report
    cfg = _load_config(args.config)
    zbound = float(cfg.get("zbound", 4.0))
    fmt = cfg.get("format", "json" if args.out and args.out.endswith(".json") else "csv")
    status = 0
    try:
        result = _run_experiment(args.name, cfg)
    except PlateauError as exc:
        print(f"plateau check failed: {exc}", file=sys.stderr)
        result, status = exc.result, 1
    _write(report(result, fmt), args.out)
    z = result.max_abs_z()
    print(f"max |z| = {z:.3f} (bound {zbound:g})", file=sys.stderr)
    return status if z <= zbound else 1


def cmd_theory(args) -> int:
    from .experiments import theory_value
    params = {}
    for item in args.params or ():
        for pair in item.split(","):
            key, _, val = pair.partition("=")
            params[key.strip()] = _number(val.strip())
    tv = theory_value(args.name, params)
    print(f"{tv.value:.12g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heckewalk")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("algebra-check", help="exact Hecke algebra identities")
    a.add_argument("--family", choices=("A", "B"), default="A")
    a.add_argument("--rank", type=int, default=4)
    a.add_argument("--q", nargs="+", default=["0", "1/3", "1/2", "1"])
    a.add_argument("--triples", type=int, default=100)
    a.add_argument("--pairs", type=int, default=50)
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_algebra_check)

    m = sub.add_parser("sample-mallows", help="draw Mallows permutations")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--q", required=True)
    m.add_argument("--trials", type=int, default=1)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--histogram", action="store_true")
    m.set_defaults(func=cmd_sample_mallows)

    s = sub.add_parser("simulate", help="run a particle system, one JSON line per trial")
    s.add_argument("--model", choices=MODELS, required=True)
    s.add_argument("--config")
    s.add_argument("--out")
    s.add_argument("--lattice-csv", help="six-vertex: write the first lattice as CSV")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("experiment", help="Monte Carlo estimate against its limit")
    e.add_argument("--name", choices=EXPERIMENTS, required=True)
    e.add_argument("--config")
    e.add_argument("--out")
    e.set_defaults(func=cmd_experiment)

    t = sub.add_parser("theory", help="print a closed-form value")
    t.add_argument("--name", required=True)
    t.add_argument("--params", nargs="*", help="key=value pairs, e.g. k=2 l=3 alpha=1")
    t.set_defaults(func=cmd_theory)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
