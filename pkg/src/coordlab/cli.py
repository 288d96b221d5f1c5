"""Command-line entry point: ``coordlab <command> ...``.

Exit codes: 0 ok, 1 bad flags, 2 infeasible graph, 3 instance too large for
enumeration, 4 degenerate theta, 5 closed-form beta bound below the
bisection value.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import dynamics
from .equilibrium import enumerate_maximizers
from .errors import (
    AugmentationNotFound,
    DegenerateTheta,
    DegreeSaturated,
    InfeasibleDegree,
    InvalidGraph,
    TooLarge,
)
from .game import GameSpec
from .graph import Graph, augment_degree, check_feasible, generate_circulant, is_connected, spectrum

EXIT_OK, EXIT_FLAGS, EXIT_GRAPH, EXIT_TOO_LARGE, EXIT_DEGENERATE, EXIT_BOUND = range(6)

CSV_COLUMNS = ["n", "k", "theta", "beta", "g_exact", "g_lower_bound", "expected_potential"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FLAGS, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class SweepSpec:
    n: int
    theta: float
    degrees: tuple[int, ...]
    beta_min: float = 0.0
    beta_max: float = 10.0
    beta_count: int = 21
    beta_scale: str = "linear"
    delta: float | None = None
    output_path: str | None = None

    def __post_init__(self):
        if self.beta_min < 0 or self.beta_max < self.beta_min:
            raise UsageError(f"beta grid needs 0 <= min <= max, got [{self.beta_min}, {self.beta_max}]")
        if self.beta_count < 1:
            raise UsageError("beta count must be positive")
        if self.beta_scale not in ("linear", "log"):
            raise UsageError(f"beta scale must be linear or log, got {self.beta_scale!r}")
        if self.beta_scale == "log" and self.beta_min <= 0:
            raise UsageError("log beta grid needs a positive minimum")
        if self.delta is not None and not 0 < self.delta < 1:
            raise UsageError("delta must lie in (0, 1)")
        for k in self.degrees:
            check_feasible(self.n, k)

    @classmethod
    def from_file(cls, path: str | Path) -> SweepSpec:
        data = json.loads(Path(path).read_text())
        data["degrees"] = tuple(int(k) for k in data["degrees"])
        try:
            return cls(**data)
        except TypeError as exc:
            raise UsageError(f"bad sweep spec file: {exc}") from None

    def betas(self) -> np.ndarray:
        if self.beta_scale == "log":
            return np.geomspace(self.beta_min, self.beta_max, self.beta_count)
        return np.linspace(self.beta_min, self.beta_max, self.beta_count)


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_graph(args) -> Graph:
    if args.graph:
        return Graph.from_json(args.graph)
    if args.n is None or args.k is None:
        raise UsageError("provide --graph PATH or both --n and --k")
    return generate_circulant(args.n, args.k)


def _add_graph_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help="graph JSON file")
    p.add_argument("--n", type=int, help="vertices of a canonical circulant (instead of --graph)")
    p.add_argument("--k", type=int, help="degree of a canonical circulant (instead of --graph)")


def cmd_graph_gen(args) -> int:
    g = generate_circulant(args.n, args.k)
    if args.augment:
        for _ in range(args.augment):
            g = augment_degree(g)
    spec = spectrum(g)
    summary = (
        f"n={g.n} k={g.k} edges={g.edge_count} connected={is_connected(g)} "
        f"lambda_1={spec.top:.12g} multiplicity={spec.multiplicity_of_top}\n"
    )
    if args.out:
        g.to_json(args.out)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(json.dumps(g.to_dict()) + "\n")
        sys.stderr.write(summary)
    return EXIT_OK


def cmd_equilibria(args) -> int:
    spec = GameSpec(_load_graph(args), args.theta)
    report = enumerate_maximizers(spec, include_nash=not args.no_nash)
    _emit_json(report.to_dict(), args.out)
    return EXIT_OK


def _write_sweep_csv(rows: list[dynamics.SweepRow], handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        values = asdict(row)
        writer.writerow(
            [v if isinstance(v, int) else format(v, ".17g") for v in (values[c] for c in CSV_COLUMNS)]
        )


def cmd_sweep(args) -> int:
    if args.spec:
        sweep_spec = SweepSpec.from_file(args.spec)
        if args.out:
            sweep_spec = SweepSpec(**{**asdict(sweep_spec), "output_path": args.out})
    else:
        if args.n is None or args.theta is None or not args.degrees:
            raise UsageError("sweep needs --spec FILE or --n, --theta and --degrees")
        sweep_spec = SweepSpec(
            n=args.n,
            theta=args.theta,
            degrees=tuple(int(k) for k in args.degrees.split(",")),
            beta_min=args.beta_min,
            beta_max=args.beta_max,
            beta_count=args.beta_count,
            beta_scale=args.beta_scale,
            delta=args.delta,
            output_path=args.out,
        )
    rows = dynamics.sweep(sweep_spec.n, sweep_spec.theta, sweep_spec.degrees, sweep_spec.betas())
    if sweep_spec.output_path:
        with open(sweep_spec.output_path, "w", newline="") as handle:
            _write_sweep_csv(rows, handle)
        notes = sys.stdout
    else:
        _write_sweep_csv(rows, sys.stdout)
        notes = sys.stderr
    if sweep_spec.delta is not None:
        for k in sweep_spec.degrees:
            spec = GameSpec(generate_circulant(sweep_spec.n, k), sweep_spec.theta)
            if spec.is_degenerate:
                notes.write(f"k={k} degenerate theta, beta_min undefined\n")
                continue
            bmin = dynamics.beta_min(spec, sweep_spec.delta)
            bound = dynamics.beta_bound_closed_form(spec.n, k, spec.theta, sweep_spec.delta)
            notes.write(f"k={k} beta_min={bmin:.9g} closed_form_bound={bound:.9g}\n")
    return EXIT_OK


def cmd_beta_min(args) -> int:
    spec = GameSpec(_load_graph(args), args.theta)
    bmin = dynamics.beta_min(spec, args.delta)
    bound = dynamics.beta_bound_closed_form(spec.n, spec.k, spec.theta, args.delta)
    dominates = bound >= bmin
    sys.stdout.write(f"beta_min={bmin:.9g} closed_form_bound={bound:.9g}\n")
    if args.out:
        _emit_json(
            {
                "n": spec.n,
                "k": spec.k,
                "theta": spec.theta,
                "delta": args.delta,
                "beta_min": bmin,
                "closed_form_bound": bound,
                "mass_at_beta_min": dynamics.optimal_mass(spec, bmin),
                "mass_at_bound": dynamics.optimal_mass(spec, bound),
                "bound_dominates": dominates,
            },
            args.out,
        )
    if not dominates:
        sys.stderr.write("closed-form bound is below the bisection beta_min\n")
        return EXIT_BOUND
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = GameSpec(_load_graph(args), args.theta)
    cfg = dynamics.LLLConfig(
        beta=args.beta,
        steps=args.steps,
        seed=args.seed,
        replicas=args.replicas,
        initial_profile=args.initial,
        burn_in=args.burn_in,
    )
    stats = dynamics.simulate(spec, cfg)
    payload = {
        "n": spec.n,
        "k": spec.k,
        "theta": spec.theta,
        "beta": cfg.beta,
        "steps": cfg.steps,
        "seed": cfg.seed,
        "replicas": cfg.replicas,
        "burn_in": cfg.effective_burn_in,
        **stats.to_dict(),
    }
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_bound(args) -> int:
    if args.beta is None and args.delta is None:
        raise UsageError("bound needs --beta and/or --delta")
    n, k, theta = args.n, args.k, args.theta
    check_feasible(n, k)
    payload: dict = {"n": n, "k": k, "theta": theta}
    if args.beta is not None:
        if args.beta < 0:
            raise UsageError("beta must be >= 0")
        payload["beta"] = args.beta
        payload["gibbs_lower_bound"] = dynamics.gibbs_lower_bound(n, k, theta, args.beta)
        if args.exact:
            spec = GameSpec(generate_circulant(n, k), theta)
            payload["g_exact"] = dynamics.optimal_mass(spec, args.beta)
    if args.delta is not None:
        payload["delta"] = args.delta
        payload["beta_bound"] = dynamics.beta_bound_closed_form(n, k, theta, args.delta)
    _emit_json(payload, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coordlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    graph = sub.add_parser("graph", help="graph utilities")
    graph_sub = graph.add_subparsers(dest="graph_command", required=True, parser_class=_Parser)
    gen = graph_sub.add_parser("gen", help="write the canonical circulant k-regular graph")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--augment", type=int, default=0, help="apply degree augmentation this many times")
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_graph_gen)

    eq = sub.add_parser("equilibria", help="brute-force Nash equilibria and potential maximizers")
    _add_graph_source(eq)
    eq.add_argument("--theta", type=float, required=True)
    eq.add_argument("--no-nash", action="store_true", help="skip Nash enumeration")
    eq.add_argument("--out")
    eq.set_defaults(func=cmd_equilibria)

    sw = sub.add_parser("sweep", help="exact optimal-profile mass over a (K, beta) grid, as CSV")
    sw.add_argument("--spec", help="JSON sweep spec file")
    sw.add_argument("--n", type=int)
    sw.add_argument("--theta", type=float)
    sw.add_argument("--degrees", help="comma-separated degrees, e.g. 2,4,6")
    sw.add_argument("--beta-min", type=float, default=0.0)
    sw.add_argument("--beta-max", type=float, default=10.0)
    sw.add_argument("--beta-count", type=int, default=21)
    sw.add_argument("--beta-scale", choices=["linear", "log"], default="linear")
    sw.add_argument("--delta", type=float)
    sw.add_argument("--out")
    sw.set_defaults(func=cmd_sweep)

    bm = sub.add_parser("beta-min", help="bisection beta_min next to the closed-form bound")
    _add_graph_source(bm)
    bm.add_argument("--theta", type=float, required=True)
    bm.add_argument("--delta", type=float, required=True)
    bm.add_argument("--out")
    bm.set_defaults(func=cmd_beta_min)

    sim = sub.add_parser("simulate", help="run log-linear learning chains")
    _add_graph_source(sim)
    sim.add_argument("--theta", type=float, required=True)
    sim.add_argument("--beta", type=float, required=True)
    sim.add_argument("--steps", type=int, required=True)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--replicas", type=int, default=1)
    sim.add_argument("--burn-in", type=int)
    sim.add_argument("--initial", help="initial profile such as 0101, default uniform-random")
    sim.add_argument("--out")
    sim.set_defaults(func=cmd_simulate)

    bd = sub.add_parser("bound", help="lower bound on the optimal mass and the closed-form beta")
    bd.add_argument("--n", type=int, required=True)
    bd.add_argument("--k", type=int, required=True)
    bd.add_argument("--theta", type=float, required=True)
    bd.add_argument("--beta", type=float)
    bd.add_argument("--delta", type=float)
    bd.add_argument("--exact", action="store_true", help="also report the exact mass")
    bd.add_argument("--out")
    bd.set_defaults(func=cmd_bound)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and EXIT_FLAGS for bad flags
        return exc.code if isinstance(exc.code, int) else EXIT_FLAGS
    try:
        return args.func(args)
    except (InfeasibleDegree, InvalidGraph, DegreeSaturated, AugmentationNotFound) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_GRAPH
    except TooLarge as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_TOO_LARGE
    except DegenerateTheta as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DEGENERATE
    except (UsageError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FLAGS


if __name__ == "__main__":
    sys.exit(main())
