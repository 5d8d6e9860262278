"""Command-line interface: solve, span census, verification, compilation.

Exit codes: 0 success, 2 bad usage, 3 input error, 4 budget guard,
5 verification failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .circuits import (
    QubitBudgetError,
    build_ansatz,
    circuit_from_text,
    circuit_stats,
    circuit_to_text,
    eval_permutation,
    lower_to_linear_topology,
    solver_ansatz,
)
from .dsm import DsmJob, extract_dsm
from .gf2 import bruhat_span_size
from .optimizer import QuperConfig, quper_solve, random_baseline
from .problems import (
    GipInstance,
    QapInstance,
    load_qaplib,
    parse_adjacency_csv,
    parse_edge_list,
    random_gip,
    random_qap,
    relative_optimality_gap,
)
from .projection import project_hungarian, project_random_order
from .verify import run_suites

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_BUDGET = 4
EXIT_VERIFY = 5


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ansatz", default="bruhat", choices=["bruhat", "borel", "sel"])
    p.add_argument("--ancilla", type=int, default=0, metavar="M")
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--out", default=None, help="RunReport JSON path")
    p.add_argument("--trace", default=None, help="JSONL trace path")


def _load_qap(args) -> QapInstance:
    if args.instance:
        name = Path(args.instance).stem
        sln = _read(args.sln) if args.sln else None
        try:
            return load_qaplib(_read(args.instance), sln, name=name)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    n, seed = args.random
    return random_qap(int(n), int(seed))


def _load_gip(args) -> GipInstance:
    if args.graphs:
        mats = []
        for path in args.graphs:
            text = _read(path)
            try:
                if "," in text:
                    mats.append(parse_adjacency_csv(text))
                else:
                    mats.append(parse_edge_list(text))
            except ValueError as exc:
                raise InputError(str(exc)) from exc
        try:
            return GipInstance(mats[0], mats[1], name="files")
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    return random_gip(args.random, args.seed, span_restricted=args.span_restricted)


def _run_solver(problem, args, known_optimum=None) -> dict:
    cfg = QuperConfig(
        ansatz=args.ansatz,
        m_max=args.ancilla,
        iterations=args.iters,
        seed=args.seed,
        lr=args.lr,
    )
    t0 = time.perf_counter()
    best_p, best_v, trace = quper_solve(problem, cfg)
    base_p, base_v = random_baseline(problem, args.iters, args.seed)
    wall = time.perf_counter() - t0
    report = {
        "config": {
            "problem": getattr(problem, "name", ""),
            "n": problem.n,
            "ansatz": cfg.ansatz,
            "ancilla": cfg.m_max,
            "iters": cfg.iterations,
            "seed": cfg.seed,
            "lr": cfg.lr,
        },
        "levels": trace.levels,
        "best_value": best_v,
        "best_permutation": list(best_p.map),
        "random_baseline_value": base_v,
        "wall_time_s": wall,
        "seed": cfg.seed,
    }
    if known_optimum is not None:
        gap = relative_optimality_gap(best_v, known_optimum)
        report["known_optimum"] = known_optimum
        report["relative_optimality_gap"] = gap
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2) + "\n")
    if args.trace:
        with open(args.trace, "w") as fh:
            for rec in trace.records:
                fh.write(json.dumps(rec) + "\n")
    return report


def cmd_solve_qap(args) -> int:
    inst = _load_qap(args)
    report = _run_solver(inst, args, known_optimum=inst.known_optimum)
    print(json.dumps(report))
    return EXIT_OK


def cmd_solve_gip(args) -> int:
    inst = _load_gip(args)
    report = _run_solver(inst, args)
    print(json.dumps(report))
    return EXIT_OK


def cmd_span(args) -> int:
    q, m = args.q, args.ancilla
    circuit = solver_ansatz(args.ansatz, q + m)
    ell = args.params if args.params is not None else circuit.param_count
    if not 0 <= ell <= circuit.param_count:
        raise InputError(f"--params must be in 0..{circuit.param_count}")
    cap = min(
        1 << ell, bruhat_span_size(q + m), math.factorial(1 << q)
    )
    if args.mode == "exhaustive":
        if 1 << ell > args.budget:
            print(
                f"exhaustive enumeration of 2^{ell} settings exceeds "
                f"--budget {args.budget}",
                file=sys.stderr,
            )
            return EXIT_BUDGET
        settings = itertools.product((0.0, math.pi), repeat=ell)
    else:
        rng = np.random.default_rng([args.seed])
        settings = (
            rng.choice([0.0, math.pi], ell) for _ in range(args.samples)
        )
    seen_h: set = set()
    seen_r: set = set()
    base = np.zeros(circuit.param_count)
    for idx, bits in enumerate(settings):
        theta = base.copy()
        theta[:ell] = bits
        if m == 0:
            p = eval_permutation(circuit, theta).map
            seen_h.add(p)
            seen_r.add(p)
        else:
            d = extract_dsm(DsmJob(circuit, m, theta))
            seen_h.add(project_hungarian(d).map)
            for p in project_random_order(d, [args.seed, idx], 1):
                seen_r.add(p.map)
    line = f"{ell},{len(seen_h)},{len(seen_r)},{cap}"
    out = "params,count_hungarian,count_random_order,theoretical_cap\n" + line
    if args.out:
        Path(args.out).write_text(out + "\n")
    print(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suites(q=args.q, deep=args.deep)
    all_ok = True
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        all_ok &= ok
    return EXIT_OK if all_ok else EXIT_VERIFY


def cmd_compile(args) -> int:
    if args.circuit:
        circuit = circuit_from_text(_read(args.circuit))
    else:
        circuit = build_ansatz(args.ansatz, args.q)
    lowered = lower_to_linear_topology(circuit)
    stats = circuit_stats(lowered)
    text = circuit_to_text(lowered)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    print(
        f"# params={stats.param_count} depth={stats.depth} "
        f"two_qubit={stats.two_qubit_gate_count}",
        file=sys.stderr,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quper")
    sub = ap.add_subparsers(dest="command", required=True)

    sq = sub.add_parser("solve-qap", help="run the heuristic on a QAP instance")
    src = sq.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance", help="QAPLIB .dat file")
    src.add_argument("--random", nargs=2, metavar=("N", "SEED"))
    sq.add_argument("--sln", help="QAPLIB .sln file with the known optimum")
    _add_solver_flags(sq)
    sq.set_defaults(func=cmd_solve_qap)

    sg = sub.add_parser("solve-gip", help="run the heuristic on a GIP instance")
    src = sg.add_mutually_exclusive_group(required=True)
    src.add_argument("--random", type=int, metavar="N")
    src.add_argument("--graphs", nargs=2, metavar=("A", "B"))
    sg.add_argument("--span-restricted", action="store_true")
    _add_solver_flags(sg)
    sg.set_defaults(func=cmd_solve_gip)

    sp = sub.add_parser("span", help="census of spanned permutations")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--ancilla", type=int, default=0)
    sp.add_argument("--ansatz", default="bruhat", choices=["bruhat", "borel", "sel"])
    sp.add_argument("--mode", default="exhaustive", choices=["exhaustive", "sample"])
    sp.add_argument("--samples", type=int, default=100000)
    sp.add_argument("--params", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=1 << 22)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_span)

    sv = sub.add_parser("verify", help="run the self-check suites")
    sv.add_argument("--q", type=int, default=3)
    sv.add_argument("--deep", action="store_true")
    sv.set_defaults(func=cmd_verify)

    sc = sub.add_parser("compile", help="lower a circuit to linear topology")
    src = sc.add_mutually_exclusive_group(required=True)
    src.add_argument("--circuit", help="circuit text file")
    src.add_argument("--ansatz", choices=["XLayer", "Borel", "Weyl", "Bruhat", "LX", "SEL"])
    sc.add_argument("--q", type=int, default=3)
    sc.add_argument("--out", default=None)
    sc.set_defaults(func=cmd_compile)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QubitBudgetError as exc:
        print(f"budget guard: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
