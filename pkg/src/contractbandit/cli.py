"""Command-line harness: generate, discretize, learn, oracle, evaluate, batch.

Reports are JSON on stdout (or --out); progress notes go to stderr. Exit
codes: 0 success, 2 parameter-precondition refusal, 1 anything else. Learn
mode never prints hidden agent internals beyond the exact value of the
learned contract; evaluate opens the instance in oracle mode and says so in
its report.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .domain import (InvalidInstance, instance_digest, dumps_instance,
                     load_instance, UtilitySpec)
from .gen import random_agent, random_outcomes
from .run import PreconditionRefused, batch_run, evaluate_run, learn_run, resolve_eta
from .space import enumerate_space


def _emit(doc, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str):
    outcomes, agent = load_instance(path)
    with open(path) as fh:
        digest = instance_digest(json.load(fh))
    return outcomes, agent, digest


def _parse_utility(text: str) -> UtilitySpec:
    if text == "log":
        return UtilitySpec.log()
    if text.startswith("crra:"):
        return UtilitySpec.crra(float(text.split(":", 1)[1]))
    raise argparse.ArgumentTypeError("utility must be 'log' or 'crra:<rho>'")


def cmd_generate(args) -> int:
    rng = np.random.default_rng(args.seed)
    outcomes = random_outcomes(args.k, rng)
    agent = random_agent(outcomes, args.n, rng, args.utility)
    text = dumps_instance(outcomes, agent)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_discretize(args) -> int:
    outcomes, _, _ = _load(args.instance)
    eta = resolve_eta(outcomes, args.epsilon, args.eta_override)
    space = enumerate_space(outcomes, eta,
                            prune_monotone_smooth=args.prune_monotone_smooth)
    sink = open(args.out, "w") if args.out else sys.stdout
    try:
        for i in range(len(space)):
            sink.write(json.dumps({
                "code": [int(x) for x in space.codes[i]],
                "wages": [float(x) for x in space.wages[i]],
            }) + "\n")
    finally:
        if args.out:
            sink.close()
    print(f"discretize: eta={eta:.6g} contracts={len(space)}", file=sys.stderr)
    return 0


def cmd_learn(args) -> int:
    outcomes, agent, digest = _load(args.instance)
    eta = resolve_eta(outcomes, args.epsilon, args.eta_override)
    space = enumerate_space(outcomes, eta,
                            prune_monotone_smooth=args.prune_monotone_smooth)
    from .bandit import total_sample_count
    from .environment import make_arm_set
    arms = make_arm_set(agent, outcomes, space, mode=args.sampler)
    budget = total_sample_count(len(space), arms.breadth, args.epsilon / 2, args.delta)
    print(f"learn: arms={len(space)} budget={budget} samples", file=sys.stderr)
    report = learn_run(
        outcomes, agent, digest, args.epsilon, args.delta, args.seed,
        eta_override=args.eta_override,
        prune_monotone_smooth=args.prune_monotone_smooth,
        sampler=args.sampler, space=space, arms=arms)
    _emit(report, args.out)
    return 0


def cmd_oracle(args) -> int:
    outcomes, agent, _ = _load(args.instance)
    from .oracle import grid_optimum
    best = grid_optimum(agent, outcomes, args.grid)
    _emit({
        "kind": "oracle",
        "grid_m": args.grid,
        "wages": [float(x) for x in best.contract.wages],
        "value": best.value,
        "slack": best.slack,
    }, args.out)
    return 0


def cmd_evaluate(args) -> int:
    outcomes, agent, digest = _load(args.instance)
    learn_report = json.loads(Path(args.report).read_text())
    verdict = evaluate_run(outcomes, agent, digest, learn_report, args.grid)
    _emit(verdict, args.out)
    return 0


def cmd_batch(args) -> int:
    outcomes, agent, digest = _load(args.instance)
    seeds = range(args.seed, args.seed + args.runs)
    rows = batch_run(
        outcomes, agent, digest, args.epsilon, args.delta, seeds, args.grid,
        eta_override=args.eta_override,
        prune_monotone_smooth=args.prune_monotone_smooth,
        sampler=args.sampler, jobs=args.jobs)
    sink = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(sink, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            sink.close()
    wins = sum(r["success"] for r in rows)
    print(f"batch: {wins}/{len(rows)} runs within target", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contractbandit",
        description="learn near-optimal wage contracts against a hidden agent",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a random valid instance file")
    p.add_argument("--k", type=int, default=2, help="number of outcomes")
    p.add_argument("--n", type=int, default=2, help="number of effort levels")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--utility", type=_parse_utility, default=None,
                   help="'log' or 'crra:<rho>' (default: seeded choice)")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_generate)

    def common(p, grid=False):
        p.add_argument("--instance", required=True)
        p.add_argument("--out")
        if grid:
            p.add_argument("--grid", type=int, default=200,
                           help="oracle grid resolution per axis")

    p = sub.add_parser("discretize", help="emit the coarse contract grid as JSON lines")
    common(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--eta-override", type=float, default=None)
    p.add_argument("--prune-monotone-smooth", action="store_true")
    p.set_defaults(fn=cmd_discretize)

    p = sub.add_parser("learn", help="identify a near-optimal contract by sampling")
    common(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eta-override", type=float, default=None)
    p.add_argument("--prune-monotone-smooth", action="store_true")
    p.add_argument("--sampler", choices=("counts", "draws"), default="counts",
                   help="per-batch pull simulation: multinomial counts or one uniform per pull")
    p.set_defaults(fn=cmd_learn)

    p = sub.add_parser("oracle", help="brute-force optimum over the learnable set")
    common(p, grid=True)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("evaluate", help="regret of a learn report against the oracle")
    common(p, grid=True)
    p.add_argument("--report", required=True, help="path to the learn report JSON")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("batch", help="learn+evaluate across consecutive seeds, CSV out")
    common(p, grid=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--runs", type=int, default=20, help="number of seeds")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--eta-override", type=float, default=None)
    p.add_argument("--prune-monotone-smooth", action="store_true")
    p.add_argument("--sampler", choices=("counts", "draws"), default="counts")
    p.set_defaults(fn=cmd_batch)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except PreconditionRefused as err:
        print(json.dumps({"error": "precondition_refused", "message": str(err)}),
              file=sys.stderr)
        return 2
    except InvalidInstance as err:
        print(json.dumps({"error": "invalid_instance", "violations": err.violations}),
              file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as err:
        print(json.dumps({"error": type(err).__name__, "message": str(err)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
