#!/usr/bin/env python3
"""Regenerate tests/data/fixtures.json from the reference instance.

Frozen regression values are produced here, never typed by hand: the grid
optimum at the pinned resolution, one pinned learn run, and one pinned
simulation batch. Rerun after an intentional behaviour change and commit the
diff together with the change.

Usage: python scripts/make_fixtures.py
"""

import json
from pathlib import Path

from contractbandit.bandit import substream
from contractbandit.domain import Contract, instance_digest, load_instance
from contractbandit.environment import play_rounds
from contractbandit.oracle import grid_optimum
from contractbandit.run import learn_run

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"

ORACLE_GRID_M = 200
LEARN = {"epsilon": 0.2, "delta": 0.1, "seed": 7}
SIM = {"wages": [0.25, 0.64], "rounds": 10 ** 6, "seed": 2026}


def main() -> None:
    path = DATA / "instance_a.json"
    outcomes, agent = load_instance(path)
    digest = instance_digest(json.loads(path.read_text()))

    best = grid_optimum(agent, outcomes, ORACLE_GRID_M)

    report = learn_run(outcomes, agent, digest, **LEARN)
    del report["timing"]  # wall time is not reproducible

    counts, profit_sum = play_rounds(
        agent, outcomes, Contract(SIM["wages"]), SIM["rounds"],
        substream(SIM["seed"], 0, 0))

    fixtures = {
        "instance_sha256": digest,
        "oracle": {
            "grid_m": ORACLE_GRID_M,
            "wages": [float(x) for x in best.contract.wages],
            "value": best.value,
            "slack": best.slack,
        },
        "learn": {"params": LEARN, "report": report},
        "simulate": {
            "params": SIM,
            "outcome_counts": [int(c) for c in counts],
            "mean_profit": profit_sum / SIM["rounds"],
        },
    }
    out = DATA / "fixtures.json"
    out.write_text(json.dumps(fixtures, indent=2) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
