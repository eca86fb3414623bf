"""GA tuning on the two benchmark plants for every (mode, order) cell.

For each cell the tuned index is compared with the index of the published
gains pushed through the same simulation and cost pipeline.

    python scripts/benchmark_tuning.py --restarts 5 --out results/benchmark.csv
"""

import argparse
import csv
import time
from pathlib import Path

from lqrpid.costfn import CostSpec
from lqrpid.ga import GaConfig, TuningObjective, tune_pid_restarts
from lqrpid.pidmap import PidGains
from lqrpid.reference import CARE_GAINS, DARE_GAINS, ORDERS, PLANTS


def run_cell(name, mode, order, restarts, seed, generations, ts):
    plant = PLANTS[name]
    spec = CostSpec(order=order)
    table = CARE_GAINS if mode == "care" else DARE_GAINS
    j_pub, kp, ki, kd = table[(name, order)]
    ref_cost = TuningObjective(plant, mode, spec, ts=ts).cost_of_gains(PidGains(kp, ki, kd))
    t0 = time.perf_counter()
    res = tune_pid_restarts(plant, mode, spec, config=GaConfig(seed=seed, max_generations=generations),
                            ts=ts, restarts=restarts)
    return {
        "plant": name, "mode": mode, "order": order,
        "kp": res.gains.kp, "ki": res.gains.ki, "kd": res.gains.kd,
        "j_min": res.j_min, "published_j": j_pub, "published_gains_cost": ref_cost,
        "ratio": res.j_min / ref_cost, "seconds": time.perf_counter() - t0,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--restarts", type=int, default=5)
    ap.add_argument("--generations", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--ts", type=float, default=0.1)
    ap.add_argument("--modes", nargs="+", default=["care", "dare"], choices=["care", "dare"])
    ap.add_argument("--out", type=Path, default=Path("results/benchmark.csv"))
    args = ap.parse_args()

    rows = []
    print(f"{'plant':12s} {'mode':4s} {'order':>5s} {'Kp':>9s} {'Ki':>9s} {'Kd':>9s} "
          f"{'J tuned':>10s} {'J pub.gains':>11s} {'ratio':>6s}")
    for mode in args.modes:
        for name in PLANTS:
            for order in ORDERS:
                row = run_cell(name, mode, order, args.restarts, args.seed, args.generations, args.ts)
                rows.append(row)
                print(f"{name:12s} {mode:4s} {order:5.1f} {row['kp']:9.4f} {row['ki']:9.4f} {row['kd']:9.4f} "
                      f"{row['j_min']:10.4f} {row['published_gains_cost']:11.4f} {row['ratio']:6.3f}")

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
