"""Set-point and load-disturbance response of published analog and digital gains.

A unit load step enters the plant input half way through the horizon.
"""

import argparse
from pathlib import Path

import numpy as np

from lqrpid.cloop import Scenario, simulate_continuous, simulate_discrete
from lqrpid.pidmap import PidGains
from lqrpid.reference import CARE_GAINS, DARE_GAINS, ORDERS, PLANTS
from lqrpid.ssmodel import build_plant_state_space, discretize_zoh


def metrics(trace, t_d):
    pre = trace.times < t_d
    y = trace.y
    overshoot = max(0.0, y[pre].max() - trace.setpoint)
    outside = np.flatnonzero(pre & (np.abs(trace.e) > 0.02 * abs(trace.setpoint)))
    settle = trace.times[outside[-1]] if outside.size else 0.0
    return overshoot, settle, np.abs(trace.e[~pre]).max()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--magnitude", type=float, default=1.0)
    ap.add_argument("--ts", type=float, default=0.1)
    ap.add_argument("--out", type=Path, default=Path("results/disturbance"))
    args = ap.parse_args()

    sc = Scenario(disturbance_time=50.0, disturbance_magnitude=args.magnitude)
    args.out.mkdir(parents=True, exist_ok=True)
    print(f"{'plant':12s} {'mode':4s} {'order':>5s} {'overshoot':>9s} {'settle(2%)':>10s} {'peak load err':>13s}")
    for name, plant in PLANTS.items():
        d = discretize_zoh(build_plant_state_space(plant), args.ts)
        for order in ORDERS:
            for mode, table in (("care", CARE_GAINS), ("dare", DARE_GAINS)):
                _, kp, ki, kd = table[(name, order)]
                g = PidGains(kp, ki, kd)
                if mode == "care":
                    tr = simulate_continuous(plant, g, sc, record_every=10)
                else:
                    tr = simulate_discrete(d, g.feedback, sc, plant=plant, substeps=int(round(args.ts / 0.01)))
                if not tr.stable:
                    print(f"{name:12s} {mode:4s} {order:5.1f}  diverged")
                    continue
                ov, ts_, peak = metrics(tr, 50.0)
                print(f"{name:12s} {mode:4s} {order:5.1f} {ov:9.4f} {ts_:10.2f} {peak:13.4f}")
                np.savetxt(args.out / f"{name}_{mode}_{order:g}.csv",
                           np.column_stack([tr.times, np.full(len(tr), tr.setpoint), tr.y, tr.u, tr.e]),
                           delimiter=",", header="t,r,y,u,e", comments="", fmt="%.12g")
    print(f"wrote traces to {args.out}")


if __name__ == "__main__":
    main()
