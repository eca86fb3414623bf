"""How the LQR weights move the PID gains and the closed-loop poles.

Each diagonal entry of Q, and R, is scaled over a few decades while the
others stay at 1.
"""

import argparse

import numpy as np

from lqrpid.pidmap import gains_from_feedback
from lqrpid.reference import PLANTS
from lqrpid.riccati import LqrWeights, solve_care
from lqrpid.ssmodel import build_plant_state_space


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--plant", choices=list(PLANTS), default="oscillatory")
    ap.add_argument("--scales", type=float, nargs="+", default=[0.01, 0.1, 1.0, 10.0, 100.0])
    args = ap.parse_args()

    ss = build_plant_state_space(PLANTS[args.plant])
    print(f"{'weight':6s} {'scale':>7s} {'Kp':>9s} {'Ki':>9s} {'Kd':>9s}  slowest pole")
    for idx, label in enumerate(("q1", "q2", "q3", "r")):
        for scale in args.scales:
            vec = np.ones(4)
            vec[idx] = scale
            w = LqrWeights.from_vector(vec)
            sol = solve_care(ss.a, ss.b, w.q, w.r_matrix)
            g = gains_from_feedback(sol.feedback)
            slow = max(sol.closed_loop_eigenvalues, key=lambda z: z.real)
            print(f"{label:6s} {scale:7.2f} {g.kp:9.4f} {g.ki:9.4f} {g.kd:9.4f}  {slow:.4f}")


if __name__ == "__main__":
    main()
