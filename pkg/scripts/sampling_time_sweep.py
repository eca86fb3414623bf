"""Open- and closed-loop pole images as the sampling time grows.

Open-loop poles are mapped through z = exp(s Ts); the closed-loop poles come
from a DARE design with Q = I, R = 1 at each sampling time.
"""

import argparse
from pathlib import Path

import numpy as np

from lqrpid.reference import PLANTS
from lqrpid.riccati import solve_dare
from lqrpid.ssmodel import build_plant_state_space, discretize_zoh, map_poles_to_z


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ts", type=float, nargs=3, default=[0.1, 1.0, 0.1], metavar=("MIN", "MAX", "STEP"))
    ap.add_argument("--out", type=Path, default=Path("results/pole_sweep.csv"))
    args = ap.parse_args()

    lo, hi, step = args.ts
    grid = np.round(np.arange(lo, hi + step / 2, step), 10)
    rows = []
    for name, plant in PLANTS.items():
        ss = build_plant_state_space(plant)
        s_poles = np.linalg.eigvals(ss.a)
        for ts in grid:
            d = discretize_zoh(ss, ts)
            sol = solve_dare(d.g, d.h, np.eye(3), np.eye(1))
            for kind, zs in (("open_loop", map_poles_to_z(s_poles, ts)),
                             ("closed_loop", sol.closed_loop_eigenvalues)):
                for z in sorted(zs, key=lambda v: (v.real, v.imag)):
                    rows.append((name, kind, ts, z.real, z.imag, abs(z)))
            print(f"{name:12s} ts={ts:4.2f} closed-loop spectral radius {sol.spectral_radius:.4f}")

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w") as fh:
        fh.write("plant,kind,ts,real,imag,modulus\n")
        for r in rows:
            fh.write(f"{r[0]},{r[1]},{r[2]:g},{r[3]:.12g},{r[4]:.12g},{r[5]:.12g}\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
