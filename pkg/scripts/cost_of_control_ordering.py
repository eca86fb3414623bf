"""Which integration order buys the cheapest control effort.

Spectra of differences of the digital Riccati solutions at orders 0.5, 1 and
1.5 tell whether x0' P x0 is ordered for every initial state.
"""

import itertools

import numpy as np

from lqrpid.analysis import compare_riccati, cost_of_control, recommend_order
from lqrpid.reference import DARE_P, DARE_P_DIFF_EIGENVALUES, ORDERS, PLANTS


def main():
    for name, plant in PLANTS.items():
        print(f"{name} (recommended order {recommend_order(plant)})")
        for hi, lo in itertools.combinations(ORDERS, 2):
            for a, b in ((lo, hi), (hi, lo)):
                c = compare_riccati(DARE_P[(name, a)], DARE_P[(name, b)])
                if c.positive_definite:
                    printed = DARE_P_DIFF_EIGENVALUES.get((name, a, b))
                    note = f"  (printed {list(printed)})" if printed else ""
                    print(f"  P({a}) - P({b}) > 0, eigenvalues {np.round(c.eigenvalues, 4).tolist()}{note}")
        x0 = np.array([0.0, 1.0, 0.0])
        costs = ", ".join(f"{o}: {cost_of_control(DARE_P[(name, o)], x0):.4f}" for o in ORDERS)
        print(f"  x0'Px0 at x0 = e2 -> {costs}")


if __name__ == "__main__":
    main()
