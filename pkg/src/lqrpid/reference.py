"""Published benchmark results for the two reference plants (K = 1, wn = 1).

``CARE_GAINS`` / ``DARE_GAINS`` map ``(plant, order) -> (J_min, Kp, Ki, Kd)``
for the analog and digital designs.  ``DARE_P`` holds the printed Riccati
solutions of the digital designs, keyed the same way.  Printed values carry
four to five significant digits.
"""

import numpy as np

from .ssmodel import SecondOrderPlant

OSCILLATORY = SecondOrderPlant(k_gain=1.0, xi=0.2, wn=1.0)
SLUGGISH = SecondOrderPlant(k_gain=1.0, xi=5.0, wn=1.0)
PLANTS = {"oscillatory": OSCILLATORY, "sluggish": SLUGGISH}
ORDERS = (0.5, 1.0, 1.5)

CARE_GAINS = {
    ("oscillatory", 0.5): (14.163, 1.366073, 0.260574, 1.776595),
    ("oscillatory", 1.0): (96.855, 2.291051, 0.234846, 3.793601),
    ("oscillatory", 1.5): (842.254, 1.802627, 0.246183, 2.408207),
    ("sluggish", 0.5): (16.366, 1.641867, 0.172061, 0.168591),
    ("sluggish", 1.0): (118.156, 1.732432, 0.16095, 0.173052),
    ("sluggish", 1.5): (999.961, 1.892469, 0.252889, 0.198146),
}

DARE_GAINS = {
    ("oscillatory", 0.5): (14.85861, 0.098233, 0.171755, 0.198904),
    ("oscillatory", 1.0): (103.9139, 0.097949, 0.170926, 0.198634),
    ("oscillatory", 1.5): (940.4062, 0.101853, 0.175119, 0.204367),
    ("sluggish", 0.5): (16.65402, 1.351018, 0.16446, 0.134639),
    ("sluggish", 1.0): (120.8922, 1.527714, 0.14705, 0.151819),
    ("sluggish", 1.5): (1173.427, 1.389176, 0.150055, 0.138047),
}

DARE_P = {
    ("oscillatory", 0.5): np.array([
        [38.3375, 20.8896, 34.8736],
        [20.8896, 17.4583, 19.9732],
        [34.8736, 19.9732, 40.3691],
    ]),
    ("oscillatory", 1.0): np.array([
        [56.4828, 30.7708, 51.3929],
        [30.7708, 25.9626, 29.4921],
        [51.3929, 29.4921, 59.6989],
    ]),
    ("oscillatory", 1.5): np.array([
        [61.3195, 33.6054, 55.5945],
        [33.6054, 28.8308, 32.3811],
        [55.5945, 32.3811, 64.8493],
    ]),
    ("sluggish", 0.5): np.array([
        [247.25, 1065.1, 105.0964],
        [1065.1, 8733.6, 863.2543],
        [105.0964, 863.2543, 86.0539],
    ]),
    ("sluggish", 1.0): np.array([
        [42.8740, 172.0613, 16.9487],
        [172.0613, 1789.5, 176.0818],
        [16.9487, 176.0818, 17.4946],
    ]),
    ("sluggish", 1.5): np.array([
        [40.2110, 170.5117, 16.8189],
        [170.5117, 1578.077, 155.6976],
        [16.8189, 155.6976, 15.4685],
    ]),
}
for _p in DARE_P.values():
    _p.setflags(write=False)

# printed spectra of successive differences, (minuend order, subtrahend order) -> eigenvalues
DARE_P_DIFF_EIGENVALUES = {
    ("oscillatory", 1.0, 0.5): (1.9362, 2.9975, 41.0457),
    ("oscillatory", 1.5, 1.0): (0.7795, 0.9049, 11.1710),
    ("sluggish", 0.5, 1.0): (6.0, 88.1, 7128.4),
    ("sluggish", 1.0, 1.5): (0.0601, 2.6516, 213.4166),
}
