"""Reference covariance matrices used by the simulation studies.

The forest matrix has a free HH power ``x``; the fixed reference forest is
``forest_covariance(360932)``.  Urban and pasture matrices are the bright and
dark classes of the synthetic clustering scene.
"""

import numpy as np

from .hermitian import hermitize, validate

FOREST_HH = 360932.0


def forest_covariance(x=FOREST_HH):
    upper = np.array(
        [
            [x, 11050 + 3759j, 63896 + 1581j],
            [0, 98960, 6593 + 6868j],
            [0, 0, 208843],
        ],
        dtype=np.complex128,
    )
    return validate(hermitize(upper))


URBAN = validate(hermitize(np.array(
    [
        [962892, 19171 - 3579j, -154638 + 191388j],
        [0, 56707, -5798 + 16812j],
        [0, 0, 472251],
    ],
    dtype=np.complex128,
)))

PASTURE = validate(hermitize(np.array(
    [
        [32556, 556 + 787j, 24046 - 27287j],
        [0, 1647, -146 - 482j],
        [0, 0, 61028],
    ],
    dtype=np.complex128,
)))
