"""Filter-bank decomposition: split a signal into approximation and details.

Decomposes the bundled quantity signal two levels with the 4-tap
Daubechies pair, reconstructs the low- and high-frequency components, and
shows that (a) they sum back to the signal at machine precision and (b)
the low-frequency component is a linear image of the four approximation
coefficients, which is what makes constraint-based editing possible.
"""

import numpy as np

from groupanon.reference import QUANTITY
from groupanon.wavelet import (
    FILTERS,
    approximation_component,
    decompose,
    detail_component,
    reconstruct,
    reconstruction_matrix,
)

db2 = FILTERS["db2"]
print("low-pass taps :", np.round(db2.lowpass, 6))
print("high-pass taps:", np.round(db2.highpass, 6))

dec = decompose(QUANTITY, db2, level=2)
print("\nlevel-2 approximation coefficients:", np.round(dec.approx, 3))
print("level-2 detail coefficients       :", np.round(dec.details[2], 3))
print("level-1 detail coefficients       :", np.round(dec.details[1], 3))

approx = approximation_component(dec)
detail = detail_component(dec)
print("\napproximation component:", np.round(approx, 3))
print("detail component       :", np.round(detail, 3))
print("reconstruction error   :", np.max(np.abs(reconstruct(dec) - QUANTITY)))

# the whole approximation component is R @ a for a fixed matrix R
matrix = reconstruction_matrix(db2, level=2, length=16)
print("\nreconstruction matrix (3 decimals):")
print(np.round(matrix, 3))
print("R @ a matches the component:", np.allclose(matrix @ dec.approx, approx))
