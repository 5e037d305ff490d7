"""Complex Landau levels: eigenfunctions, the Hermite-basis matrix, and b = i.

Run: python3 demos/landau_levels_demo.py
"""
import cmath
import math

import numpy as np
import scipy.linalg

from complex_landau import classify_spectrum
from complex_landau.landau_modes import LandauMode, eigen_residual
from complex_landau.spectral_discrete import rotated_oscillator_hermite

b = cmath.exp(1j * math.pi / 4)
print(f"b = {b:.4f}: {classify_spectrum(b).continuous.value}, first levels "
      f"{[f'{z:.3f}' for z in classify_spectrum(b).point_spectrum(2)]}")

# every h_kl solves the fiber eigenvalue problem, whatever l is
for k, l in [(0, 0), (1, 3), (4, 2)]:
    m = LandauMode(k, l, b)
    print(f"  h_{k}{l}: eigenvalue {m.eigenvalue:.4f}, relative residual {eigen_residual(k, l, b):.1e}")

# the truncated Hermite matrix finds the same values
ev = np.linalg.eigvals(rotated_oscillator_hermite(b, 400).dense())
print("  Hermite N=400 smallest:", np.round(ev[np.argsort(np.abs(ev))][:3], 10))

# at b = i the matrix is real symmetric and its bottom runs away as N grows
for N in (256, 512, 1024):
    low = scipy.linalg.eigvalsh(rotated_oscillator_hermite(1j, N).dense(), subset_by_index=(0, 0))[0]
    print(f"  b = i, N = {N:4d}: bottom eigenvalue {low:9.2f}")
