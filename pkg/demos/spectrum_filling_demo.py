"""Spectrum filling for complex b, and what does not happen for real b.

Run: python3 demos/spectrum_filling_demo.py
"""
import cmath
import math

from complex_landau.quasimode_complex import make_config, weyl_rate
from complex_landau.spectral_discrete import filling_scan

b = cmath.exp(1j * math.pi / 4)
lam = -2 + 0.5j
print(f"sigma_min(fiber(xi2 = n) - lam), b = e^(i pi/4), lam = {lam}")
for r in filling_scan(b, lam, [4, 6, 8, 10]):
    tag = " (roundoff floor)" if r.at_floor else ""
    print(f"  n = {r.n:2d}  N = {r.N:5d}  sigma_min <= {r.bound:.3e}{tag}")

print("real control b = 1, lam = 2 (distance 1 to the levels 1, 3, 5, ...)")
for r in filling_scan(1, 2.0, [4, 6, 8, 10]):
    print(f"  n = {r.n:2d}  sigma_min = {r.sigma_refined:.5f}")

# the analytic Weyl sequence behind the decay; norms grow like e^{p n^2}
rate = weyl_rate(make_config(math.pi / 4, 0.4, lam))
for q in rate.reports[::2]:
    print(f"  n = {q.n:2d}  log ||Psi||^2 = {q.log_norm_sq:8.2f}  log ratio = {q.log_ratio:8.2f}")
print(f"  fitted n^2 coefficient {rate.coefficient:.4f}, bound kappa - p_max = {rate.bound:.4f}")
