"""b = i: the exact fiber solution u is never square integrable, and what the
cutoff family Psi_n actually does as n grows.

Run: python3 demos/imaginary_field_demo.py
"""
import math

from complex_landau.quasimode_imaginary import decay_fit, make_imag_config, nonintegrability_demo

for lam in (0, 1j, 1 + 1j):
    rows = nonintegrability_demo(1.0, lam, [5, 10, 15, 20])
    growth = ", ".join(f"{r['ratio'] / r['model']:.3f}" for r in rows[1:])
    print(f"lam = {lam}: int_-R^0 |u|^2 grows, ratio / e^(5 xi2) = {growth}")
print("  the gap from 1 is the algebraic factor R^(Im lam - 1) in |u|^2")

fit = decay_fit(make_imag_config(1j))
for r in fit.reports:
    print(f"  n = {r.n:2d}  ||Psi||^2 = {r.norm_sq:.4f}  residual^2 = {r.residual_sq:.4f}  ratio = {r.ratio:.4f}")
print(f"slopes: residual^2 {fit.residual_slope:.3f}, norm^2 {fit.norm_slope:.3f}, ratio {fit.ratio_slope:.3f}")
print("the ratio falls, but only slowly: on the ramp |xi1 / xi2| ~ n^alpha cancels the n^(-alpha) from phi'")
