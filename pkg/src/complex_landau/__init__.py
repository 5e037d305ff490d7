"""Spectral analysis of the planar Laplacian with a constant complex magnetic field.

    L_b = -Laplace + 2 i b x1 d/dx2 + b^2 x1^2,   b in C
"""
from .numerics import gauss_legendre, hermite_function, hermite_functions, upper_incomplete_gamma
from .operator_core import (FieldParameter, classify_spectrum, landau_levels, residual_coefficient,
                            symmetry_residual)
from .landau_modes import LandauMode, eigen_residual, h_kl_eval, projection_completeness_demo
from .quasimode_complex import make_config, norm_and_residual, weyl_rate
from .quasimode_imaginary import decay_fit, make_imag_config, nonintegrability_demo, residual_and_ratio
from .spectral_discrete import (fiber_matrix_fd, filling_scan, pseudospectrum_map,
                                rotated_oscillator_hermite, sigma_min)

__version__ = "0.1.0"
