"""Dormand-Prince 8(5,3) tableau, taken from SciPy's DOP853 implementation."""
import numpy as np
from scipy.integrate._ivp import dop853_coefficients as _coef

N_STAGES = _coef.N_STAGES
A_DOP = np.ascontiguousarray(_coef.A[:N_STAGES, :N_STAGES], dtype=float)
B_DOP = np.ascontiguousarray(_coef.B, dtype=float)
E3_DOP = np.ascontiguousarray(_coef.E3, dtype=float)
E5_DOP = np.ascontiguousarray(_coef.E5, dtype=float)
