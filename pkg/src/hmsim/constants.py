"""Physical constants (SI, CODATA 2018)."""

EPS0 = 8.8541878128e-12      # vacuum permittivity, F/m
MU0 = 1.25663706212e-6       # vacuum permeability, H/m
C_LIGHT = 2.99792458e8       # speed of light, m/s
ETA0 = 376.730313668         # free-space wave impedance, ohm
