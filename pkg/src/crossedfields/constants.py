"""Physical constants (CODATA 2018, SI units)."""

import math

ELEMENTARY_CHARGE = 1.602176634e-19  # C (exact)
PLANCK = 6.62607015e-34              # J s (exact)
HBAR = PLANCK / (2.0 * math.pi)      # J s
ELECTRON_MASS = 9.1093837015e-31     # kg
BOLTZMANN = 1.380649e-23             # J/K (exact)

# quantum of Hall resistance, 2*pi*hbar/e^2 ~ 25812.807 ohm
VON_KLITZING = PLANCK / ELEMENTARY_CHARGE**2
