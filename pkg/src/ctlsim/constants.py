"""Physical constants (CODATA 2018, exact SI values where defined)."""

import math

HBAR = 1.054571817e-34  # J s
E_CHARGE = 1.602176634e-19  # C
K_B = 1.380649e-23  # J / K

# Flux quantum, written as pi * hbar / e (= h / 2e).
PHI_0 = math.pi * HBAR / E_CHARGE

# (2 pi / phi_0)^2, the factor multiplying every SQUID coupling.
FLUX_FACTOR = (2.0 * math.pi / PHI_0) ** 2
