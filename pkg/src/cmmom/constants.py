"""Free-space electromagnetic constants (SI)."""

import numpy as np

C0 = 299792458.0                  # m/s, exact
MU0 = 4e-7 * np.pi                # H/m
EPS0 = 1.0 / (MU0 * C0**2)        # F/m
ETA0 = np.sqrt(MU0 / EPS0)        # ohm
