"""Internal unit system.

Lengths in micrometers, times in femtoseconds, angular frequencies in
rad/fs.  hbar and eps0 are set to 1, so every signal contribution comes
out in one common arbitrary unit and ratios / zero crossings are
meaningful.  Frequencies are reported in THz with 1 THz = 2*pi*1e-3 rad/fs.
"""

import math

C_UM_FS = 0.299792458          # speed of light [um/fs]
HBAR = 1.0                     # internal signal units
EPS0 = 1.0
MU0 = 1.0 / (EPS0 * C_UM_FS ** 2)

_RAD_FS_PER_THZ = 2.0e-3 * math.pi


def thz_to_rad_fs(f_thz):
    """Convert a frequency in THz to angular frequency in rad/fs."""
    return _RAD_FS_PER_THZ * f_thz


def rad_fs_to_thz(omega):
    """Convert an angular frequency in rad/fs to THz."""
    return omega / _RAD_FS_PER_THZ
