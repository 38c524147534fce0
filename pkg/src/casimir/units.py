"""SI constants used at the command-line boundary."""
from scipy import constants as _c

C = _c.c
K_B = _c.k
HBAR_C = _c.hbar * _c.c  # J m, 3.16152677e-26

__all__ = ["C", "K_B", "HBAR_C", "rad_per_s_to_inverse_m"]


def rad_per_s_to_inverse_m(omega):
    """Angular frequency (rad/s) to wavenumber (1/m)."""
    return omega / C
