"""Induced interaction between two particles with electric and magnetic polarizability.

For separation ``r`` and Matsubara wavenumbers ``zeta_n`` (``x = zeta_n r``)
the four channels of the free energy are

    F_EE = -3/(2 beta r^6) sum_{n in Z} L_EE(x) a1E a2E
    F_HH = -3/(2 beta r^6) sum_{n in Z} L_EE(x) a1H a2H
    F_EH = +3/(2 beta r^6) sum_{n in Z} L_EH(x) a1E a2H
    F_HE = +3/(2 beta r^6) sum_{n in Z} L_EH(x) a1H a2E

The summand depends on ``|zeta_n|`` only, so the two-sided sum is evaluated
as ``2 * sum'_{n>=0}``. At zero temperature with constant polarizabilities
it collapses to ``-/+ 3 hbar_c I / (2 pi r^7)`` with ``I_EE = 23/6`` and
``I_EH = 7/6``.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .exceptions import ConvergenceError, DomainError
from .materials import ParticleSpec
from .numerics import (Estimate, QuadratureConfig, ThermalState, matsubara_sum,
                       zero_temperature_integral)
from .results import ForceResult, sign_label

__all__ = [
    "I_EE",
    "I_EH",
    "l_ee",
    "l_eh",
    "PairGeometry",
    "PairFreeEnergy",
    "free_energy",
    "zero_t_free_energy",
    "pair_force",
]

I_EE = 23.0 / 6.0
I_EH = 7.0 / 6.0


def l_ee(x):
    """Orientation-averaged squared dipole field kernel, electric-electric."""
    x = np.asarray(x, dtype=float)
    poly = 1.0 + x + x * x / 3.0
    out = np.exp(-2.0 * x) * (2.0 * poly ** 2 + (2.0 * x * x / 3.0) ** 2)
    return out if out.ndim else float(out)


def l_eh(x):
    """Electric-magnetic counterpart of :func:`l_ee`; vanishes at ``x = 0``."""
    x = np.asarray(x, dtype=float)
    out = (2.0 / 3.0) * np.exp(-2.0 * x) * (x * (1.0 + x)) ** 2
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PairGeometry:
    r: float
    thermal: ThermalState = ThermalState()

    def __post_init__(self):
        if not (self.r > 0 and math.isfinite(self.r)):
            raise DomainError("separation r must be positive")


@dataclass
class PairFreeEnergy:
    f_ee: float
    f_hh: float
    f_eh: float
    f_he: float
    diagnostics: dict = field(default_factory=dict, repr=False)

    @property
    def total(self):
        return self.f_ee + self.f_hh + self.f_eh + self.f_he

    @property
    def converged(self):
        return all(getattr(e, "converged", True) for e in self.diagnostics.values())

    @property
    def abs_error(self):
        return sum(getattr(e, "abs_error", 0.0) for e in self.diagnostics.values())


# (name, kernel, sign, polarizability of particle 1, of particle 2)
_CHANNELS = (
    ("f_ee", l_ee, -1.0, ParticleSpec.electric, ParticleSpec.electric),
    ("f_hh", l_ee, -1.0, ParticleSpec.magnetic, ParticleSpec.magnetic),
    ("f_eh", l_eh, +1.0, ParticleSpec.electric, ParticleSpec.magnetic),
    ("f_he", l_eh, +1.0, ParticleSpec.magnetic, ParticleSpec.electric),
)


def _vanishes(p, getter):
    raw = p.alpha_e if getter is ParticleSpec.electric else p.alpha_h
    return isinstance(raw, float) and raw == 0.0


def zero_t_free_energy(p1, p2, r, hbar_c=1.0):
    """Zero-temperature (Casimir-Polder) free energy for constant polarizabilities."""
    if not (p1.is_constant and p2.is_constant):
        raise DomainError("the closed zero-temperature form needs constant polarizabilities")
    if not r > 0:
        raise DomainError("separation r must be positive")
    pref = 3.0 * hbar_c / (2.0 * math.pi * r ** 7)
    out = {}
    for name, kernel, sign, g1, g2 in _CHANNELS:
        integral = I_EE if kernel is l_ee else I_EH
        out[name] = sign * pref * integral * g1(p1, 0.0) * g2(p2, 0.0) + 0.0
    return PairFreeEnergy(**out)


def free_energy(p1, p2, g, cfg=None):
    """Channel-resolved induced free energy of a particle pair.

    At finite temperature each channel is a Matsubara sum; at zero
    temperature constant polarizabilities use the closed form and
    frequency-dependent ones the ``x`` integral
    ``-/+ 3 hbar_c/(2 pi r^7) int_0^inf L(x) a1(x/r) a2(x/r) dx``.
    Non-converged channels are kept, with their :class:`Estimate` stored in
    ``diagnostics``.
    """
    cfg = cfg or QuadratureConfig()
    r, thermal = g.r, g.thermal
    if thermal.is_zero and p1.is_constant and p2.is_constant:
        return zero_t_free_energy(p1, p2, r, thermal.hbar_c)
    values, diag = {}, {}
    for name, kernel, sign, g1, g2 in _CHANNELS:
        if _vanishes(p1, g1) or _vanishes(p2, g2):
            values[name] = 0.0
            continue
        if thermal.is_zero:
            est = zero_temperature_integral(
                lambda x: kernel(x) * g1(p1, x / r) * g2(p2, x / r), cfg)
            scale = 3.0 * thermal.hbar_c / (2.0 * math.pi * r ** 7)
        else:
            est = matsubara_sum(
                lambda n, z: kernel(z * r) * g1(p1, z) * g2(p2, z), thermal, cfg)
            scale = 3.0 / (thermal.beta * r ** 6)
        values[name] = sign * scale * est.value
        diag[name] = Estimate(values[name], scale * est.abs_error, est.evaluations,
                              est.converged, est.info)
    return PairFreeEnergy(**values, diagnostics=diag)


def pair_force(p1, p2, g, cfg=None, *, rel_step=1e-4, max_rel_error=1e-6):
    """Force ``-dF/dr`` from a Richardson-extrapolated central difference.

    Negative values attract. Raises :class:`ConvergenceError` when the
    derivative estimate is noisier than ``max_rel_error`` (tighten the
    quadrature configuration in that case).
    """
    cfg = cfg or QuadratureConfig()
    r = g.r
    h = r * rel_step

    def total(rr):
        res = free_energy(p1, p2, PairGeometry(rr, g.thermal), cfg)
        if not res.converged:
            raise ConvergenceError("free energy did not converge", {"r": rr})
        return res.total

    def central(step):
        return (total(r + step) - total(r - step)) / (2.0 * step)

    d_h, d_half = central(h), central(0.5 * h)
    deriv = (4.0 * d_half - d_h) / 3.0
    err = abs(deriv - d_half)
    if deriv == 0.0 and d_h == 0.0:
        return ForceResult(0.0, "zero", 0.0, True, diagnostics={"step": h})
    if err > max_rel_error * abs(deriv):
        raise ConvergenceError(
            f"finite-difference derivative too noisy (rel. error {err / abs(deriv):.2e}); "
            "use a tighter QuadratureConfig",
            {"derivative": deriv, "error": err})
    force = -deriv
    return ForceResult(force, sign_label(force), err, True,
                       diagnostics={"step": h, "coarse": -d_h, "fine": -d_half})
