"""Three-oscillator model of the induced (Casimir-like) interaction.

Oscillators 1 and 2 (squared eigenfrequencies ``a1``, ``a2``) interact only
through oscillator 3 (``a3``) with coupling strength ``c``. Each of the two
outer oscillators couples either through its coordinate (energy ``-2 c x_j x_3``,
the TM analogue) or through its momentum, in the vector-potential form
``a_j (x_j - c x_3 / a_j)**2`` after exchanging coordinates and momenta (the TE
analogue). After path-integral quantisation each Matsubara frequency
``zeta`` contributes a classical determinant ``Q(zeta)`` with
``A_i = a_i + zeta**2``, and

    Q = A1 A2 A3 (1 - D1)(1 - D2) (1 - D1 D2 / ((1 - D1)(1 - D2)))

where the last factor alone carries the interaction between 1 and 2:

* coordinate coupling: ``D_j = c**2 / (A_j A3) > 0``
* momentum coupling:   ``D_j = -zeta**2 c**2 / (a_j A_j A3) <= 0``

``D1 D2 > 0`` (both coordinate or both momentum) gives attraction, mixed
coupling gives ``D1 D2 < 0`` and repulsion.
"""
from dataclasses import dataclass
import math

import numpy as np

from .exceptions import DegenerateCouplingError, DomainError, ConvergenceError
from .numerics import QuadratureConfig, ThermalState, matsubara_sum, zero_temperature_integral

__all__ = [
    "OscillatorTriplet",
    "ModeFactors",
    "build_q_matrix",
    "q_determinant",
    "q_factored",
    "induced_free_energy_and_sign",
    "InducedEnergy",
]

COORDINATE = "coordinate"
MOMENTUM = "momentum"

_MODES = {
    "TM": (COORDINATE, COORDINATE),
    "TE": (MOMENTUM, MOMENTUM),
    "mixed": (COORDINATE, MOMENTUM),
}


@dataclass(frozen=True)
class OscillatorTriplet:
    """Parameters of the three-oscillator model.

    ``mode`` is ``"TM"``, ``"TE"``, ``"mixed"`` (oscillator 2 momentum
    coupled) or an explicit pair such as ``("momentum", "coordinate")``.
    """

    a1: float
    a2: float
    a3: float
    c: float
    mode: object = "TM"

    def __post_init__(self):
        for name in ("a1", "a2", "a3"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be a positive squared frequency")
        if not math.isfinite(self.c):
            raise DomainError("coupling c must be finite")
        if isinstance(self.mode, str):
            if self.mode not in _MODES:
                raise DomainError(f"unknown coupling mode {self.mode!r}")
        else:
            pair = tuple(self.mode)
            if len(pair) != 2 or not set(pair) <= {COORDINATE, MOMENTUM}:
                raise DomainError(f"unknown coupling mode {self.mode!r}")
            object.__setattr__(self, "mode", pair)

    @property
    def couplings(self):
        return _MODES[self.mode] if isinstance(self.mode, str) else self.mode

    @property
    def outer(self):
        return (self.a1, self.a2)

    def swapped(self):
        """Same physical system with oscillators 1 and 2 relabelled."""
        k1, k2 = self.couplings
        return OscillatorTriplet(self.a2, self.a1, self.a3, self.c, (k2, k1))

    def stability_margin(self):
        """Smallest eigenvalue of the stiffness matrix; the system is stable if > 0.

        The stiffness matrix is :func:`build_q_matrix` in coordinate form at
        ``zeta = 0``; when it is positive definite so is the matrix at every
        ``zeta``, and ``Q`` never vanishes.
        """
        return float(np.linalg.eigvalsh(build_q_matrix(self, 0.0, "coordinate"))[0])

    def max_abs_d(self):
        """Supremum of ``|D_j|`` over ``zeta >= 0`` for each outer oscillator."""
        c2 = self.c ** 2
        out = []
        for aj, kind in zip(self.outer, self.couplings):
            if kind == COORDINATE:
                out.append(c2 / (aj * self.a3))
            else:
                # zeta^2 / ((aj + zeta^2)(a3 + zeta^2)) peaks at zeta^2 = sqrt(aj a3)
                out.append(c2 / (aj * (math.sqrt(aj) + math.sqrt(self.a3)) ** 2))
        return tuple(out)


@dataclass(frozen=True)
class ModeFactors:
    D1: float
    D2: float
    casimir_factor: float
    Q: float


def build_q_matrix(t, zeta, form="symmetrized"):
    """The 3x3 matrix whose determinant is ``Q(zeta)``.

    ``form="coordinate"`` is the matrix straight from the quadratic energy:
    off-diagonal ``c`` everywhere and ``A3`` shifted by ``c**2/a_j`` for each
    momentum-coupled oscillator. ``form="symmetrized"`` is obtained from it by
    row operations that leave the determinant unchanged: momentum-coupled
    entries become ``+zeta c/sqrt(a_j)`` (column 3) and ``-zeta c/sqrt(a_j)``
    (row 3), and ``A3`` loses its shift.
    """
    a3 = t.a3 + zeta ** 2
    m = np.zeros((3, 3))
    m[0, 0] = t.a1 + zeta ** 2
    m[1, 1] = t.a2 + zeta ** 2
    m[2, 2] = a3
    for j, (aj, kind) in enumerate(zip(t.outer, t.couplings)):
        if kind == COORDINATE or form == "coordinate":
            m[j, 2] = m[2, j] = t.c
            if kind == MOMENTUM:
                m[2, 2] += t.c ** 2 / aj
        elif form == "symmetrized":
            m[j, 2] = zeta * t.c / math.sqrt(aj)
            m[2, j] = -m[j, 2]
        else:
            raise DomainError(f"unknown matrix form {form!r}")
    return m


def q_determinant(t, zeta, form="symmetrized"):
    """``Q(zeta)`` as the determinant of :func:`build_q_matrix`, expanded by hand."""
    m = build_q_matrix(t, zeta, form)
    # Rows 1 and 2 have a single off-diagonal entry in column 3.
    return (m[0, 0] * m[1, 1] * m[2, 2]
            - m[0, 0] * m[1, 2] * m[2, 1]
            - m[1, 1] * m[0, 2] * m[2, 0])


def _d_values(t, zeta):
    z2 = zeta ** 2
    a3 = t.a3 + z2
    ds = []
    for aj, kind in zip(t.outer, t.couplings):
        big_a = aj + z2
        if kind == COORDINATE:
            ds.append(t.c ** 2 / (big_a * a3))
        else:
            ds.append(-z2 * t.c ** 2 / (aj * big_a * a3))
    return ds


def q_factored(t, zeta):
    """``Q`` from the factorised product, with the ``D_j`` kept separately.

    Raises
    ------
    DegenerateCouplingError
        If some ``D_j == 1`` (zero mode of the coupled system).
    """
    d1, d2 = _d_values(t, zeta)
    if d1 == 1.0 or d2 == 1.0:
        raise DegenerateCouplingError(f"D_j = 1 at zeta={zeta!r}")
    factor = 1.0 - d1 * d2 / ((1.0 - d1) * (1.0 - d2))
    z2 = zeta ** 2
    prod = (t.a1 + z2) * (t.a2 + z2) * (t.a3 + z2)
    q = prod * (1.0 - d1) * (1.0 - d2) * factor
    return ModeFactors(d1, d2, factor, q)


@dataclass
class InducedEnergy:
    """Interaction free energy between oscillators 1 and 2."""

    delta_f: float
    sign: str
    estimate: object = None


def _sign_label(delta_f, c):
    if c == 0 or delta_f == 0:
        return "none"
    return "attractive" if delta_f < 0 else "repulsive"


def induced_free_energy_and_sign(t, thermal, cfg=None):
    """Interaction free energy ``(1/beta) sum'_n ln(casimir_factor(zeta_n))``.

    This is ``(1/(2 beta)) sum_{n in Z}`` of the same logarithm, each
    Matsubara frequency being an independent classical oscillator system
    whose free energy is ``ln(Q)/(2 beta)``. Units: ``hbar = 1`` with
    ``zeta_n = 2 pi n / beta``; at zero temperature the sum becomes
    ``(1/(2 pi)) int_0^inf d zeta``.

    Raises
    ------
    DegenerateCouplingError
        If ``|D_j| >= 1`` for some frequency (unstable system).
    ConvergenceError
        If the sum or integral does not converge.
    """
    cfg = cfg or QuadratureConfig()
    if t.c == 0:
        return InducedEnergy(0.0, "none")
    if max(t.max_abs_d()) >= 1.0:
        raise DegenerateCouplingError(
            f"|D_j| reaches {max(t.max_abs_d())!r} >= 1; coupling too strong")
    if t.stability_margin() <= 0.0:
        raise DegenerateCouplingError(
            "the coupled system has a zero or unstable normal mode; coupling too strong")

    def log_factor(zeta):
        f = q_factored(t, zeta)
        if not f.casimir_factor > 0:
            raise DegenerateCouplingError(f"non-positive Casimir factor at zeta={zeta!r}")
        return math.log1p(-f.D1 * f.D2 / ((1.0 - f.D1) * (1.0 - f.D2)))

    if thermal.is_zero:
        est = zero_temperature_integral(log_factor, cfg)
        value = est.value / (2.0 * math.pi)
    else:
        # The oscillator model uses hbar = 1 with zeta a frequency.
        th = ThermalState.finite(thermal.beta, 1.0)
        est = matsubara_sum(lambda n, z: log_factor(z), th, cfg)
        value = est.value / thermal.beta
    if not est.converged:
        raise ConvergenceError("induced free energy did not converge",
                               {"value": value, "evaluations": est.evaluations})
    return InducedEnergy(value, _sign_label(value, t.c), est)
