"""Material response on the imaginary frequency axis.

Every model is a function of the imaginary-axis wavenumber ``zeta = omega/c``
(units of inverse length), returning a real dimensionless value:

=============  ==========================================
constant       ``value``
plasma         ``1 + wp**2 / zeta**2``
drude          ``1 + wp**2 / (zeta * (zeta + gamma))``
lorentz        ``1 + wp**2 / (w0**2 + zeta**2 + gamma * zeta)``
ideal          ``+inf`` at every ``zeta`` (perfect conductor / permeable)
=============  ==========================================

The ideal model is a sentinel, never a large float: reflection factors of an
ideal plate are substituted exactly (see :func:`interface_factors`).
"""
from dataclasses import dataclass, field
import math
import re
import warnings

import numpy as np

from .exceptions import DomainError

__all__ = [
    "ResponseModel",
    "PlateSpec",
    "ParticleSpec",
    "ZeroFrequencyLimit",
    "BelowUnityWarning",
    "evaluate",
    "kappa",
    "zero_freq_class",
    "interface_factors",
    "parse_model",
    "VACUUM",
]

KINDS = ("constant", "plasma", "drude", "lorentz", "ideal")


class BelowUnityWarning(UserWarning):
    """A constant permittivity or permeability in (0, 1) was requested."""


@dataclass(frozen=True)
class ResponseModel:
    """Permittivity, permeability or polarizability model.

    Frequencies (``wp``, ``gamma``, ``w0``) are wavenumbers in the same
    inverse-length unit as the ``zeta`` the model is evaluated at.
    """

    kind: str
    value: float = 1.0
    wp: float = 0.0
    gamma: float = 0.0
    w0: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown response model kind {self.kind!r}")
        if self.kind == "constant":
            if not (self.value > 0 and math.isfinite(self.value)):
                raise DomainError("constant response must be finite and > 0")
            if self.value < 1:
                warnings.warn(f"constant response {self.value} < 1",
                              BelowUnityWarning, stacklevel=3)
        for name in ("wp", "gamma", "w0"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and >= 0")

    @classmethod
    def constant(cls, value):
        return cls("constant", value=float(value))

    @classmethod
    def plasma(cls, wp):
        return cls("plasma", wp=float(wp))

    @classmethod
    def drude(cls, wp, gamma):
        return cls("drude", wp=float(wp), gamma=float(gamma))

    @classmethod
    def lorentz(cls, w0, wp, gamma=0.0):
        return cls("lorentz", w0=float(w0), wp=float(wp), gamma=float(gamma))

    @classmethod
    def ideal(cls):
        return cls("ideal")

    @property
    def is_ideal(self):
        return self.kind == "ideal"

    @property
    def below_unity(self):
        """Flag for constant responses below one (accepted, but unusual)."""
        return self.kind == "constant" and self.value < 1

    @property
    def is_constant(self):
        return self.kind == "constant"

    def __call__(self, zeta):
        return evaluate(self, zeta)

    def asymptote(self):
        """Leading small-``zeta`` behaviour as ``(coef, power)``: value ~ coef / zeta**power."""
        wp2 = self.wp ** 2
        if self.kind == "constant":
            return self.value, 0
        if self.kind == "ideal":
            return math.inf, 0
        if wp2 == 0:
            return 1.0, 0
        if self.kind == "lorentz" and self.w0 > 0:
            return 1.0 + wp2 / self.w0 ** 2, 0
        if self.kind == "plasma" or self.gamma == 0:
            return wp2, 2
        return wp2 / self.gamma, 1

    def describe(self):
        if self.kind == "constant":
            return f"constant:{self.value!r}"
        if self.kind == "plasma":
            return f"plasma:wp={self.wp!r}"
        if self.kind == "drude":
            return f"drude:wp={self.wp!r},gamma={self.gamma!r}"
        if self.kind == "lorentz":
            return f"lorentz:w0={self.w0!r},wp={self.wp!r},gamma={self.gamma!r}"
        return "infinite"


VACUUM = ResponseModel.constant(1.0)


def evaluate(model, zeta):
    """Evaluate ``model`` at ``zeta >= 0`` (scalar or array).

    Plasma and Drude models return ``+inf`` at ``zeta == 0`` instead of
    raising; the ideal model returns ``+inf`` everywhere.
    """
    z = np.asarray(zeta, dtype=float)
    if np.any(z < 0):
        raise DomainError("response models are evaluated at zeta >= 0")
    wp2 = model.wp ** 2
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if model.kind == "constant":
            out = np.full_like(z, model.value)
        elif model.kind == "ideal":
            out = np.full_like(z, np.inf)
        elif wp2 == 0:
            out = np.ones_like(z)
        elif model.kind == "plasma":
            out = 1.0 + wp2 / (z * z)
        elif model.kind == "drude":
            out = 1.0 + wp2 / (z * (z + model.gamma))
        else:
            out = 1.0 + wp2 / (model.w0 ** 2 + z * z + model.gamma * z)
    out = np.where(np.isnan(out), np.inf, out)
    return out if out.ndim else float(out)


def _as_model(m):
    if isinstance(m, ResponseModel):
        return m
    if m is None:
        return VACUUM
    if isinstance(m, str):
        return parse_model(m)
    return ResponseModel.constant(m)


@dataclass(frozen=True)
class PlateSpec:
    """A homogeneous half-space described by ``eps`` and ``mu``.

    Plain numbers are promoted to constant models, strings are parsed with
    :func:`parse_model` (parameters taken as wavenumbers).
    """

    eps: ResponseModel = VACUUM
    mu: ResponseModel = VACUUM

    def __post_init__(self):
        object.__setattr__(self, "eps", _as_model(self.eps))
        object.__setattr__(self, "mu", _as_model(self.mu))

    @property
    def is_vacuum(self):
        return self.eps == VACUUM and self.mu == VACUUM

    @property
    def frequency_independent(self):
        return all(m.kind in ("constant", "ideal") for m in (self.eps, self.mu))

    def swapped(self):
        """The plate with the roles of ``eps`` and ``mu`` exchanged."""
        return PlateSpec(self.mu, self.eps)


def _polarizability(a):
    if isinstance(a, ResponseModel) or callable(a):
        return a
    a = float(a)
    if a < 0:
        raise DomainError("polarizabilities must be non-negative")
    return a


@dataclass(frozen=True)
class ParticleSpec:
    """Electric and magnetic polarizabilities of a point particle (volume units).

    Each entry is a number (frequency independent), a :class:`ResponseModel`
    or any callable ``zeta -> alpha``.
    """

    alpha_e: object = 0.0
    alpha_h: object = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha_e", _polarizability(self.alpha_e))
        object.__setattr__(self, "alpha_h", _polarizability(self.alpha_h))

    @property
    def is_constant(self):
        return all(isinstance(a, float) or (isinstance(a, ResponseModel) and a.is_constant)
                   for a in (self.alpha_e, self.alpha_h))

    def electric(self, zeta):
        return _alpha_at(self.alpha_e, zeta)

    def magnetic(self, zeta):
        return _alpha_at(self.alpha_h, zeta)


def _alpha_at(a, zeta):
    if isinstance(a, float):
        return a
    if isinstance(a, ResponseModel):
        return evaluate(a, zeta)
    value = float(a(zeta))
    if value < 0:
        raise DomainError(f"polarizability negative at zeta={zeta!r}")
    return value


def _check_q(q, zeta):
    q = np.asarray(q, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    if np.any(q <= 0):
        raise DomainError("q must be positive")
    if np.any(q < zeta) or np.any(zeta < 0):
        raise DomainError("need q >= zeta >= 0 (real transverse wavenumber)")
    return q, zeta


def kappa(plate, q, zeta):
    """Ratio ``q_eps / q`` with ``q_eps**2 = q**2 + (eps mu - 1) zeta**2``.

    At ``zeta == 0`` the analytic ``zeta -> 0`` limit is returned, which is 1
    unless ``eps mu zeta**2`` stays finite (plasma-like media).
    """
    q, zeta = _check_q(q, zeta)
    q, zeta = np.broadcast_arrays(q, zeta)
    out = np.full(q.shape, np.inf)
    if not (plate.eps.is_ideal or plate.mu.is_ideal):
        pos = zeta > 0
        em = evaluate(plate.eps, zeta[pos]) * evaluate(plate.mu, zeta[pos])
        out[pos] = np.sqrt(q[pos] ** 2 + (em - 1.0) * zeta[pos] ** 2) / q[pos]
        if not pos.all():
            coef, power = zero_freq_class(plate).kappa(q[~pos])
            if power == 0:
                out[~pos] = coef
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ZeroFrequencyLimit:
    """How a plate behaves as ``zeta -> 0``.

    ``kind`` is one of ``finite``, ``plasma_like``, ``drude_like``, ``ideal``.
    ``eps`` and ``mu`` hold ``(coef, power)`` pairs meaning
    ``response ~ coef / zeta**power``.
    """

    kind: str
    eps: tuple = field(default=(1.0, 0))
    mu: tuple = field(default=(1.0, 0))
    ideal_eps: bool = False
    ideal_mu: bool = False

    def kappa(self, q):
        """``kappa`` as ``(coef, power)`` in the ``zeta -> 0`` limit."""
        if self.ideal_eps or self.ideal_mu:
            return math.inf, 1
        coef = self.eps[0] * self.mu[0]
        power = self.eps[1] + self.mu[1] - 2
        q = np.asarray(q, dtype=float)
        if power < 0:
            return np.ones_like(q), 0
        if power == 0:
            return np.sqrt(1.0 + coef / (q * q)), 0
        return math.sqrt(coef) / q, power / 2

    def factors(self, q):
        """TM and TE single-interface factors at ``zeta = 0``."""
        q = np.asarray(q, dtype=float)
        if self.ideal_eps:
            return np.ones_like(q), np.ones_like(q)
        if self.ideal_mu:
            return -np.ones_like(q), -np.ones_like(q)
        k = self.kappa(q)
        return _ratio_limit(self.eps, k, q), _ratio_limit(k, self.mu, q)

    @property
    def eps0(self):
        return self.eps[0] if self.eps[1] == 0 else math.inf

    @property
    def mu0(self):
        return self.mu[0] if self.mu[1] == 0 else math.inf


def _ratio_limit(x, y, q):
    """Limit of ``(X - Y)/(X + Y)`` for ``X ~ x0/zeta**px``, ``Y ~ y0/zeta**py``."""
    (x0, px), (y0, py) = x, y
    shape = np.shape(q)
    if px > py:
        return np.ones(shape)
    if px < py:
        return -np.ones(shape)
    x0 = np.broadcast_to(np.asarray(x0, dtype=float), shape)
    y0 = np.broadcast_to(np.asarray(y0, dtype=float), shape)
    return (x0 - y0) / (x0 + y0)


def zero_freq_class(plate):
    """Classify the ``zeta -> 0`` behaviour of a plate.

    Returns
    -------
    ZeroFrequencyLimit
        ``finite`` for constant/Lorentz media (``kappa_0 = 1``),
        ``plasma_like`` when ``eps zeta**2`` tends to ``wp**2``,
        ``drude_like`` when the response diverges only as ``1/zeta``,
        ``ideal`` for the infinite sentinels.
    """
    if plate.eps.is_ideal and plate.mu.is_ideal:
        raise DomainError("a plate cannot be ideal in both eps and mu")
    if plate.eps.is_ideal or plate.mu.is_ideal:
        return ZeroFrequencyLimit("ideal", ideal_eps=plate.eps.is_ideal,
                                  ideal_mu=plate.mu.is_ideal)
    e, m = plate.eps.asymptote(), plate.mu.asymptote()
    power = max(e[1], m[1])
    kind = {0: "finite", 1: "drude_like", 2: "plasma_like"}[power]
    return ZeroFrequencyLimit(kind, e, m)


def minus_kappa(x, eps_mu, s2, k):
    """``x - kappa`` for ``kappa = sqrt(1 + (eps_mu - 1) s2)``, ``s2 = (zeta/q)**2``.

    Written as ``(x**2 - kappa**2) / (x + kappa)`` so that nothing cancels
    when ``x`` and ``kappa`` are both close to one (weak media, small ``zeta``).
    Falls back to the plain difference where the squares overflow.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        d = ((x - 1.0) * (x + 1.0) - (eps_mu - 1.0) * s2) / (x + k)
    d = np.where(np.isfinite(d), d, np.subtract(x, k))
    return d if d.ndim else float(d)


def interface_factors(plate, q, zeta):
    """Single-interface TM and TE factors ``(eps-kappa)/(eps+kappa)`` and
    ``(kappa-mu)/(kappa+mu)``.

    ``q`` and ``zeta`` broadcast against each other; entries with
    ``zeta == 0`` take the analytic limit. Ideal plates give exactly
    ``(+1, +1)`` (infinite ``eps``) or ``(-1, -1)`` (infinite ``mu``).
    """
    q, z = _check_q(q, zeta)
    q, z = np.broadcast_arrays(q, z)
    if plate.eps.is_ideal and plate.mu.is_ideal:
        raise DomainError("a plate cannot be ideal in both eps and mu")
    if plate.eps.is_ideal:
        return np.ones(q.shape), np.ones(q.shape)
    if plate.mu.is_ideal:
        return -np.ones(q.shape), -np.ones(q.shape)
    tm, te = np.empty(q.shape), np.empty(q.shape)
    pos = z > 0
    if pos.any():
        zp, qp = z[pos], q[pos]
        eps = evaluate(plate.eps, zp)
        mu = evaluate(plate.mu, zp)
        with np.errstate(over="ignore", invalid="ignore"):
            s2 = (zp / qp) ** 2
            k = np.sqrt(1.0 + (eps * mu - 1.0) * s2)
            tm[pos] = minus_kappa(eps, eps * mu, s2, k) / (eps + k)
            te[pos] = -minus_kappa(mu, eps * mu, s2, k) / (k + mu)
    # Where a divergent model overflows, zeta is deep in its small-zeta regime.
    use_limit = ~pos | ~np.isfinite(tm) | ~np.isfinite(te)
    if use_limit.any():
        tm[use_limit], te[use_limit] = zero_freq_class(plate).factors(q[use_limit])
    return tm, te


_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def parse_model(text, frequency_scale=1.0):
    """Parse ``constant:4``, ``plasma:wp=..``, ``drude:wp=..,gamma=..``,
    ``lorentz:w0=..,wp=..,gamma=..`` or ``infinite``.

    Frequency parameters are multiplied by ``frequency_scale`` (use ``1/c`` to
    turn rad/s into 1/m). A bare number is read as a constant.
    """
    token = text.strip()
    low = token.lower()
    if low in ("infinite", "inf", "ideal"):
        return ResponseModel.ideal()
    if re.fullmatch(_NUMBER, token):
        return ResponseModel.constant(float(token))
    kind, sep, rest = low.partition(":")
    if not sep or kind not in ("constant", "plasma", "drude", "lorentz"):
        raise DomainError(f"cannot parse material model {text!r}")
    if kind == "constant":
        if not re.fullmatch(_NUMBER, rest.strip()):
            raise DomainError(f"bad constant in material model {text!r}")
        return ResponseModel.constant(float(rest))
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq or not re.fullmatch(_NUMBER, val.strip()):
            raise DomainError(f"bad parameter {item!r} in material model {text!r}")
        params[key.strip()] = float(val) * frequency_scale
    required = {"plasma": {"wp"}, "drude": {"wp", "gamma"},
                "lorentz": {"w0", "wp"}}[kind]
    allowed = required | ({"gamma"} if kind == "lorentz" else set())
    if not required <= params.keys() or not params.keys() <= allowed:
        raise DomainError(f"material model {text!r} needs parameters {sorted(required)}")
    return ResponseModel(kind, **params)
