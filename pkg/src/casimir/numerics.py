"""Quadrature and Matsubara summation engine.

Everything downstream reduces to two primitives:

* integrals over a half line ``[lower, inf)`` of smooth, exponentially
  decaying integrands, done by mapping ``x = lower + t/(1-t)`` onto
  ``[0, 1)`` and running a globally adaptive Gauss-Kronrod (7, 15) rule;
* Matsubara sums ``term(0)/2 + sum_{n>=1} term(n)`` truncated once two
  consecutive terms are negligible against the partial sum.

All functions here are pure for a fixed configuration, so repeated runs give
bit-identical results.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .exceptions import DomainError, NonFiniteIntegrandError

__all__ = [
    "integrate_strip",
    "QuadratureConfig",
    "ThermalState",
    "Estimate",
    "integrate_semi_infinite",
    "integrate_interval",
    "matsubara_sum",
    "zero_temperature_integral",
]

# Gauss-Kronrod (7, 15) abscissae and weights on [-1, 1] (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-point node set and the matching Kronrod/Gauss weights.
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[1:7:2] = _WG[:3]
_GAUSS[7] = _WG[3]
_GAUSS[9:15:2] = _WG[2::-1]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny
# Intervals narrower than this (relative to the unit t-interval) are not split.
_MIN_WIDTH = 64 * _EPS


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and work limits shared by the quadrature and summation engine."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    sum_truncation_rel: float = 1e-12
    max_matsubara_terms: int = 1_000_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "sum_truncation_rel"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be strictly positive")
        for name in ("max_subdivisions", "max_matsubara_terms"):
            if int(getattr(self, name)) < 1:
                raise DomainError(f"{name} must be at least 1")

    def tightened(self, factor=10.0):
        """Same limits with every tolerance divided by ``factor``."""
        return QuadratureConfig(
            rel_tol=self.rel_tol / factor,
            abs_tol=self.abs_tol / factor,
            max_subdivisions=self.max_subdivisions,
            sum_truncation_rel=self.sum_truncation_rel / factor,
            max_matsubara_terms=self.max_matsubara_terms,
        )


@dataclass(frozen=True)
class ThermalState:
    """Zero temperature or a finite inverse temperature ``beta``.

    Matsubara wavenumbers are ``zeta_n = 2 pi n / (beta hbar_c)``. Choosing
    ``hbar_c = 1`` gives natural units in which ``beta`` is an inverse
    wavenumber (or an inverse frequency for the oscillator model).
    """

    beta: float | None = None
    hbar_c: float = 1.0

    def __post_init__(self):
        if self.beta is not None and not self.beta > 0:
            raise DomainError("finite temperature requires beta > 0")
        if not self.hbar_c > 0:
            raise DomainError("hbar_c must be positive")

    @classmethod
    def zero(cls, hbar_c=1.0):
        return cls(None, hbar_c)

    @classmethod
    def finite(cls, beta, hbar_c=1.0):
        return cls(float(beta), hbar_c)

    @classmethod
    def from_kelvin(cls, temperature, hbar_c=None):
        """SI thermal state; ``temperature == 0`` gives the zero-temperature state."""
        from .units import HBAR_C, K_B

        hbar_c = HBAR_C if hbar_c is None else hbar_c
        if temperature < 0:
            raise DomainError("temperature must be non-negative")
        if temperature == 0:
            return cls(None, hbar_c)
        return cls(1.0 / (K_B * temperature), hbar_c)

    @property
    def is_zero(self):
        return self.beta is None

    @property
    def spacing(self):
        """Matsubara spacing ``zeta_1``; zero at zero temperature."""
        if self.beta is None:
            return 0.0
        return 2.0 * math.pi / (self.beta * self.hbar_c)

    def zeta(self, n):
        if self.beta is None:
            raise DomainError("Matsubara frequencies need a finite temperature")
        return n * self.spacing


@dataclass
class Estimate:
    """A numerical value together with its error bookkeeping."""

    value: float
    abs_error: float
    evaluations: int
    converged: bool
    info: dict = field(default_factory=dict, compare=False, repr=False)

    def __float__(self):
        return float(self.value)


def _qk_error(fv, half):
    """Integral and QUADPACK error estimate from 15 samples per row of ``fv``."""
    resk = fv @ _KRONROD
    resg = fv @ _GAUSS
    mean = 0.5 * resk
    resabs = np.abs(fv) @ _KRONROD * np.abs(half)
    resasc = np.abs(fv - mean[..., None]) @ _KRONROD * np.abs(half)
    err = np.abs((resk - resg) * half)
    # QUADPACK's error scaling for qk15.
    scale = np.ones_like(err)
    mask = (resasc != 0) & (err != 0)
    scale[mask] = np.minimum(1.0, (200.0 * err[mask] / resasc[mask]) ** 1.5)
    err = np.where(mask, resasc * scale, err)
    floor = 50.0 * _EPS * resabs
    err = np.where(resabs > _TINY / (50.0 * _EPS), np.maximum(floor, err), err)
    return resk * half, err


def _kronrod_panels(g, left, right):
    """Apply the 15-point rule to every panel ``[left_i, right_i]`` at once."""
    centre = 0.5 * (left + right)
    half = 0.5 * (right - left)
    t = centre[:, None] + half[:, None] * _NODES[None, :]
    return _qk_error(g(t), half)


def _adaptive(g, a, b, cfg, initial_panels=4):
    """Globally adaptive GK15 on ``[a, b]`` for a vectorised ``g``."""
    edges = np.linspace(a, b, initial_panels + 1)
    left, right = edges[:-1], edges[1:]
    values, errors = _kronrod_panels(g, left, right)
    evaluations = 15 * left.size
    limit = max(int(cfg.max_subdivisions), initial_panels)
    while True:
        total = float(np.sum(values))
        err_total = float(np.sum(errors))
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if err_total <= tol:
            return Estimate(total, err_total, evaluations, True,
                            {"panels": left.size})
        order = np.argsort(errors)[::-1]
        # Split the worst panels until the untouched remainder fits half the budget.
        remaining = err_total - np.cumsum(errors[order])
        k = int(np.searchsorted(-remaining, -0.5 * tol)) + 1
        k = min(k, order.size, limit - left.size)
        chosen = order[:k]
        chosen = chosen[(right[chosen] - left[chosen]) > _MIN_WIDTH * (b - a)]
        if chosen.size == 0:
            return Estimate(total, err_total, evaluations, False,
                            {"panels": left.size, "reason": "subdivision limit"})
        mid = 0.5 * (left[chosen] + right[chosen])
        new_left = np.concatenate([left[chosen], mid])
        new_right = np.concatenate([mid, right[chosen]])
        new_values, new_errors = _kronrod_panels(g, new_left, new_right)
        evaluations += 15 * new_left.size
        keep = np.ones(left.size, dtype=bool)
        keep[chosen] = False
        left = np.concatenate([left[keep], new_left])
        right = np.concatenate([right[keep], new_right])
        values = np.concatenate([values[keep], new_values])
        errors = np.concatenate([errors[keep], new_errors])
        # Keep panels sorted so summation order (and thus the result) is reproducible.
        idx = np.argsort(left, kind="stable")
        left, right, values, errors = left[idx], right[idx], values[idx], errors[idx]


def _kronrod_cells(g, x0, x1, y0, y1):
    """Tensor 15x15 rule on each cell; errors are returned per direction."""
    hx, hy = 0.5 * (x1 - x0), 0.5 * (y1 - y0)
    x = (0.5 * (x0 + x1))[:, None] + hx[:, None] * _NODES[None, :]
    y = (0.5 * (y0 + y1))[:, None] + hy[:, None] * _NODES[None, :]
    fv = g(x[:, :, None], y[:, None, :])
    # Integrate out one direction with the Kronrod rule, judge the other.
    value, err_x = _qk_error(fv @ _KRONROD * hy[:, None], hx)
    _, err_y = _qk_error(np.einsum("i,cij->cj", _KRONROD, fv) * hx[:, None], hy)
    return value, err_x, err_y


def _adaptive_2d(g, cfg, initial=(4, 2)):
    """Globally adaptive tensor GK15 on the unit square for a vectorised ``g(x, y)``.

    Cells are bisected along the direction that dominates their error.
    """
    ex = np.linspace(0.0, 1.0, initial[0] + 1)
    ey = np.linspace(0.0, 1.0, initial[1] + 1)
    x0, y0 = (v.ravel() for v in np.meshgrid(ex[:-1], ey[:-1], indexing="ij"))
    x1, y1 = (v.ravel() for v in np.meshgrid(ex[1:], ey[1:], indexing="ij"))
    values, ex_, ey_ = _kronrod_cells(g, x0, x1, y0, y1)
    evaluations = 225 * x0.size
    limit = max(int(cfg.max_subdivisions), x0.size)
    while True:
        errors = ex_ + ey_
        total = float(np.sum(values))
        err_total = float(np.sum(errors))
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if err_total <= tol:
            return Estimate(total, err_total, evaluations, True, {"cells": x0.size})
        order = np.argsort(errors)[::-1]
        remaining = err_total - np.cumsum(errors[order])
        k = int(np.searchsorted(-remaining, -0.5 * tol)) + 1
        k = min(k, order.size, limit - x0.size)
        chosen = order[:k]
        split_x = ex_[chosen] >= ey_[chosen]
        width = np.where(split_x, x1[chosen] - x0[chosen], y1[chosen] - y0[chosen])
        chosen, split_x = chosen[width > _MIN_WIDTH], split_x[width > _MIN_WIDTH]
        if chosen.size == 0:
            return Estimate(total, err_total, evaluations, False,
                            {"cells": x0.size, "reason": "subdivision limit"})
        cx0, cx1, cy0, cy1 = x0[chosen], x1[chosen], y0[chosen], y1[chosen]
        mx = np.where(split_x, 0.5 * (cx0 + cx1), cx1)
        my = np.where(split_x, cy1, 0.5 * (cy0 + cy1))
        # first halves end at the midpoint, second halves start there
        nx0 = np.concatenate([cx0, np.where(split_x, mx, cx0)])
        nx1 = np.concatenate([mx, cx1])
        ny0 = np.concatenate([cy0, np.where(split_x, cy0, my)])
        ny1 = np.concatenate([my, cy1])
        nv, nex, ney = _kronrod_cells(g, nx0, nx1, ny0, ny1)
        evaluations += 225 * nx0.size
        keep = np.ones(x0.size, dtype=bool)
        keep[chosen] = False
        x0, x1 = np.concatenate([x0[keep], nx0]), np.concatenate([x1[keep], nx1])
        y0, y1 = np.concatenate([y0[keep], ny0]), np.concatenate([y1[keep], ny1])
        values = np.concatenate([values[keep], nv])
        ex_ = np.concatenate([ex_[keep], nex])
        ey_ = np.concatenate([ey_[keep], ney])
        idx = np.lexsort((y0, x0))
        x0, x1, y0, y1 = x0[idx], x1[idx], y0[idx], y1[idx]
        values, ex_, ey_ = values[idx], ex_[idx], ey_[idx]


def _as_vectorised(f, vectorized):
    if vectorized:
        return lambda x: np.asarray(f(x), dtype=float) * np.ones_like(x)
    return lambda x: np.array([f(float(v)) for v in x.ravel()],
                              dtype=float).reshape(x.shape)


def _checked(values, abscissae):
    bad = ~np.isfinite(values)
    if bad.any():
        raise NonFiniteIntegrandError(float(abscissae[bad][0]))
    return values


def integrate_semi_infinite(f, lower, cfg=None, *, vectorized=False):
    """Integrate ``f`` over ``[lower, inf)``.

    Parameters
    ----------
    f : callable
        Integrand. With ``vectorized=True`` it is called with numpy arrays,
        otherwise once per abscissa with a float.
    lower : float
        Finite lower limit.
    cfg : QuadratureConfig, optional

    Returns
    -------
    Estimate
        ``converged`` is False when the subdivision budget runs out, e.g. for
        a non-integrable tail. A NaN from ``f`` raises
        :class:`NonFiniteIntegrandError` naming the abscissa.
    """
    cfg = cfg or QuadratureConfig()
    lower = float(lower)
    if not math.isfinite(lower):
        raise DomainError("lower limit must be finite")
    fv = _as_vectorised(f, vectorized)

    def g(t):
        s = 1.0 - t
        x = lower + t / s
        return _checked(fv(x), x) / (s * s)

    return _adaptive(g, 0.0, 1.0, cfg)


def integrate_interval(f, a, b, cfg=None, *, vectorized=False):
    """Integrate ``f`` over the finite interval ``[a, b]``."""
    cfg = cfg or QuadratureConfig()
    if a == b:
        return Estimate(0.0, 0.0, 0, True)
    fv = _as_vectorised(f, vectorized)
    return _adaptive(lambda x: _checked(fv(x), x), float(a), float(b), cfg)


def matsubara_sum(term, thermal, cfg=None):
    """Half-weighted Matsubara sum ``term(0)/2 + sum_{n>=1} term(n)``.

    ``term`` is called as ``term(n, zeta_n)`` and may return a float or an
    :class:`Estimate`; in the latter case errors and convergence flags are
    accumulated. The sum stops once two consecutive terms satisfy
    ``|term| <= sum_truncation_rel * |partial sum|``.
    """
    cfg = cfg or QuadratureConfig()
    if thermal.is_zero:
        raise DomainError("matsubara_sum needs a finite-temperature state")

    def call(n):
        out = term(n, thermal.zeta(n))
        if isinstance(out, Estimate):
            return float(out.value), float(out.abs_error), bool(out.converged)
        return float(out), 0.0, True

    value, err, ok = call(0)
    partial = 0.5 * value
    abs_error = 0.5 * err
    failed = [] if ok else [0]
    small_run = 0
    last = value
    n = 0
    while small_run < 2:
        n += 1
        if n >= cfg.max_matsubara_terms:
            return Estimate(partial, abs_error + abs(last), n, False,
                            {"terms": n, "failed_terms": failed,
                             "reason": "no decay within max_matsubara_terms"})
        last, err, ok = call(n)
        partial += last
        abs_error += err
        if not ok:
            failed.append(n)
        if abs(last) <= cfg.sum_truncation_rel * abs(partial):
            small_run += 1
        else:
            small_run = 0
    return Estimate(partial, abs_error + abs(last), n + 1, not failed,
                    {"terms": n + 1, "failed_terms": failed})


def zero_temperature_integral(term, cfg=None, *, vectorized=False):
    """Zero-temperature replacement of a Matsubara sum.

    Returns ``int_0^inf term(zeta) dzeta``. Since the Matsubara spacing is
    ``2 pi / (beta hbar_c)``, the caller multiplies by ``beta hbar_c / (2 pi)``
    wherever the finite-temperature formula had ``sum'``; in practice the
    ``1/beta`` prefactors cancel and a ``hbar_c / (2 pi)`` weight remains.
    """
    return integrate_semi_infinite(term, 0.0, cfg, vectorized=vectorized)


def integrate_strip(f, cfg=None):
    """``int_0^inf dx int_0^1 dy f(x, y)`` by 2D adaptive cubature.

    ``f`` must accept broadcastable arrays ``x`` and ``y`` and return an
    array of their broadcast shape. ``x = t/(1-t)`` maps the infinite
    direction onto the unit interval, as in :func:`integrate_semi_infinite`.

    Raises
    ------
    NonFiniteIntegrandError
        If ``f`` returns NaN or infinity.
    """
    cfg = cfg or QuadratureConfig()

    def g(t, y):
        x = t / (1.0 - t)
        vals = np.asarray(f(x, y), dtype=float) / (1.0 - t) ** 2
        vals = np.broadcast_to(vals, np.broadcast_shapes(t.shape, y.shape))
        return _checked(vals, np.broadcast_to(x, vals.shape))

    return _adaptive_2d(g, cfg)
