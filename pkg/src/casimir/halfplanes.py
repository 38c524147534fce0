"""Casimir force between two magnetodielectric half-spaces.

Geometry: medium 1 fills ``z < 0``, medium 2 fills ``z > a``, vacuum in
between. With ``q**2 = k_perp**2 + zeta**2`` and
``kappa_i = sqrt(q**2 + (eps_i mu_i - 1) zeta**2) / q`` the TM and TE
reflection products are

    A = (eps1 - kappa1)(eps2 - kappa2) / ((eps1 + kappa1)(eps2 + kappa2))
    B = (kappa1 - mu1)(kappa2 - mu2) / ((kappa1 + mu1)(kappa2 + mu2))

and the force per unit area (negative = attraction) is

    f = -(1/(pi beta)) sum'_{n>=0} int_{zeta_n}^inf q^2 dq
            [A e^{-2qa}/(1 - A e^{-2qa}) + B e^{-2qa}/(1 - B e^{-2qa})]

At zero temperature ``(1/beta) sum'`` becomes ``(hbar_c/(2 pi)) int dzeta``.
Inside the quadrature everything is made dimensionless with ``y = 2 q a``
and ``w = 2 zeta a``; ``f a**4 / hbar_c`` is what gets integrated.

Besides the force, the module carries the machinery used to check the
closed forms: a mode-matching solver for the field coefficients at the two
interfaces, the electric/magnetic coefficient relations, the algebraic
identities behind the magnetic generalisation, and an audit of the
dipole-sum assembly against the force integrand.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from .exceptions import DomainError
from .materials import PlateSpec, interface_factors, minus_kappa
from .numerics import (Estimate, QuadratureConfig, ThermalState, integrate_semi_infinite,
                       integrate_strip, matsubara_sum)
from .results import ForceResult, sign_label

__all__ = [
    "CONDUCTOR_REDUCED",
    "HalfSpacePair",
    "ReflectionPair",
    "BoundaryCoefficients",
    "IdentityCheck",
    "AuditReport",
    "SignMap",
    "reflection",
    "lifshitz_integrand",
    "force_per_area",
    "classify",
    "boundary_solve_tm",
    "boundary_solve_te",
    "closed_form_d_tm",
    "closed_form_d_te",
    "coefficient_relations",
    "sq_identities",
    "derivation_audit",
]

# |f| a^4 / hbar_c for two ideal conductors at zero temperature.
CONDUCTOR_REDUCED = math.pi ** 2 / 240.0
ZERO_THRESHOLD = 1e-3


@dataclass(frozen=True)
class HalfSpacePair:
    plate1: PlateSpec
    plate2: PlateSpec
    gap: float

    def __post_init__(self):
        for name in ("plate1", "plate2"):
            p = getattr(self, name)
            if not isinstance(p, PlateSpec):
                object.__setattr__(self, name, PlateSpec(*p))
        if not (self.gap > 0 and math.isfinite(self.gap)):
            raise DomainError("gap must be positive")

    def swapped(self):
        return HalfSpacePair(self.plate2, self.plate1, self.gap)

    @property
    def frequency_independent(self):
        return self.plate1.frequency_independent and self.plate2.frequency_independent


@dataclass(frozen=True)
class ReflectionPair:
    A: np.ndarray
    B: np.ndarray


def reflection(pair, q, zeta):
    """TM and TE reflection products ``A`` and ``B`` at ``(q, zeta)``.

    ``q`` may be an array, ``zeta`` is a scalar with ``q >= zeta >= 0``. The
    ``zeta = 0`` values are the analytic limits for each material class.
    """
    tm1, te1 = interface_factors(pair.plate1, q, zeta)
    tm2, te2 = interface_factors(pair.plate2, q, zeta)
    A, B = tm1 * tm2, te1 * te2
    if A.ndim == 0:
        return ReflectionPair(float(A), float(B))
    return ReflectionPair(A, B)


def _channel(r, y):
    """``r e^{-y} / (1 - r e^{-y})`` without cancellation near ``r = 1``."""
    r = np.asarray(r, dtype=float)
    ey = np.exp(-y)
    denom = (1.0 - r) - r * np.expm1(-y)
    with np.errstate(invalid="ignore"):
        out = np.where(r == 0.0, 0.0, r * ey / denom)
    return out


def lifshitz_integrand(A, B, q, a):
    """The bracket of the force formula at given reflections, wavenumber and gap."""
    y = 2.0 * np.asarray(q, dtype=float) * a
    return _channel(A, y) + _channel(B, y)


def _inner(pair, w, lower, cfg, channel):
    """``int_lower^inf y^2 ch(y) dy`` at ``zeta = w / (2a)`` for one channel."""
    two_a = 2.0 * pair.gap
    zeta = w / two_a
    pick = (lambda r: r.A) if channel == "tm" else (lambda r: r.B)
    return integrate_semi_infinite(
        lambda y: y * y * _channel(pick(reflection(pair, y / two_a, zeta)), y),
        lower, cfg, vectorized=True)


def _combine(a, b):
    return Estimate(a.value + b.value, a.abs_error + b.abs_error,
                    a.evaluations + b.evaluations, a.converged and b.converged)


def force_per_area(pair, thermal=None, cfg=None):
    """Lifshitz force per unit area between the two half-spaces.

    Parameters
    ----------
    pair : HalfSpacePair
    thermal : ThermalState
        ``hbar_c`` of the state sets the unit of the returned value
        (``hbar_c = 1``: natural units; SI ``hbar_c`` and gap in metres give
        pascal). Defaults to zero temperature.
    cfg : QuadratureConfig

    Returns
    -------
    ForceResult
        ``value`` is the pressure (negative: attraction), ``reduced`` is
        ``value * a**4 / hbar_c``. ``diagnostics`` holds the TM and TE
        contributions (reduced units), the number of Matsubara terms and the
        indices of terms whose inner integral did not converge. The sign is
        ``"zero"`` when ``|reduced|`` is below ``1e-3`` of the ideal-conductor
        value.
    """
    thermal = thermal or ThermalState.zero()
    cfg = cfg or QuadratureConfig()
    inner_cfg = cfg.tightened(10.0)
    a = pair.gap
    if pair.plate1.is_vacuum or pair.plate2.is_vacuum:
        return ForceResult(0.0, "zero", 0.0, True, 0.0,
                           {"tm": 0.0, "te": 0.0, "terms": 0, "failed_terms": []})
    if thermal.is_zero:
        # w = y s maps the wedge 0 <= w <= y onto a strip: dw dy -> y ds dy
        failed = []
        parts = {}
        for name in ("tm", "te"):
            def integrand(y, s, name=name):
                r = reflection(pair, y / (2.0 * a), y * s / (2.0 * a))
                return y ** 3 * _channel(r.A if name == "tm" else r.B, y)
            parts[name] = integrate_strip(integrand, cfg)
        scale = -1.0 / (32.0 * math.pi ** 2)
        est = _combine(parts["tm"], parts["te"])
        n_terms = None
    else:
        failed = []
        channel_terms = []

        def term(n, zeta):
            w = 2.0 * a * zeta
            tm = _inner(pair, w, w, inner_cfg, "tm")
            te = _inner(pair, w, w, inner_cfg, "te")
            channel_terms.append((tm.value, te.value))
            if not (tm.converged and te.converged):
                failed.append(n)
            return _combine(tm, te)

        est = matsubara_sum(term, thermal, cfg)
        weights = np.ones(len(channel_terms))
        weights[0] = 0.5
        sums = weights @ np.array(channel_terms)
        parts = {"tm": Estimate(sums[0], 0.0, 0, True), "te": Estimate(sums[1], 0.0, 0, True)}
        scale = -a * thermal.spacing / (16.0 * math.pi ** 2)
        n_terms = len(channel_terms)
    reduced = scale * est.value
    converged = est.converged and not failed
    value = reduced * thermal.hbar_c / a ** 4
    diagnostics = {
        "tm": scale * parts["tm"].value,
        "te": scale * parts["te"].value,
        "terms": n_terms,
        "failed_terms": failed,
        "evaluations": est.evaluations,
    }
    return ForceResult(value, sign_label(reduced, ZERO_THRESHOLD * CONDUCTOR_REDUCED),
                       abs(scale) * est.abs_error * thermal.hbar_c / a ** 4,
                       converged, reduced, diagnostics)


@dataclass
class SignMap:
    """Forces over a grid of plate pairs; ``signs`` holds -1 / 0 / +1."""

    results: np.ndarray

    @property
    def values(self):
        return np.vectorize(lambda r: r.value, otypes=[float])(self.results)

    @property
    def reduced(self):
        return np.vectorize(lambda r: r.reduced, otypes=[float])(self.results)

    @property
    def labels(self):
        return np.vectorize(lambda r: r.sign, otypes=[object])(self.results)

    @property
    def signs(self):
        table = {"attractive": -1, "zero": 0, "repulsive": 1}
        return np.vectorize(lambda r: table[r.sign], otypes=[int])(self.results)

    @property
    def converged(self):
        return np.vectorize(lambda r: r.converged, otypes=[bool])(self.results)


def classify(pairs, thermal=None, cfg=None, threads=1):
    """Evaluate :func:`force_per_area` over an array-like of pairs.

    The output keeps the shape of ``pairs``; evaluation may use ``threads``
    worker threads but results are placed by index, so the map is
    independent of scheduling.
    """
    grid = np.empty(np.shape(pairs) if not isinstance(pairs, HalfSpacePair) else (), dtype=object)
    flat_in = list(np.asarray(pairs, dtype=object).ravel()) if grid.shape else [pairs]

    def run(p):
        return force_per_area(p, thermal, cfg)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(run, flat_in))
    else:
        out = [run(p) for p in flat_in]
    flat = grid.reshape(-1)
    for i, r in enumerate(out):
        flat[i] = r
    return SignMap(grid)


# ---------------------------------------------------------------------------
# Field coefficients at the two interfaces


@dataclass(frozen=True)
class BoundaryCoefficients:
    B: float
    C: float
    C1: float
    D: float


def _kappas(eps1, mu1, eps2, mu2, q, zeta):
    if not (q > 0 and q >= zeta >= 0):
        raise DomainError("need q >= zeta >= 0 and q > 0")
    for v in (eps1, mu1, eps2, mu2):
        if not (v > 0 and math.isfinite(v)):
            raise DomainError("material constants must be finite and positive")
    k1 = math.sqrt(q * q + (eps1 * mu1 - 1.0) * zeta * zeta) / q
    k2 = math.sqrt(q * q + (eps2 * mu2 - 1.0) * zeta * zeta) / q
    return k1, k2


def _mode_amplitudes(polarization, eps, mu, kap, s):
    """Tangential (E, H) per unit coefficient of the mode ``e^{-s q_eps z}``.

    Common factors (``i k_perp``, ``zeta``, ``q``) are dropped per row.
    TM: the field ``q_eps u_{eps,+/-}`` has ``E_x ~ kappa`` and, from
    ``h_eps x E = zeta mu H``, ``H_y ~ s eps``. TE: ``E_y = 1`` and
    ``H_x ~ -s kappa / mu``.
    """
    if polarization == "tm":
        return kap, s * eps
    return 1.0, -s * kap / mu


def _match(polarization, eps1, mu1, eps2, mu2, q, zeta, a):
    """Solve continuity of tangential E and H at ``z = 0`` and ``z = a``.

    Unknowns are scaled so that every exponential in the system is at most
    one: ``C1 e^{qa}`` and ``D e^{-q_2 a}`` are solved for instead of ``C1``
    and ``D``.
    """
    if not a > 0:
        raise DomainError("gap must be positive")
    k1, k2 = _kappas(eps1, mu1, eps2, mu2, q, zeta)
    media = ((eps1, mu1, k1), (1.0, 1.0, 1.0), (eps2, mu2, k2))
    source = 1.0 / eps1 if polarization == "tm" else mu1
    e_gap = math.exp(-q * a)
    # (region, direction s, exponential factor at z=0, at z=a)
    unknowns = (
        (0, -1, 1.0, None),      # B: growing into region 1, referenced at z = 0
        (1, +1, 1.0, e_gap),     # C
        (1, -1, e_gap, 1.0),     # C1 e^{qa}
        (2, +1, None, 1.0),      # D e^{-q2 a}
    )
    m = np.zeros((4, 4))
    rhs = np.zeros(4)
    for row0, (interface, left, right) in enumerate(((0, 0, 1), (1, 1, 2))):
        for comp in (0, 1):
            row = 2 * row0 + comp
            for col, (region, s, at0, ata) in enumerate(unknowns):
                if region not in (left, right):
                    continue
                amp = _mode_amplitudes(polarization, *media[region], s)[comp]
                factor = at0 if interface == 0 else ata
                m[row, col] = (amp if region == left else -amp) * factor
            if interface == 0:
                # incident source mode of region 1, decaying away from z = 0
                rhs[row] = -source * _mode_amplitudes(polarization, *media[0], +1)[comp]
    b, c, c1s, ds = np.linalg.solve(m, rhs)
    q2 = k2 * q
    return BoundaryCoefficients(float(b), float(c), float(c1s * e_gap),
                                float(ds * math.exp(q2 * a)))


def boundary_solve_tm(eps1, mu1, eps2, mu2, q, zeta, a):
    """TM field coefficients ``(B, C, C1, D)`` from the interface conditions."""
    return _match("tm", eps1, mu1, eps2, mu2, q, zeta, a)


def boundary_solve_te(eps1, mu1, eps2, mu2, q, zeta, a):
    """TE field coefficients ``(B, C, C1, D)`` from the interface conditions."""
    return _match("te", eps1, mu1, eps2, mu2, q, zeta, a)


def _differences(x1, x2, em1, em2, q, zeta, k1, k2):
    s2 = (zeta / q) ** 2
    return minus_kappa(x1, em1, s2, k1), minus_kappa(x2, em2, s2, k2)


def closed_form_d_tm(eps1, mu1, eps2, mu2, q, zeta, a):
    k1, k2 = _kappas(eps1, mu1, eps2, mu2, q, zeta)
    d1, d2 = _differences(eps1, eps2, eps1 * mu1, eps2 * mu2, q, zeta, k1, k2)
    A = d1 * d2 / ((eps1 + k1) * (eps2 + k2))
    return (4.0 * k1 * math.exp((k2 - 1.0) * q * a)
            / ((eps1 + k1) * (eps2 + k2) * (1.0 - A * math.exp(-2.0 * q * a))))


def closed_form_d_te(eps1, mu1, eps2, mu2, q, zeta, a):
    k1, k2 = _kappas(eps1, mu1, eps2, mu2, q, zeta)
    d1, d2 = _differences(mu1, mu2, eps1 * mu1, eps2 * mu2, q, zeta, k1, k2)
    B = d1 * d2 / ((k1 + mu1) * (k2 + mu2))
    return (4.0 * mu1 * mu2 * k1 * math.exp((k2 - 1.0) * q * a)
            / ((k1 + mu1) * (k2 + mu2) * (1.0 - B * math.exp(-2.0 * q * a))))


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: float
    rhs: float
    scale: float
    tol: float = 1e-12

    @property
    def rel_error(self):
        if self.scale == 0.0:
            return abs(self.lhs - self.rhs)
        return abs(self.lhs - self.rhs) / self.scale

    @property
    def ok(self):
        return self.rel_error <= self.tol


def coefficient_relations(eps1, mu1, eps2, mu2, q, zeta, a, tol=1e-12):
    """Check ``D_E_perp = mu1 mu2 D_H_par`` and ``D_H_perp = eps1 eps2 D_E_par``.

    The magnetic coefficients are the electric ones with ``eps`` and ``mu``
    interchanged.
    """
    de_par = closed_form_d_tm(eps1, mu1, eps2, mu2, q, zeta, a)
    de_perp = closed_form_d_te(eps1, mu1, eps2, mu2, q, zeta, a)
    dh_par = closed_form_d_tm(mu1, eps1, mu2, eps2, q, zeta, a)
    dh_perp = closed_form_d_te(mu1, eps1, mu2, eps2, q, zeta, a)
    lhs1, rhs1 = de_perp, mu1 * mu2 * dh_par
    lhs2, rhs2 = dh_perp, eps1 * eps2 * de_par
    return [
        IdentityCheck("D_E_perp = mu1 mu2 D_H_par", lhs1, rhs1, max(abs(lhs1), abs(rhs1)), tol),
        IdentityCheck("D_H_perp = eps1 eps2 D_E_par", lhs2, rhs2, max(abs(lhs2), abs(rhs2)), tol),
    ]


def sq_identities(eps1, mu1, eps2, mu2, q, zeta, tol=1e-12):
    """Algebraic identities behind the magnetic generalisation of the force.

    With ``P_i = k_perp**2 + q_i q`` (``q_i = kappa_i q``) the TM combination
    of electric, mixed and magnetic dipole terms is checked in its expanded
    four-term form, its product form, and the compact form
    ``q**2 (eps1 - kappa1)(q + q1)(eps2 - kappa2)(q + q2)``; likewise for TE
    with ``eps`` and ``mu`` in exchanged roles. The common prefactors
    (``D/36`` and ``D/(36 mu1 mu2)``) are cleared. Errors are relative to the
    sum of absolute values of the expanded terms.
    """
    k1, k2 = _kappas(eps1, mu1, eps2, mu2, q, zeta)
    q1, q2 = k1 * q, k2 * q
    kp2 = q * q - zeta * zeta
    z2 = zeta * zeta
    p1, p2 = kp2 + q1 * q, kp2 + q2 * q

    def bilinear(x1, y1, x2, y2, w1, w2):
        # (x1 P1 - y1 w1 z2)(x2 P2 - y2 w2 z2), expanded term by term
        terms = (x1 * x2 * p1 * p2, -x1 * y2 * w2 * z2 * p1,
                 -x2 * y1 * w1 * z2 * p2, y1 * y2 * w1 * w2 * z2 * z2)
        product = (x1 * p1 - y1 * w1 * z2) * (x2 * p2 - y2 * w2 * z2)
        return math.fsum(terms), product, sum(abs(t) for t in terms)

    par_exp, par_prod, par_scale = bilinear(eps1 - 1, mu1 - 1, eps2 - 1, mu2 - 1, eps1, eps2)
    d1, d2 = _differences(eps1, eps2, eps1 * mu1, eps2 * mu2, q, zeta, k1, k2)
    par_compact = q * q * d1 * (q + q1) * d2 * (q + q2)
    perp_exp, perp_prod, perp_scale = bilinear(mu1 - 1, eps1 - 1, mu2 - 1, eps2 - 1, mu1, mu2)
    d1, d2 = _differences(mu1, mu2, eps1 * mu1, eps2 * mu2, q, zeta, k1, k2)
    perp_compact = q * q * d1 * (q + q1) * d2 * (q + q2)
    return [
        IdentityCheck("S_par expanded = product", par_exp, par_prod, par_scale, tol),
        IdentityCheck("S_par expanded = compact", par_exp, par_compact, par_scale, tol),
        IdentityCheck("S_perp product = compact", perp_prod, perp_compact, perp_scale, tol),
        IdentityCheck("S_perp expanded = compact", perp_exp, perp_compact, perp_scale, tol),
    ]


@dataclass
class AuditReport:
    """Dipole-sum assembly ``I Q S`` versus the force integrand, per polarization."""

    tm_assembly: float
    te_assembly: float
    tm_integrand: float
    te_integrand: float
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def tm_ratio(self):
        return self.tm_assembly / self.tm_integrand if self.tm_integrand else math.nan

    @property
    def te_ratio(self):
        return self.te_assembly / self.te_integrand if self.te_integrand else math.nan


def derivation_audit(pair, q, zeta):
    """Assemble ``I * Q * S`` for non-magnetic media and compare with the integrand.

    ``I`` is the double integral over the depths of the two dipoles,
    ``Q = (eps1-1)(eps2-1)/4`` the density factor and ``S`` the
    orientation-averaged interaction weighted by the field coefficients, which
    are taken from :func:`boundary_solve_tm` / :func:`boundary_solve_te`.
    The ratio to the corresponding term of the force integrand is reported;
    it should not depend on ``q`` or ``zeta``.
    """
    from .materials import evaluate

    if zeta <= 0:
        raise DomainError("the audit needs zeta > 0")
    plates = (pair.plate1, pair.plate2)
    if any(p.eps.is_ideal or p.mu.is_ideal for p in plates):
        raise DomainError("the audit needs finite media")
    mus = [evaluate(p.mu, zeta) for p in plates]
    if any(m != 1.0 for m in mus):
        raise DomainError("the audit applies to non-magnetic media (mu = 1)")
    eps1, eps2 = (evaluate(p.eps, zeta) for p in plates)
    a = pair.gap
    k1, k2 = _kappas(eps1, 1.0, eps2, 1.0, q, zeta)
    q1, q2 = k1 * q, k2 * q
    depth = math.exp(-(q2 + q) * a) / (q1 * q * (q1 + q) * (q2 + q))
    density = (eps1 - 1.0) * (eps2 - 1.0) / 4.0
    kp2 = q * q - zeta * zeta
    avg_par = (kp2 + q1 * q) * (kp2 + q2 * q) / 9.0
    avg_perp = zeta ** 4 / 9.0
    d_par = boundary_solve_tm(eps1, 1.0, eps2, 1.0, q, zeta, a).D
    d_perp = boundary_solve_te(eps1, 1.0, eps2, 1.0, q, zeta, a).D
    r = reflection(pair, q, zeta)
    y = 2.0 * q * a
    return AuditReport(
        tm_assembly=depth * density * d_par * avg_par,
        te_assembly=depth * density * d_perp * avg_perp,
        tm_integrand=float(_channel(r.A, y)),
        te_integrand=float(_channel(r.B, y)),
        extra={"D_par": d_par, "D_perp": d_perp, "I": depth, "Q": density},
    )
