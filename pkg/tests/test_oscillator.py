import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from casimir.exceptions import DegenerateCouplingError, DomainError
from casimir.numerics import ThermalState
from casimir.oscillator import (OscillatorTriplet, build_q_matrix, induced_free_energy_and_sign,
                                q_determinant, q_factored)

MODES = ("TM", "TE", "mixed", ("momentum", "coordinate"))
freq2 = st.floats(0.2, 5.0)


@st.composite
def triplets(draw, modes=MODES):
    a1, a2, a3 = draw(freq2), draw(freq2), draw(freq2)
    mode = draw(st.sampled_from(modes))
    c = draw(st.floats(-1.0, 1.0))
    t = OscillatorTriplet(a1, a2, a3, c, mode)
    assume(max(t.max_abs_d()) < 0.9)
    # stay clear of the zero-mode boundary, where ln Q(0) diverges
    assume(t.stability_margin() > 0.05 * min(a1, a2, a3))
    return t


def _normal_modes(t, couple1=True, couple2=True):
    """Normal-mode frequencies from the stiffness matrix of the quadratic energy.

    A momentum-coupled oscillator enters (after exchanging coordinates and
    momenta) as a_j (x_j - c x_3 / a_j)^2, which also stiffens oscillator 3.
    """
    k = np.diag([t.a1, t.a2, t.a3])
    for j, (aj, kind, on) in enumerate(zip(t.outer, t.couplings, (couple1, couple2))):
        if on:
            k[j, 2] = k[2, j] = t.c
            if kind == "momentum":
                k[2, 2] += t.c ** 2 / aj
    w2 = np.linalg.eigvalsh(k)
    assert np.all(w2 > 0)
    return np.sqrt(w2)


def _oracle(t, beta):
    """Interaction free energy from exact oscillator thermodynamics."""
    def free(w):
        if beta is None:
            return 0.5 * np.sum(w)
        return np.sum(np.log(2.0 * np.sinh(beta * w / 2.0))) / beta
    return (free(_normal_modes(t)) - free(_normal_modes(t, True, False))
            - free(_normal_modes(t, False, True)) + free(_normal_modes(t, False, False)))


@given(triplets(), st.floats(0.0, 10.0))
def test_determinant_forms_match_factored(t, zeta):
    ref = q_factored(t, zeta).Q
    for form in ("symmetrized", "coordinate"):
        assert q_determinant(t, zeta, form) == pytest.approx(ref, rel=1e-12)
        assert np.linalg.det(build_q_matrix(t, zeta, form)) == pytest.approx(ref, rel=1e-12)


@given(triplets(), st.floats(0.0, 10.0))
def test_sign_law(t, zeta):
    f = q_factored(t, zeta)
    # below ~1e-16 the factor rounds to exactly one
    assume(abs(f.D1 * f.D2) > 1e-12)
    assert np.sign(1.0 - f.casimir_factor) == np.sign(f.D1 * f.D2)


@pytest.mark.parametrize("mode, expected", [("TM", 0.98), ("TE", 1.0), ("mixed", 0.99)])
def test_static_determinant(mode, expected):
    t = OscillatorTriplet(1.0, 1.0, 1.0, 0.1, mode)
    assert q_factored(t, 0.0).Q == pytest.approx(expected, rel=1e-15)
    assert q_determinant(t, 0.0, "coordinate") == pytest.approx(expected, rel=1e-15)


def test_coordinate_form_carries_the_shift():
    t = OscillatorTriplet(1.0, 2.0, 1.5, 0.3, "TE")
    m = build_q_matrix(t, 0.7, "coordinate")
    assert m[2, 2] == pytest.approx(1.5 + 0.49 + 0.09 / 1.0 + 0.09 / 2.0)
    s = build_q_matrix(t, 0.7)
    assert s[2, 2] == pytest.approx(1.5 + 0.49)
    assert s[0, 2] == -s[2, 0]


@pytest.mark.parametrize("mode, sign", [("TM", "attractive"), ("TE", "attractive"),
                                        ("mixed", "repulsive")])
@pytest.mark.parametrize("beta", [None, 0.5, 1.0, 20.0])
def test_three_cases(mode, sign, beta):
    th = ThermalState.zero() if beta is None else ThermalState.finite(beta)
    res = induced_free_energy_and_sign(OscillatorTriplet(1.0, 1.0, 1.0, 0.1, mode), th)
    assert res.sign == sign


@given(triplets(), st.one_of(st.none(), st.floats(0.3, 30.0)))
def test_free_energy_matches_normal_mode_thermodynamics(t, beta):
    assume(abs(t.c) > 1e-3)
    th = ThermalState.zero() if beta is None else ThermalState.finite(beta)
    res = induced_free_energy_and_sign(t, th)
    ref = _oracle(t, beta)
    assert res.delta_f == pytest.approx(ref, rel=1e-7, abs=1e-13)


def test_te_has_no_classical_limit():
    # the zeta = 0 term vanishes for momentum coupling, so beta * F -> 0 at high T
    tm = OscillatorTriplet(1.0, 1.0, 1.0, 0.1, "TM")
    te = OscillatorTriplet(1.0, 1.0, 1.0, 0.1, "TE")
    assert q_factored(te, 0.0).casimir_factor == 1.0
    for beta in (1e-2, 1e-3):
        th = ThermalState.finite(beta)
        f_tm = induced_free_energy_and_sign(tm, th).delta_f * beta
        f_te = induced_free_energy_and_sign(te, th).delta_f * beta
        assert f_tm == pytest.approx(0.5 * math.log(q_factored(tm, 0.0).casimir_factor),
                                     rel=1e-3)
        assert abs(f_te) < 1e-6 * abs(f_tm)


@given(triplets())
def test_relabelling_symmetry(t):
    th = ThermalState.finite(2.0)
    a = induced_free_energy_and_sign(t, th).delta_f
    b = induced_free_energy_and_sign(t.swapped(), th).delta_f
    assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


def test_low_temperature_limit():
    t = OscillatorTriplet(1.0, 2.0, 1.5, 0.2, "mixed")
    zero = induced_free_energy_and_sign(t, ThermalState.zero()).delta_f
    cold = induced_free_energy_and_sign(t, ThermalState.finite(200.0)).delta_f
    assert cold == pytest.approx(zero, rel=1e-8)


def test_no_coupling():
    res = induced_free_energy_and_sign(OscillatorTriplet(1.0, 1.0, 1.0, 0.0, "TE"),
                                       ThermalState.finite(1.0))
    assert res.delta_f == 0.0 and res.sign == "none"


def test_unstable_coupling():
    t = OscillatorTriplet(1.0, 1.0, 1.0, 1.0, "TM")
    with pytest.raises(DegenerateCouplingError):
        q_factored(t, 0.0)
    with pytest.raises(DegenerateCouplingError):
        induced_free_energy_and_sign(t, ThermalState.zero())


@pytest.mark.parametrize("mode", ["TM", "mixed"])
def test_jointly_unstable_coupling(mode):
    # each |D_j| = 1/2 < 1, yet the stiffness matrix is singular: a zero mode
    t = OscillatorTriplet(2.0, 2.0, 1.0, 1.0, "TM")
    assert max(t.max_abs_d()) < 1.0
    assert t.stability_margin() == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DegenerateCouplingError):
        induced_free_energy_and_sign(t, ThermalState.finite(1.0))
    stable = OscillatorTriplet(2.0, 2.0, 1.0, 0.5, mode)
    assert stable.stability_margin() > 0


@pytest.mark.parametrize("args", [
    (0.0, 1.0, 1.0, 0.1, "TM"),
    (1.0, -1.0, 1.0, 0.1, "TM"),
    (1.0, 1.0, 1.0, math.inf, "TM"),
    (1.0, 1.0, 1.0, 0.1, "TX"),
    (1.0, 1.0, 1.0, 0.1, ("momentum",)),
])
def test_invalid_triplets(args):
    with pytest.raises(DomainError):
        OscillatorTriplet(*args)


def test_unknown_matrix_form():
    with pytest.raises(DomainError):
        build_q_matrix(OscillatorTriplet(1.0, 1.0, 1.0, 0.1, "TE"), 1.0, "banded")
