import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dotsim import (
    AmplitudeState,
    AngleState,
    Constant,
    NegativeTimeError,
    NonPositiveCapacitanceError,
    NonPositiveDistanceError,
    NotNormalizedError,
    SystemParams,
    TanhRise,
    amplitudes_from_angles,
    angles_from_amplitudes,
    charging_from_capacitance,
    eval_drive,
    eval_envelope,
    rabi_from_field,
    rhs_amplitudes,
    rhs_angles,
    wrap_angle,
)

CONST = Constant()


@st.composite
def system_params(draw):
    k = draw(st.floats(0.2, 3.0)) * draw(st.sampled_from([1.0, -1.0]))
    return SystemParams(
        k=k,
        omega_coulomb=draw(st.floats(0.0, 5.0)),
        rabi_ratio=draw(st.floats(0.0, 10.0)),
        omega_drive=draw(st.floats(0.5, 20.0)),
        phase=draw(st.floats(-math.pi, math.pi)),
    )


envelopes = st.one_of(st.just(CONST), st.builds(TanhRise, st.floats(0.5, 10.0)))
times = st.floats(0.0, 20.0)


@st.composite
def unit_amplitudes(draw):
    comps = [draw(st.floats(-1.0, 1.0)) for _ in range(4)]
    norm = math.sqrt(sum(c * c for c in comps))
    if norm < 1e-3:
        comps, norm = [1.0, 0.0, 0.0, 0.0], 1.0
    comps = [c / norm for c in comps]
    return AmplitudeState(complex(comps[0], comps[1]), complex(comps[2], comps[3]))


@st.composite
def nonpole_angles(draw):
    alpha = draw(st.floats(1e-3, math.pi / 2 - 1e-3))
    if abs(math.sin(2.0 * alpha)) <= 1e-3:
        alpha = math.pi / 4
    return AngleState(alpha=alpha,
                      phi=draw(st.floats(-math.pi, math.pi)),
                      lambda_ref=draw(st.floats(-math.pi, math.pi)))


# ---------------------------------------------------------------- parameters

def test_params_reject_zero_coupling():
    with pytest.raises(ValueError):
        SystemParams(k=0.0, omega_coulomb=1.0, rabi_ratio=1.0)


@pytest.mark.parametrize("kwargs", [
    dict(omega_coulomb=-0.1),
    dict(omega_drive=0.0),
    dict(omega_drive=-2.0),
    dict(rabi_ratio=-1.0),
    dict(k=math.nan),
])
def test_params_reject_bad_values(kwargs):
    base = dict(k=1.0, omega_coulomb=1.0, rabi_ratio=1.0)
    base.update(kwargs)
    with pytest.raises(ValueError):
        SystemParams(**base)


def test_negative_coupling_allowed():
    p = SystemParams(k=-1.0, omega_coulomb=0.5, rabi_ratio=2.0)
    assert p.rabi_frequency == 2.0 * p.omega_drive


# ------------------------------------------------------------------ envelope

def test_constant_envelope_is_one_anywhere():
    assert eval_envelope(CONST, 7.3) == 1.0


def test_tanh_envelope_starts_at_zero():
    assert eval_envelope(TanhRise(2.0), 0.0) == 0.0


def test_tanh_envelope_value():
    # tanh(2/2) = tanh(1)
    assert eval_envelope(TanhRise(2.0), 2.0) == pytest.approx(
        0.7615941559557649, abs=1e-15)


def test_tanh_envelope_rejects_negative_time():
    with pytest.raises(NegativeTimeError):
        eval_envelope(TanhRise(2.0), -1e-9)


def test_tanh_rise_time_must_be_positive():
    with pytest.raises(ValueError):
        TanhRise(0.0)


@given(tau=st.floats(0.1, 20.0), t=st.floats(0.0, 100.0))
def test_envelope_range(tau, t):
    assert 0.0 <= eval_envelope(TanhRise(tau), t) <= 1.0


# --------------------------------------------------------------------- drive

def test_drive_at_onset_constant():
    p = SystemParams(k=1.0, omega_coulomb=0.0, rabi_ratio=5.05, omega_drive=10.0)
    assert eval_drive(p, CONST, 0.0) == pytest.approx(25.25, abs=1e-12)


def test_drive_zero_at_tanh_onset():
    p = SystemParams(k=1.0, omega_coulomb=1.9, rabi_ratio=5.05, omega_drive=10.0)
    assert eval_drive(p, TanhRise(2.0), 0.0) == 0.0


def test_drive_zero_at_cos_node():
    p = SystemParams(k=1.0, omega_coulomb=0.0, rabi_ratio=2.4, omega_drive=10.0)
    assert abs(eval_drive(p, CONST, math.pi / 20.0)) < 1e-14


def test_drive_propagates_envelope_error():
    p = SystemParams(k=1.0, omega_coulomb=0.0, rabi_ratio=2.4, omega_drive=10.0)
    with pytest.raises(NegativeTimeError):
        eval_drive(p, TanhRise(1.0), -0.5)


@given(params=system_params(), env=envelopes, t=times)
def test_drive_amplitude_bound(params, env, t):
    assert abs(eval_drive(params, env, t)) <= 0.5 * params.rabi_frequency + 1e-12


# ------------------------------------------------------------ amplitude RHS

def test_rhs_amplitudes_bare_tunneling():
    p = SystemParams(k=1.0, omega_coulomb=0.0, rabi_ratio=0.0)
    d = rhs_amplitudes(AmplitudeState(1.0, 0.0), 0.0, p, CONST)
    assert d.d_a_l == 0.0
    assert d.d_a_r == -1.0j


def test_rhs_amplitudes_charging_term():
    p = SystemParams(k=1.0, omega_coulomb=0.5, rabi_ratio=0.0)
    d = rhs_amplitudes(AmplitudeState(1.0, 0.0), 0.0, p, CONST)
    assert d.d_a_l == pytest.approx(-0.5j, abs=1e-15)
    assert d.d_a_r == pytest.approx(-1.0j, abs=1e-15)


def test_rhs_amplitudes_symmetric_state_feels_only_field():
    # equal populations kill the charging term; F(0) = 1 for this setup
    p = SystemParams(k=1.0, omega_coulomb=1.7, rabi_ratio=0.5, omega_drive=4.0)
    s = AmplitudeState(1 / math.sqrt(2), 1 / math.sqrt(2))
    d = rhs_amplitudes(s, 0.0, p, CONST)
    assert d.d_a_l == pytest.approx((-1j + 1j) / math.sqrt(2), abs=1e-15)
    assert d.d_a_r == pytest.approx((-1j - 1j) / math.sqrt(2), abs=1e-15)


@given(state=unit_amplitudes(), params=system_params(), env=envelopes, t=times)
def test_amplitude_flow_preserves_norm(state, params, env, t):
    d = rhs_amplitudes(state, t, params, env)
    rate = (state.a_l.conjugate() * d.d_a_l + state.a_r.conjugate() * d.d_a_r).real
    assert abs(rate) < 1e-12


# ---------------------------------------------------------------- angle RHS

def test_rhs_angles_balanced_state():
    # alpha = pi/4 kills the cot and charging terms; F(0) = c
    c = 3.2
    p = SystemParams(k=1.0, omega_coulomb=1.1, rabi_ratio=2.0 * c / 8.0,
                     omega_drive=8.0)
    d = rhs_angles(AngleState(math.pi / 4, 0.0), 0.0, p, CONST)
    assert d.d_alpha == 0.0
    assert d.d_phi == pytest.approx(-2.0 * c, abs=1e-12)
    assert not d.clamped


def test_rhs_angles_quarter_phase():
    p = SystemParams(k=1.0, omega_coulomb=0.0, rabi_ratio=0.0)
    d = rhs_angles(AngleState(math.pi / 4, math.pi / 2), 0.0, p, CONST)
    assert d.d_alpha == pytest.approx(-1.0, abs=1e-15)


def test_rhs_angles_clamps_at_pole():
    p = SystemParams(k=1.0, omega_coulomb=0.0, rabi_ratio=0.0)
    d = rhs_angles(AngleState(1e-12, 0.7), 0.0, p, CONST)
    assert d.clamped
    assert math.isfinite(d.d_phi)


def _push_through_map(s: AngleState, d) -> tuple[complex, complex]:
    # Jacobian of the angle->amplitude map applied to the angle derivatives.
    ca, sa = math.cos(s.alpha), math.sin(s.alpha)
    e_l = cmath.exp(1j * s.lambda_ref)
    e_r = cmath.exp(1j * (s.lambda_ref + s.phi))
    d_l = (-sa * d.d_alpha + 1j * ca * d.d_lambda) * e_l
    d_r = (ca * d.d_alpha + 1j * sa * (d.d_lambda + d.d_phi)) * e_r
    return d_l, d_r


@given(s=nonpole_angles(), params=system_params(), env=envelopes, t=times)
def test_angle_rhs_consistent_with_amplitude_rhs(s, params, env, t):
    # the two formulations describe the same flow wherever the map is regular
    d_ang = rhs_angles(s, t, params, env)
    assert not d_ang.clamped
    d_amp = rhs_amplitudes(amplitudes_from_angles(s), t, params, env)
    push_l, push_r = _push_through_map(s, d_ang)
    assert abs(push_l - d_amp.d_a_l) < 1e-10
    assert abs(push_r - d_amp.d_a_r) < 1e-10


# ---------------------------------------------------------------- transforms

def test_amplitudes_from_angles_left_localized():
    s = amplitudes_from_angles(AngleState(0.0, 123.4, 0.0))
    assert s.a_l == 1.0 + 0.0j
    assert s.a_r == pytest.approx(0.0, abs=1e-15)


def test_amplitudes_from_angles_right_localized():
    s = amplitudes_from_angles(AngleState(math.pi / 2, math.pi / 2, 0.0))
    assert abs(s.a_l) < 1e-15
    assert s.a_r == pytest.approx(1.0j, abs=1e-15)


def test_amplitudes_from_angles_balanced():
    s = amplitudes_from_angles(AngleState(math.pi / 4, 0.0, 0.0))
    assert s.a_l == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert s.a_r == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_angles_from_amplitudes_zero_amplitude_conventions():
    s = angles_from_amplitudes(AmplitudeState(1.0, 0.0))
    assert (s.alpha, s.phi, s.lambda_ref) == (0.0, 0.0, 0.0)


def test_angles_from_amplitudes_quarter():
    s = angles_from_amplitudes(AmplitudeState(1 / math.sqrt(2), 1j / math.sqrt(2)))
    assert s.alpha == pytest.approx(math.pi / 4, abs=1e-15)
    assert s.phi == pytest.approx(math.pi / 2, abs=1e-15)
    assert s.lambda_ref == 0.0


def test_angles_from_amplitudes_scalar_example():
    s = angles_from_amplitudes(AmplitudeState(0.6, 0.8))
    assert s.alpha == pytest.approx(0.9272952180016123, abs=1e-15)
    assert s.phi == 0.0


def test_angles_from_amplitudes_rejects_unnormalized():
    with pytest.raises(NotNormalizedError):
        angles_from_amplitudes(AmplitudeState(1.0, 1.0))


@given(alpha=st.floats(0.01, math.pi / 2 - 0.01),
       phi=st.floats(-math.pi + 1e-6, math.pi),
       lam=st.floats(-math.pi + 1e-6, math.pi))
def test_transform_round_trip(alpha, phi, lam):
    s = AngleState(alpha, phi, lam)
    back = angles_from_amplitudes(amplitudes_from_angles(s))
    assert back.alpha == pytest.approx(alpha, abs=1e-12)
    assert back.phi == pytest.approx(phi, abs=1e-12)
    assert back.lambda_ref == pytest.approx(lam, abs=1e-12)


@given(alpha=st.floats(-10.0, 10.0), phi=st.floats(-10.0, 10.0),
       lam=st.floats(-10.0, 10.0))
def test_transform_output_normalized(alpha, phi, lam):
    s = amplitudes_from_angles(AngleState(alpha, phi, lam))
    assert abs(s.norm() - 1.0) < 1e-12
    assert abs(abs(s.a_l) ** 2 - math.cos(alpha) ** 2) < 1e-15
    assert abs(abs(s.a_r) ** 2 - math.sin(alpha) ** 2) < 1e-15


@pytest.mark.parametrize("x,expected", [
    (0.0, 0.0),
    (math.pi, math.pi),
    (-math.pi, math.pi),
    (3 * math.pi, math.pi),
    (2 * math.pi, 0.0),
])
def test_wrap_angle(x, expected):
    assert wrap_angle(x) == pytest.approx(expected, abs=1e-12)


# ---------------------------------------------------------------- constants

def test_rabi_from_field_zero_field():
    assert rabi_from_field(0.0, 5e-8) == 0.0


def test_rabi_from_field_linear_in_field():
    assert rabi_from_field(2e4, 5e-8) == 2.0 * rabi_from_field(1e4, 5e-8)


def test_rabi_from_field_value():
    # 2 * e * 1e4 V/m * 50 nm / hbar
    assert rabi_from_field(1e4, 50e-9) == pytest.approx(1519267448809.5105, rel=1e-12)


def test_rabi_from_field_rejects_bad_distance():
    with pytest.raises(NonPositiveDistanceError):
        rabi_from_field(1e4, 0.0)


def test_charging_inverse_in_capacitance():
    assert charging_from_capacitance(2e-18) == pytest.approx(
        charging_from_capacitance(1e-18) / 2.0, rel=1e-12)


def test_charging_value():
    # e^2 / (4 * hbar * 1 aF) = 6.0853e13 rad/s
    assert charging_from_capacitance(1e-18) == pytest.approx(60853370181984.7, rel=1e-12)


def test_charging_rejects_nonpositive():
    with pytest.raises(NonPositiveCapacitanceError):
        charging_from_capacitance(0.0)
