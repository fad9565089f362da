"""Electron dynamics in an AC-driven pair of coupled quantum dots.

Two-level model of a single electron shared by a left and a right dot,
state |psi> = a_L|L> + a_R|R> with |a_L|^2 + |a_R|^2 = 1.  All angular
frequencies are measured in units of the tunneling coupling magnitude |k|
and time in 1/|k|.

With the drive field

    F(t) = (1/2) * Omega_w * f(t) * cos(omega*t + theta),

where Omega_w is the Rabi frequency, f(t) the pulse envelope, omega the
drive frequency and theta its phase, the amplitudes obey

    da_L/dt = -i*k*a_R + i*[F(t) + Omega*(|a_R|^2 - |a_L|^2)]*a_L
    da_R/dt = -i*k*a_L - i*[F(t) + Omega*(|a_R|^2 - |a_L|^2)]*a_R

with Omega half the Coulomb charging frequency of a single dot.  The polar
parameterization

    a_L = cos(alpha)*e^{i*lambda},   a_R = sin(alpha)*e^{i*xi},
    phi = xi - lambda

turns the four real equations into two:

    dphi/dt   = -2*F(t) - 2*k*cos(phi)*cot(2*alpha) + 2*Omega*cos(2*alpha)
    dalpha/dt = -k*sin(phi)

plus a decoupled rate for the overall phase,

    dlambda/dt = F(t) - Omega*cos(2*alpha) - k*tan(alpha)*cos(phi),

which never feeds back and is only needed to rebuild the complex pair.
cot(2*alpha) is singular at alpha in {0, pi/2}, i.e. for a fully localized
electron; see ``rhs_angles`` for the clamping contract.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

# CODATA 2018
ELEMENTARY_CHARGE = 1.602176634e-19  # C (exact)
HBAR = 1.054571817e-34               # J s

#: |sin(2*alpha)| below this clamps the cot term in the angle equations.
POLE_EPS = 1e-8
#: Shift (rad) applied to initial angle states sitting on a coordinate pole.
POLE_DELTA = 1e-6
#: Largest acceptable |norm - 1| when inverting amplitudes to angles.
NORM_TOL = 1e-6

_TWO_PI = 2.0 * math.pi


class NegativeTimeError(ValueError):
    """A tanh-rise envelope was evaluated before the pulse is switched on."""


class NotNormalizedError(ValueError):
    """An amplitude pair expected to be normalized is not."""


class NonPositiveDistanceError(ValueError):
    """Dot separation must be strictly positive."""


class NonPositiveCapacitanceError(ValueError):
    """Dot capacitance must be strictly positive."""


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the driven double dot, in units of |k|.

    k             tunneling coupling; its magnitude is the reference frequency
    omega_coulomb Omega, half the Coulomb charging frequency of one dot
    rabi_ratio    Omega_w/omega, Rabi frequency over drive frequency
    omega_drive   drive angular frequency omega
    phase         drive phase theta (rad)
    """

    k: float
    omega_coulomb: float
    rabi_ratio: float
    omega_drive: float = 10.0
    phase: float = 0.0

    def __post_init__(self):
        vals = (self.k, self.omega_coulomb, self.rabi_ratio,
                self.omega_drive, self.phase)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("system parameters must be finite")
        if self.k == 0.0:
            raise ValueError("tunneling coupling k must be nonzero")
        if self.omega_coulomb < 0.0:
            raise ValueError("omega_coulomb must be >= 0")
        if self.omega_drive <= 0.0:
            raise ValueError("omega_drive must be > 0")
        if self.rabi_ratio < 0.0:
            raise ValueError("rabi_ratio must be >= 0")

    @property
    def rabi_frequency(self) -> float:
        """Omega_w = rabi_ratio * omega_drive."""
        return self.rabi_ratio * self.omega_drive


@dataclass(frozen=True)
class Constant:
    """Always-on envelope, f(t) = 1."""


@dataclass(frozen=True)
class TanhRise:
    """Semi-infinite pulse switched on over rise time tau: f(t) = tanh(t/tau)."""

    tau: float

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau > 0.0):
            raise ValueError("tanh rise time tau must be > 0")


Envelope = Constant | TanhRise


def eval_envelope(env: Envelope, t: float) -> float:
    """Evaluate the drive envelope f(t).

    The tanh envelope describes a pulse switched on at t = 0 and is undefined
    earlier; evaluating it at t < 0 raises NegativeTimeError.
    """
    if isinstance(env, Constant):
        return 1.0
    if t < 0.0:
        raise NegativeTimeError(f"tanh envelope undefined at t={t} < 0")
    return math.tanh(t / env.tau)


def eval_drive(params: SystemParams, env: Envelope, t: float) -> float:
    """Drive field F(t) = (1/2)*Omega_w*f(t)*cos(omega*t + theta).

    |F(t)| is bounded by Omega_w/2 for every t.
    """
    return (0.5 * params.rabi_frequency * eval_envelope(env, t)
            * math.cos(params.omega_drive * t + params.phase))


@dataclass(frozen=True)
class AmplitudeState:
    """Complex dot amplitudes (a_L, a_R); physical states have unit norm."""

    a_l: complex
    a_r: complex

    def norm(self) -> float:
        return math.hypot(abs(self.a_l), abs(self.a_r))


@dataclass(frozen=True)
class AngleState:
    """Polar coordinates of the two-level state.

    alpha sets the populations (p_left = cos^2 alpha, p_right = sin^2 alpha),
    phi is the phase of the right amplitude relative to the left one, and
    lambda_ref carries the left amplitude's overall phase so the complex pair
    can be reconstructed exactly.
    """

    alpha: float
    phi: float
    lambda_ref: float = 0.0

    def canonical(self) -> "AngleState":
        """Equivalent state with alpha in [0, pi/2] and phi in (-pi, pi]."""
        return angles_from_amplitudes(amplitudes_from_angles(self))


@dataclass(frozen=True)
class AmplitudeDerivs:
    """Time derivatives of the complex amplitude pair, units 1/time."""

    d_a_l: complex
    d_a_r: complex


@dataclass(frozen=True)
class AngleDerivs:
    """Time derivatives of (alpha, phi) plus the overall-phase rate.

    ``clamped`` flags that the cot(2*alpha) pole guard fired for this
    evaluation (see rhs_angles); the values are then the clamped ones.
    """

    d_alpha: float
    d_phi: float
    d_lambda: float
    clamped: bool = False


def rhs_amplitudes(state: AmplitudeState, t: float, params: SystemParams,
                   env: Envelope) -> AmplitudeDerivs:
    """Right-hand side of the amplitude equations.

    The flow is norm-preserving: Re(a_L* da_L + a_R* da_R) = 0 identically,
    so any norm drift in a numerical solution is integrator error.
    Normalization of the input is deliberately not enforced here.
    """
    g = eval_drive(params, env, t) + params.omega_coulomb * (
        abs(state.a_r) ** 2 - abs(state.a_l) ** 2)
    d_l = -1j * params.k * state.a_r + 1j * g * state.a_l
    d_r = -1j * params.k * state.a_l - 1j * g * state.a_r
    return AmplitudeDerivs(d_l, d_r)


def rhs_angles(state: AngleState, t: float, params: SystemParams,
               env: Envelope, eps_pole: float = POLE_EPS) -> AngleDerivs:
    """Right-hand side of the angle equations.

    cot(2*alpha) diverges for a fully localized electron (alpha in
    {0, pi/2}).  When |sin(2*alpha)| < eps_pole the cotangent is clamped to
    +-1/eps_pole (sign preserved) and the result is flagged ``clamped``
    rather than raising: the singularity is a removable artifact of the
    polar coordinates, not of the physics.  The tan(alpha) factor in the
    overall-phase rate is clamped the same way.
    """
    f = eval_drive(params, env, t)
    s2a = math.sin(2.0 * state.alpha)
    c2a = math.cos(2.0 * state.alpha)
    clamped = False
    if abs(s2a) >= eps_pole:
        cot = c2a / s2a
    else:
        s = 1.0 if s2a >= 0.0 else -1.0
        c = 1.0 if c2a >= 0.0 else -1.0
        cot = s * c / eps_pole
        clamped = True
    cph = math.cos(state.phi)
    d_phi = (-2.0 * f - 2.0 * params.k * cph * cot
             + 2.0 * params.omega_coulomb * c2a)
    d_alpha = -params.k * math.sin(state.phi)
    d_lambda = (f - params.omega_coulomb * c2a
                - params.k * _clamped_tan(state.alpha, eps_pole) * cph)
    return AngleDerivs(d_alpha, d_phi, d_lambda, clamped)


def _clamped_tan(alpha: float, eps_pole: float) -> float:
    sa = math.sin(alpha)
    ca = math.cos(alpha)
    if abs(ca) >= eps_pole * abs(sa):
        t = sa / ca
        if t > 1.0 / eps_pole:
            return 1.0 / eps_pole
        if t < -1.0 / eps_pole:
            return -1.0 / eps_pole
        return t
    s = 1.0 if sa >= 0.0 else -1.0
    c = 1.0 if ca >= 0.0 else -1.0
    return s * c / eps_pole


def amplitudes_from_angles(state: AngleState) -> AmplitudeState:
    """Rebuild the complex amplitude pair; the result has unit norm exactly
    (up to rounding) for any alpha, phi, lambda_ref."""
    ca = math.cos(state.alpha)
    sa = math.sin(state.alpha)
    lam = state.lambda_ref
    xi = lam + state.phi
    return AmplitudeState(
        complex(ca * math.cos(lam), ca * math.sin(lam)),
        complex(sa * math.cos(xi), sa * math.sin(xi)),
    )


def angles_from_amplitudes(state: AmplitudeState) -> AngleState:
    """Polar coordinates of a normalized amplitude pair.

    alpha = atan2(|a_R|, |a_L|) lands in [0, pi/2].  The phase of a zero
    amplitude is taken as 0, which makes this an exact inverse of
    amplitudes_from_angles on canonical states.  Raises NotNormalizedError
    when |norm - 1| > 1e-6.
    """
    ml = abs(state.a_l)
    mr = abs(state.a_r)
    norm = math.hypot(ml, mr)
    if abs(norm - 1.0) > NORM_TOL:
        raise NotNormalizedError(f"amplitude norm {norm!r} is not 1")
    alpha = math.atan2(mr, ml)
    lam = cmath.phase(state.a_l) if ml > 0.0 else 0.0
    phi = wrap_angle(cmath.phase(state.a_r) - lam) if mr > 0.0 else 0.0
    return AngleState(alpha, phi, lam)


def wrap_angle(x: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    w = math.remainder(x, _TWO_PI)
    if w <= -math.pi:
        w += _TWO_PI
    return w


def rabi_from_field(e0: float, d: float) -> float:
    """Rabi angular frequency 2*e*E0*d/hbar (rad/s) for a drive field of
    amplitude E0 (V/m) across dots a distance d (m) apart."""
    if not (math.isfinite(e0) and e0 >= 0.0):
        raise ValueError("field amplitude E0 must be >= 0")
    if not (math.isfinite(d) and d > 0.0):
        raise NonPositiveDistanceError("dot separation d must be > 0")
    return 2.0 * ELEMENTARY_CHARGE * e0 * d / HBAR


def charging_from_capacitance(c: float) -> float:
    """Half the Coulomb charging angular frequency, e^2/(4*hbar*C) in rad/s,
    of a dot with capacitance C (farad)."""
    if not (math.isfinite(c) and c > 0.0):
        raise NonPositiveCapacitanceError("dot capacitance C must be > 0")
    return ELEMENTARY_CHARGE**2 / (4.0 * HBAR * c)
