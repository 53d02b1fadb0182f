"""Classical rotation number from the Montgomery phase decomposition.

Over one period T of the body-frame angular momentum the precession angle
advances by a dynamical part 2ET/J minus the solid angle swept by the
angular-momentum loop on the sphere |J| = const. The solid angle is obtained
by quadrature of cos(theta) as a function of the head angle psi.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from toprot.classical import (
    Regime,
    _require_asymmetric,
    _require_regular,
    angular_momentum_trajectory,
    classify,
    period,
    point_from_gamma,
)
from toprot.errors import DefinitionMismatchError, NoTREDistanceError, NumericalError

QUAD_EPSABS = 1e-12
QUAD_LIMIT = 400


class Definition(str, enum.Enum):
    """Which polar axis the geometric area is measured around."""

    OSCILLATING = "Oscillating"
    ROTATING = "Rotating"


@dataclass(frozen=True)
class RotationNumberResult:
    theta_cl: float
    dynamical_part: float
    geometric_part: float
    definition: Definition


@dataclass(frozen=True)
class AsymptoteCoefficients:
    """Coefficients of Theta_cl ~ alpha - beta ln|gamma| near the separatrix."""

    alpha: float
    beta: float

    def __call__(self, gamma):
        return self.alpha - self.beta * np.log(np.abs(gamma))


def _definition(value):
    if isinstance(value, Definition):
        return value
    if isinstance(value, Regime):
        value = value.value
    try:
        return Definition(str(value).capitalize())
    except ValueError:
        raise DefinitionMismatchError(f"unknown rotation-number definition {value!r}") from None


def cos_theta_sq(mol, E, J, psi):
    """cos^2(theta) on the constant-energy curve as a function of psi.

    A negative value means psi is not reached by the (oscillating) orbit.
    """
    c2 = np.cos(psi) ** 2
    s2 = 1.0 - c2
    num = E / (J * J) - mol.A * c2 - mol.B * s2
    den = mol.C - mol.A * c2 - mol.B * s2
    return num / den


def oscillation_half_width(mol, E, J):
    """Largest |psi| (about 0 or pi) reached by an oscillating orbit."""
    ratio = (mol.B - E / (J * J)) / (mol.B - mol.A)
    return math.acos(math.sqrt(min(max(ratio, 0.0), 1.0)))


def _quad(f, a, b):
    value, err = quad(f, a, b, epsabs=QUAD_EPSABS, epsrel=0.0, limit=QUAD_LIMIT)
    if not math.isfinite(value):
        raise NumericalError("quadrature produced a non-finite value")
    return value


def geometric_area(mol, pt):
    """Solid angle between the angular-momentum loop and the equator theta = pi/2.

    Rotating orbits span every psi and the integral runs over a full turn.
    Oscillating orbits are confined to |psi| <= psi0 about 0 (and the mirror
    loop about pi); the loop covers that window twice, once in each
    hemisphere. The substitution psi = psi0 sin(s) removes the square-root
    zero of cos(theta) at the turning points.
    """
    _require_regular(pt, "the geometric area")
    E, J = pt.E, pt.J

    def integrand_psi(psi):
        return math.sqrt(max(float(cos_theta_sq(mol, E, J, psi)), 0.0))

    if pt.regime is Regime.ROTATING:
        # cos^2(theta) is even about 0 and pi/2
        return 4.0 * _quad(integrand_psi, 0.0, 0.5 * math.pi)
    psi0 = oscillation_half_width(mol, E, J)

    def integrand_s(s):
        return integrand_psi(psi0 * math.sin(s)) * psi0 * math.cos(s)

    return 4.0 * _quad(integrand_s, 0.0, 0.5 * math.pi)


def theta_cl(mol, pt, definition=Definition.OSCILLATING):
    """Classical rotation number Theta_cl = 2ET/J - area.

    The oscillating definition measures the area from the equator and is
    continued across the separatrix. The rotating definition, valid only for
    rotating orbits, measures it around the z pole, area_R = area - 2 pi,
    which raises Theta by exactly 2 pi.
    """
    _require_asymmetric(mol)
    _require_regular(pt, "the classical rotation number")
    definition = _definition(definition)
    if definition is Definition.ROTATING and pt.regime is not Regime.ROTATING:
        raise DefinitionMismatchError("the rotating definition applies only to rotating orbits (E > B J^2)")
    dynamical = 2.0 * pt.E * period(pt) / pt.J
    area = geometric_area(mol, pt)
    if definition is Definition.ROTATING:
        area -= 2.0 * math.pi
    return RotationNumberResult(dynamical - area, dynamical, -area, definition)


def theta_cl_at(mol, gamma, J=1.0, definition=Definition.OSCILLATING):
    """Theta_cl at separatrix distance ``gamma``; the value depends on E/J^2 only."""
    return theta_cl(mol, point_from_gamma(mol, gamma, J), definition).theta_cl


def separatrix_asymptote(mol):
    """Coefficients of the logarithmic divergence of Theta_cl at the separatrix.

    From K(1 - eps) ~ ln 4 - ln(eps)/2 applied to the dynamical part, plus the
    separatrix value -4 arcsin(sqrt((B-A)/(C-A))) of the geometric part.
    """
    _require_asymmetric(mol)
    A, B, C = mol.A, mol.B, mol.C
    root = math.sqrt((C - B) * (B - A))
    beta = 2.0 * B / root
    geometric = -4.0 * math.asin(math.sqrt((B - A) / (C - A)))
    alpha = geometric + 2.0 * beta * (math.log(4.0) - 0.5 * math.log(B * (C - A) / ((C - B) * (B - A))))
    return AsymptoteCoefficients(alpha, beta)


def tre_distance(mol, side=Definition.OSCILLATING, target=4.0 * math.pi, tol=1e-6):
    """Separatrix distance gamma* at which Theta_cl reaches ``target`` (4 pi).

    ``side`` selects gamma < 0 (oscillating) or gamma > 0 (rotating); the
    oscillating definition of Theta_cl is used on both sides. The root of the
    exact Theta_cl is bracketed starting from the inverted asymptote.

    Raises:
        NoTREDistanceError: if no root lies in 1e-8 < |gamma| < 0.5.
    """
    side = _definition(side)
    sign = -1.0 if side is Definition.OSCILLATING else 1.0
    coeffs = separatrix_asymptote(mol)
    lo_limit, hi_limit = 1e-8, 0.5

    def residual(x):
        return theta_cl_at(mol, sign * x) - target

    seed = math.exp((coeffs.alpha - target) / coeffs.beta)
    seed = min(max(seed, 2.0 * lo_limit), 0.5 * hi_limit)
    lo, hi = seed, seed
    # Theta_cl decreases in |gamma|: residual > 0 at lo, < 0 at hi
    while residual(lo) <= 0.0:
        if lo <= lo_limit:
            raise NoTREDistanceError(f"Theta_cl stays below {target} for |gamma| > {lo_limit}")
        lo = max(lo / 2.0, lo_limit)
    while residual(hi) >= 0.0:
        if hi >= hi_limit:
            raise NoTREDistanceError(f"Theta_cl stays above {target} for |gamma| < {hi_limit}")
        hi = min(hi * 2.0, hi_limit)
    root = brentq(residual, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(residual(root)) > tol:
        raise NumericalError(f"root refinement stalled at |Theta - target| = {abs(residual(root))!r}")
    return sign * root


def second_action(mol, pt):
    """Action conjugate to the body-frame angle, (1/2 pi) * loop integral of Jz d(psi).

    The loop is parametrized by time along the analytic orbit, using
    Jz psi' = 2 (C J^2 - E) Jz^2 / (J^2 - Jz^2), which follows from the
    Euler-angle flow. The result satisfies
    dI = -(Theta_cl / 2 pi) dJ + (T / 2 pi) dH with the oscillating Theta_cl.
    """
    _require_regular(pt, "the second action")
    J2 = pt.J * pt.J
    gap = mol.C * J2 - pt.E
    if gap <= 0.0:
        # stable rotation about z: the loop is the pole itself
        return pt.J
    T = period(pt)

    def integrand(t):
        _, _, jz = angular_momentum_trajectory(pt, mol, t)
        jz2 = float(jz) ** 2
        return 2.0 * gap * jz2 / (J2 - jz2)

    # the integrand has period T/2; integrate over quarter periods for accuracy
    quarter = 0.25 * T
    total = sum(_quad(integrand, k * quarter, (k + 1) * quarter) for k in range(4))
    return total / (2.0 * math.pi)


def second_action_at(mol, E, J):
    return second_action(mol, classify(mol, E, J))
