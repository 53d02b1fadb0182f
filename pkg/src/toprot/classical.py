"""Classical free rotation of an asymmetric top.

Units: rotational constants and energies in cm^-1, angular momentum
dimensionless (hbar = 1), hence times in 1/cm^-1. Only dimensionless
combinations such as omega*T or 2ET/J enter the rotation numbers.

Body frame: x, y, z carry the constants A < B < C (I_x > I_y > I_z). The
Euler angles (theta, phi, psi) put the conserved angular momentum along the
laboratory Z axis, so that

    Jx = -J sin(theta) cos(psi),  Jy = J sin(theta) sin(psi),  Jz = J cos(theta).
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from toprot.errors import (
    DomainError,
    OutOfDiagramError,
    SingularityError,
    UnsupportedRegimeError,
)
from toprot.ode import Event, dopri5
from toprot.specfun import complete_elliptic_K, jacobi_elliptic

#: Points with |gamma| below this are classified as lying on the separatrix.
SEPARATRIX_TOL = 1e-12
#: Distance of sin(theta) from zero at which the Euler chart is declared singular.
CHART_SINGULARITY_TOL = 1e-8


class Regime(str, enum.Enum):
    OSCILLATING = "Oscillating"
    ROTATING = "Rotating"
    SEPARATRIX = "Separatrix"


@dataclass(frozen=True)
class Molecule:
    """Rigid rotor with rotational constants A <= B <= C in cm^-1.

    By default the constants must be strictly ordered (an asymmetric top).
    ``strict=False`` admits symmetric and spherical tops, which the quantum
    spectrum handles but the classical rotation number does not.
    """

    name: str
    A: float
    B: float
    C: float
    strict: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        for key in ("A", "B", "C"):
            value = getattr(self, key)
            if not math.isfinite(value) or value <= 0.0:
                raise DomainError(f"rotational constant {key} must be positive and finite, got {value!r}")
        if self.strict and not (self.A < self.B < self.C):
            raise DomainError("constants must satisfy A < B < C")
        if not (self.A <= self.B <= self.C):
            raise DomainError("constants must satisfy A <= B <= C")

    @property
    def is_asymmetric(self):
        return self.A < self.B < self.C

    def scaled(self, factor):
        return Molecule(self.name, self.A * factor, self.B * factor, self.C * factor, strict=self.strict)


PRESETS = {
    "water": Molecule("water", 9.3, 14.5, 27.9),
    "ethylene": Molecule("ethylene", 0.828, 1.001, 4.64),
    "s4": Molecule("S4", 0.0501, 0.0741, 0.1553),
}


def get_molecule(name):
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise DomainError(f"unknown molecule preset {name!r}; choose from {', '.join(PRESETS)}") from None


def _require_asymmetric(mol):
    if not mol.is_asymmetric:
        raise DomainError(f"classical rotation requires A < B < C, got {mol}")


@dataclass(frozen=True)
class ClassicalPoint:
    """A regular (E, J) point of the energy-momentum diagram.

    ``gamma`` is the signed separatrix distance, E = B J^2 (1 + gamma);
    ``m`` and ``omega`` are the elliptic parameter and frequency of the
    analytic angular-momentum solution in the point's regime.
    """

    E: float
    J: float
    gamma: float
    regime: Regime
    m: float
    omega: float


def classify(mol, E, J):
    """Locate ``(E, J)`` in the energy-momentum diagram of ``mol``."""
    _require_asymmetric(mol)
    E = float(E)
    J = float(J)
    if not (math.isfinite(J) and J > 0.0):
        raise DomainError(f"angular momentum J must be positive, got {J!r}")
    if not math.isfinite(E):
        raise DomainError(f"energy must be finite, got {E!r}")
    A, B, C = mol.A, mol.B, mol.C
    J2 = J * J
    slack = 8 * np.finfo(float).eps * C * J2
    if E < A * J2 - slack or E > C * J2 + slack:
        raise OutOfDiagramError(f"E={E!r} outside [A J^2, C J^2] = [{A * J2!r}, {C * J2!r}] for J={J!r}")
    E = min(max(E, A * J2), C * J2)
    gamma = E / (B * J2) - 1.0
    if abs(gamma) < SEPARATRIX_TOL:
        return ClassicalPoint(E, J, gamma, Regime.SEPARATRIX, 1.0, 2.0 * J * math.sqrt((C - B) * (B - A)))
    if gamma > 0.0:
        low, high = E - A * J2, C * J2 - E
        m = (B - A) * high / ((C - B) * low)
        omega = 2.0 * math.sqrt((C - B) * low)
        regime = Regime.ROTATING
    else:
        low, high = E - A * J2, C * J2 - E
        m = (C - B) * low / ((B - A) * high)
        omega = 2.0 * math.sqrt((B - A) * high)
        regime = Regime.OSCILLATING
    return ClassicalPoint(E, J, gamma, regime, min(max(m, 0.0), 1.0), omega)


def point_from_gamma(mol, gamma, J=1.0):
    """Classify the point at separatrix distance ``gamma``."""
    return classify(mol, mol.B * J * J * (1.0 + gamma), J)


def _require_regular(pt, what):
    if pt.regime is Regime.SEPARATRIX:
        raise UnsupportedRegimeError(f"{what} is undefined on the separatrix (no periodic solution)")


def angular_momentum_trajectory(pt, mol, t, rho=0.0):
    """Body-frame angular momentum on the analytic orbit at phase chi = omega t + rho.

    Rotating orbits circulate about +z, oscillating orbits about +x. ``t``
    may be an array.
    """
    _require_regular(pt, "the analytic trajectory")
    A, B, C = mol.A, mol.B, mol.C
    E, J2 = pt.E, pt.J * pt.J
    chi = pt.omega * np.asarray(t, dtype=float) + rho
    sn, cn, dn = jacobi_elliptic(chi, pt.m)
    high = max(C * J2 - E, 0.0)
    low = max(E - A * J2, 0.0)
    if pt.regime is Regime.ROTATING:
        jx = -math.sqrt(high / (C - A)) * cn
        jy = math.sqrt(high / (C - B)) * sn
        jz = math.sqrt(low / (C - A)) * dn
    else:
        # sign of Jy chosen so that the orbit runs forward in time under J' = J x Omega
        jx = math.sqrt(high / (C - A)) * dn
        jy = -math.sqrt(low / (B - A)) * sn
        jz = math.sqrt(low / (C - A)) * cn
    return jx, jy, jz


def period(pt):
    """Period of the body-frame angular momentum, T = 4 K(m) / omega."""
    _require_regular(pt, "the period")
    return 4.0 * complete_elliptic_K(pt.m) / pt.omega


def euler_equations(mol):
    """Right-hand side of J' = J x Omega in the body frame."""
    A, B, C = mol.A, mol.B, mol.C

    def rhs(t, y):
        jx, jy, jz = y
        return np.array([2.0 * jy * jz * (C - B), -2.0 * jx * jz * (C - A), 2.0 * jx * jy * (B - A)])

    return rhs


def euler_angle_rates(mol, J, theta, psi):
    """(theta', phi', psi') of the free top at angular momentum ``J``."""
    A, B, C = mol.A, mol.B, mol.C
    s, c = math.sin(psi), math.cos(psi)
    s2, c2 = s * s, c * c
    return (
        2.0 * J * (B - A) * math.sin(theta) * s * c,
        2.0 * J * (B * s2 + A * c2),
        2.0 * J * (C - B * s2 - A * c2) * math.cos(theta),
    )


@dataclass(frozen=True)
class EulerState:
    """Euler angles together with the body-frame angular momentum they imply."""

    theta: float
    phi: float
    psi: float
    Jx: float
    Jy: float
    Jz: float

    @classmethod
    def from_angles(cls, theta, phi, psi, J):
        st = math.sin(theta)
        return cls(theta, phi, psi, -J * st * math.cos(psi), J * st * math.sin(psi), J * math.cos(theta))

    @classmethod
    def from_momentum(cls, Jx, Jy, Jz, phi=0.0):
        J = math.sqrt(Jx * Jx + Jy * Jy + Jz * Jz)
        theta = math.acos(min(1.0, max(-1.0, Jz / J)))
        psi = math.atan2(Jy, -Jx)
        return cls.from_angles(theta, phi, psi, J)

    @property
    def J(self):
        return math.sqrt(self.Jx**2 + self.Jy**2 + self.Jz**2)

    def is_consistent(self, rtol=1e-10):
        ref = EulerState.from_angles(self.theta, self.phi, self.psi, self.J)
        scale = max(self.J, 1e-300)
        return all(
            abs(a - b) <= rtol * scale
            for a, b in ((self.Jx, ref.Jx), (self.Jy, ref.Jy), (self.Jz, ref.Jz))
        )


@dataclass
class EulerTrajectory:
    """Sampled Euler-angle trajectory; phi and psi are unwrapped."""

    J: float
    t: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    event_times: list = field(default_factory=list)
    terminated: bool = False

    @property
    def delta_phi(self):
        return float(self.phi[-1] - self.phi[0])

    @property
    def delta_psi(self):
        return float(self.psi[-1] - self.psi[0])

    def momentum(self):
        st = np.sin(self.theta)
        return -self.J * st * np.cos(self.psi), self.J * st * np.sin(self.psi), self.J * np.cos(self.theta)

    def energy(self, mol):
        jx, jy, jz = self.momentum()
        return mol.A * jx**2 + mol.B * jy**2 + mol.C * jz**2

    def state(self, i=-1):
        return EulerState.from_angles(self.theta[i], self.phi[i], self.psi[i], self.J)


def _check_chart(t, theta):
    if abs(math.sin(theta)) <= CHART_SINGULARITY_TOL:
        raise SingularityError(f"theta reached the Euler-chart singularity at t={t!r}", time=t)


def integrate_euler_angles(mol, J, initial, duration, tol=1e-10, events=(), atol=None):
    """Integrate the Euler-angle flow of the free top for ``duration``.

    ``events`` are :class:`toprot.ode.Event` objects on the state vector
    ``(theta, phi, psi)``; a terminal one ends the trajectory early.

    Raises:
        SingularityError: if theta comes within 1e-8 of 0 or pi.
    """
    _require_asymmetric(mol)
    if tol <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    if not initial.is_consistent():
        raise DomainError("initial EulerState angles and angular momentum disagree")
    if abs(initial.J - J) > 1e-10 * J:
        raise DomainError(f"initial state has |J|={initial.J!r}, expected {J!r}")
    _check_chart(0.0, initial.theta)
    A, B, C = mol.A, mol.B, mol.C

    def rhs(t, y):
        theta, _, psi = y
        s, c = math.sin(psi), math.cos(psi)
        s2, c2 = s * s, c * c
        return np.array(
            [
                2.0 * J * (B - A) * math.sin(theta) * s * c,
                2.0 * J * (B * s2 + A * c2),
                2.0 * J * (C - B * s2 - A * c2) * math.cos(theta),
            ]
        )

    sol = dopri5(
        rhs,
        (0.0, duration),
        [initial.theta, initial.phi, initial.psi],
        rtol=tol,
        atol=tol if atol is None else atol,
        events=events,
        step_callback=lambda t, y: _check_chart(t, y[0]),
    )
    return EulerTrajectory(
        J=J,
        t=sol.t,
        theta=sol.y[:, 0],
        phi=sol.y[:, 1],
        psi=sol.y[:, 2],
        event_times=[t for _, t in sol.t_events],
        terminated=sol.terminated,
    )


def initial_state(pt, mol, rho=0.0):
    """Euler state on the analytic orbit at phase ``rho`` (t = 0), with phi = 0."""
    jx, jy, jz = angular_momentum_trajectory(pt, mol, 0.0, rho)
    return EulerState.from_momentum(float(jx), float(jy), float(jz))


def _return_event(mol, J, state):
    """Event firing when the body-frame angular momentum comes back to ``state``."""
    A, B, C = mol.A, mol.B, mol.C
    j0 = np.array([state.Jx, state.Jy, state.Jz])
    rate = np.array([2 * j0[1] * j0[2] * (C - B), -2 * j0[0] * j0[2] * (C - A), 2 * j0[0] * j0[1] * (B - A)])
    k = int(np.argmax(np.abs(rate)))
    direction = 1 if rate[k] > 0 else -1

    def component(t, y):
        theta, _, psi = y
        st = math.sin(theta)
        value = (-J * st * math.cos(psi), J * st * math.sin(psi), J * math.cos(theta))[k]
        return value - j0[k]

    return Event(component, direction=direction, terminal=True, skip_below=1e-9)


def delta_phi_one_period(mol, pt, rho=0.0, tol=1e-12):
    """Precession-angle advance over one period of the angular momentum.

    Integrates the Euler-angle flow from the analytic orbit point at phase
    ``rho`` until the body-frame angular momentum first returns to its start;
    the period is found by the integration itself, not from K(m).
    """
    return _one_period(mol, pt, rho, tol)[0]


def ode_period(mol, pt, rho=0.0, tol=1e-12):
    """First-return time of the angular momentum under the Euler-angle flow."""
    return _one_period(mol, pt, rho, tol)[1]


def _one_period(mol, pt, rho, tol):
    _require_regular(pt, "the rotation number")
    start = initial_state(pt, mol, rho)
    traj = integrate_euler_angles(
        mol, pt.J, start, 2.0 * period(pt), tol=tol, events=[_return_event(mol, pt.J, start)]
    )
    if not traj.terminated:  # pragma: no cover - would indicate an integrator fault
        raise SingularityError("angular momentum did not return within two periods")
    return traj.delta_phi, float(traj.t[-1])


def first_return_time(mol, pt, tol=1e-12):
    """First-return time of J from direct integration of J' = J x Omega."""
    _require_regular(pt, "the period")
    j0 = np.array(angular_momentum_trajectory(pt, mol, 0.0), dtype=float)
    rhs = euler_equations(mol)
    # start at chi = 0, where Jy = 0 and |Jy'| is maximal
    direction = 1 if rhs(0.0, j0)[1] > 0 else -1
    ev = Event(lambda t, y: y[1] - j0[1], direction=direction, terminal=True, skip_below=1e-9)
    sol = dopri5(rhs, (0.0, 2.0 * period(pt)), j0, rtol=tol, atol=tol * pt.J, events=[ev])
    if not sol.terminated:  # pragma: no cover
        raise SingularityError("angular momentum did not return within two periods")
    return float(sol.t[-1])


@dataclass(frozen=True)
class TREResult:
    gamma: float
    delta_psi: float
    delta_phi: float
    time: float
    start: EulerState


def simulate_tre(mol, J, gamma, tol=1e-12):
    """Flip of the head angle psi while the precession angle phi advances by 2 pi.

    The motion starts where the angular momentum passes closest to the
    intermediate y axis: on the equator theta = pi/2 for oscillating orbits,
    at psi = pi/2 for rotating ones.
    """
    pt = point_from_gamma(mol, gamma, J)
    _require_regular(pt, "the tennis racket simulation")
    start = initial_state(pt, mol, rho=complete_elliptic_K(pt.m))
    ev = Event(lambda t, y: y[1] - start.phi - 2.0 * math.pi, direction=1, terminal=True)
    # phi' >= 2 J A, so phi gains 2 pi within pi / (J A)
    traj = integrate_euler_angles(mol, J, start, 1.01 * math.pi / (J * mol.A), tol=tol, events=[ev])
    return TREResult(
        gamma=pt.gamma,
        delta_psi=abs(traj.delta_psi),
        delta_phi=traj.delta_phi,
        time=float(traj.t[-1]),
        start=start,
    )


def momenta_from_angles(mol, state, rates):
    """Canonical momenta (p_theta, p_phi, p_psi) from angles and angle rates.

    The body-frame angular velocity is rebuilt from the rates, converted to
    angular momentum with the principal moments I = 1/(2A), 1/(2B), 1/(2C),
    and projected on the Euler-angle directions.
    """
    theta, psi = state.theta, state.psi
    st = math.sin(theta)
    if abs(st) <= CHART_SINGULARITY_TOL:
        raise SingularityError("momenta are undefined at sin(theta) = 0")
    dtheta, dphi, dpsi = rates
    sp, cp = math.sin(psi), math.cos(psi)
    ox = -dphi * st * cp + dtheta * sp
    oy = dphi * st * sp + dtheta * cp
    oz = dphi * math.cos(theta) + dpsi
    jx, jy, jz = ox / (2.0 * mol.A), oy / (2.0 * mol.B), oz / (2.0 * mol.C)
    p_psi = jz
    p_theta = jx * sp + jy * cp
    p_phi = -jx * st * cp + jy * st * sp + jz * math.cos(theta)
    return p_theta, p_phi, p_psi


def total_momentum_from_momenta(theta, p_theta, p_phi, p_psi):
    """|J|^2 rebuilt from the canonical momenta."""
    st = math.sin(theta)
    return p_theta**2 + (p_phi - p_psi * math.cos(theta)) ** 2 / st**2 + p_psi**2
