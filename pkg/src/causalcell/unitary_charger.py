"""Static unitary chargers in a quantum switch.

Battery Hamiltonian ``omega * sigma_z``; charger ``i`` adds
``x_i sigma_x + y_i sigma_y``.  Each charger alone rotates the battery at the
frequency ``Omega_i = sqrt(omega**2 + x_i**2 + y_i**2)``.

The closed-form minus-branch populations below hold when each charger acts
for the full protocol time ``t`` inside the switch, so this module runs the
switch with ``branch_ratio = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np

from .channels import KrausChannel, unitary_channel
from .errors import InfeasibleTarget, NonPositiveOmega
from .qops import KET_E, KET_G, SIGMA_X, SIGMA_Y, SIGMA_Z, TOL, expectation, matexp_hermitian_generator, projector
from .switch import PLUS, ControlState, SwitchOutcome, switch_of_duration

BRANCH_RATIO = 1.0


@dataclass(frozen=True)
class ChargerSpec:
    x: float
    y: float = 0.0

    @property
    def magnitude(self) -> float:
        return float(np.hypot(self.x, self.y))

    def hamiltonian(self) -> np.ndarray:
        return self.x * SIGMA_X + self.y * SIGMA_Y


@dataclass(frozen=True)
class UnitaryProtocol:
    omega: float
    c1: ChargerSpec
    c2: ChargerSpec

    def __post_init__(self):
        if self.omega <= 0:
            raise NonPositiveOmega(f"battery gap must be positive, got {self.omega}")

    @property
    def freq1(self) -> float:
        return float(np.sqrt(self.omega**2 + self.c1.magnitude**2))

    @property
    def freq2(self) -> float:
        return float(np.sqrt(self.omega**2 + self.c2.magnitude**2))

    @property
    def parallel(self) -> bool:
        cross = self.c1.x * self.c2.y - self.c2.x * self.c1.y
        return abs(cross) <= TOL.parallel

    @property
    def ratio(self) -> float:
        """Amplitude ratio of charger 1 to charger 2 along their common direction."""
        if not self.parallel:
            raise ValueError("charger ratio is only defined for parallel chargers")
        if abs(self.c2.x) >= abs(self.c2.y):
            if self.c2.x == 0:
                raise ValueError("second charger vanishes")
            return self.c1.x / self.c2.x
        return self.c1.y / self.c2.y

    def propagator(self, which: int, t: float) -> np.ndarray:
        charger = self.c1 if which == 1 else self.c2
        return matexp_hermitian_generator(self.omega * SIGMA_Z + charger.hamiltonian(), t)

    def channel(self, which: int, t: float) -> KrausChannel:
        return unitary_channel(self.propagator(which, t))


def battery_hamiltonian(omega: float) -> np.ndarray:
    return omega * SIGMA_Z


def battery_energy(rho: np.ndarray, omega: float) -> float:
    return expectation(rho, battery_hamiltonian(omega))


def minus_branch_population(proto: UnitaryProtocol, t: float) -> tuple[float, float]:
    """Closed-form diagonal of the unnormalized minus-branch battery state.

    Returns ``(excited, ground)`` for a battery starting in ``|g>``.  The
    excited entry uses ``(x1-x2)**2 + (y1-y2)**2``, which equals
    ``(1-R)**2 M**2`` for parallel chargers and stays defined otherwise.
    """
    (x1, y1), (x2, y2) = (proto.c1.x, proto.c1.y), (proto.c2.x, proto.c2.y)
    w1, w2 = proto.freq1, proto.freq2
    shape = np.sin(w1 * t) ** 2 * np.sin(w2 * t) ** 2 / (w1**2 * w2**2)
    excited = proto.omega**2 * ((x1 - x2) ** 2 + (y1 - y2) ** 2) * shape
    ground = (x2 * y1 - x1 * y2) ** 2 * shape
    return float(excited), float(ground)


def simulate(proto: UnitaryProtocol, t: float, control: ControlState = PLUS,
             rho_b: np.ndarray | None = None) -> tuple[SwitchOutcome, SwitchOutcome]:
    """Run the charger pair through the switch; returns ``(plus, minus)``."""
    rho_b = projector(KET_G) if rho_b is None else rho_b
    return switch_of_duration(
        partial(proto.channel, 1), t, control, rho_b,
        branch_ratio=BRANCH_RATIO, factory_b=partial(proto.channel, 2),
    )


def fully_charged_condition(proto: UnitaryProtocol) -> bool:
    """True when the chargers are parallel with amplitude ratio different from 1."""
    if not proto.parallel:
        return False
    try:
        r = proto.ratio
    except ValueError:
        return False
    return abs(r - 1.0) > TOL.parallel


def success_probability(k: int) -> float:
    if k < 1:
        raise ValueError("k must be a positive integer")
    return 1.0 - 1.0 / (1 + 2 * k) ** 2


def optimal_time(omega: float) -> float:
    if omega <= 0:
        raise NonPositiveOmega(f"battery gap must be positive, got {omega}")
    return np.pi / (2 * omega)


def optimal_protocol(omega: float, k: int, omega1: float | None = None) -> UnitaryProtocol:
    """Parallel charger pair with ``Omega_2 = (1 + 2k) Omega_1``, both along sigma_x.

    By default ``Omega_1 = omega``: the first charger vanishes (``R = 0``) and
    the minus branch at ``t = pi / (2 omega)`` reaches ``1 - 1/(1+2k)**2``.
    Larger ``omega1`` still yields a fully charged conditional state, at a
    lower success probability.
    """
    if omega <= 0:
        raise NonPositiveOmega(f"battery gap must be positive, got {omega}")
    if k < 1:
        raise ValueError("k must be a positive integer")
    omega1 = omega if omega1 is None else omega1
    if omega1 < omega:
        raise InfeasibleTarget(f"charger frequency {omega1} is below the battery gap {omega}")
    omega2 = (1 + 2 * k) * omega1
    m1 = np.sqrt(max(omega1**2 - omega**2, 0.0))
    m2 = np.sqrt(omega2**2 - omega**2)
    return UnitaryProtocol(omega, ChargerSpec(float(m1), 0.0), ChargerSpec(float(m2), 0.0))


def excited_fidelity(outcome: SwitchOutcome) -> float:
    if outcome.state is None:
        return float("nan")
    return float(np.real(KET_E.conj() @ outcome.state @ KET_E))


def static_max_excitation(charger: ChargerSpec, omega: float) -> float:
    """Largest excited population a single static charger reaches from ``|g>``."""
    return charger.magnitude**2 / (omega**2 + charger.magnitude**2)
