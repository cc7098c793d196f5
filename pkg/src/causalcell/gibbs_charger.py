"""Thermal-mediator charging, alone and inside a quantum switch.

Battery and charger are qubits with ``H = (omega/2) sigma_z`` each, coupled by
``K (s+ kron s+ + s- kron s-)`` where ``s+- = scale * (sigma_x +- i sigma_y)``.
The charger starts in ``diag(p, 1-p)``; by default the battery starts in the
same thermal state.  With ``scale = 1/2`` the pair ``|gg>, |ee>`` oscillates
at ``Lambda = sqrt(omega**2 + K**2)``.

Closed forms here describe the minus branch of two identical chargers, each
acting for ``t/2``.  Write ``u = cos(Lambda t / 4)**2`` and
``kappa = K**2 / Lambda**2``.  Then

    P_minus(u)  proportional to  u (1-u)**2 (D2 - H3 kappa u)
    excited(u) = (1-p) [(1-p)(1 - kappa u) + p**2 kappa u] / (D2 - H3 kappa u)

with ``D2 = p**2 + (1-p)**2`` and ``H3 = p**3 + (1-p)**3``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .channels import KrausChannel, compose, kraus_from_dilation, apply
from .errors import DomainError, InvalidInput, NegativeTime
from .qops import IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z, matexp_hermitian_generator, tensor
from .switch import PLUS, SwitchOutcome, switch_of_duration

PAPER_SCALE = 1.0
STANDARD_SCALE = 0.5
BRANCH_RATIO = 0.5


@dataclass(frozen=True)
class RaisingLoweringConvention:
    scale: float = STANDARD_SCALE

    def __post_init__(self):
        if self.scale not in (PAPER_SCALE, STANDARD_SCALE):
            raise InvalidInput("raising/lowering scale must be 1 or 1/2")

    @property
    def raising(self) -> np.ndarray:
        return self.scale * (SIGMA_X + 1j * SIGMA_Y)

    @property
    def lowering(self) -> np.ndarray:
        return self.scale * (SIGMA_X - 1j * SIGMA_Y)


STANDARD = RaisingLoweringConvention(STANDARD_SCALE)
VERBATIM = RaisingLoweringConvention(PAPER_SCALE)


def thermal_population(omega: float, beta: float) -> float:
    """Excited population of ``exp(-beta (omega/2) sigma_z)`` normalized."""
    return float(1.0 / (1.0 + np.exp(beta * omega)))


@dataclass(frozen=True)
class GibbsSpec:
    omega: float
    coupling: float
    p: float
    beta: float | None = None
    allow_inversion: bool = False

    def __post_init__(self):
        if self.omega <= 0:
            raise InvalidInput("omega must be positive")
        if self.coupling < 0:
            raise InvalidInput("coupling must be non-negative")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"population {self.p} outside [0, 1]")
        if self.p > 0.5 and not self.allow_inversion:
            raise DomainError(f"population {self.p} > 1/2 needs allow_inversion")

    @classmethod
    def from_beta(cls, omega: float, coupling: float, beta: float) -> "GibbsSpec":
        if beta < 0:
            raise InvalidInput("inverse temperature must be non-negative")
        return cls(omega, coupling, thermal_population(omega, beta), beta=beta)

    @property
    def rabi(self) -> float:
        return float(np.hypot(self.omega, self.coupling))

    @property
    def charger_state(self) -> np.ndarray:
        return np.diag([self.p, 1.0 - self.p]).astype(complex)


def interaction_hamiltonian(spec: GibbsSpec, conv: RaisingLoweringConvention = STANDARD) -> np.ndarray:
    sp, sm = conv.raising, conv.lowering
    return spec.coupling * (tensor(sp, sp) + tensor(sm, sm))


def joint_hamiltonian(spec: GibbsSpec, conv: RaisingLoweringConvention = STANDARD) -> np.ndarray:
    """Battery (left factor) plus charger plus coupling."""
    local = spec.omega / 2 * (tensor(SIGMA_Z, IDENTITY) + tensor(IDENTITY, SIGMA_Z))
    return local + interaction_hamiltonian(spec, conv)


def single_charge_channel(spec: GibbsSpec, conv: RaisingLoweringConvention = STANDARD,
                          t: float = 0.0) -> KrausChannel:
    if t < 0:
        raise NegativeTime(f"negative duration {t}")
    u = matexp_hermitian_generator(joint_hamiltonian(spec, conv), t)
    return kraus_from_dilation(u, spec.charger_state)


def switched_charge(spec: GibbsSpec, conv: RaisingLoweringConvention = STANDARD, t: float = 0.0,
                    rho_b: np.ndarray | None = None,
                    branch_ratio: float = BRANCH_RATIO) -> tuple[SwitchOutcome, SwitchOutcome]:
    """Two identical chargers in a switch with control ``|+>``; returns ``(plus, minus)``."""
    rho_b = spec.charger_state if rho_b is None else rho_b
    return switch_of_duration(
        lambda tau: single_charge_channel(spec, conv, tau), t, PLUS, rho_b, branch_ratio
    )


def sequential_charge(spec: GibbsSpec, conv: RaisingLoweringConvention = STANDARD, tau: float = 0.0,
                      rho_b: np.ndarray | None = None, passes: int = 2) -> np.ndarray:
    """Battery state after ``passes`` definite-order couplings of duration ``tau`` each."""
    rho_b = spec.charger_state if rho_b is None else rho_b
    ch = single_charge_channel(spec, conv, tau)
    return apply(compose(*([ch] * passes)), rho_b)


# Polynomials in p, highest power first.
_NUM_OMEGA = [6, -24, 39, -23, 5]
_NUM_COUPLING = [12, -24, 29, -15, 3]
_ROOT_WEIGHT = [1, 1, -1]
_DEN_OMEGA = [10, -10, 5]
_DEN_COUPLING = [4, -4, 3]
_DISC_OMEGA4 = [36, -72, 72, -36, 9]
_DISC_MIXED = [48, -96, 100, -52, 14]
_DISC_COUPLING4 = [48, -96, 88, -40, 9]
_CUBIC_WEIGHT = [3, -3, 1]
_TIME_OMEGA = [6, -6, 3]
_TIME_COUPLING = [12, -12, 5]


class PeakPolynomials(NamedTuple):
    num_omega: float
    num_coupling: float
    root_weight: float
    den_omega: float
    den_coupling: float
    discriminant: float
    cubic_weight: float
    time_omega: float
    time_coupling: float


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"population {p} outside [0, 1]")


def peak_polynomials(spec: GibbsSpec) -> PeakPolynomials:
    p, w2, k2 = spec.p, spec.omega**2, spec.coupling**2
    disc = (w2 * w2 * np.polyval(_DISC_OMEGA4, p)
            + w2 * k2 * np.polyval(_DISC_MIXED, p)
            + k2 * k2 * np.polyval(_DISC_COUPLING4, p))
    return PeakPolynomials(
        np.polyval(_NUM_OMEGA, p), np.polyval(_NUM_COUPLING, p), np.polyval(_ROOT_WEIGHT, p),
        np.polyval(_DEN_OMEGA, p), np.polyval(_DEN_COUPLING, p), disc,
        np.polyval(_CUBIC_WEIGHT, p), np.polyval(_TIME_OMEGA, p), np.polyval(_TIME_COUPLING, p),
    )


def f_of_p(spec: GibbsSpec) -> float:
    """Minus-branch excited population when the branch probability peaks."""
    _check_p(spec.p)
    c = peak_polynomials(spec)
    w2, k2, root = spec.omega**2, spec.coupling**2, np.sqrt(c.discriminant)
    num = (w2 * c.num_omega + k2 * c.num_coupling - c.root_weight * root) * (1 - spec.p)
    den = (w2 * c.den_omega + k2 * c.den_coupling + root) * c.cubic_weight
    return float(num / den)


def peak_cosine_squared(spec: GibbsSpec) -> float:
    """``u = cos(Lambda t / 4)**2`` at the first peak of the minus-branch probability."""
    _check_p(spec.p)
    if spec.coupling == 0:
        raise DomainError("no coupling, no minus branch")
    c = peak_polynomials(spec)
    w2, k2 = spec.omega**2, spec.coupling**2
    return float((w2 * c.time_omega + k2 * c.time_coupling - np.sqrt(c.discriminant))
                 / (8 * k2 * c.cubic_weight))


def peak_probability_time(spec: GibbsSpec) -> float:
    u = peak_cosine_squared(spec)
    if u < -1e-9 or u > 1 + 1e-9:
        raise DomainError(f"peak condition has no real solution (u = {u})")
    arg = np.sqrt(min(max(u, 0.0), 1.0))
    return float(4.0 / spec.rabi * np.arccos(arg))


def g_of_p(spec: GibbsSpec) -> float:
    """Best excited population after two definite-order couplings from the thermal state."""
    w2, k2, p = spec.omega**2, spec.coupling**2, spec.p
    return float((w2 * w2 * p + 2 * w2 * k2 * (1 - p) + k2 * k2 * (1 - p)) / (w2 + k2) ** 2)


def h_of_p(p: float) -> float:
    _check_p(p)
    return 1.0 - p


def weak_coupling_f(p: float) -> float:
    """Limit of :func:`f_of_p` for ``omega >> K``."""
    if not 0.0 <= p < 1.0:
        raise DomainError(f"weak-coupling form needs 0 <= p < 1, got {p}")
    return 1.0 / (1.0 + p**2 / (1.0 - p) ** 2)


def global_max_population(p: float) -> float:
    _check_p(p)
    return (p - 1) ** 2 / (1 + 2 * p * (p - 1))


def global_max_time(spec: GibbsSpec) -> float:
    return 2 * np.pi / spec.rabi


# --- simulation-side scans ---------------------------------------------------

def _minus(spec, conv, t, branch_ratio=BRANCH_RATIO):
    return switched_charge(spec, conv, t, branch_ratio=branch_ratio)[1]


def minus_period(spec: GibbsSpec, conv: RaisingLoweringConvention = STANDARD,
                 branch_ratio: float = BRANCH_RATIO) -> float:
    eff = 4 * conv.scale**2 * spec.coupling
    return float(2 * np.pi / (branch_ratio * np.hypot(spec.omega, eff)))


class Peak(NamedTuple):
    t: float
    probability: float
    excited: float


def scan_probability_peaks(spec: GibbsSpec, conv: RaisingLoweringConvention = STANDARD,
                           points: int = 400, branch_ratio: float = BRANCH_RATIO,
                           xatol: float = 1e-10) -> list[Peak]:
    """Local maxima of the minus-branch probability over one period, refined.

    A coarse scan brackets each interior maximum; bounded Brent refinement
    then locates it to ``xatol`` in time.
    """
    period = minus_period(spec, conv, branch_ratio)
    grid = np.linspace(0.0, period, points + 1)
    probs = np.array([_minus(spec, conv, t, branch_ratio).probability for t in grid])
    peaks = []
    for i in range(1, points):
        if probs[i] >= probs[i - 1] and probs[i] > probs[i + 1]:
            res = minimize_scalar(
                lambda t: -_minus(spec, conv, t, branch_ratio).probability,
                bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                options={"xatol": xatol},
            )
            out = _minus(spec, conv, float(res.x), branch_ratio)
            peaks.append(Peak(float(res.x), out.probability, float(np.real(out.state[0, 0]))))
    return peaks


def scan_global_max(spec: GibbsSpec, conv: RaisingLoweringConvention = STANDARD,
                    points: int = 400, branch_ratio: float = BRANCH_RATIO,
                    min_probability: float = 1e-8) -> tuple[float, float]:
    """Largest normalized minus-branch excited population over one period.

    Points whose branch probability is below ``min_probability`` are skipped:
    there the normalized state is dominated by rounding in the numerator.
    The best coarse point is refined on nested local grids.  Returns
    ``(population, time)``.
    """
    period = minus_period(spec, conv, branch_ratio)

    def excited(t):
        out = _minus(spec, conv, t, branch_ratio)
        if out.state is None or out.probability < min_probability:
            return -np.inf
        return float(np.real(out.state[0, 0]))

    grid = np.linspace(0.0, period, points + 1)[1:-1]
    vals = np.array([excited(t) for t in grid])
    i = int(np.argmax(vals))
    best_t, best_v, half = grid[i], vals[i], grid[1] - grid[0]
    for _ in range(6):
        local = np.linspace(best_t - half, best_t + half, 41)
        lv = np.array([excited(t) for t in local])
        j = int(np.argmax(lv))
        if lv[j] >= best_v:
            best_t, best_v = local[j], lv[j]
        half /= 20
    return float(best_v), float(best_t)


def select_convention(omega: float = 1.0, coupling: float = 1.0, p: float = 0.25,
                      tol: float = 1e-6) -> RaisingLoweringConvention:
    """Pick the raising/lowering scale whose simulation reproduces the closed forms.

    Both scales are simulated; the first one whose peak-probability excited
    population and global maximum match :func:`f_of_p` and
    :func:`global_max_population` (and whose global-maximum time matches
    :func:`global_max_time`) is returned.
    """
    spec = GibbsSpec(omega, coupling, p)
    for conv in (VERBATIM, STANDARD):
        peaks = scan_probability_peaks(spec, conv)
        gmax, tmax = scan_global_max(spec, conv)
        if (peaks and abs(peaks[0].excited - f_of_p(spec)) < tol
                and abs(gmax - global_max_population(p)) < tol
                and abs(tmax - global_max_time(spec)) < 1e-3):
            return conv
    raise InvalidInput("no raising/lowering convention reproduces the closed forms")
