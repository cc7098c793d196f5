"""Rescuing a dissipating, fully charged qubit with a switch of two noisy processes.

Each process is the Lindblad evolution generated by ``hB + hA`` with the
dephasing dissipator ``rate * (-{N, rho} + 2 N rho N)``.  Two identical copies
run inside a switch with control ``|+>``; the plus branch is kept.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .channels import LindbladSpec, lindblad_propagator
from .errors import GridNotAscending, InvalidInput, NonHermitianInput, NoRescueFound
from .qops import KET_E, SIGMA_X, SIGMA_Y, SIGMA_Z, fidelity, is_hermitian, projector
from .switch import PLUS, SwitchOutcome, switch_of_duration

BRANCH_DURATIONS = {"half": 0.5, "full": 1.0}


def _default_hb():
    return 3 * SIGMA_X + SIGMA_Z


def _default_ha():
    return 12 * SIGMA_X + 5 * SIGMA_Y


@dataclass(frozen=True)
class StabilizerSpec:
    """Open-battery rescue setup.

    ``reference`` picks the fully charged state: ``"hamiltonian"`` is the top
    eigenvector of ``hb``, ``"computational"`` is ``|0><0|``.
    ``branch_ratio`` is the fraction of the protocol time each process runs.
    """

    hb: np.ndarray = field(default_factory=_default_hb)
    ha: np.ndarray = field(default_factory=_default_ha)
    rate: float = 2.0 / 3.0
    jump: np.ndarray = field(default_factory=lambda: projector(KET_E))
    branch_ratio: float = 0.5
    reference: str = "hamiltonian"

    def __post_init__(self):
        for name in ("hb", "ha"):
            if not is_hermitian(np.asarray(getattr(self, name), dtype=complex)):
                raise NonHermitianInput(f"{name} is not Hermitian")
        if self.reference not in ("hamiltonian", "computational"):
            raise InvalidInput(f"unknown reference state {self.reference!r}")
        if self.branch_ratio <= 0:
            raise InvalidInput("branch ratio must be positive")

    @classmethod
    def from_drive(cls, ha_x: float = 12.0, ha_y: float = 5.0, ha_z: float = 0.0, **kw) -> "StabilizerSpec":
        return cls(ha=ha_x * SIGMA_X + ha_y * SIGMA_Y + ha_z * SIGMA_Z, **kw)

    def lindblad(self) -> LindbladSpec:
        return LindbladSpec(np.asarray(self.hb) + np.asarray(self.ha), self.jump, self.rate)


class TrajectoryPoint(NamedTuple):
    t: float
    P: float
    C: float
    prob_plus: float
    fidelity: float


class Rescue(NamedTuple):
    t_rescue: float
    fidelity: float
    prob_plus: float


def initial_state(spec: StabilizerSpec) -> np.ndarray:
    if spec.reference == "computational":
        return projector(KET_E)
    evals, evecs = np.linalg.eigh(np.asarray(spec.hb, dtype=complex))
    return projector(evecs[:, -1])


def switched_step(spec: StabilizerSpec, t: float, rho: np.ndarray | None = None) -> tuple[SwitchOutcome, SwitchOutcome]:
    lind = spec.lindblad()
    rho = initial_state(spec) if rho is None else rho
    return switch_of_duration(lambda tau: lindblad_propagator(lind, tau), t, PLUS, rho, spec.branch_ratio)


def _point(spec: StabilizerSpec, t: float, ref: np.ndarray) -> TrajectoryPoint:
    plus, _ = switched_step(spec, t, ref)
    st = plus.state
    if st is None:
        return TrajectoryPoint(t, float("nan"), float("nan"), plus.probability, float("nan"))
    return TrajectoryPoint(t, float(np.real(st[0, 0])), float(abs(st[0, 1])), plus.probability, fidelity(st, ref))


def rescue_trajectory(spec: StabilizerSpec, t_grid: Sequence[float]) -> list[TrajectoryPoint]:
    t_grid = [float(t) for t in t_grid]
    if not t_grid or t_grid[0] != 0.0:
        raise GridNotAscending("time grid must start at 0")
    if any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise GridNotAscending("time grid must be strictly ascending")
    ref = initial_state(spec)
    return [_point(spec, t, ref) for t in t_grid]


def _plus_fidelity(spec: StabilizerSpec, t: float, ref: np.ndarray) -> float:
    st = switched_step(spec, t, ref)[0].state
    return 0.0 if st is None else fidelity(st, ref)


def find_rescue_time(spec: StabilizerSpec, t_max: float = 1.0, fid_threshold: float = 0.999,
                     step: float = 1e-3, t_min: float = 1e-4) -> Rescue:
    """First return of the plus-branch state to the charged state.

    The fidelity starts at 1 and falls as the battery leaks.  The scan looks
    for the first window after the fidelity has dropped below
    ``fid_threshold`` in which it climbs back above it, and reports the
    fidelity maximum inside that window (bounded Brent refinement).  If the
    fidelity never drops, the first scan point is returned.
    """
    if t_max <= t_min:
        raise InvalidInput("t_max must exceed the minimal rescue time")
    ref = initial_state(spec)
    n = int(np.floor((t_max - t_min) / step + 1e-9))
    grid = t_min + step * np.arange(n + 1)
    fids = np.array([_plus_fidelity(spec, t, ref) for t in grid])
    below = np.flatnonzero(fids < fid_threshold)
    if below.size == 0:
        t = float(grid[0])
        return Rescue(t, float(fids[0]), switched_step(spec, t, ref)[0].probability)
    after = np.flatnonzero(fids[below[0]:] >= fid_threshold)
    if after.size == 0:
        i = below[0] + int(np.argmax(fids[below[0]:]))
        raise NoRescueFound(
            f"fidelity never returned to {fid_threshold} before t = {t_max} "
            f"(best {fids[i]:.6f} at t = {grid[i]:.4f})",
            float(fids[i]), float(grid[i]),
        )
    start = below[0] + after[0]
    stop = start
    while stop + 1 < len(grid) and fids[stop + 1] >= fid_threshold:
        stop += 1
    i = start + int(np.argmax(fids[start:stop + 1]))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda t: -_plus_fidelity(spec, t, ref), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-10})
    t_best, f_best = float(res.x), -float(res.fun)
    if f_best < fids[i]:
        t_best, f_best = float(grid[i]), float(fids[i])
    return Rescue(t_best, f_best, switched_step(spec, t_best, ref)[0].probability)


class CycleReport(NamedTuple):
    fidelities: list
    probabilities: list
    cumulative_probability: float


def repeated_rescue(spec: StabilizerSpec, cycles: int, t_max: float = 1.0, fid_threshold: float = 0.999,
                    reset: bool = True) -> CycleReport:
    """Apply the rescue cycle ``cycles`` times, post-selecting the plus outcome each time.

    With ``reset`` every cycle starts from the ideal charged state (the
    Markovian restart assumption); otherwise each cycle takes the previous
    cycle's output.
    """
    if cycles < 1:
        raise InvalidInput("cycles must be a positive integer")
    rescue = find_rescue_time(spec, t_max, fid_threshold)
    ref = initial_state(spec)
    rho = ref
    fids, probs, total = [], [], 1.0
    for _ in range(cycles):
        plus = switched_step(spec, rescue.t_rescue, ref if reset else rho)[0]
        if plus.state is None:
            raise NoRescueFound("plus branch vanished during repeated rescue", 0.0, rescue.t_rescue)
        rho = plus.state
        fids.append(fidelity(rho, ref))
        probs.append(plus.probability)
        total *= plus.probability
    return CycleReport(fids, probs, total)


def with_branch_duration(spec: StabilizerSpec, name: str) -> StabilizerSpec:
    try:
        return replace(spec, branch_ratio=BRANCH_DURATIONS[name])
    except KeyError:
        raise InvalidInput(f"branch duration must be one of {sorted(BRANCH_DURATIONS)}") from None
