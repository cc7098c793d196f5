"""Quantum switch of two channels with a qubit control.

The control is always the left tensor factor.  For Kraus sets ``{A_i}`` and
``{B_j}`` the switch has Kraus operators

    W_ij = |1><1| kron A_i B_j  +  |0><0| kron B_j A_i

so control ``|0>`` runs ``A`` first and control ``|1>`` runs ``B`` first.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .channels import KrausChannel, apply
from .errors import DimensionMismatch, NegativeTime
from .qops import KET_MINUS, KET_PLUS, TOL, partial_trace, projector, tensor



@dataclass(frozen=True)
class ControlState:
    """Pure control qubit ``cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>``.

    The default is ``|+>``.
    """

    theta: float = np.pi / 2
    phi: float = 0.0

    @property
    def vector(self) -> np.ndarray:
        return np.array(
            [np.cos(self.theta / 2), np.exp(1j * self.phi) * np.sin(self.theta / 2)],
            dtype=complex,
        )

    @property
    def rho(self) -> np.ndarray:
        return projector(self.vector)


PLUS = ControlState()
ZERO = ControlState(theta=0.0)
ONE = ControlState(theta=np.pi)


@dataclass(frozen=True)
class SwitchOutcome:
    """One measurement branch of the control qubit.

    ``unnormalized`` is the projected, control-traced battery operator; its
    trace is ``probability``.  ``state`` is the normalized conditional state,
    or ``None`` when the branch probability is below the undefined threshold.
    """

    outcome: str
    probability: float
    unnormalized: np.ndarray
    state: Optional[np.ndarray]

    @property
    def defined(self) -> bool:
        return self.state is not None


def switch_kraus(ch_a: KrausChannel, ch_b: KrausChannel) -> KrausChannel:
    if ch_a.dim != ch_b.dim:
        raise DimensionMismatch(f"switch of channels on dims {ch_a.dim} and {ch_b.dim}")
    d = ch_a.dim
    ops = []
    for a in ch_a.ops:
        for b in ch_b.ops:
            # block diagonal: control |0> block runs a first, |1> block runs b first
            w = np.zeros((2 * d, 2 * d), dtype=complex)
            w[:d, :d] = b @ a
            w[d:, d:] = a @ b
            ops.append(w)
    return KrausChannel(tuple(ops))


def switch_evolve(
    ch_a: KrausChannel,
    ch_b: KrausChannel,
    control: ControlState,
    rho_b: np.ndarray,
) -> np.ndarray:
    """Joint control-battery state after the switch, ``sum W (rho_c kron rho_b) W^dag``."""
    rho_b = np.asarray(rho_b, dtype=complex)
    if rho_b.shape != (ch_a.dim, ch_a.dim):
        raise DimensionMismatch("battery state does not match the channels")
    return apply(switch_kraus(ch_a, ch_b), tensor(control.rho, rho_b))


def _outcome(label: str, unnorm: np.ndarray) -> SwitchOutcome:
    prob = float(np.real(np.trace(unnorm)))
    state = unnorm / prob if prob >= TOL.undefined_probability else None
    return SwitchOutcome(label, max(prob, 0.0), unnorm, state)


def measure_control(rho_cb: np.ndarray) -> tuple[SwitchOutcome, SwitchOutcome]:
    """Project the control onto ``|+>`` and ``|->``; return ``(plus, minus)``."""
    rho_cb = np.asarray(rho_cb, dtype=complex)
    d = rho_cb.shape[0] // 2
    branches = []
    for label, vec in (("plus", KET_PLUS), ("minus", KET_MINUS)):
        # <v|_c rho_cb |v>_c computed directly on the control blocks
        blocks = rho_cb.reshape(2, d, 2, d)
        unnorm = np.einsum("a,aibj,b->ij", vec.conj(), blocks, vec)
        branches.append(_outcome(label, unnorm))
    return branches[0], branches[1]


def measure_control_by_projection(rho_cb: np.ndarray) -> tuple[SwitchOutcome, SwitchOutcome]:
    """Same as :func:`measure_control` but literally ``Tr_c[P rho P]``; kept as a cross-check."""
    d = rho_cb.shape[0] // 2
    out = []
    for label, vec in (("plus", KET_PLUS), ("minus", KET_MINUS)):
        p = tensor(projector(vec), np.eye(d))
        out.append(_outcome(label, partial_trace(p @ rho_cb @ p, 1, [2, d])))
    return out[0], out[1]


def switch_of_duration(
    factory: Callable[[float], KrausChannel],
    t: float,
    control: ControlState = PLUS,
    rho_b: np.ndarray | None = None,
    branch_ratio: float = 0.5,
    factory_b: Callable[[float], KrausChannel] | None = None,
) -> tuple[SwitchOutcome, SwitchOutcome]:
    """Switch two processes that each run for ``branch_ratio * t``.

    ``factory`` builds the first channel for a given duration; ``factory_b``
    the second one (defaults to an identical copy).
    """
    if t < 0:
        raise NegativeTime(f"negative duration {t}")
    tau = branch_ratio * t
    ch_a = factory(tau)
    ch_b = ch_a if factory_b is None else factory_b(tau)
    if rho_b is None:
        rho_b = projector(np.eye(ch_a.dim, dtype=complex)[-1])
    return measure_control(switch_evolve(ch_a, ch_b, control, rho_b))


def cross_terms(plus: SwitchOutcome, minus: SwitchOutcome) -> tuple[np.ndarray, np.ndarray]:
    """Recover the order-averaged map and the interference term from the two branches.

    For control ``|+>`` the joint state is
    ``1/2 [(|0><0| + |1><1|) kron Phi + (|0><1| + |1><0|) kron Delta]``, so
    ``plus = (Phi + Delta)/2`` and ``minus = (Phi - Delta)/2``.
    """
    return plus.unnormalized + minus.unnormalized, plus.unnormalized - minus.unnormalized
