"""Dense complex linear algebra for qubits and small registers.

Operators are plain ``numpy`` complex arrays of shape ``(d, d)``.  Basis
ordering is fixed throughout the package: index 0 is the excited state
``|e>`` (sigma_z eigenvalue +1) and index 1 the ground state ``|g>``.  The
same index convention labels the control qubit states ``|0>`` and ``|1>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NonHermitianInput


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10
    trace: float = 1e-10
    psd: float = 1e-10
    unitary: float = 1e-10
    completeness: float = 1e-9
    diagonal: float = 1e-12
    choi_psd: float = 1e-9
    kraus_cutoff: float = 1e-12
    undefined_probability: float = 1e-12
    parallel: float = 1e-12


TOL = Tolerances()

EXCITED = 0
GROUND = 1

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


def pauli(which: str) -> np.ndarray:
    """Return a copy of the Pauli matrix named ``'x'``, ``'y'`` or ``'z'``."""
    try:
        return _PAULI[which.lower()].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli matrix {which!r}") from None


def ket(index: int, dim: int = 2) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


KET_E = ket(EXCITED)
KET_G = ket(GROUND)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


def projector(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def dag(op: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(op, -1, -2))


def is_hermitian(op: np.ndarray, atol: float = TOL.hermitian) -> bool:
    op = np.asarray(op)
    return op.ndim == 2 and op.shape[0] == op.shape[1] and np.max(np.abs(op - dag(op)), initial=0.0) <= atol


def is_unitary(op: np.ndarray, atol: float = TOL.unitary) -> bool:
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        return False
    return np.max(np.abs(dag(op) @ op - np.eye(op.shape[0]))) <= atol


def is_density_matrix(rho: np.ndarray, atol: float = TOL.psd) -> bool:
    """Hermitian, unit trace and positive semidefinite within ``atol``."""
    rho = np.asarray(rho)
    if not is_hermitian(rho, atol):
        return False
    if abs(np.trace(rho) - 1.0) > max(atol, TOL.trace):
        return False
    return np.linalg.eigvalsh((rho + dag(rho)) / 2).min() >= -atol


def matexp_hermitian_generator(h: np.ndarray, t: float) -> np.ndarray:
    """Return ``exp(-i h t)`` for Hermitian ``h`` via its eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise NonHermitianInput("generator is not Hermitian")
    evals, evecs = np.linalg.eigh((h + dag(h)) / 2)
    return (evecs * np.exp(-1j * evals * t)) @ dag(evecs)


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product; the left factor is the slower-varying index."""
    if not ops:
        raise ValueError("tensor() needs at least one operand")
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def partial_trace(rho: np.ndarray, keep: int | Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem except those listed in ``keep``.

    ``dims`` lists the factor dimensions in tensor order.  Kept subsystems
    appear in the output in their original order.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise DimensionMismatch(f"state of shape {rho.shape} does not factor as {dims}")
    keep = sorted({keep} if isinstance(keep, (int, np.integer)) else set(keep))
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise DimensionMismatch(f"subsystem index out of range for {n} factors")
    t = rho.reshape(dims + dims)
    # trace from the highest index down so axis numbers stay valid
    for ax in reversed(range(n)):
        if ax not in keep:
            t = np.trace(t, axis1=ax, axis2=ax + t.ndim // 2)
    d_keep = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d_keep, d_keep)


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh((a + dag(a)) / 2)
    return (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ dag(evecs)


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

    Reduces to ``<psi|rho|psi>`` when ``sigma`` is pure.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"fidelity of {rho.shape} and {sigma.shape}")
    root = _psd_sqrt(rho)
    inner = root @ sigma @ root
    evals = np.linalg.eigvalsh((inner + dag(inner)) / 2)
    value = float(np.sum(np.sqrt(np.clip(evals, 0.0, None))) ** 2)
    return min(max(value, 0.0), 1.0)


def expectation(rho: np.ndarray, op: np.ndarray) -> float:
    return float(np.real(np.trace(np.asarray(rho) @ np.asarray(op))))
