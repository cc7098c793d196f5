"""CPTP maps in Kraus form, their Choi matrices, and Lindblad semigroups.

Vectorization is column-stacking throughout: ``vec(A X B) = (B^T kron A) vec(X)``.
The Choi matrix of a map ``Phi`` on a ``d``-level system is
``sum_ij |i><j| kron Phi(|i><j|)`` (input factor first, unnormalized).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import expm

from .errors import (
    DimensionMismatch,
    GridNotAscending,
    IncompleteKraus,
    NegativeTime,
    NonDiagonalEnvironment,
    NonHermitianInput,
    NonUnitaryInput,
    NotPSD,
)
from .qops import TOL, dag, is_hermitian, is_unitary, matexp_hermitian_generator


@dataclass(frozen=True)
class KrausChannel:
    """A completely positive trace-preserving map ``rho -> sum_i K_i rho K_i^dag``.

    Construction checks completeness ``sum_i K_i^dag K_i = I``.
    """

    ops: tuple

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.ops)
        if not ops:
            raise IncompleteKraus("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise DimensionMismatch("Kraus operators must be square and share one dimension")
            k.setflags(write=False)
        defect = np.max(np.abs(sum(dag(k) @ k for k in ops) - np.eye(d)))
        if defect > TOL.completeness:
            raise IncompleteKraus(f"completeness violated by {defect:.3e}")
        object.__setattr__(self, "ops", ops)

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    def __len__(self) -> int:
        return len(self.ops)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return apply(self, rho)


def unitary_channel(u: np.ndarray) -> KrausChannel:
    if not is_unitary(u):
        raise NonUnitaryInput("operator is not unitary")
    return KrausChannel((u,))


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel((np.eye(dim, dtype=complex),))


def apply(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.dim, ch.dim):
        raise DimensionMismatch(f"channel on dim {ch.dim} applied to state of shape {rho.shape}")
    ks = np.stack(ch.ops)
    return np.einsum("kab,bc,kdc->ad", ks, rho, ks.conj())


def compose(*channels: KrausChannel) -> KrausChannel:
    """Sequential composition; the first argument acts first."""
    ops = [np.eye(channels[0].dim, dtype=complex)]
    for ch in channels:
        if ch.dim != channels[0].dim:
            raise DimensionMismatch("cannot compose channels of different dimension")
        ops = [k @ prev for prev in ops for k in ch.ops]
    return KrausChannel(tuple(ops))


def kraus_from_dilation(u: np.ndarray, env_state: np.ndarray) -> KrausChannel:
    """Kraus set ``K_ij = sqrt(P_j) <i|U|j>`` of a system coupled to a diagonal environment.

    ``u`` acts on ``system kron environment`` with the system as the left
    factor; ``env_state`` must be diagonal with populations ``P_j``.  All
    ``d_env**2`` operators are returned, zero ones included.
    """
    u = np.asarray(u, dtype=complex)
    env_state = np.asarray(env_state, dtype=complex)
    d_env = env_state.shape[0]
    if not is_unitary(u):
        raise NonUnitaryInput("dilation operator is not unitary")
    if u.shape[0] % d_env:
        raise DimensionMismatch(f"dilation of dim {u.shape[0]} has no environment factor {d_env}")
    off = env_state - np.diag(np.diag(env_state))
    if np.max(np.abs(off)) > TOL.diagonal:
        raise NonDiagonalEnvironment("environment state must be diagonal")
    pops = np.clip(np.real(np.diag(env_state)), 0.0, None)
    d_sys = u.shape[0] // d_env
    blocks = u.reshape(d_sys, d_env, d_sys, d_env)
    ops = tuple(
        np.sqrt(pops[j]) * blocks[:, i, :, j] for i in range(d_env) for j in range(d_env)
    )
    return KrausChannel(ops)


def _unvec(v: np.ndarray, d: int) -> np.ndarray:
    return v.reshape(d, d, order="F")


def _vec(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).reshape(-1, order="F")


def choi(ch: KrausChannel) -> np.ndarray:
    d = ch.dim
    out = np.zeros((d * d, d * d), dtype=complex)
    for k in ch.ops:
        # |v_k> = sum_i |i> kron K|i>, so v_k[i*d + a] = K[a, i]
        v = k.T.reshape(-1)
        out += np.outer(v, v.conj())
    return out


def choi_from_superoperator(s: np.ndarray) -> np.ndarray:
    """Choi matrix of a map given as a column-stacking superoperator."""
    d = int(round(np.sqrt(s.shape[0])))
    out = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            out[i * d:(i + 1) * d, j * d:(j + 1) * d] = _unvec(s @ _vec(unit), d)
    return out


def kraus_from_choi(c: np.ndarray, cutoff: float = TOL.kraus_cutoff) -> KrausChannel:
    c = np.asarray(c, dtype=complex)
    d = int(round(np.sqrt(c.shape[0])))
    if c.shape != (d * d, d * d):
        raise DimensionMismatch(f"Choi matrix of shape {c.shape} is not (d^2, d^2)")
    if not is_hermitian(c, TOL.choi_psd):
        raise NotPSD("Choi matrix is not Hermitian")
    evals, evecs = np.linalg.eigh((c + dag(c)) / 2)
    if evals.min() < -TOL.choi_psd:
        raise NotPSD(f"Choi matrix has eigenvalue {evals.min():.3e}")
    ops = tuple(
        np.sqrt(lam) * evecs[:, n].reshape(d, d).T
        for n, lam in enumerate(evals)
        if lam > cutoff
    )
    return KrausChannel(ops)


def superoperator(ch: KrausChannel) -> np.ndarray:
    return sum(np.kron(k.conj(), k) for k in ch.ops)


@dataclass(frozen=True)
class LindbladSpec:
    """Generator ``L(rho) = -i[H, rho] + rate * (-{N, rho} + 2 N rho N)``.

    ``N`` must be an orthogonal projector so the dissipator is trace preserving.
    """

    H: np.ndarray
    N: np.ndarray
    rate: float

    def __post_init__(self):
        h = np.array(self.H, dtype=complex)
        n = np.array(self.N, dtype=complex)
        if not is_hermitian(h):
            raise NonHermitianInput("Lindblad Hamiltonian is not Hermitian")
        if n.shape != h.shape:
            raise DimensionMismatch("jump operator and Hamiltonian differ in dimension")
        if not is_hermitian(n) or np.max(np.abs(n @ n - n)) > TOL.hermitian:
            raise ValueError("jump operator must be an orthogonal projector")
        if self.rate < 0:
            raise ValueError("dissipation rate must be non-negative")
        h.setflags(write=False)
        n.setflags(write=False)
        object.__setattr__(self, "H", h)
        object.__setattr__(self, "N", n)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        h, n = self.H, self.N
        return -1j * (h @ rho - rho @ h) + self.rate * (-(n @ rho + rho @ n) + 2 * n @ rho @ n)

    def generator(self) -> np.ndarray:
        """Column-stacking matrix of ``L`` acting on ``vec(rho)``."""
        eye = np.eye(self.dim)
        h, n = self.H, self.N
        unitary = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
        dissip = -np.kron(eye, n) - np.kron(n.T, eye) + 2 * np.kron(n.T, n)
        return unitary + self.rate * dissip


def lindblad_superoperator(spec: LindbladSpec, t: float) -> np.ndarray:
    if t < 0:
        raise NegativeTime(f"negative duration {t}")
    return expm(spec.generator() * t)


def lindblad_propagator(spec: LindbladSpec, t: float) -> KrausChannel:
    """Kraus form of ``exp(t L)`` obtained through its Choi matrix."""
    if t < 0:
        raise NegativeTime(f"negative duration {t}")
    if spec.rate == 0:
        return unitary_channel(matexp_hermitian_generator(spec.H, t))
    return kraus_from_choi(choi_from_superoperator(lindblad_superoperator(spec, t)))


RK4_STEP = 1e-4


def _rk4_advance(spec: LindbladSpec, rho: np.ndarray, duration: float, max_step: float) -> np.ndarray:
    n = max(1, int(np.ceil(duration / max_step - 1e-9)))
    h = duration / n
    f = spec.rhs
    for _ in range(n):
        k1 = f(rho)
        k2 = f(rho + 0.5 * h * k1)
        k3 = f(rho + 0.5 * h * k2)
        k4 = f(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def lindblad_integrate(
    spec: LindbladSpec,
    rho0: np.ndarray,
    t_grid: Sequence[float],
    max_step: float = RK4_STEP,
) -> list[np.ndarray]:
    """Fixed-step RK4 trajectory of the master equation sampled on ``t_grid``."""
    t_grid = [float(t) for t in t_grid]
    if not t_grid or t_grid[0] != 0.0:
        raise GridNotAscending("time grid must start at 0")
    if any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise GridNotAscending("time grid must be strictly ascending")
    rho = np.array(rho0, dtype=complex)
    if rho.shape != (spec.dim, spec.dim):
        raise DimensionMismatch("initial state does not match the generator")
    out = [rho.copy()]
    for a, b in zip(t_grid, t_grid[1:]):
        rho = _rk4_advance(spec, rho, b - a, max_step)
        out.append(rho.copy())
    return out


def remix(ch: KrausChannel, u: np.ndarray) -> KrausChannel:
    """Unitary remixing ``K'_a = sum_b u[a, b] K_b``; represents the same map."""
    ks = np.stack(ch.ops)
    return KrausChannel(tuple(np.einsum("ab,bij->aij", u, ks)))


def is_cptp(ops: Iterable[np.ndarray], atol: float = TOL.completeness) -> bool:
    ops = [np.asarray(k) for k in ops]
    d = ops[0].shape[0]
    return np.max(np.abs(sum(dag(k) @ k for k in ops) - np.eye(d))) <= atol
