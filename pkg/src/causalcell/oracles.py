"""Brute-force reference computations.

Everything here works on explicit state vectors or dilated density matrices
and uses ``scipy.linalg.expm``; nothing goes through Kraus sets, Choi
matrices or the switch module, so these routines can check those paths.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)
_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


def taylor_expm(h: np.ndarray, t: float, terms: int = 20) -> np.ndarray:
    """Truncated series for ``exp(-i h t)``."""
    a = -1j * np.asarray(h, dtype=complex) * t
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for n in range(1, terms + 1):
        term = term @ a / n
        out = out + term
    return out


def _trace_out(rho: np.ndarray, dims: list[int], keep: list[int]) -> np.ndarray:
    n = len(dims)
    letters = "abcdefgh"
    rows = list(letters[:n])
    cols = [c.upper() for c in rows]
    for k in range(n):
        if k not in keep:
            cols[k] = rows[k]
    out = "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
    t = np.einsum("".join(rows) + "".join(cols) + "->" + out, rho.reshape(dims + dims))
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def _branch(joint_cb: np.ndarray, d: int, vec: np.ndarray) -> np.ndarray:
    proj = np.kron(np.outer(vec, vec.conj()), np.eye(d))
    return _trace_out(proj @ joint_cb @ proj, [2, d], [1])


def gibbs_joint_hamiltonian(omega: float, coupling: float, scale: float = 0.5) -> np.ndarray:
    sp = scale * (_SX + 1j * _SY)
    sm = scale * (_SX - 1j * _SY)
    return (
        omega / 2 * np.kron(_SZ, _I2)
        + omega / 2 * np.kron(_I2, _SZ)
        + coupling * (np.kron(sp, sp) + np.kron(sm, sm))
    )


def dilated_gibbs_switch(
    omega: float,
    coupling: float,
    p: float,
    t: float,
    rho_b: np.ndarray,
    scale: float = 0.5,
    branch_ratio: float = 0.5,
    control: np.ndarray = _PLUS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Switch of two Gibbs chargers as one 16-dimensional unitary.

    Register order is control, battery, charger 1, charger 2.  Returns the
    full joint control-battery state and the unnormalized ``(plus, minus)``
    battery operators.
    """
    h = gibbs_joint_hamiltonian(omega, coupling, scale)
    u = expm(-1j * h * branch_ratio * t)
    # embed battery-charger unitaries into battery (x) c1 (x) c2
    u1 = np.kron(u, _I2)
    u2 = u.reshape(2, 2, 2, 2)
    u2 = np.einsum("abcd,ef->aebcfd", u2, _I2).reshape(8, 8)
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    # control |0>: charger 1 acts first; control |1>: charger 2 acts first
    v = np.kron(p0, u2 @ u1) + np.kron(p1, u1 @ u2)
    env = np.diag([p, 1 - p]).astype(complex)
    rho_c = np.outer(control, control.conj())
    rho = np.kron(np.kron(rho_c, rho_b), np.kron(env, env))
    out = v @ rho @ v.conj().T
    joint_cb = _trace_out(out, [2, 2, 2, 2], [0, 1])
    return joint_cb, _branch(joint_cb, 2, _PLUS), _branch(joint_cb, 2, _MINUS)


def dilated_gibbs_single(omega: float, coupling: float, p: float, t: float,
                         rho_b: np.ndarray, scale: float = 0.5) -> np.ndarray:
    u = expm(-1j * gibbs_joint_hamiltonian(omega, coupling, scale) * t)
    env = np.diag([p, 1 - p]).astype(complex)
    out = u @ np.kron(rho_b, env) @ u.conj().T
    return _trace_out(out, [2, 2], [0])


def unitary_switch_minus(u: np.ndarray, v: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Minus branch of a switch of two unitaries by direct expansion.

    With control ``|+>``, projecting onto ``|->`` leaves ``M rho M^dag`` with
    ``M = (U V - V U) / 2``.
    """
    m = (u @ v - v @ u) / 2
    return m @ rho @ m.conj().T


def unitary_switch_joint(u: np.ndarray, v: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Joint state for control ``|+>`` and two unitaries, built blockwise.

    Control ``|0>`` runs ``u`` then ``v``; control ``|1>`` runs ``v`` then ``u``.
    """
    a = v @ u
    b = u @ v
    top = np.hstack([a @ rho @ a.conj().T, a @ rho @ b.conj().T])
    bottom = np.hstack([b @ rho @ a.conj().T, b @ rho @ b.conj().T])
    return 0.5 * np.vstack([top, bottom])


def charger_propagator(omega: float, x: float, y: float, t: float) -> np.ndarray:
    return expm(-1j * (omega * _SZ + x * _SX + y * _SY) * t)


def sequential_gibbs_best(omega: float, coupling: float, p: float, rho_b: np.ndarray,
                          n_grid: int = 4001, scale: float = 0.5) -> tuple[float, float]:
    """Best excited population after two consecutive, definite-order charger couplings.

    Scans the per-coupling duration over one Rabi period with dilated
    dynamics, then refines the best grid point on a fine local grid.
    Returns ``(best population, duration)``.
    """
    lam = np.sqrt(omega**2 + (4 * scale**2 * coupling) ** 2)
    period = np.pi / lam

    def pop(tau: float) -> float:
        once = dilated_gibbs_single(omega, coupling, p, tau, rho_b, scale)
        twice = dilated_gibbs_single(omega, coupling, p, tau, once, scale)
        return float(np.real(twice[0, 0]))

    grid = np.linspace(0.0, period, n_grid)
    vals = np.array([pop(t) for t in grid])
    i = int(np.argmax(vals))
    step = grid[1] - grid[0]
    fine = np.linspace(max(grid[i] - step, 0.0), grid[i] + step, 401)
    fvals = np.array([pop(t) for t in fine])
    j = int(np.argmax(fvals))
    return float(fvals[j]), float(fine[j])


def rk4_lindblad(h: np.ndarray, n: np.ndarray, rate: float, rho0: np.ndarray,
                 t: float, step: float = 1e-4) -> np.ndarray:
    """Plain RK4 for ``-i[h, rho] + rate(-{n, rho} + 2 n rho n)``."""
    def f(r):
        return -1j * (h @ r - r @ h) + rate * (-(n @ r + r @ n) + 2 * n @ r @ n)

    steps = max(1, int(np.ceil(t / step)))
    dt = t / steps
    r = np.array(rho0, dtype=complex)
    for _ in range(steps):
        k1 = f(r)
        k2 = f(r + dt / 2 * k1)
        k3 = f(r + dt / 2 * k2)
        k4 = f(r + dt * k3)
        r = r + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return r
