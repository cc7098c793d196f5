import numpy as np
from causalcell.channels import KrausChannel


def random_density(rng, dim=2, rank=None):
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_unitary(rng, dim=2):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(rng, dim=2, n_ops=2):
    """Kraus operators cut from a random isometry."""
    v = random_unitary(rng, dim * n_ops)[:, :dim]
    return KrausChannel(tuple(v[k * dim:(k + 1) * dim] for k in range(n_ops)))


def random_hermitian(rng, dim=2):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2
