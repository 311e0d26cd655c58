"""Shared test oracles.

The generator oracle builds a+ a+ b on the full two-mode Fock space from
bare single-mode ladder matrices and projects onto the N-particle sector;
it shares no code with the package's ladder construction.
"""

import numpy as np


def annihilation(dim):
    mat = np.zeros((dim, dim))
    for k in range(1, dim):
        mat[k - 1, k] = np.sqrt(k)
    return mat


def fock_sector_generators(n_particles):
    """Sector generator matrices from the full two-mode Fock space."""
    n = n_particles
    na_dim, nb_dim = n + 1, n // 2 + 1
    a = np.kron(annihilation(na_dim), np.eye(nb_dim))
    b = np.kron(np.eye(na_dim), annihilation(nb_dim))

    kplus_full = a.T @ a.T @ b / np.sqrt(n)
    kz_full = (a.T @ a - 2.0 * b.T @ b) / 4.0

    # sector basis ordered by ascending atom number (= ascending m)
    sector = [
        ia * nb_dim + ib
        for ia in range(na_dim)
        for ib in range(nb_dim)
        if ia + 2 * ib == n
    ]
    proj = np.zeros((na_dim * nb_dim, len(sector)))
    for col, idx in enumerate(sector):
        proj[idx, col] = 1.0

    kplus = proj.T @ kplus_full @ proj
    kminus = kplus.T
    return {
        "Kplus": kplus,
        "Kminus": kminus,
        "Kx": 0.5 * (kplus + kminus),
        "Ky": (kplus - kminus) / 2j,
        "Kz": proj.T @ kz_full @ proj,
    }
