"""Exact many-particle treatment on the fixed-N sector.

The sector operators

    K_x = (a+ a+ b + a a b+) / (2 sqrt(N))
    K_y = (a+ a+ b - a a b+) / (2i sqrt(N))
    K_z = (a+ a - 2 b+ b) / 4

close a deformed SU(2) algebra: [K_z, K_+-] = +-K_+- as usual, but
[K_+, K_-] = F(K_z, N) with the structure polynomial F quadratic in K_z.
In the ascending-m basis K_z is diagonal with entries m, and the ladder
action of K_+ = K_x + i K_y follows from the bosonic matrix elements:

    <m+1| K_+ |m> = sqrt((n_a + 1)(n_a + 2) n_b / N),
    n_a = 2m + N/2,  n_b = N/4 - m.

Everything downstream (Hamiltonian H = eps*K_z + v*K_x, Casimir, time
evolution, variational states) is built from these tridiagonal pieces.
H, K_x and K_z are kept in symmetric-tridiagonal storage so that spectra
at N ~ 10^4 stay cheap; dense complex matrices are materialised only on
demand.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .core import KzBasis, ModelParams, basis_states

HERMITICITY_TOL = 1e-12


@dataclass(eq=False)
class OperatorMatrix:
    """Operator on the fixed-N sector.

    Stores either a dense (complex) matrix or the (diag, offdiag) pair of
    a real symmetric tridiagonal matrix; ``to_dense`` materialises the
    latter when needed.
    """

    label: str
    dense: np.ndarray | None = None
    diag: np.ndarray | None = None
    offdiag: np.ndarray | None = None

    @classmethod
    def from_dense(cls, label, matrix):
        return cls(label=label, dense=np.asarray(matrix))

    @classmethod
    def from_tridiagonal(cls, label, diag, offdiag):
        return cls(
            label=label,
            diag=np.asarray(diag, dtype=float),
            offdiag=np.asarray(offdiag, dtype=float),
        )

    @property
    def is_tridiagonal(self):
        return self.dense is None

    @property
    def dimension(self):
        if self.dense is not None:
            return self.dense.shape[0]
        return self.diag.size

    def to_dense(self):
        if self.dense is not None:
            return self.dense
        mat = np.diag(self.diag).astype(complex)
        idx = np.arange(self.diag.size - 1)
        mat[idx + 1, idx] = self.offdiag
        mat[idx, idx + 1] = self.offdiag
        return mat


def ladder_amplitudes(basis: KzBasis):
    """Matrix elements <m+1|K_+|m> for each coupled pair of the basis."""
    n = basis.n_particles
    na = basis.atom_counts[:-1].astype(float)
    nb = basis.molecule_counts[:-1].astype(float)
    return np.sqrt((na + 1.0) * (na + 2.0) * nb / n)


def build_generators(basis: KzBasis):
    """All five sector generators as matrices, keyed by label."""
    dim = basis.dimension
    lam = ladder_amplitudes(basis)
    idx = np.arange(dim - 1)

    kplus = np.zeros((dim, dim))
    kplus[idx + 1, idx] = lam
    kminus = kplus.T.copy()

    ky = np.zeros((dim, dim), dtype=complex)
    ky[idx + 1, idx] = -0.5j * lam
    ky[idx, idx + 1] = 0.5j * lam

    return {
        "Kz": OperatorMatrix.from_tridiagonal(
            "Kz", basis.m_values, np.zeros(dim - 1)
        ),
        "Kx": OperatorMatrix.from_tridiagonal("Kx", np.zeros(dim), 0.5 * lam),
        "Ky": OperatorMatrix.from_dense("Ky", ky),
        "Kplus": OperatorMatrix.from_dense("Kplus", kplus),
        "Kminus": OperatorMatrix.from_dense("Kminus", kminus),
    }


def structure_polynomial(kz, n_op, big_n):
    """Structure polynomial F of the deformed algebra, [K_+, K_-] = F.

    F = -n/N - (n + 4 kz)(n - 12 kz)/(4N).  Accepts scalars or square
    matrices for ``kz`` and ``n_op`` (pass n_op = N*identity on a fixed-N
    sector).
    """
    kz = np.asarray(kz) if not np.isscalar(kz) else kz
    if isinstance(kz, np.ndarray) and kz.ndim == 2:
        eye = np.eye(kz.shape[0])
        n_mat = n_op if isinstance(n_op, np.ndarray) else n_op * eye
        return -n_mat / big_n - (n_mat + 4.0 * kz) @ (n_mat - 12.0 * kz) / (
            4.0 * big_n
        )
    return -n_op / big_n - (n_op + 4.0 * kz) * (n_op - 12.0 * kz) / (4.0 * big_n)


def build_hamiltonian(params: ModelParams):
    """H = eps*K_z + v*K_x as a real symmetric tridiagonal matrix."""
    basis = basis_states(params.n_particles)
    lam = ladder_amplitudes(basis)
    return OperatorMatrix.from_tridiagonal(
        "H", params.epsilon * basis.m_values, 0.5 * params.v * lam
    )


def casimir_matrix(basis: KzBasis):
    """Conserved quantity C of the deformed algebra.

    C = K_- K_+ + (4/N) K_z^3 + ((N+6)/N) K_z^2 + ((8 - N^2)/(4N)) K_z;
    on an irreducible fixed-N sector this evaluates to a multiple of the
    identity, the quantum precursor of the teardrop constraint.
    """
    n = float(basis.n_particles)
    lam = ladder_amplitudes(basis)
    kminus_kplus = np.concatenate([lam**2, [0.0]])
    m = basis.m_values
    diag = (
        kminus_kplus
        + 4.0 / n * m**3
        + (n + 6.0) / n * m**2
        + (8.0 - n**2) / (4.0 * n) * m
    )
    return OperatorMatrix.from_tridiagonal("C", diag, np.zeros(basis.dimension - 1))


def _check_hermitian(mat):
    scale = max(1.0, np.abs(mat).max())
    if np.abs(mat - mat.conj().T).max() > HERMITICITY_TOL * scale:
        raise ValueError("matrix is not Hermitian")


def exact_spectrum(op: OperatorMatrix, want_vectors=False):
    """All eigenvalues (ascending), optionally with orthonormal vectors."""
    if op.is_tridiagonal:
        if want_vectors:
            return eigh_tridiagonal(op.diag, op.offdiag)
        return eigh_tridiagonal(op.diag, op.offdiag, eigvals_only=True), None
    mat = np.asarray(op.dense)
    _check_hermitian(mat)
    if want_vectors:
        vals, vecs = np.linalg.eigh(mat)
        return vals, vecs
    return np.linalg.eigvalsh(mat), None


@dataclass(eq=False)
class QuantumState:
    """Normalised state vector over the ascending-m basis."""

    amplitudes: np.ndarray
    n_particles: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm {norm} differs from 1 beyond 1e-12")

    @property
    def dimension(self):
        return self.amplitudes.size


def normalized_state(amplitudes, n_particles):
    amps = np.asarray(amplitudes, dtype=complex)
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise ValueError("cannot normalise the zero vector")
    return QuantumState(amps / norm, n_particles)


def basis_state(basis: KzBasis, m):
    """The basis vector |m>."""
    amps = np.zeros(basis.dimension, dtype=complex)
    idx = int(np.argmin(np.abs(basis.m_values - m)))
    if abs(basis.m_values[idx] - m) > 1e-9:
        raise ValueError(f"m = {m} is not in the basis")
    amps[idx] = 1.0
    return QuantumState(amps, basis.n_particles)


def evolve_state(hamiltonian: OperatorMatrix, psi0: QuantumState, times):
    """Evolve psi0 under a time-independent H via spectral decomposition.

    psi(t) = sum_k exp(-i E_k t) <k|psi0> |k>, exact up to the eigensolve,
    so norm and energy are conserved to machine precision.
    """
    if hamiltonian.dimension != psi0.dimension:
        raise ValueError(
            f"dimension mismatch: H is {hamiltonian.dimension}, "
            f"state is {psi0.dimension}"
        )
    vals, vecs = exact_spectrum(hamiltonian, want_vectors=True)
    coeffs = vecs.conj().T @ psi0.amplitudes
    states = []
    for t in np.asarray(times, dtype=float):
        amps = vecs @ (np.exp(-1j * vals * t) * coeffs)
        states.append(QuantumState(amps, psi0.n_particles))
    return states


@dataclass(frozen=True)
class MomentSet:
    """First moments, the conservation-law second/third moments, and energy."""

    kx: float
    ky: float
    kz: float
    kx2: float
    ky2: float
    kz2: float
    kz3: float
    energy: float | None = None


def observables(psi: QuantumState, generators, params: ModelParams | None = None):
    amps = psi.amplitudes
    kx_mat = generators["Kx"].to_dense()
    ky_mat = generators["Ky"].to_dense()
    m = generators["Kz"].diag if generators["Kz"].is_tridiagonal else np.real(
        np.diag(generators["Kz"].to_dense())
    )

    x = kx_mat @ amps
    y = ky_mat @ amps
    prob = np.abs(amps) ** 2

    kx = float(np.real(np.vdot(amps, x)))
    ky = float(np.real(np.vdot(amps, y)))
    kz = float(np.sum(prob * m))
    energy = None
    if params is not None:
        energy = params.epsilon * kz + params.v * kx
    return MomentSet(
        kx=kx,
        ky=ky,
        kz=kz,
        kx2=float(np.real(np.vdot(x, x))),
        ky2=float(np.real(np.vdot(y, y))),
        kz2=float(np.sum(prob * m**2)),
        kz3=float(np.sum(prob * m**3)),
        energy=energy,
    )


@dataclass(frozen=True)
class VariationalSpec:
    """Coefficients of the preparation Hamiltonian K = a K_x + b K_z + c K_y."""

    a: float
    b: float
    c: float = 0.0

    def __post_init__(self):
        if self.a == 0.0 and self.b == 0.0 and self.c == 0.0:
            raise ValueError("(a, b, c) must not all vanish")


def _gauge_fix(vec):
    # remove the eigensolver's arbitrary global phase: largest component
    # becomes real and positive
    k = int(np.argmax(np.abs(vec)))
    phase = vec[k] / abs(vec[k])
    return vec / phase


DEGENERACY_GAP = 1e-12


def variational_ground_state(spec: VariationalSpec, basis: KzBasis):
    """Ground state of a K_x + b K_z + c K_y.

    Sweeping (a, b) over the teardrop cross-section produces the family of
    coherent-like states whose (eta<K_x>, eta<K_z>) curves approach the
    surface as N grows.  A degenerate ground state (gap below 1e-12) is
    reported via a warning; the lowest-index eigenvector is returned.
    """
    gens = build_generators(basis)
    if spec.c == 0.0:
        diag = spec.b * basis.m_values
        offdiag = spec.a * gens["Kx"].offdiag
        vals, vecs = eigh_tridiagonal(diag, offdiag)
    else:
        mat = (
            spec.a * gens["Kx"].to_dense()
            + spec.b * gens["Kz"].to_dense()
            + spec.c * gens["Ky"].to_dense()
        )
        vals, vecs = np.linalg.eigh(mat)
    if vals.size > 1 and vals[1] - vals[0] < DEGENERACY_GAP:
        warnings.warn(
            "degenerate ground state; returning the lowest-index eigenvector",
            RuntimeWarning,
        )
    return normalized_state(_gauge_fix(vecs[:, 0]), basis.n_particles)
