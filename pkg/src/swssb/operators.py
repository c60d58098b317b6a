"""Dense operator algebra on N-qubit Hilbert spaces.

Operators are plain complex ``numpy`` arrays of shape ``(2**N, 2**N)``.

Basis convention: site 0 is the least significant bit of the
computational-basis index, so ``|q_{N-1} ... q_1 q_0>`` has index
``sum_k q_k 2**k`` and a Pauli string is built as
``kron(P_{N-1}, ..., P_1, P_0)``. Every module in the package relies on this.
"""

from __future__ import annotations

from functools import reduce
from typing import Mapping, NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
LOG_EIG_FLOOR = 1e-14

I2 = np.eye(2, dtype=complex)
PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
# S+ raises the Z eigenvalue: S+|1> = |0>.
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


class RankDeficientError(ValueError):
    """Raised when a matrix logarithm (modular Hamiltonian) is undefined."""


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def n_qubits_of(a: np.ndarray) -> int:
    """Qubit count of a square operator; raises if the shape is not 2^N x 2^N."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    dim = a.shape[0]
    n = dim.bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def as_operator(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    n_qubits_of(a)
    if not np.all(np.isfinite(a)):
        raise ValueError("operator has non-finite entries")
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def hermiticity_defect(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - dagger(a)))) if a.size else 0.0


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_defect(a) <= tol


def is_unitary(a: np.ndarray, tol: float = 1e-10) -> bool:
    a = np.asarray(a)
    return bool(np.allclose(a @ dagger(a), np.eye(a.shape[0]), atol=tol, rtol=0))


def embed(local: np.ndarray, sites, n_qubits: int) -> np.ndarray:
    """Embed an operator acting on ``sites`` (in order) into the full space.

    ``local`` acts on ``len(sites)`` qubits with the same little-endian
    convention as the full space: ``sites[0]`` is its least significant bit.
    """
    sites = list(sites)
    k = len(sites)
    local = np.asarray(local, dtype=complex)
    if local.shape != (1 << k, 1 << k):
        raise ValueError(f"local operator shape {local.shape} does not match {k} sites")
    if len(set(sites)) != k:
        raise ValueError(f"duplicate sites in {sites}")
    for s in sites:
        if not 0 <= s < n_qubits:
            raise ValueError(f"site {s} out of range for {n_qubits} qubits")
    if k == 1:
        s = sites[0]
        factors = [local if q == s else I2 for q in reversed(range(n_qubits))]
        return reduce(np.kron, factors)
    # Reorder axes of (local ⊗ I_rest) so local qubit m lands on sites[m].
    rest = [q for q in range(n_qubits) if q not in sites]
    full = np.kron(np.eye(1 << len(rest)), local)
    order = sites + rest  # full's little-endian qubit m sits on physical qubit order[m]
    t = full.reshape([2] * (2 * n_qubits))
    # tensor axis a (0-based, big-endian) <-> little-endian qubit n-1-a
    perm = [None] * n_qubits
    for m, q in enumerate(order):
        perm[n_qubits - 1 - q] = n_qubits - 1 - m
    t = t.transpose(perm + [p + n_qubits for p in perm])
    return t.reshape(1 << n_qubits, 1 << n_qubits)


def pauli_string(n_qubits: int, assignments: Mapping[int, str]) -> np.ndarray:
    """Tensor product of single-site Paulis, identity on unassigned sites.

    >>> pauli_string(2, {0: "Z", 1: "Z"}).diagonal().real
    array([ 1., -1., -1.,  1.])
    """
    factors = [I2] * n_qubits
    for site, label in assignments.items():
        if not 0 <= site < n_qubits:
            raise ValueError(f"site {site} out of range for {n_qubits} qubits")
        label = label.upper()
        if label not in ("X", "Y", "Z"):
            raise ValueError(f"unknown Pauli label {label!r}")
        factors[site] = PAULI[label]
    if n_qubits == 0:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, factors[::-1])


def pauli_from_label(label: str) -> np.ndarray:
    """Pauli string from a label such as ``"XIZ"``; the last character is site 0."""
    return pauli_string(len(label), {len(label) - 1 - k: c for k, c in enumerate(label) if c != "I"})


def hermitian_eig(a: np.ndarray, tol: float = HERMITIAN_TOL) -> HermitianEigen:
    a = np.asarray(a, dtype=complex)
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitianError(f"matrix is not Hermitian (max |A - A^†| = {defect:.3g})")
    w, v = np.linalg.eigh((a + dagger(a)) / 2)
    return HermitianEigen(w, v)


def _psd_eigen(a, eig: HermitianEigen | None):
    if eig is None:
        eig = hermitian_eig(a)
    w = eig.eigenvalues
    if w.size and w[0] < -PSD_TOL:
        raise NotPSDError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3g})")
    w = np.clip(w, 0.0, None)
    # Eigenvalues below solver resolution are numerically zero.
    if w.size:
        w[w < w.size * np.finfo(float).eps * w[-1]] = 0.0
    return w, eig.eigenvectors


def matrix_power(a: np.ndarray, alpha: float, eig: HermitianEigen | None = None) -> np.ndarray:
    """Fractional power of a positive semidefinite matrix, ``alpha >= 0``.

    Eigenvalues are clamped to ``[0, inf)`` before exponentiation. ``alpha = 0``
    gives the projector onto the support (the ``alpha -> 0+`` limit), which keeps
    the semigroup property for rank-deficient ``a``.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    w, v = _psd_eigen(a, eig)
    if alpha == 0:
        wa = (w > 0).astype(float)
    else:
        wa = np.power(w, alpha)
    return (v * wa) @ dagger(v)


def singular_values(a: np.ndarray) -> np.ndarray:
    return np.linalg.svd(np.asarray(a, dtype=complex), compute_uv=False)


def schatten_norm(a: np.ndarray, p: float = 1.0) -> float:
    """Schatten p-norm ``(sum_k s_k**p)**(1/p)``; ``p=np.inf`` is the operator norm."""
    if not p >= 1:
        raise ValueError(f"Schatten norm needs p >= 1, got {p}")
    s = singular_values(a)
    if s.size == 0:
        return 0.0
    if np.isinf(p):
        return float(s.max())
    smax = s.max()
    if smax == 0:
        return 0.0
    # Scale out the largest value so large p does not overflow.
    return float(smax * np.sum((s / smax) ** p) ** (1.0 / p))


def matrix_log(a: np.ndarray, eig: HermitianEigen | None = None) -> np.ndarray:
    """Logarithm of a positive definite Hermitian matrix.

    ``-matrix_log(rho)`` is the modular Hamiltonian of a full-rank state.
    """
    if eig is None:
        eig = hermitian_eig(a)
    w, v = eig
    if w[0] <= LOG_EIG_FLOOR:
        raise RankDeficientError(
            f"min eigenvalue {w[0]:.3g} <= {LOG_EIG_FLOOR:g}; the logarithm is undefined"
        )
    return (v * np.log(w)) @ dagger(v)


def matrix_exp_hermitian(a: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """``exp(scale * A)`` for Hermitian ``A``."""
    w, v = hermitian_eig(a)
    return (v * np.exp(scale * w)) @ dagger(v)


def frobenius_rel(a: np.ndarray, b: np.ndarray) -> float:
    """Relative Frobenius distance ``|a - b| / max(|b|, tiny)``."""
    nb = np.linalg.norm(b)
    return float(np.linalg.norm(a - b) / max(nb, np.finfo(float).tiny))
