"""Density matrices, thermofield-double purifications and symmetry tests.

Doubled-space layout: a TFD vector lives on 2N qubits; physical qubits are
0..N-1 (low bits) and auxiliary qubits N..2N-1, so the amplitude of
``|aux>|phys>`` sits at index ``phys + 2**N * aux``. An operator ``A`` on the
physical system and ``B`` on the auxiliary system is ``np.kron(B, A)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from . import operators as ops
from .rng import stream

STATE_TOL = 1e-10
SYMMETRY_TOL = 1e-8
U1_ANGLES = (np.pi / 7, 1.0, 2.5)


class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix with a cached spectrum."""

    def __init__(self, matrix, *, check: bool = True, tol: float = STATE_TOL):
        m = ops.as_operator(matrix).copy()
        m.setflags(write=False)
        self._m = m
        self.n_qubits = ops.n_qubits_of(m)
        if check:
            defect = ops.hermiticity_defect(m)
            if defect > tol:
                raise ops.NotHermitianError(f"density matrix not Hermitian ({defect:.3g})")
            tr = np.trace(m).real
            if abs(tr - 1) > tol:
                raise ValueError(f"trace {tr!r} differs from 1")
            lo = self.eigen.eigenvalues[0]
            if lo < -tol:
                raise ops.NotPSDError(f"negative eigenvalue {lo:.3g}")

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    @cached_property
    def eigen(self) -> ops.HermitianEigen:
        return ops.hermitian_eig(self._m)

    def power(self, alpha: float) -> np.ndarray:
        return ops.matrix_power(self._m, alpha, eig=self.eigen)

    @cached_property
    def sqrt(self) -> np.ndarray:
        return self.power(0.5)

    def purity(self) -> float:
        return float(np.sum(np.clip(self.eigen.eigenvalues, 0, None) ** 2))

    def entropy(self) -> float:
        w = self.eigen.eigenvalues
        w = w[w > 1e-300]
        return float(-np.sum(w * np.log(w)))

    def __array__(self, dtype=None, copy=None):
        return self._m if dtype is None else self._m.astype(dtype)

    def __repr__(self) -> str:
        return f"DensityMatrix(n_qubits={self.n_qubits})"


def as_density(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def pure(vec) -> DensityMatrix:
    v = np.asarray(vec, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()))


# ---------------------------------------------------------------- common states


def basis_state(n_qubits: int, index: int) -> np.ndarray:
    v = np.zeros(1 << n_qubits, dtype=complex)
    v[index] = 1.0
    return v


def plus_state(n_qubits: int) -> np.ndarray:
    return np.full(1 << n_qubits, 2.0 ** (-n_qubits / 2), dtype=complex)


def ghz_state(n_qubits: int, sign: int = 1) -> np.ndarray:
    v = np.zeros(1 << n_qubits, dtype=complex)
    v[0] = 1 / np.sqrt(2)
    v[-1] = sign / np.sqrt(2)
    return v


def parity_projector(n_qubits: int, even: bool = True) -> np.ndarray:
    """Projector onto the +1 (even) or -1 (odd) eigenspace of ``prod_i X_i``."""
    u = z2_generator(n_qubits)
    s = 1 if even else -1
    return (np.eye(1 << n_qubits) + s * u) / 2


def even_sector_mixed(n_qubits: int) -> DensityMatrix:
    """Maximally mixed state on the even ``prod X`` sector."""
    return DensityMatrix(parity_projector(n_qubits) / 2 ** (n_qubits - 1))


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    return DensityMatrix(np.eye(1 << n_qubits) / 2**n_qubits)


def charge_operator(n_qubits: int) -> np.ndarray:
    """Number of sites in |0>, i.e. ``sum_i (1 + Z_i)/2``; S+ raises it by one."""
    z_sum = total_z(n_qubits)
    return np.diag((n_qubits + z_sum) / 2).astype(complex)


def total_z(n_qubits: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits)
    ones = np.array([bin(k).count("1") for k in idx])
    return (n_qubits - 2 * ones).astype(float)


def charge_projector(n_qubits: int, charge: int) -> np.ndarray:
    q = np.diag(charge_operator(n_qubits)).real
    return np.diag((np.rint(q) == charge).astype(complex))


def random_density_matrix(n_qubits: int, rank: int, seed: int) -> DensityMatrix:
    """``G G^† / tr(G G^†)`` for a seeded complex Gaussian ``2^N x rank`` matrix."""
    dim = 1 << n_qubits
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    rng = stream(seed, n_qubits, rank)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_state_in(projector: np.ndarray, rank: int, seed: int) -> DensityMatrix:
    """Random density matrix supported inside the range of ``projector``."""
    w, v = np.linalg.eigh(projector)
    basis = v[:, w > 0.5]
    k = basis.shape[1]
    if not 1 <= rank <= k:
        raise ValueError(f"rank must lie in [1, {k}], got {rank}")
    rng = stream(seed, k, rank, 1)
    g = rng.standard_normal((k, rank)) + 1j * rng.standard_normal((k, rank))
    g = basis @ g
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


# ---------------------------------------------------------------- ensembles


@dataclass(frozen=True)
class BlockEnsemble:
    """Weights and orthonormal states (columns of ``states``)."""

    weights: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        s = np.asarray(self.states, dtype=complex)
        if s.ndim == 1:
            s = s[:, None]
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", s)
        if w.ndim != 1 or w.size != s.shape[1]:
            raise ValueError("need one weight per state")
        if np.any(w < 0) or abs(w.sum() - 1) > STATE_TOL:
            raise ValueError("weights must be non-negative and sum to 1")
        gram = s.conj().T @ s
        if np.max(np.abs(gram - np.eye(w.size))) > STATE_TOL:
            raise ValueError("states are not orthonormal")

    @property
    def n_qubits(self) -> int:
        return int(np.log2(self.states.shape[0]))

    def __iter__(self):
        return iter(zip(self.weights, self.states.T))


def block_ensemble_state(ens: BlockEnsemble) -> DensityMatrix:
    s = ens.states
    return DensityMatrix((s * ens.weights) @ s.conj().T)


# ---------------------------------------------------------------- thermal states


def thermal_state(h, beta: float, sector: np.ndarray | None = None) -> DensityMatrix:
    """Gibbs state ``exp(-beta H)/Z``, optionally restricted to a charge sector.

    With ``sector`` (a projector commuting with ``H``) this is the fixed-charge
    canonical ensemble ``P exp(-beta H) P / tr[P exp(-beta H)]``. For the grand
    canonical ensemble pass ``H - mu Q`` and no sector.
    """
    h = ops.as_operator(h)
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if sector is None:
        basis = np.eye(h.shape[0], dtype=complex)
    else:
        sector = np.asarray(sector, dtype=complex)
        comm = np.max(np.abs(sector @ h - h @ sector))
        if comm > 1e-10:
            raise ValueError(f"sector projector does not commute with H ({comm:.3g})")
        w, v = np.linalg.eigh(sector)
        basis = v[:, w > 0.5]
        if basis.shape[1] == 0:
            raise ValueError("empty charge sector")
    hs = basis.conj().T @ h @ basis
    e, v = ops.hermitian_eig(hs)
    boltz = np.exp(-beta * (e - e[0]))
    z = boltz.sum()
    if not np.isfinite(z) or z <= 0:
        raise FloatingPointError(f"partition function not representable at beta={beta}")
    rho_s = (v * (boltz / z)) @ v.conj().T
    return DensityMatrix(basis @ rho_s @ basis.conj().T)


# ---------------------------------------------------------------- symmetry


def z2_generator(n_qubits: int) -> np.ndarray:
    return ops.pauli_string(n_qubits, {i: "X" for i in range(n_qubits)})


def u1_generator(n_qubits: int, phi: float) -> np.ndarray:
    return np.diag(np.exp(1j * phi * total_z(n_qubits)))


def tilde(o: np.ndarray) -> np.ndarray:
    """Auxiliary-system partner of a physical operator.

    Defined as ``Y^{⊗N} O* Y^{⊗N}`` so that ``(I ⊗ Õ)|EPR> = (O^† ⊗ I)|EPR>``.
    Paulis map to minus themselves, ``S+ -> -S-``, ``prod X -> (-1)^N prod X``
    and ``exp(i phi sum Z) -> exp(i phi sum Z)``.
    """
    o = np.asarray(o, dtype=complex)
    n = ops.n_qubits_of(o)
    w = ops.pauli_string(n, {i: "Y" for i in range(n)})
    return w @ o.conj() @ w


@dataclass(frozen=True)
class SymmetryGroup:
    """Z2 (``prod X``) or U(1) (``exp(i phi sum Z)`` sampled at fixed angles)."""

    kind: str
    n_qubits: int
    angles: Sequence[float] = field(default=U1_ANGLES)

    def __post_init__(self):
        if self.kind not in ("Z2", "U1"):
            raise ValueError(f"unknown symmetry kind {self.kind!r}")

    def elements(self) -> Iterator[np.ndarray]:
        if self.kind == "Z2":
            yield z2_generator(self.n_qubits)
        else:
            for phi in self.angles:
                yield u1_generator(self.n_qubits, phi)

    def doubled_elements(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        for u in self.elements():
            yield u, tilde(u)


class StrongSymmetry(NamedTuple):
    holds: bool
    theta: float
    residual: float


def check_strong_symmetry(rho, u: np.ndarray, tol: float = SYMMETRY_TOL) -> StrongSymmetry:
    """Test ``U rho = e^{i theta} rho``; theta comes from the largest entry of rho."""
    m = np.asarray(as_density(rho).matrix)
    u = np.asarray(u, dtype=complex)
    if u.shape != m.shape:
        raise ValueError(f"dimension mismatch {u.shape} vs {m.shape}")
    urho = u @ m
    k = np.unravel_index(np.argmax(np.abs(m)), m.shape)
    theta = float(np.angle(urho[k] / m[k]))
    residual = ops.schatten_norm(urho - np.exp(1j * theta) * m, 1)
    return StrongSymmetry(residual < tol, theta, residual)


def check_weak_symmetry(rho, u: np.ndarray, tol: float = SYMMETRY_TOL) -> bool:
    m = np.asarray(as_density(rho).matrix)
    u = np.asarray(u, dtype=complex)
    if u.shape != m.shape:
        raise ValueError(f"dimension mismatch {u.shape} vs {m.shape}")
    return ops.schatten_norm(u @ m @ ops.dagger(u) - m, 1) < tol


def is_strongly_symmetric(rho, group: SymmetryGroup) -> bool:
    return all(check_strong_symmetry(rho, u).holds for u in group.elements())


# ---------------------------------------------------------------- TFD


@dataclass(frozen=True)
class TFDState:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).ravel()
        if a.size != 4**self.n_qubits:
            raise ValueError(f"expected {4 ** self.n_qubits} amplitudes, got {a.size}")
        object.__setattr__(self, "amplitudes", a)

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``M[aux, phys]``."""
        d = 1 << self.n_qubits
        return self.amplitudes.reshape(d, d)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def reduced_physical(self) -> np.ndarray:
        m = self.as_matrix()
        return m.T @ m.conj()

    def reduced_auxiliary(self) -> np.ndarray:
        m = self.as_matrix()
        return m @ m.conj().T

    def schmidt_coefficients(self) -> np.ndarray:
        return np.linalg.svd(self.as_matrix(), compute_uv=False)

    def apply(self, phys: np.ndarray | None = None, aux: np.ndarray | None = None) -> np.ndarray:
        """Amplitudes of ``(phys ⊗ aux)|self>`` without forming the doubled matrix."""
        m = self.as_matrix()
        if phys is not None:
            m = m @ np.asarray(phys).T
        if aux is not None:
            m = np.asarray(aux) @ m
        return m.ravel()

    def expectation(self, phys: np.ndarray | None = None, aux: np.ndarray | None = None) -> complex:
        return complex(np.vdot(self.amplitudes, self.apply(phys, aux)))


def epr_state(n_qubits: int) -> np.ndarray:
    """Product of per-site singlets ``(|01> - |10>)/sqrt(2)`` in (aux, phys) order; unit norm."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    single = np.array([[0, 1], [-1, 0]], dtype=complex) / np.sqrt(2)
    m = single
    for _ in range(n_qubits - 1):
        m = np.kron(single, m)
    return m.ravel()


def tfd(rho) -> TFDState:
    """Thermofield-double purification ``(sqrt(rho) ⊗ I)|EPR>``.

    The singlet product is used unnormalized (each factor has norm sqrt 2),
    which is what makes the result exactly unit norm for ``tr rho = 1``.
    """
    rho = as_density(rho)
    n = rho.n_qubits
    epr = epr_state(n).reshape(1 << n, 1 << n) * 2 ** (n / 2)
    return TFDState((epr @ rho.sqrt.T).ravel(), n)


class DoubledSymmetry(NamedTuple):
    holds: bool
    phase: float
    physical_holds: bool
    physical_phase: float
    auxiliary_holds: bool
    auxiliary_phase: float


def _phase_action(psi: np.ndarray, out: np.ndarray, tol: float) -> tuple[bool, float]:
    ov = np.vdot(psi, out)
    phase = float(np.angle(ov))
    dev = np.linalg.norm(out - np.exp(1j * phase) * psi)
    return bool(dev < tol), phase


def doubled_symmetry_check(state: TFDState, u: np.ndarray, u_tilde: np.ndarray,
                           tol: float = SYMMETRY_TOL) -> DoubledSymmetry:
    """Does ``U ⊗ Ũ`` (and each factor alone) act on the TFD as a pure phase?"""
    d = 1 << state.n_qubits
    for name, op in (("U", u), ("Ũ", u_tilde)):
        if np.shape(op) != (d, d):
            raise ValueError(f"{name} has shape {np.shape(op)}, expected {(d, d)}")
    psi = state.amplitudes / state.norm()
    st = TFDState(psi, state.n_qubits)
    both = _phase_action(psi, st.apply(u, u_tilde), tol)
    phys = _phase_action(psi, st.apply(u, None), tol)
    aux = _phase_action(psi, st.apply(None, u_tilde), tol)
    return DoubledSymmetry(both[0], both[1], phys[0], phys[1], aux[0], aux[1])


def doubled_operator(phys: np.ndarray | None, aux: np.ndarray | None, n_qubits: int) -> np.ndarray:
    """Explicit ``phys ⊗ aux`` on the 2N-qubit space (small N only)."""
    eye = np.eye(1 << n_qubits, dtype=complex)
    return np.kron(eye if aux is None else aux, eye if phys is None else phys)
