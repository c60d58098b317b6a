"""Kraus channels stored on the full Hilbert space."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import operators as ops
from .states import DensityMatrix, as_density

COMPLETENESS_TOL = 1e-10
COVARIANCE_TOL = 1e-8


@dataclass(frozen=True)
class KrausChannel:
    kraus_ops: tuple
    support: frozenset = frozenset()

    def __post_init__(self):
        ks = tuple(ops.as_operator(k) for k in self.kraus_ops)
        if not ks:
            raise ValueError("a channel needs at least one Kraus operator")
        dim = ks[0].shape[0]
        if any(k.shape != (dim, dim) for k in ks):
            raise ValueError("Kraus operators have inconsistent shapes")
        object.__setattr__(self, "kraus_ops", ks)
        object.__setattr__(self, "support", frozenset(self.support))
        defect = self.completeness_defect()
        if defect > COMPLETENESS_TOL:
            raise ValueError(f"Kraus operators are not complete (defect {defect:.3g})")

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    @property
    def n_qubits(self) -> int:
        return ops.n_qubits_of(self.kraus_ops[0])

    def completeness_defect(self) -> float:
        s = sum(ops.dagger(k) @ k for k in self.kraus_ops)
        return float(np.max(np.abs(s - np.eye(s.shape[0]))))

    def __call__(self, rho) -> DensityMatrix:
        return apply(self, rho)

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Composition: ``self`` first, then ``other``."""
        ks = [b @ a for b in other.kraus_ops for a in self.kraus_ops]
        return KrausChannel(tuple(ks), self.support | other.support)


def apply(ch: KrausChannel, rho) -> DensityMatrix:
    m = np.asarray(as_density(rho).matrix)
    if m.shape != (ch.dim, ch.dim):
        raise ValueError(f"channel acts on dimension {ch.dim}, state has {m.shape[0]}")
    out = sum(k @ m @ ops.dagger(k) for k in ch.kraus_ops)
    out = (out + ops.dagger(out)) / 2
    return DensityMatrix(out)


def apply_sequence(channels: Iterable[KrausChannel], rho) -> DensityMatrix:
    for ch in channels:
        rho = apply(ch, rho)
    return as_density(rho)


def identity_channel(n_qubits: int) -> KrausChannel:
    return KrausChannel((np.eye(1 << n_qubits, dtype=complex),))


def ising_decoherence_channel(bond: tuple[int, int], p: float, n_qubits: int) -> KrausChannel:
    """``rho -> (1-p) rho + p Z_i Z_j rho Z_j Z_i`` on one bond."""
    i, j = bond
    if i == j:
        raise ValueError("bond endpoints must differ")
    if not 0 <= p <= 0.5:
        raise ValueError(f"p must lie in [0, 1/2], got {p}")
    zz = ops.pauli_string(n_qubits, {i: "Z", j: "Z"})
    eye = np.eye(1 << n_qubits, dtype=complex)
    return KrausChannel((np.sqrt(1 - p) * eye, np.sqrt(p) * zz), frozenset(bond))


def apply_ising_decoherence(rho, bonds: Sequence[tuple[int, int]], p: float) -> DensityMatrix:
    """Apply the bond channel on every bond in turn (order is irrelevant: all Kraus ops commute)."""
    rho = as_density(rho)
    n = rho.n_qubits
    for b in bonds:
        rho = apply(ising_decoherence_channel(b, p, n), rho)
    return rho


def decohered_ising_state(n_qubits: int, bonds: Sequence[tuple[int, int]], p: float) -> DensityMatrix:
    """Decohered Ising state: the bond channels applied to ``|+...+><+...+|``.

    Computed exactly in the X basis, where the state stays diagonal: each bond
    channel mixes the weight of configuration ``s`` with ``s ^ (bit_i | bit_j)``.
    """
    if not 0 <= p <= 0.5:
        raise ValueError(f"p must lie in [0, 1/2], got {p}")
    dim = 1 << n_qubits
    w = np.zeros(dim)
    w[0] = 1.0
    idx = np.arange(dim)
    for i, j in bonds:
        if i == j:
            raise ValueError("bond endpoints must differ")
        w = (1 - p) * w + p * w[idx ^ ((1 << i) | (1 << j))]
    hadamard = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    h = np.ones((1, 1))
    for _ in range(n_qubits):
        h = np.kron(hadamard, h)
    m = (h * w) @ h
    return DensityMatrix(m.astype(complex))


def dephasing_channel(site: int, q: float, n_qubits: int, pauli: str = "Z") -> KrausChannel:
    """``rho -> (1-q) rho + q P rho P`` for a single-site Pauli ``P``."""
    if not 0 <= q <= 1:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    p = ops.pauli_string(n_qubits, {site: pauli})
    eye = np.eye(1 << n_qubits, dtype=complex)
    return KrausChannel((np.sqrt(1 - q) * eye, np.sqrt(q) * p), frozenset({site}))


def charge_perturbation_channel(o: np.ndarray, eps: float, site: int | None = None) -> KrausChannel:
    """``(1 - eps^2/2) rho + eps^2/4 (O^† rho O + O rho O^†)`` for unitary ``O``."""
    o = ops.as_operator(o)
    if not ops.is_unitary(o):
        raise ValueError("charge perturbation needs a unitary operator")
    if not 0 <= eps <= 1:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    eye = np.eye(o.shape[0], dtype=complex)
    ks = (np.sqrt(1 - eps**2 / 2) * eye, (eps / 2) * o, (eps / 2) * ops.dagger(o))
    return KrausChannel(ks, frozenset() if site is None else frozenset({site}))


def mixture_channel(o_i: np.ndarray, o_j: np.ndarray, alpha: float) -> KrausChannel:
    """``(1 - alpha) rho + alpha (O_i O_j^†) rho (O_i O_j^†)^†``."""
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    a = ops.as_operator(o_i) @ ops.dagger(ops.as_operator(o_j))
    if not ops.is_unitary(a):
        raise ValueError("O_i O_j^† must be unitary")
    eye = np.eye(a.shape[0], dtype=complex)
    return KrausChannel((np.sqrt(1 - alpha) * eye, np.sqrt(alpha) * a))


def kraus_phases(ch: KrausChannel, u: np.ndarray, tol: float = COVARIANCE_TOL) -> list[float | None]:
    """Phase ``phi`` with ``U K U^† = e^{i phi} K`` for each Kraus op, or None if none exists."""
    u = np.asarray(u, dtype=complex)
    out = []
    for k in ch.kraus_ops:
        ck = u @ k @ ops.dagger(u)
        idx = np.unravel_index(np.argmax(np.abs(k)), k.shape)
        if abs(k[idx]) == 0:
            out.append(0.0)
            continue
        phi = float(np.angle(ck[idx] / k[idx]))
        ok = np.max(np.abs(ck - np.exp(1j * phi) * k)) < tol
        out.append(phi if ok else None)
    return out


def is_strongly_symmetric_channel(ch: KrausChannel, u: np.ndarray, common_phase: bool = False) -> bool:
    """Per-Kraus covariance: every Kraus op satisfies ``U K U^† = e^{i phi_K} K``.

    Covariance alone keeps a weakly symmetric state weakly symmetric. Charged
    Kraus ops (``phi_K`` differing between ops, e.g. Z dephasing under ``prod X``)
    move weight between charge sectors, so a strongly symmetric input stays
    strongly symmetric only when all phases agree; ``common_phase=True``
    demands that.
    """
    phases = kraus_phases(ch, u)
    if any(phi is None for phi in phases):
        return False
    if not common_phase:
        return True
    z = np.exp(1j * np.asarray(phases))
    return bool(np.max(np.abs(z - z[0])) < 1e-8)
