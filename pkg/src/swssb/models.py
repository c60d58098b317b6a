"""Small spin-chain Hamiltonians and their charge-sector spectra."""

from __future__ import annotations

import numpy as np

from . import operators as ops
from .states import charge_operator, charge_projector, parity_projector


def _bonds(n: int, periodic: bool):
    last = n if periodic and n > 2 else n - 1
    return [(i, (i + 1) % n) for i in range(last)]


def xx_chain(n: int, hopping: float = 1.0, staggered: float = 0.0, periodic: bool = True) -> np.ndarray:
    """``t sum (S+_i S-_{i+1} + h.c.) + (m/2) sum (-1)^i Z_i``.

    Conserves ``sum Z``; the staggered field ``m`` opens a charge gap at half filling.
    """
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for i, j in _bonds(n, periodic):
        hop = ops.embed(np.kron(ops.SIGMA_MINUS, ops.SIGMA_PLUS), [i, j], n)
        h += hopping * (hop + ops.dagger(hop))
    for i in range(n):
        h += 0.5 * staggered * (-1) ** i * ops.pauli_string(n, {i: "Z"})
    return h


def classical_ising_chain(n: int, coupling: float = 1.0, periodic: bool = True) -> np.ndarray:
    """``-J sum Z_i Z_{i+1}``; commutes with ``prod X``."""
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for i, j in _bonds(n, periodic):
        h -= coupling * ops.pauli_string(n, {i: "Z", j: "Z"})
    return h


def sector_ground_energy(h: np.ndarray, projector: np.ndarray) -> float:
    w, v = np.linalg.eigh(projector)
    basis = v[:, w > 0.5]
    if basis.shape[1] == 0:
        raise ValueError("empty sector")
    return float(np.linalg.eigvalsh(basis.conj().T @ h @ basis)[0])


def charge_gap(h: np.ndarray, n: int, charge: int) -> float:
    """U(1) charge gap ``[E0(Q+1) + E0(Q-1) - 2 E0(Q)] / 2``.

    Half the cost of a particle-hole pair, independent of any chemical potential.
    """
    e = {q: sector_ground_energy(h, charge_projector(n, q)) for q in (charge - 1, charge, charge + 1)}
    return (e[charge + 1] + e[charge - 1] - 2 * e[charge]) / 2


def parity_gap(h: np.ndarray, n: int, even: bool = True) -> float:
    """Z2 gap ``E0(other parity) - E0(this parity)``."""
    e_in = sector_ground_energy(h, parity_projector(n, even))
    e_out = sector_ground_energy(h, parity_projector(n, not even))
    return e_out - e_in


def mean_charge(h: np.ndarray, n: int, beta: float, mu: float) -> float:
    q = np.diag(charge_operator(n)).real
    w, v = np.linalg.eigh(h - mu * np.diag(q))
    b = np.exp(-beta * (w - w[0]))
    occ = (np.abs(v) ** 2).T @ q
    return float(b @ occ / b.sum())
