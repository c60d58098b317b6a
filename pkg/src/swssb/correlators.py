"""Correlators of charged operators, evaluated exactly from a density matrix.

All functions take full-space operators ``o_i`` and ``o_j`` (see
:func:`site_operator`) supported on disjoint sites, and use the pair
combination ``A = O_i O_j^†`` together with ``B = O_i^† O_j``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import operators as ops
from .states import as_density, tfd, tilde

IMAG_TOL = 1e-10


def site_operator(local: np.ndarray | str, site: int, n_qubits: int) -> np.ndarray:
    """Single-site operator embedded at ``site``; strings name Paulis or ``"S+"``/``"S-"``."""
    if isinstance(local, str):
        local = LOCAL_OPS[local.upper()]
    return ops.embed(local, [site], n_qubits)


LOCAL_OPS = {"X": ops.PAULI["X"], "Y": ops.PAULI["Y"], "Z": ops.PAULI["Z"],
             "S+": ops.SIGMA_PLUS, "S-": ops.SIGMA_MINUS}


def _pair(rho, o_i, o_j, check: bool = True):
    rho = as_density(rho)
    o_i = np.asarray(o_i, dtype=complex)
    o_j = np.asarray(o_j, dtype=complex)
    if o_i.shape != (rho.dim, rho.dim) or o_j.shape != (rho.dim, rho.dim):
        raise ValueError(
            f"operator shapes {o_i.shape}, {o_j.shape} do not match state dimension {rho.dim}"
        )
    oj_dag = ops.dagger(o_j)
    if check and np.max(np.abs(o_i @ oj_dag - oj_dag @ o_i)) > 1e-12:
        raise ValueError("O_i and O_j^† must commute (operators on disjoint sites)")
    return rho, o_i @ oj_dag, ops.dagger(o_i) @ o_j


def _trace_prod(a: np.ndarray, b: np.ndarray) -> complex:
    """``tr(a @ b)`` without forming the product."""
    return complex(np.einsum("ij,ji->", a, b))


def _real(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value.real)):
        raise ArithmeticError(f"{what} has imaginary residue {value.imag:.3g}")
    return float(value.real)


def two_point(rho, o_i, o_j) -> complex:
    """``tr[rho O_i O_j^†]``."""
    rho, a, _ = _pair(rho, o_i, o_j)
    return _trace_prod(np.asarray(rho.matrix), a)


def wightman(rho, o_i, o_j) -> float:
    """``tr(sqrt(rho) O_i O_j^† sqrt(rho) O_i^† O_j)``, non-negative."""
    rho, a, b = _pair(rho, o_i, o_j)
    s = rho.sqrt
    return _real(_trace_prod(s @ a, s @ b), "Wightman correlator")


def wightman_tfd(rho, o_i, o_j) -> float:
    """Same quantity as :func:`wightman`, evaluated as ``<O_i Õ_i O_j^† Õ_j^†>`` on the TFD."""
    rho, a, _ = _pair(rho, o_i, o_j)
    aux = tilde(o_i) @ ops.dagger(tilde(o_j))
    return _real(tfd(rho).expectation(a, aux), "TFD Wightman correlator")


def fidelity_correlator(rho, o_i, o_j) -> float:
    """Trace norm ``|| sqrt(rho) O_i O_j^† sqrt(rho) ||_1``."""
    rho, a, _ = _pair(rho, o_i, o_j)
    s = rho.sqrt
    return ops.schatten_norm(s @ a @ s, 1)


def fidelity_direct(rho, o_i, o_j) -> float:
    """``tr sqrt(sqrt(rho) sigma sqrt(rho))`` with ``sigma = A rho A^†``.

    Independent route to :func:`fidelity_correlator` (via a PSD square root
    instead of singular values).
    """
    rho, a, _ = _pair(rho, o_i, o_j)
    s = rho.sqrt
    sigma = a @ np.asarray(rho.matrix) @ ops.dagger(a)
    inner = s @ sigma @ s
    w = np.linalg.eigvalsh((inner + ops.dagger(inner)) / 2)
    return float(np.sum(np.sqrt(np.clip(w, 0, None))))


def f_alpha(rho, o_i, o_j, alpha: float) -> float:
    """Schatten-(1/alpha) norm of ``rho^{alpha/2} O_i O_j^† rho^{alpha/2}``, alpha in (0, 1]."""
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    rho, a, _ = _pair(rho, o_i, o_j)
    r = rho.power(alpha / 2)
    return ops.schatten_norm(r @ a @ r, 1 / alpha)


def cw_alpha(rho, o_i, o_j, alpha: float) -> float:
    """``tr[rho^alpha O_i O_j^† rho^(1-alpha) O_i^† O_j]``, alpha in (0, 1)."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    rho, a, b = _pair(rho, o_i, o_j)
    return _real(_trace_prod(rho.power(alpha) @ a, rho.power(1 - alpha) @ b), "C^W_alpha")


def renyi2_correlator(rho, o_i, o_j) -> float:
    """``tr[rho O_i O_j^† rho O_i^† O_j] / tr[rho^2]``."""
    rho, a, b = _pair(rho, o_i, o_j)
    m = np.asarray(rho.matrix)
    purity = _trace_prod(m, m).real
    if purity <= 1e-14:
        raise ZeroDivisionError("vanishing purity")
    return _real(_trace_prod(m @ a, m @ b), "Renyi-2 numerator") / purity


def wightman_single(rho, o: np.ndarray) -> float:
    """``tr(sqrt(rho) O sqrt(rho) O^†)``: the Green's function at half the imaginary time."""
    rho = as_density(rho)
    o = np.asarray(o, dtype=complex)
    if o.shape != (rho.dim, rho.dim):
        raise ValueError("operator does not match state dimension")
    s = rho.sqrt
    return _real(_trace_prod(s @ o, s @ ops.dagger(o)), "single-operator Wightman function")


def wightman_single_tfd(rho, o: np.ndarray) -> float:
    """``<O Õ>`` on the TFD, equal to :func:`wightman_single`."""
    rho = as_density(rho)
    return _real(tfd(rho).expectation(np.asarray(o), tilde(o)), "TFD single Wightman")


def replica_wightman(rho, o_i, o_j, n: float, normalized: bool = False) -> float:
    """``tr[rho^n A rho^n B]``, optionally divided by ``tr[rho^{2n}]``; ``n = 1/2`` is C^W."""
    if not n > 0:
        raise ValueError(f"n must be positive, got {n}")
    rho, a, b = _pair(rho, o_i, o_j)
    r = rho.power(n)
    value = _real(_trace_prod(r @ a, r @ b), "replica correlator")
    if normalized:
        value /= float(np.sum(np.clip(rho.eigen.eigenvalues, 0, None) ** (2 * n)))
    return value


# ---------------------------------------------------------------- reports and batches

KINDS = {
    "two_point": two_point,
    "wightman": wightman,
    "fidelity": fidelity_correlator,
    "f_alpha": f_alpha,
    "cw_alpha": cw_alpha,
    "renyi2": renyi2_correlator,
    "replica_n": replica_wightman,
}


@dataclass
class CorrelatorReport:
    value: float | complex
    kind: str
    params: dict = field(default_factory=dict)
    sites: tuple = ()
    operator: str = ""


def evaluate(kind: str, rho, o_i, o_j, *, sites=(), operator: str = "", **params) -> CorrelatorReport:
    if kind not in KINDS:
        raise ValueError(f"unknown correlator kind {kind!r}")
    value = KINDS[kind](rho, o_i, o_j, **params)
    return CorrelatorReport(value, kind, dict(params), tuple(sites), operator)


def correlation_table(rho, make_op: Callable[[int], np.ndarray], pairs: Sequence[tuple[int, int]],
                      kind: str = "wightman", threads: int = 1, **params) -> np.ndarray:
    """Evaluate one correlator kind on many site pairs.

    Each pair writes its own output slot, so the result does not depend on the
    thread count.
    """
    rho = as_density(rho)
    _ = rho.sqrt  # populate caches before threads share the object
    fn = KINDS[kind]
    out = np.empty(len(pairs), dtype=complex if kind == "two_point" else float)

    def work(k):
        i, j = pairs[k]
        out[k] = fn(rho, make_op(i), make_op(j), **params)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(work, range(len(pairs))))
    else:
        for k in range(len(pairs)):
            work(k)
    return out
