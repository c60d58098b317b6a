"""SWSSB diagnostics built on the correlators.

Bounds between the Wightman and fidelity correlators, susceptibilities, the
response of a perturbed TFD, the entropy response of the generalized
correlator, and thermal-ensemble scans.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

from . import correlators as cr
from . import models
from . import operators as ops
from .rng import stream
from .states import (BlockEnsemble, TFDState, as_density, block_ensemble_state, charge_operator,
                     random_density_matrix, tfd, thermal_state, tilde, z2_generator)

BOUND_SLACK = 1e-10
MAX_DOUBLED_QUBITS = 6


class ResourceLimitError(ValueError):
    pass


# ---------------------------------------------------------------- bounds


class BoundsReport(NamedTuple):
    cw: float
    fidelity: float
    bound1_ok: bool
    bound2_ok: bool
    op_norm: float

    @property
    def slack1(self) -> float:
        """``F ||O||^2 - C^W``; non-negative when the first bound holds."""
        return self.fidelity * self.op_norm**2 - self.cw

    @property
    def slack2(self) -> float:
        """``sqrt(C^W) - F``; non-negative when the second bound holds."""
        return float(np.sqrt(max(self.cw, 0.0))) - self.fidelity


def verify_bounds(rho, o_i, o_j) -> BoundsReport:
    cw = cr.wightman(rho, o_i, o_j)
    f = cr.fidelity_correlator(rho, o_i, o_j)
    norm = max(ops.schatten_norm(o_i, np.inf), ops.schatten_norm(o_j, np.inf))
    ok1 = cw <= f * norm**2 + BOUND_SLACK
    ok2 = f <= np.sqrt(max(cw, 0.0)) + BOUND_SLACK
    return BoundsReport(cw, f, bool(ok1), bool(ok2), norm)


@dataclass
class FuzzCase:
    n_qubits: int
    rank: int
    sites: tuple
    paulis: str
    report: BoundsReport


def bounds_fuzz(n_cases: int, seed: int, sizes: Sequence[int] = (2, 3, 4)) -> list[FuzzCase]:
    """Random states of every rank with random Pauli pairs on distinct sites."""
    cases = []
    for k in range(n_cases):
        rng = stream(seed, 101, k)
        n = int(sizes[k % len(sizes)])
        rank = int(rng.integers(1, 2**n + 1))
        rho = random_density_matrix(n, rank, int(rng.integers(2**31)))
        i, j = (int(s) for s in rng.choice(n, 2, replace=False))
        paulis = "".join(rng.choice(list("XYZ"), 2))
        o_i = cr.site_operator(paulis[0], i, n)
        o_j = cr.site_operator(paulis[1], j, n)
        cases.append(FuzzCase(n, rank, (i, j), paulis, verify_bounds(rho, o_i, o_j)))
    return cases


# ---------------------------------------------------------------- susceptibilities


def chi_w_terms(rho, o_local, i: int) -> np.ndarray:
    """``C^W(i, j)`` for every ``j``; the ``j = i`` slot holds ``tr(sqrt(rho) O O^† sqrt(rho) O^† O)`` (1 for unitary O)."""
    rho = as_density(rho)
    n = rho.n_qubits
    o_i = cr.site_operator(o_local, i, n)
    terms = np.empty(n)
    for j in range(n):
        if j == i:
            s = rho.sqrt
            a = o_i @ ops.dagger(o_i)
            terms[j] = cr._real(cr._trace_prod(s @ a, s @ ops.dagger(o_i) @ o_i), "self term")
        else:
            terms[j] = cr.wightman(rho, o_i, cr.site_operator(o_local, j, n))
    return terms


def chi_w(rho, o_local, i: int) -> float:
    """Wightman susceptibility ``sum_j C^W(i, j)`` including the self-pair."""
    return float(np.sum(chi_w_terms(rho, o_local, i)))


class Response(NamedTuple):
    measured: float
    predicted: float
    baseline: float


def perturbed_tfd_state(rho, o_local, eps: float) -> np.ndarray:
    """Normalized ``exp((eps/2) sum_j O_j Õ_j)|TFD>`` for Hermitian unitary ``O``.

    For self-adjoint ``O`` the two hopping terms ``O^† Õ`` and ``O Õ^†``
    are the same operator; it enters once. Each ``O_j Õ_j`` squares to the
    identity and they commute, so the exponential factorizes into
    ``cosh(eps/2) + sinh(eps/2) O_j Õ_j`` per site.
    """
    rho = as_density(rho)
    n = rho.n_qubits
    if n > MAX_DOUBLED_QUBITS:
        raise ResourceLimitError(f"doubled space of {2 * n} qubits exceeds the {2 * MAX_DOUBLED_QUBITS}-qubit limit")
    o_local = cr.LOCAL_OPS[o_local.upper()] if isinstance(o_local, str) else np.asarray(o_local, dtype=complex)
    if not (ops.is_hermitian(o_local) and ops.is_unitary(o_local)):
        raise ValueError("the perturbation needs a Hermitian unitary charged operator")
    state = tfd(rho)
    psi = state.amplitudes
    c, s = np.cosh(eps / 2), np.sinh(eps / 2)
    for j in range(n):
        o_j = cr.site_operator(o_local, j, n)
        psi = c * psi + s * TFDState(psi, n).apply(o_j, tilde(o_j))
    return psi / np.linalg.norm(psi)


def perturbed_tfd_response(rho, o_local, eps: float, i: int = 0) -> Response:
    """Measured ``<O_i Õ_i>`` on the perturbed TFD versus ``eps * chi^W``."""
    rho = as_density(rho)
    n = rho.n_qubits
    psi = perturbed_tfd_state(rho, o_local, eps)
    o_i = cr.site_operator(o_local, i, n)
    measured = complex(np.vdot(psi, TFDState(psi, n).apply(o_i, tilde(o_i))))
    baseline = cr.wightman_single(rho, o_i)
    return Response(cr._real(measured, "perturbed response"), eps * chi_w(rho, o_local, i), baseline)


@dataclass
class SpinGlassReport:
    chi_sg: float
    chi_sg_direct: float
    cw_block: np.ndarray
    cw_direct: np.ndarray
    ea_block: np.ndarray
    fidelity_direct: np.ndarray


def spin_glass_susceptibility(ens: BlockEnsemble, o_local="Z", tol: float = 1e-10) -> SpinGlassReport:
    """``chi_SG = N^{-1} sum_ij C^W(i, j)`` from the block formula and from direct evaluation.

    Requires ``<psi_b|O_i O_j^†|psi_a> = 0`` for ``a != b`` for every pair.
    """
    n = ens.n_qubits
    rho = block_ensemble_state(ens)
    lam = ens.weights
    vecs = ens.states
    site_ops = [cr.site_operator(o_local, i, n) for i in range(n)]
    cw_b = np.zeros((n, n))
    ea_b = np.zeros((n, n))
    cw_d = np.zeros((n, n))
    f_d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            a = site_ops[i] @ ops.dagger(site_ops[j])
            m = vecs.conj().T @ a @ vecs
            off = m - np.diag(np.diag(m))
            if off.size and np.max(np.abs(off)) > tol:
                raise ValueError(f"charged operator couples ensemble states at pair {(i, j)}")
            d = np.abs(np.diag(m))
            cw_b[i, j] = lam @ d**2
            ea_b[i, j] = lam @ d
            if i == j:
                s = rho.sqrt
                cw_d[i, j] = cr._real(cr._trace_prod(s @ a, s @ ops.dagger(a)), "self term")
                f_d[i, j] = ops.schatten_norm(s @ a @ s, 1)
            else:
                cw_d[i, j] = cr.wightman(rho, site_ops[i], site_ops[j])
                f_d[i, j] = cr.fidelity_correlator(rho, site_ops[i], site_ops[j])
    return SpinGlassReport(cw_b.sum() / n, cw_d.sum() / n, cw_b, cw_d, ea_b, f_d)


# ---------------------------------------------------------------- entropy response


class EntropyResponse(NamedTuple):
    slope_fd: float
    slope_modular: float


def entropy_response(rho, o_i, o_j, alpha: float = 1e-4, min_eig: float = 1e-12) -> EntropyResponse:
    """Small-alpha slope of ``C^W_alpha`` against ``tr[H_M delta rho]``.

    ``H_M = -ln rho`` and ``delta rho = A rho A^† - rho`` with ``A = O_i O_j^†``.
    A rank-deficient state has no modular Hamiltonian and raises
    :class:`~swssb.operators.RankDeficientError`.
    """
    rho = as_density(rho)
    lo = rho.eigen.eigenvalues[0]
    if lo <= min_eig:
        raise ops.RankDeficientError(
            f"min eigenvalue {lo:.3g} <= {min_eig:g}: modular Hamiltonian undefined (divergent response)"
        )
    a = np.asarray(o_i) @ ops.dagger(np.asarray(o_j))
    if not ops.is_unitary(a):
        raise ValueError("O_i O_j^† must be unitary")
    m = np.asarray(rho.matrix)
    h_mod = -ops.matrix_log(m, eig=rho.eigen)
    delta = a @ m @ ops.dagger(a) - m
    slope_mod = cr._real(cr._trace_prod(h_mod, delta), "tr[H_M delta rho]")
    c_alpha = cr.cw_alpha(rho, o_i, o_j, alpha)
    return EntropyResponse((1.0 - c_alpha) / alpha, slope_mod)


# ---------------------------------------------------------------- scans


@dataclass
class ScanResult:
    parameter: str
    grid: np.ndarray
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.size == 0 or np.any(np.diff(self.grid) <= 0):
            raise ValueError("scan grid must be non-empty and strictly increasing")

    def validate(self):
        seen = {row[self.parameter] for row in self.rows}
        missing = [g for g in self.grid if g not in seen]
        if missing:
            raise ValueError(f"no rows for grid points {missing}")

    def column(self, name: str, **where) -> np.ndarray:
        rows = [r for r in self.rows if all(r[k] == v for k, v in where.items())]
        return np.array([r[name] for r in rows])


def _match_mu(h, n, beta, target):
    f = lambda mu: models.mean_charge(h, n, beta, mu) - target
    lo, hi = -50.0, 50.0
    if f(lo) * f(hi) > 0:
        return 0.0
    return brentq(f, lo, hi, xtol=1e-12)


def thermal_factorization_report(h, beta: float, sector: np.ndarray, o_local, separations: Sequence[int],
                                 i: int = 0, symmetry: str = "U1", gap: float | None = None) -> list[dict]:
    """Canonical vs grand canonical ``C^W(i, i+r)`` and the factorized estimate.

    For U(1) the grand canonical chemical potential is tuned so its mean charge
    equals the sector charge; for Z2 the grand canonical ensemble is the plain
    Gibbs state. Only positivity of the canonical value is enforced.
    """
    h = ops.as_operator(h)
    n = ops.n_qubits_of(h)
    rho_c = thermal_state(h, beta, sector)
    if symmetry == "U1":
        q = charge_operator(n)
        target = float(np.trace(sector @ q).real / np.trace(sector).real)
        mu = _match_mu(h, n, beta, target) if beta > 0 else 0.0
        rho_gc = thermal_state(h - mu * q, beta)
    else:
        mu = 0.0
        rho_gc = thermal_state(h, beta)
    o_i = cr.site_operator(o_local, i, n)
    single_i = cr.wightman_single(rho_gc, o_i)
    rows = []
    for r in separations:
        j = (i + r) % n
        o_j = cr.site_operator(o_local, j, n)
        cw_c = cr.wightman(rho_c, o_i, o_j)
        if not cw_c > 0:
            raise ArithmeticError(f"canonical C^W({i},{j}) = {cw_c:.3g} is not positive at beta={beta}")
        single_j = cr.wightman_single(rho_gc, ops.dagger(o_j))
        rows.append({
            "beta": beta,
            "separation": int(r),
            "i": i,
            "j": j,
            "mu": mu,
            "cw_canonical": cw_c,
            "cw_grand_canonical": cr.wightman(rho_gc, o_i, o_j),
            "cw_product": single_i * single_j,
            "gap_prediction": float(np.exp(-beta * gap)) if gap is not None else float("nan"),
        })
    return rows


def thermal_scan(h, betas: Sequence[float], sector: np.ndarray, o_local, separations: Sequence[int],
                 symmetry: str = "U1", charge: int | None = None) -> ScanResult:
    """Thermal factorization table over a beta grid, with the charge gap from exact spectra."""
    h = ops.as_operator(h)
    n = ops.n_qubits_of(h)
    if symmetry == "U1":
        if charge is None:
            raise ValueError("U(1) scans need the sector charge")
        gap = models.charge_gap(h, n, charge)
    else:
        even = bool(np.allclose(sector @ z2_generator(n), sector))
        gap = models.parity_gap(h, n, even)
    scan = ScanResult("beta", np.asarray(betas, dtype=float), metadata={"gap": gap, "n_qubits": n,
                                                                         "symmetry": symmetry})
    for b in scan.grid:
        scan.rows.extend(thermal_factorization_report(h, float(b), sector, o_local, separations,
                                                      symmetry=symmetry, gap=gap))
    scan.validate()
    return scan


def log_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``x``."""
    return float(np.polyfit(np.asarray(x, float), np.log(np.asarray(y, float)), 1)[0])
