"""Random-bond Ising model on the square lattice.

Single-spin-flip Metropolis along the Nishimori line, exhaustive small-lattice
oracles, and the comparison between the exact decohered-Ising Wightman
correlator and RBIM observables.

Two temperature conventions tie ``beta`` to the bond-flip probability ``p``:

* ``"tanh"``: ``tanh(beta) = p / (1 - p)``
* ``"exp"``:  ``exp(-2 beta) = p / (1 - p)`` (the usual Nishimori line)
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from .channels import decohered_ising_state
from .correlators import site_operator, wightman
from .rng import stream

CONVENTIONS = ("tanh", "exp")
MAX_ENUM_SPINS = 16
MAX_ENUM_BONDS = 12
MC_DISORDER_SAMPLES = 10_000


class InsufficientStatisticsError(RuntimeError):
    pass


# ---------------------------------------------------------------- lattice and disorder


@dataclass(frozen=True)
class LatticeSpec:
    """``L x L`` square lattice; site ``(x, y)`` has index ``y * L + x``."""

    L: int
    periodic: bool = True
    bonds: tuple = field(init=False)

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("need L >= 2")
        L = self.L
        bonds = []
        for y in range(L):
            for x in range(L):
                s = y * L + x
                if self.periodic or x + 1 < L:
                    bonds.append((s, y * L + (x + 1) % L))
                if self.periodic or y + 1 < L:
                    bonds.append((s, ((y + 1) % L) * L + x))
        object.__setattr__(self, "bonds", tuple(bonds))

    @property
    def n_sites(self) -> int:
        return self.L * self.L

    @property
    def n_bonds(self) -> int:
        return len(self.bonds)

    def site(self, x: int, y: int) -> int:
        return (y % self.L) * self.L + (x % self.L)

    def neighbor_table(self):
        """Per site: neighbor indices and bond indices, padded with -1 (open edges)."""
        nbr = -np.ones((self.n_sites, 4), dtype=np.int64)
        bid = -np.ones((self.n_sites, 4), dtype=np.int64)
        fill = np.zeros(self.n_sites, dtype=np.int64)
        for b, (i, j) in enumerate(self.bonds):
            for a, c in ((i, j), (j, i)):
                nbr[a, fill[a]] = c
                bid[a, fill[a]] = b
                fill[a] += 1
        return nbr, bid

    def far_site(self, i: int = 0) -> int:
        """Site at maximal separation ``(L//2, L//2)`` from ``i``."""
        x, y = i % self.L, i // self.L
        return self.site(x + self.L // 2, y + self.L // 2)

    def path(self, i: int, j: int) -> list[int]:
        """Bond indices of a lattice path from ``i`` to ``j`` (x first, then y)."""
        index = {b: k for k, b in enumerate(self.bonds)}
        out = []
        L = self.L
        x, y = i % L, i // L
        tx, ty = j % L, j // L

        def step(a, b):
            k = index.get((a, b), index.get((b, a)))
            out.append(k)

        while x != tx:
            nx = x + 1 if (tx > x) else x - 1
            step(self.site(x, y), self.site(nx, y))
            x = nx
        while y != ty:
            ny = y + 1 if (ty > y) else y - 1
            step(self.site(x, y), self.site(x, ny))
            y = ny
        return out


@dataclass(frozen=True)
class DisorderSample:
    couplings: np.ndarray
    p: float
    seed: int
    index: int = 0

    @property
    def flip_fraction(self) -> float:
        return float(np.mean(self.couplings < 0))


def sample_disorder(lat: LatticeSpec, p: float, seed: int, index: int = 0) -> DisorderSample:
    """i.i.d. antiferromagnetic bonds with probability ``p``; stream keyed by (seed, index)."""
    if not 0 <= p <= 0.5:
        raise ValueError(f"p must lie in [0, 1/2], got {p}")
    rng = stream(seed, 7, index)
    j = np.where(rng.random(lat.n_bonds) < p, -1, 1).astype(np.int8)
    return DisorderSample(j, p, seed, index)


def nishimori_beta(p: float, convention: str = "tanh") -> float:
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    if not 0 <= p < 0.5:
        raise ValueError(f"p must lie in [0, 1/2), got {p}")
    x = p / (1 - p)
    if convention == "tanh":
        return math.atanh(x)
    return math.inf if p == 0 else 0.5 * math.log(1 / x)


def bond_energy(lat: LatticeSpec, spins: np.ndarray, couplings: np.ndarray) -> float:
    b = np.asarray(lat.bonds)
    return float(-np.sum(couplings * spins[b[:, 0]] * spins[b[:, 1]]))


# ---------------------------------------------------------------- Metropolis


def _acceptance_table(beta: float, z: int) -> np.ndarray:
    """``min(1, exp(-beta dE))`` indexed by ``sigma * h + z`` with ``dE = 2 sigma h``.

    At ``beta = 0`` every move would be accepted and sequential sweeps would
    just flip the whole lattice each sweep; accepting with probability 1/2
    keeps detailed balance for the uniform target and makes the chain mix.
    """
    sh = np.arange(-z, z + 1)
    if beta == 0:
        return np.full(sh.size, 0.5)
    de = 2.0 * sh
    with np.errstate(over="ignore", invalid="ignore"):
        acc = np.where(de <= 0, 1.0, np.exp(-beta * de) if np.isfinite(beta) else 0.0)
    return acc.astype(np.float64)


@numba.njit(nogil=True, cache=True)
def _metropolis_kernel(spins, nbr, jb, acc, z, rng, n_sweeps, n_therm,
                       partner, pair_i, pair_j, bin_size, bond_i, bond_j, bond_j_val, hist):
    n_rep, n_sites = spins.shape
    n_dist = partner.shape[0]
    n_pairs = pair_i.shape[0]
    n_meas = n_sweeps - n_therm
    n_bins = n_meas // bin_size
    corr_site = np.zeros((n_rep, n_dist, 2, n_sites))
    pair_acc = np.zeros((n_rep, n_pairs))
    bins = np.zeros((n_rep, n_dist, max(n_bins, 1)))
    e_min = np.inf
    for sweep in range(n_sweeps):
        for r in range(n_rep):
            for s in range(n_sites):
                h = 0
                for k in range(4):
                    t = nbr[s, k]
                    if t >= 0:
                        h += jb[s, k] * spins[r, t]
                sh = spins[r, s] * h
                a = acc[sh + z]
                if a >= 1.0 or rng.random() < a:
                    spins[r, s] = -spins[r, s]
        if sweep < n_therm:
            continue
        m = sweep - n_therm
        b = m // bin_size
        for r in range(n_rep):
            e = 0.0
            for k in range(bond_i.shape[0]):
                e -= bond_j_val[k] * spins[r, bond_i[k]] * spins[r, bond_j[k]]
            if e < e_min:
                e_min = e
            if hist.shape[0] > 0:
                code = 0
                for s in range(n_sites):
                    if spins[r, s] < 0:
                        code += 1 << s
                hist[code] += 1
            for d in range(n_dist):
                tot = 0.0
                for ax in range(2):
                    for s in range(n_sites):
                        v = spins[r, s] * spins[r, partner[d, ax, s]]
                        corr_site[r, d, ax, s] += v
                        tot += v
                if b < n_bins:
                    bins[r, d, b] += tot / (2.0 * n_sites)
            for q in range(n_pairs):
                pair_acc[r, q] += spins[r, pair_i[q]] * spins[r, pair_j[q]]
    return corr_site, pair_acc, bins, e_min


@dataclass
class MCObservables:
    """Thermal averages for one disorder sample (two independent replicas).

    ``g1[d]``/``g2[d]``: lattice averages of ``<s_x s_{x+r}>`` and
    ``<s_x s_{x+r}>_a <s_x s_{x+r}>_b`` at distance ``distances[d]`` along
    both axes. ``pair_corr``/``pair_corr_sq`` are the same for explicit pairs.
    """

    distances: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    g1_err: np.ndarray
    pairs: np.ndarray
    pair_corr: np.ndarray
    pair_corr_sq: np.ndarray
    min_energy: float
    sweeps: int
    thermalization: int
    histogram: np.ndarray | None = None


def _partner_table(lat: LatticeSpec, distances) -> np.ndarray:
    L = lat.L
    out = np.zeros((len(distances), 2, lat.n_sites), dtype=np.int64)
    for d, r in enumerate(distances):
        for s in range(lat.n_sites):
            x, y = s % L, s // L
            out[d, 0, s] = lat.site(x + r, y)
            out[d, 1, s] = lat.site(x, y + r)
    return out


def metropolis_run(lat: LatticeSpec, dis: DisorderSample, beta: float, sweeps: int, thermalization: int,
                   seed: int, distances: Sequence[int] = (), pairs: Sequence[tuple[int, int]] = (),
                   replicas: int = 2, start: str = "up", bin_size: int | None = None,
                   histogram: bool = False) -> MCObservables:
    """Sequential-sweep Metropolis for ``H = -sum_b J_b s_i s_j`` at inverse temperature ``beta``.

    ``sweeps`` counts all sweeps; the first ``thermalization`` are discarded.
    Translation-averaged distances need a periodic lattice. ``histogram``
    counts visited configurations (index as in :func:`enumerate_marginals`).
    """
    if not sweeps > thermalization > 0:
        raise ValueError("need sweeps > thermalization > 0")
    if distances and not lat.periodic:
        raise ValueError("translation-averaged correlations need a periodic lattice")
    nbr, bid = lat.neighbor_table()
    jb = np.where(bid >= 0, dis.couplings[np.maximum(bid, 0)], 0).astype(np.int64)
    z = 4
    acc = _acceptance_table(beta, z)
    rng = stream(seed, 11, dis.index)
    if start == "up":
        spins = np.ones((replicas, lat.n_sites), dtype=np.int64)
    else:
        spins = np.where(rng.random((replicas, lat.n_sites)) < 0.5, -1, 1).astype(np.int64)
    distances = np.asarray(distances, dtype=np.int64)
    partner = _partner_table(lat, distances) if distances.size else np.zeros((0, 2, lat.n_sites), np.int64)
    pairs_arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    n_meas = sweeps - thermalization
    if bin_size is None:
        bin_size = max(1, n_meas // 50)
    b = np.asarray(lat.bonds, dtype=np.int64)
    if histogram and lat.n_sites > MAX_ENUM_SPINS:
        raise ValueError("configuration histogram limited to 16 spins")
    hist = np.zeros(1 << lat.n_sites if histogram else 0, dtype=np.int64)
    corr_site, pair_acc, bins, e_min = _metropolis_kernel(
        spins, nbr, jb, acc, z, rng, sweeps, thermalization, partner,
        pairs_arr[:, 0].copy(), pairs_arr[:, 1].copy(), bin_size,
        b[:, 0].copy(), b[:, 1].copy(), dis.couplings.astype(np.float64), hist)
    site_mean = corr_site / n_meas  # (rep, dist, axis, site)
    g1 = site_mean.mean(axis=(0, 2, 3)) if distances.size else np.zeros(0)
    if replicas >= 2 and distances.size:
        g2 = (site_mean[0] * site_mean[1]).mean(axis=(1, 2))
    else:
        g2 = (site_mean[0] ** 2).mean(axis=(1, 2)) if distances.size else np.zeros(0)
    if distances.size and bins.shape[2] > 1:
        nb = n_meas // bin_size
        per_bin = bins[:, :, :nb] / bin_size
        err = per_bin.std(axis=2, ddof=1) / np.sqrt(nb)
        g1_err = np.sqrt((err**2).sum(axis=0)) / replicas
    else:
        g1_err = np.zeros(distances.size)
    pm = pair_acc / n_meas
    pair_sq = pm[0] * pm[1] if replicas >= 2 else pm[0] ** 2
    return MCObservables(distances, g1, g2, g1_err, pairs_arr, pm.mean(axis=0), pair_sq,
                         float(e_min), sweeps, thermalization, hist if histogram else None)


# ---------------------------------------------------------------- exact enumeration


def _spin_table(n: int) -> np.ndarray:
    idx = np.arange(1 << n)[:, None]
    return (1 - 2 * ((idx >> np.arange(n)) & 1)).astype(np.int8)


def _disorder_set(lat: LatticeSpec, p: float, seed: int, n_samples: int):
    """All coupling configurations with exact weights, or a Monte Carlo sample."""
    nb = lat.n_bonds
    if nb <= MAX_ENUM_BONDS:
        flips = _spin_table(nb)  # +1 / -1 rows = J configurations
        k = (flips < 0).sum(axis=1)
        w = p**k * (1 - p) ** (nb - k)
        return flips.astype(np.float64), w, True
    rng = stream(seed, 13)
    j = np.where(rng.random((n_samples, nb)) < p, -1.0, 1.0)
    return j, np.full(n_samples, 1.0 / n_samples), False


def _boltzmann(e: np.ndarray, beta: float) -> np.ndarray:
    """Rows of unnormalized weights ``exp(-beta E)`` for energies ``e`` (configs x samples)."""
    e0 = e.min(axis=0, keepdims=True)
    if math.isinf(beta):
        return (e == e0).astype(float)
    return np.exp(-beta * (e - e0))


def thermal_correlations(lat: LatticeSpec, couplings: np.ndarray, beta: float,
                         pairs: Sequence[tuple[int, int]]) -> np.ndarray:
    """Exact ``<s_i s_j>`` for each coupling row and pair: shape (samples, pairs)."""
    n = lat.n_sites
    if n > MAX_ENUM_SPINS:
        raise ValueError(f"{n} spins is too many for exhaustive enumeration")
    s = _spin_table(n).astype(np.float64)
    b = np.asarray(lat.bonds)
    bond_prod = s[:, b[:, 0]] * s[:, b[:, 1]]
    j = np.atleast_2d(couplings).astype(np.float64)
    w = _boltzmann(-(bond_prod @ j.T), beta)
    z = w.sum(axis=0)
    out = np.empty((j.shape[0], len(pairs)))
    for k, (a, c) in enumerate(pairs):
        out[:, k] = (s[:, a] * s[:, c]) @ w / z
    return out


def exact_rbim_enumeration(lat: LatticeSpec, p: float, beta: float, observable: str = "m1",
                           pair: tuple[int, int] | None = None, seed: int = 0,
                           n_samples: int = MC_DISORDER_SAMPLES) -> float:
    """Disorder average ``[<s_i s_j>]`` (m1) or ``[<s_i s_j>^2]`` (m2) with exact thermal averages.

    Disorder is enumerated exactly when the lattice has at most 12 bonds,
    weighted by ``prod_b p^[J_b=-1] (1-p)^[J_b=+1]``; otherwise averaged over
    ``n_samples`` random samples.
    """
    if observable not in ("m1", "m2"):
        raise ValueError("observable must be 'm1' or 'm2'")
    limit = 3 if lat.periodic else 4
    if lat.L > limit:
        raise ValueError(f"L={lat.L} too large for exact enumeration (max {limit})")
    pair = pair or (0, lat.far_site(0))
    j, w, _ = _disorder_set(lat, p, seed, n_samples)
    c = thermal_correlations(lat, j, beta, [pair])[:, 0]
    return float(w @ (c if observable == "m1" else c**2))


def _cycle_space(lat: LatticeSpec) -> np.ndarray:
    """All bond subsets with empty boundary, as a 0/1 matrix (subsets x bonds)."""
    nb = lat.n_bonds
    if nb > 20:
        raise ValueError("cycle-space enumeration limited to 20 bonds")
    b = np.asarray(lat.bonds)
    inc = np.zeros((lat.n_sites, nb), dtype=np.int64)
    for k, (i, j) in enumerate(b):
        inc[i, k] ^= 1
        inc[j, k] ^= 1
    subsets = ((np.arange(1 << nb)[:, None] >> np.arange(nb)) & 1)
    boundary = (subsets @ inc.T) % 2
    return subsets[boundary.sum(axis=1) == 0]


def defect_correlator(lat: LatticeSpec, p: float, beta: float, pair: tuple[int, int] | None = None) -> float:
    """Disorder average of ``sqrt(Z[J + defect] / Z[J])``.

    ``Z[J] = sum_c exp(beta sum_b J_b (-1)^{c_b})`` sums over closed bond
    subsets ``c`` (the RBIM on the dual lattice, all homology sectors), and the
    defect flips the couplings along a path from ``i`` to ``j``. This is a
    disorder-operator correlator rather than a spin correlator.
    """
    pair = pair or (0, lat.far_site(0))
    cyc = _cycle_space(lat).astype(np.float64)
    sign = 1.0 - 2.0 * cyc  # (cycles x bonds)
    j, w, exact = _disorder_set(lat, p, 0, MC_DISORDER_SAMPLES)
    if not exact:
        raise ValueError("defect correlator needs exhaustive disorder (<= 12 bonds)")
    gamma = np.zeros(lat.n_bonds)
    for k in lat.path(*pair):
        gamma[k] = 1
    j_def = j * (1 - 2 * gamma)
    if math.isinf(beta):
        raise ValueError("defect correlator needs finite beta")
    e = sign @ j.T
    e_def = sign @ j_def.T
    shift = np.maximum(e.max(axis=0), e_def.max(axis=0))
    z = np.exp(beta * (e - shift)).sum(axis=0)
    z_def = np.exp(beta * (e_def - shift)).sum(axis=0)
    return float(w @ np.sqrt(z_def / z))


# ---------------------------------------------------------------- replica mapping


@dataclass
class MappingReport:
    L: int
    periodic: bool
    p: float
    pair: tuple
    cw: float
    candidates: dict
    residuals: dict
    matches: list

    @property
    def spin_matches(self) -> list:
        return [m for m in self.matches if m[0] in ("m1", "m2")]


def replica_mapping_crosscheck(L: int, p: float, periodic: bool = True, pair: tuple[int, int] | None = None,
                               tol: float = 1e-8) -> MappingReport:
    """Compare the exact decohered-Ising ``C^W(i, j)`` with RBIM observables.

    Candidates: ``m1``, ``m2`` (spin correlators on the same lattice) and
    ``defect`` (see :func:`defect_correlator`), each under both temperature
    conventions.
    """
    if L > 3:
        raise ValueError(f"L={L} gives {L * L} qubits; the exact check is limited to L <= 3")
    lat = LatticeSpec(L, periodic)
    pair = pair or (0, lat.far_site(0))
    n = lat.n_sites
    rho = decohered_ising_state(n, lat.bonds, p)
    cw = wightman(rho, site_operator("Z", pair[0], n), site_operator("Z", pair[1], n))
    candidates = {}
    for conv in CONVENTIONS:
        beta = nishimori_beta(p, conv)
        for obs in ("m1", "m2"):
            candidates[(obs, conv)] = exact_rbim_enumeration(lat, p, beta, obs, pair)
        if lat.n_bonds <= MAX_ENUM_BONDS and math.isfinite(beta):
            candidates[("defect", conv)] = defect_correlator(lat, p, beta, pair)
    residuals = {k: abs(v - cw) for k, v in candidates.items()}
    matches = [k for k, r in residuals.items() if r < tol]
    return MappingReport(L, periodic, p, tuple(pair), cw, candidates, residuals, matches)


# ---------------------------------------------------------------- disorder-averaged MC and p_c


@dataclass
class DisorderAverage:
    L: int
    p: float
    beta: float
    distances: np.ndarray
    g1: np.ndarray  # (samples, distances)
    g2: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.g1.shape[0]

    def ratio(self, idx=None) -> float:
        """Correlation ratio ``[G2(L/2)] / [G2(L/4)]``."""
        g = self.g2 if idx is None else self.g2[idx]
        return float(g[:, 0].mean() / g[:, 1].mean())

    def jackknife_ratio(self) -> tuple[float, float]:
        n = self.n_samples
        s0, s1 = self.g2[:, 0].sum(), self.g2[:, 1].sum()
        loo = (s0 - self.g2[:, 0]) / (s1 - self.g2[:, 1])
        est = s0 / s1
        err = math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))
        return float(est), float(err)


def disorder_average(L: int, p: float, n_samples: int, sweeps: int, thermalization: int, seed: int,
                     convention: str = "exp", threads: int = 1, p_index: int = 0) -> DisorderAverage:
    """MC over independent disorder samples on the Nishimori line; G at r = L/2 and L/4."""
    lat = LatticeSpec(L, True)
    beta = nishimori_beta(p, convention)
    distances = (L // 2, max(1, L // 4))
    g1 = np.empty((n_samples, 2))
    g2 = np.empty((n_samples, 2))
    run_seed = int(stream(seed, 17, L, p_index).integers(2**62))

    def work(k):
        dis = sample_disorder(lat, p, run_seed, k)
        obs = metropolis_run(lat, dis, beta, sweeps, thermalization, run_seed, distances=distances)
        g1[k] = obs.g1
        g2[k] = obs.g2

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(work, range(n_samples)))
    else:
        for k in range(n_samples):
            work(k)
    return DisorderAverage(L, p, beta, np.asarray(distances), g1, g2)


def _crossing(p_grid, ra, rb) -> float | None:
    """First sign change of ``ra - rb`` on the grid, located by linear interpolation."""
    d = np.asarray(ra) - np.asarray(rb)
    for k in range(len(d) - 1):
        if d[k] == 0:
            return float(p_grid[k])
        if d[k] * d[k + 1] < 0:
            t = d[k] / (d[k] - d[k + 1])
            return float(p_grid[k] + t * (p_grid[k + 1] - p_grid[k]))
    return None


@dataclass
class PcEstimate:
    p_c: float
    error: float
    pair_crossings: dict
    table: list
    insufficient: bool


def estimate_pc(sizes: Sequence[int], p_grid: Sequence[float], sweeps: int, thermalization: int,
                n_samples: int, seed: int, convention: str = "exp", threads: int = 1,
                n_bootstrap: int = 200, strict: bool = False, progress=None) -> PcEstimate:
    """Crossing of the correlation ratio ``[G2(L/2)]/[G2(L/4)]`` between lattice sizes.

    The estimate averages the crossings of consecutive size pairs; its error
    bar comes from bootstrap resampling of disorder samples.
    """
    sizes = sorted(sizes)
    p_grid = np.asarray(p_grid, dtype=float)
    if len(sizes) < 2:
        raise ValueError("need at least two lattice sizes")
    if p_grid.size < 2 or np.any(np.diff(p_grid) <= 0):
        raise ValueError("p grid must be strictly increasing with at least two points")
    data = {}
    table = []
    for L in sizes:
        for k, p in enumerate(p_grid):
            da = disorder_average(L, float(p), n_samples, sweeps, thermalization, seed, convention, threads, k)
            data[L, k] = da
            r, r_err = da.jackknife_ratio()
            table.append({"L": L, "p": float(p), "beta": da.beta, "ratio": r, "ratio_err": r_err,
                          "g1_half": float(da.g1[:, 0].mean()), "g2_half": float(da.g2[:, 0].mean()),
                          "g2_quarter": float(da.g2[:, 1].mean()), "samples": n_samples})
            if progress:
                progress(table[-1])

    def crossings(idx_map):
        out = {}
        for a, b in zip(sizes[:-1], sizes[1:]):
            ra = [data[a, k].ratio(idx_map.get((a, k))) for k in range(p_grid.size)]
            rb = [data[b, k].ratio(idx_map.get((b, k))) for k in range(p_grid.size)]
            out[(a, b)] = _crossing(p_grid, ra, rb)
        return out

    pair_x = crossings({})
    found = [v for v in pair_x.values() if v is not None]
    p_c = float(np.mean(found)) if found else float("nan")
    rng = stream(seed, 19)
    boots = []
    for _ in range(n_bootstrap):
        idx = {key: rng.integers(0, n_samples, n_samples) for key in data}
        vals = [v for v in crossings(idx).values() if v is not None]
        if vals:
            boots.append(np.mean(vals))
    error = float(np.std(boots, ddof=1)) if len(boots) > 1 else float("inf")
    spacing = float(np.min(np.diff(p_grid)))
    insufficient = not found or not error <= spacing
    if strict and insufficient:
        raise InsufficientStatisticsError(f"p_c error {error:.3g} exceeds grid spacing {spacing:.3g}")
    return PcEstimate(p_c, error, {f"{a}-{b}": v for (a, b), v in pair_x.items()}, table, insufficient)


def enumerate_marginals(lat: LatticeSpec, couplings: np.ndarray, beta: float) -> np.ndarray:
    """Exact Boltzmann probability of every spin configuration (little-endian index, bit=1 means -1)."""
    s = _spin_table(lat.n_sites).astype(float)
    e = np.array([bond_energy(lat, row, couplings) for row in s])
    w = np.exp(-beta * (e - e.min()))
    return w / w.sum()

