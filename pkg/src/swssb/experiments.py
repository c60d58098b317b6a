"""Experiment configurations and runners used by the command line."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import channels as ch
from . import correlators as cr
from . import diagnostics as dg
from . import models
from . import rbim
from .rng import stream
from .states import (BlockEnsemble, charge_projector, check_strong_symmetry, doubled_symmetry_check, even_sector_mixed,
                     ghz_state, parity_projector, random_density_matrix, random_state_in, tfd, tilde,
                     z2_generator)

KINDS = (
    "bounds-fuzz",
    "tfd-check",
    "spin-glass",
    "thermal-scan",
    "decohered-ising-exact",
    "rbim-mc",
    "susceptibility",
    "entropy-response",
)

MAX_DENSE_QUBITS = 12
MAX_DECOHERED_L = 3
MAX_MC_L = 64

DEFAULTS: dict[str, dict[str, Any]] = {
    "bounds-fuzz": {"n_cases": 1000, "sizes": [2, 3, 4]},
    "tfd-check": {"sizes": [1, 2, 3, 4], "n_cases": 100},
    "spin-glass": {"n_qubits": 4, "weights": [0.5, 0.5], "operator": "Z"},
    "thermal-scan": {"n_qubits": 8, "hopping": 0.5, "staggered": 4.0, "betas": [1.0, 2.0, 4.0],
                     "separations": [1, 2, 3, 4], "symmetry": "U1"},
    "decohered-ising-exact": {"L": 2, "periodic": True, "p_grid": [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45],
                              "alphas": [0.25, 0.5]},
    "rbim-mc": {"sizes": [8, 12, 16], "p_grid": [0.08, 0.1, 0.11, 0.12, 0.13, 0.14, 0.16],
                "sweeps": 10000, "thermalization": 2000, "samples": 200, "convention": "exp"},
    "susceptibility": {"n_qubits": 3, "eps": [0.001, 0.002], "operator": "Z", "state": "even-sector", "rank": 2},
    "entropy-response": {"n_qubits": 3, "n_cases": 20, "alpha": 1e-4},
}


@dataclass
class ExperimentConfig:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    output: str = "out"
    format: str = "csv"

    @classmethod
    def from_mapping(cls, data: dict, kind: str | None = None) -> "ExperimentConfig":
        data = dict(data or {})
        k = kind or data.pop("kind", None)
        data.pop("kind", None)
        seed = data.pop("seed", None)
        output = data.pop("output", "out")
        fmt = data.pop("format", "csv")
        params = dict(DEFAULTS.get(k, {}))
        params.update(data.pop("params", {}) or {})
        params.update(data)
        return cls(k, params, seed, output, fmt)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "seed": self.seed, "output": self.output, "format": self.format,
                "params": _plain(self.params)}


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


def _increasing(seq) -> bool:
    return len(seq) > 0 and all(b > a for a, b in zip(seq, seq[1:]))


def validate(cfg: ExperimentConfig) -> list[str]:
    """Violations that would stop :func:`run`; empty when the config is runnable."""
    v = []
    if cfg.kind not in KINDS:
        return [f"kind: must be one of {', '.join(KINDS)}"]
    if cfg.seed is None:
        v.append("seed required")
    elif not isinstance(cfg.seed, int) or cfg.seed < 0:
        v.append("seed: must be a non-negative integer")
    if cfg.format not in ("csv", "json"):
        v.append("format: must be csv or json")
    p = cfg.params

    def need(name, check, msg):
        if name not in p:
            v.append(f"{name}: required")
            return
        try:
            ok = check(p[name])
        except TypeError:
            ok = False
        if not ok:
            v.append(f"{name}: {msg}")

    def grid(name, lo_ok, msg):
        need(name, lambda g: isinstance(g, list) and _increasing(g) and all(lo_ok(x) for x in g),
             f"non-empty increasing grid with {msg}")

    k = cfg.kind
    if k == "bounds-fuzz":
        need("n_cases", lambda n: n >= 1, "must be >= 1")
        need("sizes", lambda s: all(2 <= n <= MAX_DENSE_QUBITS for n in s) and len(s) > 0,
             f"each N in [2, {MAX_DENSE_QUBITS}]")
    elif k == "tfd-check":
        need("sizes", lambda s: all(1 <= n <= 6 for n in s) and len(s) > 0, "each N in [1, 6] (doubled space)")
        need("n_cases", lambda n: n >= 1, "must be >= 1")
    elif k == "spin-glass":
        need("n_qubits", lambda n: 2 <= n <= MAX_DENSE_QUBITS, f"N in [2, {MAX_DENSE_QUBITS}]")
        need("weights", lambda w: len(w) == 2 and all(x >= 0 for x in w) and abs(sum(w) - 1) < 1e-12,
             "two non-negative weights summing to 1")
    elif k == "thermal-scan":
        need("n_qubits", lambda n: 2 <= n <= 10, "N in [2, 10]")
        grid("betas", lambda b: b >= 0, "β ≥ 0")
        need("separations", lambda s: len(s) > 0 and all(1 <= r for r in s), "positive separations")
        need("symmetry", lambda s: s in ("U1", "Z2"), "must be U1 or Z2")
    elif k == "decohered-ising-exact":
        need("L", lambda L: 2 <= L <= MAX_DECOHERED_L, f"L in [2, {MAX_DECOHERED_L}] (L² qubits held exactly)")
        grid("p_grid", lambda x: 0 <= x <= 0.5, "p ∈ [0, 1/2]")
        if p.get("alphas"):
            grid("alphas", lambda a: 0 < a < 1, "α ∈ (0,1)")
    elif k == "rbim-mc":
        need("sizes", lambda s: len(s) >= 2 and _increasing(s) and all(4 <= L <= MAX_MC_L and L % 4 == 0 for L in s),
             f"at least two increasing sizes, multiples of 4 up to {MAX_MC_L}")
        grid("p_grid", lambda x: 0 < x < 0.5, "p ∈ (0, 1/2)")
        need("samples", lambda n: n >= 2, "must be >= 2")
        need("convention", lambda c: c in rbim.CONVENTIONS, "must be tanh or exp")
        need("thermalization", lambda t: t > 0, "must be > 0")
        need("sweeps", lambda s: s > p.get("thermalization", 0), "sweeps must exceed thermalization")
    elif k == "susceptibility":
        need("n_qubits", lambda n: 2 <= n <= dg.MAX_DOUBLED_QUBITS, f"N in [2, {dg.MAX_DOUBLED_QUBITS}]")
        need("eps", lambda e: len(e) > 0 and all(0 < x <= 0.1 for x in e), "ε values in (0, 0.1]")
        need("operator", lambda o: o in ("X", "Y", "Z"), "Hermitian Pauli X, Y or Z")
        need("state", lambda s: s in ("even-sector", "random-even"), "even-sector or random-even")
    elif k == "entropy-response":
        need("n_qubits", lambda n: 2 <= n <= MAX_DENSE_QUBITS, f"N in [2, {MAX_DENSE_QUBITS}]")
        need("n_cases", lambda n: n >= 1, "must be >= 1")
        need("alpha", lambda a: 0 < a < 1, "α ∈ (0,1)")
    return v


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Result:
    rows: list
    checks: list
    summary: dict = field(default_factory=dict)


# ---------------------------------------------------------------- runners


def _bounds_fuzz(p, seed, threads):
    cases = dg.bounds_fuzz(p["n_cases"], seed, p["sizes"])
    rows = [{"case": k, "n_qubits": c.n_qubits, "rank": c.rank, "i": c.sites[0], "j": c.sites[1],
             "paulis": c.paulis, "cw": c.report.cw, "fidelity": c.report.fidelity,
             "slack1": c.report.slack1, "slack2": c.report.slack2,
             "bound1_ok": c.report.bound1_ok, "bound2_ok": c.report.bound2_ok} for k, c in enumerate(cases)]
    ok = sum(c.report.bound1_ok and c.report.bound2_ok for c in cases)
    checks = [Check("bounds", ok == len(cases), f"{ok}/{len(cases)} bound checks passed")]
    return Result(rows, checks, {"passed": ok, "total": len(cases),
                                 "min_slack1": min(c.report.slack1 for c in cases),
                                 "min_slack2": min(c.report.slack2 for c in cases)})


def _tfd_check(p, seed, threads):
    rows = []
    worst = {"roundtrip": 0.0, "norm": 0.0, "wightman": 0.0}
    sym_ok = True
    for k in range(p["n_cases"]):
        rng = stream(seed, 23, k)
        sizes = p["sizes"]
        n = int(sizes[k % len(sizes)])
        rank = int(rng.integers(1, 2**n + 1))
        rho = random_density_matrix(n, rank, int(rng.integers(2**31)))
        st = tfd(rho)
        rt = float(np.max(np.abs(st.reduced_physical() - rho.matrix)))
        nd = abs(st.norm() - 1)
        row = {"case": k, "n_qubits": n, "rank": rank, "roundtrip_err": rt, "norm_err": nd}
        worst["roundtrip"] = max(worst["roundtrip"], rt)
        worst["norm"] = max(worst["norm"], nd)
        if n >= 2:
            i, j = (int(s) for s in rng.choice(n, 2, replace=False))
            pa = "".join(rng.choice(list("XYZ"), 2))
            o_i, o_j = cr.site_operator(pa[0], i, n), cr.site_operator(pa[1], j, n)
            d = abs(cr.wightman(rho, o_i, o_j) - cr.wightman_tfd(rho, o_i, o_j))
            worst["wightman"] = max(worst["wightman"], d)
            row["wightman_path_diff"] = d
            sym_rho = random_state_in(parity_projector(n), min(rank, 2 ** (n - 1)), int(rng.integers(2**31)))
            u = z2_generator(n)
            res = doubled_symmetry_check(tfd(sym_rho), u, tilde(u))
            sym_ok &= res.holds and res.physical_holds and res.auxiliary_holds
            row["doubled_symmetry"] = bool(res.holds and res.physical_holds and res.auxiliary_holds)
        else:
            row["wightman_path_diff"] = None
            row["doubled_symmetry"] = None
        rows.append(row)
    checks = [
        Check("partial-trace round trip", worst["roundtrip"] < 1e-10, f"max error {worst['roundtrip']:.3g}"),
        Check("unit norm", worst["norm"] < 1e-10, f"max deviation {worst['norm']:.3g}"),
        Check("TFD vs trace Wightman", worst["wightman"] < 1e-10, f"max difference {worst['wightman']:.3g}"),
        Check("doubled symmetry on strongly symmetric states", bool(sym_ok)),
    ]
    return Result(rows, checks, worst)


def _spin_glass(p, seed, threads):
    n = p["n_qubits"]
    w = np.asarray(p["weights"], dtype=float)
    states = np.stack([ghz_state(n, 1), ghz_state(n, -1)], axis=1)
    ens = BlockEnsemble(w, states)
    rep = dg.spin_glass_susceptibility(ens, p.get("operator", "Z"))
    rows = []
    for i in range(n):
        for j in range(n):
            rows.append({"i": i, "j": j, "cw_block": rep.cw_block[i, j], "cw_direct": rep.cw_direct[i, j],
                         "ea_block": rep.ea_block[i, j], "fidelity_direct": rep.fidelity_direct[i, j]})
    d_cw = float(np.max(np.abs(rep.cw_block - rep.cw_direct)))
    d_f = float(np.max(np.abs(rep.ea_block - rep.fidelity_direct)))
    avg = rep.cw_direct.sum() / n**2
    checks = [Check("C^W block formula", d_cw < 1e-10, f"max diff {d_cw:.3g}"),
              Check("EA order parameter = fidelity", d_f < 1e-10, f"max diff {d_f:.3g}"),
              Check("chi_SG identity", abs(avg - rep.chi_sg / n) < 1e-12, f"{float(avg):.12g} vs {float(rep.chi_sg) / n:.12g}")]
    return Result(rows, checks, {"chi_sg": rep.chi_sg, "chi_sg_direct": rep.chi_sg_direct})


def _thermal_scan(p, seed, threads):
    n = p["n_qubits"]
    if p["symmetry"] == "U1":
        h = models.xx_chain(n, p["hopping"], p["staggered"], periodic=True)
        sector = charge_projector(n, n // 2)
        scan = dg.thermal_scan(h, p["betas"], sector, "S+", p["separations"], "U1", charge=n // 2)
    else:
        h = models.classical_ising_chain(n, p.get("coupling", 1.0))
        sector = parity_projector(n)
        scan = dg.thermal_scan(h, p["betas"], sector, "Z", p["separations"], "Z2")
    rmax = max(p["separations"])
    betas = scan.grid
    cw = [r["cw_canonical"] for r in scan.rows if r["separation"] == rmax]
    summary = {"gap": scan.metadata["gap"]}
    if len(betas) >= 2 and all(c > 0 for c in cw) and betas[0] > 0:
        summary["log_slope"] = dg.log_slope(betas, cw)
    checks = [Check("positivity", all(r["cw_canonical"] > 0 for r in scan.rows), "C^W(i,j) > 0 at finite beta")]
    return Result(scan.rows, checks, summary)


def _decohered_exact(p, seed, threads):
    lat = rbim.LatticeSpec(p["L"], p.get("periodic", True))
    n = lat.n_sites
    pairs = p.get("pairs") or [(0, j) for j in range(1, n)]
    pairs = [tuple(x) for x in pairs]
    alphas = p.get("alphas") or []
    rows = []
    ok_bounds = True
    ok_sym = True
    u = z2_generator(n)
    for pv in p["p_grid"]:
        rho = ch.decohered_ising_state(n, lat.bonds, pv)
        ok_sym &= check_strong_symmetry(rho, u).holds
        z = [cr.site_operator("Z", k, n) for k in range(n)]
        for i, j in pairs:
            b = dg.verify_bounds(rho, z[i], z[j])
            ok_bounds &= b.bound1_ok and b.bound2_ok
            row = {"p": pv, "i": i, "j": j, "two_point": cr.two_point(rho, z[i], z[j]).real,
                   "cw": b.cw, "fidelity": b.fidelity, "renyi2": cr.renyi2_correlator(rho, z[i], z[j])}
            for a in alphas:
                row[f"cw_alpha_{a:g}"] = cr.cw_alpha(rho, z[i], z[j], a)
            rows.append(row)
    checks = [Check("bounds", ok_bounds, "C^W <= F <= sqrt(C^W) on every pair"),
              Check("strong symmetry", ok_sym, "decohered state stays strongly prod-X symmetric")]
    return Result(rows, checks)


def _rbim_mc(p, seed, threads):
    est = rbim.estimate_pc(p["sizes"], p["p_grid"], p["sweeps"], p["thermalization"], p["samples"], seed,
                           p["convention"], threads)
    checks = [Check("statistics", not est.insufficient,
                    f"p_c = {est.p_c:.4f} ± {est.error:.4f}")]
    summary = {"p_c": est.p_c, "p_c_error": est.error, "pair_crossings": est.pair_crossings}
    return Result(est.table, checks, summary)


def _susceptibility(p, seed, threads):
    n = p["n_qubits"]
    if p["state"] == "even-sector":
        rho = even_sector_mixed(n)
    else:
        rho = random_state_in(parity_projector(n), p.get("rank", 2), seed)
    rows = []
    ok = True
    for eps in p["eps"]:
        r = dg.perturbed_tfd_response(rho, p["operator"], eps)
        rel = abs(r.measured - r.predicted) / abs(r.predicted)
        ok &= rel < 0.01 and abs(r.baseline) < 1e-10
        rows.append({"eps": eps, "measured": r.measured, "predicted": r.predicted, "rel_dev": rel,
                     "baseline": r.baseline})
    return Result(rows, [Check("linear response", bool(ok), "measured/eps within 1% of chi^W")])


def _entropy_response(p, seed, threads):
    n = p["n_qubits"]
    rows = []
    ok = True
    for k in range(p["n_cases"]):
        rng = stream(seed, 29, k)
        rho = random_density_matrix(n, 2**n, int(rng.integers(2**31)))
        i, j = (int(s) for s in rng.choice(n, 2, replace=False))
        r = dg.entropy_response(rho, cr.site_operator("Z", i, n), cr.site_operator("Z", j, n), p["alpha"])
        rel = abs(r.slope_fd - r.slope_modular) / max(abs(r.slope_modular), 1e-300)
        ok &= rel < 0.01
        rows.append({"case": k, "i": i, "j": j, "slope_fd": r.slope_fd, "slope_modular": r.slope_modular,
                     "rel_dev": rel})
    return Result(rows, [Check("entropy response", bool(ok), "finite difference within 1% of tr[H_M delta rho]")])


RUNNERS: dict[str, Callable] = {
    "bounds-fuzz": _bounds_fuzz,
    "tfd-check": _tfd_check,
    "spin-glass": _spin_glass,
    "thermal-scan": _thermal_scan,
    "decohered-ising-exact": _decohered_exact,
    "rbim-mc": _rbim_mc,
    "susceptibility": _susceptibility,
    "entropy-response": _entropy_response,
}


def execute(cfg: ExperimentConfig, threads: int = 1) -> Result:
    problems = validate(cfg)
    if problems:
        raise ValueError("invalid config: " + "; ".join(problems))
    return RUNNERS[cfg.kind](cfg.params, cfg.seed, threads)
