"""Experiment runner: one named command per verified claim.

Each experiment computes a table, evaluates the quantitative checks it
is responsible for, and writes two files: a CSV holding the table (a
`#`-prefixed metadata block, a schema row, then data rows) and a JSON
sidecar with the fit summary plus one pass/fail record per check. The
CSV contains only deterministic content, so re-running a command with
the same configuration and seed reproduces it byte for byte; wall time
lives in the JSON.

Exit codes: 0 all exercised checks pass, 1 usage error, 2 at least one
check failed (including the checks that are documented to fail on
mathematically-forced grounds; see the README).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._quadrature import linear_fit
from .hyperbolic import (
    SYSTOLE,
    PhaseFunction,
    bolza_group,
    enumerate_deck,
    find_critical_points,
    geodesic_through,
    grid_min_phase,
    hpoint,
    interior_perpendicular_elements,
    quadrilateral_angle_defect,
    stabilizer_shift,
    translation_along,
)
from .oscillatory import (
    PhaseClass,
    brute_force_integral,
    classify_phase,
    decay_fit,
    epsilon_split_check,
    full_hessian_problem,
    mixed_only_problem,
    negative_curvature_problem,
    no_critical_problem,
    bump,
)
from .period_integrals import (
    bound_sweep,
    kuznecov_sum,
    make_test_window,
    restriction_norm,
)
from .projector_kernels import (
    KernelAmplitudeModel,
    bilinear_geodesic_form,
    diagonal_kernel,
    kernel_scaling_check,
    orthogonality_identity_gap,
    torus_unfolding_check,
)
from .surfaces import (
    enumerate_spectrum,
    flat_torus,
    great_circle,
    perturbed_equator,
    sphere,
    torus_line,
)
from .windows import make_beta, make_window

EXPERIMENTS = {
    "bounds": "uniform boundedness of geodesic periods (level norms stay flat)",
    "kuznecov": "linear growth law for cumulative squared periods",
    "restriction": "restriction-norm saturation by highest-weight harmonics",
    "kernel-scaling": "projector kernel amplitude scaling and diagonal growth",
    "bilinear": "bilinear kernel form: orthogonality identity and T-decay",
    "unfold-torus": "lattice eigen-sum equals plane-kernel image sum",
    "stat-phase": "stationary-phase decay rates for the canonical phases",
    "hyperbolic-lemma": "group certification and distance-phase critical structure",
    "neg-curvature": "decay of deck-translate model integrals",
}

CSV_COLUMNS = {
    "bounds": "j,lambda,a_j,abs_a_j",
    "kuznecov": "lambda,cumulative_sum",
    "restriction": "l,lambda,family,norm,ratio",
    "kernel-scaling": "lambda,r,raw_ratio,envelope_ratio",
    "bilinear": "kind,T,lambda,value",
    "unfold-torus": "T,lambda,separation,eigen_side,image_side,relative_error,images",
    "stat-phase": "case,lambda,abs_value",
    "hyperbolic-lemma": "pair,alpha_displacement,n_critical,mixed_hessian,phi_value,oracle_gap",
    "neg-curvature": "alpha_index,classification,exponent",
}


@dataclass
class ExperimentConfig:
    experiment: str
    surface: str = "sphere"
    curve: str = "equator"
    lambda_max: float = 60.0
    grid: tuple = ()
    T: float = 5.0
    seed: int = 0
    case: str = "all"
    out: str = "lab_out"

    def echo(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v)
                for k, v in self.__dict__.items()}


@dataclass
class ResultTable:
    columns: str
    rows: list
    fits: dict
    criteria: list
    config: ExperimentConfig
    wall_time: float = 0.0

    @property
    def all_passed(self) -> bool:
        return all(c["passed"] for c in self.criteria)


def _check(name, value, passed, threshold) -> dict:
    return {"name": name, "value": value, "threshold": threshold,
            "passed": bool(passed)}


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_outputs(table: ResultTable) -> None:
    base = table.config.out
    with open(base + ".csv", "w") as fh:
        fh.write(f"# periodlab {__version__}\n")
        fh.write(f"# experiment: {table.config.experiment}\n")
        for k, v in sorted(table.config.echo().items()):
            fh.write(f"# {k} = {v}\n")
        fh.write(table.columns + "\n")
        for row in table.rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    sidecar = {
        "experiment": table.config.experiment,
        "version": __version__,
        "config": table.config.echo(),
        "wall_time_s": table.wall_time,
        "fits": table.fits,
        "criteria": table.criteria,
        "all_passed": table.all_passed,
    }
    with open(base + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# experiments


def _resolve_curve(cfg: ExperimentConfig):
    sp, to = sphere(), flat_torus()
    name = cfg.curve
    if cfg.surface == "sphere":
        axes = {
            "equator": [0.0, 0.0, 1.0],
            "tilted1": [math.sin(0.5), 0.0, math.cos(0.5)],
            "tilted2": [math.sin(1.0) * 0.6, math.sin(1.0) * 0.8, math.cos(1.0)],
        }
        if name == "perturbed":
            return sp, perturbed_equator()
        if name in axes:
            return sp, great_circle(sp, axes[name])
        raise ValueError(f"unknown sphere curve {name!r}")
    if cfg.surface == "torus":
        dirs = {"axis": (1.0, 0.0), "diagonal": (1.0, 1.0), "skew": (2.0, 1.0)}
        if name in dirs:
            return to, torus_line(to, [0.0, 0.0], dirs[name])
        raise ValueError(f"unknown torus curve {name!r}")
    raise ValueError(f"unknown surface {cfg.surface!r}")


def run_bounds(cfg: ExperimentConfig) -> ResultTable:
    surface, curve = _resolve_curve(cfg)
    res = bound_sweep(surface, curve, cfg.lambda_max)
    rows = [(r.level_index, r.lam, r.value, abs(r.value)) for r in res.records]
    const_norm = res.levels[0].level_norm
    max_norm = max(s.level_norm for s in res.levels)
    crits = [
        _check("slope_in_band", res.slope, -0.1 <= res.slope <= 0.1, "[-0.1, 0.1]"),
        _check("max_over_constant_mode", max_norm / const_norm,
               max_norm <= 3.0 * const_norm, "<= 3"),
    ]
    fits = {"slope": res.slope, "intercept": res.intercept,
            "fit_range": list(res.fit_range), "constant_mode": const_norm}
    if cfg.surface == "sphere" and cfg.curve == "equator":
        levels = enumerate_spectrum(surface, cfg.lambda_max)
        even_zonal = [abs(res.records[lv.index].value) for lv in levels
                      if lv.quantum_numbers[2] == 0
                      and lv.quantum_numbers[1] % 2 == 0
                      and lv.quantum_numbers[1] >= 20]
        if even_zonal:
            ratio = min(even_zonal) / even_zonal[0]
            crits.append(_check("even_zonal_nondecay", ratio, ratio >= 0.5,
                                ">= 0.5"))
            fits["even_zonal_min_ratio"] = ratio
    return ResultTable(CSV_COLUMNS["bounds"], rows, fits, crits, cfg)


def run_kuznecov(cfg: ExperimentConfig) -> ResultTable:
    surface, curve = _resolve_curve(cfg)
    grid = list(cfg.grid) if cfg.grid else [10.0, 20.0, 30.0, 40.0, 50.0, 60.0]
    sums = [kuznecov_sum(surface, curve, lam) for lam in grid]
    slope, intercept, r2, resid = linear_fit(grid, sums)
    rows = list(zip(grid, sums))
    crits = [
        _check("r_squared", r2, r2 >= 0.995, ">= 0.995"),
        _check("positive_slope", slope, slope > 0.0, "> 0"),
        _check("residual_fraction", resid / sums[-1],
               resid <= 0.15 * sums[-1], "<= 0.15 of top sum"),
    ]
    fits = {"slope": slope, "intercept": intercept, "r_squared": r2,
            "max_residual": resid}
    return ResultTable(CSV_COLUMNS["kuznecov"], rows, fits, crits, cfg)


def run_restriction(cfg: ExperimentConfig) -> ResultTable:
    sp = sphere()
    eq = great_circle(sp, [0.0, 0.0, 1.0])
    degrees = [int(x) for x in cfg.grid] if cfg.grid else [50, 100, 144, 200]
    rows = []
    ratios = {"highest": {}, "zonal": {}}
    for l in degrees:
        levels = enumerate_spectrum(sp, math.sqrt(l * (l + 1.0)) + 0.1)
        for family, m in (("highest", l), ("zonal", 0)):
            lv = next(e for e in levels if e.quantum_numbers[1:] == (l, m))
            nrm = restriction_norm(lv, eq, (0.0, 1.0))
            ratio = nrm / lv.lam ** 0.25
            ratios[family][l] = ratio
            rows.append((l, lv.lam, family, nrm, ratio))
    hw = ratios["highest"]
    plateau = (max(hw.values()) - min(hw.values())) / max(hw.values())
    zon = ratios["zonal"]
    decrease = 1.0 - zon[degrees[-1]] / zon[degrees[0]]
    crits = [
        _check("highest_weight_plateau", plateau, plateau <= 0.10, "<= 0.10"),
        # exact zonal behavior is norm ~ const, ratio ~ lam^{-1/4}: the
        # decrease over lambda growing 4x is 1 - 4^{-1/4} = 29.3%, so the
        # 50% threshold cannot be met; kept as specified and red.
        _check("zonal_decrease", decrease, decrease >= 0.50, ">= 0.50"),
    ]
    fits = {"plateau_spread": plateau, "zonal_decrease": decrease,
            "ratios_highest": {str(k): v for k, v in hw.items()},
            "ratios_zonal": {str(k): v for k, v in zon.items()}}
    return ResultTable(CSV_COLUMNS["restriction"], rows, fits, crits, cfg)


def run_kernel_scaling(cfg: ExperimentConfig) -> ResultTable:
    surface, _ = _resolve_curve(cfg)
    w = make_window()
    lams = list(cfg.grid) if cfg.grid else [40.0, 80.0, 160.0]
    rs = [0.3, 0.6, 0.9]
    rows, _ = kernel_scaling_check(surface, w, lams, rs)
    spread_stated = _ratio_spread(rows, lams, rs)
    rows_sup, _ = kernel_scaling_check(surface, w, lams, [0.15, 0.25, 0.35])
    spread_sup = _ratio_spread(rows_sup, lams, [0.15, 0.25, 0.35])
    diag = {lam: diagonal_kernel(surface, w, lam) / lam for lam in lams}
    diag_spread = max(diag.values()) / min(diag.values())
    crits = [
        # r beyond the transform support radius 1/2 leaves only a
        # rapidly-shrinking remainder: stated grid cannot be lam-stable.
        _check("ratio_spread_stated_grid", spread_stated, spread_stated <= 3.0,
               "<= 3"),
        _check("ratio_spread_supported_radii", spread_sup, spread_sup <= 3.0,
               "<= 3"),
        _check("diagonal_constant_stability", diag_spread, diag_spread <= 2.0,
               "<= 2"),
    ]
    fits = {"diagonal_over_lambda": {str(k): v for k, v in diag.items()},
            "spread_stated": spread_stated, "spread_supported": spread_sup}
    return ResultTable(CSV_COLUMNS["kernel-scaling"], rows + rows_sup, fits,
                       crits, cfg)


def _ratio_spread(rows, lams, rs):
    spread = 0.0
    for r in rs:
        vals = [row[3] for row in rows if row[1] == r]
        spread = max(spread, max(vals) / max(min(vals), 1e-300))
    return spread


def run_bilinear(cfg: ExperimentConfig) -> ResultTable:
    w = make_window()
    sp = sphere()
    to = flat_torus()
    eq = great_circle(sp, [0.0, 0.0, 1.0])
    skew = torus_line(to, [0.0, 0.0], [2.0, 1.0])
    b = make_test_window(0.0, 0.5)
    rows = []
    gaps = {}
    for lam in (list(cfg.grid) if cfg.grid else [20.0, 40.0]):
        gaps[lam] = orthogonality_identity_gap(sp, w, lam, eq, b)
        rows.append(("orthogonality_gap", 0.0, lam, gaps[lam]))
    tvals = {}
    for T in [2.0, 4.0, 8.0]:
        tvals[T] = bilinear_geodesic_form(to, w, 40.0, skew, b, T=T)
        rows.append(("T_windowed_form", T, 40.0, tvals[T]))
    monotone = tvals[2.0] > tvals[4.0] > tvals[8.0]
    crits = [
        _check("orthogonality_identity", max(gaps.values()),
               max(gaps.values()) < 1e-8, "< 1e-8"),
        _check("T_decay_monotone", [tvals[t] for t in (2.0, 4.0, 8.0)],
               monotone, "decreasing in T"),
    ]
    return ResultTable(CSV_COLUMNS["bilinear"], rows,
                       {"gaps": {str(k): v for k, v in gaps.items()},
                        "T_values": {str(k): v for k, v in tvals.items()}},
                       crits, cfg)


def run_unfold_torus(cfg: ExperimentConfig) -> ResultTable:
    w = make_window()
    rows = []
    errs = []
    for (T, lam) in [(5.0, 40.0), (8.0, 40.0), (5.0, 80.0)]:
        for sep in [0.0, 1.0]:
            res = torus_unfolding_check(w, T, lam, [sep, 0.0], [0.0, 0.0])
            rows.append((T, lam, sep, res.eigen_side, res.image_side,
                         res.relative_error, res.images_used))
            errs.append(res.relative_error)
    full = torus_unfolding_check(w, 8.0, 40.0, [3.0, 0.0], [0.0, 0.0])
    trunc = torus_unfolding_check(w, 8.0, 40.0, [3.0, 0.0], [0.0, 0.0],
                                  max_images=0)
    rows.append((8.0, 40.0, 3.0, full.eigen_side, full.image_side,
                 full.relative_error, full.images_used))
    rows.append((8.0, 40.0, 3.0, trunc.eigen_side, trunc.image_side,
                 trunc.relative_error, trunc.images_used))
    degradation = trunc.relative_error / max(full.relative_error, 1e-300)
    crits = [
        _check("relative_error", max(errs), max(errs) < 1e-6, "< 1e-6"),
        _check("truncation_degradation", degradation, degradation >= 10.0,
               ">= 10x"),
    ]
    fits = {"max_relative_error": max(errs), "degradation": degradation}
    return ResultTable(CSV_COLUMNS["unfold-torus"], rows, fits, crits, cfg)


def run_stat_phase(cfg: ExperimentConfig) -> ResultTable:
    lams = list(cfg.grid) if cfg.grid else [50.0, 100.0, 200.0, 400.0, 800.0]
    rows = []
    fits = {}
    crits = []
    if cfg.case in ("nocrit", "all"):
        prob = no_critical_problem()
        f = decay_fit(prob, lams)
        fits["no_critical_p"] = f.exponent
        crits.append(_check("no_critical_decay", f.exponent, f.exponent >= 1.8,
                            ">= 1.8"))
        rows += [("nocrit", lam, abs(brute_force_integral(prob, lam, check=False)))
                 for lam in lams]
    if cfg.case in ("hessian", "all"):
        prob = full_hessian_problem()
        f = decay_fit(prob, lams)
        a00 = float(bump(np.array([0.0]))[0]) ** 2
        fits["full_hessian_p"] = f.exponent
        fits["full_hessian_C"] = f.constant
        fits["full_hessian_C_predicted"] = math.pi * a00
        crits.append(_check("full_hessian_exponent", f.exponent,
                            0.9 <= f.exponent <= 1.1, "1.0 +- 0.1"))
        crits.append(_check(
            "full_hessian_constant", f.constant,
            abs(f.constant - math.pi * a00) <= 0.15 * math.pi * a00,
            "within 15% of stationary-phase prediction"))
        rows += [("hessian", lam, abs(brute_force_integral(prob, lam, check=False)))
                 for lam in lams]
    if cfg.case in ("mixed", "all"):
        prob = mixed_only_problem()
        vals = {lam: abs(brute_force_integral(prob, lam)) for lam in lams}
        rows += [("mixed", lam, vals[lam]) for lam in lams]
        sup = max(math.sqrt(lam) * vals[lam] for lam in lams)
        scaled = [math.sqrt(lam) * vals[lam] for lam in lams]
        bounded = max(scaled) <= 2.0 * scaled[0]
        fits["mixed_sup_sqrt_lambda"] = sup
        crits.append(_check("mixed_sqrt_lambda_bounded", sup, bounded,
                            "sup finite, no growth across the grid"))
        table = epsilon_split_check(prob, [0.4, 0.2, 0.1], lams)
        for row in table.rows:
            fits[f"split_p_eps_{row.eps}"] = (
                None if row.decay is None else row.decay.exponent)
            fits[f"split_trend_eps_{row.eps}"] = table.trend_ratio(row.eps)
        ps = [r.decay.exponent for r in table.rows if r.decay is not None]
        crits.append(_check("split_decay_rate", ps, min(ps) >= 0.9, ">= 0.9"))
        trend_ok = all(0.5 <= table.trend_ratio(r.eps) <= 1.5
                       for r in table.rows)
        crits.append(_check("split_linear_trend",
                            [table.trend_ratio(r.eps) for r in table.rows],
                            trend_ok, "within 50% of a single linear law"))
    return ResultTable(CSV_COLUMNS["stat-phase"], rows, fits, crits, cfg)


def run_hyperbolic_lemma(cfg: ExperimentConfig) -> ResultTable:
    group = bolza_group()
    ball = enumerate_deck(group, 8.0)
    nontrivial = [a for a in ball if not a.is_identity()]
    rng = np.random.default_rng(cfg.seed)
    rows = []
    counts_ok = True
    oracle_ok = True
    mixed_ok = True
    found_cp = 0
    pair = 0
    attempts = 0
    base_geo = geodesic_through(hpoint(0.05, -0.1), [0.0, 1.0, 0.25])
    # deterministic cases whose common perpendicular lands inside the box,
    # so the found-critical-point clauses are exercised non-vacuously
    feet_cases = interior_perpendicular_elements(group, base_geo, T=8.0,
                                                 limit=10)
    queue = [(base_geo, alpha) for alpha, _ in feet_cases]
    while pair < 50 and attempts < 400:
        attempts += 1
        if queue:
            geo, alpha = queue.pop()
        else:
            geo = geodesic_through(hpoint(*rng.normal(scale=0.3, size=2)),
                                   [0.0, *rng.normal(size=2)])
            alpha = nontrivial[rng.integers(len(nontrivial))]
            if stabilizer_shift(alpha, geo, SYSTOLE) is not None:
                continue
        phase = PhaseFunction(geo1=geo, alpha=alpha, geo2=geo)
        cps = find_critical_points(phase)
        counts_ok &= len(cps) in (0, 1)
        gap = 0.0
        mixed = 0.0
        if cps:
            found_cp += 1
            cp = cps[0]
            mixed = cp.mixed_hessian
            gap = abs(cp.value - grid_min_phase(phase))
            oracle_ok &= gap < 1e-6
            mixed_ok &= abs(mixed) >= 1e-8
        rows.append((pair, alpha.displacement, len(cps), mixed,
                     cps[0].value if cps else float("nan"), gap))
        pair += 1

    defects_pos = 0
    done = 0
    while done < 100:
        ths = np.sort(rng.uniform(0.0, 2 * math.pi, size=4))
        if np.min(np.diff(ths)) < 0.3:
            continue
        rads = rng.uniform(0.5, 1.5, size=4)
        pts = [hpoint(math.sinh(r) * math.cos(th), math.sinh(r) * math.sin(th))
               for r, th in zip(rads, ths)]
        try:
            if quadrilateral_angle_defect(*pts) > 0.0:
                defects_pos += 1
        except ValueError:
            continue
        done += 1

    counts = {T: len(enumerate_deck(group, float(T))) for T in (4, 6, 8, 10)}
    growth = float(np.polyfit(list(counts), np.log(list(counts.values())), 1)[0])
    closure = (len(enumerate_deck(group, 6.0, max_word_len=8))
               == len(enumerate_deck(group, 6.0, max_word_len=10)))
    min_disp = min(b.displacement for b in nontrivial)
    crits = [
        _check("critical_count_0_or_1", counts_ok, counts_ok, "always"),
        _check("mixed_hessian_nonzero", mixed_ok, mixed_ok and found_cp > 0,
               ">= 1e-8 (non-vacuous)"),
        _check("perpendicular_length_oracle", oracle_ok,
               oracle_ok and found_cp > 0, "< 1e-6 (non-vacuous)"),
        _check("angle_defect_positive", defects_pos, defects_pos == 100,
               "100/100"),
        _check("commutator_relation", group.commutator_residual,
               group.commutator_residual < 1e-7, "< 1e-7"),
        _check("systole", min_disp, 3.05 <= min_disp <= 3.07, "[3.05, 3.07]"),
        _check("enumeration_closure", closure, closure, "stable under +2"),
        _check("growth_rate", growth, 0.7 <= growth <= 1.3, "[0.7, 1.3]"),
    ]
    fits = {"counts": {str(k): v for k, v in counts.items()}, "growth": growth,
            "commutator_residual": group.commutator_residual,
            "octagon_residual": group.octagon_residual,
            "pairs_with_critical_point": found_cp}
    return ResultTable(CSV_COLUMNS["hyperbolic-lemma"], rows, fits, crits, cfg)


def run_neg_curvature(cfg: ExperimentConfig) -> ResultTable:
    group = bolza_group()
    ball = enumerate_deck(group, 8.0)
    nontrivial = [a for a in ball if not a.is_identity()]
    rng = np.random.default_rng(cfg.seed)
    geo = geodesic_through(hpoint(0.05, -0.1), [0.0, 1.0, 0.25])
    b = make_test_window(0.0, 0.5)
    amp_model = KernelAmplitudeModel(lam=100.0)
    lams = list(cfg.grid) if cfg.grid else [50.0, 100.0, 200.0, 400.0, 800.0]

    rows = []
    exponents = []
    done = 0
    # lead with two deterministic cases whose perpendicular feet are
    # interior: these exercise the critical-point branch (p near 1/2)
    feet = interior_perpendicular_elements(group, geo, T=8.0, limit=2)
    queue = [alpha for alpha, _ in feet]
    while done < 10:
        if queue:
            alpha = queue.pop()
        else:
            alpha = nontrivial[rng.integers(len(nontrivial))]
            if stabilizer_shift(alpha, geo, SYSTOLE) is not None:
                continue
        prob = negative_curvature_problem(geo, alpha, b, amp_model)
        try:
            cls = classify_phase(prob)
        except ValueError:
            continue
        vals = [abs(brute_force_integral(prob, lam)) for lam in lams]
        p = -float(np.polyfit(np.log(lams),
                              np.log(np.maximum(vals, 1e-300)), 1)[0])
        exponents.append(p)
        rows.append((done, cls.kind.value, p))
        done += 1

    stab = translation_along(geo, SYSTOLE)
    sprob = negative_curvature_problem(geo, stab, b, amp_model)
    svals = [abs(brute_force_integral(sprob, lam)) for lam in lams]
    good = [(lam, v) for lam, v in zip(lams, svals) if v > 1e-14]
    p_stab = -float(np.polyfit(np.log([g[0] for g in good]),
                               np.log([g[1] for g in good]), 1)[0])
    rows.append((done, "stabilizer_shift", p_stab))
    crits = [
        _check("nonstabilizer_decay", min(exponents), min(exponents) >= 0.45,
               ">= 0.45"),
        _check("stabilizer_decay", p_stab, p_stab >= 0.9, ">= 0.9"),
    ]
    fits = {"exponents": exponents, "stabilizer_exponent": p_stab}
    return ResultTable(CSV_COLUMNS["neg-curvature"], rows, fits, crits, cfg)


RUNNERS = {
    "bounds": run_bounds,
    "kuznecov": run_kuznecov,
    "restriction": run_restriction,
    "kernel-scaling": run_kernel_scaling,
    "bilinear": run_bilinear,
    "unfold-torus": run_unfold_torus,
    "stat-phase": run_stat_phase,
    "hyperbolic-lemma": run_hyperbolic_lemma,
    "neg-curvature": run_neg_curvature,
}


def list_experiments() -> dict:
    """Catalog: experiment -> (claim, CSV schema)."""
    return {name: {"claim": EXPERIMENTS[name], "columns": CSV_COLUMNS[name]}
            for name in EXPERIMENTS}


def run(cfg: ExperimentConfig) -> ResultTable:
    if cfg.experiment not in RUNNERS:
        raise ValueError(f"unknown experiment {cfg.experiment!r}")
    t0 = time.time()
    table = RUNNERS[cfg.experiment](cfg)
    table.wall_time = time.time() - t0
    write_outputs(table)
    return table


def _parse_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lab",
        description="geodesic period-integral laboratory: run one named "
                    "experiment and write CSV + JSON results")
    p.add_argument("experiment", choices=list(EXPERIMENTS) + ["list"],
                   help="experiment name, or 'list' for the catalog")
    p.add_argument("--surface", choices=["sphere", "torus"], default=None)
    p.add_argument("--curve", default=None,
                   help="equator|tilted1|tilted2|perturbed (sphere), "
                        "axis|diagonal|skew (torus)")
    p.add_argument("--lambda-max", type=float, default=None)
    p.add_argument("--grid", default=None,
                   help="comma-separated frequency grid (overrides defaults)")
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--case", choices=["nocrit", "hessian", "mixed", "all"],
                   default=None)
    p.add_argument("--out", default=None, help="output path stem")
    p.add_argument("--config", default=None,
                   help="key=value file; command-line flags take precedence")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    if args.experiment == "list":
        catalog = list_experiments()
        for name, info in catalog.items():
            print(f"{name:18s} {info['claim']}")
            print(f"{'':18s} columns: {info['columns']}")
        return 0

    merged = {}
    if args.config:
        try:
            merged.update(_parse_config_file(args.config))
        except OSError as exc:
            print(f"cannot read config file: {exc}", file=sys.stderr)
            return 1
    for key in ("surface", "curve", "lambda_max", "grid", "T", "seed",
                "case", "out"):
        val = getattr(args, key)
        if val is not None:
            merged[key] = val

    cfg = ExperimentConfig(experiment=args.experiment)
    try:
        if "surface" in merged:
            cfg.surface = str(merged["surface"])
            if cfg.surface == "torus" and "curve" not in merged:
                cfg.curve = "axis"
        if "curve" in merged:
            cfg.curve = str(merged["curve"])
        if "lambda_max" in merged:
            cfg.lambda_max = float(merged["lambda_max"])
            if cfg.lambda_max <= 0:
                raise ValueError("lambda_max must be positive")
        if "grid" in merged:
            grid = merged["grid"]
            cfg.grid = tuple(float(x) for x in str(grid).split(",") if x)
        if "T" in merged:
            cfg.T = float(merged["T"])
        if "seed" in merged:
            cfg.seed = int(merged["seed"])
        if "case" in merged:
            cfg.case = str(merged["case"])
        if "out" in merged:
            cfg.out = str(merged["out"])
    except (TypeError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1

    try:
        table = run(cfg)
    except (ValueError, RuntimeError) as exc:
        failure = {"experiment": cfg.experiment, "config": cfg.echo(),
                   "error": str(exc), "all_passed": False}
        with open(cfg.out + ".json", "w") as fh:
            json.dump(failure, fh, indent=2)
        print(f"experiment failed: {exc}", file=sys.stderr)
        return 2

    for c in table.criteria:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"[{status}] {cfg.experiment}/{c['name']}: value={c['value']} "
              f"(threshold {c['threshold']})")
    return 0 if table.all_passed else 2


if __name__ == "__main__":
    sys.exit(main())
