"""Brute-force oscillatory integrals, phase classification, decay fits.

The oracle is plain tensor Gauss-Legendre with at least 10 nodes per
wavelength per axis (per-axis wavelengths measured from the phase's
directional derivative bounds), plus an internal doubling check. On top
of it sit: classification of the phase's critical-point structure on
the amplitude support, log-log decay fits over a frequency grid, the
plateau-cutoff split that isolates a degenerate critical point, and the
assembly of the negative-curvature model integrals whose phase is a
hyperbolic distance between deck translates of a geodesic.

Canonical phases (shapes, not magnitudes, carry the content):

  no critical point:    t + s
  nondegenerate:        t^2 - s^2
  degenerate mixed:     (t^2 + 2ts + s^2)/32 + s^4/1000 on [-4.5, 4.5]^2

The degenerate case keeps the classical shape t^2 + 2ts + s^2 + s^4
(unique critical point at the origin, singular Hessian, nonzero mixed
entry) but scales the coefficients and widens the amplitude so that the
excision radii 4*eps for eps up to 0.4 stay well inside the support and
the node budget stays sane at frequency 800; with unit coefficients on
a unit box the largest excision swallows the whole amplitude and the
quadrature cost explodes by two orders of magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from ._quadrature import fit_loglog, panel_nodes
from .hyperbolic import HGeodesic, DeckTransform, PhaseFunction, find_critical_points
from .projector_kernels import KernelAmplitudeModel
from .windows import make_beta

LAMBDA_CAP = 2000.0
FLOOR = 1e-14
NODES_PER_WAVELENGTH = 12  # contract floor is 10


class PhaseClass(Enum):
    NO_CRITICAL = "no_critical"
    FULL_HESSIAN = "full_hessian_nondegenerate"
    MIXED_ONLY = "mixed_only"


@dataclass(frozen=True)
class Classification:
    kind: PhaseClass
    point: Optional[tuple] = None
    hessian: Optional[tuple] = None  # (phi_tt, phi_ts, phi_ss)


@dataclass(frozen=True, eq=False)
class OscillatoryProblem:
    """Phase/amplitude pair on a rectangle; amplitude vanishes on the boundary."""

    phase: Callable
    amplitude: Callable
    domain: tuple  # ((t0, t1), (s0, s1))
    grad: Optional[Callable] = field(default=None, repr=False)
    hessian: Optional[Callable] = field(default=None, repr=False)
    grad_bounds: Optional[tuple] = None  # (sup |phi_t|, sup |phi_s|)

    def __post_init__(self):
        (t0, t1), (s0, s1) = self.domain
        edge = np.linspace(0.0, 1.0, 16)
        border_t = np.concatenate([t0 + (t1 - t0) * edge, t0 + (t1 - t0) * edge,
                                   np.full(16, t0), np.full(16, t1)])
        border_s = np.concatenate([np.full(16, s0), np.full(16, s1),
                                   s0 + (s1 - s0) * edge, s0 + (s1 - s0) * edge])
        vals = np.abs(self.amplitude(border_t, border_s))
        if np.max(vals) >= 1e-10:
            raise ValueError("amplitude must vanish on the domain boundary")


def bump(u):
    """Standard bump, exp(1 - 1/(1-u^2)) on |u| < 1, zero outside."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


def _estimated_grad_bounds(prob: OscillatoryProblem):
    if prob.grad_bounds is not None:
        return prob.grad_bounds
    (t0, t1), (s0, s1) = prob.domain
    tg = np.linspace(t0, t1, 48)
    sg = np.linspace(s0, s1, 48)
    T, S = np.meshgrid(tg, sg, indexing="ij")
    if prob.grad is not None:
        gt, gs = prob.grad(T, S)
    else:
        ht = (t1 - t0) * 1e-6
        hs = (s1 - s0) * 1e-6
        gt = (prob.phase(T + ht, S) - prob.phase(T - ht, S)) / (2 * ht)
        gs = (prob.phase(T, S + hs) - prob.phase(T, S - hs)) / (2 * hs)
    return float(np.max(np.abs(gt))) * 1.1, float(np.max(np.abs(gs))) * 1.1


def brute_force_integral(prob: OscillatoryProblem, lam: float,
                         check: bool = True, refine: int = 1) -> complex:
    """Tensor Gauss-Legendre value of the oscillatory integral.

    Node density: one wavelength per panel with 12-node panels on each
    axis, wavelengths counted against the per-axis gradient bounds. The
    doubling check certifies self-convergence against the amplitude's
    L1 mass.
    """
    if lam < 1.0:
        raise ValueError("lam must be >= 1")
    if lam > LAMBDA_CAP:
        raise ValueError(f"node budget exceeded beyond lam = {LAMBDA_CAP}")
    gbt, gbs = _estimated_grad_bounds(prob)
    (t0, t1), (s0, s1) = prob.domain
    pt = max(4, int(math.ceil(lam * gbt * (t1 - t0) / (2 * math.pi)))) * refine
    ps = max(4, int(math.ceil(lam * gbs * (s1 - s0) / (2 * math.pi)))) * refine
    val = _tensor_quad(prob, lam, pt, ps)
    if not check:
        return val
    tg = np.linspace(t0, t1, 64)
    T, S = np.meshgrid(tg, np.linspace(s0, s1, 64), indexing="ij")
    mass = float(np.mean(np.abs(prob.amplitude(T, S))) * (t1 - t0) * (s1 - s0))
    tol = 1e-9 * max(mass, 1e-30)
    for _ in range(3):
        pt, ps = 2 * pt, 2 * ps
        val2 = _tensor_quad(prob, lam, pt, ps)
        if abs(val - val2) < tol:
            return val2
        val = val2
    raise RuntimeError(f"quadrature failed to self-converge at lam={lam}")


def _tensor_quad(prob: OscillatoryProblem, lam: float, pt: int, ps: int) -> complex:
    (t0, t1), (s0, s1) = prob.domain
    t, wt = panel_nodes(t0, t1, pt, order=NODES_PER_WAVELENGTH)
    s, ws = panel_nodes(s0, s1, ps, order=NODES_PER_WAVELENGTH)
    total = 0.0 + 0.0j
    chunk = max(1, int(6e6 / max(len(s), 1)))
    for i0 in range(0, len(t), chunk):
        T, S = np.meshgrid(t[i0:i0 + chunk], s, indexing="ij")
        block = prob.amplitude(T, S) * np.exp(1j * lam * prob.phase(T, S))
        total += complex(np.sum(wt[i0:i0 + chunk, None] * ws[None, :] * block))
    return total


def classify_phase(prob: OscillatoryProblem, det_tol: float = 1e-8,
                   grad_tol: float = 1e-10) -> Classification:
    """Critical-point structure of the phase on the amplitude support.

    Newton from a 16x16 seed grid; zero critical points -> NO_CRITICAL,
    one with invertible Hessian -> FULL_HESSIAN, one with singular
    Hessian but nonzero mixed entry -> MIXED_ONLY. Two or more critical
    points, or a fully degenerate Hessian, are outside the supported
    hypotheses and rejected.
    """
    (t0, t1), (s0, s1) = prob.domain
    if prob.grad is not None:
        grad = prob.grad
    else:
        def grad(t, s, h=1e-6):
            return ((prob.phase(t + h, s) - prob.phase(t - h, s)) / (2 * h),
                    (prob.phase(t, s + h) - prob.phase(t, s - h)) / (2 * h))
    if prob.hessian is not None:
        hess = prob.hessian
    else:
        def hess(t, s, h=1e-4):
            ftt = (prob.phase(t + h, s) - 2 * prob.phase(t, s)
                   + prob.phase(t - h, s)) / h ** 2
            fss = (prob.phase(t, s + h) - 2 * prob.phase(t, s)
                   + prob.phase(t, s - h)) / h ** 2
            fts = (prob.phase(t + h, s + h) - prob.phase(t + h, s - h)
                   - prob.phase(t - h, s + h) + prob.phase(t - h, s - h)
                   ) / (4 * h * h)
            return ftt, fts, fss

    tg = np.linspace(t0, t1, 16)
    sg = np.linspace(s0, s1, 16)
    T, S = np.meshgrid(tg, sg, indexing="ij")
    t = T.ravel().copy()
    s = S.ravel().copy()
    for _ in range(60):
        gt, gs = grad(t, s)
        att, ats, ass_ = hess(t, s)
        det = att * ass_ - ats * ats
        reg = np.where(np.abs(det) < 1e-12, np.sign(det + 1e-300) * 1e-12, det)
        dt = (ass_ * gt - ats * gs) / reg
        ds = (att * gs - ats * gt) / reg
        step = np.maximum(np.hypot(dt, ds), 1e-300)
        lim = 0.25 * max(t1 - t0, s1 - s0)
        scalef = np.where(step > lim, lim / step, 1.0)
        t = t - dt * scalef
        s = s - ds * scalef
        t = np.clip(t, t0 - 0.2, t1 + 0.2)
        s = np.clip(s, s0 - 0.2, s1 + 0.2)

    gt, gs = grad(t, s)
    gnorm = np.hypot(gt, gs)
    ok = gnorm < grad_tol
    ok &= (t >= t0) & (t <= t1) & (s >= s0) & (s <= s1)
    # keep only critical points inside the amplitude support
    ok &= np.abs(prob.amplitude(t, s)) > 0.0
    # cluster converged seeds: along a degenerate valley the gradient
    # dips below tolerance on a whole arc, which is one critical point
    merge = 0.01 * max(t1 - t0, s1 - s0)
    pts: list[tuple] = []
    for ti, si, gi in sorted(zip(t[ok], s[ok], gnorm[ok]), key=lambda z: z[2]):
        if any(abs(ti - a) < merge and abs(si - b) < merge for a, b in pts):
            continue
        pts.append((float(ti), float(si)))
    if not pts:
        return Classification(kind=PhaseClass.NO_CRITICAL)
    if len(pts) > 1:
        raise ValueError(f"{len(pts)} critical points: outside the supported "
                         "single-critical-point hypotheses")
    (tc, sc) = pts[0]
    att, ats, ass_ = (float(v) for v in hess(np.array(tc), np.array(sc)))
    det = att * ass_ - ats * ats
    if abs(det) > det_tol:
        return Classification(kind=PhaseClass.FULL_HESSIAN, point=(tc, sc),
                              hessian=(att, ats, ass_))
    if abs(ats) <= det_tol:
        raise ValueError("degenerate Hessian with vanishing mixed entry: "
                         "outside the supported hypotheses")
    return Classification(kind=PhaseClass.MIXED_ONLY, point=(tc, sc),
                          hessian=(att, ats, ass_))


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    constant: float
    residual: float
    n_points: int


def decay_fit(prob: OscillatoryProblem, lams: Sequence[float],
              check: bool = True) -> DecayFit:
    """Least-squares fit |I(lam)| ~ C lam^{-p} over the grid."""
    lams = sorted(float(l) for l in lams)
    if len(lams) < 5 or lams[-1] / lams[0] < 8.0:
        raise ValueError("need >= 5 frequencies spanning a factor >= 8")
    if lams[0] < 20.0 or lams[-1] > LAMBDA_CAP:
        raise ValueError("frequency grid must sit inside [20, 2000]")
    vals = [abs(brute_force_integral(prob, lam, check=check)) for lam in lams]
    slope, intercept, resid, n = fit_loglog(lams, vals, floor=FLOOR)
    return DecayFit(exponent=-slope, constant=math.exp(intercept),
                    residual=resid, n_points=n)


# ---------------------------------------------------------------------------
# canonical problems


def no_critical_problem(halfwidth: float = 0.75) -> OscillatoryProblem:
    """phi = t + s with a product bump: constant nonzero gradient."""
    return OscillatoryProblem(
        phase=lambda t, s: t + s,
        amplitude=lambda t, s: bump(t / halfwidth) * bump(s / halfwidth),
        domain=((-halfwidth, halfwidth), (-halfwidth, halfwidth)),
        grad=lambda t, s: (np.ones_like(t), np.ones_like(s)),
        hessian=lambda t, s: (np.zeros_like(t),) * 3,
        grad_bounds=(1.0, 1.0),
    )


def full_hessian_problem(halfwidth: float = 0.75) -> OscillatoryProblem:
    """phi = t^2 - s^2: unique nondegenerate critical point at the origin."""
    return OscillatoryProblem(
        phase=lambda t, s: t * t - s * s,
        amplitude=lambda t, s: bump(t / halfwidth) * bump(s / halfwidth),
        domain=((-halfwidth, halfwidth), (-halfwidth, halfwidth)),
        grad=lambda t, s: (2.0 * t, -2.0 * s),
        hessian=lambda t, s: (2.0 * np.ones_like(t), np.zeros_like(t),
                              -2.0 * np.ones_like(s)),
        grad_bounds=(2.0 * halfwidth, 2.0 * halfwidth),
    )


MIXED_QUAD_SCALE = 1.0 / 32.0
MIXED_QUARTIC_SCALE = 1.0e-3
MIXED_HALFWIDTH = 4.5


def mixed_only_problem(halfwidth: float = MIXED_HALFWIDTH) -> OscillatoryProblem:
    """Degenerate-Hessian phase (t^2 + 2ts + s^2)*k + g*s^4, k=1/32, g=1e-3.

    Unique critical point at the origin (the gradient vanishes only at
    t + s = 0, s = 0), Hessian [[2k, 2k], [2k, 2k]] singular, mixed
    entry 2k nonzero.
    """
    k = MIXED_QUAD_SCALE
    g = MIXED_QUARTIC_SCALE
    d = halfwidth

    return OscillatoryProblem(
        phase=lambda t, s: k * (t * t + 2.0 * t * s + s * s) + g * s ** 4,
        amplitude=lambda t, s: bump(t / d) * bump(s / d),
        domain=((-d, d), (-d, d)),
        grad=lambda t, s: (2.0 * k * (t + s),
                           2.0 * k * (t + s) + 4.0 * g * s ** 3),
        hessian=lambda t, s: (2.0 * k * np.ones_like(t),
                              2.0 * k * np.ones_like(t),
                              2.0 * k + 12.0 * g * s * s),
        grad_bounds=(4.0 * k * d, 4.0 * k * d + 4.0 * g * d ** 3),
    )


# ---------------------------------------------------------------------------
# excision split


@dataclass(frozen=True)
class EpsilonSplitRow:
    eps: float
    decay: Optional[DecayFit]
    sup_scaled_remainder: float   # sup over the grid of sqrt(lam)|I - I1|
    all_below_floor: bool


@dataclass(frozen=True)
class EpsilonSplitTable:
    rows: list
    remainder_scale: float        # single A fitted in sup ~ A * eps

    def trend_ratio(self, eps: float) -> float:
        for row in self.rows:
            if row.eps == eps:
                return row.sup_scaled_remainder / (self.remainder_scale * eps)
        raise KeyError(eps)


def epsilon_split_check(prob: OscillatoryProblem, eps_list: Sequence[float],
                        lams: Sequence[float]) -> EpsilonSplitTable:
    """Excise the critical point at scales eps and measure both pieces.

    I1 integrates against 1 - beta((t-t0)/eps) beta((s-s0)/eps): no
    critical point survives on its support, so it decays ~ 1/lam; the
    complement I - I1 obeys the eps-linear sqrt(lam)-scaled bound. The
    smallest eps values need frequencies beyond the grid to reach their
    asymptotic I1 rate (the constant in the O(lam^{-1}) blows up as the
    excision shrinks toward the degenerate valley).
    """
    cls = classify_phase(prob)
    if cls.kind is not PhaseClass.MIXED_ONLY:
        raise ValueError("epsilon split applies to the degenerate mixed case")
    t0, s0 = cls.point
    beta = make_beta()
    (a0, a1), (b0, b1) = prob.domain
    lams = sorted(float(l) for l in lams)
    base = {lam: brute_force_integral(prob, lam) for lam in lams}

    rows = []
    for eps in eps_list:
        if eps < 0.02:
            raise ValueError("excision scale too small for the node budget")

        def amp1(t, s, e=eps):
            cut = 1.0 - beta((t - t0) / e) * beta((s - s0) / e)
            return cut * prob.amplitude(t, s)

        split = OscillatoryProblem(
            phase=prob.phase, amplitude=amp1, domain=prob.domain,
            grad=prob.grad, hessian=prob.hessian, grad_bounds=prob.grad_bounds)
        vals = {lam: brute_force_integral(split, lam) for lam in lams}
        below = all(abs(v) < FLOOR for v in vals.values())
        fit = None
        if not below:
            slope, intercept, resid, n = fit_loglog(
                lams, [abs(vals[l]) for l in lams], floor=FLOOR)
            fit = DecayFit(exponent=-slope, constant=math.exp(intercept),
                           residual=resid, n_points=n)
        sup = max(math.sqrt(lam) * abs(base[lam] - vals[lam]) for lam in lams)
        rows.append(EpsilonSplitRow(eps=float(eps), decay=fit,
                                    sup_scaled_remainder=sup,
                                    all_below_floor=below))
    num = sum(r.sup_scaled_remainder * r.eps for r in rows)
    den = sum(r.eps ** 2 for r in rows)
    return EpsilonSplitTable(rows=rows, remainder_scale=num / den)


# ---------------------------------------------------------------------------
# negative-curvature model integrals


def negative_curvature_problem(geo: HGeodesic, alpha: DeckTransform,
                               b_window, amp_model: KernelAmplitudeModel
                               ) -> OscillatoryProblem:
    """Model integrand b(t) b(s) r^{-1/2} e^{i lam r}, r = d(geo(t), alpha(geo(s))).

    The r^{-1/2} profile realizes the kernel-amplitude decay at orders
    j = 0, 1 by construction; the smooth bounded metric factor is taken
    as 1 (it moves constants, not decay rates).
    """
    if alpha.is_identity():
        raise ValueError("alpha must be nontrivial")
    phase = PhaseFunction(geo1=geo, alpha=alpha, geo2=geo)

    def phase_fn(t, s):
        return phase.value(t, s)

    def amplitude(t, s):
        r = phase.value(t, s)
        return b_window(t) * b_window(s) * r ** (-0.5)

    def grad(t, s):
        return phase.grad(t, s)

    def hessian(t, s):
        return phase.hessian(t, s)

    return OscillatoryProblem(
        phase=phase_fn, amplitude=amplitude,
        domain=(tuple(b_window.support), tuple(b_window.support)),
        grad=grad, hessian=hessian, grad_bounds=(1.0, 1.0))


def negative_curvature_integral(geo: HGeodesic, alpha: DeckTransform,
                                b_window, amp_model: KernelAmplitudeModel,
                                lam: float) -> complex:
    """One model integral; the phase is classified first (hypothesis gate)."""
    prob = negative_curvature_problem(geo, alpha, b_window, amp_model)
    min_dist = float(np.min(prob.phase(
        *np.meshgrid(np.linspace(*prob.domain[0], 32),
                     np.linspace(*prob.domain[1], 32), indexing="ij"))))
    if min_dist < 1e-2:
        raise ValueError("geodesic and its translate come too close")
    classify_phase(prob)  # raises outside the lemma hypotheses
    return brute_force_integral(prob, lam)
