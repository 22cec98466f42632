"""Smoothed spectral projector kernels and flat comparison kernels.

The smoothed projector kernel is the eigenfunction sum

    K(x, y) = sum_j chi(lam - lam_j) e_j(x) e_j(y)

(or chi(T(lam - lam_j)) in the T-scaled variant), truncated where the
window weight drops below a tolerance, with a certified bound on the
discarded tail. Away from the diagonal the kernel behaves like
sqrt(lam) r^{-1/2} times a bounded oscillatory amplitude in r = d(x, y);
`kernel_scaling_check` tabulates that ratio, and the two-sample
quarter-period trick recovers the amplitude itself, free of the
oscillation nulls that raw |K| samples hit.

The flat comparison kernels K0/K1 are radial integrals of the scaled
windows against the transform of arc measure on the circle (2 pi J0),
split with the plateau cutoff exactly as the projector windows are. On
the flat torus, the lattice eigen-sum equals the sum of K0 over lattice
translates of x - y (Poisson summation); `torus_unfolding_check`
verifies that identity to high accuracy and exposes how truncating the
image sum breaks it once the kernel's support radius T/2 reaches past
the fundamental domain.

Injectivity-radius caveat: the model surfaces have injectivity radius pi
while the asymptotics assume a comfortably large one, so all kernel
scaling checks stay at r <= 1 and all windows keep their transform
support inside [-1/2, 1/2]; the image terms the torus does contribute
are accounted for explicitly by the unfolding sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._quadrature import gl_nodes, oscillatory_panels, panel_nodes
from .period_integrals import TestWindowB, windowed_pairing
from .special import j0
from .surfaces import (
    SPHERE,
    TORUS,
    SurfaceModel,
    basis_matrix,
    enumerate_spectrum,
    geodesic_distance,
)
from .windows import CutoffBeta, SchwartzWindow, derive_windows, make_beta

WEIGHT_CUTOFF = 1e-10


@dataclass(frozen=True)
class KernelValue:
    value: float
    tail_bound: float
    n_terms: int


@dataclass(frozen=True)
class KernelAmplitudeModel:
    """Size bounds for the off-diagonal kernel amplitude.

    bound(r): C0 r^{-1/2} for r >= 1/lam, C0 lam^{1/2} for r in [0, 1/lam];
    the two branches agree at r = 1/lam by construction.
    """

    lam: float
    c0: float = 1.0
    c1: float = 1.0

    def bound(self, r, j: int = 0):
        r = np.asarray(r, dtype=float)
        c = self.c0 if j == 0 else self.c1
        near = r < 1.0 / self.lam
        out = np.where(near, c * self.lam ** (j + 0.5),
                       c * np.maximum(r, 1e-300) ** (-j - 0.5))
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CircleFTDecomposition:
    """Transform of arc measure on the unit circle at radius y.

    value = int_0^{2pi} e^{i y cos th} dth (= 2 pi J0(y), real);
    for y >= 1 the oscillatory split value =
    y^{-1/2} (a_plus e^{iy} + a_minus e^{-iy}) is returned as well.
    """

    y: float
    value: complex
    a_plus: Optional[complex] = None
    a_minus: Optional[complex] = None


def _weyl_count(surface: SurfaceModel, lam: float) -> float:
    return math.pi * surface.volume * lam ** 2 / (4.0 * math.pi ** 2) + 1.0


def _chi_weights(window, lam, lams, T: float = 1.0):
    return window.chi(T * (lam - lams))


def projector_kernel(surface: SurfaceModel, window: SchwartzWindow, lam: float,
                     x, y, T: float = 1.0) -> KernelValue:
    """Eigen-sum kernel at one point pair with certified truncation.

    Terms with chi(T(lam - lam_j)) < 1e-10 are dropped; the reported
    tail bound is that tolerance times a Weyl estimate of how many modes
    the enumeration window contains, times the sup bound |e_j(x)e_j(y)|
    <= (Weyl density) absorbed into the count estimate.
    """
    ustar = window.tail_cutoff(WEIGHT_CUTOFF)
    lam_hi = lam + ustar / T
    levels = enumerate_spectrum(surface, lam_hi)
    lams = np.array([lv.lam for lv in levels])
    w = _chi_weights(window, lam, lams, T)
    keep = w >= WEIGHT_CUTOFF
    kept = [lv for lv, k in zip(levels, keep) if k]
    vx = basis_matrix(kept, np.atleast_2d(np.asarray(x, dtype=float)))[:, 0]
    vy = basis_matrix(kept, np.atleast_2d(np.asarray(y, dtype=float)))[:, 0]
    value = float(np.sum(w[keep] * vx * vy))
    tail = WEIGHT_CUTOFF * _weyl_count(surface, lam_hi) / surface.volume
    return KernelValue(value=value, tail_bound=tail, n_terms=int(keep.sum()))


def _kernel_on_sphere_meridian(window, lam, rs, T: float = 1.0):
    """Kernel K(pole, y(r)) for an array of distances r (vectorized)."""
    sf = SurfaceModel(kind=SPHERE, volume=4.0 * math.pi)
    ustar = window.tail_cutoff(WEIGHT_CUTOFF)
    L = int(math.ceil(lam + ustar / T + 2))
    ls = np.arange(L + 1)
    lams = np.sqrt(ls * (ls + 1.0))
    w = _chi_weights(window, lam, lams, T)
    keep = w >= WEIGHT_CUTOFF
    # only m = 0 survives at the pole: K(r) = sum_l w_l Pbar_l0(1) Pbar_l0(cos r)
    from .surfaces import legendre_norm_all
    rs = np.atleast_1d(np.asarray(rs, dtype=float))
    P = legendre_norm_all(L, np.cos(rs))
    pole = legendre_norm_all(L, np.array([1.0]))[:, 0, 0]
    return (w[keep, None] * pole[keep, None] * P[keep, 0, :]).sum(axis=0)


def _kernel_on_torus(window, lam, ds, T: float = 1.0):
    """Torus kernel K(x, y) for an array of displacement vectors d = x - y."""
    ustar = window.tail_cutoff(WEIGHT_CUTOFF)
    kmax = int(math.ceil(lam + ustar / T + 1))
    ks = np.arange(-kmax, kmax + 1)
    KX, KY = np.meshgrid(ks, ks, indexing="ij")
    kx, ky = KX.ravel(), KY.ravel()
    nrm = np.hypot(kx, ky)
    w = _chi_weights(window, lam, nrm, T)
    keep = w >= WEIGHT_CUTOFF
    kx, ky, w = kx[keep], ky[keep], w[keep]
    ds = np.atleast_2d(np.asarray(ds, dtype=float))
    out = np.empty(len(ds))
    for i, d in enumerate(ds):
        out[i] = np.sum(w * np.cos(kx * d[0] + ky * d[1]))
    return out / (4.0 * math.pi ** 2)


def kernel_envelope(surface: SurfaceModel, window: SchwartzWindow, lam: float,
                    r: float, T: float = 1.0):
    """(raw |K(r)|, oscillation-free envelope) at geodesic distance r.

    The envelope is sqrt(K(r)^2 + K(r + pi/(2 lam))^2): sampling a
    quarter period apart turns the cos(lam r + phase) factor into a
    quadrature pair, so the amplitude comes out whole even at nulls.
    """
    rshift = r + math.pi / (2.0 * lam)
    if surface.kind == SPHERE:
        k0, k1 = _kernel_on_sphere_meridian(window, lam, np.array([r, rshift]), T)
    elif surface.kind == TORUS:
        k0, k1 = _kernel_on_torus(window, lam, np.array([[r, 0.0], [rshift, 0.0]]), T)
    else:
        raise ValueError(surface.kind)
    return abs(k0), math.hypot(k0, k1)


def kernel_scaling_check(surface: SurfaceModel, window: SchwartzWindow,
                         lams: Sequence[float], rs: Sequence[float]):
    """Table of |K| r^{1/2} / lam^{1/2} over a (lam, r) grid.

    Returns a list of rows (lam, r, raw_ratio, envelope_ratio) plus the
    max envelope ratio. Raw samples sit on an oscillation and can dip to
    zero; the envelope column is the meaningful bounded quantity.
    """
    rows = []
    for lam in lams:
        for r in rs:
            raw, env = kernel_envelope(surface, window, lam, r)
            scale = math.sqrt(r) / math.sqrt(lam)
            rows.append((lam, r, raw * scale, env * scale))
    max_ratio = max(row[3] for row in rows)
    return rows, max_ratio


def diagonal_kernel(surface: SurfaceModel, window: SchwartzWindow, lam: float,
                    point=None) -> float:
    """K(x, x); grows like lam with a stable constant."""
    if surface.kind == SPHERE:
        return float(_kernel_on_sphere_meridian(window, lam, np.array([0.0]))[0])
    return float(_kernel_on_torus(window, lam, np.array([[0.0, 0.0]]))[0])


def bilinear_geodesic_form(surface: SurfaceModel, window: SchwartzWindow,
                           lam: float, curve, b: TestWindowB,
                           T: Optional[float] = None) -> float:
    """Double quadrature of b(t) b(s) K(curve(t), curve(s)); K built pointwise.

    The kernel matrix on the quadrature grid is assembled from basis
    values at the curve nodes, then contracted with the window weights
    on both axes.
    """
    Tw = 1.0 if T is None else float(T)
    ustar = window.tail_cutoff(WEIGHT_CUTOFF)
    levels = enumerate_spectrum(surface, lam + ustar / Tw)
    lams = np.array([lv.lam for lv in levels])
    w = _chi_weights(window, lam, lams, Tw)
    keep = w >= WEIGHT_CUTOFF
    kept = [lv for lv, k in zip(levels, keep) if k]

    t0, t1 = b.support
    panels = oscillatory_panels(lam + ustar / Tw, t1 - t0, min_panels=4)
    nodes, wts = panel_nodes(t0, t1, panels, order=12)
    bw = wts * b(nodes)
    E = basis_matrix(kept, curve(nodes))          # (n_modes, n_nodes)
    kernel = (E * w[keep, None]).T @ E            # K(t_i, t_j)
    return float(bw @ kernel @ bw)


def orthogonality_identity_gap(surface: SurfaceModel, window: SchwartzWindow,
                               lam: float, curve, b: TestWindowB,
                               T: Optional[float] = None) -> float:
    """Relative gap between the bilinear form and sum_j chi |pairing_j|^2.

    The right side computes every windowed pairing on its own finer
    quadrature rule (higher order, half again as many panels), so the
    two sides travel different numerical paths before meeting.
    """
    Tw = 1.0 if T is None else float(T)
    lhs = bilinear_geodesic_form(surface, window, lam, curve, b, T=T)
    ustar = window.tail_cutoff(WEIGHT_CUTOFF)
    levels = enumerate_spectrum(surface, lam + ustar / Tw)
    lams = np.array([lv.lam for lv in levels])
    w = _chi_weights(window, lam, lams, Tw)
    keep = w >= WEIGHT_CUTOFF
    kept = [lv for lv, k in zip(levels, keep) if k]
    t0, t1 = b.support
    panels = int(1.5 * oscillatory_panels(lam + ustar / Tw, t1 - t0, min_panels=4)) + 1
    nodes, wts = panel_nodes(t0, t1, panels, order=16)
    pairings = basis_matrix(kept, curve(nodes)) @ (wts * b(nodes))
    rhs = float(np.sum(w[keep] * pairings ** 2))
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


# ---------------------------------------------------------------------------
# circle transform and flat comparison kernels


def circle_ft(y: float, n_min: int = 256) -> CircleFTDecomposition:
    """Transform of circle arc measure by periodic trapezoid quadrature."""
    if y < 0:
        raise ValueError("y must be nonnegative")
    n = max(n_min, int(8 * y))
    th = np.arange(n) * (2.0 * math.pi / n)
    value = complex(np.sum(np.exp(1j * y * np.cos(th)))) * (2.0 * math.pi / n)
    if y < 1.0:
        return CircleFTDecomposition(y=y, value=value)
    # quarter-period pair -> quadrature components of the envelope
    y2 = y + math.pi / 2.0
    n2 = max(n_min, int(8 * y2))
    th2 = np.arange(n2) * (2.0 * math.pi / n2)
    v2 = complex(np.sum(np.exp(1j * y2 * np.cos(th2)))) * (2.0 * math.pi / n2)
    v1r = math.sqrt(y) * value.real
    v2r = math.sqrt(y2) * v2.real
    a_plus = 0.5 * (v1r - 1j * v2r) * np.exp(-1j * y)
    return CircleFTDecomposition(y=y, value=value, a_plus=a_plus,
                                 a_minus=np.conj(a_plus))


@dataclass(frozen=True)
class ComparisonKernels:
    """Radial kernels K0 (full chi window) and K1 (beta-localized part)."""

    T: float
    lam: float
    r: float
    k0: float
    k1: float
    k0_neg_freq: float
    b0_plus: complex
    b1_plus: complex


def _radial_kernel(multiplier, lam_center: float, halfwidth: float, r: float) -> float:
    """int_0^inf m(rho) 2 pi J0(r rho) rho drho for a window m around lam_center."""
    lo = max(0.0, lam_center - halfwidth)
    hi = lam_center + halfwidth
    if hi <= lo:
        return 0.0
    panels = max(8, int(math.ceil((r + 0.2) * (hi - lo) / (2.0 * math.pi) * 1.5)) + 8)
    rho, w = panel_nodes(lo, hi, panels, order=16)
    return float(np.sum(w * multiplier(rho) * 2.0 * math.pi * j0(r * rho) * rho))


def comparison_kernels(T: float, lam: float, r: float,
                       window: SchwartzWindow, beta: Optional[CutoffBeta] = None
                       ) -> ComparisonKernels:
    """K0, K1 at radius r with amplitude extraction.

    K0 uses the multiplier T chi(T(lam -+ rho)); K1 replaces the window
    by its beta-localized part psi_T. Amplitudes b_plus come from the
    kernel at r and at r + pi/(2 lam) (the quarter-period pair; sampling
    half a period apart only flips the sign and leaves the 2x2 system
    singular). |b_plus| stays bounded uniformly in (T, lam, r).
    """
    if min(T, lam) < 1.0 or r <= 0.0:
        raise ValueError("require T, lam >= 1 and r > 0")
    beta = beta if beta is not None else make_beta()
    dw = derive_windows(window, beta, T)
    ustar = window.tail_cutoff(WEIGHT_CUTOFF)
    hw = ustar / T + 1.0
    # psi_T/phi_T tails die much more slowly than T chi(T .): reach further
    hw_split = max(hw, 240.0)

    def m0(rho):
        return T * window.chi(T * (lam - rho))

    def m1(rho):
        return dw.psi_T(lam - rho) + dw.psi_T(lam + rho)

    def m0_neg(rho):
        return T * window.chi(T * (lam + rho))

    def k0_at(rr):
        return _radial_kernel(m0, lam, hw, rr)

    def k1_at(rr):
        return _radial_kernel(m1, lam, hw_split, rr)

    k0 = k0_at(r)
    k1 = k1_at(r)
    # negative-frequency branch: support near rho = -lam, nothing on rho >= 0
    neg = _radial_kernel(m0_neg, 0.0, max(0.0, ustar / T - lam) + 0.5, r)

    rq = r + math.pi / (2.0 * lam)

    def extract(f, v1):
        if abs(v1) < 1e-7:  # kernel support ends at T/2; amplitude is zero out here
            return 0.0 + 0.0j
        v2 = f(rq)
        z1 = v1 * math.sqrt(r) / math.sqrt(lam)
        z2 = v2 * math.sqrt(rq) / math.sqrt(lam)
        return 0.5 * (z1 - 1j * z2) * np.exp(-1j * lam * r)

    return ComparisonKernels(
        T=T, lam=lam, r=r, k0=k0, k1=k1, k0_neg_freq=neg,
        b0_plus=extract(k0_at, k0), b1_plus=extract(k1_at, k1),
    )


def phi_windowed_kernel(T: float, lam: float, r: float,
                        window: SchwartzWindow,
                        beta: Optional[CutoffBeta] = None) -> float:
    """Radial kernel built from the (1 - beta) window part phi_T alone."""
    beta = beta if beta is not None else make_beta()
    dw = derive_windows(window, beta, T)
    ustar = window.tail_cutoff(WEIGHT_CUTOFF)

    def m(rho):
        return dw.phi_T(lam - rho) + dw.phi_T(lam + rho)

    return _radial_kernel(m, lam, max(ustar / T + 1.0, 240.0), r)


# ---------------------------------------------------------------------------
# torus unfolding


@dataclass(frozen=True)
class UnfoldingResult:
    eigen_side: float
    image_side: float
    relative_error: float
    images_used: int


def torus_unfolding_check(window: SchwartzWindow, T: float, lam: float,
                          x, y, max_images: Optional[int] = None
                          ) -> UnfoldingResult:
    """Lattice eigen-sum versus the plane-kernel image sum on the torus.

    eigen side: (1/4pi^2) sum_{k in Z^2} [T chi(T(lam-|k|)) +
    T chi(T(lam+|k|))] cos(k.(x-y)); image side: (1/4pi^2) sum over
    lattice translates m of K0(|x - y + 2 pi m|). The two agree by
    Poisson summation. The plane kernel vanishes identically beyond
    radius T/2 (unit propagation speed under the transform-support
    constraint), so only translates inside that radius are summed;
    passing max_images = 0 keeps the m = 0 term alone, which visibly
    breaks the identity once 2 pi - |x-y| < T/2.
    """
    if min(T, lam) < 1.0:
        raise ValueError("require T, lam >= 1")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    ustar = window.tail_cutoff(WEIGHT_CUTOFF)

    # eigen side over the full lattice ball
    kmax = int(math.ceil(lam + ustar / T + 1))
    ks = np.arange(-kmax, kmax + 1)
    KX, KY = np.meshgrid(ks, ks, indexing="ij")
    nrm = np.hypot(KX.ravel(), KY.ravel())
    w = (T * window.chi(T * (lam - nrm)) + T * window.chi(T * (lam + nrm)))
    phase = np.cos(KX.ravel() * d[0] + KY.ravel() * d[1])
    eigen = float(np.sum(w * phase)) / (4.0 * math.pi ** 2)

    def m0(rho):
        return (T * window.chi(T * (lam - rho)) + T * window.chi(T * (lam + rho)))

    hw = ustar / T + 1.0
    image = 0.0
    used = 0
    support = T / 2.0 + 0.25
    for mx in range(-2, 3):
        for my in range(-2, 3):
            if max_images is not None and max(abs(mx), abs(my)) > max_images:
                continue
            R = math.hypot(d[0] + 2.0 * math.pi * mx, d[1] + 2.0 * math.pi * my)
            if R > support:
                continue
            used += 1
            if R < 1e-12:
                rho, wq = panel_nodes(max(0.0, lam - hw), lam + hw, 64, order=16)
                image += float(np.sum(wq * m0(rho) * 2.0 * math.pi * rho))
            else:
                image += _radial_kernel(m0, lam, hw, R)
    image /= 4.0 * math.pi ** 2
    rel = abs(eigen - image) / max(abs(eigen), 1e-300)
    return UnfoldingResult(eigen_side=eigen, image_side=image,
                           relative_error=rel, images_used=used)
