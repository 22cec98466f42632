"""Model surfaces with fully explicit spectra: the round sphere and flat torus.

Both surfaces carry a complete real orthonormal eigenbasis of the
Laplace-Beltrami operator, written -Delta e = lam^2 e so that lam is the
eigenvalue of sqrt(-Delta):

  sphere (radius 1):  real spherical harmonics, lam = sqrt(l(l+1)),
                      multiplicity 2l+1 per degree l;
  torus ([0,2pi)^2):  1/(2pi) constant mode plus cos(k.x)/(pi sqrt 2),
                      sin(k.x)/(pi sqrt 2) for one representative k of
                      each {k, -k} pair, lam = |k|.

Sphere points are unit 3-vectors; torus points live in [0, 2pi)^2.
Normalized associated Legendre functions are evaluated by upward
recurrence in degree at fixed order, stable through degree ~400.

Everything here is immutable and the evaluators are pure; batch versions
(`basis_matrix`, `legendre_norm_all`) are the workhorses for the sweep
modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from ._quadrature import gl_nodes, panel_nodes

SPHERE = "sphere"
TORUS = "torus"


@dataclass(frozen=True)
class SurfaceModel:
    kind: str
    volume: float


def sphere() -> SurfaceModel:
    return SurfaceModel(kind=SPHERE, volume=4.0 * math.pi)


def flat_torus() -> SurfaceModel:
    return SurfaceModel(kind=TORUS, volume=4.0 * math.pi ** 2)


@dataclass(frozen=True)
class EigenLevel:
    """One real orthonormal basis eigenfunction.

    quantum_numbers:
      sphere: ("sphere", l, m) with -l <= m <= l (m<0 are the sine branch);
      torus:  ("torus", k1, k2, tag) with tag in {"const", "cos", "sin"}.
    """

    surface: SurfaceModel
    index: int
    lam: float
    quantum_numbers: tuple

    @property
    def level_key(self) -> int:
        """Integer label of the eigenvalue level (degree l, or |k|^2)."""
        q = self.quantum_numbers
        if q[0] == SPHERE:
            return q[1]
        return int(q[1] * q[1] + q[2] * q[2])


def enumerate_spectrum(surface: SurfaceModel, lambda_max: float) -> list[EigenLevel]:
    """All basis eigenfunctions with lam <= lambda_max, sorted."""
    if lambda_max < 0:
        raise ValueError("lambda_max must be nonnegative")
    levels: list[EigenLevel] = []
    if surface.kind == SPHERE:
        l = 0
        while math.sqrt(l * (l + 1.0)) <= lambda_max:
            lam = math.sqrt(l * (l + 1.0))
            for m in range(-l, l + 1):
                levels.append(EigenLevel(surface, 0, lam, (SPHERE, l, m)))
            l += 1
        levels.sort(key=lambda e: (e.lam, e.quantum_numbers[1], e.quantum_numbers[2]))
    elif surface.kind == TORUS:
        levels.append(EigenLevel(surface, 0, 0.0, (TORUS, 0, 0, "const")))
        kmax = int(math.floor(lambda_max))
        for k1 in range(-kmax, kmax + 1):
            for k2 in range(-kmax, kmax + 1):
                if (k1, k2) == (0, 0):
                    continue
                # one representative per {k, -k} pair
                if not (k1 > 0 or (k1 == 0 and k2 > 0)):
                    continue
                lam = math.hypot(k1, k2)
                if lam <= lambda_max:
                    levels.append(EigenLevel(surface, 0, lam, (TORUS, k1, k2, "cos")))
                    levels.append(EigenLevel(surface, 0, lam, (TORUS, k1, k2, "sin")))
        levels.sort(key=lambda e: (e.lam, e.quantum_numbers[1], e.quantum_numbers[2],
                                   e.quantum_numbers[3]))
    else:
        raise ValueError(f"unknown surface kind {surface.kind!r}")
    return [EigenLevel(surface, i, lv.lam, lv.quantum_numbers)
            for i, lv in enumerate(levels)]


def legendre_norm_all(L: int, x) -> np.ndarray:
    """Normalized associated Legendre values Pbar_{lm}(x) for all l,m <= L.

    Pbar is scaled so the real spherical harmonics are
      Y_{l0} = Pbar_{l0}(cos th),  Y_{l,+-m} = sqrt2 Pbar_{lm}(cos th) {cos,sin}(m ph),
    i.e. Pbar_{lm} = sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m. Returned array
    has shape (L+1, L+1, len(x)); entries with m > l are zero. Upward
    recurrence in l at fixed m; the normalization keeps every value O(1)
    so degrees up to ~400 are safe.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    P = np.zeros((L + 1, L + 1, len(x)))
    sx = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    pmm = np.full(len(x), math.sqrt(1.0 / (4.0 * math.pi)))
    for m in range(L + 1):
        P[m, m] = pmm
        if m + 1 <= L:
            P[m + 1, m] = math.sqrt(2.0 * m + 3.0) * x * pmm
            for l in range(m + 2, L + 1):
                a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
                b = math.sqrt((2.0 * l + 1.0) * ((l - 1.0) ** 2 - m * m)
                              / ((2.0 * l - 3.0) * (l * l - m * m)))
                P[l, m] = a * x * P[l - 1, m] - b * P[l - 2, m]
        if m < L:
            pmm = pmm * sx * math.sqrt((2.0 * m + 3.0) / (2.0 * m + 2.0))
    return P


def _sphere_angles(points: np.ndarray):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    nrm = np.linalg.norm(pts, axis=-1, keepdims=True)
    pts = pts / nrm
    theta = np.arccos(np.clip(pts[:, 2], -1.0, 1.0))
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    return theta, phi


def eval_eigenfunction(level: EigenLevel, point) -> float:
    """Value of the real orthonormal basis function at a surface point."""
    return float(basis_matrix([level], np.atleast_2d(np.asarray(point, float)))[0, 0])


def basis_matrix(levels: list[EigenLevel], points: np.ndarray) -> np.ndarray:
    """Matrix of basis values, shape (len(levels), npoints).

    Sphere: one shared Legendre recurrence sweep serves every level.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = len(points)
    out = np.zeros((len(levels), n))
    if not levels:
        return out
    kind = levels[0].surface.kind
    if kind == SPHERE:
        theta, phi = _sphere_angles(points)
        L = max(lv.quantum_numbers[1] for lv in levels)
        P = legendre_norm_all(L, np.cos(theta))
        mmax = max(abs(lv.quantum_numbers[2]) for lv in levels)
        ms = np.arange(1, mmax + 1)
        cosm = np.cos(np.outer(ms, phi)) if mmax else np.empty((0, n))
        sinm = np.sin(np.outer(ms, phi)) if mmax else np.empty((0, n))
        sq2 = math.sqrt(2.0)
        for i, lv in enumerate(levels):
            _, l, m = lv.quantum_numbers
            if m == 0:
                out[i] = P[l, 0]
            elif m > 0:
                out[i] = sq2 * P[l, m] * cosm[m - 1]
            else:
                out[i] = sq2 * P[l, -m] * sinm[-m - 1]
    elif kind == TORUS:
        inv_vol_sqrt = 1.0 / (2.0 * math.pi)
        for i, lv in enumerate(levels):
            _, k1, k2, tag = lv.quantum_numbers
            if tag == "const":
                out[i] = inv_vol_sqrt
            else:
                arg = k1 * points[:, 0] + k2 * points[:, 1]
                vals = np.cos(arg) if tag == "cos" else np.sin(arg)
                out[i] = vals / (math.pi * math.sqrt(2.0))
    else:
        raise ValueError(f"unknown surface kind {kind!r}")
    return out


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True, eq=False)
class GeodesicSegment:
    """Unit-speed geodesic; `length` is the minimal period (inf if not periodic)."""

    surface: SurfaceModel
    point: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    length: float

    def __call__(self, t):
        return self.point(np.asarray(t, dtype=float))


@dataclass(frozen=True, eq=False)
class UnitCurve:
    """Arc-length parameterized smooth curve of length 1 (domain [-1/2, 1/2])."""

    surface: SurfaceModel
    point: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    length: float = 1.0

    def __call__(self, t):
        return self.point(np.asarray(t, dtype=float))


def great_circle(surface: SurfaceModel, axis) -> GeodesicSegment:
    """Unit-speed great circle with the given (unit) axis vector, period 2 pi."""
    if surface.kind != SPHERE:
        raise ValueError("great_circle requires the sphere")
    u = np.asarray(axis, dtype=float)
    nu = np.linalg.norm(u)
    if nu < 1e-12:
        raise ValueError("axis must be a nonzero vector")
    u = u / nu
    seed = np.array([1.0, 0.0, 0.0])
    if abs(u @ seed) > 0.99:
        seed = np.array([0.0, 1.0, 0.0])
    e1 = seed - (seed @ u) * u
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)

    def point(t):
        t = np.asarray(t, dtype=float)
        return np.outer(np.cos(t), e1) + np.outer(np.sin(t), e2)

    return GeodesicSegment(surface=surface, point=point, length=2.0 * math.pi)


def torus_line(surface: SurfaceModel, start, direction) -> GeodesicSegment:
    """Unit-speed straight line on the torus.

    A rational-slope direction yields a periodic geodesic with period
    2 pi sqrt(p^2 + q^2) for the reduced integer direction (p, q);
    irrational slopes are flagged non-periodic (length = inf).
    """
    if surface.kind != TORUS:
        raise ValueError("torus_line requires the flat torus")
    x0 = np.asarray(start, dtype=float)
    d = np.asarray(direction, dtype=float)
    nd = np.linalg.norm(d)
    if nd < 1e-12:
        raise ValueError("direction must be a nonzero vector")
    d = d / nd

    length = math.inf
    if abs(d[0]) < 1e-15 or abs(d[1]) < 1e-15:
        length = 2.0 * math.pi
    else:
        slope = Fraction(float(d[1] / d[0])).limit_denominator(1000)
        if abs(float(slope) - d[1] / d[0]) < 1e-9:
            p, q = slope.denominator, slope.numerator  # direction ~ (p, q)
            g = math.gcd(abs(p), abs(q))
            p, q = p // g, q // g
            length = 2.0 * math.pi * math.hypot(p, q)

    def point(t):
        t = np.asarray(t, dtype=float)
        return np.mod(x0[None, :] + np.outer(t, d), 2.0 * math.pi)

    return GeodesicSegment(surface=surface, point=point, length=length)


def geodesic_distance(surface: SurfaceModel, x, y) -> float:
    """Riemannian distance between two surface points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if surface.kind == SPHERE:
        xn = x / np.linalg.norm(x)
        yn = y / np.linalg.norm(y)
        return float(np.arccos(np.clip(xn @ yn, -1.0, 1.0)))
    if surface.kind == TORUS:
        best = math.inf
        for mx in (-2.0 * math.pi, 0.0, 2.0 * math.pi):
            for my in (-2.0 * math.pi, 0.0, 2.0 * math.pi):
                best = min(best, math.hypot(x[0] - y[0] + mx, x[1] - y[1] + my))
        return best
    raise ValueError(f"unknown surface kind {surface.kind!r}")


def perturbed_equator(eps: float = 0.05, halfspan: float = 1.0) -> UnitCurve:
    """Unit-length non-geodesic curve: the equator displaced by eps*sin(2u).

    The latitude displacement is re-parameterized to unit speed by Newton
    inversion of the arc-length integral on a dense cumulative table.
    """
    sf = sphere()

    def base(u):
        u = np.asarray(u, dtype=float)
        th = eps * np.sin(2.0 * u)
        return np.stack([np.cos(th) * np.cos(u), np.cos(th) * np.sin(u),
                         np.sin(th)], axis=-1)

    def speed(u):
        u = np.asarray(u, dtype=float)
        th = eps * np.sin(2.0 * u)
        dth = 2.0 * eps * np.cos(2.0 * u)
        # |d base/du|^2 = cos^2(th) + dth^2 on the unit sphere
        return np.sqrt(np.cos(th) ** 2 + dth ** 2)

    # cumulative arc length on [-halfspan, halfspan] by panelized quadrature
    npanels = 2048
    edges = np.linspace(-halfspan, halfspan, npanels + 1)
    nodes01, wts01 = gl_nodes(0.0, 1.0, 16)
    widths = np.diff(edges)
    seg = (speed(edges[:-1, None] + widths[:, None] * nodes01[None, :])
           @ wts01) * widths
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    s_of_u = cum - np.interp(0.0, edges, cum)  # arc length zero at u = 0

    def u_of_s(s):
        s = np.asarray(s, dtype=float)
        u = np.interp(s, s_of_u, edges)
        # Newton on the true arc length, quadrature taken from the panel edge
        for _ in range(4):
            j = np.clip(np.searchsorted(edges, u) - 1, 0, npanels - 1)
            du = u - edges[j]
            partial = (speed(edges[j][..., None] + du[..., None] * nodes01)
                       @ wts01) * du
            f = s_of_u[j] + partial - s
            u = u - f / speed(u)
        return u

    def point(t):
        return base(u_of_s(np.asarray(t, dtype=float)))

    return UnitCurve(surface=sf, point=point)


def surface_quadrature(surface: SurfaceModel, n_theta: int = 128, n_phi: int = 256):
    """Product quadrature (points, weights) integrating over the surface.

    Sphere: Gauss-Legendre in theta against the sin(theta) Jacobian and a
    uniform periodic rule in phi. Torus: uniform rule in both coordinates
    (trapezoid, spectrally accurate for trigonometric integrands).
    """
    if surface.kind == SPHERE:
        tn, tw = gl_nodes(0.0, math.pi, n_theta)
        ph = np.arange(n_phi) * (2.0 * math.pi / n_phi)
        TH, PH = np.meshgrid(tn, ph, indexing="ij")
        pts = np.stack([np.sin(TH) * np.cos(PH), np.sin(TH) * np.sin(PH),
                        np.cos(TH)], axis=-1).reshape(-1, 3)
        wts = (tw[:, None] * np.sin(tn)[:, None]
               * np.full((1, n_phi), 2.0 * math.pi / n_phi)).ravel()
        return pts, wts
    if surface.kind == TORUS:
        xs = np.arange(n_theta) * (2.0 * math.pi / n_theta)
        ys = np.arange(n_phi) * (2.0 * math.pi / n_phi)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        pts = np.stack([X, Y], axis=-1).reshape(-1, 2)
        wts = np.full(len(pts), (2.0 * math.pi) ** 2 / len(pts))
        return pts, wts
    raise ValueError(f"unknown surface kind {surface.kind!r}")
