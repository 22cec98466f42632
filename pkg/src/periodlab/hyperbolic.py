"""Hyperbolic-plane geometry, the Bolza group, and distance phase functions.

Points live on the hyperboloid x0^2 - x1^2 - x2^2 = 1, x0 > 0, with the
Minkowski pairing <p,q> = p0 q0 - p1 q1 - p2 q2 and distance
d(p, q) = arccosh <p,q>. Isometries are SO+(2,1) matrices; the inverse
of an isometry is J M^T J with J = diag(1,-1,-1), which is what
`inverse` uses (no linear solves, exact up to rounding).

The Bolza group: the genus-2 surface obtained from the regular
hyperbolic octagon (vertex angle pi/4) with opposite sides identified.
Side pairings are the four translations of length 2 arccosh(1 + sqrt 2)
along the axes through the origin at angles k pi/4, k = 0..3. These
satisfy the octagon relation

    g0 g1^-1 g2 g3^-1 g0^-1 g1 g2^-1 g3 = 1,

and the equivalent two-commutator presentation is carried by the basis

    h1 = g2, h2 = g3^-1, h3 = g0 g1^-1, h4 = g2 g3^-1 g0^-1,

with [h1, h2][h3, h4] = 1 (both relations verified numerically at
construction; the commutator quadruple generates, since
g0 = h4^-1 h1 h2 and g1 = h3^-1 g0).

Ball enumeration is breadth-first over generator products, deduplicated
on a 1e-6 matrix grid, pruned at displacement T + R0 + 0.25 where R0 is
the octagon circumradius: any group element within displacement T is
reachable through prefixes whose orbit points stay within R0 of the
geodesic from the origin to its orbit point, so the prune keeps every
needed intermediate. The closure of the search (word length L versus
L+2) is part of the acceptance checks.

Phase functions phi(t, s) = d(geo1(t), alpha(geo2(s))) carry analytic
gradient and Hessian entries through the Minkowski pairing calculus;
critical points (feet of common perpendiculars) are located by Newton
iteration from a 16 x 16 seed grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

J_METRIC = np.diag([1.0, -1.0, -1.0])
SYSTOLE = 2.0 * math.acosh(1.0 + math.sqrt(2.0))
OCTAGON_CIRCUMRADIUS = math.acosh(3.0 + 2.0 * math.sqrt(2.0))
ENUM_SLACK = OCTAGON_CIRCUMRADIUS + 0.25
DEDUP_GRID = 1e-6
MAX_ENUM_RADIUS = 25.0

ORIGIN = np.array([1.0, 0.0, 0.0])


def normalize_hpoint(p) -> np.ndarray:
    """Project onto the hyperboloid (rescales x0 from the space part)."""
    p = np.asarray(p, dtype=float)
    out = p.copy()
    out[..., 0] = np.sqrt(1.0 + p[..., 1] ** 2 + p[..., 2] ** 2)
    return out


def hpoint(x1: float, x2: float) -> np.ndarray:
    """Hyperboloid point over planar coordinates (x1, x2)."""
    return np.array([math.sqrt(1.0 + x1 * x1 + x2 * x2), x1, x2])


def from_disk(z1: float, z2: float) -> np.ndarray:
    """Poincare-disk point -> hyperboloid."""
    r2 = z1 * z1 + z2 * z2
    if r2 >= 1.0:
        raise ValueError("disk point must satisfy |z| < 1")
    d = 1.0 - r2
    return np.array([(1.0 + r2) / d, 2.0 * z1 / d, 2.0 * z2 / d])


def mdot(p, q):
    """Minkowski pairing <p, q> = p0 q0 - p1 q1 - p2 q2 (vectorized)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return (p[..., 0] * q[..., 0] - p[..., 1] * q[..., 1]
            - p[..., 2] * q[..., 2])


def hyp_distance(p, q):
    """Hyperbolic distance arccosh <p, q>; raises if the pairing is < 1."""
    u = mdot(p, q)
    if np.any(u < 1.0 - 1e-9):
        raise ValueError("Minkowski pairing below 1: points not on the sheet")
    return np.arccosh(np.maximum(u, 1.0))


@dataclass(frozen=True, eq=False)
class DeckTransform:
    matrix: np.ndarray
    word: str = ""
    displacement: float = None

    def __post_init__(self):
        if self.displacement is None:
            object.__setattr__(
                self, "displacement",
                float(np.arccosh(max(self.matrix[0, 0], 1.0))))

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        return p @ self.matrix.T

    def inverse(self) -> "DeckTransform":
        return DeckTransform(matrix=J_METRIC @ self.matrix.T @ J_METRIC,
                             word=_invert_word(self.word))

    def compose(self, other: "DeckTransform") -> "DeckTransform":
        return DeckTransform(matrix=self.matrix @ other.matrix,
                             word=self.word + other.word)

    def is_identity(self, tol: float = 1e-9) -> bool:
        return bool(np.max(np.abs(self.matrix - np.eye(3))) < tol)

    def form_residual(self) -> float:
        """|M^T J M - J|: deviation from the isometry group."""
        m = self.matrix
        return float(np.max(np.abs(m.T @ J_METRIC @ m - J_METRIC)))


def _invert_word(word: str) -> str:
    return word[::-1].swapcase()


def _x_translation(length: float) -> np.ndarray:
    c, s = math.cosh(length), math.sinh(length)
    return np.array([[c, s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


@dataclass(frozen=True, eq=False)
class FuchsianGroup:
    """The Bolza deck group: side pairings, commutator basis, basepoint."""

    side_pairings: tuple          # g0..g3 and inverses (8 transforms)
    generators: tuple             # commutator basis h1..h4 and inverses
    basepoint: np.ndarray
    commutator_residual: float
    octagon_residual: float

    @property
    def systole(self) -> float:
        return SYSTOLE


def _bolza_raw(dtype=float):
    """The four side-pairing translations at the requested precision."""
    one = dtype(1.0)
    sqrt2 = np.sqrt(dtype(2.0))
    length = 2.0 * np.arccosh(one + sqrt2)
    pi = dtype(np.pi) if dtype is not float else math.pi
    out = []
    for k in range(4):
        th = dtype(k) * pi / dtype(4.0)
        c, s = np.cos(th), np.sin(th)
        rot = np.array([[one, 0 * one, 0 * one],
                        [0 * one, c, -s],
                        [0 * one, s, c]])
        ch, sh = np.cosh(length), np.sinh(length)
        tr = np.array([[ch, sh, 0 * one],
                       [sh, ch, 0 * one],
                       [0 * one, 0 * one, one]])
        out.append(rot @ tr @ rot.T)
    return out


def _relation_residuals(dtype=np.longdouble):
    """Residuals of the octagon and two-commutator relations.

    Evaluated in extended precision: the words run through matrix
    entries of size cosh(~18), which amplifies rounding by ~1e7; plain
    doubles would leave the certificate near 1e-8.
    """
    gs = _bolza_raw(dtype)
    J = np.array(J_METRIC, dtype=dtype)

    def inv(m):
        return J @ m.T @ J

    eye = np.eye(3, dtype=dtype)
    word = (gs[0] @ inv(gs[1]) @ gs[2] @ inv(gs[3])
            @ inv(gs[0]) @ gs[1] @ inv(gs[2]) @ gs[3])
    octagon = float(np.max(np.abs(word - eye)))

    h1, h2 = gs[2], inv(gs[3])
    h3 = gs[0] @ inv(gs[1])
    h4 = gs[2] @ inv(gs[3]) @ inv(gs[0])

    def comm(a, b):
        return a @ b @ inv(a) @ inv(b)

    rel = comm(h1, h2) @ comm(h3, h4)
    commutator = float(np.max(np.abs(rel - eye)))
    return octagon, commutator


@lru_cache(maxsize=1)
def bolza_group() -> FuchsianGroup:
    """Construct the Bolza group and certify its defining relations."""
    mats = _bolza_raw(float)
    gs = [DeckTransform(matrix=m, word="abcd"[k]) for k, m in enumerate(mats)]
    gi = [g.inverse() for g in gs]
    octagon_residual, commutator_residual = _relation_residuals()

    # two-commutator basis: [h1,h2][h3,h4] = 1, and the quadruple
    # generates (g0 = h4^-1 h1 h2, g1 = h3^-1 g0)
    h1 = gs[2]
    h2 = gi[3]
    h3 = gs[0].compose(gi[1])
    h4 = gs[2].compose(gi[3]).compose(gi[0])
    hs = (h1, h2, h3, h4)

    return FuchsianGroup(
        side_pairings=tuple(gs + gi),
        generators=hs + tuple(h.inverse() for h in hs),
        basepoint=ORIGIN.copy(),
        commutator_residual=commutator_residual,
        octagon_residual=octagon_residual,
    )


def _key_rows(mats: np.ndarray) -> np.ndarray:
    k = np.round(mats.reshape(-1, 9) / DEDUP_GRID).astype(np.int64)
    return np.ascontiguousarray(k).view([("", np.int64)] * 9).ravel()


def enumerate_deck(group: FuchsianGroup, T: float,
                   max_word_len: Optional[int] = None) -> list[DeckTransform]:
    """Every deck transformation with displacement <= T, identity included.

    Breadth-first over side-pairing products with displacement pruning;
    sorted by displacement. Deduplication quantizes matrix entries on a
    1e-6 grid (distinct elements differ at systole scale, far above it).
    """
    if T < 0:
        raise ValueError("T must be nonnegative")
    if T > MAX_ENUM_RADIUS:
        raise ValueError(f"enumeration beyond T = {MAX_ENUM_RADIUS} blows up "
                         "exponentially; refusing")
    gens = np.stack([g.matrix for g in group.side_pairings])
    cosh_max = math.cosh(T + ENUM_SLACK)

    all_mats = np.eye(3)[None]
    seen = np.sort(_key_rows(all_mats))
    frontier = all_mats.copy()
    depth = 0
    while len(frontier):
        depth += 1
        if max_word_len is not None and depth > max_word_len:
            break
        prod = np.einsum("fij,gjk->fgik", frontier, gens).reshape(-1, 3, 3)
        prod = prod[prod[:, 0, 0] <= cosh_max]
        if not len(prod):
            break
        keys = _key_rows(prod)
        _, first = np.unique(keys, return_index=True)
        prod, keys = prod[first], keys[first]
        novel = ~np.isin(keys, seen)
        prod = prod[novel]
        if not len(prod):
            break
        all_mats = np.concatenate([all_mats, prod])
        seen = np.sort(np.concatenate([seen, keys[novel]]))
        frontier = prod

    disp = np.arccosh(np.maximum(all_mats[:, 0, 0], 1.0))
    sel = disp <= T + 1e-12
    mats, disp = all_mats[sel], disp[sel]
    order = np.argsort(disp, kind="stable")
    return [DeckTransform(matrix=mats[i], displacement=float(disp[i]))
            for i in order]


def dirichlet_contains(group: FuchsianGroup, p, T_check: float) -> bool:
    """Is p strictly closer to the origin than to every orbit point?

    Sufficiency of the enumeration radius: any alpha moving p closer
    satisfies d(O, alpha O) < 2 d(O, p), so T_check >= 2 d(O, p) plus a
    margin sees every competitor. Ties within 1e-9 count as boundary,
    reported as not contained (the open domain).
    """
    p = np.asarray(p, dtype=float)
    d0 = float(hyp_distance(ORIGIN, p))
    if T_check < 2.0 * d0:
        raise ValueError("enumeration radius too small to certify membership")
    for alpha in enumerate_deck(group, T_check):
        if alpha.is_identity():
            continue
        if hyp_distance(ORIGIN, alpha(p)) < d0 + 1e-9:
            return False
    return True


# ---------------------------------------------------------------------------
# geodesics and phases


@dataclass(frozen=True, eq=False)
class HGeodesic:
    """Unit-speed geodesic t -> cosh(t) p0 + sinh(t) v0."""

    p0: np.ndarray
    v0: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return (np.cosh(t)[..., None] * self.p0
                + np.sinh(t)[..., None] * self.v0)

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        return (np.sinh(t)[..., None] * self.p0
                + np.cosh(t)[..., None] * self.v0)


def geodesic_through(p0, v0) -> HGeodesic:
    """Unit-speed geodesic from a point and a tangent direction.

    v0 is projected onto the tangent space at p0 and normalized.
    """
    p0 = normalize_hpoint(p0)
    v0 = np.asarray(v0, dtype=float)
    v0 = v0 - mdot(v0, p0) * p0 * np.array([1.0, 1.0, 1.0])  # <p0,p0> = 1
    # Minkowski-orthogonal projection: v -> v - <v,p>p since <p,p> = 1
    nrm = math.sqrt(max(-mdot(v0, v0), 1e-300))
    if nrm < 1e-12:
        raise ValueError("tangent direction degenerates")
    return HGeodesic(p0=p0, v0=v0 / nrm)


def geodesic_between(p, q) -> HGeodesic:
    """Unit-speed geodesic with gamma(0) = p aimed at q."""
    p = normalize_hpoint(p)
    q = normalize_hpoint(q)
    u = float(mdot(p, q))
    v = (q - u * p) / math.sqrt(max(u * u - 1.0, 1e-300))
    return HGeodesic(p0=p, v0=v)


def translation_along(geo: HGeodesic, length: float) -> DeckTransform:
    """Hyperbolic translation by `length` along the axis of geo."""
    n = np.array([
        geo.p0[1] * geo.v0[2] - geo.p0[2] * geo.v0[1],
        geo.p0[2] * geo.v0[0] - geo.p0[0] * geo.v0[2],
        geo.p0[0] * geo.v0[1] - geo.p0[1] * geo.v0[0],
    ])
    # Minkowski cross product: lower the first index
    n = np.array([n[0], -n[1], -n[2]])
    n = n / math.sqrt(max(-mdot(n, n), 1e-300))
    frame = np.column_stack([geo.p0, geo.v0, n])
    mat = frame @ _x_translation(length) @ np.linalg.inv(frame)
    return DeckTransform(matrix=mat, word="axis")


def stabilizer_shift(alpha: DeckTransform, geo: HGeodesic, ell: float,
                     kmax: int = 5, tol: float = 1e-8) -> Optional[int]:
    """k with alpha(geo(s)) = geo(s + k ell), if any.

    Returns 0 for the identity, a nonzero k for a shift by k periods,
    None when alpha does not stabilize the geodesic. Checked at
    s in {-1/2, 0, 1/2}.
    """
    if alpha.is_identity():
        return 0
    ss = np.array([-0.5, 0.0, 0.5])
    moved = alpha(geo(ss))
    for k in range(-kmax, kmax + 1):
        if k == 0:
            continue
        target = geo(ss + k * ell)
        # coordinate agreement: arccosh of the pairing bottoms out near
        # sqrt(eps)*scale ~ 1e-7 and cannot certify 1e-8 directly
        err = np.max(np.abs(moved - target) / (1.0 + np.abs(target)))
        if float(err) < tol:
            return k
    return None


@dataclass(frozen=True, eq=False)
class PhaseFunction:
    """phi(t, s) = d(geo1(t), alpha(geo2(s))) with analytic derivatives."""

    geo1: HGeodesic
    alpha: DeckTransform
    geo2: HGeodesic

    def _parts(self, t, s):
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        p = self.geo1(t)
        dp = self.geo1.velocity(t)
        q = self.alpha(self.geo2(s))
        dq = self.alpha(self.geo2.velocity(s))
        return p, dp, q, dq

    def value(self, t, s):
        p, _, q, _ = self._parts(t, s)
        return np.arccosh(np.maximum(mdot(p, q), 1.0))

    __call__ = value

    def grad(self, t, s):
        p, dp, q, dq = self._parts(t, s)
        u = mdot(p, q)
        root = np.sqrt(np.maximum(u * u - 1.0, 1e-300))
        return mdot(dp, q) / root, mdot(p, dq) / root

    def hessian(self, t, s):
        """(phi_tt, phi_ts, phi_ss); geodesics satisfy p'' = p."""
        p, dp, q, dq = self._parts(t, s)
        u = mdot(p, q)
        root2 = np.maximum(u * u - 1.0, 1e-300)
        root = np.sqrt(root2)
        ut, us = mdot(dp, q), mdot(p, dq)
        phi_tt = u / root - ut * ut * u / (root * root2)
        phi_ss = u / root - us * us * u / (root * root2)
        phi_ts = mdot(dp, dq) / root - ut * us * u / (root * root2)
        return phi_tt, phi_ts, phi_ss

    def mixed(self, t, s):
        return self.hessian(t, s)[1]


@dataclass(frozen=True)
class CriticalPoint:
    t: float
    s: float
    mixed_hessian: float
    value: float


def find_critical_points(phase: PhaseFunction, box=((-0.5, 0.5), (-0.5, 0.5)),
                         seeds: int = 16, grad_tol: float = 1e-12,
                         max_iter: int = 50, dedup: float = 1e-6
                         ) -> list[CriticalPoint]:
    """Newton search for joint critical points of the distance phase.

    Seeded on a seeds x seeds grid over the box; iterates leaving a
    slightly enlarged box are dropped, survivors need |grad| < 1e-10.
    """
    (t0, t1), (s0, s1) = box
    tg = np.linspace(t0, t1, seeds)
    sg = np.linspace(s0, s1, seeds)
    T, S = np.meshgrid(tg, sg, indexing="ij")
    t = T.ravel().copy()
    s = S.ravel().copy()
    alive = np.ones(len(t), dtype=bool)
    for _ in range(max_iter):
        gt, gs = phase.grad(t[alive], s[alive])
        if not len(gt):
            break
        att, ats, ass_ = phase.hessian(t[alive], s[alive])
        det = att * ass_ - ats * ats
        det = np.where(np.abs(det) < 1e-300, 1e-300, det)
        dt = (ass_ * gt - ats * gs) / det
        ds = (att * gs - ats * gt) / det
        step = np.maximum(np.hypot(dt, ds), 1e-300)
        big = step > 0.5
        dt = np.where(big, dt * (0.5 / step), dt)
        ds = np.where(big, ds * (0.5 / step), ds)
        t[alive] -= dt
        s[alive] -= ds
        pad = 0.15
        inside = ((t >= t0 - pad) & (t <= t1 + pad)
                  & (s >= s0 - pad) & (s <= s1 + pad))
        alive &= inside
        gt_all = np.zeros(len(t))
        gs_all = np.zeros(len(t))
        gt_all[alive], gs_all[alive] = phase.grad(t[alive], s[alive])
        if np.all(np.hypot(gt_all[alive], gs_all[alive]) < grad_tol):
            break

    found: list[CriticalPoint] = []
    gt, gs = phase.grad(t, s)
    ok = alive & (np.hypot(gt, gs) < 1e-10)
    ok &= (t >= t0 - 1e-9) & (t <= t1 + 1e-9) & (s >= s0 - 1e-9) & (s <= s1 + 1e-9)
    for ti, si in zip(t[ok], s[ok]):
        if any(abs(ti - c.t) < dedup and abs(si - c.s) < dedup for c in found):
            continue
        found.append(CriticalPoint(
            t=float(ti), s=float(si),
            mixed_hessian=float(phase.mixed(ti, si)),
            value=float(phase.value(ti, si)),
        ))
    return found


def interior_perpendicular_elements(group: FuchsianGroup, geo: HGeodesic,
                                    T: float = 8.0, margin: float = 0.35,
                                    limit: Optional[int] = None):
    """Ball elements whose common perpendicular with geo lands in the box.

    Returns (alpha, CriticalPoint) pairs for non-stabilizer alpha with
    displacement <= T whose distance phase has its critical point within
    [-margin, margin]^2. Deterministic (ball order is by displacement).
    """
    out = []
    for alpha in enumerate_deck(group, T):
        if alpha.is_identity():
            continue
        if stabilizer_shift(alpha, geo, SYSTOLE) is not None:
            continue
        phase = PhaseFunction(geo1=geo, alpha=alpha, geo2=geo)
        cps = find_critical_points(phase, box=((-3.0, 3.0), (-3.0, 3.0)),
                                   seeds=12)
        for cp in cps:
            if abs(cp.t) <= margin and abs(cp.s) <= margin:
                out.append((alpha, cp))
                break
        if limit is not None and len(out) >= limit:
            break
    return out


def grid_min_phase(phase: PhaseFunction, box=((-0.5, 0.5), (-0.5, 0.5)),
                   n: int = 512) -> float:
    """Dense-grid minimum of phi with one parabolic refinement.

    Derivative-free oracle for the common-perpendicular length; the 3x3
    stencil around the grid argmin is fitted by a quadratic.
    """
    (t0, t1), (s0, s1) = box
    tg = np.linspace(t0, t1, n)
    sg = np.linspace(s0, s1, n)
    vals = np.empty((n, n))
    chunk = max(1, int(2e6 / n))
    for i0 in range(0, n, chunk):
        T, S = np.meshgrid(tg[i0:i0 + chunk], sg, indexing="ij")
        vals[i0:i0 + chunk] = phase.value(T, S)
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    if 0 < i < n - 1 and 0 < j < n - 1:
        # separable parabolic refinement
        fi = vals[i - 1:i + 2, j]
        fj = vals[i, j - 1:j + 2]
        di = 0.5 * (fi[0] - fi[2]) / max(fi[0] - 2 * fi[1] + fi[2], 1e-300)
        dj = 0.5 * (fj[0] - fj[2]) / max(fj[0] - 2 * fj[1] + fj[2], 1e-300)
        ht = tg[1] - tg[0]
        hs = sg[1] - sg[0]
        return float(phase.value(tg[i] + di * ht, sg[j] + dj * hs))
    return float(vals[i, j])


# ---------------------------------------------------------------------------
# angle defect


def _tangent_at(p, q):
    """Unit tangent at p of the geodesic toward q."""
    u = float(mdot(p, q))
    return (q - u * p) / math.sqrt(max(u * u - 1.0, 1e-300))


def _angle_at(p, a, b):
    """Interior angle at vertex p between geodesics to a and b."""
    wa = _tangent_at(p, a)
    wb = _tangent_at(p, b)
    # induced Riemannian inner product on the tangent space is -<.,.>
    c = -float(mdot(wa, wb))
    return math.acos(min(1.0, max(-1.0, c)))


def _klein_coords(p):
    return np.asarray(p, dtype=float)[..., 1:] / np.asarray(p, dtype=float)[..., :1]


def quadrilateral_angle_defect(p1, p2, p3, p4) -> float:
    """2 pi minus the interior angle sum of a geodesic quadrilateral.

    Positive for any nondegenerate convex quadrilateral (curvature -1);
    equals its hyperbolic area. Vertices must be given in convex
    position; degenerate input is rejected.
    """
    pts = [normalize_hpoint(np.asarray(p, dtype=float)) for p in (p1, p2, p3, p4)]
    for i in range(4):
        for j in range(i + 1, 4):
            if hyp_distance(pts[i], pts[j]) < 1e-3:
                raise ValueError("vertices too close together")
    # convexity in the Klein model (geodesics are straight chords there)
    kl = np.array([_klein_coords(p) for p in pts])
    cross = []
    for i in range(4):
        a = kl[(i + 1) % 4] - kl[i]
        b = kl[(i + 2) % 4] - kl[(i + 1) % 4]
        cross.append(a[0] * b[1] - a[1] * b[0])
    cross = np.array(cross)
    if not (np.all(cross > 0) or np.all(cross < 0)):
        raise ValueError("vertices are not in convex position")
    total = sum(_angle_at(pts[i], pts[(i - 1) % 4], pts[(i + 1) % 4])
                for i in range(4))
    return 2.0 * math.pi - total


def triangle_angle_sum(p1, p2, p3) -> float:
    pts = [normalize_hpoint(np.asarray(p, dtype=float)) for p in (p1, p2, p3)]
    return sum(_angle_at(pts[i], pts[(i + 1) % 3], pts[(i + 2) % 3])
               for i in range(3))
