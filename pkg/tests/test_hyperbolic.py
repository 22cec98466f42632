"""Tests for hyperbolic geometry, the Bolza group, and phase functions."""

import math

import numpy as np
import pytest

from periodlab.hyperbolic import (
    SYSTOLE,
    DeckTransform,
    PhaseFunction,
    bolza_group,
    dirichlet_contains,
    enumerate_deck,
    find_critical_points,
    from_disk,
    geodesic_through,
    grid_min_phase,
    hpoint,
    hyp_distance,
    normalize_hpoint,
    quadrilateral_angle_defect,
    stabilizer_shift,
    translation_along,
    triangle_angle_sum,
)

ORIGIN = np.array([1.0, 0.0, 0.0])


@pytest.fixture(scope="module")
def group():
    return bolza_group()


@pytest.fixture(scope="module")
def ball8(group):
    return enumerate_deck(group, 8.0)


class TestDistance:
    def test_zero(self):
        assert hyp_distance(ORIGIN, ORIGIN) == 0.0

    def test_disk_radius_half(self):
        p = from_disk(0.5, 0.0)
        assert hyp_distance(ORIGIN, p) == pytest.approx(math.log(3.0), abs=1e-12)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            a, b, c = (hpoint(*rng.normal(scale=1.5, size=2)) for _ in range(3))
            assert hyp_distance(a, c) <= (
                hyp_distance(a, b) + hyp_distance(b, c) + 1e-10)

    def test_invalid_pairing_rejected(self):
        with pytest.raises(ValueError):
            hyp_distance(np.array([1.0, 0.5, 0.0]), np.array([1.0, 0.5, 0.0]))


class TestBolzaGroup:
    def test_relations(self, group):
        assert group.commutator_residual < 1e-7
        assert group.octagon_residual < 1e-7

    def test_generator_displacement(self, group):
        for g in group.side_pairings:
            assert g.displacement == pytest.approx(SYSTOLE, abs=1e-12)
        assert SYSTOLE == pytest.approx(2.0 * math.acosh(1.0 + math.sqrt(2.0)))

    def test_generator_inverse(self, group):
        for g in group.side_pairings[:4]:
            assert g.compose(g.inverse()).is_identity(1e-12)

    def test_preserves_form(self, group):
        for g in group.side_pairings + group.generators:
            assert g.form_residual() < 1e-9

    def test_isometry_on_random_points(self, group):
        rng = np.random.default_rng(2)
        g = group.side_pairings[2]
        for _ in range(5):
            p = hpoint(*rng.normal(scale=1.2, size=2))
            q = hpoint(*rng.normal(scale=1.2, size=2))
            assert hyp_distance(g(p), g(q)) == pytest.approx(
                hyp_distance(p, q), abs=1e-9)

    def test_commutator_basis_generates(self, group):
        # g0 = h4^-1 h1 h2 and g1 = h3^-1 g0 recover the side pairings
        h1, h2, h3, h4 = group.generators[:4]
        g0 = h4.inverse().compose(h1).compose(h2)
        assert np.max(np.abs(g0.matrix - group.side_pairings[0].matrix)) < 1e-9
        g1 = h3.inverse().compose(g0)
        assert np.max(np.abs(g1.matrix - group.side_pairings[1].matrix)) < 1e-9


class TestEnumeration:
    def test_tiny_ball_is_identity(self, group):
        ball = enumerate_deck(group, 1.0)
        assert len(ball) == 1
        assert ball[0].is_identity()

    def test_systole_shell(self, group):
        # at T = 3.1 the ball is the identity plus the 8 side pairings
        ball = enumerate_deck(group, 3.1)
        assert len(ball) == 9
        disps = sorted(b.displacement for b in ball[1:])
        assert all(abs(d - SYSTOLE) < 1e-9 for d in disps)

    def test_sorted_and_min_displacement(self, group, ball8):
        disps = [b.displacement for b in ball8]
        assert disps == sorted(disps)
        nz = [d for d in disps if d > 1e-9]
        assert 3.0 <= min(nz) <= 3.07

    def test_closure_under_word_length(self, group):
        a = enumerate_deck(group, 6.0, max_word_len=8)
        b = enumerate_deck(group, 6.0, max_word_len=10)
        assert len(a) == len(b) == len(enumerate_deck(group, 6.0))

    def test_growth_rate(self, group):
        counts = {T: len(enumerate_deck(group, T)) for T in (4.0, 6.0, 8.0, 10.0)}
        slope = np.polyfit(list(counts), np.log(list(counts.values())), 1)[0]
        assert 0.7 <= slope <= 1.3
        logs = np.log(list(counts.values()))
        assert np.all(np.diff(logs) > 0)

    def test_enumeration_guard(self, group):
        with pytest.raises(ValueError):
            enumerate_deck(group, 26.0)


class TestDirichlet:
    def test_origin_inside(self, group):
        assert dirichlet_contains(group, ORIGIN, 4.0)

    def test_orbit_point_outside(self, group):
        g = group.side_pairings[1]
        p = g(ORIGIN)
        t_check = 2.0 * hyp_distance(ORIGIN, p) + 3.2
        assert not dirichlet_contains(group, p, t_check)

    def test_radius_one_inside(self, group):
        # systole/2 ~ 1.53 > 1: every direction at distance 1 is interior
        for th in np.linspace(0.0, 2 * math.pi, 8, endpoint=False):
            p = hpoint(math.sinh(1.0) * math.cos(th), math.sinh(1.0) * math.sin(th))
            assert dirichlet_contains(group, p, 5.2)

    def test_radius_guard(self, group):
        with pytest.raises(ValueError):
            dirichlet_contains(group, hpoint(math.sinh(2.0), 0.0), 1.0)


class TestStabilizer:
    GEO = None

    def setup_method(self, _):
        self.geo = geodesic_through(hpoint(0.1, -0.2), [0.0, 0.8, 0.6])

    def test_identity_flag(self):
        ident = DeckTransform(matrix=np.eye(3))
        assert stabilizer_shift(ident, self.geo, 2.0) == 0

    def test_axis_translation(self):
        ell = 2.7
        alpha = translation_along(self.geo, ell)
        assert stabilizer_shift(alpha, self.geo, ell) == 1
        twice = DeckTransform(matrix=alpha.matrix @ alpha.matrix)
        assert stabilizer_shift(twice, self.geo, ell) == 2
        assert stabilizer_shift(twice.inverse(), self.geo, ell) == -2

    def test_generic_element(self, group):
        alpha = enumerate_deck(group, 7.0)[25]
        geo = geodesic_through(hpoint(0.0, 0.0), [0.0, 1.0, 0.3])
        assert stabilizer_shift(alpha, geo, SYSTOLE) is None
        # the rejection is by a macroscopic margin
        ss = np.array([-0.5, 0.0, 0.5])
        best = min(
            float(np.max(hyp_distance(alpha(geo(ss)), geo(ss + k * SYSTOLE))))
            for k in range(-5, 6) if k != 0)
        assert best > 0.1


class TestPhaseFunction:
    def setup_method(self, _):
        self.geo1 = geodesic_through(hpoint(0.0, 0.0), [0.0, 1.0, 0.0])
        perp = geodesic_through(hpoint(0.0, 0.0), [0.0, 0.0, 1.0])
        self.alpha = translation_along(perp, 3.5)
        self.phase = PhaseFunction(geo1=self.geo1, alpha=self.alpha,
                                   geo2=self.geo1)

    def test_value_is_distance(self):
        t, s = 0.3, -0.2
        p = self.geo1(t)
        q = self.alpha(self.geo1(s))
        assert self.phase.value(t, s) == pytest.approx(
            float(hyp_distance(p, q)), abs=1e-12)

    def test_grad_matches_finite_differences(self):
        h = 1e-4
        for (t, s) in [(0.2, 0.1), (-0.4, 0.3)]:
            gt, gs = self.phase.grad(t, s)
            fd_t = (self.phase.value(t + h, s) - self.phase.value(t - h, s)) / (2 * h)
            fd_s = (self.phase.value(t, s + h) - self.phase.value(t, s - h)) / (2 * h)
            assert abs(gt - fd_t) < 1e-6
            assert abs(gs - fd_s) < 1e-6

    def test_mixed_matches_finite_differences(self):
        h = 1e-4
        t, s = 0.15, -0.05
        fd = (self.phase.value(t + h, s + h) - self.phase.value(t + h, s - h)
              - self.phase.value(t - h, s + h) + self.phase.value(t - h, s - h)
              ) / (4 * h * h)
        assert abs(self.phase.mixed(t, s) - fd) < 1e-5

    def test_common_perpendicular_found(self):
        cps = find_critical_points(self.phase)
        assert len(cps) == 1
        cp = cps[0]
        assert abs(cp.t) < 1e-8 and abs(cp.s) < 1e-8
        assert cp.value == pytest.approx(3.5, abs=1e-10)
        assert abs(cp.mixed_hessian) > 1e-6
        oracle = grid_min_phase(self.phase)
        assert abs(cp.value - oracle) < 1e-6

    def test_no_critical_point_when_foot_outside(self):
        geo2 = geodesic_through(self.alpha(self.geo1(3.0)),
                                self.alpha(self.geo1.velocity(3.0)))
        phase = PhaseFunction(geo1=self.geo1,
                              alpha=DeckTransform(matrix=np.eye(3)), geo2=geo2)
        assert find_critical_points(phase) == []
        tg = np.linspace(-0.5, 0.5, 33)
        T, S = np.meshgrid(tg, tg, indexing="ij")
        gt, gs = phase.grad(T, S)
        assert float(np.min(np.hypot(gt, gs))) > 0.0

    def test_stabilizer_translate_has_unit_gradient(self):
        # alpha in the stabilizer: phi(t,s) = |t - s - k ell|, gradients +-1
        ell = 3.2
        alpha = translation_along(self.geo1, ell)
        phase = PhaseFunction(geo1=self.geo1, alpha=alpha, geo2=self.geo1)
        tg = np.linspace(-0.5, 0.5, 9)
        T, S = np.meshgrid(tg, tg, indexing="ij")
        gt, gs = phase.grad(T, S)
        assert np.max(np.abs(np.abs(gt) - 1.0)) < 1e-9
        assert np.max(np.abs(gt + gs)) < 1e-9
        assert find_critical_points(phase) == []


class TestCriticalStructureSweep:
    def test_zero_or_one_critical_point(self, group, ball8):
        # random geodesic / non-stabilizer element pairs
        rng = np.random.default_rng(123)
        nontrivial = [a for a in ball8 if not a.is_identity()]
        checked = 0
        for _ in range(50):
            geo = geodesic_through(
                hpoint(*rng.normal(scale=0.3, size=2)),
                [0.0, *rng.normal(size=2)])
            alpha = nontrivial[rng.integers(len(nontrivial))]
            if stabilizer_shift(alpha, geo, SYSTOLE) is not None:
                continue
            phase = PhaseFunction(geo1=geo, alpha=alpha, geo2=geo)
            cps = find_critical_points(phase)
            assert len(cps) in (0, 1)
            for cp in cps:
                assert abs(cp.mixed_hessian) >= 1e-8
                assert abs(cp.value - grid_min_phase(phase)) < 1e-6
                # analytic mixed entry against central differences
                h = 1e-4
                fd = (phase.value(cp.t + h, cp.s + h)
                      - phase.value(cp.t + h, cp.s - h)
                      - phase.value(cp.t - h, cp.s + h)
                      + phase.value(cp.t - h, cp.s - h)) / (4 * h * h)
                assert abs(cp.mixed_hessian - fd) < 1e-5
            checked += 1
        assert checked >= 40


class TestAngleDefect:
    def test_positive_on_random_configurations(self):
        rng = np.random.default_rng(31)
        done = 0
        while done < 100:
            ths = np.sort(rng.uniform(0.0, 2 * math.pi, size=4))
            if np.min(np.diff(ths)) < 0.3:
                continue
            rads = rng.uniform(0.5, 1.5, size=4)
            pts = [hpoint(math.sinh(r) * math.cos(th), math.sinh(r) * math.sin(th))
                   for r, th in zip(rads, ths)]
            try:
                d = quadrilateral_angle_defect(*pts)
            except ValueError:
                continue
            assert d > 0.0
            done += 1

    def test_gauss_bonnet_vs_triangulation(self):
        pts = [hpoint(math.sinh(1.0), 0.0), hpoint(0.0, math.sinh(1.0)),
               hpoint(-math.sinh(1.0), 0.0), hpoint(0.0, -math.sinh(1.0))]
        defect = quadrilateral_angle_defect(*pts)
        s1 = triangle_angle_sum(pts[0], pts[1], pts[2])
        s2 = triangle_angle_sum(pts[0], pts[2], pts[3])
        area = (math.pi - s1) + (math.pi - s2)
        assert abs(defect - area) < 1e-8

    def test_near_euclidean_limit(self):
        eps = 5e-3
        pts = [hpoint(eps, 0.0), hpoint(0.0, eps), hpoint(-eps, 0.0),
               hpoint(0.0, -eps)]
        d = quadrilateral_angle_defect(*pts)
        assert 0.0 < d < 1e-3

    def test_degenerate_rejected(self):
        pts = [hpoint(1.0, 0.0), hpoint(1.0, 1e-5), hpoint(-1.0, 0.0),
               hpoint(0.0, -1.0)]
        with pytest.raises(ValueError):
            quadrilateral_angle_defect(*pts)
