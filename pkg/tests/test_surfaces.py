"""Tests for the model surfaces, spectra, and curves."""

import math

import numpy as np
import pytest

from periodlab.surfaces import (
    EigenLevel,
    basis_matrix,
    enumerate_spectrum,
    eval_eigenfunction,
    flat_torus,
    geodesic_distance,
    great_circle,
    legendre_norm_all,
    perturbed_equator,
    sphere,
    surface_quadrature,
    torus_line,
)

SP = sphere()
TO = flat_torus()


class TestSpectrum:
    def test_volumes(self):
        assert SP.volume == 4.0 * math.pi
        assert TO.volume == 4.0 * math.pi ** 2

    def test_sphere_low_levels(self):
        levels = enumerate_spectrum(SP, 2.0)
        assert [lv.quantum_numbers[1] for lv in levels] == [0, 1, 1, 1]
        assert levels[0].lam == 0.0
        for lv in levels[1:]:
            assert lv.lam == pytest.approx(math.sqrt(2.0))

    def test_torus_low_levels(self):
        levels = enumerate_spectrum(TO, 1.5)
        assert len(levels) == 9  # const + 4 at |k|=1 + 4 at |k|=sqrt2
        unit = [lv for lv in levels if lv.lam == pytest.approx(1.0)]
        assert len(unit) == 4
        ks = {(lv.quantum_numbers[1], lv.quantum_numbers[2]) for lv in unit}
        assert ks == {(1, 0), (0, 1)}

    def test_sphere_count_oracle(self):
        # independent counting: sum of multiplicities 2l+1
        expected = sum(2 * l + 1 for l in range(60) if math.sqrt(l * (l + 1)) <= 30.0)
        assert len(enumerate_spectrum(SP, 30.0)) == expected

    def test_eigenvalue_formulas(self):
        for lv in enumerate_spectrum(SP, 10.0):
            l = lv.quantum_numbers[1]
            assert lv.lam == pytest.approx(math.sqrt(l * (l + 1.0)))
        for lv in enumerate_spectrum(TO, 5.0):
            if lv.quantum_numbers[3] != "const":
                k1, k2 = lv.quantum_numbers[1:3]
                assert lv.lam == pytest.approx(math.hypot(k1, k2))

    def test_sorted_and_indexed(self):
        levels = enumerate_spectrum(TO, 8.0)
        assert [lv.index for lv in levels] == list(range(len(levels)))
        assert all(levels[i].lam <= levels[i + 1].lam for i in range(len(levels) - 1))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            enumerate_spectrum(SP, -1.0)

    def test_weyl_count_torus(self):
        lam = 60.0
        n = len(enumerate_spectrum(TO, lam))
        # asymptotic count: pi * volume / (4 pi^2) * lam^2 = pi lam^2
        assert abs(n / lam ** 2 - math.pi) / math.pi < 0.10


class TestEigenfunctions:
    def test_constant_modes(self):
        cs = enumerate_spectrum(SP, 0.0)[0]
        ct = enumerate_spectrum(TO, 0.0)[0]
        assert eval_eigenfunction(cs, [0.3, -0.8, 0.52]) == pytest.approx(
            1.0 / math.sqrt(4 * math.pi))
        assert eval_eigenfunction(ct, [1.0, 2.0]) == pytest.approx(1.0 / (2 * math.pi))

    def test_zonal_value_at_pole(self):
        # oracle: Y_l0(north pole) = sqrt((2l+1)/4pi) P_l(1) = sqrt((2l+1)/4pi)
        lv = [e for e in enumerate_spectrum(SP, 3.0)
              if e.quantum_numbers[1:] == (2, 0)][0]
        assert eval_eigenfunction(lv, [0, 0, 1.0]) == pytest.approx(
            math.sqrt(5.0 / (4 * math.pi)), abs=1e-12)

    def test_low_degree_table(self):
        # explicit textbook forms of the first real harmonics
        pt = np.array([0.48, -0.6, 0.64])
        pt /= np.linalg.norm(pt)
        x, y, z = pt
        lv = {e.quantum_numbers[1:]: e for e in enumerate_spectrum(SP, 3.0)}
        assert eval_eigenfunction(lv[(1, 0)], pt) == pytest.approx(
            math.sqrt(3 / (4 * math.pi)) * z, abs=1e-12)
        assert eval_eigenfunction(lv[(1, 1)], pt) == pytest.approx(
            math.sqrt(3 / (4 * math.pi)) * x, abs=1e-12)
        assert eval_eigenfunction(lv[(1, -1)], pt) == pytest.approx(
            math.sqrt(3 / (4 * math.pi)) * y, abs=1e-12)
        assert eval_eigenfunction(lv[(2, -2)], pt) == pytest.approx(
            0.5 * math.sqrt(15 / math.pi) * x * y, abs=1e-12)

    def test_orthonormality_random_pairs(self):
        rng = np.random.default_rng(7)
        levels = enumerate_spectrum(SP, 16.0)
        pts, wts = surface_quadrature(SP, n_theta=80, n_phi=160)
        pick = rng.choice(len(levels), size=10, replace=False)
        B = basis_matrix([levels[i] for i in pick], pts)
        G = (B * wts) @ B.T
        assert np.max(np.abs(G - np.eye(len(pick)))) < 1e-6

        levels = enumerate_spectrum(TO, 6.0)
        pts, wts = surface_quadrature(TO, n_theta=64, n_phi=64)
        pick = rng.choice(len(levels), size=10, replace=False)
        B = basis_matrix([levels[i] for i in pick], pts)
        G = (B * wts) @ B.T
        assert np.max(np.abs(G - np.eye(len(pick)))) < 1e-6

    def test_l2_normalization(self):
        pts, wts = surface_quadrature(SP, n_theta=96, n_phi=192)
        lv = [e for e in enumerate_spectrum(SP, 13.0)
              if e.quantum_numbers[1:] == (12, 7)][0]
        vals = basis_matrix([lv], pts)[0]
        assert np.sum(wts * vals ** 2) == pytest.approx(1.0, abs=1e-6)

    def test_eigen_equation_finite_differences(self):
        # spherical-coordinate Laplacian by central differences, step 1e-3
        rng = np.random.default_rng(3)
        levels = enumerate_spectrum(SP, 11.0)
        h = 1e-3
        for _ in range(10):
            lv = levels[rng.integers(1, len(levels))]
            th = rng.uniform(0.7, math.pi - 0.7)
            ph = rng.uniform(0.0, 2 * math.pi)

            def e(theta, phi, lv=lv):
                pt = [math.sin(theta) * math.cos(phi),
                      math.sin(theta) * math.sin(phi), math.cos(theta)]
                return eval_eigenfunction(lv, pt)

            lap = ((e(th + h, ph) - 2 * e(th, ph) + e(th - h, ph)) / h ** 2
                   + (e(th, ph + h) - 2 * e(th, ph) + e(th, ph - h))
                   / (h ** 2 * math.sin(th) ** 2)
                   + (e(th + h, ph) - e(th - h, ph)) / (2 * h) / math.tan(th))
            target = -lv.lam ** 2 * e(th, ph)
            scale = max(abs(target), lv.lam ** 2 * 0.05)
            assert abs(lap - target) <= 1e-3 * scale


class TestLegendre:
    def test_high_degree_stability(self):
        P = legendre_norm_all(400, np.array([0.3]))
        assert np.all(np.isfinite(P))
        # normalized values stay O(1)
        assert np.max(np.abs(P)) < 10.0

    def test_against_raw_recurrence(self):
        # independent oracle: raw P_l recurrence at m=0
        x = 0.37
        raw = [1.0, x]
        for l in range(2, 30):
            raw.append(((2 * l - 1) * x * raw[-1] - (l - 1) * raw[-2]) / l)
        P = legendre_norm_all(29, np.array([x]))
        for l in [5, 17, 29]:
            expect = math.sqrt((2 * l + 1) / (4 * math.pi)) * raw[l]
            assert P[l, 0, 0] == pytest.approx(expect, rel=1e-12)


class TestCurves:
    def test_equator(self):
        eq = great_circle(SP, [0.0, 0.0, 1.0])
        assert eq.length == pytest.approx(2 * math.pi)
        pts = eq(np.array([0.0, math.pi / 2]))
        assert np.allclose(pts[0], [1, 0, 0], atol=1e-15)
        assert np.allclose(pts[1], [0, 1, 0], atol=1e-12)

    def test_unit_speed_and_plane_fit(self):
        gc = great_circle(SP, [0.3, -0.5, 0.81])
        ts = np.linspace(0.0, 2 * math.pi, 16, endpoint=False)
        h = 1e-6
        d = (gc(ts + h) - gc(ts - h)) / (2 * h)
        assert np.max(np.abs(np.linalg.norm(d, axis=-1) - 1.0)) < 1e-8
        # image lies on a plane through the origin
        pts = gc(np.linspace(0, 6.0, 50))
        _, s, _ = np.linalg.svd(pts)
        assert s[2] < 1e-10

    def test_torus_lines(self):
        line = torus_line(TO, [0.0, 0.0], [1.0, 0.0])
        assert line.length == pytest.approx(2 * math.pi)
        assert np.allclose(line(np.array([1.0]))[0], [1.0, 0.0])
        diag = torus_line(TO, [0.0, 0.0], [1.0, 1.0])
        assert diag.length == pytest.approx(2 * math.pi * math.sqrt(2.0))
        irr = torus_line(TO, [0.0, 0.0], [1.0, math.sqrt(2.0)])
        assert math.isinf(irr.length)

    def test_torus_line_straight_mod_2pi(self):
        line = torus_line(TO, [0.2, 5.9], [2.0, 1.0])
        ts = np.linspace(0.0, 3.0, 7)
        pts = line(ts)
        d = np.asarray([0.2, 5.9])[None, :] + np.outer(ts, [2, 1]) / math.sqrt(5.0)
        assert np.max(np.abs(np.mod(d, 2 * math.pi) - pts)) < 1e-12

    def test_distances(self):
        assert geodesic_distance(SP, [0, 0, 1], [0, 0, -1]) == pytest.approx(math.pi)
        assert geodesic_distance(TO, [0.0, 0.0], [2 * math.pi - 0.1, 0.0]) == (
            pytest.approx(0.1))

    def test_arc_distance_along_equator(self):
        eq = great_circle(SP, [0.0, 0.0, 1.0])
        for t, s in [(0.1, 1.3), (2.0, 4.5), (0.0, math.pi - 0.01)]:
            d = geodesic_distance(SP, eq(np.array([t]))[0], eq(np.array([s]))[0])
            assert d == pytest.approx(abs(t - s), abs=1e-10)

    def test_perturbed_equator_unit_speed(self):
        uc = perturbed_equator()
        ts = np.linspace(-0.5, 0.5, 16)
        h = 1e-5
        d = (uc(ts + h) - uc(ts - h)) / (2 * h)
        assert np.max(np.abs(np.linalg.norm(d, axis=-1) - 1.0)) < 1e-6
        assert np.max(np.abs(np.linalg.norm(uc(ts), axis=-1) - 1.0)) < 1e-12
