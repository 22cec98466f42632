"""Panelized Gauss-Legendre quadrature helpers.

All oscillatory integrals in this package use composite Gauss-Legendre
rules with a fixed order per panel and a panel count chosen from the
local oscillation rate, so that the node density per wavelength stays
above a contractual floor (6 for line integrals, 10 per axis for the
brute-force double integrals).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _gl_rule(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def gl_nodes(a: float, b: float, order: int = 64):
    """Single Gauss-Legendre rule on [a, b]."""
    x, w = _gl_rule(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def panel_nodes(a: float, b: float, panels: int, order: int = 12):
    """Composite Gauss-Legendre rule: `panels` equal panels of `order` nodes."""
    panels = max(1, int(panels))
    x, w = _gl_rule(order)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return nodes, wts


def oscillatory_panels(freq: float, length: float, min_panels: int = 2) -> int:
    """Panels needed so one panel spans at most one wavelength 2*pi/freq."""
    if freq <= 0.0 or length <= 0.0:
        return min_panels
    return max(min_panels, int(np.ceil(freq * length / (2.0 * np.pi))))


def fit_loglog(x, y, floor: float = 1e-14):
    """Least-squares slope/intercept of log|y| against log x.

    Values with |y| <= floor are dropped (they carry quadrature noise,
    not signal). Returns (slope, intercept, residual, n_used) where
    residual is the max absolute deviation of log|y| from the fit.
    """
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    keep = y > floor
    if keep.sum() < 2:
        raise ValueError("fewer than two points above the noise floor")
    lx, ly = np.log(x[keep]), np.log(y[keep])
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return float(slope), float(intercept), residual, int(keep.sum())


def linear_fit(x, y):
    """Ordinary least squares y = a*x + b with R^2 and max residual."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a, b = np.polyfit(x, y, 1)
    pred = a * x + b
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(a), float(b), r2, float(np.max(np.abs(y - pred)))
