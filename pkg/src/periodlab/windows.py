"""Band-limited smoothing windows.

The whole spectral toolbox rests on one even window rho with rho(0) = 1
whose Fourier transform vanishes outside [-1/4, 1/4], its square
chi = rho^2 (transform supported in [-1/2, 1/2]), a plateau cutoff beta
(identically 1 on [-3, 3], identically 0 outside (-4, 4)), and the pair
of T-scaled windows obtained by splitting the transform of chi(./T) with
beta and 1 - beta.

Construction. rho_hat = c * (eta * eta) where eta is a flat-top bump
supported on [-1/8, 1/8] with polynomial C^3 roll-off at the edges and
c normalizes rho(0) = 1. The autoconvolution makes rho_hat even with
exact support [-1/4, 1/4] and rho = |eta_transform|^2 / const >= 0.
The flat-top profile is what pushes the transform's near-lobes low
enough to meet the leakage budgets below; a plain exponential bump
leaves chi at the 1e-3 level a few support-widths out, orders of
magnitude too large.

Evaluation is direct Gauss-Legendre quadrature of the inverse-transform
integrals on the compact frequency support (256 nodes for rho). The
integrands are piecewise polynomial-times-trig with known breakpoints
(the plateau edges of eta and their convolution images), so every rule
is split at those points; a single rule across a breakpoint would cap
the accuracy near 1e-10, which the 1e-12 contracts below do not allow.

Numerical contract (checked by the test suite):
  - rho(0) = 1 within 1e-10, evenness within 1e-12;
  - chi transform leakage outside [-1/2, 1/2] below 1e-8;
  - psi_T + phi_T = T*chi(T .) within 1e-8 (partition of unity in beta);
  - phi_T decays at least like (1+|sigma|)^-4 on sigma in [20, 100].

All objects are immutable after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._quadrature import gl_nodes, panel_nodes

EVEN_TOL = 1e-12
NORM_TOL = 1e-10
PARTITION_TOL = 1e-8
LEAKAGE_TOL = 1e-8

_ETA_HALFWIDTH = 0.125      # support of eta: [-1/8, 1/8]
_ETA_EDGE = 0.7             # fraction of the halfwidth used by the roll-off
_RHO_HAT_HALFWIDTH = 0.25   # support of rho_hat: [-1/4, 1/4]
_CHI_HAT_HALFWIDTH = 0.5    # support of chi_hat: [-1/2, 1/2]
_CHI_SUPPORT_SCAN = 400.0   # chi is numerically zero far beyond tail_cutoff

# smoothness breakpoints of eta and of eta*eta (absolute values)
_ETA_BREAKS = (_ETA_HALFWIDTH * (1.0 - _ETA_EDGE), _ETA_HALFWIDTH)
_RHO_HAT_BREAKS = tuple(
    sorted({abs(a + b) for a in (-_ETA_BREAKS[0], _ETA_BREAKS[0], -_ETA_BREAKS[1], _ETA_BREAKS[1])
            for b in (-_ETA_BREAKS[0], _ETA_BREAKS[0], -_ETA_BREAKS[1], _ETA_BREAKS[1])}
           | {0.0})
)


def _polystep(x):
    """C^3 monotone step: 0 for x <= 0, 1 for x >= 1 (7th-degree polynomial)."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return x ** 4 * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x ** 3)


def _smoothstep(x):
    """C-infinity monotone step: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0.0, np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)
        b = np.where(x < 1.0, np.exp(-1.0 / np.maximum(1.0 - x, 1e-300)), 0.0)
    return a / (a + b)


def _eta(t):
    """Flat-top bump on [-1/8, 1/8]: plateau with polynomial edges."""
    u = np.abs(np.asarray(t, dtype=float)) / _ETA_HALFWIDTH
    return _polystep((1.0 - u) / _ETA_EDGE)


def _split_points(lo, hi, breaks):
    pts = [lo] + [b for b in breaks if lo < b < hi] + [hi]
    return np.array(sorted(set(pts)))


def _split_quad(lo, hi, breaks, order=16):
    """Nodes/weights of per-piece Gauss-Legendre rules split at breakpoints."""
    edges = _split_points(lo, hi, breaks)
    nodes, wts = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        n, w = gl_nodes(a, b, order)
        nodes.append(n)
        wts.append(w)
    return np.concatenate(nodes), np.concatenate(wts)


def _eta_autoconv(x):
    """(eta * eta)(x) by breakpoint-split quadrature (scalar x)."""
    lo = max(-_ETA_HALFWIDTH, x - _ETA_HALFWIDTH)
    hi = min(_ETA_HALFWIDTH, x + _ETA_HALFWIDTH)
    if hi <= lo:
        return 0.0
    breaks = sorted({s * b for b in _ETA_BREAKS for s in (-1.0, 1.0)}
                    | {x - s * b for b in _ETA_BREAKS for s in (-1.0, 1.0)})
    n, w = _split_quad(lo, hi, breaks)
    return float(np.sum(w * _eta(n) * _eta(x - n)))


@dataclass(frozen=True, eq=False)
class SchwartzWindow:
    """The even band-limited window rho, its square chi, and their transforms.

    `rho_hat_grid` / `rho_hat_samples` tabulate the transform on a uniform
    grid of [-1/4, 1/4]; `normalization` is the scale c with
    rho_hat = c * (eta * eta) that enforces rho(0) = 1.
    """

    rho_hat_grid: np.ndarray
    rho_hat_samples: np.ndarray
    normalization: float
    _rho_nodes: np.ndarray = field(repr=False, default=None)
    _rho_weights: np.ndarray = field(repr=False, default=None)
    _rho_hat_nodes: np.ndarray = field(repr=False, default=None)
    _chi_nodes: np.ndarray = field(repr=False, default=None)
    _chi_weights: np.ndarray = field(repr=False, default=None)
    _chi_values: np.ndarray = field(repr=False, default=None)
    _tail_cache: dict = field(repr=False, default_factory=dict)

    # -- transforms ---------------------------------------------------

    def rho_hat(self, t):
        """Transform of rho: c*(eta*eta)(t); exact support [-1/4, 1/4]."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        out = np.array([self.normalization * _eta_autoconv(x)
                        for x in np.atleast_1d(t).ravel()])
        return float(out[0]) if scalar else out.reshape(np.shape(t))

    def chi_hat(self, t):
        """Transform of chi = rho^2, via the cosine transform of chi itself."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        ts = np.atleast_1d(t).ravel()
        kernel = np.cos(np.outer(ts, self._chi_nodes))
        out = 2.0 * kernel @ (self._chi_weights * self._chi_values)
        return float(out[0]) if scalar else out.reshape(np.shape(t))

    # -- time side ----------------------------------------------------

    def rho(self, tau):
        """rho(tau) = (1/2pi) int rho_hat(t) e^{i tau t} dt (real, even)."""
        tau = np.asarray(tau, dtype=float)
        scalar = tau.ndim == 0
        ts = np.atleast_1d(tau).ravel()
        kernel = np.cos(np.outer(ts, self._rho_nodes))
        out = kernel @ (self._rho_weights * self._rho_hat_nodes) / (2.0 * np.pi)
        return float(out[0]) if scalar else out.reshape(np.shape(tau))

    def chi(self, tau):
        """chi(tau) = rho(tau)^2."""
        r = self.rho(tau)
        return r * r

    def tail_cutoff(self, eps: float = 1e-10) -> float:
        """Smallest u* found with chi(u) < eps for all |u| >= u* on a scan grid."""
        key = float(eps)
        if key not in self._tail_cache:
            grid = np.linspace(0.0, _CHI_SUPPORT_SCAN, 8001)
            vals = self.chi(grid)
            above = np.nonzero(vals >= eps)[0]
            self._tail_cache[key] = float(grid[above[-1]] + grid[1]) if len(above) else 0.0
        return self._tail_cache[key]


@dataclass(frozen=True, eq=False)
class CutoffBeta:
    """Smooth plateau cutoff: 1 on [-3, 3], 0 outside (-4, 4), monotone between."""

    def __call__(self, tau):
        return _smoothstep(4.0 - np.abs(np.asarray(tau, dtype=float)))

    eval = __call__


@dataclass(frozen=True, eq=False)
class DerivedWindows:
    """T-scaled pair: psi_T + phi_T partitions the transform of chi(./T).

    psi_T(sigma) = (1/2pi) int beta(tau) chi_hat(tau/T) e^{i sigma tau} dtau,
    phi_T(sigma) = same with 1 - beta. chi_hat(tau/T) vanishes for
    |tau| >= T/2 and beta == 1 on [-3, 3], so phi_T is identically zero
    for T <= 6, and psi_T + phi_T = T*chi(T sigma) always.

    The quadrature rules are rebuilt when the requested |sigma| outruns
    the cached resolution (>= 10 nodes per oscillation of cos(sigma tau)).
    """

    T: float
    window: SchwartzWindow
    beta: CutoffBeta
    _rules: dict = field(repr=False, default_factory=dict)

    def psi_T(self, sigma):
        return self._transform("psi", sigma)

    def phi_T(self, sigma):
        if self.T <= 6.0:
            out = np.zeros(np.shape(sigma))
            return float(out) if out.ndim == 0 else out
        return self._transform("phi", sigma)

    def chi_T(self, sigma):
        """T * chi(T sigma), the unsplit scaled window."""
        return self.T * self.window.chi(self.T * np.asarray(sigma, dtype=float))

    def _rule(self, which: str, sigma_max: float):
        # resolution level: power of two covering sigma_max
        level = max(0, int(np.ceil(np.log2(max(sigma_max, 1.0) / 16.0))))
        key = (which, level)
        if key not in self._rules:
            sig_res = 16.0 * 2 ** level
            dens = max(1.0, 1.6 * sig_res / (2.0 * np.pi))
            lo, hi = (0.0, min(4.0, self.T / 2.0)) if which == "psi" else (3.0, self.T / 2.0)
            pieces = []
            for a, b, base in ((lo, min(hi, 3.0), 8), (max(lo, 3.0), min(hi, 4.0), 32),
                               (max(lo, 4.0), hi, 4)):
                if b > a:
                    pieces.append(panel_nodes(a, b, panels=max(base, int(np.ceil(dens * (b - a)))),
                                              order=16))
            nodes = np.concatenate([p[0] for p in pieces])
            wts = np.concatenate([p[1] for p in pieces])
            if which == "psi":
                wts = wts * self.beta(nodes) * self.window.chi_hat(nodes / self.T)
            else:
                wts = wts * (1.0 - self.beta(nodes)) * self.window.chi_hat(nodes / self.T)
            self._rules[key] = (nodes, wts)
        return self._rules[key]

    def _transform(self, which: str, sigma):
        sigma = np.asarray(sigma, dtype=float)
        scalar = sigma.ndim == 0
        sig = np.atleast_1d(sigma).ravel()
        nodes, weights = self._rule(which, float(np.max(np.abs(sig))) if len(sig) else 1.0)
        out = (np.cos(np.outer(sig, nodes)) @ weights) / np.pi
        return float(out[0]) if scalar else out.reshape(np.shape(sigma))


@lru_cache(maxsize=1)
def make_window() -> SchwartzWindow:
    """Construct the window; deterministic, cached."""
    eta_nodes, eta_weights = _split_quad(-_ETA_HALFWIDTH, _ETA_HALFWIDTH,
                                         [-_ETA_BREAKS[0], _ETA_BREAKS[0]], order=32)
    eta_mass = float(np.sum(eta_weights * _eta(eta_nodes)))
    # rho(0) = (1/2pi) int rho_hat = (c/2pi) (int eta)^2 = 1
    normalization = 2.0 * np.pi / eta_mass ** 2

    # 256 nodes for the rho integral: 8 smooth pieces of [-1/4,1/4], GL-32 each
    breaks = sorted({s * b for b in _RHO_HAT_BREAKS for s in (-1.0, 1.0)})
    rho_nodes, rho_weights = _split_quad(
        -_RHO_HAT_HALFWIDTH, _RHO_HAT_HALFWIDTH, breaks, order=32
    )

    grid = np.linspace(-_RHO_HAT_HALFWIDTH, _RHO_HAT_HALFWIDTH, 513)
    w = SchwartzWindow(
        rho_hat_grid=grid,
        rho_hat_samples=None,
        normalization=normalization,
        _rho_nodes=rho_nodes,
        _rho_weights=rho_weights,
        _rho_hat_nodes=None,
    )
    raw = w.rho_hat(rho_nodes)
    # fold residual quadrature error of rho(0) into the scale so rho(0) == 1
    rho0 = float(np.sum(rho_weights * raw)) / (2.0 * np.pi)
    object.__setattr__(w, "normalization", normalization / rho0)
    object.__setattr__(w, "_rho_hat_nodes", raw / rho0)
    object.__setattr__(w, "rho_hat_samples", w.rho_hat(grid))

    # chi cosine-transform table (chi decays super-algebraically; the scan
    # window [0, 400] carries everything above 1e-25)
    chi_nodes, chi_weights = panel_nodes(0.0, _CHI_SUPPORT_SCAN, panels=160, order=16)
    object.__setattr__(w, "_chi_nodes", chi_nodes)
    object.__setattr__(w, "_chi_weights", chi_weights)
    object.__setattr__(w, "_chi_values", w.chi(chi_nodes))
    return w


def eval_chi(window: SchwartzWindow, tau) -> float:
    """chi(tau) = rho(tau)^2; nonnegative."""
    return window.chi(tau)


@lru_cache(maxsize=1)
def make_beta() -> CutoffBeta:
    return CutoffBeta()


def derive_windows(window: SchwartzWindow, beta: CutoffBeta, T: float) -> DerivedWindows:
    """Split the transform of chi(./T) with beta; requires T >= 1."""
    if T < 1.0:
        raise ValueError(f"time scale T must be >= 1, got {T}")
    return DerivedWindows(T=float(T), window=window, beta=beta)


def numerical_transform(f, t, half_width: float = 224.0, step: float = 1.0 / 512.0):
    """Direct numerical Fourier transform int f(tau) e^{-i t tau} dtau.

    Used to certify support claims independently of the construction;
    the default grid is wide enough that the tail of chi beyond it is
    far below the 1e-8 leakage budget.
    """
    taus = np.arange(-half_width, half_width + step / 2.0, step)
    vals = np.asarray(f(taus), dtype=float)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(len(t), dtype=complex)
    for i, ti in enumerate(t):
        out[i] = np.sum(vals * np.exp(-1j * ti * taus)) * step
    return out
