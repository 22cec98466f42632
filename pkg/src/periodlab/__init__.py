"""periodlab: numerical laboratory for eigenfunction period integrals.

Modules:
  windows            band-limited smoothing windows and T-scaled splits
  surfaces           sphere/torus spectra, eigenfunctions, geodesics
  period_integrals   geodesic periods, sweeps, cumulative sums, norms
  projector_kernels  smoothed projector kernels and flat comparisons
  hyperbolic         hyperbolic plane, Bolza group, distance phases
  oscillatory        brute-force oscillatory integrals and decay fits
  cli                experiment runner (console entry point `lab`)
"""

__version__ = "0.1.0"
