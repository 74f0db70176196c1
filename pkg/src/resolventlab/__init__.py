"""Numerical toolkit for resolvent-based analysis of 3-D Schrodinger operators.

Dense discretizations of the free and perturbed resolvents at positive
energies, zero-energy resonance detection, oscillatory spectral integrals,
and time-decay measurements of the Schrodinger propagator, all at desk
scale (dense matrices, a few hundred radial shells or a small box grid).
"""

from resolventlab.grids import Grid, Field, build_box_grid, build_radial_grid

__all__ = ["Grid", "Field", "build_box_grid", "build_radial_grid"]

__version__ = "0.1.0"
