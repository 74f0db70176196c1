"""Spatial discretization: box and radial quadrature grids and sampled fields.

Both grid kinds carry midpoint nodes, cell-volume weights, and a per-node
diagonal correction equal to the self-cell integral of the Newton kernel,

    diag_correction[i] = integral over cell i of dy / (4*pi*|x_i - y|),

evaluated in closed form (volume-equivalent ball for box cells, exact shell
integral for radial cells).  Every singular-kernel operator built on top of
a grid routes its diagonal through this correction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BOX = "box"
RADIAL = "radial"


@dataclass(frozen=True)
class Grid:
    """Immutable quadrature grid.

    nodes: (n, 3) cell centers for box grids, (n,) shell radii for radial.
    weights: positive cell volumes summing to the covered volume.
    diag_correction: self-cell Newton integrals, one per node.
    extent: half-width (box) or maximum radius (radial).
    """

    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    diag_correction: np.ndarray
    extent: float

    def __post_init__(self):
        if self.kind not in (BOX, RADIAL):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)
        self.diag_correction.setflags(write=False)
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")

    @property
    def n(self) -> int:
        return self.weights.size

    @property
    def radii(self) -> np.ndarray:
        """Distance of each node from the origin."""
        if self.kind == RADIAL:
            return self.nodes
        return np.linalg.norm(self.nodes, axis=1)

    @property
    def volume(self) -> float:
        if self.kind == BOX:
            return (2.0 * self.extent) ** 3
        return 4.0 * np.pi * self.extent**3 / 3.0

    def pairwise_distances(self) -> np.ndarray:
        """|x_i - x_j| for box grids; radial grids use averaged kernels instead."""
        if self.kind != BOX:
            raise ValueError("pairwise distances are only defined on box grids")
        diff = self.nodes[:, None, :] - self.nodes[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=-1))

    def spec_string(self) -> str:
        """Plain-text grid block: kind, extent, node count."""
        if self.kind == BOX:
            n_axis = round(self.n ** (1.0 / 3.0))
            return f"kind = box\nextent = {self.extent!r}\nn = {n_axis}"
        return f"kind = radial\nextent = {self.extent!r}\nn = {self.n}"


@dataclass
class Field:
    """Complex- or real-valued samples, one per grid node."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.grid.n,):
            raise ValueError(
                f"field has {self.values.shape} values, grid has {self.grid.n} nodes"
            )

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field":
        """Sample fn at the grid nodes (fn of (n,3) points or of radii)."""
        return cls(grid, np.asarray(fn(grid.nodes)))

    @classmethod
    def from_radial(cls, grid: Grid, fn) -> "Field":
        """Sample a rotation-invariant fn(r) on either grid kind."""
        return cls(grid, np.asarray(fn(grid.radii)))

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


def ball_self_integral(cell_volume: np.ndarray) -> np.ndarray:
    """Newton self-integral of the volume-equivalent ball.

    For a ball of radius r, integral of dy/(4*pi*|y|) over |y| < r equals
    r^2/2; here r = (3*vol/4pi)^(1/3).
    """
    r_eq = (3.0 * np.asarray(cell_volume) / (4.0 * np.pi)) ** (1.0 / 3.0)
    return 0.5 * r_eq**2


def build_box_grid(half_width: float, n_per_axis: int) -> Grid:
    """Uniform tensor-product midpoint grid on [-half_width, half_width]^3."""
    if half_width <= 0:
        raise ValueError("half_width must be positive")
    if n_per_axis < 2:
        raise ValueError("n_per_axis must be at least 2")
    h = 2.0 * half_width / n_per_axis
    axis = -half_width + h * (np.arange(n_per_axis) + 0.5)
    xx, yy, zz = np.meshgrid(axis, axis, axis, indexing="ij")
    nodes = np.column_stack([xx.ravel(), yy.ravel(), zz.ravel()])
    n = nodes.shape[0]
    weights = np.full(n, h**3)
    diag = ball_self_integral(weights)
    return Grid(BOX, nodes, weights, diag, float(half_width))


def build_radial_grid(r_max: float, n: int) -> Grid:
    """Spherical-shell midpoint grid for rotation-invariant data.

    Shell i covers [i*dr, (i+1)*dr]; the weight is the exact shell volume and
    the diagonal correction is the exact Newton integral of the shell seen
    from its midpoint radius.
    """
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    dr = r_max / n
    r = dr * (np.arange(n) + 0.5)
    lo = r - 0.5 * dr
    hi = r + 0.5 * dr
    weights = 4.0 * np.pi / 3.0 * (hi**3 - lo**3)
    # integral over [r-h, r+h] of s^2/max(r,s) ds with h = dr/2
    h = 0.5 * dr
    diag = 2.0 * r * h - 0.5 * h**2 + h**3 / (3.0 * r)
    return Grid(RADIAL, r, weights, diag, float(r_max))


def grid_from_spec(kind: str, extent: float, n: int) -> Grid:
    """Build a grid from the serialized (kind, extent, n) triple."""
    if kind == BOX:
        return build_box_grid(extent, n)
    if kind == RADIAL:
        return build_radial_grid(extent, n)
    raise ValueError(f"unknown grid kind {kind!r}")


def l2_inner(f: Field, g: Field) -> complex:
    """Quadrature inner product sum(w * f * conj(g))."""
    if f.grid is not g.grid and f.grid.n != g.grid.n:
        raise ValueError("fields live on different grids")
    return complex(np.sum(f.grid.weights * f.values * np.conj(g.values)))
