"""Potential construction and norm auditing.

A Potential is a real sampled field plus the metadata needed to decide
whether it satisfies the integrability hypotheses of the decay estimate:
the class exponent epsilon, the support ball, and an optional radial
profile used for resampling on refined grids (divergence detection) and
for off-grid evaluation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from resolventlab.grids import BOX, RADIAL, Field, Grid, build_box_grid, build_radial_grid


@dataclass(frozen=True)
class NormDescriptor:
    """Selects one of the norm families: plain Lp, Kato, or weighted Lp-sigma."""

    kind: str
    p: float = 2.0
    sigma: float = 0.0
    center: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.kind not in ("lp", "kato", "weighted"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind != "kato" and self.p < 1:
            raise ValueError("p must be at least 1")


@dataclass
class Potential:
    """Real potential sampled on a grid, with cached norms.

    radial_profile, when present, evaluates V at arbitrary radii; all the
    built-in potentials are rotation-invariant and carry one.
    """

    field: Field
    support_radius: float = math.inf
    epsilon: float = 0.1
    radial_profile: object = None
    support_center: np.ndarray = dc_field(default_factory=lambda: np.zeros(3))
    label: str = "potential"
    norm_cache: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.field.values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise ValueError("potential samples must be finite")
        values.setflags(write=False)
        self.field = Field(self.field.grid, values)

    @property
    def grid(self) -> Grid:
        return self.field.grid

    @property
    def values(self) -> np.ndarray:
        return self.field.values

    def cached(self, key: str, compute):
        if key not in self.norm_cache:
            self.norm_cache[key] = compute()
        return self.norm_cache[key]


# ---------------------------------------------------------------------------
# norms


def lp_norm(f: Field, p: float) -> float:
    """Quadrature Lp norm; p = inf gives the max of |values|."""
    if p < 1:
        raise ValueError("p must be at least 1")
    mags = np.abs(f.values)
    if math.isinf(p):
        return float(np.max(mags))
    return float(np.sum(f.grid.weights * mags**p) ** (1.0 / p))


def _newton_sums(grid: Grid, mags: np.ndarray) -> np.ndarray:
    """sum_y w_y mags(y)/|x-y| at every node, self cell via the diagonal correction."""
    if grid.kind == BOX:
        d = grid.pairwise_distances()
        np.fill_diagonal(d, 1.0)
        kernel = 1.0 / d
        np.fill_diagonal(kernel, 0.0)
    else:
        r = grid.nodes
        kernel = 1.0 / np.maximum(r[:, None], r[None, :])
        np.fill_diagonal(kernel, 0.0)
    totals = kernel @ (grid.weights * mags)
    totals += 4.0 * np.pi * grid.diag_correction * mags
    return totals


def kato_norm(V: Potential) -> float:
    """sup_x of integral |V(y)|/|x-y| dy, maximized over grid nodes.

    A lower bound that converges to the true supremum from below under
    refinement.
    """

    def compute():
        return float(np.max(_newton_sums(V.grid, np.abs(V.values))))

    return V.cached("kato", compute)


def weighted_norm(f: Field, d: NormDescriptor) -> float:
    """Lp norm of (1 + |x - center|)^sigma * f."""
    if d.kind != "weighted":
        raise ValueError("descriptor must have kind 'weighted'")
    center = np.asarray(d.center, dtype=float)
    if f.grid.kind == RADIAL:
        if np.any(center != 0.0):
            raise ValueError("radial grids only support origin-centered weights")
        dist = f.grid.nodes
    else:
        dist = np.linalg.norm(f.grid.nodes - center[None, :], axis=1)
    weighted = (1.0 + dist) ** d.sigma * f.values
    return lp_norm(Field(f.grid, weighted), d.p)


def field_norm(f: Field, d: NormDescriptor) -> float:
    """Dispatch on the descriptor kind (kato requires a Potential)."""
    if d.kind == "lp":
        return lp_norm(f, d.p)
    if d.kind == "weighted":
        return weighted_norm(f, d)
    raise ValueError("kato norm applies to potentials, not bare fields")


# ---------------------------------------------------------------------------
# class audit


@dataclass
class ClassAudit:
    """Norms and finiteness flags for the integrability hypotheses."""

    epsilon: float
    lp_plus: float      # L^{3/2(1+eps)}
    lp_minus: float     # L^{3/2(1-eps)}
    l1: float
    kato: float
    combined: float     # max of the two Lp values
    refinement_ratios: dict
    finite_flags: dict
    passed: bool


_DIVERGENCE_RATIO = 1.1


def _resampled(V: Potential, factor: int) -> Potential:
    grid = V.grid
    if grid.kind == RADIAL:
        fine = build_radial_grid(grid.extent, grid.n * factor)
    else:
        n_axis = round(grid.n ** (1.0 / 3.0))
        fine = build_box_grid(grid.extent, n_axis * factor)
    vals = np.asarray(V.radial_profile(fine.radii), dtype=float)
    return Potential(Field(fine, vals), V.support_radius, V.epsilon,
                     V.radial_profile, V.support_center.copy(), V.label)


def class_audit(V: Potential) -> ClassAudit:
    """Report the audited norms and flag quadrature divergence under refinement."""
    eps = V.epsilon
    p_plus = 1.5 * (1.0 + eps)
    p_minus = 1.5 * (1.0 - eps)
    norms = {
        "lp_plus": lambda pot: lp_norm(pot.field, p_plus),
        "lp_minus": lambda pot: lp_norm(pot.field, p_minus),
        "l1": lambda pot: lp_norm(pot.field, 1.0),
        "kato": kato_norm,
    }
    base = {name: V.cached(name, lambda fn=fn: fn(V)) for name, fn in norms.items()}

    ratios = {}
    flags = {}
    if V.radial_profile is not None:
        fine = _resampled(V, 2)
        for name, fn in norms.items():
            coarse_val = base[name]
            fine_val = fn(fine)
            ratio = fine_val / coarse_val if coarse_val > 0 else 1.0
            ratios[name] = ratio
            flags[name] = bool(np.isfinite(coarse_val) and ratio < _DIVERGENCE_RATIO)
    else:
        for name in norms:
            ratios[name] = None
            flags[name] = bool(np.isfinite(base[name]))

    return ClassAudit(
        epsilon=eps,
        lp_plus=base["lp_plus"],
        lp_minus=base["lp_minus"],
        l1=base["l1"],
        kato=base["kato"],
        combined=max(base["lp_plus"], base["lp_minus"]),
        refinement_ratios=ratios,
        finite_flags=flags,
        passed=all(flags.values()),
    )


# ---------------------------------------------------------------------------
# translation


def translate(V: Potential, y: np.ndarray) -> Potential:
    """Shifted potential V(x - y), resampled on the same grid."""
    y = np.asarray(y, dtype=float)
    grid = V.grid
    if np.all(y == 0.0):
        return Potential(Field(grid, V.values.copy()), V.support_radius, V.epsilon,
                         V.radial_profile, V.support_center.copy(), V.label)
    if grid.kind == RADIAL:
        raise ValueError("radial grids represent rotation-invariant data only")
    new_center = V.support_center + y
    if np.isfinite(V.support_radius):
        reach = np.max(np.abs(new_center)) + V.support_radius
        if reach > grid.extent:
            overhang = reach - grid.extent
            warnings.warn(
                f"translated support extends {overhang:.3g} beyond the grid; "
                "clipped support reported"
            )
    if V.radial_profile is not None:
        dist = np.linalg.norm(grid.nodes - new_center[None, :], axis=1)
        vals = np.asarray(V.radial_profile(dist), dtype=float)
    else:
        from scipy.interpolate import RegularGridInterpolator

        n_axis = round(grid.n ** (1.0 / 3.0))
        axis = np.unique(grid.nodes[:, 0])
        cube = V.values.reshape(n_axis, n_axis, n_axis)
        interp = RegularGridInterpolator(
            (axis, axis, axis), cube, bounds_error=False, fill_value=0.0
        )
        vals = interp(grid.nodes - y[None, :])
    return Potential(Field(grid, vals), V.support_radius, V.epsilon,
                     V.radial_profile, new_center, V.label)


# ---------------------------------------------------------------------------
# built-in potential library


def square_well(grid: Grid, depth: float, radius: float = 1.0, epsilon: float = 0.1) -> Potential:
    """Attractive well V = -depth on |x| < radius, zero outside."""
    profile = lambda r: np.where(np.asarray(r) < radius, -depth, 0.0)
    return Potential(Field.from_radial(grid, profile), radius, epsilon, profile,
                     label=f"well(depth={depth},radius={radius})")


def power_singularity(grid: Grid, alpha: float, radius: float = 1.0,
                      epsilon: float = 0.1) -> Potential:
    """Truncated power singularity |x|^(-alpha) on |x| < radius.

    A node exactly at the origin is offset by half a cell diagonal so the
    sample stays finite; refinement auditing detects true divergence.
    """
    if grid.kind == BOX:
        h = 2.0 * grid.extent / round(grid.n ** (1.0 / 3.0))
        r_floor = 0.5 * math.sqrt(3.0) * h
    else:
        r_floor = 0.25 * grid.extent / grid.n

    def profile(r):
        r = np.maximum(np.asarray(r, dtype=float), r_floor)
        return np.where(r < radius, r**-alpha, 0.0)

    return Potential(Field.from_radial(grid, profile), radius, epsilon, profile,
                     label=f"power(alpha={alpha},radius={radius})")


def gaussian_well(grid: Grid, depth: float, width: float = 1.0,
                  epsilon: float = 0.1) -> Potential:
    """Smooth attractive well V = -depth * exp(-r^2/width^2)."""
    profile = lambda r: -depth * np.exp(-(np.asarray(r) / width) ** 2)
    return Potential(Field.from_radial(grid, profile), math.inf, epsilon, profile,
                     label=f"gaussian(depth={depth},width={width})")


def potential_from_table(grid: Grid, path: str, epsilon: float = 0.1) -> Potential:
    """Tabulated potential from CSV: rows of r,V or of x,y,z,V."""
    table = np.loadtxt(path, delimiter=",", ndmin=2)
    if table.shape[1] == 2:
        radii, vals = table[:, 0], table[:, 1]
        order = np.argsort(radii)
        samples = np.interp(grid.radii, radii[order], vals[order], right=0.0)
        support = float(np.max(radii))
        return Potential(Field(grid, samples), support, epsilon,
                         lambda r: np.interp(r, radii[order], vals[order], right=0.0),
                         label=f"table({path})")
    if table.shape[1] == 4:
        if grid.kind == RADIAL:
            raise ValueError("x,y,z,V tables require a box grid")
        from scipy.spatial import cKDTree

        tree = cKDTree(table[:, :3])
        _, idx = tree.query(grid.nodes)
        samples = table[idx, 3]
        support = float(np.max(np.linalg.norm(table[:, :3], axis=1)))
        return Potential(Field(grid, samples), support, epsilon, None,
                         label=f"table({path})")
    raise ValueError("table must have 2 (r,V) or 4 (x,y,z,V) columns")
