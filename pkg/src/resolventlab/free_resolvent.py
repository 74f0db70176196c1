"""The free resolvent at positive energy as a dense singular-kernel operator.

Operators are parameterized by the spectral parameter lam (energy lam^2) and
a boundary branch.  On box grids the kernel is

    exp(+/- i*lam*|x-y|) / (4*pi*|x-y|),

with the self-cell replaced by the grid's diagonal correction.  On radial
grids all kernels are averaged over angles; for shells of radii r, r' with
P = r+r' and M = |r-r'| the averaged outgoing kernel is

    (exp(i*lam*P) - exp(i*lam*M)) / (8*pi*r*r'*i*lam),

which is finite at r = r' and reduces to 1/(4*pi*max(r,r')) at lam = 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from resolventlab.grids import BOX, RADIAL, Field, Grid
from resolventlab.potentials import lp_norm


class Branch(enum.Enum):
    """Boundary value taken from above (plus) or below (minus) the cut."""

    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> float:
        return 1.0 if self is Branch.PLUS else -1.0

    @property
    def conjugate(self) -> "Branch":
        return Branch.MINUS if self is Branch.PLUS else Branch.PLUS


@dataclass
class ResolventOperator:
    """Dense operator at fixed (lam, branch); matrix includes quadrature weights."""

    grid: Grid
    lam: float
    branch: Branch | None
    matrix: np.ndarray
    tag: str = "free"

    def apply(self, f: Field | np.ndarray) -> Field:
        values = f.values if isinstance(f, Field) else np.asarray(f)
        return Field(self.grid, self.matrix @ values)


def free_kernel(lam: float, branch: Branch, x: np.ndarray, y: np.ndarray) -> complex:
    """Pointwise kernel exp(+/- i*lam*|x-y|)/(4*pi*|x-y|); x must differ from y."""
    d = float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))
    if d == 0.0:
        raise ValueError("kernel is singular at x = y; use the diagonal correction")
    return np.exp(1j * branch.sign * lam * d) / (4.0 * np.pi * d)


# ---------------------------------------------------------------------------
# kernel matrices


def _box_free_matrix(grid: Grid, lam: float, sign: float) -> np.ndarray:
    d = grid.pairwise_distances()
    np.fill_diagonal(d, 1.0)
    kernel = np.exp(1j * sign * lam * d) / (4.0 * np.pi * d)
    mat = kernel * grid.weights[None, :]
    np.fill_diagonal(mat, grid.diag_correction)
    return mat


def _radial_averaged_kernel(grid: Grid, lam: float, sign: float) -> np.ndarray:
    r = grid.nodes
    P = r[:, None] + r[None, :]
    M = np.abs(r[:, None] - r[None, :])
    rr = r[:, None] * r[None, :]
    if lam == 0.0:
        return 1.0 / (4.0 * np.pi * np.maximum(r[:, None], r[None, :]))
    mu = 1j * sign * lam
    return (np.exp(mu * P) - np.exp(mu * M)) / (8.0 * np.pi * rr * mu)


def _radial_free_matrix(grid: Grid, lam: float, sign: float) -> np.ndarray:
    kernel = _radial_averaged_kernel(grid, lam, sign)
    mat = kernel.astype(complex) * grid.weights[None, :]
    # self cell: exact Newton integral plus the smooth remainder at the midpoint
    r = grid.nodes
    smooth = np.diag(kernel) - 1.0 / (4.0 * np.pi * r)
    np.fill_diagonal(mat, grid.diag_correction + smooth * grid.weights)
    return mat


def assemble_free(grid: Grid, lam: float, branch: Branch) -> ResolventOperator:
    """Dense free resolvent R0(lam^2) on the chosen boundary branch."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if grid.kind == BOX:
        mat = _box_free_matrix(grid, lam, branch.sign)
    else:
        mat = _radial_free_matrix(grid, lam, branch.sign)
    return ResolventOperator(grid, lam, branch, mat, tag="free")


def assemble_free_energy(grid: Grid, z: complex) -> ResolventOperator:
    """Free resolvent at complex energy z, kernel exp(i*sqrt(z)|x-y|)/(4pi|x-y|).

    sqrt(z) is taken with nonnegative imaginary part.  Used by consistency
    checks that shift the energy slightly off the real axis.
    """
    root = np.sqrt(complex(z))
    if root.imag < 0:
        root = -root
    if grid.kind == BOX:
        d = grid.pairwise_distances()
        np.fill_diagonal(d, 1.0)
        kernel = np.exp(1j * root * d) / (4.0 * np.pi * d)
        mat = kernel * grid.weights[None, :]
        np.fill_diagonal(mat, grid.diag_correction)
    else:
        r = grid.nodes
        P = r[:, None] + r[None, :]
        M = np.abs(r[:, None] - r[None, :])
        rr = r[:, None] * r[None, :]
        mu = 1j * root
        kernel = (np.exp(mu * P) - np.exp(mu * M)) / (8.0 * np.pi * rr * mu)
        mat = kernel * grid.weights[None, :]
        smooth = np.diag(kernel) - 1.0 / (4.0 * np.pi * r)
        np.fill_diagonal(mat, grid.diag_correction + smooth * grid.weights)
    return ResolventOperator(grid, float(np.real(root)), None, mat, tag="free")


def assemble_difference(grid: Grid, lam: float) -> ResolventOperator:
    """R0^+(lam^2) - R0^-(lam^2); a smooth kernel, zero at lam = 0."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if lam == 0.0:
        mat = np.zeros((grid.n, grid.n), dtype=complex)
    elif grid.kind == BOX:
        d = grid.pairwise_distances()
        np.fill_diagonal(d, 1.0)
        kernel = 1j * np.sin(lam * d) / (2.0 * np.pi * d)
        mat = kernel * grid.weights[None, :]
        np.fill_diagonal(mat, 1j * lam / (2.0 * np.pi) * grid.weights)
    else:
        r = grid.nodes
        hi = np.maximum(r[:, None], r[None, :])
        lo = np.minimum(r[:, None], r[None, :])
        kernel = 1j * np.sin(lam * hi) * np.sin(lam * lo) / (
            2.0 * np.pi * r[:, None] * r[None, :] * lam
        )
        mat = kernel * grid.weights[None, :]
    return ResolventOperator(grid, lam, None, mat, tag="difference")


def assemble_derivative(grid: Grid, lam: float, branch: Branch) -> ResolventOperator:
    """d/dlam of the free resolvent; bounded kernel, no diagonal correction."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    s = branch.sign
    if grid.kind == BOX:
        d = grid.pairwise_distances()
        kernel = (1j * s / (4.0 * np.pi)) * np.exp(1j * s * lam * d)
        mat = kernel * grid.weights[None, :]
    else:
        r = grid.nodes
        P = r[:, None] + r[None, :]
        M = np.abs(r[:, None] - r[None, :])
        rr = r[:, None] * r[None, :]
        if lam == 0.0:
            kernel = np.full((grid.n, grid.n), 1j * s / (4.0 * np.pi))
        else:
            mu = 1j * s * lam
            # integral over s in [M, P] of s*exp(mu*s) ds
            anti_hi = np.exp(mu * P) * (P / mu - 1.0 / mu**2)
            anti_lo = np.exp(mu * M) * (M / mu - 1.0 / mu**2)
            kernel = (1j * s / (8.0 * np.pi * rr)) * (anti_hi - anti_lo)
        mat = kernel * grid.weights[None, :]
    return ResolventOperator(grid, lam, branch, mat, tag="derivative")


def apply_free(
    grid: Grid, lam: float, branch: Branch, values: np.ndarray, block: int = 1024
) -> np.ndarray:
    """Apply the free resolvent without materializing the full matrix.

    Streams over row blocks; intended for box grids too large for dense
    assembly (n_per_axis around 24 and up).
    """
    values = np.asarray(values)
    if grid.kind != BOX:
        return assemble_free(grid, lam, branch).matrix @ values
    out = np.empty(grid.n, dtype=complex)
    wf = grid.weights * values
    for start in range(0, grid.n, block):
        stop = min(start + block, grid.n)
        diff = grid.nodes[start:stop, None, :] - grid.nodes[None, :, :]
        d = np.sqrt(np.sum(diff * diff, axis=-1))
        rows = np.arange(start, stop)
        d[rows - start, rows] = 1.0
        if lam == 0.0:
            kernel = 1.0 / (4.0 * np.pi * d)
        else:
            kernel = np.exp(1j * branch.sign * lam * d) / (4.0 * np.pi * d)
        kernel[rows - start, rows] = 0.0
        out[start:stop] = kernel @ wf
        out[start:stop] += grid.diag_correction[rows] * values[rows]
    return out


# ---------------------------------------------------------------------------
# norms and probes


def op_norm_1_to_inf(op: ResolventOperator | np.ndarray, weights: np.ndarray | None = None) -> float:
    """Discrete L1 -> Linf operator norm, max_ij |A_ij| / w_j."""
    if isinstance(op, ResolventOperator):
        matrix, weights = op.matrix, op.grid.weights
    else:
        matrix = op
        if weights is None:
            raise ValueError("weights required when passing a bare matrix")
    return float(np.max(np.abs(matrix) / weights[None, :]))


def weak_l3_norm(f: Field) -> float:
    """Level-set weak-L3 norm: sup_h h * meas(|f| > h)^(1/3) over node levels."""
    mags = np.abs(f.values)
    order = np.argsort(mags)[::-1]
    measures = np.cumsum(f.grid.weights[order])
    return float(np.max(mags[order] * measures ** (1.0 / 3.0)))


def mapping_norm_probe(grid: Grid, lam: float, p: float, probes: list[Field]) -> float:
    """Empirical lower bound on the Lp -> L3p norm of the free resolvent.

    Returns the largest ratio ||R0 f||_{3p} / ||f||_p over the probe set.
    """
    if not 1.0 < p <= 4.0 / 3.0:
        raise ValueError("p must lie in (1, 4/3]")
    if not probes:
        raise ValueError("probe set must be nonempty")
    op = assemble_free(grid, lam, Branch.PLUS)
    best = 0.0
    for f in probes:
        denom = lp_norm(f, p)
        if denom == 0.0:
            raise ValueError("probes must be nonzero")
        best = max(best, lp_norm(op.apply(f), 3.0 * p) / denom)
    return best


def restriction_positivity_check(grid: Grid, lam: float, g: Field, branch: Branch = Branch.PLUS) -> float:
    """Im<R0(lam^2) g, g>; nonnegative (up to quadrature) on the plus branch."""
    op = assemble_free(grid, lam, branch)
    u = op.matrix @ g.values
    return float(np.imag(np.sum(grid.weights * u * np.conj(g.values))))
