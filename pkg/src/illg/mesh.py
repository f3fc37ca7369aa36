"""Uniform cell-centered grids with a one-cell ghost layer.

Fields live at cell centers x_i = (i - 1/2) h; the slots with index 0 and
n+1 on each axis are ghost cells used to impose the homogeneous Neumann
boundary condition by copying the nearest interior value.  The discrete
gradient is realized as forward differences on cell links, which makes the
summation-by-parts identity

    <-lap(u), v> = sum_a <grad_a(u), grad_a(v)>

hold exactly against the 3/7-point Laplacian (the identity the energy
estimates rely on).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered box mesh in 1 or 3 dimensions."""

    dim: int
    cells: tuple[int, ...]
    extents: tuple[float, ...]
    spacings: tuple[float, ...]

    @property
    def shape_with_ghosts(self) -> tuple[int, ...]:
        return tuple(n + 2 for n in self.cells)

    @property
    def cell_volume(self) -> float:
        """Volume element h^d (product of per-axis spacings)."""
        out = 1.0
        for h in self.spacings:
            out *= h
        return out

    @property
    def min_spacing(self) -> float:
        return min(self.spacings)

    def centers(self, axis: int) -> np.ndarray:
        """Interior cell-center coordinates along one axis."""
        n = self.cells[axis]
        h = self.spacings[axis]
        return (np.arange(1, n + 1) - 0.5) * h

    def center_mesh(self) -> tuple[np.ndarray, ...]:
        """Sparse meshgrid of interior cell centers (broadcastable)."""
        axes = [self.centers(a) for a in range(self.dim)]
        return tuple(np.meshgrid(*axes, indexing="ij", sparse=True))


def build_grid(dim, cells_per_axis, extent_per_axis) -> Grid:
    """Construct a Grid; counts must be >= 2, extents > 0."""
    if dim not in (1, 3):
        raise ValueError(f"dim must be 1 or 3, got {dim}")
    cells = tuple(int(n) for n in cells_per_axis)
    extents = tuple(float(e) for e in extent_per_axis)
    if len(cells) != dim or len(extents) != dim:
        raise ValueError(
            f"expected {dim} cell counts and extents, got {len(cells)}/{len(extents)}")
    for n in cells:
        if n < 2:
            raise ValueError(f"cell counts must be >= 2, got {n}")
    for e in extents:
        if not e > 0.0:
            raise ValueError(f"extents must be positive, got {e}")
    spacings = tuple(e / n for e, n in zip(extents, cells))
    return Grid(dim=dim, cells=cells, extents=extents, spacings=spacings)


class VectorField:
    """One 3-vector per cell, ghost layer included.

    ``data`` has shape (n1+2, ..., nd+2, 3); ``interior`` is a view that
    drops the ghost layer.  Ghost values are only meaningful after
    :func:`fill_ghost_neumann`.
    """

    __slots__ = ("grid", "data")

    def __init__(self, grid: Grid, data: np.ndarray | None = None):
        if data is None:
            data = np.zeros(grid.shape_with_ghosts + (3,))
        expected = grid.shape_with_ghosts + (3,)
        if data.shape != expected:
            raise ValueError(f"data shape {data.shape} != {expected}")
        self.grid = grid
        self.data = np.ascontiguousarray(data, dtype=np.float64)

    @property
    def interior(self) -> np.ndarray:
        sl = (slice(1, -1),) * self.grid.dim
        return self.data[sl]

    @classmethod
    def from_interior(cls, grid: Grid, values: np.ndarray) -> "VectorField":
        f = cls(grid)
        f.interior[...] = values
        return f

    @classmethod
    def constant(cls, grid: Grid, vec) -> "VectorField":
        f = cls(grid)
        f.data[...] = np.asarray(vec, dtype=np.float64)
        return f

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.data.copy())


def _check_same_grid(f: VectorField, g: VectorField) -> None:
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")


def fill_ghost_neumann(field: VectorField) -> VectorField:
    """Copy the nearest interior value into every ghost cell (in place).

    Axis-by-axis over the full range of the other axes, so edge/corner
    ghosts end up equal to the nearest interior corner cell.  Idempotent.
    """
    a = field.data
    for ax in range(field.grid.dim):
        lo = [slice(None)] * a.ndim
        hi = [slice(None)] * a.ndim
        lo[ax], hi[ax] = 0, 1
        a[tuple(lo)] = a[tuple(hi)]
        lo[ax], hi[ax] = -1, -2
        a[tuple(lo)] = a[tuple(hi)]
    return field


def laplacian(field: VectorField) -> VectorField:
    """3-point (1-D) / 7-point (3-D) Laplacian on interior cells.

    Ghosts of ``field`` must be freshly Neumann-filled.  Ghost cells of the
    result are left at zero and must not be read before a new fill.
    """
    grid = field.grid
    a = field.data
    out = VectorField(grid)
    acc = out.interior
    dim = grid.dim
    interior = (slice(1, -1),) * dim
    for ax in range(dim):
        up = list(interior)
        dn = list(interior)
        up[ax] = slice(2, None)
        dn[ax] = slice(0, -2)
        inv_h2 = 1.0 / grid.spacings[ax] ** 2
        acc += (a[tuple(up)] - 2.0 * a[interior] + a[tuple(dn)]) * inv_h2
    return out


def gradient(field: VectorField) -> list[np.ndarray]:
    """Per-axis link differences (f_{i+1} - f_i)/h_a.

    Axis ``a``'s array covers all n_a+1 links along that axis (boundary
    links are zero after a Neumann fill) restricted to interior cells in
    the other axes.  Used only through norms and inner products.
    """
    grid = field.grid
    a = field.data
    out = []
    dim = grid.dim
    for ax in range(dim):
        sl = [slice(1, -1)] * dim + [slice(None)]
        sl[ax] = slice(None)
        d = np.diff(a[tuple(sl)], axis=ax) / grid.spacings[ax]
        out.append(d)
    return out


def inner_product(f: VectorField, g: VectorField) -> float:
    """Discrete inner product h^d * sum over interior cells of f . g."""
    _check_same_grid(f, g)
    return float(f.grid.cell_volume * np.sum(f.interior * g.interior))


def grad_inner_product(f: VectorField, g: VectorField) -> float:
    """Link-weighted inner product sum_a <grad_a f, grad_a g>.

    Requires both fields' ghosts to be freshly filled.
    """
    _check_same_grid(f, g)
    vol = f.grid.cell_volume
    total = 0.0
    for df, dg in zip(gradient(f), gradient(g)):
        total += vol * np.sum(df * dg)
    return float(total)


def grad_norm_sq(f: VectorField) -> float:
    """|grad f|_2^2 with the link weighting (ghosts must be filled)."""
    vol = f.grid.cell_volume
    total = 0.0
    for d in gradient(f):
        total += vol * np.sum(d * d)
    return float(total)


def norm_l2(f: VectorField) -> float:
    return float(np.sqrt(inner_product(f, f)))


def norm_linf(f: VectorField) -> float:
    """Max over interior cells of the max-abs component."""
    return float(np.max(np.abs(f.interior)))


def norm_h1(f: VectorField) -> float:
    """sqrt(|f|_2^2 + |grad f|_2^2); ghosts must be filled."""
    return float(np.sqrt(inner_product(f, f) + grad_norm_sq(f)))


def cross(f: VectorField, g: VectorField) -> VectorField:
    """Pointwise cross product f x g (interior; ghosts left at zero)."""
    _check_same_grid(f, g)
    out = VectorField(f.grid)
    out.interior[...] = np.cross(f.interior, g.interior)
    return out
