"""Uniform cell-centered 1-D grid with second-order calculus and tridiagonal solves.

Fields live at cell centers x_i = (i + 1/2) h on the interval (0, L).  Ghost
cells implement the two boundary conditions used throughout: ``neumann``
reflects the adjacent cell value (zero normal derivative at the wall) and
``dirichlet0`` negates it (zero wall value).  The discrete gradient/divergence
pair satisfies exact summation by parts for these extensions, and the midpoint
quadrature makes flux divergences telescope exactly, which is what the mass
bookkeeping of the solvers relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

__all__ = [
    "Grid",
    "Field",
    "SolvabilityError",
    "DegenerateWeightError",
    "gradient",
    "divergence",
    "laplacian_apply",
    "laplacian_solve",
    "integrate",
    "mean_shift",
    "BOUNDARY_CONDITIONS",
]

BOUNDARY_CONDITIONS = ("neumann", "dirichlet0")

# Compatibility tolerance for the pure-Neumann zero-shift solve.
SOLVABILITY_TOL = 1.0e-10


class SolvabilityError(ValueError):
    """Pure-Neumann problem with a right side that is not mean-free."""


class DegenerateWeightError(ValueError):
    """Weighted mean shift requested against a weight with vanishing integral."""


@dataclass(frozen=True)
class Grid:
    """Uniform grid of n_cells cells on (0, length_L)."""

    n_cells: int
    length_L: float

    def __post_init__(self) -> None:
        if int(self.n_cells) != self.n_cells or self.n_cells < 8:
            raise ValueError(f"n_cells must be an integer >= 8, got {self.n_cells}")
        if not self.length_L > 0.0:
            raise ValueError(f"length_L must be positive, got {self.length_L}")

    @property
    def spacing_h(self) -> float:
        return self.length_L / self.n_cells

    def cell_centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.spacing_h

    def cell_edges(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.spacing_h

    def field(self, values) -> "Field":
        """Wrap values (scalar or array of length n_cells) as a Field."""
        arr = np.asarray(values, dtype=float)
        if arr.ndim == 0:
            arr = np.full(self.n_cells, float(arr))
        return Field(self, arr)

    def zeros(self) -> "Field":
        return Field(self, np.zeros(self.n_cells))


@dataclass(frozen=True)
class Field:
    """Grid function stored at cell centers."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.shape != (self.grid.n_cells,):
            raise ValueError(
                f"field length {arr.shape} does not match grid with {self.grid.n_cells} cells"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", arr)


def _check_bc(bc: str) -> None:
    if bc not in BOUNDARY_CONDITIONS:
        raise ValueError(f"unknown boundary condition {bc!r}; expected one of {BOUNDARY_CONDITIONS}")


def _extend(values: np.ndarray, bc: str) -> np.ndarray:
    sign = 1.0 if bc == "neumann" else -1.0
    return np.concatenate(([sign * values[0]], values, [sign * values[-1]]))


def gradient(f: Field, bc: str) -> Field:
    """Second-order central difference with ghost cells by reflection/odd extension."""
    _check_bc(bc)
    ext = _extend(f.values, bc)
    return Field(f.grid, (ext[2:] - ext[:-2]) / (2.0 * f.grid.spacing_h))


def divergence(f: Field, bc: str) -> Field:
    """1-D divergence (same stencil as gradient); adjoint to -gradient under integrate."""
    return gradient(f, bc)


def laplacian_apply(f: Field, bc: str) -> Field:
    """Compact three-point Laplacian with the given ghost extension."""
    _check_bc(bc)
    ext = _extend(f.values, bc)
    h2 = f.grid.spacing_h ** 2
    return Field(f.grid, (ext[:-2] - 2.0 * f.values + ext[2:]) / h2)


def integrate(f: Field) -> float:
    """Midpoint quadrature; exact for fields that are linear in x."""
    return float(np.sum(f.values) * f.grid.spacing_h)


def mean_shift(f: Field, target_weighted_mean: float, weight: Field) -> Field:
    """Add the constant s making integrate(weight * (f + s)) equal the target."""
    wint = integrate(weight)
    tol = 1.0e-12 * max(1.0, float(np.max(np.abs(weight.values))) * weight.grid.length_L)
    if wint <= tol:
        raise DegenerateWeightError(
            f"weight integral {wint:g} is not positive enough to pin the constant"
        )
    s = (target_weighted_mean - integrate(Field(f.grid, f.values * weight.values))) / wint
    return Field(f.grid, f.values + s)


def _banded_neg_laplacian(n: int, h: float, bc: str, shift: float) -> np.ndarray:
    """Banded storage of shift*I - Laplacian for solve_banded."""
    h2 = h * h
    ab = np.zeros((3, n))
    ab[1, :] = shift + 2.0 / h2
    ab[0, 1:] = -1.0 / h2
    ab[2, :-1] = -1.0 / h2
    edge = 1.0 / h2 if bc == "neumann" else 3.0 / h2
    ab[1, 0] = shift + edge
    ab[1, -1] = shift + edge
    return ab


def laplacian_solve(rhs: Field, bc: str, shift: float = 0.0) -> Field:
    """Solve an elliptic two-point problem to machine precision.

    For ``shift == 0`` this inverts the Laplacian: the returned u satisfies
    Lap(u) = rhs for the given boundary condition.  A pure-Neumann problem is
    solvable only for mean-free right sides; the right side is checked against
    :data:`SOLVABILITY_TOL`, the constant null direction is pinned, and the
    solution is returned with zero mean.  For ``shift > 0`` the returned u
    satisfies (shift*I - Lap) u = rhs, which is uniquely solvable for either
    boundary condition.
    """
    _check_bc(bc)
    if shift < 0.0:
        raise ValueError(f"shift must be nonnegative, got {shift}")
    g = rhs.grid
    n, h = g.n_cells, g.spacing_h

    if shift > 0.0:
        ab = _banded_neg_laplacian(n, h, bc, shift)
        return Field(g, solve_banded((1, 1), ab, rhs.values))

    ab = _banded_neg_laplacian(n, h, bc, 0.0)
    b = -rhs.values
    if bc == "dirichlet0":
        return Field(g, solve_banded((1, 1), ab, b))

    # Pure Neumann: enforce compatibility, pin one unknown, return mean-zero.
    mean = float(np.mean(rhs.values))
    scale = float(np.sqrt(np.mean(rhs.values**2)))
    if abs(mean) > SOLVABILITY_TOL * max(scale, 1.0e-300):
        raise SolvabilityError(
            f"neumann right side has mean {mean:g}; the zero-shift problem is unsolvable"
        )
    b = b - np.mean(b)
    ab[1, 0] = 1.0
    ab[0, 1] = 0.0
    b[0] = 0.0
    x = solve_banded((1, 1), ab, b)
    return Field(g, x - np.mean(x))
