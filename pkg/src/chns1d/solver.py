"""Damped fixed-point solver for the stationary two-phase balance system in 1-D.

The unknown quadruple (rho, u, mu, c) satisfies, on (0, L) with eps in (0, 1):

    eps^2 rho + (rho u)'                    = eps^4 rho'' + eps^2 rho0
    visc u''  = sigma * [ eps^2 rho u + (rho u^2)' + Pi(rho)'
                          + eps^4 rho' u' + rho dF(c) c' - rho mu c'
                          - rho g1 - g2 ]
    mu''      = sigma * [ eps rho c + rho u c' - eps rho0 c0 ]
    c''       = sigma * [ rho dF(c) - rho mu ]

with u = 0 and zero normal derivatives for rho, mu, c at the walls,
visc = 2 lambda1 + lambda2, and Pi the total plus artificial pressure.  Two
integral constraints pin the Neumann constants: the rho-weighted means of c
and mu are prescribed (the c one with eps-dependent corrections).  The load
factor sigma in (0, 1] scales every nonlinear right side and is ramped to 1 as
a continuation strategy; a second continuation drives eps down a schedule.

Each iteration lags the nonlinear couplings at the previous iterate (no global
Newton linearization).  The one exception, forced by stability, is the
mass-pressure pair: a velocity proposal obtained from the momentum equation
with a frozen-density pressure feeds the continuity solve with a perturbation
gain of order P'(rho0)/(visc * eps^2), which diverges for any useful eps.
:func:`solve_flow_coupled` therefore solves the linearized (rho, u) block as
one banded system per iteration, with the pressure slope Pi'(rho_old) frozen
at the previous iterate; every other coupling stays lagged.  The fixed points
are identical to those of the naive splitting.  Density positivity and exact
mass bookkeeping are preserved because the density actually returned is always
the M-matrix upwind continuity solve for the damped velocity.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from . import mesh
from .mesh import Field, Grid
from .potential import (
    PotentialParams,
    artificial_pressure,
    dF_delta,
    guarded_power,
    pressure,
)

__all__ = [
    "FluidParams",
    "ProblemSpec",
    "MmsSources",
    "State",
    "SolveControls",
    "SingularSystemError",
    "DivergenceError",
    "constant_state",
    "solve_continuity",
    "solve_momentum",
    "solve_flow_coupled",
    "solve_mu",
    "solve_c",
    "picard_step",
    "continuation_solve",
    "delta_sweep",
    "eps_sweep",
    "StageLog",
    "ConvergenceLog",
    "SweepReport",
]


class SingularSystemError(RuntimeError):
    """Assembled transport matrix lost diagonal dominance (eps too small for the grid)."""


class DivergenceError(RuntimeError):
    """Fixed-point residual grew persistently; carries the failing stage."""


@dataclass(frozen=True)
class FluidParams:
    """Adiabatic exponent, viscosities, mixing coefficient, artificial-pressure exponent."""

    gamma: float = 2.0
    lambda1: float = 1.0
    lambda2: float = 0.0
    H: float = 1.0
    art_exponent: int = 11

    def __post_init__(self) -> None:
        if not self.lambda1 > 0.0:
            raise ValueError(f"lambda1 must be positive, got {self.lambda1}")
        if not 2.0 * self.lambda1 + 3.0 * self.lambda2 >= 0.0:
            raise ValueError(
                f"require 2*lambda1 + 3*lambda2 >= 0, got lambda1={self.lambda1}, lambda2={self.lambda2}"
            )
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if self.gamma <= 1.5:
            warnings.warn(
                f"gamma={self.gamma} <= 3/2 lies outside the regime the analysis covers",
                stacklevel=2,
            )
        if not self.H > 0.0:
            raise ValueError(f"H must be positive, got {self.H}")
        if int(self.art_exponent) != self.art_exponent or self.art_exponent < 2:
            raise ValueError(f"art_exponent must be an integer >= 2, got {self.art_exponent}")

    @property
    def visc(self) -> float:
        """Coefficient 2*lambda1 + lambda2 of the 1-D viscous operator (always > 0)."""
        return 2.0 * self.lambda1 + self.lambda2


@dataclass(frozen=True)
class MmsSources:
    """Optional per-equation manufactured sources (verification mode)."""

    continuity: Optional[Field] = None
    momentum: Optional[Field] = None
    mu: Optional[Field] = None
    c: Optional[Field] = None


@dataclass(frozen=True)
class ProblemSpec:
    """Domain, parameters, masses, forcing, and regularization of one problem."""

    grid: Grid
    potential: PotentialParams
    fluid: FluidParams
    m1: float = 1.0
    m2: float = 0.0
    g1: Optional[Field] = None
    g2: Optional[Field] = None
    eps: float = 1.0e-2
    mms_sources: Optional[MmsSources] = None

    def __post_init__(self) -> None:
        if not self.m1 > 0.0:
            raise ValueError(f"m1 must be positive, got {self.m1}")
        if not (-self.m1 < self.m2 < self.m1):
            raise ValueError(f"m2 must lie in (-m1, m1), got m2={self.m2}, m1={self.m1}")
        if not (0.0 < self.eps < 1.0):
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        for name in ("g1", "g2"):
            f = getattr(self, name)
            if f is None:
                object.__setattr__(self, name, self.grid.zeros())
            elif f.grid != self.grid:
                raise ValueError(f"{name} lives on a different grid")

    @property
    def rho0(self) -> float:
        """Mean density m1 / L."""
        return self.m1 / self.grid.length_L

    @property
    def c0(self) -> float:
        """Mean concentration m2 / m1."""
        return self.m2 / self.m1


@dataclass(frozen=True)
class State:
    """Solution quadruple (rho, u, mu, c) as grid functions."""

    rho: Field
    u: Field
    mu: Field
    c: Field

    def __post_init__(self) -> None:
        g = self.rho.grid
        for name in ("u", "mu", "c"):
            if getattr(self, name).grid != g:
                raise ValueError(f"{name} lives on a different grid than rho")
        if np.any(self.rho.values < 0.0):
            raise ValueError("rho must be nonnegative everywhere")


@dataclass(frozen=True)
class SolveControls:
    """Continuation schedules and fixed-point iteration controls."""

    sigma_schedule: tuple = (0.25, 0.5, 0.75, 1.0)
    damping: float = 0.5
    max_picard: int = 500
    tol_rel: float = 1.0e-8
    eps_schedule: tuple = (1.0e-1, 1.0e-2, 1.0e-3)

    def __post_init__(self) -> None:
        sig = tuple(float(s) for s in self.sigma_schedule)
        eps = tuple(float(e) for e in self.eps_schedule)
        object.__setattr__(self, "sigma_schedule", sig)
        object.__setattr__(self, "eps_schedule", eps)
        if not sig or any(not (0.0 < s <= 1.0) for s in sig):
            raise ValueError(f"sigma_schedule entries must lie in (0, 1], got {sig}")
        if any(b <= a for a, b in zip(sig, sig[1:])) or sig[-1] != 1.0:
            raise ValueError(f"sigma_schedule must increase and end at 1, got {sig}")
        if not eps or any(not (0.0 < e < 1.0) for e in eps):
            raise ValueError(f"eps_schedule entries must lie in (0, 1), got {eps}")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError(f"eps_schedule must be strictly decreasing, got {eps}")
        if not (0.0 < self.damping <= 1.0):
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")
        if self.max_picard < 1:
            raise ValueError(f"max_picard must be at least 1, got {self.max_picard}")
        if not self.tol_rel > 0.0:
            raise ValueError(f"tol_rel must be positive, got {self.tol_rel}")


# ---------------------------------------------------------------------------
# Elementary sub-solves
# ---------------------------------------------------------------------------

def _face_velocities(u: np.ndarray) -> np.ndarray:
    """Velocity at the n+1 cell faces; wall faces carry the zero trace."""
    uf = np.zeros(u.size + 1)
    uf[1:-1] = 0.5 * (u[:-1] + u[1:])
    return uf


def _continuity_bands(uf: np.ndarray, eps: float, g: Grid):
    """Tridiagonal bands of eps^2 I + upwind advection - eps^4 Lap (Neumann)."""
    n, h = g.n_cells, g.spacing_h
    up = np.maximum(uf, 0.0)
    um = np.minimum(uf, 0.0)
    e4 = eps**4 / h**2
    diag = eps**2 + (up[1:] - um[:-1]) / h + 2.0 * e4
    diag[0] -= e4
    diag[-1] -= e4
    upper = um[1:-1] / h - e4
    lower = -up[1:-1] / h - e4
    # Column sums telescope to eps^2 exactly; a loss of that excess means the
    # assembled matrix is no longer an M-matrix.
    excess = diag.copy()
    excess[:-1] += lower
    excess[1:] += upper
    if np.min(excess) <= 0.5 * eps**2:
        raise SingularSystemError(
            f"transport matrix lost diagonal dominance (eps={eps:g}, n={n}); eps too small for the grid"
        )
    return diag, upper, lower


def solve_continuity(u: Field, eps: float, spec: ProblemSpec) -> Field:
    """Solve the regularized continuity equation for the density, given u.

    Upwind fluxes with zero wall flux make the assembled operator an M-matrix,
    so the density is nonnegative, and summing the discrete equation
    telescopes the fluxes away, so integrate(rho) = m1 holds to machine
    precision (manufactured sources excepted).
    """
    g = spec.grid
    n = g.n_cells
    diag, upper, lower = _continuity_bands(_face_velocities(u.values), eps, g)
    ab = np.zeros((3, n))
    ab[1, :] = diag
    ab[0, 1:] = upper
    ab[2, :-1] = lower
    b = np.full(n, eps**2 * spec.rho0)
    if spec.mms_sources is not None and spec.mms_sources.continuity is not None:
        b = b + spec.mms_sources.continuity.values
    rho = solve_banded((1, 1), ab, b)
    if np.min(rho) < -1.0e-9 * max(spec.rho0, 1.0):
        raise SingularSystemError(
            f"continuity solve produced negative density {float(np.min(rho)):g}"
        )
    return Field(g, np.maximum(rho, 0.0))


def _momentum_forcing(state: State, eps: float, spec: ProblemSpec) -> np.ndarray:
    """Lagged right side of the momentum balance (everything but visc*u'')."""
    g = spec.grid
    p, fp = spec.potential, spec.fluid
    rho, u, mu, c = state.rho.values, state.u.values, state.mu.values, state.c.values
    pi = artificial_pressure(rho, p.delta, fp.art_exponent) + pressure(rho, fp)
    dpi = mesh.gradient(Field(g, pi), "neumann").values
    adv = mesh.gradient(Field(g, rho * u * u), "dirichlet0").values
    drho = mesh.gradient(state.rho, "neumann").values
    du = mesh.gradient(state.u, "dirichlet0").values
    dc = mesh.gradient(state.c, "neumann").values
    return (
        eps**2 * rho * u
        + adv
        + dpi
        + eps**4 * drho * du
        + rho * dF_delta(c, p) * dc
        - rho * mu * dc
        - rho * spec.g1.values
        - spec.g2.values
    )


def solve_momentum(state: State, sigma: float, eps: float, spec: ProblemSpec) -> Field:
    """Solve visc u'' = sigma * (lagged momentum right side) with u = 0 at the walls.

    All nonlinear terms are evaluated at the incoming state.  This plain
    lagged solve is the verification surface for the momentum discretization;
    the fixed-point iteration itself uses :func:`solve_flow_coupled`, whose
    fixed points satisfy exactly this equation.
    """
    rhs = sigma * _momentum_forcing(state, eps, spec)
    if spec.mms_sources is not None and spec.mms_sources.momentum is not None:
        rhs = rhs + spec.mms_sources.momentum.values
    return mesh.laplacian_solve(Field(spec.grid, rhs / spec.fluid.visc), "dirichlet0")


def solve_flow_coupled(state: State, sigma: float, eps: float, spec: ProblemSpec) -> tuple[Field, Field]:
    """One linearized (rho, u) block solve with implicit pressure feedback.

    Solves, as a single banded system in the interleaved unknowns
    (rho_0, u_0, rho_1, u_1, ...):

        eps^2 rho + div_up(rho; u_old) + div(rho_old (u - u_old)) - eps^4 rho''
            = eps^2 rho0
        visc u'' - sigma (Pi'(rho_old) (rho - rho_old))' = sigma F1(state)

    where div_up freezes the upwind face velocities at the incoming state and
    F1 is the fully lagged momentum right side.  At a fixed point (rho, u)
    equal the incoming pair and the equations reduce to the plain lagged
    splitting; away from it the implicit pressure-density coupling removes the
    splitting's unstable mass-pressure mode.
    """
    g = spec.grid
    n, h = g.n_cells, g.spacing_h
    p, fp = spec.potential, spec.fluid
    visc = fp.visc
    rho_t, u_t = state.rho.values, state.u.values

    uf = _face_velocities(u_t)
    diag_c, upper_c, lower_c = _continuity_bands(uf, eps, g)
    rho_f = np.zeros(n + 1)
    rho_f[1:-1] = 0.5 * (rho_t[:-1] + rho_t[1:])

    # Pi'(rho_old); the artificial-pressure slope keeps the linearization
    # consistent with the full pressure used in F1.
    k = fp.art_exponent
    pi_slope = (
        k * guarded_power(rho_t, k - 1) / np.log(1.0 / p.delta)
        + fp.gamma * (fp.gamma - 1.0) * guarded_power(rho_t, fp.gamma - 1.0)
        + fp.H
    )

    ab = np.zeros((7, 2 * n))

    def add(r: int, c: int, v: float) -> None:
        ab[3 + r - c, c] += v

    h2 = h * h
    for i in range(n):
        rr, ru = 2 * i, 2 * i + 1
        # continuity row: density part
        add(rr, 2 * i, diag_c[i])
        if i < n - 1:
            add(rr, 2 * (i + 1), upper_c[i])
        if i > 0:
            add(rr, 2 * (i - 1), lower_c[i - 1])
        # continuity row: velocity-correction flux div(rho_old * u) at interior faces
        if i < n - 1:
            add(rr, ru, rho_f[i + 1] / (2.0 * h))
            add(rr, 2 * (i + 1) + 1, rho_f[i + 1] / (2.0 * h))
        if i > 0:
            add(rr, ru, -rho_f[i] / (2.0 * h))
            add(rr, 2 * (i - 1) + 1, -rho_f[i] / (2.0 * h))
        # momentum row: viscous operator with zero wall values
        add(ru, ru, -visc * (3.0 if i in (0, n - 1) else 2.0) / h2)
        if i < n - 1:
            add(ru, 2 * (i + 1) + 1, visc / h2)
        if i > 0:
            add(ru, 2 * (i - 1) + 1, visc / h2)
        # momentum row: -sigma * (Pi'(rho_old) rho)' by the wide central stencil
        # with reflecting ghosts (matching mesh.gradient with 'neumann')
        lo = max(i - 1, 0)
        hi = min(i + 1, n - 1)
        add(ru, 2 * hi, -sigma * pi_slope[hi] / (2.0 * h))
        add(ru, 2 * lo, +sigma * pi_slope[lo] / (2.0 * h))

    b = np.empty(2 * n)
    b_cont = np.full(n, eps**2 * spec.rho0)
    if spec.mms_sources is not None and spec.mms_sources.continuity is not None:
        b_cont = b_cont + spec.mms_sources.continuity.values
    # move the u_old part of the correction flux to the right side
    flux_old = rho_f * _face_velocities(u_t)
    b_cont += (flux_old[1:] - flux_old[:-1]) / h
    b[0::2] = b_cont

    b_mom = sigma * _momentum_forcing(state, eps, spec)
    if spec.mms_sources is not None and spec.mms_sources.momentum is not None:
        b_mom = b_mom + spec.mms_sources.momentum.values
    b_mom -= sigma * mesh.gradient(Field(g, pi_slope * rho_t), "neumann").values
    b[1::2] = b_mom

    z = solve_banded((3, 3), ab, b)
    return Field(g, np.maximum(z[0::2], 0.0)), Field(g, z[1::2])


def _projection(rhs: np.ndarray, g: Grid) -> tuple[np.ndarray, float]:
    """Remove the mean from a Neumann right side; report the removed integral."""
    mean = float(np.mean(rhs))
    return rhs - mean, abs(mean * g.length_L)


def solve_mu(state: State, sigma: float, eps: float, spec: ProblemSpec) -> tuple[Field, float]:
    """Solve the chemical-potential Poisson problem and pin its constant.

    The right side sigma*(eps rho c + rho u c' - eps rho0 c0) is projected to
    zero mean (the projection magnitude is returned as a compatibility
    residual that vanishes as the outer iteration converges), the Neumann
    problem is solved, and the constant is fixed so the rho-weighted mean of
    mu equals that of dF_delta(c).
    """
    g = spec.grid
    rho, u, c = state.rho.values, state.u.values, state.c.values
    dc = mesh.gradient(state.c, "neumann").values
    rhs = sigma * (eps * rho * c + rho * u * dc - eps * spec.rho0 * spec.c0)
    if spec.mms_sources is not None and spec.mms_sources.mu is not None:
        rhs = rhs + spec.mms_sources.mu.values
    rhs0, proj = _projection(rhs, g)
    mu_hat = mesh.laplacian_solve(Field(g, rhs0), "neumann")
    target = mesh.integrate(Field(g, rho * dF_delta(c, spec.potential)))
    return mesh.mean_shift(mu_hat, target, state.rho), proj


def solve_c(state: State, sigma: float, eps: float, spec: ProblemSpec) -> tuple[Field, float]:
    """Solve the concentration Poisson problem and impose the relative-mass constraint.

    The right side sigma*(rho dF_delta(c_prev) - rho mu) is mean-projected
    (projection magnitude returned), the Neumann problem is solved, and the
    additive constant s is chosen so that

        integrate(rho (c+s)) = m2 + eps integrate((rho0-rho)(c+s))
                               - eps^3 integrate(rho' c')

    holds exactly (the gradient term does not see s).
    """
    g = spec.grid
    rho = state.rho.values
    rhs = sigma * (rho * dF_delta(state.c.values, spec.potential) - rho * state.mu.values)
    if spec.mms_sources is not None and spec.mms_sources.c is not None:
        rhs = rhs + spec.mms_sources.c.values
    rhs0, proj = _projection(rhs, g)
    c_hat = mesh.laplacian_solve(Field(g, rhs0), "neumann")
    drho = mesh.gradient(state.rho, "neumann").values
    dc_hat = mesh.gradient(c_hat, "neumann").values
    i0 = mesh.integrate(Field(g, spec.rho0 - rho))
    i1 = mesh.integrate(Field(g, (spec.rho0 - rho) * c_hat.values))
    i2 = mesh.integrate(Field(g, drho * dc_hat))
    denom = mesh.integrate(state.rho) - eps * i0
    if denom <= 1.0e-12 * max(1.0, spec.m1):
        raise mesh.DegenerateWeightError(
            f"density-weighted constraint is degenerate (integral {denom:g})"
        )
    s = (spec.m2 + eps * i1 - eps**3 * i2 - mesh.integrate(Field(g, rho * c_hat.values))) / denom
    return Field(g, c_hat.values + s), proj


# ---------------------------------------------------------------------------
# Fixed-point iteration and continuation
# ---------------------------------------------------------------------------

def constant_state(spec: ProblemSpec, eps: Optional[float] = None) -> State:
    """The spatially constant quadruple (rho0, 0, dF_delta(c0), c0).

    With zero forcing this is an exact solution for every sigma and eps; it
    seeds the continuation.
    """
    e = spec.eps if eps is None else eps
    g = spec.grid
    rho = solve_continuity(g.zeros(), e, spec)
    mu0 = dF_delta(spec.c0, spec.potential)
    return State(rho, g.zeros(), g.field(mu0), g.field(spec.c0))


def _rel_update(new: np.ndarray, old: np.ndarray) -> float:
    return float(np.max(np.abs(new - old)) / (1.0 + np.max(np.abs(old))))


def picard_step(
    state: State, sigma: float, eps: float, spec: ProblemSpec, controls: SolveControls
) -> tuple[State, float]:
    """One damped sweep over the four sub-solves.

    The flow pair is updated through the pressure-coupled block solve, the
    chemical potential and concentration through their Poisson problems with
    the freshest available fields, and the proposals are blended with the
    incoming state by the damping factor.  The returned density is the exact
    continuity solve for the blended velocity, so mass and positivity hold at
    every iterate.  The residual is the largest relative field update plus
    both mean-projection magnitudes.
    """
    d = controls.damping
    g = spec.grid
    _, u_star = solve_flow_coupled(state, sigma, eps, spec)
    rho_star = solve_continuity(u_star, eps, spec)
    mu_star, proj_mu = solve_mu(
        State(rho_star, u_star, state.mu, state.c), sigma, eps, spec
    )
    c_star, proj_c = solve_c(
        State(rho_star, u_star, mu_star, state.c), sigma, eps, spec
    )

    if d == 1.0:
        u_new, mu_new, c_new, rho_new = u_star, mu_star, c_star, rho_star
    else:
        u_new = Field(g, d * u_star.values + (1.0 - d) * state.u.values)
        mu_new = Field(g, d * mu_star.values + (1.0 - d) * state.mu.values)
        c_new = Field(g, d * c_star.values + (1.0 - d) * state.c.values)
        rho_new = solve_continuity(u_new, eps, spec)

    residual = (
        max(
            _rel_update(rho_new.values, state.rho.values),
            _rel_update(u_new.values, state.u.values),
            _rel_update(mu_new.values, state.mu.values),
            _rel_update(c_new.values, state.c.values),
        )
        + proj_mu
        + proj_c
    )
    return State(rho_new, u_new, mu_new, c_new), residual


def _diverged(residuals: list[float]) -> bool:
    """Five consecutive residual increases totalling more than a factor ten."""
    if len(residuals) < 6:
        return False
    tail = residuals[-6:]
    rising = all(b > a for a, b in zip(tail, tail[1:]))
    return rising and tail[-1] > 10.0 * tail[0]


@dataclass
class StageLog:
    """Residual and mass history of one (sigma, eps) continuation stage."""

    sigma: float
    eps: float
    residuals: list[float] = field(default_factory=list)
    mass_errors: list[float] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.residuals)


@dataclass
class ConvergenceLog:
    """Per-stage histories of one continuation run."""

    stages: list[StageLog] = field(default_factory=list)

    @property
    def final_sigma(self) -> float:
        return self.stages[-1].sigma

    @property
    def final_eps(self) -> float:
        return self.stages[-1].eps

    def max_mass_error(self) -> float:
        return max((max(s.mass_errors) for s in self.stages if s.mass_errors), default=0.0)


def _run_stage(
    state: State,
    sigma: float,
    eps: float,
    spec: ProblemSpec,
    controls: SolveControls,
) -> tuple[State, StageLog]:
    log = StageLog(sigma, eps)
    for _ in range(controls.max_picard):
        state, res = picard_step(state, sigma, eps, spec, controls)
        log.residuals.append(res)
        log.mass_errors.append(abs(mesh.integrate(state.rho) - spec.m1))
        if _diverged(log.residuals):
            raise DivergenceError(
                f"residual diverged at stage sigma={sigma:g}, eps={eps:g} "
                f"after {log.iterations} iterations (residual {res:g})"
            )
        if res <= controls.tol_rel:
            break
    return state, log


def continuation_solve(
    spec: ProblemSpec,
    controls: SolveControls,
    initial_state: Optional[State] = None,
) -> tuple[State, ConvergenceLog]:
    """Ramp sigma to 1 at the largest eps, then walk eps down its schedule.

    Every stage warm-starts from the previous one and iterates
    :func:`picard_step` until the residual reaches tol_rel or max_picard steps
    are spent.  If a sigma stage diverges, the sigma step is bisected once
    before the failure is raised with the stage attached.
    """
    eps0 = controls.eps_schedule[0]
    stages = [(s, eps0) for s in controls.sigma_schedule]
    stages += [(1.0, e) for e in controls.eps_schedule[1:]]
    ramp_len = len(controls.sigma_schedule)

    state = initial_state if initial_state is not None else constant_state(spec, eps0)
    log = ConvergenceLog()
    bisected = False
    i = 0
    while i < len(stages):
        sigma, eps = stages[i]
        try:
            state, stage_log = _run_stage(state, sigma, eps, spec, controls)
        except DivergenceError:
            if i < ramp_len and not bisected:
                prev_sigma = stages[i - 1][0] if i > 0 else 0.0
                stages.insert(i, (0.5 * (prev_sigma + sigma), eps))
                ramp_len += 1
                bisected = True
                continue
            raise
        log.stages.append(stage_log)
        i += 1
    return state, log


# ---------------------------------------------------------------------------
# Parameter sweeps
# ---------------------------------------------------------------------------

@dataclass
class SweepReport:
    """Per-value outcomes of a regularization sweep."""

    key: str
    values: tuple
    statuses: list[str]
    reports: list  # DiagnosticsReport or None per value
    states: list   # State or None per value
    logs: list     # ConvergenceLog or None per value

    @property
    def any_failed(self) -> bool:
        return any(s != "ok" for s in self.statuses)

    def column(self, getter) -> list:
        """Apply a report accessor to every successful row (None elsewhere)."""
        return [getter(r) if r is not None else None for r in self.reports]


_SWEEP_ERRORS = (
    DivergenceError,
    SingularSystemError,
    mesh.SolvabilityError,
    mesh.DegenerateWeightError,
    OverflowError,
    FloatingPointError,
)


def _sweep(
    spec_base: ProblemSpec,
    key: str,
    values: tuple,
    controls: SolveControls,
) -> SweepReport:
    from .diagnostics import compute_report

    statuses: list[str] = []
    reports: list = []
    states: list = []
    logs: list = []
    warm: Optional[State] = None
    for i, v in enumerate(values):
        if key == "delta":
            spec_v = replace(spec_base, potential=replace(spec_base.potential, delta=v))
            eps_final = controls.eps_schedule[-1]
        else:
            spec_v = replace(spec_base, eps=v)
            eps_final = v
        if warm is None:
            ctl_v = controls if key == "delta" else replace(controls, eps_schedule=(v,))
        else:
            ctl_v = replace(controls, sigma_schedule=(1.0,), eps_schedule=(eps_final,))
        try:
            state, lg = continuation_solve(spec_v, ctl_v, initial_state=warm)
            warm = state
            statuses.append("ok")
            reports.append(compute_report(state, spec_v, eps=eps_final))
            states.append(state)
            logs.append(lg)
        except _SWEEP_ERRORS as err:
            statuses.append(f"failed({type(err).__name__})")
            reports.append(None)
            states.append(None)
            logs.append(None)
    return SweepReport(key, tuple(values), statuses, reports, states, logs)


def delta_sweep(spec_base: ProblemSpec, deltas, controls: SolveControls) -> SweepReport:
    """Solve a fixed problem for a decreasing list of regularization widths.

    Each width warm-starts from the previous solution (the first runs the full
    continuation), and the per-width diagnostics expose the vanishing
    artificial pressure, the width-independent norm bounds, and the shrinking
    concentration-bound violations.
    """
    ds = tuple(float(d) for d in deltas)
    if not ds:
        raise ValueError("deltas must be nonempty")
    if any(not (0.0 < d < 1.0) for d in ds) or any(b >= a for a, b in zip(ds, ds[1:])):
        raise ValueError(f"deltas must be strictly decreasing within (0, 1), got {ds}")
    return _sweep(spec_base, "delta", ds, controls)


def eps_sweep(spec_base: ProblemSpec, eps_values, controls: SolveControls) -> SweepReport:
    """Solve a fixed problem for a decreasing list of eps values (warm-started)."""
    es = tuple(float(e) for e in eps_values)
    if not es:
        raise ValueError("eps values must be nonempty")
    if any(not (0.0 < e < 1.0) for e in es) or any(b >= a for a, b in zip(es, es[1:])):
        raise ValueError(f"eps values must be strictly decreasing within (0, 1), got {es}")
    return _sweep(spec_base, "eps", es, controls)
