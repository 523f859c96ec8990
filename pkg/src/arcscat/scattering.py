"""Plane-wave scattering by open arcs: right-hand sides, the solver
front end for the five integral formulations, density recovery and
field evaluation.

The incident field is u_inc = exp(i k d . r) with d the unit propagation
direction.  The Dirichlet (TE) and Neumann (TM) data are f = -u_inc and
g = -du_inc/dn on the arc; after the cosine change of variables these
become even periodic node vectors, and each formulation solves one of

    TE_S         S phi = f
    TE_NS        N S phi = N f
    TM_N         N psi = g
    TM_NS        N S psi = g
    TE_ATKINSON  S (S0_tau)^{-1} phi = f

with GMRES on the matrix-free pipelines.  The physical layer densities
are recovered from the periodic unknowns (mu = phi / sin theta for the
single layer, nu = sin theta S psi or sin theta psi for the double
layer), and far/near fields are quadratures of the layer representations
with smooth even integrands, so the plain node rule is spectral.

Far fields use the normalization

    TE:  u_inf(d_obs) = int_0^pi e^{-i k d_obs . r} phi tau dtheta
    TM:  v_inf(d_obs) = int_0^pi (-i k d_obs . n) e^{-i k d_obs . r}
                               psi_eff tau sin^2 theta dtheta

(the overall radiating-cylinder constant is dropped; only relative
far-field quantities are reported).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import Arc, eval_arc
from .grids import DensityVector, ThetaGrid
from .linalg import SolveReport, gmres
from .operators import (
    OperatorMatrix,
    build_Ng_matrix,
    build_S_matrix,
    n_apply_values,
    s0tau_solve_values,
)
from .specfun import hankel1_0, hankel1_1

FORMULATIONS = ("TE_S", "TE_NS", "TM_N", "TM_NS", "TE_ATKINSON")
TE_FORMULATIONS = ("TE_S", "TE_NS", "TE_ATKINSON")
TM_FORMULATIONS = ("TM_N", "TM_NS")


@dataclass(frozen=True)
class Incidence:
    """Incident plane wave: propagation angle (degrees from +x) and k."""

    angle_deg: float
    k: float

    def __post_init__(self):
        if self.k <= 0.0:
            raise ValueError("wavenumber must be positive")

    @property
    def direction(self) -> np.ndarray:
        a = np.deg2rad(self.angle_deg)
        return np.array([np.cos(a), np.sin(a)])


@dataclass
class FarField:
    """Far-field samples on uniformly spaced observation angles."""

    angles_deg: np.ndarray
    values: np.ndarray


@dataclass
class Solution:
    """Solved periodic density with its provenance and solver report."""

    formulation: str
    density: DensityVector
    report: SolveReport
    arc: Arc
    k: float
    grid: ThetaGrid
    incidence: Incidence
    s_matrix: Optional[OperatorMatrix] = field(default=None, repr=False)
    mat_seconds: float = 0.0


def _node_frame(arc: Arc, grid: ThetaGrid):
    return eval_arc(arc, np.cos(grid.nodes))


def rhs_te(arc: Arc, inc: Incidence, grid: ThetaGrid) -> DensityVector:
    """Dirichlet data f = -u_inc at the nodes."""
    points = _node_frame(arc, grid)[0]
    phase = points @ inc.direction
    return DensityVector(grid, -np.exp(1j * inc.k * phase))


def rhs_tm(arc: Arc, inc: Incidence, grid: ThetaGrid) -> DensityVector:
    """Neumann data g = -du_inc/dn at the nodes."""
    points, _, normals, _ = _node_frame(arc, grid)
    phase = points @ inc.direction
    dn = normals @ inc.direction
    return DensityVector(grid, -1j * inc.k * dn * np.exp(1j * inc.k * phase))


def solve(formulation: str, arc: Arc, inc: Incidence, grid: ThetaGrid,
          tol: float = 1e-8, maxit: int = 2000) -> Solution:
    """Assemble the matrices once and run GMRES on the chosen equation.

    Returns a Solution whose ``report`` carries the iteration count and
    residual history; ``report.converged`` is False when maxit was hit.
    """
    if formulation not in FORMULATIONS:
        raise ValueError(f"unknown formulation {formulation!r}; expected one of {FORMULATIONS}")
    k = inc.k
    start = time.perf_counter()
    s = build_S_matrix(arc, k, grid)
    needs_n = formulation in ("TE_NS", "TM_N", "TM_NS")
    ng = build_Ng_matrix(arc, k, grid, s) if needs_n else None
    mat_seconds = time.perf_counter() - start

    def s_action(u):
        return s.entries @ u

    def n_action(u):
        return n_apply_values(arc, s.entries, ng.entries, grid, u)

    def ns_action(u):
        return n_action(s.entries @ u)

    def atkinson_action(u):
        return s.entries @ s0tau_solve_values(arc, grid, u)

    if formulation == "TE_S":
        action, b = s_action, rhs_te(arc, inc, grid).values
    elif formulation == "TE_NS":
        action, b = ns_action, n_action(rhs_te(arc, inc, grid).values)
    elif formulation == "TM_N":
        action, b = n_action, rhs_tm(arc, inc, grid).values
    elif formulation == "TM_NS":
        action, b = ns_action, rhs_tm(arc, inc, grid).values
    else:
        action, b = atkinson_action, rhs_te(arc, inc, grid).values

    if np.linalg.norm(b) == 0.0:
        # identically dark data (e.g. TM on the strip at horizontal
        # incidence): the density is exactly zero
        report = SolveReport(iterations=0, residuals=[], converged=True,
                             elapsed=0.0, n=grid.n, final_residual=0.0)
        return Solution(formulation=formulation, density=DensityVector(grid, b),
                        report=report, arc=arc, k=k, grid=grid, incidence=inc,
                        s_matrix=s, mat_seconds=mat_seconds)

    x, report = gmres(action, b, tol=tol, maxit=maxit)
    return Solution(formulation=formulation, density=DensityVector(grid, x),
                    report=report, arc=arc, k=k, grid=grid, incidence=inc,
                    s_matrix=s, mat_seconds=mat_seconds)


def te_layer_density(sol: Solution) -> np.ndarray:
    """Periodic single-layer density phi solving S phi = f, at the nodes."""
    if sol.formulation not in TE_FORMULATIONS:
        raise ValueError(f"{sol.formulation} is not a TE solution")
    if sol.formulation == "TE_ATKINSON":
        return s0tau_solve_values(sol.arc, sol.grid, sol.density.values)
    return sol.density.values


def tm_layer_density(sol: Solution) -> np.ndarray:
    """Periodic weighted double-layer density psi solving N psi = g."""
    if sol.formulation not in TM_FORMULATIONS:
        raise ValueError(f"{sol.formulation} is not a TM solution")
    if sol.formulation == "TM_NS":
        return sol.s_matrix.entries @ sol.density.values
    return sol.density.values


def recover_mu(sol: Solution) -> DensityVector:
    """Single-layer density mu = phi / sin theta at the nodes (finite:
    the nodes are interior, and phi tends to a nonzero edge limit)."""
    phi = te_layer_density(sol)
    return DensityVector(sol.grid, phi / np.sin(sol.grid.nodes))


def recover_nu(sol: Solution) -> DensityVector:
    """Double-layer density nu = sin theta * psi at the nodes; vanishes
    at the edges like the square-root distance weight."""
    psi = tm_layer_density(sol)
    return DensityVector(sol.grid, np.sin(sol.grid.nodes) * psi)


def far_field(sol: Solution, m: int) -> FarField:
    """Far-field samples at m uniformly spaced observation angles."""
    if m <= 0:
        raise ValueError("observation count must be positive")
    grid, k = sol.grid, sol.k
    points, _, normals, tau = _node_frame(sol.arc, grid)
    angles = 360.0 * np.arange(m) / m
    rad = np.deg2rad(angles)
    obs = np.stack([np.cos(rad), np.sin(rad)], axis=-1)  # (m, 2)
    phase = np.exp(-1j * k * (obs @ points.T))  # (m, n)
    w = np.pi / grid.n
    if sol.formulation in TE_FORMULATIONS:
        density = te_layer_density(sol) * tau
        values = w * (phase @ density)
    else:
        psi = tm_layer_density(sol) * tau * np.sin(grid.nodes) ** 2
        values = w * ((-1j * k) * (obs @ normals.T) * phase) @ psi
    return FarField(angles_deg=angles, values=values)


def far_field_error(candidate: FarField, reference: FarField) -> float:
    """Relative maximum far-field error against a reference run."""
    if candidate.values.shape != reference.values.shape:
        raise ValueError("far fields sampled on different angle grids")
    return float(np.max(np.abs(candidate.values - reference.values))
                 / np.max(np.abs(reference.values)))


def node_spacing(arc: Arc, grid: ThetaGrid) -> float:
    """Maximum physical distance between neighboring quadrature nodes."""
    points = _node_frame(arc, grid)[0]
    return float(np.max(np.hypot(np.diff(points[:, 0]), np.diff(points[:, 1]))))


def near_field(sol: Solution, points: np.ndarray,
               mask_distance: Optional[float] = None,
               chunk: int = 4096) -> np.ndarray:
    """Scattered field at arbitrary points by direct node quadrature.

    Points closer to the arc than ``mask_distance`` (default: twice the
    maximum node spacing, below which the smooth rule degrades) are
    returned as NaN.  No singularity-cancellation close evaluation is
    attempted.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    grid, k = sol.grid, sol.k
    nodes_xy, _, normals, tau = _node_frame(sol.arc, grid)
    if mask_distance is None:
        mask_distance = 2.0 * node_spacing(sol.arc, grid)
    w = np.pi / grid.n
    if sol.formulation in TE_FORMULATIONS:
        density = te_layer_density(sol) * tau
        tm = False
    else:
        density = tm_layer_density(sol) * tau * np.sin(grid.nodes) ** 2
        tm = True

    out = np.empty(pts.shape[0], dtype=complex)
    for lo in range(0, pts.shape[0], chunk):
        block = pts[lo : lo + chunk]
        dx = block[:, 0][:, None] - nodes_xy[:, 0][None, :]
        dy = block[:, 1][:, None] - nodes_xy[:, 1][None, :]
        dist = np.hypot(dx, dy)
        near = dist.min(axis=1) < mask_distance
        dist[dist == 0.0] = 1.0  # masked anyway
        if tm:
            # grad_y G . n_y with G = (i/4) H_0^1(k |x - y|)
            kernel = (0.25j * k) * hankel1_1(k * dist) * \
                (dx * normals[None, :, 0] + dy * normals[None, :, 1]) / dist
        else:
            kernel = 0.25j * hankel1_0(k * dist)
        vals = w * (kernel @ density)
        vals[near] = np.nan + 1j * np.nan
        out[lo : lo + chunk] = vals
    return out if points.ndim > 1 else out[0]


def incident_field(inc: Incidence, points: np.ndarray) -> np.ndarray:
    """u_inc = exp(i k d . r) at the given points."""
    pts = np.asarray(points, dtype=float)
    return np.exp(1j * inc.k * (pts @ inc.direction))
