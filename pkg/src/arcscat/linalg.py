"""Dense complex linear algebra: full GMRES with residual history and
nonsymmetric eigenvalue computation.

GMRES is the non-restarted variant (the Krylov basis is stored densely):
Arnoldi with modified Gram-Schmidt plus one reorthogonalization pass,
Givens rotations on the Hessenberg least-squares problem, and the usual
relative-residual recurrence.  Iteration counts reported by the solver
are the number of Arnoldi steps taken, which for a well-scaled problem
equals the number of operator applications beyond the initial residual.

Eigenvalues are computed with LAPACK's Hessenberg-reduction + shifted-QR
driver (via numpy); an optional backward-error check runs inverse
iteration on a few computed eigenvalues and verifies ||A v - lambda v||
against ||A||.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np


@dataclass
class SolveReport:
    """Iteration count, residual history and timing of one linear solve."""

    iterations: int
    residuals: List[float]
    converged: bool
    elapsed: float
    n: int
    final_residual: float = field(default=np.nan)


class GmresError(RuntimeError):
    """Raised when GMRES encounters non-finite data."""


def gmres(apply_op: Callable[[np.ndarray], np.ndarray], b: np.ndarray,
          tol: float = 1e-8, maxit: int = 2000) -> tuple[np.ndarray, SolveReport]:
    """Solve A x = b with full (non-restarted) GMRES, x0 = 0.

    Parameters
    ----------
    apply_op : callable
        The action v -> A v on 1-d complex arrays.
    b : ndarray
        Right-hand side with ||b|| > 0.
    tol : float
        Relative residual target ||b - A x|| / ||b||.
    maxit : int
        Maximum number of Arnoldi steps.

    Returns
    -------
    (x, SolveReport)
        ``report.residuals[i]`` is the GMRES residual estimate after
        i + 1 steps; the true final residual is recomputed explicitly.
    """
    start = time.perf_counter()
    b = np.asarray(b, dtype=complex)
    n = b.shape[0]
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        raise ValueError("gmres requires a nonzero right-hand side")
    if not (0.0 < tol < 1.0):
        raise ValueError("gmres requires 0 < tol < 1")
    maxit = min(maxit, n)

    basis = np.empty((maxit + 1, n), dtype=complex)
    h = np.zeros((maxit + 1, maxit), dtype=complex)
    cs = np.zeros(maxit, dtype=complex)
    sn = np.zeros(maxit, dtype=complex)
    g = np.zeros(maxit + 1, dtype=complex)

    basis[0] = b / bnorm
    g[0] = bnorm
    residuals: List[float] = []
    converged = False
    steps = 0

    for j in range(maxit):
        w = np.array(apply_op(basis[j]), dtype=complex)  # fresh buffer: MGS updates in place
        if not np.all(np.isfinite(w)):
            raise GmresError(f"operator produced non-finite values at iteration {j + 1}")
        # modified Gram-Schmidt with one reorthogonalization pass
        for i in range(j + 1):
            h[i, j] = np.vdot(basis[i], w)
            w -= h[i, j] * basis[i]
        for i in range(j + 1):
            corr = np.vdot(basis[i], w)
            h[i, j] += corr
            w -= corr * basis[i]
        wnorm = np.linalg.norm(w)
        h[j + 1, j] = wnorm

        # previously accumulated rotations, then a new one zeroing h[j+1, j]
        for i in range(j):
            hi = np.conj(cs[i]) * h[i, j] + np.conj(sn[i]) * h[i + 1, j]
            h[i + 1, j] = -sn[i] * h[i, j] + cs[i] * h[i + 1, j]
            h[i, j] = hi
        denom = np.hypot(abs(h[j, j]), abs(h[j + 1, j]))
        if denom == 0.0:
            cs[j], sn[j] = 1.0, 0.0
        else:
            cs[j] = h[j, j] / denom
            sn[j] = h[j + 1, j] / denom
        h[j, j] = denom
        h[j + 1, j] = 0.0
        g[j + 1] = -sn[j] * g[j]
        g[j] = np.conj(cs[j]) * g[j]

        steps = j + 1
        est = abs(g[j + 1]) / bnorm
        residuals.append(float(est))
        if est <= tol:
            converged = True
            break
        if wnorm == 0.0:
            converged = True  # happy breakdown: the Krylov space is invariant
            break
        basis[j + 1] = w / wnorm

    y = np.linalg.solve(h[:steps, :steps], g[:steps])
    x = basis[:steps].T @ y
    final = float(np.linalg.norm(b - apply_op(x)) / bnorm)
    report = SolveReport(iterations=steps, residuals=residuals, converged=converged,
                         elapsed=time.perf_counter() - start, n=n, final_residual=final)
    return x, report


class EigenvalueError(RuntimeError):
    """Raised when the QR eigenvalue computation fails its checks."""


def eig_dense(a: np.ndarray, check: bool = True, cap: int = 4096,
              seed: int = 0) -> np.ndarray:
    """All eigenvalues of a dense complex matrix.

    Uses the LAPACK Hessenberg + shifted-QR driver.  With ``check`` a
    few computed eigenvalues are verified by inverse iteration:
    ||A v - lambda v|| / ||A|| must be below 1e-8.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("eig_dense requires a square matrix")
    n = a.shape[0]
    if n > cap:
        raise ValueError(f"dense eigenvalue computation capped at {cap}, got {n}")
    lam = np.linalg.eigvals(a)
    if check and n >= 2:
        rng = np.random.default_rng(seed)
        anorm = np.linalg.norm(a, ord=np.inf)
        idx = rng.choice(n, size=min(5, n), replace=False)
        eye = np.eye(n)
        for i in idx:
            # one inverse-iteration step per random start; further steps
            # degrade on non-normal clusters
            shift = lam[i] + 1e-13 * (1.0 + abs(lam[i]))
            best = np.inf
            for _ in range(3):
                v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
                v = np.linalg.solve(a - shift * eye, v)
                v /= np.linalg.norm(v)
                best = min(best, np.linalg.norm(a @ v - lam[i] * v) / anorm)
                if best < 1e-8:
                    break
            if not best < 1e-8:
                raise EigenvalueError(
                    f"eigenvalue {lam[i]} failed backward-error check: {best:.2e}")
    return lam
