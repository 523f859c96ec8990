"""Cosine-node grid, fast cosine/sine expansions, and the first-order
operators built from them.

The grid holds the N first-kind Chebyshev angles theta_j =
pi (2j + 1) / (2N).  An even, 2 pi periodic density sampled there has
the exact degree-(N-1) representation

    v(theta) = sum_{m=0}^{N-1} c_m cos(m theta),
    c_0 = (1/N) sum_j v(theta_j),
    c_m = (2/N) sum_j v(theta_j) cos(m theta_j),

computed here via fast DCT-II / DCT-III pairs.  On top of the
expansions sit three spectral operators:

    T0[v] = d/dtheta (v sin theta)      (sine expansion, termwise derivative)
    T0_tau[v] = T0[v] / tau(cos theta)
    D0[v] = (1/sin theta) dv/dtheta = -d/dx v(x)|_{x=cos theta}
                                        (Chebyshev differentiation)

All array-level helpers operate along the last axis, so a stack of
densities (batch, N) transforms in one call.  T0 maps degree N-1 input
onto cosine degree N; the top mode vanishes identically at the nodes,
so resampling drops it (callers that need it keep coefficients instead,
see ``t0_coeffs``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .geometry import Arc, speed


def is_admissible(n: int) -> bool:
    """True when n >= 4 and n factors over {2, 3, 5} (fast FFT sizes)."""
    if n < 4:
        return False
    for p in (2, 3, 5):
        while n % p == 0:
            n //= p
    return n == 1


def nearest_admissible(n: int) -> int:
    """Closest admissible grid size to n (ties resolved upward)."""
    lo, hi = n, n
    while not is_admissible(hi):
        hi += 1
    while lo >= 4 and not is_admissible(lo):
        lo -= 1
    if lo < 4:
        return hi
    return lo if n - lo < hi - n else hi


@dataclass(frozen=True)
class ThetaGrid:
    """N-point cosine-node grid theta_j = pi (2j + 1) / (2N)."""

    n: int
    nodes: np.ndarray

    def __post_init__(self):
        if not is_admissible(self.n):
            raise ValueError(
                f"grid size {self.n} not admissible; need n >= 4 with prime factors in {{2, 3, 5}}")


def theta_grid(n: int) -> ThetaGrid:
    """Build the admissible N-point grid."""
    j = np.arange(n)
    return ThetaGrid(n=n, nodes=np.pi * (2.0 * j + 1.0) / (2.0 * n))


@dataclass
class DensityVector:
    """Samples of an even 2 pi periodic density at the grid nodes."""

    grid: ThetaGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {self.values.shape}")


def coeffs_from_values(values: np.ndarray) -> np.ndarray:
    """Cosine coefficients c_0..c_{N-1} of samples (last axis)."""
    n = values.shape[-1]
    c = scipy.fft.dct(values, type=2, axis=-1) / n
    c[..., 0] *= 0.5
    return c


def values_from_coeffs(coeffs: np.ndarray) -> np.ndarray:
    """Samples at the N nodes of sum_m c_m cos(m theta) (inverse of
    ``coeffs_from_values`` when len(coeffs) == N along the last axis)."""
    x = coeffs.copy()
    x[..., 1:] *= 0.5
    return scipy.fft.dct(x, type=3, axis=-1)


def sine_coeffs(values: np.ndarray) -> np.ndarray:
    """Sine coefficients b_1..b_N of odd samples (last axis), i.e.
    values_j = sum_{m=1}^{N} b_m sin(m theta_j)."""
    n = values.shape[-1]
    b = scipy.fft.dst(values, type=2, axis=-1) / n
    b[..., -1] *= 0.5
    return b


def t0_coeffs(values: np.ndarray) -> np.ndarray:
    """Cosine coefficients (modes 0..N, length N + 1) of
    d/dtheta (v sin theta) for node samples v."""
    n = values.shape[-1]
    theta = np.pi * (2.0 * np.arange(n) + 1.0) / (2.0 * n)
    b = sine_coeffs(values * np.sin(theta))
    c = np.zeros(values.shape[:-1] + (n + 1,), dtype=b.dtype)
    c[..., 1:] = b * np.arange(1, n + 1)
    return c


def chebyshev_derivative_coeffs(coeffs: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients of phi'(x) given those of phi (last axis)."""
    m = coeffs.shape[-1] - 1
    out = np.zeros(coeffs.shape[:-1] + (max(m, 1),), dtype=coeffs.dtype)
    if m == 0:
        return out
    for j in range(m - 1, -1, -1):
        prev = out[..., j + 2] if j + 2 <= m - 1 else 0.0
        out[..., j] = prev + 2.0 * (j + 1) * coeffs[..., j + 1]
    out[..., 0] *= 0.5
    return out


def d0_coeffs(coeffs: np.ndarray) -> np.ndarray:
    """Cosine coefficients of D0 v = -d/dx v, from cosine coefficients."""
    return -chebyshev_derivative_coeffs(coeffs)


def t0_values(values: np.ndarray) -> np.ndarray:
    """Node samples of T0 v = d/dtheta (v sin theta)."""
    n = values.shape[-1]
    return values_from_coeffs(t0_coeffs(values)[..., :n])


def d0_values(values: np.ndarray) -> np.ndarray:
    """Node samples of D0 v = (1/sin theta) dv/dtheta."""
    n = values.shape[-1]
    d = d0_coeffs(coeffs_from_values(values))
    out = np.zeros(values.shape, dtype=d.dtype)
    out[..., : d.shape[-1]] = d
    return values_from_coeffs(out)


def node_speed(arc: Arc, grid: ThetaGrid) -> np.ndarray:
    """tau(cos theta_j) at the grid nodes."""
    return speed(arc, np.cos(grid.nodes))


def cosine_coeffs(v: DensityVector) -> np.ndarray:
    """Cosine coefficients of a density; inverse is ``from_cosine_coeffs``."""
    return coeffs_from_values(v.values)


def from_cosine_coeffs(grid: ThetaGrid, coeffs: np.ndarray) -> DensityVector:
    """Density with the given cosine coefficients (length N)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (grid.n,):
        raise ValueError(f"expected {grid.n} coefficients, got shape {coeffs.shape}")
    return DensityVector(grid, values_from_coeffs(coeffs))


def apply_T0(v: DensityVector) -> DensityVector:
    """d/dtheta (v sin theta), resampled at the nodes."""
    return DensityVector(v.grid, t0_values(v.values))


def apply_T0_tau(arc: Arc, v: DensityVector) -> DensityVector:
    """T0 v divided pointwise by tau(cos theta)."""
    return DensityVector(v.grid, t0_values(v.values) / node_speed(arc, v.grid))


def apply_D0(v: DensityVector) -> DensityVector:
    """(1/sin theta) dv/dtheta, via Chebyshev differentiation."""
    return DensityVector(v.grid, d0_values(v.values))
