"""Exactly enumerable spectra and Gaussian-smoothed wave traces.

The doubled unit square (two copies glued along the boundary) is a flat
conic surface whose four cone points have angle pi, so its diffraction
coefficients vanish identically: the corner-loop length is a closed
diffractive geodesic whose trace singularity must be silent.  Its
spectrum is the union of the Neumann and Dirichlet spectra of the unit
square, which is enumerable in closed form; this makes it the negative
control for the trace-singularity machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .amplitudes import CutoffSpec, model_kernel
from .errors import IllConditionedError

__all__ = [
    "SmoothedTrace",
    "doubled_square_spectrum",
    "smoothed_wave_trace",
    "fit_trace_singularity",
]


@dataclass(frozen=True)
class SmoothedTrace:
    """Gaussian-damped sum over sqrt-Laplace eigenvalues on a t grid."""

    eigenvalues: np.ndarray
    sigma: float
    t_grid: np.ndarray
    samples: np.ndarray


def doubled_square_spectrum(lambda_max: float) -> np.ndarray:
    """Sqrt-Laplace eigenvalues pi sqrt(m^2 + n^2) of the doubled unit
    square: Neumann (m, n >= 0) union Dirichlet (m, n >= 1), sorted."""
    if lambda_max > 5000:
        raise ValueError("lambda_max beyond the supported range")
    top = int(np.floor(lambda_max / np.pi)) + 1
    m, n = np.meshgrid(np.arange(top + 1), np.arange(top + 1), indexing="ij")
    lam = np.pi * np.sqrt(m**2 + n**2)
    neumann = lam.ravel()
    dirichlet = lam[1:, 1:].ravel()
    eigs = np.concatenate([neumann, dirichlet])
    eigs = eigs[eigs <= lambda_max]
    return np.sort(eigs, kind="stable")


def smoothed_wave_trace(eigs, sigma: float, t_grid) -> SmoothedTrace:
    """Sum of exp(-lam^2/(2 sigma^2)) e^{-i t lam} over the spectrum.

    The eigenvalue order is fixed (sorted ascending) and the reduction
    uses numpy's pairwise summation, so repeated runs are bit-identical.
    """
    if sigma <= 0:
        raise ValueError("need sigma > 0")
    eigs = np.sort(np.asarray(eigs, dtype=float), kind="stable")
    t_grid = np.asarray(t_grid, dtype=float)
    damp = np.exp(-(eigs**2) / (2.0 * sigma**2))
    keep = damp > 1e-300
    eigs = eigs[keep]
    damp = damp[keep]
    samples = np.empty(len(t_grid), dtype=complex)
    for i, t in enumerate(t_grid):
        samples[i] = np.sum(damp * np.exp(-1j * t * eigs))
    return SmoothedTrace(eigs, sigma, t_grid, samples)


def fit_trace_singularity(trace: SmoothedTrace, length: float, prediction,
                          cutoff: CutoffSpec = None, window: float = 0.35):
    """Measured coefficient of the model singularity at t = length.

    Complex least squares of the trace samples near the length against
    {model kernel with the trace's own Gaussian damping, 1, (t - L)}.
    Returns (C_meas, rms residual).
    """
    cutoff = cutoff or CutoffSpec()
    mask = np.abs(trace.t_grid - length) <= window
    ts = trace.t_grid[mask]
    vals = trace.samples[mask]
    unit = type(prediction)(
        L=length, L0=length, k=prediction.k, n=prediction.n,
        order=prediction.order, coefficient=1.0 + 0.0j,
        model=prediction.model,
        length_convention=prediction.length_convention,
    )
    kernel = model_kernel(unit, cutoff, ts, damping_sigma=trace.sigma)
    design = np.column_stack([kernel, np.ones_like(ts), ts - length])
    cond = np.linalg.cond(design)
    if cond > 1e8:
        raise IllConditionedError(f"trace fit condition number {cond:.2e}")
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    resid = vals - design @ coef
    return coef[0], float(np.sqrt(np.mean(np.abs(resid) ** 2)))
