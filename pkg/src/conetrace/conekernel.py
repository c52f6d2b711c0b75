"""Flat-cone sine-propagator oracle by direct eigenfunction summation.

On the cone of circumference rho truncated at radius R with a Dirichlet
wall, the eigenfunctions separate into angular modes nu_k = 2 pi |k|/rho
with radial parts J_{nu_k}(lambda x), lambda R a Bessel zero.  Summing
sin(t lambda)/lambda over the spectrum with a Gaussian frequency damp
exp(-lambda^2 / (2 Lambda^2)) gives a smoothed sample of the half-wave
kernel that knows nothing about diffraction coefficients: it is the
ground truth the link-spectrum front coefficients are tested against.

The damp is a convolution in time with a Gaussian of width 1/Lambda, so
the front-fitting basis functions are smoothed with the exact same
window before the least squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

from .besselj import bessel_j, bessel_j_prime, bessel_j_zeros
from .errors import IllConditionedError, WallInfluenceError

__all__ = [
    "FrontCoordinates",
    "front_coordinates",
    "flat_cone_sine_kernel_series",
    "extract_front_coefficients",
    "smoothed_heaviside",
    "smoothed_log",
    "conormal_basis",
]

DEFAULT_DAMPING = 40.0
WALL_MARGIN = 0.1
_MODE_CACHE: dict = {}


@dataclass(frozen=True)
class FrontCoordinates:
    """Coordinates adapted to the diffracted front t = x + x'."""

    u: float
    delta: float


def front_coordinates(t: float, x: float, xp: float) -> FrontCoordinates:
    u = (x + xp) - t
    q = t * t - (x + xp) ** 2
    delta = math.copysign(math.sqrt(abs(q)), q) / math.sqrt(x * xp)
    return FrontCoordinates(u, delta)


def _mode_data(rho, wall_r, x, xp, damping, mode_cutoff, zero_cutoff):
    key = (rho, wall_r, x, xp, damping, mode_cutoff, zero_cutoff)
    if key in _MODE_CACHE:
        return _MODE_CACHE[key]
    lam_max = 5.0 * damping if zero_cutoff is None else zero_cutoff
    z_arg = lam_max * max(x, xp)
    nu_max = z_arg + 8.0 * max(z_arg, 1.0) ** (1.0 / 3.0) + 10.0
    k_max = int(np.ceil(nu_max * rho / (2 * np.pi)))
    if mode_cutoff is not None:
        k_max = min(k_max, mode_cutoff)
    modes = []
    for k in range(0, k_max + 1):
        nu = 2 * np.pi * k / rho
        zeros = bessel_j_zeros(nu, lam_max * wall_r)
        if len(zeros) == 0:
            break
        lams = zeros / wall_r
        norm = 2.0 / (wall_r**2 * bessel_j_prime(nu, zeros) ** 2)
        radial = norm * bessel_j(nu, lams * x) * bessel_j(nu, lams * xp)
        damp = np.exp(-(lams**2) / (2.0 * damping**2))
        modes.append((k, lams, radial * damp))
    _MODE_CACHE[key] = modes
    return modes


def flat_cone_sine_kernel_series(
    rho: float,
    wall_r: float,
    t: float,
    x: float,
    y: float,
    xp: float,
    yp: float,
    mode_cutoff: int = None,
    zero_cutoff: float = None,
    damping: float = DEFAULT_DAMPING,
) -> complex:
    """Damped eigen-sum of sin(t sqrt(Delta))/sqrt(Delta) on the
    truncated cone, as a Schwartz kernel against the area measure."""
    if x + xp + abs(t) > 2 * wall_r - WALL_MARGIN:
        raise WallInfluenceError(
            "wall too close: finite propagation speed no longer shields it"
        )
    modes = _mode_data(rho, wall_r, x, xp, damping, mode_cutoff, zero_cutoff)
    alpha = 2 * np.pi / rho
    total = 0.0
    for k, lams, weights in modes:
        angular = 1.0 if k == 0 else 2.0 * math.cos(k * alpha * (y - yp))
        total += angular * float(np.sum(weights * np.sin(t * lams) / lams))
    return complex(total / rho)


def smoothed_heaviside(tau, damping: float):
    """H(tau) convolved with the Gaussian time window of width 1/damping."""
    return 0.5 * (1.0 + erf(np.asarray(tau, dtype=float) * damping / np.sqrt(2.0)))


def smoothed_log(tau, damping: float):
    """log|tau| convolved with the same Gaussian window."""
    sig = 1.0 / damping
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.empty_like(taus)

    def density(s):
        return np.exp(-(s**2) / (2 * sig**2)) / (sig * np.sqrt(2 * np.pi))

    for i, tv in enumerate(taus):
        # keep the singular point clear of the quadrature endpoints
        lim = max(8 * sig, abs(tv) + 2 * sig)
        pts = [tv] if abs(tv) < lim else []
        out[i] = quad(
            lambda s: math.log(max(abs(tv - s), 1e-300)) * density(s),
            -lim,
            lim,
            points=pts,
            limit=200,
        )[0]
    return out if np.asarray(tau).ndim else float(out[0])


def _smoothed(fn, tau, damping: float):
    sig = 1.0 / damping

    def density(s):
        return np.exp(-(s**2) / (2 * sig**2)) / (sig * np.sqrt(2 * np.pi))

    out = np.empty_like(tau)
    for i, tv in enumerate(tau):
        lim = max(8 * sig, abs(tv) + 2 * sig)
        pts = [tv] if abs(tv) < lim else []
        out[i] = quad(
            lambda s: fn(tv - s) * density(s),
            -lim,
            lim,
            points=pts,
            limit=200,
        )[0]
    return out


def conormal_basis(tau, damping: float) -> np.ndarray:
    """Smoothed front basis: {1, tau, H, log} plus the subleading
    conormal family {|tau|, tau log, tau^2, tau^2 log, tau|tau|}.

    The subleading columns matter: the front expansion runs in the
    scaled offset t0 (t - t0) / (x x'), which is not small over a
    practical fit window, and without them the step coefficient
    absorbs a large bias.
    """
    safe_log = lambda z: math.log(max(abs(z), 1e-300))
    cols = [
        np.ones_like(tau),
        tau,
        smoothed_heaviside(tau, damping),
        smoothed_log(tau, damping),
        _smoothed(abs, tau, damping),
        _smoothed(lambda z: z * safe_log(z), tau, damping),
        tau**2,
        _smoothed(lambda z: z * z * safe_log(z), tau, damping),
        _smoothed(lambda z: z * abs(z), tau, damping),
    ]
    return np.column_stack(cols)


def extract_front_coefficients(
    t_samples,
    values,
    t0: float,
    damping: float = DEFAULT_DAMPING,
    blind_width: float = None,
):
    """Fit samples near the front t0 to the smoothed singular basis.

    The smoothing applied to every basis function is the same Gaussian
    window carried by the damped mode sum, so the comparison with exact
    front coefficients is direct rather than asymptotic.  Returns
    (c_H, c_log, rms residual).
    """
    t_samples = np.asarray(t_samples, dtype=float)
    values = np.asarray(values)
    blind = 2.5 / damping if blind_width is None else blind_width
    keep = np.abs(t_samples - t0) >= blind
    tau = t_samples[keep] - t0
    vals = values[keep]
    design = conormal_basis(tau, damping)
    cond = np.linalg.cond(design)
    if cond > 1e8:
        raise IllConditionedError(f"front fit condition number {cond:.2e}")
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    resid = vals - design @ coef
    rms = float(np.sqrt(np.mean(np.abs(resid) ** 2)))
    return coef[2], coef[3], rms
