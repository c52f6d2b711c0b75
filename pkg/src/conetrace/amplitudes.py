"""Amplitude assembly for diffractive wave propagation and the trace.

All scalars live in the metric half-density frame with phase convention
(sum of distances - t) * xi.  The building blocks:

* interior propagation between non-conjugate points,
* diffraction through one cone point,
* chains of k diffractions,
* the leading coefficient of the wave-trace singularity at the length
  of a strictly diffractive closed geodesic,

plus a numerical model kernel (the xi-integral of the symbol against
the smooth cutoff) used to match predictions against measured traces,
and an independent route to the trace coefficient that integrates a
one-point cut over the closed geodesic (the stationary manifold is the
geodesic itself; the cut integrand collapses by the shape-operator and
Wronskian identities, which is exactly what the cross-check exercises).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import (
    ChainMismatchError,
    ConjugateDegeneracyError,
    NotStrictlyDiffractiveError,
    QuadratureFailureError,
)
from .jacobi import b_jacobi_solution, morse_index, theta_spreading
from .links import DiffractionValue, SummationPolicy, diffraction_kernel

__all__ = [
    "CutoffSpec",
    "AmplitudeValue",
    "SegmentInvariants",
    "TraceSingularityPrediction",
    "single_diffraction_amplitude",
    "interior_amplitude",
    "short_time_amplitude",
    "multi_diffraction_amplitude",
    "compose_frequency_orders",
    "segment_invariants",
    "trace_singularity",
    "trace_singularity_cut_route",
    "model_kernel",
]


@dataclass(frozen=True)
class CutoffSpec:
    """Smooth frequency cutoff: 0 below `lower`, 1 above `upper`,
    C^2 monotone polynomial step between."""

    lower: float = 1.0
    upper: float = 2.0

    def __post_init__(self):
        if not 0 < self.lower < self.upper:
            raise ValueError("need 0 < lower < upper")

    def value(self, xi):
        t = np.clip((np.asarray(xi, dtype=float) - self.lower)
                    / (self.upper - self.lower), 0.0, 1.0)
        return t**3 * (6 * t * t - 15 * t + 10)


@dataclass(frozen=True)
class AmplitudeValue:
    scalar: complex
    frequency_order: float
    frame: str = "metric_half_density"
    phase_convention: str = "(sum dists - t) * xi"

    def value_at(self, xi: float, cutoff: CutoffSpec = None) -> complex:
        chi = 1.0 if cutoff is None else float(cutoff.value(xi))
        return self.scalar * chi * xi**self.frequency_order


@dataclass(frozen=True)
class SegmentInvariants:
    """Per-segment bundle consumed by the amplitude assembler."""

    d: float
    morse: int
    theta: float
    q_out: float = None  # link coordinate where the segment leaves its tip
    q_in: float = None   # link coordinate where it arrives
    start_kind: str = "tip"
    end_kind: str = "tip"

    def __post_init__(self):
        if self.d <= 0 or self.theta <= 0 or self.morse < 0:
            raise ValueError("segment invariants out of range")


@dataclass(frozen=True)
class TraceSingularityPrediction:
    L: float
    L0: float
    k: int
    n: int
    order: float
    coefficient: complex
    model: str  # "inverse_sqrt" | "log" | "power"
    length_convention: str = "L0"


def _dvalue(d) -> complex:
    return d.value if isinstance(d, DiffractionValue) else complex(d)


def single_diffraction_amplitude(D, x: float, xp: float, theta_in: float,
                                 theta_out: float, n: int = 2) -> AmplitudeValue:
    """Half-wave amplitude for one diffraction: in at distance x, out at
    distance x', with spreading corrections on both legs."""
    if x <= 0 or xp <= 0 or theta_in <= 0 or theta_out <= 0:
        raise ValueError("distances and spreadings must be positive")
    scalar = ((x * xp) ** (-(n - 1) / 2) / (2j * np.pi) * _dvalue(D)
              * (theta_in * theta_out) ** -0.5)
    return AmplitudeValue(scalar, 0.0)


def interior_amplitude(d: float, m: int, theta: float, n: int = 2) -> AmplitudeValue:
    """Half-wave amplitude between non-conjugate interior points."""
    if d <= 0 or theta <= 0:
        raise ValueError("need d > 0 and theta > 0")
    scalar = (np.exp(-1j * np.pi * (n - 1) / 4) * 1j ** (-m)
              * (2 * np.pi) ** (-(n + 1) / 2) * d ** (-(n - 1) / 2)
              * theta ** -0.5)
    return AmplitudeValue(scalar, (n - 1) / 2)


def short_time_amplitude(d: float, t: float, n: int = 2, theta: float = 1.0,
                         form: str = "on_front") -> AmplitudeValue:
    """Hadamard-parametrix principal amplitude at short times.

    form="lemma" keeps the explicit t-dependence
    t (d + t)^{-(n+1)/2}; form="on_front" is its value on the front
    t = d, where it reduces to d^{-(n-1)/2} (2 pi)^{-(n+1)/2}.
    The two agree exactly at t = d.
    """
    if d <= 0 or theta <= 0:
        raise ValueError("need d > 0 and theta > 0")
    phase = np.exp(-1j * np.pi * (n - 1) / 4)
    if form == "lemma":
        scalar = (t * phase * np.pi ** (-(n + 1) / 2)
                  * (d + t) ** (-(n + 1) / 2) * theta ** -0.5)
    elif form == "on_front":
        scalar = (phase * (2 * np.pi) ** (-(n + 1) / 2)
                  * d ** (-(n - 1) / 2) * theta ** -0.5)
    else:
        raise ValueError(f"unknown form {form!r}")
    return AmplitudeValue(scalar, (n - 1) / 2)


def multi_diffraction_amplitude(segments, diffractions, n: int = 2,
                                microlocalizer_value: complex = 1.0) -> AmplitudeValue:
    """Half-wave amplitude of an open chain with k diffractions and
    k + 1 legs."""
    k = len(diffractions)
    if len(segments) != k + 1:
        raise ChainMismatchError(
            f"open chain needs k+1 segments for k diffractions "
            f"(got {len(segments)} segments, k = {k})"
        )
    pref = (np.exp(1j * np.pi * (n - 1) * (k - 1) / 4)
            * (2 * np.pi) ** ((n + 1) * (k - 1) / 2)
            / (2j * np.pi) ** k)
    scalar = complex(microlocalizer_value) * pref
    for seg in segments:
        scalar *= (1j ** (-seg.morse) * seg.d ** (-(n - 1) / 2)
                   * seg.theta ** -0.5)
    for d in diffractions:
        scalar *= _dvalue(d)
    return AmplitudeValue(scalar, -(k - 1) * (n - 1) / 2)


def compose_frequency_orders(o1: float, o2: float, n: int = 2) -> float:
    """Stationary-phase gluing of two chains loses one interior factor of
    xi^{(n-1)/2}, making k-diffraction orders additive in k."""
    return o1 + o2 - (n - 1) / 2


def segment_invariants(result, **kw) -> SegmentInvariants:
    """Invariant bundle of one converged tip-to-tip connection."""
    path = result.path
    return SegmentInvariants(
        d=result.length,
        morse=morse_index(path, **kw),
        theta=theta_spreading(path, **kw),
        q_out=result.link_a,
        q_in=result.link_b,
    )


def invariants_for(geodesic, **kw):
    return [segment_invariants(seg, **kw) for seg in geodesic.segments]


def trace_singularity(geodesic, invariants=None, n: int = 2,
                      policy: SummationPolicy = None,
                      length_convention: str = "L0") -> TraceSingularityPrediction:
    """Leading coefficient of the wave-trace singularity at the length of
    a strictly diffractive closed geodesic."""
    if not geodesic.strictly_diffractive:
        raise NotStrictlyDiffractiveError(
            "trace singularity requires a strictly diffractive geodesic"
        )
    if invariants is None:
        invariants = invariants_for(geodesic)
    policy = policy or SummationPolicy.closed_form()
    k = len(geodesic.segments)
    prod = 1.0 + 0.0j
    for seg, junc in zip(invariants, geodesic.junctions):
        dval = diffraction_kernel(junc.link, n, junc.link_in, junc.link_out,
                                  policy)
        prod *= (1j ** (-seg.morse) * dval.value
                 * seg.d ** (-(n - 1) / 2) * seg.theta ** -0.5)
    length = geodesic.primitive_length if length_convention == "L0" else geodesic.length
    coeff = (length * (2 * np.pi) ** (k * n / 2)
             * np.exp(1j * k * np.pi * (n - 3) / 4) * prod)
    order = k * (n - 1) / 2
    if order == 0.5:
        model = "inverse_sqrt"
    elif order == 1.0:
        model = "log"
    else:
        model = "power"
    return TraceSingularityPrediction(
        L=geodesic.length, L0=geodesic.primitive_length, k=k, n=n,
        order=order, coefficient=coeff, model=model,
        length_convention=length_convention,
    )


def trace_singularity_cut_route(geodesic, n: int = 2,
                                policy: SummationPolicy = None,
                                nodes: int = 16) -> complex:
    """Independent route to the trace coefficient: cut the closed
    geodesic at a moving point on each segment and integrate the
    stationary-manifold density built from fresh Jacobi data.

    Every per-node quantity (spreadings, Morse counts, the one-point
    break Hessian) is recomputed from the two tip-launched Jacobi fields
    of the cut segment, so agreement with trace_singularity certifies
    the shape-operator and Wronskian identities behind the assembly.
    n = 2 only (scalar Jacobi backend).
    """
    if n != 2:
        raise NotImplementedError("cut-route cross-check is n = 2 only")
    if not geodesic.strictly_diffractive:
        raise NotStrictlyDiffractiveError(
            "trace singularity requires a strictly diffractive geodesic"
        )
    policy = policy or SummationPolicy.closed_form()
    k = len(geodesic.segments)
    invs = invariants_for(geodesic)
    dvals = [
        diffraction_kernel(j.link, n, j.link_in, j.link_out, policy).value
        for j in geodesic.junctions
    ]
    gl_x, gl_w = leggauss(nodes)

    total = 0.0 + 0.0j
    for c, seg in enumerate(geodesic.segments):
        path = seg.path
        d_c = seg.length
        sol_a = b_jacobi_solution(path)
        sol_b = b_jacobi_solution(path.reversed())
        zeros_a = np.array(sol_a.zeros())
        zeros_b = np.array(sol_b.zeros())

        ells = 0.5 * d_c * (gl_x + 1.0)
        weights = 0.5 * d_c * gl_w
        cut_integral = 0.0 + 0.0j
        for ell, w in zip(ells, weights):
            fa = sol_a.at(ell)
            fb = sol_b.at(d_c - ell)
            if abs(fa.j) < 1e-12 or abs(fb.j) < 1e-12:
                raise ConjugateDegeneracyError("cut node sits on a conjugate point")
            m_a = int(np.count_nonzero(zeros_a < ell))
            m_b = int(np.count_nonzero(zeros_b < d_c - ell))
            theta_a = abs(fa.j) / ell
            theta_b = abs(fb.j) / (d_c - ell)
            h = fa.jprime / fa.j + fb.jprime / fb.j
            merged = (np.exp(1j * np.pi * np.sign(h) / 4)
                      * np.exp(-1j * np.pi / 2)
                      * 1j ** (-(m_a + m_b))
                      * abs(h) ** -0.5
                      * (ell * (d_c - ell)) ** -0.5
                      * (theta_a * theta_b) ** -0.5)
            cut_integral += w * merged

        rest = 1.0 + 0.0j
        for j, other in enumerate(invs):
            if j == c:
                continue
            rest *= (1j ** (-other.morse) * other.d ** -0.5
                     * other.theta ** -0.5)
        total += cut_integral * rest

    pref = (2 * np.pi) ** k * np.exp(-1j * (k - 1) * np.pi / 4) * np.prod(dvals)
    return pref * total


def model_kernel(prediction, cutoff: CutoffSpec, t_grid,
                 damping_sigma: float = None) -> np.ndarray:
    """Samples of coefficient * int_0^inf e^{-i(t-L)xi} chi(xi) xi^{-order}
    [exp(-xi^2/(2 sigma^2))] dxi on the given t grid.

    With damping the integrand decays and composite Gauss-Legendre
    panels suffice; without it the tail beyond the cutoff's plateau is
    evaluated on a rotated contour (Gauss-Laguerre), which is exact up
    to quadrature for the pure-power integrand.
    """
    s = prediction.order
    us = np.asarray(t_grid, dtype=float) - prediction.L
    out = np.empty(len(us), dtype=complex)
    for i, u in enumerate(us):
        if damping_sigma is not None:
            out[i] = _damped_xi_integral(u, s, cutoff, damping_sigma)
        else:
            out[i] = _undamped_xi_integral(u, s, cutoff)
    return prediction.coefficient * out


def _panel_gl(f, a, b, n_osc, nodes=64):
    panels = max(4, int(np.ceil(n_osc)) * 2)
    gl_x, gl_w = leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    total = 0.0 + 0.0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        x = 0.5 * (hi - lo) * (gl_x + 1.0) + lo
        total += 0.5 * (hi - lo) * np.sum(gl_w * f(x))
    return total


def _damped_xi_integral(u, s, cutoff, sigma):
    xi_max = cutoff.upper + 8.0 * sigma

    def f(xi):
        return (np.exp(-1j * u * xi) * cutoff.value(xi) * xi ** (-s)
                * np.exp(-(xi * xi) / (2 * sigma * sigma)))

    n_osc = abs(u) * (xi_max - cutoff.lower) / (2 * np.pi)
    return _panel_gl(f, cutoff.lower, xi_max, n_osc)


_LAGUERRE_NODES = np.polynomial.laguerre.laggauss(96)


def _exp_integral_e(s: float, z: complex) -> complex:
    """E_s(z) = int_1^inf e^{-z t} t^{-s} dt for Re(z) >= 0.

    Small |z|: the convergent expansion (with the log branch at integer
    s); large |z|: Gauss-Laguerre on the rotated ray t = 1 + w/z.
    """
    if z == 0:
        if s <= 1.0:
            raise QuadratureFailureError("E_s(0) diverges for s <= 1")
        return 1.0 / (s - 1.0)
    if abs(z) >= 2.0:
        w, lw = _LAGUERRE_NODES
        vals = lw * (1.0 + w / z) ** (-s)
        return np.exp(-z) * np.sum(vals) / z
    from scipy.special import gamma, psi

    total = 0.0 + 0.0j
    if abs(s - round(s)) < 1e-12 and s >= 1:
        m = int(round(s))
        logz = np.log(z)
        for k in range(0, 60):
            if k == m - 1:
                total += (-z) ** k / math.factorial(k) * (psi(m) - logz)
            else:
                total += -((-z) ** k) / (math.factorial(k) * (1.0 - m + k))
        return total
    for k in range(0, 60):
        term = (-z) ** k / (math.factorial(k) * (1.0 - s + k))
        total -= term
    total += gamma(1.0 - s) * z ** (s - 1.0)
    return total


def _undamped_xi_integral(u, s, cutoff):
    if u == 0.0 and s <= 1.0:
        raise QuadratureFailureError(
            "undamped symbol integral diverges on the singular support"
        )
    head_hi = cutoff.upper

    def f(xi):
        return np.exp(-1j * u * xi) * cutoff.value(xi) * xi ** (-s)

    n_osc = abs(u) * (head_hi - cutoff.lower) / (2 * np.pi)
    head = _panel_gl(f, cutoff.lower, head_hi, n_osc)
    tail = head_hi ** (1.0 - s) * _exp_integral_e(s, 1j * u * head_hi)
    return head + tail
