"""Jacobi fields along geodesic paths: spreading, Morse indices, shape.

The scalar Jacobi equation j'' + K(s) j = 0 is integrated along a
GeodesicPath with the path's own curvature samples.  Fields launched at
a tip use the Frobenius start j(x) = x (1 + c1 x), j'(x) = 1 + 2 c1 x
at a small offset, where c1 is the first radial correction of sqrt(G);
this is exact through second order even when the curvature has a 1/x
singularity at a non-product tip.

Conventions: the normalized spreading between parameters s0 < s1 is
Theta = |j(s1)| / (s1 - s0) for the field with j(s0) = 0, j'(s0) = 1,
so Theta = 1 on flat surfaces.  The Morse index counts interior zeros
of that field on the open interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import ConjugateDegeneracyError, StepFailureError

__all__ = [
    "JacobiField",
    "JacobiSolution",
    "integrate_jacobi",
    "b_jacobi_solution",
    "b_jacobi_from_tip",
    "theta_spreading",
    "morse_index",
    "theta_symmetric_check",
    "shape_operator",
    "broken_hessian",
    "broken_hessian_index",
    "wronskian_drift",
]

FROBENIUS_START_X = 1e-4


@dataclass(frozen=True)
class JacobiField:
    j: float
    jprime: float


class JacobiSolution:
    """Dense solution of j'' + K j = 0 over [s0, s1] along a path."""

    def __init__(self, sol, s0: float, s1: float):
        self._sol = sol
        self.s0 = s0
        self.s1 = s1

    def at(self, s: float) -> JacobiField:
        y = self._sol(np.clip(s, self.s0, self.s1))
        return JacobiField(float(y[0]), float(y[1]))

    def j(self, s) -> np.ndarray:
        return self._sol(np.clip(s, self.s0, self.s1))[0]

    def zeros(self, lo: float = None, hi: float = None, pad: float = 1e-9):
        """Zeros of j in the open interval (lo, hi)."""
        lo = self.s0 if lo is None else lo
        hi = self.s1 if hi is None else hi
        if hi - lo <= 2 * pad:
            return []
        grid = np.linspace(lo + pad, hi - pad, max(400, int(200 * (hi - lo))))
        vals = self.j(grid)
        out = []
        sign = np.sign(vals)
        for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
            out.append(brentq(lambda s: float(self.j(s)), grid[i], grid[i + 1],
                              xtol=1e-12))
        return out


def integrate_jacobi(path, s0: float, s1: float, j0: float, jprime0: float, *,
                     rtol: float = 1e-11, atol: float = 1e-13) -> JacobiSolution:
    def rhs(s, y):
        return (y[1], -path.curvature(s) * y[0])

    sol = solve_ivp(rhs, (s0, s1), [j0, jprime0], method="DOP853",
                    rtol=rtol, atol=atol, dense_output=True)
    if not sol.success:
        raise StepFailureError(f"Jacobi integrator failed: {sol.message}")
    return JacobiSolution(sol.sol, s0, s1)


def b_jacobi_solution(path, s1: float = None, *,
                      x_start: float = FROBENIUS_START_X, **kw) -> JacobiSolution:
    """Tip-normalized Jacobi field (j ~ x near the tip) along a tip-start path."""
    if path.start_kind != "tip":
        raise StepFailureError("b-Jacobi field needs a path starting at a tip")
    tip = path.surface.tips[path.start_tip]
    c1 = tip.c1
    j0 = x_start * (1.0 + c1 * x_start)
    jp0 = 1.0 + 2.0 * c1 * x_start
    s1 = path.length if s1 is None else s1
    return integrate_jacobi(path, x_start, s1, j0, jp0, **kw)


def b_jacobi_from_tip(path, s1: float = None, **kw) -> JacobiSolution:
    return b_jacobi_solution(path, s1, **kw)


def _field_from(path, s0: float, s1: float, **kw) -> JacobiSolution:
    if s0 == 0.0 and path.start_kind == "tip":
        return b_jacobi_solution(path, s1, **kw)
    return integrate_jacobi(path, s0, s1, 0.0, 1.0, **kw)


def theta_spreading(path, s0: float = 0.0, s1: float = None, **kw) -> float:
    """Normalized geodesic spreading |j(s1)|/(s1 - s0); 1 on flat surfaces."""
    s1 = path.length if s1 is None else s1
    field = _field_from(path, s0, s1, **kw)
    return abs(field.at(s1).j) / (s1 - s0)


def morse_index(path, s0: float = 0.0, s1: float = None, *,
                degeneracy_tol: float = 1e-8, **kw) -> int:
    """Interior zero count of the spreading field on (s0, s1)."""
    s1 = path.length if s1 is None else s1
    field = _field_from(path, s0, s1, **kw)
    if abs(field.at(s1).j) < degeneracy_tol * (s1 - s0):
        raise ConjugateDegeneracyError(
            "endpoint is conjugate: Morse index undefined at this tolerance"
        )
    start = field.s0 if s0 == 0.0 and path.start_kind == "tip" else s0
    return len(field.zeros(start, s1))


def theta_symmetric_check(path, s0: float = 0.0, s1: float = None, **kw):
    """(Theta forward, Theta backward); equal within 1e-8 by the Wronskian
    identity relating the two endpoint-vanishing families."""
    s1 = path.length if s1 is None else s1
    fwd = theta_spreading(path, s0, s1, **kw)
    rev = theta_spreading(path.reversed(), path.length - s1, path.length - s0, **kw)
    return fwd, rev


def shape_operator(path, s: float, **kw) -> float:
    """j'/j at s for the tip-launched field: the second fundamental form of
    the geodesic circle about the start tip."""
    f = b_jacobi_solution(path, s, **kw).at(s)
    return f.jprime / f.j


def broken_hessian(path, s_cut: float, **kw) -> float:
    """Second variation of length at a one-point break of the path.

    H = ja'/ja + jb'/jb with ja the spreading field from the start and
    jb the spreading field from the end (traversed backwards), both
    evaluated at the cut.  Breaking a minimizing arc gives H > 0; each
    negative H adds one to the Morse index of the concatenation:
    index(whole) = index(part1) + index(part2) + [H < 0].
    """
    fa = _field_from(path, 0.0, s_cut, **kw).at(s_cut)
    rev = path.reversed()
    s_rev = path.length - s_cut
    fb = _field_from(rev, 0.0, s_rev, **kw).at(s_rev)
    if abs(fa.j) < 1e-12 or abs(fb.j) < 1e-12:
        raise ConjugateDegeneracyError("cut point is conjugate to an endpoint")
    return fa.jprime / fa.j + fb.jprime / fb.j


def broken_hessian_index(path, s_cut: float, **kw) -> int:
    """1 when breaking at s_cut lowers the length Hessian (H < 0), else 0."""
    return 1 if broken_hessian(path, s_cut, **kw) < 0 else 0


def wronskian_drift(path, s0: float = 0.0, s1: float = None,
                    checks: int = 20, **kw) -> float:
    """Max |W - 1| of the fundamental pair; 0 for an exact integration."""
    s1 = path.length if s1 is None else s1
    a = integrate_jacobi(path, s0, s1, 1.0, 0.0, **kw)
    b = integrate_jacobi(path, s0, s1, 0.0, 1.0, **kw)
    worst = 0.0
    for s in np.linspace(s0, s1, checks):
        fa, fb = a.at(s), b.at(s)
        worst = max(worst, abs(fa.j * fb.jprime - fa.jprime * fb.j - 1.0))
    return worst
