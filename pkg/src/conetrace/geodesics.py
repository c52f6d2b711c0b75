"""Geodesic flow, tip shooting, and closed diffractive geodesics.

Geodesics are integrated chart by chart with DOP853 at tight tolerance;
terminal events handle tip hits (x crossing 1e-7 in a designer band),
chart transitions (with hysteresis so a fresh leg never starts on its
own trigger), atlas exits, and caller-supplied section stops.

Tip-to-tip segments are found by shooting: start radially at x = 1e-6
from the source tip, stop on entry into the target tip's rotationally
symmetric reference band, and measure the conserved angular momentum
p_theta = G theta' about the target tip as the miss.  Newton steps use
the exact derivative d p_theta / d theta0 = a0 (j' sqrt(G) - j
d sqrt(G)/ds) supplied by the tip Jacobi field j, so conjugate tips are
detected (and refused) rather than silently iterated on.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    ConjugateDegeneracyError,
    LeftAtlasError,
    NoConvergenceError,
    NotStrictlyDiffractiveError,
    StepFailureError,
)
from .links import GEOMETRIC_TOL, LinkSpectrum, singular_set_distance
from .surfaces import OrthogonalChart, StopRule, Surface, Tip

__all__ = [
    "ChartState",
    "GeodesicPath",
    "ReversedPath",
    "Junction",
    "DiffractiveGeodesic",
    "geodesic_flow",
    "shoot_from_tip",
    "connect_tips",
    "build_closed_diffractive",
    "classify_continuation",
]

TIP_HIT_X = 1e-7
TIP_START_X = 1e-6


@dataclass
class ChartState:
    chart: str
    p: np.ndarray
    v: np.ndarray


@dataclass
class PathLeg:
    chart: str
    s0: float
    s1: float
    sol: object  # dense OdeSolution over [s0, s1]


@dataclass
class TipEnd:
    """Radial extension of a path into a tip across [s_from, s_to]."""

    tip_id: str
    chart: str
    axis_value: float
    sign: float
    angle: float
    s_tip: float  # parameter value of the tip point itself


class GeodesicPath:
    """Unit-speed geodesic as chart legs with dense output.

    The parameter s is arc length.  If an end is a tip, the legs stop at
    x = 1e-6 (start) or 1e-7 (end) and the remaining radial sliver is
    filled in exactly; s = 0 and s = length then sit at the tips.
    """

    def __init__(self, surface, legs, length, start_kind="interior", end_kind="length",
                 start_tip=None, end_tip=None, start_link_point=None,
                 end_link_point=None, end_payload=None,
                 start_cap=None, end_cap=None):
        self.surface = surface
        self.legs = legs
        self.length = length
        self.start_kind = start_kind
        self.end_kind = end_kind
        self.start_tip = start_tip
        self.end_tip = end_tip
        self.start_link_point = start_link_point
        self.end_link_point = end_link_point
        self.end_payload = end_payload
        self._start_cap = start_cap  # TipEnd or None
        self._end_cap = end_cap
        self._leg_starts = [leg.s0 for leg in legs]

    def state(self, s: float) -> ChartState:
        if self.legs and s < self.legs[0].s0 and self._start_cap is not None:
            return self._tip_state(self._start_cap, s)
        if self.legs and s > self.legs[-1].s1 and self._end_cap is not None:
            return self._tip_state(self._end_cap, s)
        i = bisect.bisect_right(self._leg_starts, s) - 1
        i = min(max(i, 0), len(self.legs) - 1)
        leg = self.legs[i]
        yv = leg.sol(np.clip(s, leg.s0, leg.s1))
        return ChartState(leg.chart, yv[:2].copy(), yv[2:].copy())

    def _tip_state(self, cap: TipEnd, s: float) -> ChartState:
        x = abs(s - cap.s_tip)
        out = 1.0 if cap.s_tip <= s else -1.0  # velocity points toward growing s
        p = np.array([cap.axis_value + cap.sign * x, cap.angle])
        v = np.array([cap.sign * out, 0.0])
        return ChartState(cap.chart, p, v)

    def point(self, s: float) -> np.ndarray:
        return self.state(s).p

    def curvature(self, s: float) -> float:
        # unsimplified chart curvature is 0/0 exactly at a tip; K is
        # continuous there, so evaluate a hair inside
        if self._start_cap is not None:
            s = max(s, self._start_cap.s_tip + 1e-9)
        if self._end_cap is not None:
            s = min(s, self._end_cap.s_tip - 1e-9)
        st = self.state(s)
        return self.surface.chart(st.chart).curvature(st.p)

    def speed_drift(self, samples: int = 50) -> float:
        ss = np.linspace(self.legs[0].s0, self.legs[-1].s1, samples)
        worst = 0.0
        for s in ss:
            st = self.state(s)
            worst = max(worst, abs(self.surface.chart(st.chart).norm(st.p, st.v) - 1.0))
        return worst

    def reversed(self) -> "ReversedPath":
        return ReversedPath(self)


class ReversedPath:
    """Same curve traversed backwards; shares the underlying legs."""

    def __init__(self, base: GeodesicPath):
        self.base = base
        self.surface = base.surface
        self.length = base.length
        self.start_kind, self.end_kind = base.end_kind, base.start_kind
        self.start_tip, self.end_tip = base.end_tip, base.start_tip
        self.start_link_point = base.end_link_point
        self.end_link_point = base.start_link_point

    def state(self, s: float) -> ChartState:
        st = self.base.state(self.length - s)
        return ChartState(st.chart, st.p, -st.v)

    def point(self, s: float) -> np.ndarray:
        return self.base.point(self.length - s)

    def curvature(self, s: float) -> float:
        return self.base.curvature(self.length - s)

    def reversed(self) -> GeodesicPath:
        return self.base


def _make_event(value_fn, direction):
    def ev(s, yv):
        return value_fn(yv[:2], yv[2:])

    ev.terminal = True
    ev.direction = direction
    return ev


def geodesic_flow(surface: Surface, start: ChartState, length: float, *,
                  rtol: float = 1e-11, atol: float = 1e-12,
                  stop_rules=(), x_hit: float = TIP_HIT_X,
                  max_legs: int = 400, normalize: bool = True) -> GeodesicPath:
    """Integrate the unit-speed geodesic from `start` for at most `length`.

    Ends on: exhausted length, a tip hit, or a caller stop rule.
    Raises LeftAtlasError on atlas exit and StepFailureError if the
    integrator fails.
    """
    chart_name = start.chart
    p = np.asarray(start.p, dtype=float)
    v = np.asarray(start.v, dtype=float)
    if normalize:
        v = v / surface.chart(chart_name).norm(p, v)

    tip_rules = surface.tip_rules(x_hit)
    legs: list[PathLeg] = []
    s_cur = 0.0
    s_end = length
    end_kind, end_payload = "length", None

    for _ in range(max_legs):
        chart = surface.chart(chart_name)
        rules = [r for r in tip_rules if r.chart == chart_name]
        rules += [r for r in surface.atlas_rules if r.chart == chart_name]
        rules += [r for r in stop_rules if r.chart == chart_name]
        transitions = [t for t in surface.transitions if t.src == chart_name]
        events = [_make_event(r.value, r.direction) for r in rules]
        events += [
            _make_event(lambda pp, vv, _t=t: _t.trigger(pp), -1.0) for t in transitions
        ]

        sol = solve_ivp(
            chart.geodesic_rhs,
            (s_cur, s_end),
            np.concatenate([p, v]),
            method="DOP853",
            rtol=rtol,
            atol=atol,
            dense_output=True,
            events=events or None,
        )
        if not sol.success and sol.status != 1:
            raise StepFailureError(f"geodesic integrator failed: {sol.message}")
        legs.append(PathLeg(chart_name, s_cur, sol.t[-1], sol.sol))

        if sol.status != 1:
            break
        hits = [(te[0], i) for i, te in enumerate(sol.t_events) if len(te)]
        s_ev, idx = min(hits)
        yv = sol.sol(s_ev)
        p, v = yv[:2], yv[2:]
        if idx < len(rules):
            rule = rules[idx]
            if rule.kind == "atlas":
                raise LeftAtlasError(
                    f"geodesic left the atlas in chart '{chart_name}' at s = {s_ev:.6g}"
                )
            end_kind = rule.kind
            end_payload = rule.payload
            legs[-1] = PathLeg(chart_name, s_cur, s_ev, sol.sol)
            break
        tr = transitions[idx - len(rules)]
        legs[-1] = PathLeg(chart_name, s_cur, s_ev, sol.sol)
        p_new = tr.map_point(p)
        v_new = tr.map_velocity(p, v)
        chart_name, p, v = tr.dst, p_new, v_new
        s_cur = s_ev
    else:
        raise StepFailureError("geodesic exceeded the chart-switch budget")

    path = GeodesicPath(surface, legs, legs[-1].s1, end_kind=end_kind,
                        end_payload=end_payload)
    if end_kind == "tip":
        tip = surface.tips[end_payload]
        st = path.state(path.legs[-1].s1)
        s_tip = path.legs[-1].s1 + tip.x_of(st.p)
        path.end_kind = "tip"
        path.end_tip = tip.tip_id
        path.end_link_point = tip.link_coord(st.p[1])
        path._end_cap = TipEnd(tip.tip_id, tip.chart, tip.axis_value, tip.sign,
                               st.p[1], s_tip)
        path.length = s_tip
    return path


def shoot_from_tip(surface: Surface, tip_id: str, link_point: float,
                   length: float, *, eps: float = TIP_START_X,
                   stop_rules=(), **kw) -> GeodesicPath:
    """Radial launch from a tip at link arc coordinate `link_point`.

    s = 0 is the tip itself; integration starts at x = eps with the
    head sliver filled in exactly (radial in the designer band).
    """
    tip = surface.tips[tip_id]
    theta0 = tip.angle_of_link(link_point)
    p = np.array([tip.axis_value + tip.sign * eps, theta0])
    v = np.array([tip.sign, 0.0])
    start = ChartState(tip.chart, p, v)
    path = geodesic_flow(surface, start, length - eps, stop_rules=stop_rules, **kw)
    # re-root the parameter at the tip
    shifted = [PathLeg(l.chart, l.s0 + eps, l.s1 + eps, _ShiftedSol(l.sol, eps))
               for l in path.legs]
    out = GeodesicPath(
        surface, shifted, path.length + eps,
        start_kind="tip", start_tip=tip_id,
        start_link_point=float(np.remainder(link_point, tip.link.circumference)),
        end_kind=path.end_kind, end_tip=path.end_tip,
        end_link_point=path.end_link_point, end_payload=path.end_payload,
        start_cap=TipEnd(tip_id, tip.chart, tip.axis_value, tip.sign, theta0, 0.0),
        end_cap=(None if path._end_cap is None
                 else replace(path._end_cap, s_tip=path._end_cap.s_tip + eps)),
    )
    return out


class _ShiftedSol:
    def __init__(self, sol, shift):
        self.sol, self.shift = sol, shift

    def __call__(self, s):
        return self.sol(s - self.shift)


@dataclass
class ConnectResult:
    path: GeodesicPath
    link_a: float
    link_b: float
    length: float
    iterations: int
    miss: float


def _band_entry_rule(tip: Tip, d_ref: float) -> StopRule:
    return StopRule(
        chart=tip.chart,
        value=lambda p, v, _t=tip, _d=d_ref: _t.x_of(p) - _d,
        direction=-1.0,
        kind="stop",
        payload="band-entry",
    )


def connect_tips(surface: Surface, tip_a: str, tip_b: str, seed_link_point: float,
                 *, d_ref: float = 0.1, tol: float = 1e-9, max_iter: int = 50,
                 degeneracy_tol: float = 1e-8, length_cap: float = 50.0,
                 **flow_kw) -> ConnectResult:
    """Newton-shoot a geodesic from tip_a into tip_b.

    Works for tip_a == tip_b (a loop): the section event only arms once
    the trajectory has left and re-entered the reference band.
    """
    from .jacobi import b_jacobi_solution  # local import; jacobi imports nothing here

    ta, tb = surface.tips[tip_a], surface.tips[tip_b]
    chart_b = surface.chart(tb.chart)
    if not isinstance(chart_b, OrthogonalChart):
        raise StepFailureError("target tip must live in an orthogonal polar chart")
    rule = _band_entry_rule(tb, d_ref)
    q = float(seed_link_point)
    theta0 = ta.angle_of_link(q)

    for it in range(1, max_iter + 1):
        path = shoot_from_tip(surface, tip_a, ta.a0 * theta0, length_cap,
                              stop_rules=[rule], **flow_kw)
        if path.end_kind != "stop":
            raise NoConvergenceError(
                f"shot from '{tip_a}' never entered the reference band of "
                f"'{tip_b}' (ended: {path.end_kind})"
            )
        s_sec = path.legs[-1].s1
        st = path.state(s_sec)
        sq = chart_b.sqrt_q(st.p)
        miss = sq * sq * st.v[1]  # p_theta about the target tip

        jf = b_jacobi_solution(path, s_sec).at(s_sec)
        # variation of p_theta under the launch angle, via the Killing field
        # of the symmetric band: eps0 tracks the parallel frame orientation
        # fixed at launch, v[0] the radial sense at the section
        dsq_dr = float(chart_b.sqrt_q_grad(st.p)[0])
        deriv = ta.sign * ta.a0 * (jf.jprime * sq * st.v[0] - jf.j * dsq_dr)
        if abs(deriv) < degeneracy_tol:
            raise ConjugateDegeneracyError(
                f"tips '{tip_a}' and '{tip_b}' are conjugate along this shot "
                f"(transverse derivative {deriv:.3e})"
            )
        if abs(miss) < tol:
            final = shoot_from_tip(surface, tip_a, ta.a0 * theta0,
                                   s_sec + d_ref + 1.0, **flow_kw)
            if final.end_kind != "tip" or final.end_tip != tip_b:
                raise NoConvergenceError(
                    "converged shot failed to terminate at the target tip"
                )
            # read the arrival link coordinate at moderate x: theta at the
            # x = 1e-7 cutoff carries an O(p_theta / x) whip-around error
            s_ref = final.length - min(d_ref / 2, final.length / 4)
            link_b = tb.link_coord(final.state(s_ref).p[1])
            final.end_link_point = link_b
            if final._end_cap is not None:
                final._end_cap = replace(final._end_cap,
                                         angle=tb.angle_of_link(link_b))
            return ConnectResult(
                path=final,
                link_a=final.start_link_point,
                link_b=link_b,
                length=final.length,
                iterations=it,
                miss=abs(miss),
            )
        theta0 -= miss / deriv

    raise NoConvergenceError(
        f"tip connection '{tip_a}' -> '{tip_b}' did not converge in "
        f"{max_iter} Newton steps (last miss {miss:.3e})"
    )


def classify_continuation(link: LinkSpectrum, q_in: float, q_out: float,
                          tol: float = GEOMETRIC_TOL) -> str:
    """'geometric' when some link geodesic of length pi joins the two
    arrival directions (wrapped arcs count), else 'strictly_diffractive'."""
    if singular_set_distance(link, np.pi, q_in, q_out) < tol:
        return "geometric"
    return "strictly_diffractive"


@dataclass(frozen=True)
class Junction:
    tip_id: str
    link_in: float
    link_out: float
    link: LinkSpectrum
    separation: float  # distance to the singular set at time pi
    kind: str


@dataclass
class DiffractiveGeodesic:
    surface: Surface
    segments: list[ConnectResult]
    junctions: list[Junction]  # junction j sits at the start of segment j
    length: float
    primitive_length: float
    iterate_count: int

    @property
    def strictly_diffractive(self) -> bool:
        return all(j.kind == "strictly_diffractive" for j in self.junctions)


def build_closed_diffractive(surface: Surface, tip_sequence, seeds, *,
                             require_strict: bool = False,
                             **kw) -> DiffractiveGeodesic:
    """Assemble a closed geodesic through the given cyclic tip sequence.

    seeds[j] is the launch link coordinate for the segment from
    tip_sequence[j] to tip_sequence[(j+1) % k].
    """
    k = len(tip_sequence)
    if len(seeds) != k:
        raise ValueError("need one seed per segment")
    segments = [
        connect_tips(surface, tip_sequence[j], tip_sequence[(j + 1) % k],
                     seeds[j], **kw)
        for j in range(k)
    ]
    junctions = []
    for j in range(k):
        tip = surface.tips[tip_sequence[j]]
        q_in = segments[j - 1].link_b
        q_out = segments[j].link_a
        kind = classify_continuation(tip.link, q_in, q_out)
        junctions.append(
            Junction(tip.tip_id, q_in, q_out, tip.link,
                     singular_set_distance(tip.link, np.pi, q_in, q_out), kind)
        )
    if require_strict and any(j.kind != "strictly_diffractive" for j in junctions):
        raise NotStrictlyDiffractiveError(
            "closed geodesic has a geometric continuation at a cone point"
        )

    sig = [
        (tip_sequence[j], tip_sequence[(j + 1) % k],
         round(segments[j].link_a, 6), round(segments[j].link_b, 6),
         round(segments[j].length, 9))
        for j in range(k)
    ]
    period = k
    for p in range(1, k):
        if k % p == 0 and all(sig[j] == sig[(j + p) % k] for j in range(k)):
            period = p
            break
    total = float(sum(seg.length for seg in segments))
    primitive = float(sum(seg.length for seg in segments[:period]))
    return DiffractiveGeodesic(surface, segments, junctions, total, primitive,
                               k // period)
