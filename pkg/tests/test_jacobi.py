"""Jacobi fields: spreading, Wronskians, Morse indices, broken Hessians."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conetrace import jacobi, surfaces
from conetrace.errors import ConjugateDegeneracyError
from conetrace.geodesics import ChartState, geodesic_flow, shoot_from_tip

A0 = 0.75


def sphere_arc(sphere, length):
    start = ChartState("band", np.array([0.0, 0.0]), np.array([0.0, 1.0]))
    return geodesic_flow(sphere, start, length)


class TestSpreading:
    def test_flat_theta_is_one(self, plane):
        rng = np.random.default_rng(7)
        for d in np.linspace(0.5, 20.0, 10):
            ang = rng.uniform(0, 2 * np.pi)
            v = np.array([np.cos(ang), np.sin(ang)])
            path = geodesic_flow(plane, ChartState("cart", np.zeros(2), v), d)
            assert abs(jacobi.theta_spreading(path) - 1.0) < 1e-8

    def test_sphere_theta_exact(self, sphere):
        for d in (0.5, 1.5, 2.5):
            path = sphere_arc(sphere, d)
            assert jacobi.theta_spreading(path) == pytest.approx(
                np.sin(d) / d, abs=1e-9
            )

    def test_flat_cone_tip_theta(self):
        fc = surfaces.flat_cone(1.5 * np.pi)
        path = shoot_from_tip(fc, "tip", 0.2, 4.0)
        assert jacobi.theta_spreading(path) == pytest.approx(1.0, abs=1e-8)

    def test_symmetry_forward_reverse(self, spindle_closed, teardrop_closed, sphere):
        rng = np.random.default_rng(3)
        paths = [
            spindle_closed.segments[0].path,
            teardrop_closed.segments[0].path,
            sphere_arc(sphere, 2.8),
        ]
        for path in paths:
            for _ in range(5):
                s0, s1 = np.sort(rng.uniform(0.05, path.length - 0.05, 2))
                if s1 - s0 < 0.2:
                    continue
                fwd = jacobi.theta_spreading(path, s0, s1)
                rev = jacobi.theta_spreading(
                    path.reversed(), path.length - s1, path.length - s0
                )
                assert abs(fwd - rev) < 1e-8

    def test_symmetric_check_pair(self, spindle_closed):
        fwd, bwd = jacobi.theta_symmetric_check(spindle_closed.segments[0].path)
        assert abs(fwd - bwd) < 1e-8

    def test_newton_derivative_matches_endpoint_jacobi(self, spindle_closed):
        # the shooting derivative measured in the target band equals the
        # Wronskian of j with the band's own warped solution, hence
        # a0_a * a0_b * |j(L)| once the geodesic actually hits the tip
        seg = spindle_closed.segments[0]
        path = seg.path
        surface = path.surface
        tip_b = surface.tips[path.end_tip]
        chart = surface.chart(tip_b.chart)
        s_sec = path.length - 0.1
        st = path.state(s_sec)
        jf = jacobi.b_jacobi_from_tip(path, s_sec).at(s_sec)
        sq = chart.sqrt_q(st.p)
        dsq_dr = float(chart.sqrt_q_grad(st.p)[0])
        deriv = 0.75 * (jf.jprime * sq * st.v[0] - jf.j * dsq_dr)
        j_end = jacobi.b_jacobi_from_tip(path).at(path.length).j
        assert abs(abs(deriv) - 0.75 * tip_b.a0 * abs(j_end)) < 1e-6

    def test_shape_operator_flat_cone(self):
        fc = surfaces.flat_cone(1.5 * np.pi)
        path = shoot_from_tip(fc, "tip", 0.0, 4.0)
        assert jacobi.shape_operator(path, 2.0) == pytest.approx(0.5, abs=1e-9)


class TestWronskian:
    def test_drift_small_across_surfaces(self, sphere, spindle_closed, teardrop_closed):
        rng = np.random.default_rng(11)
        paths = [
            sphere_arc(sphere, 2.9),
            spindle_closed.segments[0].path,
            teardrop_closed.segments[0].path,
        ]
        for path in paths:
            for _ in range(6):
                s0, s1 = np.sort(rng.uniform(0.0, path.length, 2))
                if s1 - s0 < 0.1:
                    continue
                assert jacobi.wronskian_drift(path, s0, s1) < 1e-8


class TestMorse:
    def test_sphere_counts(self, sphere):
        assert jacobi.morse_index(sphere_arc(sphere, 2.0)) == 0
        assert jacobi.morse_index(sphere_arc(sphere, 3.5)) == 1
        assert jacobi.morse_index(sphere_arc(sphere, 6.5)) == 2

    def test_conjugate_endpoint_refused(self, sphere):
        with pytest.raises(ConjugateDegeneracyError):
            jacobi.morse_index(sphere_arc(sphere, np.pi))

    def test_additivity_with_cut_correction(self, sphere):
        path = sphere_arc(sphere, 1.5 * np.pi)
        cut = 0.75 * np.pi
        whole = jacobi.morse_index(path)
        m1 = jacobi.morse_index(path, 0.0, cut)
        m2 = jacobi.morse_index(path, cut, path.length)
        h = jacobi.broken_hessian(path, cut)
        assert whole == m1 + m2 + (1 if h < 0 else 0)
        assert h == pytest.approx(-2.0, abs=1e-9)

    def test_additivity_on_spindle_segment(self, spindle_closed):
        path = spindle_closed.segments[0].path
        cut = 0.45 * path.length
        whole = jacobi.morse_index(path)
        m1 = jacobi.morse_index(path, 0.0, cut)
        m2 = jacobi.morse_index(path, cut, path.length)
        h = jacobi.broken_hessian(path, cut)
        assert whole == m1 + m2 + (1 if h < 0 else 0)


class TestBrokenHessian:
    def test_flat_value(self, plane):
        path = geodesic_flow(
            plane, ChartState("cart", np.zeros(2), np.array([1.0, 0.0])), 3.0
        )
        assert jacobi.broken_hessian(path, 1.0) == pytest.approx(1.5, abs=1e-10)

    def test_frobenius_start_self_consistent(self):
        # non-product tip: curvature ~ c/x, the series start must absorb it
        surf = surfaces.cone_chart_surface("1.3*(1+p0/2)**0.5", 10.0)
        path = shoot_from_tip(surf, "tip", 0.0, 2.0)
        a = jacobi.b_jacobi_from_tip(path, 1.5, x_start=1e-4).at(1.5)
        b = jacobi.b_jacobi_from_tip(path, 1.5, x_start=1e-5).at(1.5)
        c = jacobi.b_jacobi_from_tip(path, 1.5, x_start=1e-6).at(1.5)
        assert abs(a.j - b.j) < 1e-8
        assert abs(b.j - c.j) < 1e-9
        assert abs(a.jprime - b.jprime) < 1e-8


@settings(max_examples=15, deadline=None)
@given(d=st.floats(0.3, 2.9), cut_frac=st.floats(0.15, 0.85))
def test_property_sphere_additivity(d, cut_frac):
    sphere = surfaces.sphere_band(1.5)
    path = sphere_arc(sphere, d)
    cut = cut_frac * d
    whole = jacobi.morse_index(path)
    m1 = jacobi.morse_index(path, 0.0, cut)
    m2 = jacobi.morse_index(path, cut, d)
    h = jacobi.broken_hessian(path, cut)
    assert whole == m1 + m2 + (1 if h < 0 else 0)
