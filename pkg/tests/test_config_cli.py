"""Config parsing and CLI plumbing: delegation, determinism, exit codes."""

import json

import numpy as np
import pytest

from conetrace.cli import main
from conetrace.config import (
    link_from_config,
    policy_from_config,
    surface_from_config,
)
from conetrace.errors import ConfigError
from conetrace.links import LinkSpectrum, SummationPolicy, diffraction_kernel
from conetrace.spectra import doubled_square_spectrum, smoothed_wave_trace
from conetrace.amplitudes import trace_singularity

A0 = 0.75
RHO = 1.5 * np.pi


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_rows(path):
    lines = [ln for ln in path.read_text().splitlines()
             if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


class TestConfigObjects:
    def test_builtin_surface(self):
        surf = surface_from_config({"builtin": "flat_cone",
                                    "params": {"rho": RHO}})
        assert surf.angle_period == pytest.approx(RHO)

    def test_unknown_builtin(self):
        with pytest.raises(ConfigError):
            surface_from_config({"builtin": "klein_bottle"})

    def test_bad_params(self):
        with pytest.raises(ConfigError):
            surface_from_config({"builtin": "plane", "params": {"radius": 1}})

    def test_link(self):
        link = link_from_config({"circumference": RHO})
        assert link.circumference == pytest.approx(RHO)
        with pytest.raises(ConfigError):
            link_from_config({"circumference": -1.0})

    def test_policy(self):
        assert policy_from_config(None).kind == "closed_form"
        assert policy_from_config({"kind": "abel", "r": 0.999}).r == 0.999
        with pytest.raises(ConfigError):
            policy_from_config({"kind": "cesaro"})


class TestLinkKernelCommand:
    def config(self, tmp_path, rho=RHO):
        return write_config(tmp_path, "lk.json", {
            "link": {"circumference": rho},
            "u_grid": {"min": 0.3, "max": rho - 0.3, "count": 9},
        })

    def test_matches_library(self, tmp_path):
        cfg = self.config(tmp_path)
        out = tmp_path / "lk.csv"
        assert main(["link-kernel", "--config", cfg, "--out", str(out)]) == 0
        header, rows = read_rows(out)
        assert header == ["u", "re_d", "im_d", "regular"]
        link = LinkSpectrum.circle(RHO)
        pol = SummationPolicy.closed_form()
        for row in rows:
            u = float(row[0])
            ref = diffraction_kernel(link, 2, u, 0.0, pol).value
            assert float(row[1]) == ref.real
            assert float(row[2]) == ref.imag

    def test_units_header_present(self, tmp_path):
        out = tmp_path / "lk.csv"
        main(["link-kernel", "--config", self.config(tmp_path),
              "--out", str(out)])
        first = out.read_text().splitlines()[0]
        assert first.startswith("#") and "units" in first and "frame" in first

    def test_byte_identical_reruns(self, tmp_path):
        cfg = self.config(tmp_path)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["link-kernel", "--config", cfg, "--out", str(out1)])
        main(["link-kernel", "--config", cfg, "--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_orbifold_grid_all_zero(self, tmp_path):
        cfg = write_config(tmp_path, "orb.json", {
            "link": {"circumference": np.pi},
            "u_grid": {"min": 0.4, "max": 2.6, "count": 7},
        })
        out = tmp_path / "orb.csv"
        assert main(["link-kernel", "--config", cfg, "--out", str(out)]) == 0
        _, rows = read_rows(out)
        assert all(abs(float(r[1])) < 1e-12 and abs(float(r[2])) < 1e-12
                   for r in rows)

    def test_singular_grid_exit_3(self, tmp_path):
        cfg = write_config(tmp_path, "sing.json", {
            "link": {"circumference": RHO},
            "u_grid": {"min": np.pi - 1e-8, "max": np.pi + 1e-8, "count": 3},
        })
        assert main(["link-kernel", "--config", cfg]) == 3


class TestExitCodes:
    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"link": [,}')
        assert main(["link-kernel", "--config", str(path)]) == 2
        err = capsys.readouterr().err
        assert "line" in err and "column" in err

    def test_unknown_surface_exit_2(self, tmp_path):
        cfg = write_config(tmp_path, "s.json", {
            "surface": {"builtin": "nope"},
            "tip_sequence": [], "seeds": [],
        })
        assert main(["find-geodesics", "--config", cfg]) == 2

    def test_unknown_suite_exit_2(self):
        assert main(["verify", "--suite", "nope"]) == 2

    def test_bad_threads_env_exit_2(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CONETRACE_THREADS", "many")
        cfg = write_config(tmp_path, "lk.json", {
            "link": {"circumference": RHO},
            "u_grid": {"min": 0.3, "max": 1.0, "count": 3},
        })
        assert main(["link-kernel", "--config", cfg]) == 2

    def test_bad_tol_flag_exit_2(self):
        assert main(["verify", "--suite", "link", "--tol", "oops"]) == 2


@pytest.fixture(scope="module")
def teardrop_cli_outputs(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    cfg = write_config(tmp, "td.json", {
        "surface": {"builtin": "teardrop"},
        "tip_sequence": ["tip"],
        "seeds": [A0 * (np.pi / 4 + 0.02)],
        "options": {"length_cap": 12.0},
    })
    geo_out = tmp / "geo.csv"
    pred_out = tmp / "pred.csv"
    assert main(["find-geodesics", "--config", cfg, "--out", str(geo_out)]) == 0
    assert main(["predict-trace", "--config", cfg, "--out", str(pred_out)]) == 0
    return geo_out, pred_out


class TestGeodesicCommands:
    def test_find_geodesics_matches_library(self, teardrop_cli_outputs,
                                            teardrop_closed):
        geo_out, _ = teardrop_cli_outputs
        header, rows = read_rows(geo_out)
        assert header[0] == "length"
        assert len(rows) == 1
        assert float(rows[0][0]) == pytest.approx(teardrop_closed.length,
                                                  abs=1e-8)
        assert rows[0][-1] == "strictly_diffractive"

    def test_predict_trace_matches_library(self, teardrop_cli_outputs,
                                           teardrop_closed):
        _, pred_out = teardrop_cli_outputs
        _, rows = read_rows(pred_out)
        pred = trace_singularity(teardrop_closed)
        got = complex(float(rows[0][5]), float(rows[0][6]))
        assert abs(got - pred.coefficient) <= 1e-6 * abs(pred.coefficient)
        assert float(rows[0][4]) == pred.order


class TestSpectralTraceCommand:
    def config(self, tmp_path, with_fit=False):
        payload = {
            "eigenvalues": {"doubled_square": {"lambda_max": 60.0}},
            "sigma": 12.0,
            "t_grid": {"min": 0.5, "max": 1.5, "count": 11},
        }
        if with_fit:
            payload["t_grid"] = {"min": 3.05, "max": 3.78, "count": 120}
            payload["sigma"] = 40.0
            payload["eigenvalues"]["doubled_square"]["lambda_max"] = 220.0
            payload["fit"] = {"L": 2.0 + float(np.sqrt(2.0)), "k": 1,
                              "window": 0.3}
        return write_config(tmp_path, "sp.json", payload)

    def test_matches_library(self, tmp_path):
        out = tmp_path / "tr.csv"
        assert main(["spectral-trace", "--config", self.config(tmp_path),
                     "--out", str(out)]) == 0
        _, rows = read_rows(out)
        eigs = doubled_square_spectrum(60.0)
        trace = smoothed_wave_trace(eigs, 12.0, np.linspace(0.5, 1.5, 11))
        for row, ref in zip(rows, trace.samples):
            assert float(row[1]) == ref.real
            assert float(row[2]) == ref.imag

    def test_fit_footer(self, tmp_path):
        out = tmp_path / "fit.csv"
        assert main(["spectral-trace", "--config",
                     self.config(tmp_path, with_fit=True),
                     "--out", str(out)]) == 0
        footer = [ln for ln in out.read_text().splitlines()
                  if ln.startswith("# fit")]
        assert footer

    def test_byte_identical(self, tmp_path):
        cfg = self.config(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["spectral-trace", "--config", cfg, "--out", str(a)])
        main(["spectral-trace", "--config", cfg, "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()
