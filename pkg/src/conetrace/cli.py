"""Command-line driver.

Subcommands cover the full pipeline: tabulating link diffraction
kernels, finding closed diffractive geodesics, predicting trace
singularities, running verification suites, and computing smoothed
spectral traces.  All runs are deterministic: identical configs give
byte-identical outputs.

Exit codes: 0 ok, 1 verification failure, 2 config error, 3 domain
guard, 4 search failure, 5 degeneracy.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .amplitudes import (
    CutoffSpec,
    TraceSingularityPrediction,
    interior_amplitude,
    invariants_for,
    trace_singularity,
    model_kernel,
)
from .composition import (
    brute_force_composition,
    flat_collinear_geometry,
    sphere_arc_geometry,
)
from .config import (
    grid_from_config,
    link_from_config,
    load_config,
    policy_from_config,
    surface_from_config,
)
from .errors import (
    ConfigError,
    ConjugateDegeneracyError,
    GeometricSetError,
    NoConvergenceError,
    NonPositiveRadiusError,
    NotStrictlyDiffractiveError,
    WallInfluenceError,
)
from .geodesics import build_closed_diffractive
from .links import (
    LinkSpectrum,
    SummationPolicy,
    abel_extrapolate,
    diffraction_kernel,
    singular_set_distance,
)
from .spectra import (
    doubled_square_spectrum,
    fit_trace_singularity,
    smoothed_wave_trace,
)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_SEARCH = 4
EXIT_DEGENERACY = 5

_HEADER_NOTE = ("# conetrace output; frame: metric half-density; "
                "units: arc length (unit speed), frequency 1/length")


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_lines(out_path, lines):
    text = "\n".join(lines) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _parse_tols(pairs):
    tols = {}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"--tol expects KEY=VAL, got {item!r}")
        key, _, val = item.partition("=")
        try:
            tols[key] = float(val)
        except ValueError as exc:
            raise ConfigError(f"--tol value for {key!r} is not a number") from exc
    return tols


def _thread_count(args) -> int:
    if getattr(args, "threads", None) is not None:
        return args.threads
    env = os.environ.get("CONETRACE_THREADS")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError("CONETRACE_THREADS must be an integer") from exc
    return 1


def cmd_link_kernel(args) -> int:
    cfg = load_config(args.config)
    link = link_from_config(cfg.get("link", {}))
    policy = policy_from_config(cfg.get("policy"))
    n = cfg.get("n", 2)
    us = grid_from_config(cfg.get("u_grid", {}), "u_grid")
    lines = [_HEADER_NOTE, "u,re_d,im_d,regular"]
    n_singular = 0
    for u in us:
        try:
            dval = diffraction_kernel(link, n, float(u), 0.0, policy)
            lines.append(",".join([
                _fmt(u), _fmt(dval.value.real), _fmt(dval.value.imag),
                "1" if dval.regular else "0",
            ]))
        except GeometricSetError:
            n_singular += 1
            lines.append(",".join([_fmt(u), "nan", "nan", "0"]))
    if n_singular > len(us) / 2:
        sys.stderr.write("u grid is dominated by the singular set\n")
        return EXIT_DOMAIN
    _write_lines(args.out, lines)
    return EXIT_OK


def _build_geodesic(cfg):
    surface = surface_from_config(cfg.get("surface", {}))
    tips = cfg.get("tip_sequence")
    seeds = cfg.get("seeds")
    if not isinstance(tips, list) or not isinstance(seeds, list):
        raise ConfigError("need 'tip_sequence' and 'seeds' lists")
    options = cfg.get("options", {})
    if not isinstance(options, dict):
        raise ConfigError("'options' must be an object")
    return build_closed_diffractive(surface, tips, seeds, **options)


def cmd_find_geodesics(args) -> int:
    cfg = load_config(args.config)
    geo = _build_geodesic(cfg)
    lines = [
        _HEADER_NOTE,
        "length,primitive_length,k,junction,tip,link_in,link_out,"
        "separation,classification",
    ]
    for j, junc in enumerate(geo.junctions):
        lines.append(",".join([
            _fmt(geo.length), _fmt(geo.primitive_length),
            str(len(geo.segments)), str(j), junc.tip_id,
            _fmt(junc.link_in), _fmt(junc.link_out), _fmt(junc.separation),
            junc.kind,
        ]))
    _write_lines(args.out, lines)
    return EXIT_OK


def cmd_predict_trace(args) -> int:
    cfg = load_config(args.config)
    geo = _build_geodesic(cfg)
    convention = args.convention or cfg.get("convention", "L0")
    invs = invariants_for(geo)
    pred = trace_singularity(geo, invs, length_convention=convention)
    policy = SummationPolicy.closed_form()
    lines = [
        _HEADER_NOTE,
        "length,primitive_length,k,n,order,re_coeff,im_coeff,"
        "segment,d,morse,theta,re_diffraction,im_diffraction",
    ]
    for j, (seg, junc) in enumerate(zip(invs, geo.junctions)):
        dval = diffraction_kernel(junc.link, pred.n, junc.link_in,
                                  junc.link_out, policy)
        lines.append(",".join([
            _fmt(pred.L), _fmt(pred.L0), str(pred.k), str(pred.n),
            _fmt(pred.order), _fmt(pred.coefficient.real),
            _fmt(pred.coefficient.imag), str(j), _fmt(seg.d),
            str(seg.morse), _fmt(seg.theta), _fmt(dval.value.real),
            _fmt(dval.value.imag),
        ]))
    samples_cfg = cfg.get("model_samples")
    if samples_cfg is not None:
        ts = grid_from_config(samples_cfg.get("t_grid", {}), "t_grid")
        sigma = samples_cfg.get("damping_sigma")
        vals = model_kernel(pred, CutoffSpec(), ts, damping_sigma=sigma)
        lines.append("# model kernel samples: t,re,im")
        for t, v in zip(ts, vals):
            lines.append(",".join([_fmt(t), _fmt(v.real), _fmt(v.imag)]))
    _write_lines(args.out, lines)
    return EXIT_OK


def _load_eigenvalues(spec):
    if not isinstance(spec, dict):
        raise ConfigError("'eigenvalues' must be an object")
    if "doubled_square" in spec:
        sub = spec["doubled_square"]
        return doubled_square_spectrum(sub.get("lambda_max", 200.0))
    if "csv" in spec:
        try:
            return np.loadtxt(spec["csv"], comments="#", ndmin=1)
        except OSError as exc:
            raise ConfigError(f"cannot read eigenvalue CSV: {exc}") from exc
    raise ConfigError("eigenvalues need 'doubled_square' or 'csv'")


def cmd_spectral_trace(args) -> int:
    cfg = load_config(args.config)
    eigs = _load_eigenvalues(cfg.get("eigenvalues", {}))
    sigma = cfg.get("sigma")
    if not isinstance(sigma, (int, float)) or sigma <= 0:
        raise ConfigError("'sigma' must be a positive number")
    ts = grid_from_config(cfg.get("t_grid", {}), "t_grid")
    trace = smoothed_wave_trace(eigs, float(sigma), ts)
    lines = [_HEADER_NOTE, "t,re_trace,im_trace"]
    for t, v in zip(trace.t_grid, trace.samples):
        lines.append(",".join([_fmt(t), _fmt(v.real), _fmt(v.imag)]))
    fit_cfg = cfg.get("fit")
    if fit_cfg is not None:
        length = fit_cfg.get("L")
        if not isinstance(length, (int, float)):
            raise ConfigError("fit needs a numeric 'L'")
        k = fit_cfg.get("k", 1)
        unit = TraceSingularityPrediction(
            L=float(length), L0=float(length), k=k, n=2, order=k / 2.0,
            coefficient=1.0 + 0.0j,
            model="inverse_sqrt" if k == 1 else "power")
        C, resid = fit_trace_singularity(
            trace, float(length), unit, CutoffSpec(),
            window=fit_cfg.get("window", 0.35))
        lines.append("# fit: L,re_coeff,im_coeff,residual_rms")
        lines.append("# " + ",".join(
            [_fmt(length), _fmt(C.real), _fmt(C.imag), _fmt(resid)]))
    _write_lines(args.out, lines)
    return EXIT_OK


def _off_singular_grid(rho, margin, count):
    link = LinkSpectrum.circle(rho)
    grid = np.linspace(0.01, rho - 0.01, 4 * count)
    keep = [float(u) for u in grid
            if singular_set_distance(link, np.pi, float(u), 0.0) >= margin]
    return link, keep[:count]


def _suite_link(tols):
    results = []
    policy = SummationPolicy.closed_form()
    tol = tols.get("link", 1e-6)
    for rho in (3 * np.pi / 2, 5 * np.pi / 2, 7.0):
        link, us = _off_singular_grid(rho, 0.1, 50)
        worst = 0.0
        for u in us:
            closed = diffraction_kernel(link, 2, u, 0.0, policy).value
            series = abel_extrapolate(
                lambda r: diffraction_kernel(
                    link, 2, u, 0.0, SummationPolicy.abel(r=r)).value)
            worst = max(worst, abs(closed - series))
        results.append({
            "name": f"closed-vs-abel rho={rho:.6g}",
            "passed": bool(worst <= tol),
            "detail": f"max deviation {worst:.3e}",
        })
    vanish_tol = tols.get("orbifold", 1e-10)
    for rho in (np.pi, 2 * np.pi, 2 * np.pi / 3):
        link, us = _off_singular_grid(rho, 0.02, 50)
        worst = max(
            abs(diffraction_kernel(link, 2, u, 0.0, policy).value)
            for u in us
        )
        results.append({
            "name": f"orbifold-vanishing rho={rho:.6g}",
            "passed": bool(worst <= vanish_tol),
            "detail": f"max |D| {worst:.3e}",
        })
    return results


def _suite_composition(tols):
    results = []
    geom = flat_collinear_geometry(1.0, 1.0)
    a_leg = interior_amplitude(1.0, 0, 1.0).scalar
    val = brute_force_composition(geom, a_leg * a_leg, 200.0)
    pred = interior_amplitude(2.0, 0, 1.0).scalar * np.sqrt(200.0)
    err = abs(val / pred - 1.0)
    results.append({
        "name": "flat-collinear xi=200",
        "passed": bool(err <= tols.get("composition", 0.02)),
        "detail": f"relative error {err:.4f}",
    })
    d1, d2 = 5 * np.pi / 4, np.pi / 4
    theta = lambda d: abs(np.sin(d)) / d
    a12 = (interior_amplitude(d1, 1, theta(d1)).scalar
           * interior_amplitude(d2, 0, theta(d2)).scalar)
    val = brute_force_composition(sphere_arc_geometry(d1, d2), a12, 200.0)
    pred = interior_amplitude(d1 + d2, 1, theta(d1 + d2)).scalar * np.sqrt(200.0)
    phase_deg = abs(np.degrees(np.angle(val / pred)))
    results.append({
        "name": "sphere conjugate-point phase",
        "passed": bool(phase_deg <= tols.get("phase_deg", 3.0)),
        "detail": f"phase deviation {phase_deg:.3f} degrees",
    })
    return results


def _suite_spectral(tols):
    sigma = 40.0
    eigs = doubled_square_spectrum(5.5 * sigma)
    unit = TraceSingularityPrediction(
        L=1.0, L0=1.0, k=1, n=2, order=0.5, coefficient=1.0 + 0.0j,
        model="inverse_sqrt")
    cut = CutoffSpec()

    def measure(length):
        ts = np.arange(length - 0.3, length + 0.3, 0.004)
        tr = smoothed_wave_trace(eigs, sigma, ts)
        return fit_trace_singularity(tr, length, unit, cut, window=0.3)

    corner = 2.0 + np.sqrt(2.0)
    c_corner, _ = measure(corner)
    baseline = np.mean([measure(L)[1] for L in (1.4, 3.3, 3.55)])
    c_geo, _ = measure(2.0)
    results = [
        {
            "name": "corner-loop silence",
            "passed": bool(abs(c_corner) <= 5.0 * baseline),
            "detail": f"|C|={abs(c_corner):.4f} vs baseline {baseline:.4f}",
        },
        {
            "name": "geometric-length discrimination",
            "passed": bool(abs(c_geo) >= 10.0 * abs(c_corner)),
            "detail": f"|C(2)|={abs(c_geo):.4f} vs corner {abs(c_corner):.4f}",
        },
    ]
    return results


_SUITES = {
    "link": _suite_link,
    "composition": _suite_composition,
    "spectral": _suite_spectral,
}


def cmd_verify(args) -> int:
    tols = _parse_tols(args.tol)
    if args.suite == "all":
        names = sorted(_SUITES)
    elif args.suite in _SUITES:
        names = [args.suite]
    else:
        sys.stderr.write(
            f"unknown suite {args.suite!r}; "
            f"choose from {sorted(_SUITES) + ['all']}\n")
        return EXIT_CONFIG
    results = []
    for name in names:
        results.extend(_SUITES[name](tols))
    ok = all(r["passed"] for r in results)
    report = {
        "version": __version__,
        "suite": args.suite,
        "passed": ok,
        "results": results,
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK if ok else EXIT_VERIFY


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="conetrace",
        description="wave-trace singularities at diffractive closed geodesics",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required,
                       help="JSON run configuration")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--tol", action="append", metavar="KEY=VAL",
                       help="tolerance override, repeatable")
        p.add_argument("--threads", type=int, default=None,
                       help="worker count (CONETRACE_THREADS fallback)")
        p.add_argument("--convention", choices=("L0", "L"), default=None,
                       help="length prefactor convention")

    p = sub.add_parser("link-kernel", help="tabulate a diffraction kernel")
    common(p)
    p.set_defaults(fn=cmd_link_kernel)
    p = sub.add_parser("find-geodesics", help="build closed diffractive geodesics")
    common(p)
    p.set_defaults(fn=cmd_find_geodesics)
    p = sub.add_parser("predict-trace", help="predict a trace singularity")
    common(p)
    p.set_defaults(fn=cmd_predict_trace)
    p = sub.add_parser("spectral-trace", help="smoothed trace from a spectrum")
    common(p)
    p.set_defaults(fn=cmd_spectral_trace)
    p = sub.add_parser("verify", help="run a verification suite")
    common(p, config_required=False)
    p.add_argument("--suite", required=True, help="suite name or 'all'")
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _thread_count(args)  # validated even though execution is single-process
        return args.fn(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except (GeometricSetError, WallInfluenceError, NonPositiveRadiusError) as exc:
        sys.stderr.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN
    except NoConvergenceError as exc:
        sys.stderr.write(f"search failure: {exc}\n")
        return EXIT_SEARCH
    except (ConjugateDegeneracyError, NotStrictlyDiffractiveError) as exc:
        sys.stderr.write(f"degeneracy: {exc}\n")
        return EXIT_DEGENERACY


if __name__ == "__main__":
    sys.exit(main())
