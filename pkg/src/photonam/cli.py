"""Command-line driver.

Commands: beam, observables, split, synthesize, analyze, potential, check,
plotdata.  Human-readable text goes to stdout; ``--json`` switches to
machine-readable JSON.  Exit codes: 0 success, 1 numerical threshold
failure, 2 usage or validation error (with an error JSON on stderr).

The THREADS environment variable caps the worker count used for
embarrassingly parallel check suites; results are identical for any value.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import (
    algebra_checks,
    beams,
    fields_bridge,
    fileio,
    observables,
    photon_state,
    polarization,
)
from .grids import make_grid

DEFAULT_CHART = (1.0, 0.0, 0.0)   # beams propagate about z; keep the chart poles away


def _vec(value, n=3, cast=float):
    parts = [cast(v) for v in str(value).split(",")]
    if len(parts) == 1:
        parts = parts * n
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated values, got {value!r}")
    return tuple(parts)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(payload, as_json, text_lines):
    if as_json:
        print(json.dumps(_jsonable(payload), sort_keys=True, indent=1))
    else:
        for line in text_lines:
            print(line)


def _grid_arg(spec, dx):
    dims = _vec(spec, 3, int)
    return make_grid(dims, (dx, dx, dx))


def _threads():
    env = os.environ.get("THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# beam

def cmd_beam(args):
    grid = _grid_arg(args.grid, args.dx)
    chart = np.asarray(_vec(args.chart_axis))
    chart = chart / np.linalg.norm(chart)
    basis = polarization.build_basis(grid, tuple(chart))
    dk = max(grid.dk)

    if args.family == "bessel":
        # default keeps the ring plus 8 sigma of tail inside the grid
        k0 = args.k0 if args.k0 is not None else 0.62 * np.pi / args.dx
        kz0 = args.kz_over_k * k0
        kperp0 = np.sqrt(max(k0 ** 2 - kz0 ** 2, 0.0))
        # default widths: 3 steps where the ring allows it, else as wide as fits
        sigma_auto = min(3.0, kperp0 / (4.2 * dk))
        spec = beams.BesselSpec(
            k_perp0=kperp0,
            k_z0=kz0,
            m=args.m,
            helicity=args.helicity,
            sigma_perp=(args.sigma_perp if args.sigma_perp is not None else sigma_auto) * dk,
            sigma_z=(args.sigma_z if args.sigma_z is not None else sigma_auto) * dk,
        )
        wf = beams.bessel_beam(grid, basis, spec, photons=args.photons)
        provenance = {
            "family": "bessel", "m": args.m, "helicity": args.helicity,
            "k0": k0, "kz_over_k": args.kz_over_k,
            "sigma_perp": spec.sigma_perp, "sigma_z": spec.sigma_z,
            "sigma_perp_cells": spec.sigma_perp / dk, "sigma_z_cells": spec.sigma_z / dk,
            "ratio_analytic": beams.bessel_ratio_oracle(args.m, args.kz_over_k, args.helicity),
        }
    else:
        center = _vec(args.center) if args.center else ((np.pi / args.dx) / 3.0,) * 3
        sigma = tuple(s * dk for s in _vec(args.sigma if args.sigma is not None else "2.5"))
        wf = beams.gaussian_vortex(
            grid, basis, center=center, widths=sigma, m=args.m,
            helicity=args.helicity_name, photons=args.photons,
        )
        provenance = {
            "family": "gaussian", "m": args.m, "helicity": args.helicity_name,
            "center": list(center), "sigma": list(sigma),
        }

    manifest = fileio.write_wavefunction(args.output, wf, provenance=provenance)
    _emit({"written": args.output, "manifest": manifest}, args.json,
          [f"wrote {args.output} ({manifest['kind']}, dims {manifest['dims']})"])
    return 0


# ---------------------------------------------------------------------------
# observables / split

ROUTES = ("photon", "field", "darwin", "textbook", "nonlocal")


def _vec3(v):
    return None if v is None else [float(x) for x in np.asarray(v)]


def _generator_dict(gen):
    return {
        "H": float(gen.H),
        "P": _vec3(gen.P), "J": _vec3(gen.J), "K": _vec3(gen.K),
        "N": None if gen.N is None else float(gen.N),
        "Jo": _vec3(gen.Jo), "Js": _vec3(gen.Js),
        "diagnostics": _jsonable(gen.diagnostics or {}),
    }


def _rel(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    den = max(np.linalg.norm(b), 1e-300)
    return float(np.linalg.norm(a - b) / den)


def _load_state(path, chart_axis):
    obj, manifest = fileio.read(path)
    if isinstance(obj, photon_state.PhotonWaveFunction):
        return obj, manifest
    if isinstance(obj, fields_bridge.RSField):
        basis = polarization.build_basis(obj.grid, tuple(chart_axis))
        return fields_bridge.analyze_rs(obj, basis), manifest
    raise ValueError(f"{path}: cannot compute observables from a {manifest['kind']} file")


def build_report(wf, routes, manifest=None, nonlocal_max=24):
    report = {"routes": {}, "deltas": {}, "grid": {"dims": list(wf.grid.dims), "spacing": list(wf.grid.spacing)},
              "units": {"c": wf.grid.units.c, "hbar": wf.grid.units.hbar, "eps0": wf.grid.units.eps0},
              "time": wf.time}
    if manifest and "provenance" in manifest:
        report["provenance"] = manifest["provenance"]

    gen_p = observables.generators_photon_picture(wf, boundary="warn")
    report["routes"]["photon"] = _generator_dict(gen_p)
    report["n_photons"] = float(gen_p.N)

    rs = None
    if "field" in routes or "textbook" in routes or "nonlocal" in routes:
        rs = fields_bridge.synthesize(wf)
    if "field" in routes:
        gen_f = observables.generators_field_picture(rs, boundary="warn")
        report["routes"]["field"] = _generator_dict(gen_f)
        report["deltas"]["H_field_vs_photon"] = _rel(gen_f.H, gen_p.H)
        report["deltas"]["P_field_vs_photon"] = _rel(gen_f.P, gen_p.P)
        if gen_f.J is not None:
            report["deltas"]["J_field_vs_photon"] = _rel(gen_f.J, gen_p.J)
            report["deltas"]["K_field_vs_photon"] = _rel(gen_f.K, gen_p.K)
    if "darwin" in routes:
        Ek = fields_bridge.spectral_e_from_wavefunction(wf)
        Jo_d, Js_d, diag = observables.darwin_split(Ek, boundary="warn")
        report["routes"]["darwin"] = {"Jo": _vec3(Jo_d), "Js": _vec3(Js_d), "diagnostics": _jsonable(diag)}
        report["deltas"]["Js_darwin_vs_photon"] = _rel(Js_d, gen_p.Js)
        report["deltas"]["Jo_darwin_vs_photon"] = _rel(Jo_d, gen_p.Jo)
    if "textbook" in routes:
        E = fields_bridge.electric_field(rs)
        B = fields_bridge.magnetic_field(rs)
        A = fields_bridge.vector_potential(B)
        Jo_t, Js_t = observables.textbook_split(E, A)
        report["routes"]["textbook"] = {"Jo": _vec3(Jo_t), "Js": _vec3(Js_t)}
        report["deltas"]["Js_textbook_vs_photon"] = _rel(Js_t, gen_p.Js)
        report["deltas"]["Jo_textbook_vs_photon"] = _rel(Jo_t, gen_p.Jo)
    if "nonlocal" in routes:
        E = fields_bridge.electric_field(rs)
        B = fields_bridge.magnetic_field(rs)
        Js_n = observables.spin_nonlocal_real(E, B, max_dim=nonlocal_max)
        report["routes"]["nonlocal"] = {"Js": _vec3(Js_n)}
        report["deltas"]["Js_nonlocal_vs_photon"] = _rel(Js_n, gen_p.Js)
    return report


def _report_lines(report):
    lines = [f"N = {report['n_photons']:.12g}"]
    for route, vals in report["routes"].items():
        lines.append(f"[{route}]")
        for key in ("H", "P", "J", "Jo", "Js", "K"):
            if vals.get(key) is not None:
                v = vals[key]
                if isinstance(v, list):
                    lines.append(f"  {key} = [{', '.join(f'{x:+.9e}' for x in v)}]")
                else:
                    lines.append(f"  {key} = {v:+.9e}")
    if report["deltas"]:
        lines.append("[route deltas]")
        for k, v in sorted(report["deltas"].items()):
            lines.append(f"  {k} = {v:.3e}")
    return lines


def cmd_observables(args):
    wf, manifest = _load_state(args.file, _vec(args.chart_axis))
    routes = tuple(r.strip() for r in args.routes.split(",")) if args.routes else ("photon", "field", "darwin", "textbook")
    for r in routes:
        if r not in ROUTES:
            raise ValueError(f"unknown route {r!r}; choose from {ROUTES}")
    if "nonlocal" in routes and max(wf.grid.dims) > args.nonlocal_max:
        raise ValueError(
            f"nonlocal route refused on a {wf.grid.dims} grid "
            f"(cost guard at {args.nonlocal_max}^3); use a smaller grid")
    report = build_report(wf, routes, manifest, nonlocal_max=args.nonlocal_max)
    _emit(report, args.json, _report_lines(report))
    return 0


def cmd_split(args):
    wf, manifest = _load_state(args.file, _vec(args.chart_axis))
    report = build_report(wf, ("photon",), manifest)
    vals = report["routes"]["photon"]
    payload = {"Jo": vals["Jo"], "Js": vals["Js"], "J": vals["J"],
               "n_photons": report["n_photons"], "provenance": report.get("provenance")}
    lines = [
        f"Jo = [{', '.join(f'{x:+.9e}' for x in vals['Jo'])}]",
        f"Js = [{', '.join(f'{x:+.9e}' for x in vals['Js'])}]",
        f"J  = [{', '.join(f'{x:+.9e}' for x in vals['J'])}]",
        f"N  = {report['n_photons']:.12g}",
    ]
    _emit(payload, args.json, lines)
    return 0


# ---------------------------------------------------------------------------
# synthesize / analyze / potential

def cmd_synthesize(args):
    obj, manifest = fileio.read(args.file)
    if not isinstance(obj, photon_state.PhotonWaveFunction):
        raise ValueError(f"{args.file}: synthesize needs a wavefunction file")
    rs = fields_bridge.synthesize(obj, args.t)
    man = fileio.write_rs_field(args.output, rs, provenance=manifest.get("provenance"))
    _emit({"written": args.output, "manifest": man}, args.json,
          [f"wrote {args.output} (rs_field at t={rs.time})"])
    return 0


def cmd_analyze(args):
    obj, manifest = fileio.read(args.file)
    if not isinstance(obj, fields_bridge.RSField):
        raise ValueError(f"{args.file}: analyze needs an rs_field file")
    basis = polarization.build_basis(obj.grid, tuple(_vec(args.chart_axis)))
    wf = fields_bridge.analyze_rs(obj, basis)
    man = fileio.write_wavefunction(args.output, wf, provenance=manifest.get("provenance"))
    _emit({"written": args.output, "manifest": man}, args.json,
          [f"wrote {args.output} (wavefunction)"])
    return 0


def cmd_potential(args):
    obj, manifest = fileio.read(args.file)
    if isinstance(obj, fields_bridge.RSField):
        B = fields_bridge.magnetic_field(obj)
    elif isinstance(obj, fields_bridge.RealVectorField) and obj.role == "B":
        B = obj
    else:
        raise ValueError(f"{args.file}: potential needs an rs_field or a B real_field file")
    A = fields_bridge.vector_potential(B)
    man = fileio.write_real_field(args.output, A, provenance=manifest.get("provenance"))
    _emit({"written": args.output, "manifest": man}, args.json,
          [f"wrote {args.output} (real_field A, transverse gauge)"])
    return 0


# ---------------------------------------------------------------------------
# check

def _algebra_state(grid, basis):
    """Canonical smooth test state: off-axis, off-origin, sub-Nyquist.

    Fixed physical parameters, resolvable from 48^3 up (two cells per width
    at dx = 1), so two-grid residual ratios probe the same state.
    """
    return beams.gaussian_vortex(
        grid, basis,
        center=(1.45, 0.35, 1.15), widths=0.27, m=0,
        helicity=(1.0, 0.6), r_offset=(0.4, -0.7, 0.2),
    )


def check_algebra(grids=(48, 96), dx=1.0):
    rows = []
    per_grid = {}
    for n in grids:
        grid = make_grid((n, n, n), (dx, dx, dx))
        basis = polarization.build_basis(grid)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            wf = _algebra_state(grid, basis)
            pairs = list(algebra_checks.DEFAULT_SUITE)
            with ThreadPoolExecutor(max_workers=_threads()) as pool:
                reports = list(pool.map(
                    lambda p: algebra_checks.check_commutator(p[0], p[1], wf, boundary="ignore"),
                    pairs))
            reports.append(algebra_checks.check_curvature(wf, boundary="ignore"))
        per_grid[n] = reports

    coarse, fine = grids[0], grids[-1]
    ok = True
    for rc, rf in zip(per_grid[coarse], per_grid[fine]):
        if rc.exact:
            threshold = 1e-12
            passed = rc.residual <= threshold and rf.residual <= threshold
            ratio = None
        else:
            threshold = 3.0
            ratio = rc.residual / rf.residual if rf.residual > 0 else np.inf
            passed = ratio >= threshold
        ok &= passed
        rows.append({
            "relation": rc.pair, "expected": rc.expected,
            "grid_coarse": coarse, "residual_coarse": rc.residual,
            "grid_fine": fine, "residual_fine": rf.residual,
            "ratio": ratio, "exact": rc.exact,
            "threshold": threshold, "pass": bool(passed),
        })
    return {"relations": rows, "grids": list(grids), "pass": bool(ok)}


def check_polarization(n=32, dx=1.0):
    grid = make_grid((n, n, n), (dx, dx, dx))
    basis = polarization.build_basis(grid)
    res = polarization.identity_residuals(grid, basis)
    loop, expected, err = polarization.berry_loop(grid, basis, (0.8, 0.6, 1.1), max(1, round(0.4 / grid.dk[0])))
    identity_tol = 1e-12
    rows = [{"identity": k, "residual": v, "threshold": identity_tol, "pass": v <= identity_tol}
            for k, v in sorted(res.items())]
    # discrete loop error is O(dk^2); allow an order-unity constant
    loop_tol = max(0.08 * abs(expected), 4.0 * grid.dk[0] ** 2)
    rows.append({"identity": "berry_loop_vs_solid_angle", "residual": err,
                 "threshold": loop_tol, "pass": bool(err <= loop_tol)})
    ok = all(r["pass"] for r in rows)
    return {"identities": rows, "berry_loop": {"loop": loop, "expected": expected, "abs_error": err},
            "grid": n, "pass": bool(ok)}


def check_greens(n=64, dx=1.0):
    grid = make_grid((n, n, n), (dx, dx, dx))
    rep = fields_bridge.greens_function_check(grid)
    rep["threshold"] = 0.02
    rep["pass"] = bool(rep["max_rel_mismatch"] <= 0.02)
    return rep


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    text = buf.getvalue()
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def cmd_check(args):
    if args.suite == "algebra":
        grids = tuple(int(v) for v in str(args.grid or "48,96").split(","))
        if len(grids) == 1:
            grids = (grids[0], 2 * grids[0])
        rep = check_algebra(grids, args.dx)
        header = ["relation", "expected", "grid_coarse", "residual_coarse",
                  "grid_fine", "residual_fine", "ratio", "threshold", "pass"]
        rows = [[r["relation"], r["expected"], r["grid_coarse"], f"{r['residual_coarse']:.6e}",
                 r["grid_fine"], f"{r['residual_fine']:.6e}",
                 "" if r["ratio"] is None else f"{r['ratio']:.3f}", r["threshold"], r["pass"]]
                for r in rep["relations"]]
    elif args.suite == "polarization":
        n = int(str(args.grid or "32").split(",")[0])
        rep = check_polarization(n, args.dx)
        header = ["identity", "residual", "threshold", "pass"]
        rows = [[r["identity"], f"{r['residual']:.6e}", f"{r['threshold']:.3e}", r["pass"]]
                for r in rep["identities"]]
    elif args.suite == "greens":
        n = int(str(args.grid or "64").split(",")[0])
        rep = check_greens(n, args.dx)
        header = ["kind", "cells", "r", "value", "reference", "rel_mismatch"]
        rows = [[s["kind"], s["cells"], f"{s['r']:.6g}", f"{s['value']:.8e}",
                 f"{s['reference']:.8e}", f"{s['rel_mismatch']:.4e}"] for s in rep["samples"]]
    else:
        raise ValueError(f"unknown check suite {args.suite!r}")

    text = _write_csv(args.csv, header, rows)
    if args.json:
        print(json.dumps(_jsonable(rep), sort_keys=True, indent=1))
    else:
        print(text, end="")
        print(f"pass: {rep['pass']}")
    return 0 if rep["pass"] else 1


# ---------------------------------------------------------------------------
# plotdata

def cmd_plotdata(args):
    rows = []
    if args.series == "bessel":
        header = ["sigma", "ratio", "analytic", "abs_error"]
        for path in args.files:
            with open(path) as fh:
                rep = json.load(fh)
            prov = rep.get("provenance") or {}
            photon = rep["routes"]["photon"]
            ratio = photon["Jo"][2] / photon["Js"][2]
            analytic = prov.get("ratio_analytic")
            if analytic is None:
                analytic = beams.bessel_ratio_oracle(prov["m"], prov["kz_over_k"], prov["helicity"])
            rows.append([prov.get("sigma_perp"), ratio, analytic, abs(ratio - analytic)])
        rows.sort(key=lambda r: (r[0] is None, r[0]))
    elif args.series == "algebra":
        header = ["dk", "relation", "residual"]
        for path in args.files:
            with open(path) as fh:
                rep = json.load(fh)
            for rel in rep["relations"]:
                for which, grid_key in (("residual_coarse", "grid_coarse"), ("residual_fine", "grid_fine")):
                    dk = 2.0 * np.pi / rel[grid_key]
                    rows.append([dk, rel["relation"], rel[which]])
        rows.sort(key=lambda r: (r[1], -r[0]))
    else:
        raise ValueError(f"unknown plotdata series {args.series!r}")
    text = _write_csv(args.output, header, rows)
    if not args.output:
        print(text, end="")
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser():
    p = argparse.ArgumentParser(prog="photonam", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    beam = sub.add_parser("beam", help="construct a benchmark state and write it to a file")
    beam_sub = beam.add_subparsers(dest="family", required=True)
    for fam in ("bessel", "gaussian"):
        bp = beam_sub.add_parser(fam)
        bp.add_argument("--grid", default="96", help="N or Nx,Ny,Nz")
        bp.add_argument("--dx", type=float, default=1.0)
        bp.add_argument("--chart-axis", default="1,0,0", dest="chart_axis")
        bp.add_argument("--photons", type=float, default=1.0)
        bp.add_argument("--json", action="store_true")
        bp.add_argument("-o", "--output", required=True)
        if fam == "bessel":
            bp.add_argument("--m", type=int, required=True)
            bp.add_argument("--kz-over-k", type=float, default=0.8, dest="kz_over_k")
            bp.add_argument("--helicity", type=lambda s: {"L": 1, "R": -1}.get(s, int(s)), default=1)
            bp.add_argument("--k0", type=float, default=None, help="total wavenumber (default 0.62 Nyquist)")
            bp.add_argument("--sigma-perp", type=float, default=None, dest="sigma_perp",
                            help="regularization width in grid steps (default 3)")
            bp.add_argument("--sigma-z", type=float, default=None, dest="sigma_z")
        else:
            bp.add_argument("--m", type=int, default=0)
            bp.add_argument("--helicity", default="L", dest="helicity_name")
            bp.add_argument("--center", default=None, help="kx,ky,kz (default diagonal at 1/3 Nyquist)")
            bp.add_argument("--sigma", default=None, help="width in grid steps (default 2.5)")
        bp.set_defaults(func=cmd_beam)

    obs = sub.add_parser("observables", help="compute every applicable route and report")
    obs.add_argument("file")
    obs.add_argument("--routes", default=None, help=f"comma list from {ROUTES}")
    obs.add_argument("--chart-axis", default="1,0,0", dest="chart_axis")
    obs.add_argument("--nonlocal-max", type=int, default=24, dest="nonlocal_max")
    obs.add_argument("--json", action="store_true")
    obs.set_defaults(func=cmd_observables)

    spl = sub.add_parser("split", help="orbital/spin split in the photon picture")
    spl.add_argument("file")
    spl.add_argument("--chart-axis", default="1,0,0", dest="chart_axis")
    spl.add_argument("--json", action="store_true")
    spl.set_defaults(func=cmd_split)

    syn = sub.add_parser("synthesize", help="wavefunction file -> rs_field file")
    syn.add_argument("file")
    syn.add_argument("--t", type=float, default=0.0)
    syn.add_argument("--json", action="store_true")
    syn.add_argument("-o", "--output", required=True)
    syn.set_defaults(func=cmd_synthesize)

    ana = sub.add_parser("analyze", help="rs_field file -> wavefunction file")
    ana.add_argument("file")
    ana.add_argument("--chart-axis", default="1,0,0", dest="chart_axis")
    ana.add_argument("--json", action="store_true")
    ana.add_argument("-o", "--output", required=True)
    ana.set_defaults(func=cmd_analyze)

    pot = sub.add_parser("potential", help="rs_field or B file -> transverse-gauge A file")
    pot.add_argument("file")
    pot.add_argument("--json", action="store_true")
    pot.add_argument("-o", "--output", required=True)
    pot.set_defaults(func=cmd_potential)

    chk = sub.add_parser("check", help="residual suites: algebra, polarization, greens")
    chk.add_argument("suite", choices=("algebra", "polarization", "greens"))
    chk.add_argument("--grid", default=None, help="N or N1,N2 (algebra uses two grids)")
    chk.add_argument("--dx", type=float, default=1.0)
    chk.add_argument("--csv", default=None, help="also write the table to this CSV file")
    chk.add_argument("--json", action="store_true")
    chk.set_defaults(func=cmd_check)

    plo = sub.add_parser("plotdata", help="tidy CSV series from report JSON files")
    plo.add_argument("series", choices=("bessel", "algebra"))
    plo.add_argument("files", nargs="*")
    plo.add_argument("-o", "--output", default=None)
    plo.set_defaults(func=cmd_plotdata)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
