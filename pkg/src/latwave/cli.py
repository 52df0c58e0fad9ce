"""Command-line front end.

Subcommands expose the library operations with file-based inputs/outputs:

    surface      mesh of a dispersion level surface (CSV, SVG for d<=3)
    green        boundary values / off-spectrum resolvent values (CSV/JSON)
    farfield     computed vs stationary-phase far field along a ray (CSV)
    scatter      perturbed solutions (lap + q - lam) psi = f (CSV/JSON)
    s0           the exceptional spectral set for a dimension (JSON)
    boundstates  eigenvalues outside the band (JSON)
    selftest     quick internal cross-checks, nonzero exit on failure

Exit codes: 0 success, 2 bad input, 3 domain error (exceptional lambda,
off-surface parameters), 4 numerical failure.  Errors print one line
`error: <reason>` on stderr.  Outputs are deterministic for a fixed
configuration.  Potentials and sources accept either a JSON file path, the
literal `delta`, or the shorthand `value@site,site;value@site,site`, e.g.
`-3@0,0`.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .dispersion import (
    cube_start,
    exceptional_set,
    level_polylines,
    mesh_to_csv,
    polylines_to_svg,
    surface_mesh,
)
from .farfield import build_expansion, asymptotic_eval, ray_sites, write_comparison_csv
from .lattice import CompactLatticeFunction, delta, green_identity_residual
from .resolvent import (
    BoundaryValue,
    EtaOnSpectrumError,
    ExceptionalPointError,
    LadderDivergenceError,
    QuadratureConfig,
    eta_extrapolate,
    lap_apply,
    lap_apply_window,
    resolvent_offspectrum,
)
from .scattering import NearSingularSystemError, bound_state_scan, solve_scattering


class CliError(Exception):
    def __init__(self, msg, code=2):
        super().__init__(msg)
        self.code = code


def parse_lattice_function(text: str, d: int) -> CompactLatticeFunction:
    """`delta`, shorthand `value@coords[;...]`, or a JSON file path."""
    if text == "delta":
        return delta(d)
    if "@" in text:
        entries = {}
        for term in text.split(";"):
            term = term.strip()
            if not term:
                continue
            try:
                val_s, site_s = term.split("@")
                site = tuple(int(c) for c in site_s.replace(",", " ").split())
                val = complex(val_s)
            except ValueError as exc:
                raise CliError(f"cannot parse potential term {term!r}: {exc}") from exc
            if len(site) != d:
                raise CliError(f"site {site} does not have dimension {d}")
            if site in entries:
                raise CliError(f"duplicate site {site} in shorthand")
            entries[site] = val
        return CompactLatticeFunction(d, entries)
    try:
        with open(text) as fh:
            return CompactLatticeFunction.from_json(fh.read())
    except OSError as exc:
        raise CliError(f"cannot read lattice function file {text!r}: {exc}") from exc
    except ValueError as exc:
        raise CliError(f"bad lattice function file {text!r}: {exc}") from exc


def _load_config(path: str | None) -> QuadratureConfig:
    if not path:
        return QuadratureConfig()
    try:
        with open(path) as fh:
            return QuadratureConfig.from_json_dict(json.load(fh))
    except OSError as exc:
        raise CliError(f"cannot read config {path!r}: {exc}") from exc
    except (ValueError, TypeError) as exc:
        raise CliError(f"bad config {path!r}: {exc}") from exc


def _side(name: str) -> int:
    return +1 if name == "plus" else -1


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows_csv(rows, header) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{x:.12g}" if isinstance(x, float) else str(x) for x in row))
    return "\n".join(lines) + "\n"


def _value_rows(results):
    return [
        (" ".join(str(c) for c in rv.site), float(rv.value.real), float(rv.value.imag),
         float(rv.error_estimate))
        for rv in results
    ]


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def cmd_surface(args) -> int:
    d, lam = args.d, args.lam
    if abs(lam) > 2 * d:
        raise CliError(f"|lambda| = {abs(lam)} exceeds 2d = {2 * d}: empty level set", 3)
    mesh = surface_mesh(lam, d, args.resolution)
    out = args.out or f"surface_d{d}_lam{lam:g}"
    mesh_to_csv(mesh, out + ".csv")
    written = [out + ".csv"]
    if args.format == "svg" or args.svg:
        start = cube_start(lam)
        box = (start, start + 2 * np.pi)
        if d == 2:
            lines = level_polylines(lam, 0.0, lam, n=args.resolution)
            polylines_to_svg(lines, out + ".svg", box)
            written.append(out + ".svg")
        elif d == 3:
            slices = np.linspace(box[0], box[1], 7)[1:-1]
            lines = []
            for c in slices:
                lines.extend(level_polylines(lam, 2 * float(np.cos(c)), lam, n=args.resolution))
            polylines_to_svg(lines, out + ".svg", box)
            written.append(out + ".svg")
        else:
            raise CliError("SVG export requires d in {2, 3}", 2)
    sys.stderr.write(f"wrote {', '.join(written)}\n")
    return 0


def _parse_sites(args, d):
    if args.xi:
        vals = [int(v) for v in args.xi]
        if len(vals) % d:
            raise CliError(f"--xi expects groups of {d} integers")
        return [tuple(vals[i : i + d]) for i in range(0, len(vals), d)]
    raise CliError("--xi is required")


def cmd_green(args) -> int:
    d = args.d
    f = parse_lattice_function(args.f, d)
    cfg = _load_config(args.config)
    sites = _parse_sites(args, d)
    results = []
    if args.eta is not None:
        eta = complex(args.eta)
        for s in sites:
            results.append(resolvent_offspectrum(f, eta, s, cfg))
    else:
        bv = BoundaryValue(args.lam, _side(args.side))
        if args.oracle:
            for s in sites:
                results.append(eta_extrapolate(f, args.lam, _side(args.side), s, cfg))
        else:
            vals, est = lap_apply_window(f, bv, sites, cfg)
            from .resolvent import ResolventValue

            results = [ResolventValue(s, vals[s], est) for s in sites]
    rows = _value_rows(results)
    if args.format == "json":
        payload = [
            {"xi": r[0].split(), "re": r[1], "im": r[2], "error_estimate": r[3]}
            for r in rows
        ]
        _emit(json.dumps(payload, indent=1) + "\n", args.out)
    else:
        _emit(_rows_csv(rows, ["xi", "re", "im", "error_estimate"]), args.out)
    return 0


def cmd_farfield(args) -> int:
    d = args.d
    f = parse_lattice_function(args.f, d)
    cfg = _load_config(args.config)
    omega = np.asarray([float(x) for x in args.omega], dtype=float)
    if omega.size != d:
        raise CliError(f"--omega expects {d} components")
    omega = omega / np.linalg.norm(omega)
    side = _side(args.side)
    bv = BoundaryValue(args.lam, side)
    exp = build_expansion(f, omega, args.lam, side)
    radii = list(range(args.rmin, args.rmax + 1, args.rstep))
    sites = ray_sites(omega, radii)
    vals, _ = lap_apply_window(f, bv, sites, cfg)
    entries = []
    for s in sites:
        try:
            pred = asymptotic_eval(exp, s)
        except Exception:
            continue
        entries.append((s, vals[s], pred, d))
    out = args.out or "farfield.csv"
    write_comparison_csv(out, entries)
    sys.stderr.write(f"wrote {out}\n")
    return 0


def cmd_scatter(args) -> int:
    d = args.d
    f = parse_lattice_function(args.f, d)
    q = parse_lattice_function(args.q, d)
    cfg = _load_config(args.config)
    sites = _parse_sites(args, d)
    bv = BoundaryValue(args.lam, _side(args.side))
    results = [solve_scattering(f, q, bv, s, cfg) for s in sites]
    rows = _value_rows(results)
    if args.format == "json":
        payload = [
            {"xi": r[0].split(), "re": r[1], "im": r[2], "error_estimate": r[3]}
            for r in rows
        ]
        _emit(json.dumps(payload, indent=1) + "\n", args.out)
    else:
        _emit(_rows_csv(rows, ["xi", "re", "im", "error_estimate"]), args.out)
    return 0


def cmd_s0(args) -> int:
    vals = exceptional_set(args.d)
    _emit(json.dumps({"d": args.d, "S0": vals}) + "\n", args.out)
    return 0


def cmd_boundstates(args) -> int:
    d = args.d
    q = parse_lattice_function(args.q, d)
    cfg = _load_config(args.config)
    rep = bound_state_scan(q, d, cfg, scan_window=args.window, grid_points=args.grid)
    _emit(rep.to_json() + "\n", args.out)
    return 0


def cmd_selftest(args) -> int:
    from .lattice import apply_laplacian, box_sites

    failures = []

    def check(name, ok):
        sys.stderr.write(f"selftest {name}: {'ok' if ok else 'FAIL'}\n")
        if not ok:
            failures.append(name)

    rng = np.random.default_rng(7)
    f = CompactLatticeFunction(
        2, {(i, j): complex(*rng.standard_normal(2)) for i in (-1, 0, 1) for j in (-1, 0, 1)}
    )
    g = CompactLatticeFunction(
        2, {(i, j): complex(*rng.standard_normal(2)) for i in (-1, 0, 1) for j in (-1, 0, 1)}
    )
    check("green-identity", abs(green_identity_residual(f, g, 4)) < 1e-12)

    lam = np.sqrt(2.0)
    z = np.exp(-1j * np.pi / 4)
    target = z / (-1j * np.sqrt(2.0))
    got = lap_apply(delta(1), BoundaryValue.plus(lam), (1,),
                    QuadratureConfig(torus_order=2048, rho_order=32)).value
    check("d1-closed-form", abs(got - target) < 1e-6)

    v1 = lap_apply(delta(2), BoundaryValue.plus(3.0), (3, 0),
                   QuadratureConfig(torus_order=512, surface_resolution=512)).value
    v2 = eta_extrapolate(delta(2), 3.0, +1, (3, 0), QuadratureConfig(torus_order=256)).value
    check("lap-vs-ladder", abs(v1 - v2) < 5e-4)

    if failures:
        raise CliError("selftest failed: " + ", ".join(failures), 4)
    sys.stderr.write("selftest passed\n")
    return 0


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latwave", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"latwave {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, lam=True):
        sp.add_argument("--d", type=int, required=True, help="lattice dimension")
        if lam:
            sp.add_argument("--lambda", dest="lam", type=float, required=True)
            sp.add_argument("--side", choices=["plus", "minus"], default="plus")
        sp.add_argument("--config", help="JSON quadrature config")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=["csv", "json", "svg"], default="csv")

    sp = sub.add_parser("surface", help="level-surface mesh and figures")
    common(sp)
    sp.add_argument("--resolution", type=int, default=512)
    sp.add_argument("--svg", action="store_true", help="also write an SVG rendering")
    sp.set_defaults(func=cmd_surface)

    sp = sub.add_parser("green", help="resolvent / boundary values")
    common(sp)
    sp.add_argument("--f", default="delta", help="source (delta, shorthand, or JSON path)")
    sp.add_argument("--xi", nargs="+", help="site(s), d integers each")
    sp.add_argument("--eta", help="complex eta off the spectrum (overrides lambda)")
    sp.add_argument("--oracle", action="store_true",
                    help="use the eps-ladder limit instead of the direct boundary value")
    sp.set_defaults(func=cmd_green)

    sp = sub.add_parser("farfield", help="far-field comparison along a ray")
    common(sp)
    sp.add_argument("--f", default="delta")
    sp.add_argument("--omega", nargs="+", required=True, help="ray direction components")
    sp.add_argument("--rmin", type=int, default=10)
    sp.add_argument("--rmax", type=int, default=40)
    sp.add_argument("--rstep", type=int, default=2)
    sp.set_defaults(func=cmd_farfield)

    sp = sub.add_parser("scatter", help="perturbed problem via finite-rank reduction")
    common(sp)
    sp.add_argument("--f", default="delta")
    sp.add_argument("--q", required=True, help="potential (shorthand or JSON path)")
    sp.add_argument("--xi", nargs="+", help="site(s), d integers each")
    sp.set_defaults(func=cmd_scatter)

    sp = sub.add_parser("s0", help="exceptional spectral set")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_s0)

    sp = sub.add_parser("boundstates", help="eigenvalues outside the band")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--q", required=True)
    sp.add_argument("--config")
    sp.add_argument("--out")
    sp.add_argument("--window", type=float, default=None)
    sp.add_argument("--grid", type=int, default=400)
    sp.set_defaults(func=cmd_boundstates)

    sp = sub.add_parser("selftest", help="quick internal cross-checks")
    sp.set_defaults(func=cmd_selftest)
    return p


_DOMAIN_ERRORS = (ExceptionalPointError, EtaOnSpectrumError)
_NUMERICAL_ERRORS = (LadderDivergenceError, NearSingularSystemError)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except _DOMAIN_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except _NUMERICAL_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 4
    except (ValueError, IndexError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
