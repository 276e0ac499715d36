"""Command-line front end.

    geosubdiv subdivide --scheme lane-riesenfeld-cubic --input poly.csv --output out/ --iterations 5
    geosubdiv certify --spec four-point
    geosubdiv validate --seed 0 --output report.json
    geosubdiv render --input poly.csv --output poly.svg --iterations 5
    geosubdiv schemes

Exit status is 0 on success (or a Certified result), 1 when a gate,
certificate or validation check fails, and 2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from . import certify as cert_mod
from . import validation
from .errors import ContractViolation, GateViolation, GeoSubdivError, UnknownScheme
from .frechet import Method, SolverSettings
from .pointio import load_points, save_points
from .render import DEFAULT_VIEW, render_svg
from .schemes import BUILTIN_NAMES, Mask, builtin_mask, iterate

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from exc


def _emit_json(obj: dict, output) -> None:
    text = json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"
    if output:
        _write(output, text)


def resolve_mask(scheme: str) -> tuple[Mask, float | None]:
    """A built-in name or a mask JSON file; built-ins also return their certified radius."""
    path = Path(scheme)
    if scheme.endswith(".json") or path.is_file():
        return Mask.from_json(_read_json(path)), None
    mask = builtin_mask(scheme)
    spec_name = "four-point" if scheme.startswith("four-point") else scheme
    if spec_name == "four-point" and mask.name != "four-point(1/16)":
        return mask, None
    return mask, cert_mod.convergence_radius(spec_name)


def _settings(args) -> SolverSettings:
    return SolverSettings(args.tolerance, args.max_iterations, Method(args.method))


def _load(path, periodic):
    try:
        seq, renormalized = load_points(path, periodic)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except (ContractViolation, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from exc
    if renormalized:
        print(f"note: renormalized rows of {path} that were within 1e-6 of unit length", file=sys.stderr)
    return seq


def cmd_subdivide(args) -> int:
    if args.iterations < 1:
        raise UsageError("--iterations must be at least 1")
    mask, radius = resolve_mask(args.scheme)
    data = _load(args.input, args.periodic)
    gate = None if args.no_gate else radius
    try:
        levels = iterate(mask, data, args.iterations, _settings(args), max_delta=gate)
    except GateViolation as exc:
        print(f"gate violation: {exc}", file=sys.stderr)
        if exc.index is not None:
            print(f"  offending output index: {exc.index}", file=sys.stderr)
        print("  hint: refine or resample the input until its largest consecutive distance is below the certified r0", file=sys.stderr)
        return EXIT_FAIL

    out = Path(args.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {out}: {exc.strerror}") from exc
    ext = args.format
    save_points(data, out / f"level_0.{ext}")
    rows = []
    for k, (seq, diag) in enumerate(levels, start=1):
        save_points(seq, out / f"level_{k}.{ext}")
        rows.append({"level": k, "points": len(seq), **diag.to_json()})
    report = {
        "schema_version": 1,
        "scheme": mask.name,
        "iterations": args.iterations,
        "gate_radius": gate,
        "initial_delta": data.delta,
        "levels": rows,
    }
    _emit_json(report, out / "diagnostics.json")
    print(f"{mask.name}: {len(data)} -> {len(levels[-1][0])} points, initial delta {data.delta:.6g}")
    for row in rows:
        ratio = row["contraction_ratio"]
        print(f"  level {row['level']}: delta {row['delta_after']:.6g}  ratio {ratio:.4f}  displacement {row['displacement']:.3g}")
    return EXIT_OK


def _load_spec(args) -> dict:
    name = args.spec or args.scheme
    if name is None:
        raise UsageError("certify needs --spec (built-in name or JSON file)")
    if name.endswith(".json") or Path(name).is_file():
        spec = _read_json(name)
    else:
        spec = dict(cert_mod.builtin_spec(name))
    if args.grid_step is not None:
        spec["grid_step"] = args.grid_step
    return spec


def cmd_certify(args) -> int:
    cert = cert_mod.certify_spec(_load_spec(args))
    _emit_json(cert.to_json(), args.output)
    print(f"{cert.scheme}: {cert.status}")
    print(f"  r0 = {cert.r0:g}  C0 = {cert.C0:g}  C1 = {cert.C1:.6f}  initial speed = {cert.initial_speed_coeff:.6f}")
    if math.isfinite(cert.mu):
        print(f"  mu = {cert.mu:.6f}  displacement coefficient = {cert.displacement_coeff:.6f}")
    print(f"  well-definedness radius = {cert.well_defined_radius:.6f} (reported {cert.reported_radius:.2f})")
    for reason in cert.reasons:
        print(f"  failed: {reason}")
    return EXIT_OK if cert.certified else EXIT_FAIL


def cmd_validate(args) -> int:
    report = validation.run_suite(seed=args.seed, quick=args.quick)
    _emit_json(report, args.output)
    for c in report["checks"]:
        mark = "ok  " if c["passed"] else "FAIL"
        print(f"{mark} {c['name']}: {c['value']:.3g} (tolerance {c['tolerance']:.3g})")
    print(f"seed {report['seed']}: {'passed' if report['passed'] else 'FAILED'}")
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _parse_view(text: str):
    try:
        view = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--view expects three comma-separated numbers, got {text!r}") from exc
    if len(view) != 3 or not any(view):
        raise UsageError(f"--view expects a nonzero 3-vector, got {text!r}")
    return view


def cmd_render(args) -> int:
    if args.iterations < 0:
        raise UsageError("--iterations must be nonnegative")
    data = _load(args.input, args.periodic)
    view = _parse_view(args.view)
    refined = None
    if args.iterations:
        mask, _ = resolve_mask(args.scheme)
        refined = iterate(mask, data, args.iterations, _settings(args))[-1][0]
    _write(args.output, render_svg(data, refined, view))
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_schemes(args) -> int:
    for name in BUILTIN_NAMES:
        mask = builtin_mask(name)
        coeffs = ", ".join(f"{k}: {v}" for k, v in sorted(mask.coefficients.items()))
        print(f"{mask.name}\n  mask {{{coeffs}}}\n  certified radius {cert_mod.convergence_radius(name):g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geosubdiv", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--method", choices=[m.value for m in Method], default=Method.FIXED_POINT.value)
    solver.add_argument("--tolerance", type=float, default=1e-12, help="gradient norm tolerance of the mean solver")
    solver.add_argument("--max-iterations", type=int, default=100, help="iteration cap of the mean solver")

    boundary = argparse.ArgumentParser(add_help=False)
    group = boundary.add_mutually_exclusive_group()
    group.add_argument("--closed", dest="periodic", action="store_const", const=True, help="treat input as a closed polygon")
    group.add_argument("--open", dest="periodic", action="store_const", const=False, help="treat input as an open polyline")

    p = sub.add_parser("subdivide", parents=[solver, boundary], help="refine a point sequence")
    p.add_argument("--scheme", default="lane-riesenfeld-cubic", help="built-in name or mask JSON file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="directory for level files and diagnostics.json")
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--no-gate", action="store_true", help="skip the certified-radius gate (well-definedness is still checked)")
    p.set_defaults(func=cmd_subdivide)

    p = sub.add_parser("certify", help="check the convergence certificate of a scheme")
    p.add_argument("--spec", help="built-in name or certificate spec JSON")
    p.add_argument("--scheme", help="built-in name (same as --spec)")
    p.add_argument("--grid-step", type=float, help="t-grid step for the monotonicity checks")
    p.add_argument("--output", help="write the certificate JSON here")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("validate", help="run the seeded numerical oracle suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quick", action="store_true", help="smaller sample counts")
    p.add_argument("--output", help="write the JSON report here")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("render", parents=[solver, boundary], help="orthographic SVG of a curve on S^2")
    p.add_argument("--scheme", default="lane-riesenfeld-cubic")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--iterations", type=int, default=0, help="refinement levels to overlay (0 draws the polygon only)")
    p.add_argument("--view", default=",".join(f"{v:g}" for v in DEFAULT_VIEW), help="view direction, e.g. 1,1,1")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("schemes", help="list built-in schemes")
    p.set_defaults(func=cmd_schemes)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, UnknownScheme) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GeoSubdivError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
