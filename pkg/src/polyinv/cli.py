"""Command-line front end.

Exit codes: 0 success, 2 usage, 3 unreadable or mismatched input,
4 numerically degenerate input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import CatalogConfig, FeatureVector, check_compatible, distance, feature_vector
from .contraction import canonicalize, enumerate_graphs, evaluate_graph, parse_graph_file, parse_vertices
from .errors import InputError, NumericalError
from .fitting import (
    FitConfig,
    Molecule,
    basis_exponents,
    fit,
    fit_spherical,
    normalize,
    read_points_csv,
    read_xyz,
    write_points_csv,
    write_xyz,
)
from .tensor_poly import OrthogonalMatrix, apply_rotation, from_dict, random_orthogonal, to_dict

EXIT_USAGE, EXIT_INPUT, EXIT_NUMERICAL = 2, 3, 4
RADIAL_FLAGS = {"none": "none", "gauss": "gaussian", "exp": "exponential"}


def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def dump_json(obj) -> str:
    # float repr is the shortest string that round-trips exactly
    return json.dumps(obj, indent=1) + "\n"


def load_json(path: str):
    try:
        return json.loads(read_text(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg})", exc.lineno) from None


def manifest(command: str, inputs, config: dict, started: float) -> dict:
    return {
        "command": command,
        "inputs": list(inputs),
        "config": config,
        "version": __version__,
        "wall_time": round(time.perf_counter() - started, 6),
    }


def detect_format(path: str, forced: str | None) -> str:
    if forced:
        return forced
    suffix = Path(path).suffix.lower()
    return {".xyz": "xyz", ".json": "json"}.get(suffix, "csv")


def load_polynomial_doc(path: str):
    doc = load_json(path)
    body = doc.get("polynomial", doc) if isinstance(doc, dict) else doc
    try:
        poly = from_dict(body)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    return poly, doc if isinstance(doc, dict) else {}


# -- commands ------------------------------------------------------------------

def cmd_fit(args) -> int:
    started = time.perf_counter()
    fmt = detect_format(args.input, args.format)
    text = read_text(args.input)
    if fmt == "xyz":
        cloud = read_xyz(text).cloud(args.value_source)
        scale = args.scale or "none"
    elif fmt == "csv":
        cloud, _ = read_points_csv(text, args.dim)
        scale = args.scale or "unit"
    else:
        raise InputError(f"fit reads CSV or XYZ input, got {fmt}")

    cloud, record = normalize(cloud, scale)
    if args.spherical:
        poly, diag = fit_spherical(cloud, args.degree, ridge=args.ridge, texture=args.texture)
    else:
        cfg = FitConfig(args.degree, ridge=args.ridge, radial_weight=RADIAL_FLAGS[args.radial])
        poly, diag = fit(cloud, cfg)

    config = {
        "degree": args.degree,
        "ridge": diag.ridge,
        "radial": args.radial,
        "spherical": args.spherical,
        "texture": args.texture,
        "scale": scale,
        "value_source": args.value_source,
    }
    doc = {
        "polynomial": to_dict(poly),
        "diagnostics": diag.to_dict(),
        "normalization": record.to_dict(),
        "manifest": manifest("fit", [args.input], config, started),
    }
    write_text(args.output, dump_json(doc))
    print(f"rank {diag.rank}, residual {diag.residual:.3e}, condition {diag.condition:.3e}", file=sys.stderr)
    terms = len(basis_exponents(cloud.n, FitConfig(args.degree, spherical=args.spherical)))
    if len(cloud.points) < terms:
        print(f"warning: {len(cloud.points)} points for {terms} basis terms; the fit is underdetermined",
              file=sys.stderr)
    return 0


def cmd_features(args) -> int:
    started = time.perf_counter()
    poly, doc = load_polynomial_doc(args.input)
    graphs = ()
    if args.graphs:
        graphs = tuple(parse_graph_file(read_text(args.graphs)))
    cfg = CatalogConfig(
        max_trace_power=args.max_trace_power,
        include_mixed=args.mixed,
        insertions=args.insertions,
        extra_graphs=graphs,
        normalize_by_order=args.normalize_order,
    )
    fv = feature_vector(poly, cfg, normalization=doc.get("normalization"))
    out = fv.to_dict()
    inputs = [args.input] + ([args.graphs] if args.graphs else [])
    out["manifest"] = manifest("features", inputs, cfg.to_dict(), started)
    write_text(args.output, dump_json(out))
    return 0


def cmd_compare(args) -> int:
    a = FeatureVector.from_dict(load_json(args.a))
    b = FeatureVector.from_dict(load_json(args.b))
    check_compatible(a, b)
    weights = None
    if args.weights:
        weights = [float(tok) for tok in read_text(args.weights).split()]
    d = distance(a, b, weights)
    diffs = sorted(zip(a.names, np.abs(a.values - b.values)), key=lambda t: (-t[1], t[0]))
    lines = [f"distance {d:.17g}"] + [f"{name}\t{diff:.17g}" for name, diff in diffs]
    write_text(args.output, "\n".join(lines) + "\n")
    return 0


def _read_matrix(path: str) -> np.ndarray:
    text = read_text(path)
    try:
        rows = json.loads(text)
    except json.JSONDecodeError:
        try:
            rows = [[float(t) for t in line.split()] for line in text.splitlines() if line.strip()]
        except ValueError:
            raise InputError(f"{path}: matrix must be JSON or whitespace-separated numbers") from None
    m = np.array(rows, dtype=float)
    if m.ndim != 2:
        raise InputError(f"{path}: matrix rows have unequal length")
    return m


def rotation_from_args(args, n: int) -> OrthogonalMatrix:
    if args.matrix:
        m = _read_matrix(args.matrix)
        if m.shape != (n, n):
            raise InputError(f"matrix is {m.shape[0]}x{m.shape[1]}, input has dimension {n}")
        try:
            return OrthogonalMatrix(m)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    return random_orthogonal(n, np.random.default_rng(args.seed))


def cmd_rotate(args) -> int:
    started = time.perf_counter()
    fmt = detect_format(args.input, args.format)
    text = read_text(args.input)
    config = {"seed": args.seed, "matrix_file": args.matrix}

    def man(o):
        return manifest("rotate", [args.input], {**config, "matrix": o.entries.tolist()}, started)

    if fmt == "json":
        poly, _ = load_polynomial_doc(args.input)
        o = rotation_from_args(args, poly.n)
        # rotating the shape by O maps p to p(O^T x), matching the point case
        rotated = apply_rotation(poly, o.T)
        out = dump_json({"polynomial": to_dict(rotated), "manifest": man(o)})
    elif fmt == "xyz":
        mol = read_xyz(text)
        o = rotation_from_args(args, 3)
        moved = Molecule(mol.elements, mol.coords @ o.entries.T, mol.comment)
        out = write_xyz(moved, comment=json.dumps(man(o)))
    else:
        cloud, dim = read_points_csv(text, args.dim)
        o = rotation_from_args(args, dim)
        out = write_points_csv(cloud.transformed(o.entries), header=[json.dumps(man(o))])
    write_text(args.output, out)
    return 0


def cmd_graphs(args) -> int:
    spec = parse_vertices(args.spec)
    graphs = enumerate_graphs(spec, max_vertices=args.max_vertices, connected=not args.all)
    poly = None
    if args.evaluate:
        poly, _ = load_polynomial_doc(args.evaluate)
    lines = [f"# {len(graphs)} graphs for {args.spec}"]
    for g in graphs:
        line = canonicalize(g).to_spec()
        if poly is not None:
            line += f"  # {evaluate_graph(g, poly):.17g}"
        lines.append(line)
    write_text(args.output, "\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyinv", description="Polynomial rotation invariants.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a polynomial to a point CSV or XYZ molecule")
    p.add_argument("input")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--ridge", type=float, default=None, help="ridge weight c (default: 1e-8 x mean normal diagonal)")
    p.add_argument("--radial", choices=sorted(RADIAL_FLAGS), default="none")
    p.add_argument("--spherical", action="store_true", help="fit the envelope |x| over directions")
    p.add_argument("--texture", action="store_true", help="with --spherical, fit the point values instead of |x|")
    p.add_argument("--scale", choices=["none", "unit"], default=None,
                   help="scale normalization (default: unit for CSV, none for XYZ)")
    p.add_argument("--value-source", choices=["one", "mass"], default="mass")
    p.add_argument("--dim", type=int, default=None, help="coordinate count of CSV rows")
    p.add_argument("--format", choices=["csv", "xyz"], default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("features", help="compute the invariant feature vector of a polynomial")
    p.add_argument("input")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--mixed", action="store_true")
    p.add_argument("--insertions", type=int, default=0)
    p.add_argument("--graphs", default=None, help="file with one graph spec per line")
    p.add_argument("--normalize-order", action="store_true")
    p.add_argument("--max-trace-power", type=int, default=None)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("compare", help="distance between two feature files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--weights", default=None, help="file of per-feature positive weights")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("rotate", help="apply an orthogonal map to points, a molecule or a polynomial")
    p.add_argument("input")
    p.add_argument("-o", "--output", default="-")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--seed", type=int, help="seed for a Haar-random orthogonal matrix")
    src.add_argument("--matrix", help="JSON or whitespace matrix file")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--format", choices=["csv", "xyz", "json"], default=None)
    p.set_defaults(func=cmd_rotate)

    p = sub.add_parser("graphs", help="enumerate contraction graphs on given vertices")
    p.add_argument("spec", help="vertices as deg:poly,deg:poly,...")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--max-vertices", type=int, default=8)
    p.add_argument("--evaluate", default=None, help="polynomial JSON to evaluate each graph on")
    p.add_argument("--all", action="store_true", help="include disconnected graphs")
    p.set_defaults(func=cmd_graphs)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"polyinv {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, ValueError) as exc:
        print(f"polyinv {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
