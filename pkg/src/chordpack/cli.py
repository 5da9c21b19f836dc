"""Command-line front end: tables of volumes, code reports and bounds.

Subcommands::

    chordpack volume     ball volumes over a radius sweep, all models
    chordpack verify     analyze a catalog code or a code JSON file
    chordpack bounds     distance bounds over a sweep of code sizes N
    chordpack midpoints  mid-distances of random pairs against their bounds
    chordpack catalog    list catalog codes or export one as JSON

Floats are written with ``repr`` so identical inputs give byte-identical
files. Failures exit with status 2 and a single ``error:`` line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings

import numpy as np

from . import catalog, packing, volumes
from .manifolds import Kind, ManifoldDescriptor, pair_distances, pair_mid_distances, sample_uniform_batch
from .volumes import ModelKind, ValidityWarning, VolumeModel

MODEL_CHOICES = [m.value for m in ModelKind]


class CliError(Exception):
    """Invalid flag combination or failed command."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


# -- helpers -------------------------------------------------------------------


def _descriptor(args) -> ManifoldDescriptor:
    if args.n is None:
        raise CliError("--n is required")
    kind = Kind(args.kind)
    if kind is Kind.UNITARY:
        if args.p not in (None, args.n):
            raise CliError("--p must be omitted or equal --n for the unitary group")
        return ManifoldDescriptor.unitary(args.n)
    if args.p is None:
        raise CliError(f"--p is required for --kind {kind.value}")
    return ManifoldDescriptor(kind, args.n, args.p)


def default_model(desc: ManifoldDescriptor, r: float | None = None, samples: int = 100_000, seed: int = 0) -> VolumeModel:
    """Exact caps for ``p = 1``, small balls for Grassmann radii below 1,
    the Gaussian approximation otherwise."""
    if desc.p == 1:
        return VolumeModel.exact_cap()
    if desc.kind is Kind.GRASSMANN and (r is None or r < 1.0):
        return VolumeModel.small_ball()
    return VolumeModel.gaussian()


def _model(args, desc: ManifoldDescriptor, r: float | None = None) -> VolumeModel:
    if args.model is None:
        return default_model(desc, r)
    if args.model == ModelKind.MONTE_CARLO.value:
        return VolumeModel.monte_carlo(args.samples, args.seed)
    return VolumeModel(ModelKind(args.model))


def _threads(args) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise CliError("--threads must be >= 1")
        return args.threads
    env = os.environ.get("MPL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise CliError(f"MPL_THREADS must be an integer (got {env!r})") from None
    return 1


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _table(header_lines: list[str], columns: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "json":
        recs = [{c: (None if v is None else (float(v) if isinstance(v, np.floating) else v)) for c, v in zip(columns, row)} for row in rows]
        return json.dumps({"columns": columns, "rows": recs}, indent=2) + "\n"
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _radii(args, desc: ManifoldDescriptor) -> list[float]:
    if args.r is not None:
        if any(v is not None for v in (args.r_min, args.r_max)) or args.r_sweep:
            raise CliError("--r cannot be combined with a radius sweep")
        return [args.r]
    r_min = 0.0 if args.r_min is None else args.r_min
    r_max = 2.0 * desc.radius if args.r_max is None else args.r_max
    if not 0.0 <= r_min <= r_max:
        raise CliError("radius sweep needs 0 <= --r-min <= --r-max")
    if args.steps < 2:
        raise CliError("--steps must be >= 2")
    return [float(v) for v in np.linspace(r_min, r_max, args.steps)]


# -- subcommands -------------------------------------------------------------------


def cmd_volume(args) -> str:
    desc = _descriptor(args)
    radii = _radii(args, desc)
    threads = _threads(args)
    two_r = 2.0 * desc.radius
    for r in radii:
        if r > two_r * (1 + 1e-12):
            raise CliError(f"radius {r} exceeds the maximal distance {two_r} on {desc}")
    models = [ModelKind(args.model)] if args.model else list(ModelKind)
    columns = ["r"]
    for m in models:
        columns.append(m.value.replace("-", "_"))
        if m is ModelKind.MONTE_CARLO:
            columns.append("monte_carlo_stderr")
    rows = []
    for r in radii:
        row = [r]
        for m in models:
            if m is ModelKind.MONTE_CARLO:
                mu, se = volumes.ball_volume_mc(desc, r, args.samples, args.seed, threads)
                row += [mu, se]
            else:
                row.append(volumes.ball_volume(desc, r, VolumeModel(m)))
        rows.append(row)
    mv = volumes.manifold_volume(desc)
    header = [
        f"normalized ball volume mu(B(r)) on {desc}",
        f"manifold volume log={mv.log_value!r} value={mv.value!r}",
        f"small-ball coefficient c={volumes.small_ball_coeff(desc)!r}, dim={desc.dim}",
        f"embedding sphere D={desc.embed_dim}, R={desc.radius!r}",
        "exact_cap: regularized incomplete beta cap area; small_ball: min(1, c r^dim);"
        " gaussian: erf approximation of the cap",
        f"monte_carlo: Haar samples={args.samples}, seed={args.seed}, center I_(n,p)",
    ]
    return _table(header, columns, rows, args.format)


def _load_code(args) -> tuple[packing.Code, catalog.CatalogEntry | None]:
    if (args.name is None) == (args.code is None):
        raise CliError("verify needs exactly one of --name or --code")
    if args.name is not None:
        try:
            entry = catalog.get_entry(args.name)
        except KeyError as exc:
            raise CliError(exc.args[0]) from None
        return entry.build(), entry
    if args.expect:
        raise CliError("--expect needs a catalog code (--name)")
    try:
        with open(args.code, encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read code file {args.code}: {exc}") from None
    return packing.Code.from_json(obj, name=os.path.basename(args.code)), None


def cmd_verify(args) -> tuple[str, int]:
    code, entry = _load_code(args)
    desc = code.descriptor
    model = _model(args, desc, packing.kissing_radius(code))
    report = packing.analyze(code, model)
    status = 0
    if args.format == "csv":
        text = report.to_csv()
    else:
        text = report.to_json() + "\n"
    if args.expect:
        lines = []
        for key, actual, exp, ok in entry.compare(report):
            lines.append(f"{'PASS' if ok else 'FAIL'} {key}: actual={actual!r} expected={exp.value!r} tol={exp.tol!r}")
            if not ok:
                status = 1
        sys.stderr.write("\n".join(lines) + "\n")
    return text, status


def _n_values(args) -> list[int]:
    lo, hi = args.n_min, args.n_max
    if lo < 2 or hi < lo:
        raise CliError("N sweep needs 2 <= --n-min <= --n-max")
    if args.log_steps:
        vals = np.unique(np.round(np.geomspace(lo, hi, args.log_steps)).astype(int))
        return [int(v) for v in vals]
    if hi - lo > 100_000:
        raise CliError("linear N sweep limited to 100000 values; use --log-steps")
    return list(range(lo, hi + 1))


def cmd_bounds(args) -> str:
    desc = _descriptor(args)
    model = _model(args, desc)
    grass = desc.kind is Kind.GRASSMANN
    rows = []
    for N in _n_values(args):
        simplex, orthoplex = packing.rankin_bounds(desc.embed_dim, desc.radius, N)
        rows.append(
            [
                N,
                math.log2(N) / desc.dim,
                volumes.ideal_radius_rN(desc, N, model),
                packing.dist_bound_hamming(desc, N, model),
                packing.dist_bound_sphere(desc, N, model),
                packing.dist_bound_grass(desc, N, model) if grass else None,
                packing.dist_bound_conjectured(desc, N, model),
                simplex,
                orthoplex,
            ]
        )
    columns = ["N", "rate", "r_N", "hamming", "sphere", "grassmann", "conjectured", "rankin_simplex", "rankin_orthoplex"]
    header = [
        f"upper bounds on the minimum distance delta of N codewords on {desc}, model {model}",
        "rate: log2(N)/dim; r_N: radius with mu(B(r_N)) = 1/N",
        "hamming: 2 r_N from N <= 1/mu(B(delta/2))",
        "sphere: sqrt(4 r_N^2 - r_N^4/R^2) from the spherical kissing radius",
        "grassmann: sqrt(4 r_N^2 - 4 r_N^4/p) from the Grassmann kissing radius lower bound",
        "conjectured: ceiling-corrected bound, valid as N grows (not a proven bound)",
        "rankin_simplex: sqrt(2R^2 N/(N-1)) for N <= D+1; rankin_orthoplex: sqrt(2) R for N <= 2D",
    ]
    return _table(header, columns, rows, args.format)


def cmd_midpoints(args) -> str:
    desc = _descriptor(args)
    if args.pairs < 1:
        raise CliError("--pairs must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence([args.seed]))
    a = sample_uniform_batch(desc, rng, args.pairs)
    b = sample_uniform_batch(desc, rng, args.pairs)
    dist = pair_distances(desc, a, b)
    mid = pair_mid_distances(desc, a, b)
    rows = []
    for d, m in zip(dist, mid):
        d = float(d)
        rows.append(
            [
                d,
                float(m),
                packing.kissing_lower(desc, d),
                packing.kissing_upper(desc, d),
                0.5 * d,
                packing.kissing_spherical(desc, d),
            ]
        )
    status = packing.upper_bound_status(desc)
    header = [
        f"{args.pairs} Haar-random pairs on {desc}, seed {args.seed}",
        "delta: pair distance; mid: distance to the pair midpoint",
        "rho_lower: equal-angle lower bound; rho_upper: concentrated-angle upper bound"
        f" ({status}); half_delta: delta/2; rho_spherical: spherical-code kissing radius",
    ]
    return _table(header, ["delta", "mid", "rho_lower", "rho_upper", "half_delta", "rho_spherical"], rows, args.format)


def cmd_catalog(args) -> str:
    if args.action == "list":
        if args.name is not None:
            raise CliError("catalog list takes no --name")
        lines = []
        for name in catalog.catalog_names():
            e = catalog.get_entry(name)
            lines.append(f"{name}\t{e.descriptor}")
        return "\n".join(lines) + "\n"
    if args.name is None:
        raise CliError("catalog export needs --name")
    try:
        entry = catalog.get_entry(args.name)
    except KeyError as exc:
        raise CliError(exc.args[0]) from None
    return json.dumps(entry.build().to_json()) + "\n"


# -- parser ------------------------------------------------------------------------


def _add_manifold(p, default_kind=None, default_n=None, default_p=None):
    p.add_argument("--kind", choices=[k.value for k in Kind], default=default_kind, required=default_kind is None)
    p.add_argument("--n", type=int, default=default_n, help="ambient dimension n")
    p.add_argument("--p", type=int, default=default_p, help="number of columns p (omit for unitary)")


def _add_model(p):
    p.add_argument("--model", choices=MODEL_CHOICES, default=None, help="volume model (default depends on the manifold)")
    p.add_argument("--samples", type=int, default=100_000, help="Monte Carlo samples")
    p.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")


def _add_output(p, default_format="csv"):
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], default=default_format)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default $MPL_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chordpack", description="Packings on unitary, Stiefel and Grassmann manifolds.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("volume", help="ball volumes over a radius sweep")
    _add_manifold(p)
    _add_model(p)
    p.add_argument("--r", type=float, default=None, help="single radius")
    p.add_argument("--r-min", type=float, default=None)
    p.add_argument("--r-max", type=float, default=None)
    p.add_argument("--r-sweep", action="store_true", help="sweep [0, 2R] (the default without --r)")
    p.add_argument("--steps", type=int, default=50)
    _add_output(p)

    p = sub.add_parser("verify", help="analyze a code")
    p.add_argument("--name", default=None, help="catalog code name")
    p.add_argument("--code", default=None, help="code JSON file")
    p.add_argument("--expect", action="store_true", help="compare with catalog values, exit 1 on mismatch")
    _add_model(p)
    _add_output(p, default_format="json")

    p = sub.add_parser("bounds", help="minimum-distance bounds over a sweep of N")
    _add_manifold(p, "grassmann", 4, 2)
    _add_model(p)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=64)
    p.add_argument("--log-steps", type=int, default=0, help="geometric N grid with this many points")
    _add_output(p)

    p = sub.add_parser("midpoints", help="mid-distances of random pairs")
    _add_manifold(p)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("catalog", help="list or export catalog codes")
    p.add_argument("action", choices=["list", "export"])
    p.add_argument("--name", default=None)
    p.add_argument("--out", default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            status = 0
            if args.command == "volume":
                text = cmd_volume(args)
            elif args.command == "verify":
                text, status = cmd_verify(args)
            elif args.command == "bounds":
                text = cmd_bounds(args)
            elif args.command == "midpoints":
                text = cmd_midpoints(args)
            else:
                text = cmd_catalog(args)
        _emit(text, args.out)
        return status
    except (CliError, ValueError, KeyError, ArithmeticError, OSError) as exc:
        msg = " ".join(str(exc).split()) or type(exc).__name__
        sys.stderr.write(f"error: {msg}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
