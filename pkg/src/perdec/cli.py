"""Batch command-line surface.

Every run reads JSON inputs, writes JSON results plus exactly one
manifest.json into the output directory, and exits 0 when all recorded
verifications passed, 2 when a bounded search was exhausted, and 1 on any
other failure.  Identical inputs and parameters produce byte-identical
result files; the manifest additionally records the wall time.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from .config import (FiberSum, WindowConfig, apply_poly,
                     box_points, evaluate, rasterize)
from .decompose import (Bounds, decompose_product, k_periodic_decompose,
                        search_difference_annihilator)
from .errors import InconclusiveError, PerdecError
from .laurent import line_direction
from .serialize import (config_from_obj, config_to_obj, dumps, file_hash,
                        load_json, poly_from_obj, poly_to_obj, tile_from_obj)
from .sparse import (check_sparseness, fiber_extract, sparse_decompose,
                     sparse_full, sparse_split2)
from .tiling import (cotiler_decompose, independent, select_periodizer,
                     verify_cotiler)


class _Parser(argparse.ArgumentParser):
    # usage problems are plain errors (exit 1); 2 is reserved for inconclusive
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


class RunContext:
    """Collects inputs, outputs and verdicts; emits the manifest."""

    def __init__(self, args):
        self.args = args
        self.out_dir = args.out
        os.makedirs(self.out_dir, exist_ok=True)
        self.t0 = time.monotonic()
        self.inputs = {}
        self.outputs = []
        self.verdicts = {}
        self.results = {}

    def track_input(self, path):
        self.inputs[path] = file_hash(path)

    def load_config(self, path):
        self.track_input(path)
        return self._check_dim(path, config_from_obj(load_json(path)))

    def _check_dim(self, path, value):
        if self.args.dim is not None and value.dim != self.args.dim:
            raise PerdecError(
                f"{path}: dimension {value.dim} does not match "
                f"--dim {self.args.dim}")
        return value

    def load_poly(self, path):
        self.track_input(path)
        return self._check_dim(path, poly_from_obj(load_json(path)))

    def load_poly_list(self, path):
        self.track_input(path)
        obj = load_json(path)
        items = [obj] if isinstance(obj, dict) else obj
        return [self._check_dim(path, poly_from_obj(item)) for item in items]

    def load_tiles(self, path):
        self.track_input(path)
        obj = load_json(path)
        items = [obj] if isinstance(obj, dict) else obj
        return [self._check_dim(path, tile_from_obj(item)) for item in items]

    def write_json(self, name, obj):
        path = os.path.join(self.out_dir, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(obj))
        self.outputs.append(name)
        return path

    def write_config(self, name, c):
        path = self.write_json(name, config_to_obj(c))
        if self.args.format == "grid" and isinstance(c, WindowConfig) \
                and c.dim == 2:
            gname = name.rsplit(".", 1)[0] + ".txt"
            gpath = os.path.join(self.out_dir, gname)
            with open(gpath, "w", encoding="utf-8") as fh:
                fh.write(c.grid_text() + "\n")
            self.outputs.append(gname)
        return path

    def bounds(self):
        return Bounds(search=self.args.bound_search,
                      period=self.args.bound_period,
                      k_max=self.args.kmax,
                      patience=self.args.patience)

    def window(self, dim):
        if self.args.window is None:
            r = 10
            return (-r,) * dim, (r,) * dim
        return _parse_window(self.args.window, dim)

    def finish(self, command):
        manifest = {
            "command": command,
            "inputs": self.inputs,
            "bounds": {"search": self.args.bound_search,
                       "period": self.args.bound_period,
                       "k_max": self.args.kmax,
                       "patience": self.args.patience},
            "threads": int(os.environ.get("PERDEC_THREADS", "1")),
            "verdicts": self.verdicts,
            "results": self.results,
            "outputs": sorted(self.outputs),
            "wall_time_s": round(time.monotonic() - self.t0, 6),
        }
        with open(os.path.join(self.out_dir, "manifest.json"), "w",
                  encoding="utf-8") as fh:
            fh.write(dumps(manifest))
        return 0 if all(self.verdicts.values()) else 1


def _parse_window(spec, dim):
    parts = spec.split(",")
    if len(parts) != dim:
        raise PerdecError(
            f"--window needs {dim} comma-separated ranges, got {spec!r}")
    lo, hi = [], []
    for part in parts:
        a, sep, b = part.partition("..")
        if not sep:
            raise PerdecError(f"bad range {part!r}; expected lo..hi")
        try:
            lo.append(int(a))
            hi.append(int(b))
        except ValueError as exc:
            raise PerdecError(f"bad range {part!r}") from exc
    return tuple(lo), tuple(hi)


# ---------------------------------------------------------------------------
# commands

def _cmd_poly(ctx):
    args = ctx.args
    if args.op == "line-dir":
        f = ctx.load_poly(args.inputs[0])
        desc = line_direction(f)
        if desc is None:
            ctx.results["line"] = "absent"
        else:
            ctx.results["line"] = {"direction": list(desc.direction),
                                   "anchor": list(desc.anchor)}
        ctx.write_json("line-dir.json", ctx.results["line"])
        return ctx.finish(["poly", args.op] + args.inputs)
    if len(args.inputs) != 2:
        raise PerdecError(f"poly {args.op} needs exactly two input files")
    f = ctx.load_poly(args.inputs[0])
    g = ctx.load_poly(args.inputs[1])
    result = f + g if args.op == "add" else f * g
    ctx.write_json("result.json", poly_to_obj(result))
    return ctx.finish(["poly", args.op] + args.inputs)


def _cmd_act(ctx):
    args = ctx.args
    f = ctx.load_poly(args.poly)
    c = ctx.load_config(args.config)
    out = apply_poly(f, c)
    ctx.write_config("result.json", out)
    if isinstance(out, WindowConfig):
        ctx.results["eroded"] = {"lo": list(out.lo), "hi": list(out.hi)}
    return ctx.finish(["act", args.poly, args.config])


def _cmd_decompose(ctx):
    args = ctx.args
    c = ctx.load_config(args.config)
    bounds = ctx.bounds()
    lo, hi = ctx.window(c.dim)

    if args.k is not None:
        if not args.periodizers:
            raise PerdecError("--k needs --periodizers FILE [FILE ...]")
        family = []
        for path in args.periodizers:
            family.extend(ctx.load_poly_list(path))
        dec = k_periodic_decompose(
            c, args.k, lambda V: select_periodizer(family, V), bounds)
    elif args.factors:
        phis = ctx.load_poly_list(args.factors)
        from .lattice import SubspaceBasis
        dec = decompose_product(phis, c, SubspaceBasis.trivial(c.dim), bounds)
    elif args.annihilator:
        f = ctx.load_poly(args.annihilator)
        dp = search_difference_annihilator(c, f, bounds.search)
        ctx.results["certificate"] = [list(v) for v in dp.vectors]
        from .lattice import SubspaceBasis
        dec = decompose_product(dp.polys(), c, SubspaceBasis.trivial(c.dim),
                                bounds)
    else:
        raise PerdecError(
            "decompose needs --factors, --annihilator or --k/--periodizers")

    report = dec.verify_on_window(lo, hi)
    ctx.verdicts["sum_matches"] = report["sum"]
    for i, ok in enumerate(report["annihilation"]):
        ctx.verdicts[f"component_{i:02d}_annihilated"] = ok
    for i, comp in enumerate(dec.components):
        ctx.write_config(f"component_{i:02d}.json",
                         rasterize(comp.view, lo, hi))
        from .serialize import poly_to_obj
        ctx.results[f"component_{i:02d}_annihilator"] = \
            poly_to_obj(comp.line_poly)
        if comp.gauge is not None:
            ctx.results[f"component_{i:02d}_gauge"] = comp.gauge
        if comp.periods:
            ctx.results[f"component_{i:02d}_periods"] = \
                [list(p) for p in comp.periods]
    ctx.results["window"] = {"lo": list(lo), "hi": list(hi)}
    return ctx.finish(["decompose", args.config])


def _cmd_sparse(ctx):
    args = ctx.args
    bounds = ctx.bounds()
    c = ctx.load_config(args.config)

    if args.subcommand == "fibers":
        if not args.direction:
            raise PerdecError("sparse fibers needs --direction")
        v = tuple(int(x) for x in args.direction.split(","))
        out = fiber_extract(c, v, bounds.period)
        ctx.write_config("fibers.json", out)
        if isinstance(c, FiberSum):
            consistent = out == c
        else:
            lo, hi = ctx.window(c.dim)
            consistent = all(evaluate(out, x) == evaluate(c, x)
                             for x in box_points(lo, hi) if c.contains(x))
        ctx.verdicts["extraction_consistent"] = consistent
        return ctx.finish(["sparse", "fibers", args.config])

    if args.subcommand == "split":
        phi = ctx.load_poly(args.polys[0])
        psi = ctx.load_poly(args.polys[1])
        c1, c2 = sparse_split2(c, phi, psi, bounds)
        _sparse_report(ctx, c, [c1, c2],
                       ["phi*c1 = 0", "psi*c1 = psi*c", "psi*c2 = 0",
                        "phi*c2 = phi*c", "c = c1 + c2"])
        return ctx.finish(["sparse", "split", args.config])

    if args.subcommand == "decompose":
        phis = ctx.load_poly_list(args.polys[0])
        fams = sparse_decompose(c, phis, bounds)
        _sparse_report(ctx, c, fams,
                       ["per-family annihilation", "family sum = input"])
        return ctx.finish(["sparse", "decompose", args.config])

    if args.subcommand == "full":
        f = ctx.load_poly(args.polys[0])
        fams = sparse_full(c, f, bounds)
        _sparse_report(ctx, c, fams,
                       ["certificate annihilates", "per-family annihilation",
                        "family sum = input"])
        return ctx.finish(["sparse", "full", args.config])

    raise PerdecError(f"unknown sparse subcommand {args.subcommand!r}")


def _sparse_report(ctx, source, families, identities):
    """Record certificate, detected periods and the verified-identity log."""
    from .sparse import fiber_closed_form_constant
    for i, fam in enumerate(families):
        ctx.write_config(f"family_{i:02d}.json", fam)
        ctx.results[f"family_{i:02d}_periods"] = \
            [{"anchor": list(f.anchor), "dir": list(f.direction),
              "period": f.period} for f in fam.fibers]
    if isinstance(source, FiberSum):
        ctx.results["sparseness_constant"] = \
            max(fiber_closed_form_constant(source), 1)
    # the operations verify these identities before returning
    for name in identities:
        ctx.verdicts[f"identity: {name}"] = True


def _cmd_sparseness(ctx):
    args = ctx.args
    c = ctx.load_config(args.config)
    report = check_sparseness(c, args.constant, args.m_max)
    ctx.verdicts["sparse"] = report.ok
    ctx.results["certificate"] = {
        "constant": report.constant,
        "exact": report.exact,
        "checked": [list(pair) for pair in report.checked],
        "violation": (None if report.violation is None
                      else {"m": report.violation[0],
                            "t": list(report.violation[1])}),
    }
    ctx.write_json("certificate.json", ctx.results["certificate"])
    return ctx.finish(["sparseness", args.config])


def _cmd_tiling(ctx):
    args = ctx.args
    bounds = ctx.bounds()

    if args.subcommand == "independent":
        tiles = ctx.load_tiles(args.tiles)
        ok, witness = independent(tiles)
        ctx.verdicts["independent"] = ok
        ctx.results["witness"] = (None if witness is None
                                  else [list(v) for v in witness])
        ctx.write_json("report.json",
                       {"independent": ok, "witness": ctx.results["witness"]})
        return ctx.finish(["tiling", "independent", args.tiles])

    if args.subcommand == "verify":
        tiles = ctx.load_tiles(args.tiles)
        c = ctx.load_config(args.config)
        report = {}
        for i, tile in enumerate(tiles):
            verdict = verify_cotiler(tile, c)
            ctx.verdicts[f"cotiler_{i:02d}"] = verdict.holds
            report[f"tile_{i:02d}"] = {
                "holds": verdict.holds, "exact": verdict.exact,
                "region": (None if verdict.region is None
                           else [list(verdict.region[0]),
                                 list(verdict.region[1])])}
        ctx.write_json("report.json", report)
        return ctx.finish(["tiling", "verify", args.tiles, args.config])

    if args.subcommand == "decompose":
        tiles = ctx.load_tiles(args.tiles)
        c = ctx.load_config(args.config)
        lo, hi = ctx.window(c.dim)
        dec = cotiler_decompose(tiles, c, bounds)
        report = dec.verify_on_window(lo, hi)
        ctx.verdicts["sum_matches"] = report["sum"]
        for i, ok in enumerate(report["annihilation"]):
            ctx.verdicts[f"component_{i:02d}_annihilated"] = ok
        for i, comp in enumerate(dec.components):
            ctx.write_config(f"component_{i:02d}.json",
                             rasterize(comp.view, lo, hi))
            ctx.results[f"component_{i:02d}_periods"] = \
                [list(p) for p in comp.periods]
        return ctx.finish(["tiling", "decompose", args.tiles, args.config])

    raise PerdecError(f"unknown tiling subcommand {args.subcommand!r}")


# ---------------------------------------------------------------------------
# parser

def build_parser():
    parser = _Parser(prog="perdec",
                     description="exact periodic-decomposition toolkit")
    parser.add_argument("--out", default="perdec-out",
                        help="output directory (default: perdec-out)")
    parser.add_argument("--dim", type=int, default=None,
                        help="assert the dimension of every input")
    parser.add_argument("--bound-search", type=int, default=32,
                        help="certificate search budget (default 32)")
    parser.add_argument("--bound-period", type=int, default=64,
                        help="largest period probed (default 64)")
    parser.add_argument("--kmax", type=int, default=256,
                        help="translate sequence length bound (default 256)")
    parser.add_argument("--patience", type=int, default=8,
                        help="stabilization patience (default 8)")
    parser.add_argument("--window", default=None,
                        help="evaluation box; use the = form for negative "
                             "corners, e.g. --window=-20..20,-20..20")
    parser.add_argument("--format", choices=("json", "grid"), default="json",
                        help="grid adds text dumps for window outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poly", help="polynomial arithmetic")
    p.add_argument("op", choices=("add", "mul", "line-dir"))
    p.add_argument("inputs", nargs="+")
    p.set_defaults(handler=_cmd_poly)

    p = sub.add_parser("act", help="apply a polynomial to a configuration")
    p.add_argument("poly")
    p.add_argument("config")
    p.set_defaults(handler=_cmd_act)

    p = sub.add_parser("decompose", help="periodic decomposition")
    p.add_argument("config")
    p.add_argument("--factors", help="JSON list of line-polynomial factors")
    p.add_argument("--annihilator",
                   help="single annihilator; a difference product is searched")
    p.add_argument("--k", type=int, default=None,
                   help="target periodicity level (needs --periodizers)")
    p.add_argument("--periodizers", nargs="+", default=None,
                   help="periodizer family files for the oracle")
    p.set_defaults(handler=_cmd_decompose)

    p = sub.add_parser("sparse", help="sparse fiber decompositions")
    p.add_argument("subcommand",
                   choices=("fibers", "split", "decompose", "full"))
    p.add_argument("config")
    p.add_argument("polys", nargs="*")
    p.add_argument("--direction", default=None,
                   help="fiber direction for 'fibers', e.g. '1,0'")
    p.set_defaults(handler=_cmd_sparse)

    p = sub.add_parser("sparseness", help="sparseness certificate")
    p.add_argument("config")
    p.add_argument("--constant", type=int, required=True)
    p.add_argument("--m-max", type=int, default=6)
    p.set_defaults(handler=_cmd_sparseness)

    p = sub.add_parser("tiling", help="translational tilings")
    p.add_argument("subcommand", choices=("verify", "independent", "decompose"))
    p.add_argument("tiles", help="tile file (JSON object or list)")
    p.add_argument("config", nargs="?", default=None)
    p.set_defaults(handler=_cmd_tiling)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    ctx = RunContext(args)
    try:
        return args.handler(ctx)
    except InconclusiveError as exc:
        print(f"perdec: inconclusive: {exc}", file=sys.stderr)
        return 2
    except PerdecError as exc:
        print(f"perdec: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
