"""Command-line front end.

Subcommands: analyze, count, markov, build, eval, verify, plot.  Exit
status is 0 when everything passes, 1 on a failed verification and 2 on a
usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .algebraic import AlgebraicParameter, catalog
from .errors import SchemaError, TentSurgeryError
from .markov import analyze, growth_constant
from .plot import DEFAULT_SAMPLES, WHATS, write_plot
from .preimage import TREE_CAP, CountTable
from .surgery import SurgeredMapDescriptor, layout
from .tent import NotFinite, core_interval, critical_orbit, renorm_depth
from .verify import SUITES, run_suite

log = logging.getLogger("tentsurgery")

OUT_ENV = "TENTSURGERY_OUT"
DEPTH_CAP = 24
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _out_dir() -> Path:
    return Path(os.environ.get(OUT_ENV, "."))


def _resolve_out(path: str | None, default: str) -> Path:
    if path is None:
        return _out_dir() / default
    p = Path(path)
    return p if p.is_absolute() or p.parent != Path(".") else _out_dir() / p


def read_config(path) -> dict:
    """Flat ``key = value`` file; keys mirror the long flags."""
    cfg = {}
    for ln, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{ln}: expected key = value")
        k, v = line.split("=", 1)
        cfg[k.strip().replace("-", "_")] = v.strip()
    return cfg


def resolve_beta(args) -> AlgebraicParameter:
    if args.beta_poly:
        try:
            coeffs = [int(c) for c in str(args.beta_poly).split(",")]
        except ValueError:
            raise UsageError("--beta-poly expects comma separated integers, highest degree first")
        if not args.isolate or len(args.isolate) != 2:
            raise UsageError("--beta-poly needs --isolate LO HI")
        return AlgebraicParameter(coeffs, tuple(args.isolate))
    try:
        return catalog(args.beta or "full")
    except KeyError as exc:
        raise UsageError(str(exc))


def _descriptor(args) -> SurgeredMapDescriptor:
    if args.descriptor:
        return SurgeredMapDescriptor.load(args.descriptor)
    beta = resolve_beta(args)
    return layout(beta, N=args.depth, eps=args.eps)


def _emit(args, payload, text: str):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


# -- commands -----------------------------------------------------------------

def cmd_analyze(args) -> int:
    beta = resolve_beta(args)
    orbit = critical_orbit(beta, args.max_iter)
    if isinstance(orbit, NotFinite):
        print(f"critical orbit not finite within {args.max_iter} steps; parameters with a finite "
              "critical orbit are dense in (1, 2], so try a nearby algebraic slope", file=sys.stderr)
        return EXIT_FAIL
    k = renorm_depth(beta)
    lo, hi = core_interval(beta)
    pts = [{"exact": p.to_strings(), "value": float(p)} for p in orbit.points]
    payload = {"beta": float(beta), "min_poly": list(beta.min_poly), "t": orbit.preperiod,
               "m": orbit.period, "renorm_depth": k, "core": [float(lo), float(hi)], "orbit": pts}
    lines = [f"beta = {float(beta):.15g}  (min poly {list(beta.min_poly)})",
             f"t = {orbit.preperiod}, m = {orbit.period}, renormalization depth k = {k}",
             f"core interval = [{float(lo):.12g}, {float(hi):.12g}]", "critical orbit:"]
    for i, p in enumerate(orbit.points):
        lines.append(f"  c{i} = {float(p):.15g}   {p.to_strings()}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_count(args) -> int:
    beta = resolve_beta(args)
    n_max = args.depth
    tree_depth = min(n_max, args.tree_depth)
    if args.tree_depth > TREE_CAP:
        log.warning("tree column capped at depth %d", TREE_CAP)
        tree_depth = min(n_max, TREE_CAP)
    table = CountTable.build(beta, None, n_max, tree_depth)
    text = table.to_csv()
    if args.out:
        p = _resolve_out(args.out, "counts.csv")
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_markov(args) -> int:
    beta = resolve_beta(args)
    tm = analyze(beta)
    d = tm.to_dict()
    d["growth_constant"] = growth_constant(beta, tm)
    lines = [f"partition size {tm.size}", "B ="]
    lines += ["  " + " ".join(str(v) for v in row) for row in tm.entries]
    lo, hi = d["spectral_radius"]
    lines.append(f"spectral radius in [{lo:.15g}, {hi:.15g}]")
    lines.append(f"charpoly {tm.charpoly}; min poly divides it: {tm.charpoly_divisible}")
    lines.append(f"growth constant M = {d['growth_constant']:.6g}")
    _emit(args, d, "\n".join(lines))
    return EXIT_OK if tm.charpoly_divisible else EXIT_FAIL


def cmd_build(args) -> int:
    beta = resolve_beta(args)
    desc = layout(beta, N=args.depth, eps=args.eps)
    out = _resolve_out(args.out, "descriptor.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    desc.save(out)
    print(f"wrote {out} ({len(desc.records)} insertions, total length {desc.total_length:.12g})")
    return EXIT_OK


def cmd_eval(args) -> int:
    desc = _descriptor(args)
    if args.x is None:
        raise UsageError("eval needs --x")
    if args.unit:
        val, rad = desc.eval_unit(args.x, args.eps)
    else:
        val, rad = desc.eval(args.x, args.eps)
    payload = {"x": args.x, "value": val, "radius": rad, "unit": bool(args.unit)}
    _emit(args, payload, f"g({args.x!r}) = {val!r} +/- {rad:.3g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    desc = _descriptor(args)
    names = [s.strip() for s in args.suite.split(",")]
    for n in names:
        if n != "all" and n not in SUITES:
            raise UsageError(f"unknown suite {n!r}; choose from {sorted(SUITES)} or all")
    results = run_suite(desc, names)
    if args.json:
        print(json.dumps([r.to_dict() for r in results], indent=2, default=str))
    else:
        for r in results:
            extra = f"  ({r.detail})" if r.detail else ""
            print(f"{r.status}  {r.check_name}: measured {r.measured}, bound {r.bound}{extra}")
    if args.out:
        p = _resolve_out(args.out, "verify.json")
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps([r.to_dict() for r in results], indent=2, default=str) + "\n")
    return EXIT_OK if all(r.status == "PASS" for r in results) else EXIT_FAIL


def cmd_plot(args) -> int:
    desc = _descriptor(args)
    out = _resolve_out(args.out, f"{args.what}.svg")
    svg, table = write_plot(desc, args.what, out, args.samples)
    print(f"wrote {svg} and {table}")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze, "count": cmd_count, "markov": cmd_markov, "build": cmd_build,
    "eval": cmd_eval, "verify": cmd_verify, "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file mirroring the flags")
    common.add_argument("--beta", help="catalog slope: full, golden, sqrt2")
    common.add_argument("--beta-poly", help="minimal polynomial, highest degree first, e.g. 1,0,-2")
    common.add_argument("--isolate", nargs=2, metavar=("LO", "HI"), help="isolating interval for the root")
    common.add_argument("--depth", type=int, default=None, help="materialisation / table depth N")
    common.add_argument("--eps", type=float, default=None, help="target enclosure width")
    common.add_argument("--out", help=f"output path (relative names go under ${OUT_ENV})")
    common.add_argument("--descriptor", help="load a saved descriptor instead of building one")
    common.add_argument("--json", action="store_true", help="machine readable output")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="tentsurgery", description="Denjoy-type surgery on tent maps.")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="critical orbit and renormalization data")
    a.add_argument("--max-iter", type=int, default=4096)
    c = sub.add_parser("count", parents=[common], help="preimage counts and lengths as CSV")
    c.add_argument("--tree-depth", type=int, default=14)
    sub.add_parser("markov", parents=[common], help="Markov partition and spectral data")
    sub.add_parser("build", parents=[common], help="build and save a map descriptor")
    e = sub.add_parser("eval", parents=[common], help="evaluate the surgered map at a point")
    e.add_argument("--x", type=float)
    e.add_argument("--unit", action="store_true", help="use the rescaled map on [0, 1]")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", default="all", help=f"comma separated from {', '.join(SUITES)} or all")
    pl = sub.add_parser("plot", parents=[common], help="write an SVG figure and its CSV")
    pl.add_argument("--what", choices=WHATS, default="map")
    pl.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    return p


_DEFAULTS = {"depth": 8, "eps": 1e-9}


def _apply_config(args, parser):
    if args.config:
        cfg = read_config(args.config)
        for k, v in cfg.items():
            if not hasattr(args, k):
                raise UsageError(f"unknown config key {k!r}")
            if getattr(args, k) in (None, False):
                if k == "isolate":
                    v = v.split()
                elif k in ("depth", "samples", "max_iter", "tree_depth"):
                    v = int(v)
                elif k in ("eps", "x"):
                    v = float(v)
                elif k in ("json", "unit", "verbose"):
                    v = v.lower() in ("1", "true", "yes")
                setattr(args, k, v)
    if args.depth is None:
        args.depth = 20 if args.command == "count" else _DEFAULTS["depth"]
    if args.eps is None:
        args.eps = _DEFAULTS["eps"]
    if not args.eps > 0:
        raise UsageError("--eps must be positive")
    if not 1 <= args.depth <= DEPTH_CAP * (3 if args.command == "count" else 1):
        raise UsageError(f"--depth out of range (cap {DEPTH_CAP})")
    if getattr(args, "samples", 2) < 2:
        raise UsageError("--samples must be >= 2")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        _apply_config(args, parser)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TentSurgeryError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
