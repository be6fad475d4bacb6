"""Command-line front end.

    cmcgraphs generate --family rot-sphere-h2 -H 0.7 --samples 256
    cmcgraphs verify   --family hyp-cylinder -H 1 --output report.json
    cmcgraphs bounds   -c 1 -H 1 --nu0 0 -m 0.5
    cmcgraphs figures  --output-dir figures/

Exit codes: 0 success/pass, 1 verification failure, 2 invalid input,
3 numerical or I/O failure.  Options may also come from ``--config FILE``
(``key = value`` lines); flags on the command line win.
"""
from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import estimates, geomcheck
from .errors import InvalidInputError, NoSolutionError
from .estimates import EstimateParams
from .profiles import Family, ProfileFamily, make_profile, max_height, torus_height_argmax
from .verify import family_checks

OUTPUT_DIR_ENV = "CMCGRAPHS_OUTPUT_DIR"

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

FAMILIES = {
    "rot-sphere-h2": Family.ROT_SPHERE_H2,
    "rot-sphere-s2": Family.ROT_SPHERE_S2,
    "rot-torus-s2": Family.ROT_TORUS_S2,
    "rot-general-s2": Family.ROT_GENERAL_S2,
    "hyp-cylinder": Family.HYP_CYLINDER,
    "hyp-general": Family.HYP_GENERAL,
    "parabolic": Family.PARABOLIC,
    "euclidean-sphere": Family.EUCL_SPHERE,
    "euclidean-cylinder": Family.EUCL_CYLINDER,
}

FIG1_H = (0.54, 0.6, 0.7, 0.8, 0.9, 1.0)
FIG2_H = (0.05, 0.12, None, 0.6, 1.0, 2.0)  # None: the computed torus maximiser


class UsageError(Exception):
    """Bad option values detected after argparse (exit code 2)."""


def fmt(x: float) -> str:
    """17 significant digits: round-trips every double."""
    return format(float(x), ".17g")


def human(x: float) -> str:
    return format(float(x), ".6g")


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(columns: List[str], rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def emit(text: str, output: Optional[str], default_name: str) -> Optional[Path]:
    """Write to ``output``, else into $CMCGRAPHS_OUTPUT_DIR, else stdout."""
    if output is None and os.environ.get(OUTPUT_DIR_ENV):
        output = str(Path(os.environ[OUTPUT_DIR_ENV]) / default_name)
    if output is None or output == "-":
        sys.stdout.write(text)
        return None
    write_atomic(Path(output), text)
    return Path(output)


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------


def read_config(path: str) -> Dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _family_of(args) -> ProfileFamily:
    if args.family is None:
        raise UsageError("--family is required")
    if args.family not in FAMILIES:
        raise UsageError(f"unknown family {args.family!r}; choose from {', '.join(FAMILIES)}")
    if args.mean_curvature is None:
        raise UsageError("--mean-curvature is required")
    return ProfileFamily(FAMILIES[args.family], args.mean_curvature, args.aux)


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def generate_rows(prof, samples: int):
    """Rows (param, base_arclength, h, nu, H_num) on interior points of the regular chart."""
    lo, hi = prof.chart_domain
    th = lo + (np.arange(samples) + 0.5) * (hi - lo) / samples
    sample = geomcheck.profile_forms(prof, th, 0.0)
    param = prof.chart(th)
    arc = prof.arclength_fn(param)
    h, nu, Hm = sample.position[:, -1], sample.nu, sample.mean_curvature
    return np.column_stack([param, arc, h, nu, Hm])


GENERATE_COLUMNS = ["param", "base_arclength", "h", "nu", "H_num"]


def run_generate(args) -> int:
    fam = _family_of(args)
    prof = make_profile(fam)
    rows = generate_rows(prof, args.samples)
    if args.format == "csv":
        text = csv_text(GENERATE_COLUMNS, rows)
    else:
        recs = [dict(zip(GENERATE_COLUMNS, map(float, r))) for r in rows]
        text = json.dumps(recs, indent=1) + "\n"
    name = f"{args.family}_H{fmt(fam.H)}.{args.format}"
    path = emit(text, args.output, name)
    meta = {
        "family": fam.tag.value,
        "H": fam.H,
        "aux": fam.aux,
        "is_bigraph": prof.is_bigraph,
        "domain": [float(x) for x in prof.domain],
        "samples": args.samples,
    }
    if prof.is_bigraph:
        meta["max_height"] = max_height(prof)
    if path is not None:
        write_atomic(path.with_name(path.name + ".meta.json"), json.dumps(meta, indent=1, sort_keys=True) + "\n")
    summary = ", ".join(f"{k}={human(v) if isinstance(v, float) else v}" for k, v in meta.items() if k != "domain")
    print(summary, file=sys.stderr)
    return EXIT_OK


def run_verify(args) -> int:
    fam = _family_of(args)
    prof = make_profile(fam)
    checks = family_checks(prof, grid=args.grid, tol=args.tolerance)
    ok = all(c.passed for c in checks)
    report = {
        "config": {
            "family": args.family,
            "H": fam.H,
            "aux": fam.aux,
            "grid": args.grid,
            "tolerance": args.tolerance,
        },
        "checks": [c.record() for c in checks],
        "pass": ok,
    }
    text = json.dumps(report, indent=1) + "\n"
    if args.timings:
        report_t = dict(report, timings={c.name: c.seconds for c in checks})
        text = json.dumps(report_t, indent=1) + "\n"
    emit(text, args.output, f"verify_{args.family}_H{fmt(fam.H)}.json")
    for c in checks:
        mark = "PASS" if c.passed else "FAIL"
        print(f"{mark} {c.name}: actual {human(c.actual)} {c.relation} expected {human(c.expected)} "
              f"(tol {c.tolerance:g})", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def bounds_record(prm: EstimateParams, height: Optional[float]) -> dict:
    rec = {
        "c": prm.c,
        "H": prm.H,
        "nu0": prm.nu0,
        "alpha_max": estimates.alpha_max(prm),
        "kappa_lower_general": estimates.kappa_lower_general(prm),
    }
    if prm.m is not None:
        rec["m"] = prm.m
        rec["kappa_lower_height"] = estimates.kappa_lower_height(prm)
    caps = estimates.convexity_height_caps(prm)
    rec["convexity_branch"] = caps["branch"]
    rec["convexity_cap"] = caps["cap"]
    rec["convexity_cap_printed"] = caps["cap_printed"]
    if height is not None:
        rec["height"] = height
        rec["distance_lower_bound"] = estimates.distance_lower_bound(prm, height)
        rec["zeta"] = estimates.zeta(prm, height)
        rec["forces_convex"] = bool(height <= caps["cap"])
        rec["forces_convex_printed"] = bool(height <= caps["cap_printed"])
    return rec


def run_bounds(args) -> int:
    if args.mean_curvature is None:
        raise UsageError("--mean-curvature is required")
    prm = EstimateParams(args.c, args.mean_curvature, args.nu0, args.m)
    rec = bounds_record(prm, args.height)
    if args.format == "json":
        emit(json.dumps(rec, indent=1) + "\n", args.output, "bounds.json")
    else:
        lines = [f"{k} = {human(v) if isinstance(v, float) else v}" for k, v in rec.items()]
        emit("\n".join(lines) + "\n", args.output, "bounds.txt")
    return EXIT_OK


def _curve(tag: Family, H: float, samples: int, mirror: bool = False):
    """(s, h) along a figure curve, s the intrinsic base coordinate."""
    prof = make_profile(ProfileFamily(tag, H))
    lo, hi = prof.chart_domain
    th = np.linspace(lo, hi, samples)
    param = prof.chart(th)
    h = np.asarray(prof.height_fn(param), dtype=float)
    s = np.asarray(prof.arclength_fn(param), dtype=float)
    if mirror:
        # half profiles starting on the axis: reflect to show the whole meridian
        s = np.concatenate([-s[:0:-1], s])
        h = np.concatenate([h[:0:-1], h])
    return s, h


def figure_data(samples: int = 201):
    """Curve bundles of both figures and their metadata."""
    H_star, top_star = torus_height_argmax()
    fig1, fig2 = [], []
    meta = {"H_star": H_star, "torus_height_star": top_star, "sphere_height_star": 2 * top_star,
            "fig1": [], "fig2": []}
    for H in FIG1_H:
        for kind, tag, mirror in ((0, Family.ROT_SPHERE_H2, True), (1, Family.HYP_CYLINDER, False)):
            s, h = _curve(tag, H, samples, mirror)
            fig1 += [(H, kind, a, b) for a, b in zip(s, h)]
            meta["fig1"].append({"H": H, "kind": tag.value, "peak": float(np.max(h))})
    for H in FIG2_H:
        H = H_star if H is None else H
        for kind, tag in ((0, Family.ROT_SPHERE_S2), (1, Family.ROT_TORUS_S2)):
            s, h = _curve(tag, H, samples)
            fig2 += [(H, kind, a, b) for a, b in zip(s, h)]
            meta["fig2"].append({"H": H, "kind": tag.value, "peak": float(np.max(h))})
    return fig1, fig2, meta


FIGURE_COLUMNS = ["H", "kind", "s", "h"]


def run_figures(args) -> int:
    outdir = Path(args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "figures")
    fig1, fig2, meta = figure_data(args.samples)
    write_atomic(outdir / "fig1.csv", csv_text(FIGURE_COLUMNS, fig1))
    write_atomic(outdir / "fig2.csv", csv_text(FIGURE_COLUMNS, fig2))
    write_atomic(outdir / "figures_meta.json", json.dumps(meta, indent=1) + "\n")
    print(f"H* = {human(meta['H_star'])}, torus height* = {human(meta['torus_height_star'])}; "
          f"wrote {outdir}/fig1.csv, fig2.csv, figures_meta.json", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="cmcgraphs", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help="file of 'key = value' lines supplying defaults")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    def family_opts(p):
        p.add_argument("--family", help=f"one of: {', '.join(FAMILIES)}")
        p.add_argument("--mean-curvature", "-H", type=float, dest="mean_curvature")
        p.add_argument("--aux", type=float, default=0.0, help="c0 (rot-general-s2) or energy E (hyp-general)")

    p = sub.add_parser("generate", help="sample a generating curve and its surface data")
    family_opts(p)
    p.add_argument("--samples", type=_positive_int, default=256)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o")
    subs["generate"] = p

    p = sub.add_parser("verify", help="run the property suite for one family")
    family_opts(p)
    p.add_argument("--grid", type=int, default=64, help="lattice size of the CMC residual (>= 16)")
    p.add_argument("--tolerance", type=float, default=None, help="override every check tolerance")
    p.add_argument("--timings", action="store_true", help="append a 'timings' section to the report")
    p.add_argument("--output", "-o")
    subs["verify"] = p

    p = sub.add_parser("bounds", help="evaluate the height, curvature and distance estimates")
    p.add_argument("-c", type=float, default=-1.0, dest="c", help="base curvature")
    p.add_argument("--mean-curvature", "-H", type=float, dest="mean_curvature")
    p.add_argument("--nu0", type=float, default=0.0)
    p.add_argument("-m", type=float, default=None, dest="m", help="height fraction 0 < m <= 1/2")
    p.add_argument("--height", type=float, default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", "-o")
    subs["bounds"] = p

    p = sub.add_parser("figures", help="emit the data behind both figures")
    p.add_argument("--output-dir")
    p.add_argument("--samples", type=_positive_int, default=201)
    subs["figures"] = p
    for p in subs.values():
        p.add_argument("--config", default=argparse.SUPPRESS, help="file of 'key = value' lines supplying defaults")
    return parser, subs


def _apply_config(parser, subs, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config(known.config)
    for name, sp in subs.items():
        conv = {}
        for action in sp._actions:
            if action.dest in values:
                raw = values[action.dest]
                if action.type is not None:
                    try:
                        conv[action.dest] = action.type(raw)
                    except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
                        raise UsageError(f"config key {action.dest}: {exc}") from None
                elif action.const is True:
                    conv[action.dest] = raw.lower() in ("1", "true", "yes", "on")
                else:
                    conv[action.dest] = raw
        sp.set_defaults(**conv)


COMMANDS = {"generate": run_generate, "verify": run_verify, "bounds": run_bounds, "figures": run_figures}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        _apply_config(parser, subs, argv)
    except (UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        if getattr(args, "grid", 64) < 16:
            raise UsageError("--grid must be at least 16")
        return COMMANDS[args.command](args)
    except (UsageError, InvalidInputError, NoSolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:  # DomainError and friends
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, OSError) as exc:
        print(f"numerical or I/O failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
