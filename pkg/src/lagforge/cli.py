"""Command-line front end: delta, integrate, build, verify, report.

Options can also come from an INI file (``--config``) with one section per
subcommand; ``[build]`` is shared by verify and report, ``[DEFAULT]`` by all.
Flags override the file.

Exit codes: 0 pass, 2 usage/config error, 3 verification failure,
4 numerical truncation (blow-up guard hit).
"""
import argparse
import configparser
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .delta import (Partition, PartitionError, a_coefficient, all_partitions, classify_special_d,
                    curvature_weight, delta_bound_rhs, parse_rational)
from .fileio import FileFormatError, read_chart, read_seed, write_chart
from .immersions import BuildError, build, check_d
from .profile import DomainError, ProfileParams, ProfileState, closed_form_along, integrate
from .seeds import CATALOG, SeedError, catalog_seed, flat_line, lagrangian_plane, solve_w
from .verifier import FILE_TOLERANCES, TOLERANCES, VerificationError, VerifyConfig, run_report

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_TRUNCATED = 0, 2, 3, 4


class UsageError(ValueError):
    pass


def _bool(s):
    if isinstance(s, bool):
        return s
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {s!r}")


# dest -> (type, default, help)
PROFILE_OPTS = {
    "c": (int, 0, "holomorphic curvature parameter: -1, 0 or 1"),
    "d": (str, "1/4", "d as an exact rational, e.g. 1/4"),
    "t0": (float, 0.0, "initial parameter"),
    "lam0": (float, None, "initial lambda (default 1; derived from mu0 for branch 3)"),
    "mu0": (float, 0.3, "initial mu"),
    "theta0": (float, 0.0, "initial theta"),
    "t_end": (float, None, "end of the t-interval (default t0 + 1)"),
    "step": (float, 1e-3, "integration step"),
}
BUILD_OPTS = {
    "n": (int, 3, "complex dimension"),
    "seed": (str, None, "catalog seed name or path to a seed file"),
    "branch": (str, "auto", "c = -1 branch: 1, 2, 3 or auto"),
    "form": (str, "printed", "branch-3 closed form: printed or derived"),
    "w0": (float, 0.0, "value of the w-potential at the base point (branch 3)"),
}
GRID_OPTS = {
    "t_points": (int, 5, "grid points along t"),
    "u_points": (int, 5, "grid points along each seed coordinate"),
    "threads": (int, None, "worker threads (default: LAGFORGE_THREADS or 1)"),
    "tol": (str, None, "tolerance overrides name=value[,name=value...]"),
}
SECTIONS = {"delta": ["delta"], "integrate": ["integrate"], "build": ["build"],
            "verify": ["verify", "build"], "report": ["report", "verify", "build"]}


def _add(p, opts):
    for dest, (_, _, hlp) in opts.items():
        p.add_argument("--" + dest.replace("_", "-"), dest=dest, default=None, help=hlp)


def _parser():
    ap = argparse.ArgumentParser(prog="lagforge", description=__doc__.split("\n")[0])
    ap.add_argument("--config", help="INI file with per-subcommand sections")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("delta", help="delta-inequality coefficient, bound and special values of d")
    p.add_argument("--n", type=int)
    p.add_argument("--parts", help="comma-separated n_1,...,n_k")
    p.add_argument("--h2", default=None, help="|H|^2 (rational or float), default 0")
    p.add_argument("--c", default=None, help="curvature parameter, default 0")
    p.add_argument("--d", default=None, help="classify this d (rational)")
    p.add_argument("--all", action="store_const", const=True, default=None, help="table of all partitions of n")
    p.add_argument("--json", action="store_const", const=True, default=None)

    p = sub.add_parser("integrate", help="integrate the profile system and write a trajectory CSV")
    _add(p, PROFILE_OPTS)
    p.add_argument("--out", help="output CSV (default stdout)")
    p.add_argument("--closed-form", dest="closed_form", action="store_const", const=True, default=None,
                   help="compare against the flat closed forms (c = 0)")

    p = sub.add_parser("build", help="build an immersion chart and write its samples")
    _add(p, PROFILE_OPTS)
    _add(p, BUILD_OPTS)
    p.add_argument("--out", help="chart sample file")
    p.add_argument("--samples", default=None, help="samples per axis in the chart file (default 31)")

    for name, hlp in (("verify", "verify a chart (built in-process or read with --input)"),
                      ("report", "human-readable pass/fail summary")):
        p = sub.add_parser(name, help=hlp)
        _add(p, PROFILE_OPTS)
        _add(p, BUILD_OPTS)
        _add(p, GRID_OPTS)
        p.add_argument("--input", help="chart file (verify) or report JSON (report)")
        p.add_argument("--json-out", dest="json_out", help="write the JSON report here")
        p.add_argument("--csv-out", dest="csv_out", help="write the per-point CSV here")
        if name == "report":
            p.add_argument("--plot-data", dest="plot_data", help="directory for plot-ready CSV files")
    return ap


def _resolve(args, opts, cfg):
    """Fill unset options from the config file, then from defaults."""
    for dest, (typ, default, _) in opts.items():
        if getattr(args, dest, None) is not None:
            val = getattr(args, dest)
        else:
            val = None
            for sec in SECTIONS.get(args.cmd, []):
                if cfg.has_option(sec, dest):
                    val = cfg.get(sec, dest)
                    break
            else:
                if cfg.defaults().get(dest) is not None:
                    val = cfg.defaults()[dest]
            if val is None:
                setattr(args, dest, default)
                continue
        try:
            setattr(args, dest, val if val is None else (_bool(val) if typ is bool else typ(val)))
        except ValueError:
            raise UsageError(f"--{dest.replace('_', '-')}: cannot parse {val!r}") from None


def _load_config(path):
    cfg = configparser.ConfigParser()
    if path:
        if not Path(path).exists():
            raise UsageError(f"config file not found: {path}")
        try:
            cfg.read(path)
        except configparser.Error as exc:
            raise UsageError(f"config file {path}: {exc}") from None
    return cfg


def _fmt(x):
    if isinstance(x, Fraction):
        return str(x)
    return f"{float(x):.17g}"


def _write(text, path):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- delta

def cmd_delta(args, cfg):
    _resolve(args, {"n": (int, None, ""), "parts": (str, None, ""), "h2": (str, "0", ""),
                    "c": (str, "0", ""), "d": (str, None, ""), "all": (bool, False, ""),
                    "json": (bool, False, "")}, cfg)
    if args.n is None:
        raise UsageError("--n is required")
    h2, c = parse_rational(args.h2), parse_rational(args.c)
    if args.all:
        parts = list(all_partitions(args.n))
    else:
        if not args.parts:
            raise UsageError("--parts is required (or --all)")
        parts = [Partition.parse(args.n, args.parts)]
    rows = []
    for p in parts:
        a = a_coefficient(p)
        rhs = delta_bound_rhs(p, h2, c)
        rows.append({"n": p.n, "parts": list(p.parts), "a": str(a), "a_decimal": float(a),
                     "curvature_weight": str(curvature_weight(p)), "rhs": str(rhs), "rhs_decimal": float(rhs)})
    out = {"partitions": rows}
    if args.d is not None:
        d = parse_rational(args.d)
        tag = classify_special_d(args.n, d)
        out["special"] = {"d": str(d), "case_one_m": tag.case_one_m, "case_two": tag.case_two,
                          "notes": list(tag.describe(args.n))}
    if args.json:
        print(json.dumps(out, indent=2, sort_keys=True))
        return EXIT_OK
    for r in rows:
        print(f"n={r['n']} parts=({','.join(map(str, r['parts']))})  a = {r['a']} ({_fmt(r['a_decimal'])})  "
              f"bound = {r['rhs']} ({_fmt(r['rhs_decimal'])})")
    if "special" in out:
        s = out["special"]
        if not s["notes"]:
            print(f"d = {s['d']}: no special case")
        for note in s["notes"]:
            print(f"d = {s['d']}: {note}")
    return EXIT_OK


# ---------------------------------------------------------------- integrate / build

def _trajectory(args):
    d = parse_rational(args.d)
    params = ProfileParams(args.c, d)
    lam0 = args.lam0
    if lam0 is None:
        if args.c == -1 and str(getattr(args, "branch", "auto")) == "3":
            if abs(args.mu0) >= 1:
                raise UsageError("branch 3 needs |mu0| < 1")
            lam0 = float(np.sqrt(1 - args.mu0 ** 2) / abs(float(d)))
        else:
            lam0 = 1.0
    if lam0 == 0:
        raise UsageError("lam0 must be nonzero")
    t_end = args.t0 + 1.0 if args.t_end is None else args.t_end
    return integrate(params, ProfileState(args.t0, lam0, args.mu0, args.theta0), t_end, args.step)


def _trajectory_csv(traj, extra=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = ["t", "lambda", "mu", "theta", "q_factor", "conserved"] + list(extra or {})
    w.writerow(cols)
    data = [traj.t, traj.lam, traj.mu, traj.theta, traj.q_factor(), traj.conserved()]
    data += list((extra or {}).values())
    for row in zip(*data):
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def cmd_integrate(args, cfg):
    _resolve(args, dict(PROFILE_OPTS, out=(str, None, ""), closed_form=(bool, False, "")), cfg)
    traj = _trajectory(args)
    extra = {}
    if args.closed_form:
        lam, mu, th = closed_form_along(traj)
        dev = np.maximum.reduce([np.abs(lam - traj.lam), np.abs(mu - traj.mu), np.abs(th - traj.theta)])
        extra["closed_form_deviation"] = dev
        print(f"max closed-form deviation: {_fmt(dev.max())}", file=sys.stderr)
    _write(_trajectory_csv(traj, extra), args.out)
    if traj.truncated:
        print(f"truncated: {traj.reason}", file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def _seed(args):
    name = args.seed or ("circle" if args.n == 2 else "torus")
    w = None
    if name in CATALOG:
        if name == "flat_line":
            seed, w = flat_line(args.w0)
        elif name == "lagrangian_plane":
            seed, w = lagrangian_plane(args.n, args.w0)
        else:
            seed = catalog_seed(name, args.n)
    elif Path(name).exists():
        seed = read_seed(name)
        if seed.n != args.n:
            raise UsageError(f"seed file {name} has n={seed.n}, but --n is {args.n}")
        if seed.target == "flat":
            w = solve_w(seed, w0=args.w0)
    else:
        raise UsageError(f"unknown seed {name!r}: not a catalog name ({', '.join(sorted(CATALOG))}) or a file")
    return seed, w


def _chart(args):
    d = parse_rational(args.d)
    if args.c not in (-1, 0, 1):
        raise UsageError("--c must be -1, 0 or 1")
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    check_d(d, args.n)
    seed, w = _seed(args)
    traj = _trajectory(args)
    return build(traj, seed, args.branch, w, args.form)


def cmd_build(args, cfg):
    _resolve(args, dict(PROFILE_OPTS, **BUILD_OPTS, out=(str, None, ""), samples=(int, 31, "")), cfg)
    chart = _chart(args)
    if not args.out:
        raise UsageError("--out is required")
    write_chart(args.out, chart, args.samples, args.samples)
    print(f"wrote {args.out}: {json.dumps(chart.meta, sort_keys=True, default=str)}", file=sys.stderr)
    return EXIT_TRUNCATED if chart.truncated else EXIT_OK


# ---------------------------------------------------------------- verify / report

def _tolerances(spec, base):
    tol = dict(base)
    if not spec:
        return tol
    for item in str(spec).split(","):
        if not item.strip():
            continue
        try:
            k, v = item.split("=")
            val = float(v)
        except ValueError:
            raise UsageError(f"bad tolerance override {item!r} (want name=value)") from None
        k = k.strip()
        if k not in tol:
            raise UsageError(f"unknown tolerance {k!r}; known: {', '.join(sorted(tol))}")
        tol[k] = val
    return tol


def _verify(args, cfg):
    _resolve(args, dict(PROFILE_OPTS, **BUILD_OPTS, **GRID_OPTS), cfg)
    if getattr(args, "input", None) and args.cmd == "verify":
        chart = read_chart(args.input)
        base = FILE_TOLERANCES
    else:
        chart = _chart(args)
        base = TOLERANCES
    vc = VerifyConfig(t_points=args.t_points, u_points=args.u_points, threads=args.threads,
                      tolerances=_tolerances(args.tol, base))
    return chart, run_report(chart, vc)


def _exit_for(report, truncated):
    if not report.passed:
        return EXIT_FAIL
    return EXIT_TRUNCATED if truncated else EXIT_OK


def cmd_verify(args, cfg):
    chart, rep = _verify(args, cfg)
    if args.json_out:
        Path(args.json_out).write_text(rep.to_json() + "\n")
    if args.csv_out:
        Path(args.csv_out).write_text(rep.to_csv())
    if not args.json_out:
        print(rep.to_json())
    return _exit_for(rep, chart.truncated)


def render(summary: dict, meta: dict, errors) -> str:
    lines = [f"chart: {json.dumps(meta, sort_keys=True, default=str)}"]
    width = max([len(k) for k in summary] + [5])
    for k in sorted(summary):
        s = summary[k]
        flag = "PASS" if s["passed"] else "FAIL"
        pt = ", ".join(f"{x:.4g}" for x in s["argmax_point"])
        lines.append(f"{flag}  {k:<{width}}  max {s['max']:.3e}  tol {s['tol']:.1e}  at ({pt})")
    for e in errors:
        lines.append(f"ERROR {e}")
    return "\n".join(lines) + "\n"


def cmd_report(args, cfg):
    if args.input:
        try:
            data = json.loads(Path(args.input).read_text())
            summary, meta, errors = data["checks"], data.get("meta", {}), data.get("errors", [])
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read report {args.input}: {exc}") from None
        sys.stdout.write(render(summary, meta, errors))
        passed = not errors and all(s["passed"] for s in summary.values())
        return EXIT_OK if passed else EXIT_FAIL
    chart, rep = _verify(args, cfg)
    sys.stdout.write(render(rep.summary, rep.meta, rep.errors))
    if args.json_out:
        Path(args.json_out).write_text(rep.to_json() + "\n")
    if args.csv_out:
        Path(args.csv_out).write_text(rep.to_csv())
    if args.plot_data:
        out = Path(args.plot_data)
        out.mkdir(parents=True, exist_ok=True)
        if chart.profile is not None:
            (out / "phase_portrait.csv").write_text(_trajectory_csv(chart.profile))
        (out / "residual_grid.csv").write_text(rep.to_csv())
    return _exit_for(rep, chart.truncated)


COMMANDS = {"delta": cmd_delta, "integrate": cmd_integrate, "build": cmd_build,
            "verify": cmd_verify, "report": cmd_report}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return COMMANDS[args.cmd](args, cfg)
    except (UsageError, PartitionError, BuildError, SeedError, DomainError, FileFormatError,
            VerificationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
