"""Command-line front end: ``lanemden <command> [flags]``.

Every command writes its files under ``--out`` together with a
``manifest.json`` listing parameters, tolerances and outputs.  Floats are
written with 17 significant digits so reruns are byte-identical.

Exit codes: 0 success, 1 partial failure, 2 invalid input, 3 numerical failure.
"""

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import metadata

import numpy as np

from . import asym, branch, eigen, kernels, morse, radial, scan, specfun
from .errors import LaneEmdenError

EXIT_OK, EXIT_PARTIAL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

# tolerance keys accepted by --tol-overrides, with their defaults
TOLERANCES = {
    "degeneracy_tol": morse.DEGENERACY_TOL,
    "p_xtol": scan.P_XTOL,
    "residual_tol": scan.RESIDUAL_TOL,
    "cone_tol": branch.CONE_TOL,
}


class InputError(ValueError):
    """Bad flags or configuration; maps to exit code 2."""


def fmt(x):
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return "" if x is None else str(x)


def _json_encode(obj, indent=0):
    # json.dumps writes floats with repr; fixed 17-digit output needs its own walk
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_json_encode(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        return "[" + ", ".join(_json_encode(v, indent + 1) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj), ensure_ascii=False)


def dumps(obj):
    return _json_encode(obj) + "\n"


def _version():
    try:
        return metadata.version("lanemden")
    except metadata.PackageNotFoundError:
        return "unknown"


@dataclass
class RunManifest:
    command: str
    parameters: dict
    tool_version: str
    tolerances: dict
    timestamp: str
    outputs: list = field(default_factory=list)

    def to_dict(self):
        return {
            "command": self.command, "parameters": self.parameters,
            "tool_version": self.tool_version, "tolerances": self.tolerances,
            "timestamp": self.timestamp, "outputs": sorted(self.outputs),
        }


class Writer:
    """Single writer for one output directory; records every file it creates."""

    def __init__(self, out):
        self.out = out
        self.files = []
        os.makedirs(out, exist_ok=True)

    def path(self, name):
        full = os.path.join(self.out, name)
        os.makedirs(os.path.dirname(full), exist_ok=True)
        self.files.append(name)
        return full

    def csv(self, name, header, rows):
        with open(self.path(name), "w", encoding="utf-8", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(header)
            for row in rows:
                out.writerow([fmt(v) for v in row])

    def json(self, name, obj):
        with open(self.path(name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps(obj))


def read_tolerances(path):
    """Parse a key=value file; blank lines and ``#`` comments are skipped."""
    tol = dict(TOLERANCES)
    if path is None:
        return tol
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read tolerance file: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep:
            raise InputError(f"{path}:{n}: expected key=value")
        if key not in TOLERANCES:
            raise InputError(f"{path}:{n}: unknown tolerance '{key}' (known: {', '.join(TOLERANCES)})")
        try:
            tol[key] = float(value)
        except ValueError:
            raise InputError(f"{path}:{n}: '{value}' is not a number") from None
        if not tol[key] > 0.0:
            raise InputError(f"{path}:{n}: {key} must be positive")
    return tol


def _sweep_grid(args, default=(1.05, 6.0, 32)):
    if args.p is not None:
        return np.array([args.p])
    lo = default[0] if args.p_lo is None else args.p_lo
    hi = default[1] if args.p_hi is None else args.p_hi
    count = default[2] if args.grid is None else args.grid
    if not 1.0 < lo < hi:
        raise InputError("need 1 < p-lo < p-hi")
    if count < 2:
        raise InputError("grid must be at least 2")
    return 1.0 + np.geomspace(lo - 1.0, hi - 1.0, count)


def _map(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# commands ------------------------------------------------------------------

def cmd_radial(args, w, tol):
    if args.p is None:
        raise InputError("radial needs --p")
    prof = radial.solve_radial(args.p, args.m)
    w.csv("profile.csv", ["r", "u", "du"], zip(prof.grid, prof.u, prof.du))
    w.json("landmarks.json", {
        "p": prof.p, "m": prof.m, "alpha": prof.alpha, "r1": prof.r1, "s_p": prof.s_p,
        "u_min": prof.u_min, "eps_plus": prof.eps_plus, "eps_minus": prof.eps_minus,
        "zeros": list(prof.zeros), "ode_residual": radial.ode_residual(prof),
    })
    return EXIT_OK


def cmd_spectrum(args, w, tol):
    if args.p is None:
        raise InputError("spectrum needs --p")
    prof = radial.solve_radial(args.p, args.m)
    ks = [args.k] if args.k is not None else list(range(0, 8))
    rows, summary = [], []
    for k in ks:
        spec = eigen.mode_spectrum(prof, k, args.count)
        rows += [(k, n, mu) for n, mu in enumerate(spec.mus)]
        summary.append({"k": k, "count_negative": spec.count_negative})
    w.csv("spectrum.csv", ["k", "n", "mu"], rows)
    w.json("spectrum.json", {"p": args.p, "m": args.m, "modes": summary})
    return EXIT_OK


def _morse_row(p, tol):
    try:
        prof = radial.solve_radial(float(p), 2)
        rep = morse.morse_report(prof, K=8, tol=tol["degeneracy_tol"])
    except LaneEmdenError as exc:
        return None, f"{type(exc).__name__}: {exc}"
    return rep, "ok"


def cmd_morse(args, w, tol):
    ps = _sweep_grid(args)
    results = _map(lambda p: _morse_row(p, tol), ps, args.threads)
    rows, log, failed = [], [], 0
    for p, (rep, status) in zip(ps, results):
        if rep is None:
            failed += 1
            rows.append([p] + [None] * 12 + [status])
            continue
        rows.append([p, rep.beta1, rep.beta2, rep.j, rep.m_full, *rep.m_k_tuple(8), status])
        log.append({"p": p, "degenerate": rep.degenerate, "kernel": str(rep.kernel),
                    "kernel_dimension": rep.kernel.dimension})
    header = ["p", "beta1", "beta2", "j", "m_full"] + [f"m_{k}" for k in range(1, 9)] + ["status"]
    w.csv("morse.csv", header, rows)
    w.json("degeneracy.json", {"tolerance": tol["degeneracy_tol"], "points": log})
    if failed == len(ps):
        return EXIT_NUMERIC
    return EXIT_PARTIAL if failed else EXIT_OK


def _exponent_record(e):
    return {"j": e.j, "p_star": e.p_star, "bracket": list(e.bracket), "direction": e.direction,
            "residual": e.residual, "index": e.index}


def cmd_scan(args, w, tol):
    js = [args.j] if args.j is not None else [3, 4, 5]
    lo = scan.DEFAULT_WINDOW[0] if args.p_lo is None else args.p_lo
    hi = scan.DEFAULT_WINDOW[1] if args.p_hi is None else args.p_hi
    grid = scan.DEFAULT_GRID if args.grid is None else args.grid
    records, all_ok = [], True
    for j in js:
        res = scan.scan_level(j, lo, hi, grid, threads=args.threads, xtol=tol["p_xtol"])
        verified = [c.residual < tol["residual_tol"] for c in res.crossings]
        all_ok &= bool(res.crossings) and all(verified)
        records.append({
            "j": j, "window": [lo, hi], "grid": grid, "crossing_count": len(res.crossings),
            "crossings": [dict(_exponent_record(c), verified=v) for c, v in zip(res.crossings, verified)],
            "tangencies": [_exponent_record(t) for t in res.tangencies],
            "closest": list(res.closest),
        })
    w.json("scan.json", {"levels": records})
    return EXIT_OK if all_ok else EXIT_PARTIAL


def _report_dict(rep):
    out = {}
    for name in rep.__dataclass_fields__:
        value = getattr(rep, name)
        out[name] = list(value) if isinstance(value, tuple) else value
    return out


def cmd_asym(args, w, tol):
    if args.regime == "near-one":
        rep = asym.validate_near_one()
    else:
        rep = asym.validate_large_p()
    w.json("asym.json", _report_dict(rep))
    return EXIT_OK


def _branch_origin(args, tol):
    lo = scan.DEFAULT_WINDOW[0] if args.p_lo is None else args.p_lo
    hi = scan.DEFAULT_WINDOW[1] if args.p_hi is None else args.p_hi
    grid = 32 if args.grid is None else args.grid
    crossings = scan.scan_level(args.k, lo, hi, grid, threads=args.threads, xtol=tol["p_xtol"]).crossings
    if not crossings:
        raise LaneEmdenError(f"no degenerate exponent for k={args.k} in ({lo}, {hi})")
    if not 0 <= args.origin_index < len(crossings):
        raise InputError(f"origin-index must lie in [0, {len(crossings) - 1}]")
    return crossings[args.origin_index]


def cmd_branch(args, w, tol):
    if args.k is None or args.k < 2:
        raise InputError("branch needs --k >= 2")
    origin = _branch_origin(args, tol)
    prof = radial.solve_radial(origin.p_star, 2)
    seed = branch.branch_switch(origin, args.amplitude * prof.alpha, prof)
    seg = branch.continue_branch(seed, args.direction, max_points=args.max_points)
    rows = []
    for n, pt in enumerate(seg.points):
        sol = pt.solution
        try:
            topo = branch.nodal_topology(sol)
            domains, quasi = topo.nodal_domain_count, topo.quasi_radial
        except LaneEmdenError:
            domains, quasi = None, None
        member, _ = branch.cone_membership(sol, rel_tol=tol["cone_tol"])
        rows.append((pt.arclength, pt.p, pt.amplitude, sol.residual, domains, quasi, member,
                     branch.energy(sol)))
        q = np.arange(sol.modes.shape[0]) * sol.k
        w.csv(f"modes/point_{n:03d}.csv", ["r"] + [f"c_{m}" for m in q],
              np.column_stack([sol.radial_grid, sol.modes.T]))
    w.csv("branch.csv", ["arclength", "p", "amplitude", "residual", "nodal_domain_count",
                         "quasi_radial", "cone_member", "energy"], rows)
    w.json("branch.json", {"k": seg.k, "origin": _exponent_record(origin),
                           "termination": seg.termination, "folds": list(seg.folds),
                           "points": len(seg.points)})
    return EXIT_OK


def _selftest_checks():
    lam = specfun.lambda_2rad()
    yield "bessel nu_02^2", abs(lam - 30.471262343662087) < 1e-9
    prof = radial.solve_radial(3.0, 2)
    yield "radial residual p=3", radial.ode_residual(prof) < 1e-8
    yield "radial one interior zero", len(prof.zeros) == 1
    spec = eigen.mode_spectrum(prof, 0, 3)
    yield "radial Morse index 2", spec.count_negative == 2
    rep = morse.morse_report(prof)
    yield "full Morse index even", rep.m_full == 2 * rep.j and rep.m_full >= 4
    yield f"kernel backend ({kernels.BACKEND})", kernels.BACKEND in ("cython", "python")


def cmd_selftest(args, w, tol):
    results = []
    for name, ok in _selftest_checks():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        results.append({"check": name, "passed": bool(ok)})
    w.json("selftest.json", {"checks": results})
    return EXIT_OK if all(r["passed"] for r in results) else EXIT_NUMERIC


COMMANDS = {
    "radial": cmd_radial, "spectrum": cmd_spectrum, "morse": cmd_morse, "scan": cmd_scan,
    "asym": cmd_asym, "branch": cmd_branch, "selftest": cmd_selftest,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=float, help="exponent p > 1")
    common.add_argument("--m", type=int, default=2, help="number of nodal regions")
    common.add_argument("--k", type=int, help="angular mode / symmetry order")
    common.add_argument("--j", type=int, help="level j of beta_1,rad = -j^2")
    common.add_argument("--p-lo", type=float, help="lower end of the p window")
    common.add_argument("--p-hi", type=float, help="upper end of the p window")
    common.add_argument("--grid", type=int, help="number of sweep points")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for independent sweeps")
    common.add_argument("--tol-overrides", help="key=value tolerance file")

    parser = argparse.ArgumentParser(prog="lanemden", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("radial", parents=[common], help="radial profile and landmarks")
    sp = sub.add_parser("spectrum", parents=[common], help="mode spectra of L_p")
    sp.add_argument("--count", type=int, default=4, help="eigenvalues per mode")
    sub.add_parser("morse", parents=[common], help="Morse indices over p")
    sub.add_parser("scan", parents=[common], help="degenerate exponents")
    sa = sub.add_parser("asym", parents=[common], help="asymptotic regimes")
    sa.add_argument("--regime", choices=("near-one", "large-p"), default="near-one")
    sb = sub.add_parser("branch", parents=[common], help="non-radial branch at p^k")
    sb.add_argument("--origin-index", type=int, default=0)
    sb.add_argument("--amplitude", type=float, default=0.025,
                    help="switching amplitude as a fraction of ||u_p||")
    sb.add_argument("--direction", type=int, choices=(-1, 1), default=1)
    sb.add_argument("--max-points", type=int, default=6)
    sub.add_parser("selftest", parents=[common], help="quick consistency checks")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be positive")
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("command",)}
    try:
        tol = read_tolerances(args.tol_overrides)
        writer = Writer(args.out)
        code = COMMANDS[args.command](args, writer, tol)
    except (LaneEmdenError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    manifest = RunManifest(args.command, params, _version(), tol,
                           datetime.now(timezone.utc).isoformat(timespec="seconds"), writer.files)
    with open(os.path.join(args.out, "manifest.json"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(manifest.to_dict()))
    return code


if __name__ == "__main__":
    sys.exit(main())
