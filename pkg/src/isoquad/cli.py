"""Command-line surface: spectra, neighborhood search, curve traces, the
deformation study, and the bundled reproduction checks.

Outputs are CSV files (UTF-8, comma separated, header row, '.' decimal
separator, LF endings, 17 significant digits); every output file is
accompanied by a JSON manifest echoing the fully resolved configuration, so
a run can be repeated byte-identically from its manifest. Human-readable
output rounds to two decimals. Exit codes: 0 success, 1 reproduction-check
failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .continuation import CurvePoint, TraceConfig, deformation_study, trace_curve
from .discretization import UNIFORM_KAPPA, assemble
from .errors import IsoquadError
from .geometry import Quadrilateral, area, perimeter, validate
from .reproduce import SUITES, run_suites
from .search import SearchConfig, run_search
from .spectra import charpoly_invariants, eigenvalues

DEFAULTS = {
    "star": None,
    "scheme": "sp",
    "kappa": UNIFORM_KAPPA,
    "search": {
        "l": 0.1,
        "h": 0.0036,
        "epsilon": 1e-4,
        "prefilter": False,
        "area_tol": 1e-3,
    },
    "trace": {
        "method": "exact",
        "explicit": "beta",
        "T": 0.06,
        "M": 100,
        "fd_increment": 1e-6,
        "singular_tol": 1e-10,
    },
    # near-square continuations need a smaller singular threshold than plain
    # traces; the deformation schedule walks into that regime by design
    "deform": {"S": 10, "T0": 0.06, "singular_tol": 1e-14},
}

SEARCH_COLUMNS = (
    "alpha,beta,gamma,delta,c,lambda1,lambda2,lambda3,lambda4,err,area,perimeter"
)
TRACE_COLUMNS = "t,alpha,beta,gamma,delta,c,residual_norm,det_jacobian,truncated"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _deep_merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _load_config(path: str) -> dict:
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, dict) and "config" in doc and "command" in doc:
        doc = doc["config"]  # a manifest: reuse its embedded configuration
    if not isinstance(doc, dict):
        raise ValueError("config file must hold a JSON object")
    return doc


def _resolve(args, section: str) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if getattr(args, "config", None):
        cfg = _deep_merge(cfg, _load_config(args.config))
    if getattr(args, "star", None) is not None:
        a, b, g, d = args.star
        cfg["star"] = {"alpha": a, "beta": b, "gamma": g, "delta": d}
    if getattr(args, "scheme", None) is not None:
        cfg["scheme"] = args.scheme
    if getattr(args, "kappa", None) is not None:
        cfg["kappa"] = args.kappa
    flag_map = {
        "search": {
            "l": "l", "h": "h", "eps": "epsilon",
            "prefilter": "prefilter", "area_tol": "area_tol",
        },
        "trace": {
            "method": "method", "explicit": "explicit", "T": "T", "M": "M",
            "fd_increment": "fd_increment", "singular_tol": "singular_tol",
        },
        "deform": {"S": "S", "T0": "T0", "singular_tol": "singular_tol"},
    }
    for flag, key in flag_map.get(section, {}).items():
        value = getattr(args, flag, None)
        if value is not None:
            cfg[section][key] = value
    if section == "deform":
        for flag in ("method", "explicit", "M", "fd_increment"):
            value = getattr(args, flag, None)
            if value is not None:
                cfg["trace"][flag] = value
    return cfg


def _star_quad(cfg: dict) -> Quadrilateral:
    star = cfg.get("star")
    if star is None:
        raise IsoquadError("no reference quadrilateral given (use --star or a config file)")
    quad = Quadrilateral(
        float(star["alpha"]), float(star["beta"]), float(star["gamma"]), float(star["delta"])
    )
    validate(quad)
    return quad


def _write_manifest(out_path: Path, command: str, cfg: dict, duration: float,
                    outputs: list[str], diagnostics: dict) -> None:
    doc = {
        "command": command,
        "version": __version__,
        "config": cfg,
        "duration_s": duration,
        "outputs": outputs,
        "diagnostics": diagnostics,
    }
    out_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_lines(path: Path, lines) -> None:
    with open(path, "w", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_eigs(args) -> int:
    cfg = _resolve(args, "trace")
    values = args.values
    if len(values) == 4:
        quad = Quadrilateral(*values)
    elif len(values) == 8:
        v = np.array(values).reshape(4, 2)
        if not (np.allclose(v[0], [0.0, 0.0], atol=1e-12) and np.allclose(v[1], [1.0, 0.0], atol=1e-12)):
            print(
                "eigs: vertex input must have V1 = (0,0) and V2 = (1,0); "
                "rescale the domain into the nailed-edge family first",
                file=sys.stderr,
            )
            return 2
        quad = Quadrilateral(v[2, 0], v[2, 1], v[3, 0], v[3, 1])
    else:
        print("eigs: expected 4 shape parameters or 8 vertex coordinates", file=sys.stderr)
        return 2
    validate(quad)
    op = assemble(quad, cfg["scheme"], cfg["kappa"])
    lam = eigenvalues(op)
    xi = charpoly_invariants(op)
    if args.json:
        doc = {
            "params": {"alpha": quad.alpha, "beta": quad.beta, "gamma": quad.gamma, "delta": quad.delta},
            "scheme": cfg["scheme"],
            "kappa": cfg["kappa"],
            "eigenvalues": [float(v) for v in lam],
            "invariants": {f"xi{k}": xi[k] for k in range(4)},
            "area": area(quad),
            "perimeter": perimeter(quad),
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(f"scheme {cfg['scheme']}  kappa {cfg['kappa']:.6f}")
        print("eigenvalues:", " ".join(f"{v:.2f}" for v in lam))
        print("invariants (xi0..xi3):", " ".join(f"{v:.2f}" for v in xi))
        print(f"area: {area(quad):.2f}  perimeter: {perimeter(quad):.2f}")
    return 0


def _search_rows(cands):
    for cand in cands:
        quad = cand.quad
        fields = (
            [quad.alpha, quad.beta, quad.gamma, quad.delta, cand.c]
            + list(cand.lambdas)
            + [cand.err, cand.area, cand.perimeter]
        )
        yield ",".join(_fmt(v) for v in fields)


def cmd_search(args) -> int:
    cfg = _resolve(args, "search")
    quad = _star_quad(cfg)
    sc = SearchConfig(
        l=cfg["search"]["l"],
        h=cfg["search"]["h"],
        epsilon=cfg["search"]["epsilon"],
        scheme=cfg["scheme"],
        kappa=cfg["kappa"],
        area_prefilter=bool(cfg["search"]["prefilter"]),
        area_tol=cfg["search"]["area_tol"],
    )
    t0 = time.perf_counter()
    cands, stats = run_search(quad, sc)
    duration = time.perf_counter() - t0
    lines = [SEARCH_COLUMNS]
    lines.extend(_search_rows(cands))
    out = Path(args.out)
    _write_lines(out, lines)
    diagnostics = {
        "n_enumerated": stats.n_enumerated,
        "n_invalid": stats.n_invalid,
        "n_prefiltered": stats.n_prefiltered,
        "n_complex": stats.n_complex,
        "n_accepted": stats.n_accepted,
        "n_distinct_spectra": stats.n_distinct_spectra,
        "n_same_area": stats.n_same_area,
        "n_same_perimeter": stats.n_same_perimeter,
        "area_star": stats.area_star,
        "perimeter_star": stats.perimeter_star,
    }
    _write_manifest(out.with_name(out.name + ".manifest.json"), "search", cfg,
                    duration, [str(out)], diagnostics)
    print(
        f"search: {stats.n_accepted} accepted of {stats.n_enumerated} candidates "
        f"({stats.n_same_area} share area, {stats.n_same_perimeter} share perimeter) -> {out}"
    )
    return 0


def _trace_config(cfg: dict, singular_tol=None) -> TraceConfig:
    tr = cfg["trace"]
    return TraceConfig(
        explicit_param=tr["explicit"],
        T=tr["T"],
        M=int(tr["M"]),
        method=tr["method"],
        fd_increment=tr["fd_increment"],
        singular_tol=tr["singular_tol"] if singular_tol is None else singular_tol,
        scheme=cfg["scheme"],
        kappa=cfg["kappa"],
    )


def _trace_lines(result):
    lines = [TRACE_COLUMNS]
    rows = result.rows()
    flagged = set()
    for branch in (result.negative, result.positive):
        if branch.truncated and branch.points:
            flagged.add(id(branch.points[-1]))
    for row in rows:
        p = row.point
        fields = [row.t, p.alpha, p.beta, p.gamma, p.delta, p.c, row.residual_norm, row.det]
        lines.append(",".join(_fmt(v) for v in fields) + f",{1 if id(row) in flagged else 0}")
    return lines


def cmd_trace(args) -> int:
    cfg = _resolve(args, "trace")
    quad = _star_quad(cfg)
    tc = _trace_config(cfg)
    t0 = time.perf_counter()
    result = trace_curve(CurvePoint.from_quad(quad), tc)
    duration = time.perf_counter() - t0
    out = Path(args.out)
    _write_lines(out, _trace_lines(result))
    diagnostics = {
        "truncated_negative": result.negative.truncated,
        "truncated_positive": result.positive.truncated,
        "reason_negative": result.negative.reason,
        "reason_positive": result.positive.reason,
        "points_negative": len(result.negative.points),
        "points_positive": len(result.positive.points),
    }
    _write_manifest(out.with_name(out.name + ".manifest.json"), "trace", cfg,
                    duration, [str(out)], diagnostics)
    n_rows = len(result.rows())
    status = " (truncated)" if result.truncated else ""
    print(f"trace: {n_rows} rows{status} -> {out}")
    return 0


def cmd_deform(args) -> int:
    cfg = _resolve(args, "deform")
    quad = _star_quad(cfg)
    tc = _trace_config(cfg, singular_tol=cfg["deform"]["singular_tol"])
    s_steps = int(cfg["deform"]["S"])
    t0 = time.perf_counter()
    steps = deformation_study(quad, s_steps, cfg["deform"]["T0"], tc)
    duration = time.perf_counter() - t0
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    summary = [
        "j,s,alpha,beta,gamma,delta,T,points_negative,points_positive,"
        "truncated_negative_at,truncated_positive_at,error"
    ]
    for step in steps:
        row = [
            str(step.j),
            _fmt(step.s),
            _fmt(step.quad.alpha),
            _fmt(step.quad.beta),
            _fmt(step.quad.gamma),
            _fmt(step.quad.delta),
            _fmt(step.T),
        ]
        if step.trace is None:
            row.extend(["0", "0", "-1", "-1", step.error or "error"])
        else:
            fname = out_dir / f"step_{step.j:02d}.csv"
            _write_lines(fname, _trace_lines(step.trace))
            outputs.append(str(fname))
            neg, pos = step.trace.negative, step.trace.positive
            row.extend(
                [
                    str(len(neg.points)),
                    str(len(pos.points)),
                    str(neg.last_valid_index if neg.truncated else -1),
                    str(pos.last_valid_index if pos.truncated else -1),
                    "",
                ]
            )
        summary.append(",".join(row))
    summary_path = out_dir / "summary.csv"
    _write_lines(summary_path, summary)
    outputs.append(str(summary_path))
    diagnostics = {
        "steps": len(steps),
        "errors": sum(1 for s in steps if s.error),
        "truncated_steps": sum(
            1 for s in steps if s.trace is not None and s.trace.truncated
        ),
    }
    _write_manifest(out_dir / "manifest.json", "deform", cfg, duration, outputs, diagnostics)
    print(f"deform: {len(steps)} steps -> {out_dir}")
    return 0


def cmd_reproduce(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    checks = run_suites(names)
    width = max(len(c.name) for c in checks) + 2
    n_pass = 0
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        n_pass += c.passed
        print(f"[{status}] {c.name:<{width}} expected {c.expected}; got {c.got} (tol {c.tol})")
    print(f"{n_pass}/{len(checks)} checks passed")
    return 0 if n_pass == len(checks) else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(sub):
    sub.add_argument("--scheme", choices=("fd", "sp"), default=None)
    sub.add_argument("--kappa", type=float, default=None)
    sub.add_argument("--config", default=None, help="JSON config (or manifest) file")


def _add_star(sub):
    sub.add_argument(
        "--star", type=float, nargs=4, metavar=("ALPHA", "BETA", "GAMMA", "DELTA"),
        default=None, help="shape parameters of the reference quadrilateral",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isoquad",
        description="4x4 discrete elliptic operators on quadrilaterals: "
        "epsilon-isospectral search and isospectral-curve continuation",
    )
    parser.add_argument("--version", action="version", version=f"isoquad {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("eigs", help="eigenvalues and invariants of one quadrilateral")
    p.add_argument("values", type=float, nargs="+",
                   help="alpha beta gamma delta, or 8 vertex coordinates")
    p.add_argument("--json", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_eigs)

    p = subs.add_parser("search", help="exhaustive epsilon-isospectral neighborhood search")
    _add_star(p)
    p.add_argument("--l", type=float, default=None, help="side of the vertex boxes")
    p.add_argument("--h", type=float, default=None, help="grid step inside the boxes")
    p.add_argument("--eps", type=float, default=None, help="acceptance tolerance")
    p.add_argument("--prefilter", action="store_const", const=True, default=None,
                   help="skip candidates whose raw area is off before eigencomputation")
    p.add_argument("--area-tol", dest="area_tol", type=float, default=None)
    p.add_argument("--out", required=True, help="output CSV path")
    _add_common(p)
    p.set_defaults(func=cmd_search)

    p = subs.add_parser("trace", help="trace the local isospectral curve")
    _add_star(p)
    p.add_argument("--method", choices=("exact", "fd"), default=None)
    p.add_argument("--explicit", choices=("alpha", "beta", "gamma", "delta"), default=None)
    p.add_argument("--T", type=float, default=None, help="half-range of the explicit parameter")
    p.add_argument("--M", type=int, default=None, help="steps per branch")
    p.add_argument("--fd-increment", dest="fd_increment", type=float, default=None)
    p.add_argument("--singular-tol", dest="singular_tol", type=float, default=None)
    p.add_argument("--out", required=True, help="output CSV path")
    _add_common(p)
    p.set_defaults(func=cmd_trace)

    p = subs.add_parser("deform", help="deformation schedule toward the unit square")
    _add_star(p)
    p.add_argument("--S", type=int, default=None, help="number of interpolation steps")
    p.add_argument("--T0", type=float, default=None, help="half-range at the start domain")
    p.add_argument("--method", choices=("exact", "fd"), default=None)
    p.add_argument("--explicit", choices=("alpha", "beta", "gamma", "delta"), default=None)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--fd-increment", dest="fd_increment", type=float, default=None)
    p.add_argument("--singular-tol", dest="singular_tol", type=float, default=None)
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p)
    p.set_defaults(func=cmd_deform)

    p = subs.add_parser("reproduce", help="run the bundled reference checks")
    p.add_argument("--suite", choices=("all",) + SUITES, default="all")
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IsoquadError as exc:
        print(f"{args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
