"""Batch command-line front end.

Flags resolve in three layers: built-in defaults, then a --config file
(flat key=value lines, or a manifest.json from a previous run), then
explicit flags.  File-emitting commands write a manifest.json recording the
resolved configuration and a sha256 per artifact; re-running with that
manifest as --config reproduces the CSV outputs byte for byte.

Exit codes: 0 success, 2 bad input, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

from . import artifacts as art
from .continuation import (ContinuationConfig, continue_branch,
                           detect_turning_points, double_sequence,
                           doubling_curve_alpha)
from .core import (MapParams, State3, classify_conic, conic_center,
                   fixed_points_ai)
from .correspondence import Direction
from .errors import AiLimitError, InvalidInput, NumericalFailure
from .raster import write_png
from .regions import (ParamGrid, compute_RA, compute_Rn, hausdorff_distance,
                      read_region_csv, analytic_RA_backward,
                      analytic_RA_forward)
from .scan import (ScanConfig, ScanGrid, attractor_scan, close_returns,
                   symbols_from_orbit)
from .symbols import SymbolSequence

__all__ = ["main"]


def _parse_float_triplet(text, what):
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidInput(f"bad {what} spec {text!r}, want min:max:n")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidInput(f"bad {what} spec {text!r}")


def _parse_grid(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise InvalidInput(f"bad grid spec {text!r}, want two axes")
    return _parse_float_triplet(parts[0], "axis"), _parse_float_triplet(parts[1], "axis")


def _parse_ic(text) -> State3:
    parts = text.split(",")
    if len(parts) != 3:
        raise InvalidInput(f"bad initial condition {text!r}, want x,y,z")
    try:
        return State3(*(float(p) for p in parts))
    except ValueError:
        raise InvalidInput(f"bad initial condition {text!r}")


def _parse_direction(text) -> Direction:
    key = str(text).lower()
    if key in ("fwd", "forward"):
        return Direction.FORWARD
    if key in ("bwd", "backward"):
        return Direction.BACKWARD
    raise InvalidInput(f"bad direction {text!r}, want fwd or bwd")


def _parse_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).lower() in ("1", "true", "yes", "on")


class _Options:
    """Layered option lookup: flags over config file over defaults."""

    def __init__(self, args):
        self.args = args
        self.config = (art.load_config_file(args.config)
                       if getattr(args, "config", None) else {})
        self.resolved = {}

    def get(self, name, conv, default=None, required=False):
        value = getattr(self.args, name.replace("-", "_"), None)
        if value is None:
            value = self.config.get(name)
        if value is None:
            if required:
                raise InvalidInput(f"missing required option --{name}")
            value = default
        if value is not None and isinstance(value, str) and conv is not str:
            value = conv(value)
        if conv is bool and value is not None:
            value = _parse_bool(value)
        self.resolved[name] = value
        return value


def _ensure_out(path):
    os.makedirs(path, exist_ok=True)
    return path


def _default_threads():
    return os.cpu_count() or 1


# ----------------------------------------------------------------- classify

def cmd_classify(args) -> int:
    opts = _Options(args)
    r = opts.get("r", float, required=True)
    c = opts.get("c", float, required=True)
    conic = classify_conic(r, c)
    print(f"class: {conic.value}")
    if c != 0.0:
        print(f"center: {conic_center(r, c)!r}")
    else:
        print("center: undefined")
    lo, hi = fixed_points_ai(r)
    print(f"fixed_points: xi_minus={lo!r} xi_plus={hi!r}")
    print(f"RA_forward: {analytic_RA_forward(r, c)}")
    print(f"RA_backward: {analytic_RA_backward(r, c)}")
    return 0


# ------------------------------------------------------------------ regions

def cmd_regions(args) -> int:
    opts = _Options(args)
    grid_spec = opts.get("grid", str, required=True)
    (r_min, r_max, nr), (c_min, c_max, nc) = _parse_grid(grid_spec)
    direction = _parse_direction(opts.get("direction", str, default="fwd"))
    analytic = opts.get("analytic", bool, default=False)
    n_max = opts.get("n-max", int, default=1)
    seeds = opts.get("seeds", int, default=100)
    threads = opts.get("threads", int, default=_default_threads())
    out = _ensure_out(opts.get("out", str, required=True))
    opts.resolved["direction"] = "fwd" if direction is Direction.FORWARD else "bwd"

    t0 = time.time()
    grid = ParamGrid(r_min=r_min, r_max=r_max, c_min=c_min, c_max=c_max,
                     nr=nr, nc=nc)
    if analytic:
        mask = compute_RA(grid, direction)
    else:
        mask = compute_Rn(grid, n_max, direction, num_seeds=seeds,
                          threads=threads)
    palette = art.load_palette()
    csv_path = os.path.join(out, "regions.csv")
    png_path = os.path.join(out, "regions.png")
    grid_path = os.path.join(out, "grid.json")
    art.write_region_csv(mask, csv_path)
    write_png(png_path, art.region_heatmap(mask, palette))
    art.write_grid_sidecar(grid, grid_path, extra={
        "direction": mask.direction.value, "kind": mask.kind,
        "n_max": mask.n_max})
    art.write_manifest(os.path.join(out, "manifest.json"), "regions",
                       opts.resolved,
                       {"regions.csv": csv_path, "regions.png": png_path,
                        "grid.json": grid_path},
                       time.time() - t0, palette_version=palette["version"])
    print(f"regions: wrote {csv_path}")
    return 0


def cmd_hausdorff(args) -> int:
    opts = _Options(args)
    path_a = opts.get("mask-a", str, required=True)
    path_b = opts.get("mask-b", str, required=True)
    d = hausdorff_distance(read_region_csv(path_a), read_region_csv(path_b))
    print(repr(d))
    return 0


# --------------------------------------------------------------------- scan

def cmd_scan(args) -> int:
    opts = _Options(args)
    grid_spec = opts.get("grid", str, required=True)
    (a_min, a_max, na), (r_min, r_max, nr) = _parse_grid(grid_spec)
    kappa = opts.get("kappa-max", float, required=True)
    delta = opts.get("delta", float, default=0.05)
    a = opts.get("a", float, default=1.0)
    b = opts.get("b", float, default=0.0)
    c = opts.get("c", float, default=0.0)
    transient = opts.get("transient", int, default=5000)
    period_max = opts.get("period-max", int, default=90)
    return_tol = opts.get("return-tol", float, default=1e-4)
    lyap_steps = opts.get("lyap-steps", int, default=20000)
    lyap_discard = opts.get("lyap-discard", int, default=1000)
    chaos_threshold = opts.get("chaos-threshold", float, default=0.01)
    ic_text = opts.get("ic", str, default=None)
    threads = opts.get("threads", int, default=_default_threads())
    out = _ensure_out(opts.get("out", str, required=True))

    t0 = time.time()
    grid = ScanGrid(alpha_min=a_min, alpha_max=a_max, r_min=r_min,
                    r_max=r_max, na=na, nr=nr)
    params = MapParams.structural(a=a, c=c, delta=delta, b=b)
    cfg = ScanConfig(kappa_max=kappa, transient_T=transient,
                     return_tol=return_tol, period_max=period_max,
                     explicit_ic=None if ic_text is None else _parse_ic(ic_text),
                     lyap_steps=lyap_steps, lyap_discard=lyap_discard,
                     chaos_threshold=chaos_threshold)
    result = attractor_scan(grid, params, cfg, threads=threads)
    palette = art.load_palette()
    csv_path = os.path.join(out, "scan.csv")
    png_path = os.path.join(out, "scan.png")
    grid_path = os.path.join(out, "grid.json")
    art.write_scan_csv(result, csv_path)
    write_png(png_path, art.scan_heatmap(result, palette))
    art.write_grid_sidecar(grid, grid_path)
    art.write_manifest(os.path.join(out, "manifest.json"), "scan",
                       opts.resolved,
                       {"scan.csv": csv_path, "scan.png": png_path,
                        "grid.json": grid_path},
                       time.time() - t0, palette_version=palette["version"])
    print(f"scan: wrote {csv_path}")
    return 0


# ----------------------------------------------------------------- continue

def _continuation_config(opts) -> ContinuationConfig:
    return ContinuationConfig(
        ell0=opts.get("ell0", float, default=None),
        ell_min=opts.get("ell-min", float, default=1e-15),
        jump_threshold=opts.get("jump-threshold", float, default=0.1),
        corrector_tol=opts.get("corrector-tol", float, default=1e-12),
        max_corrector_iters=opts.get("max-corrector-iters", int, default=150),
        initial_eps_dot=opts.get("initial-eps-dot", float, default=0.005),
        eps_max=opts.get("eps-max", float, default=1.6),
    )


def cmd_continue(args) -> int:
    opts = _Options(args)
    seq = SymbolSequence.parse(opts.get("symbols", str, required=True))
    r = opts.get("r", float, required=True)
    c = opts.get("c", float, default=0.0)
    delta = opts.get("delta", float, default=0.05)
    direction = _parse_direction(opts.get("direction", str, default="fwd"))
    cfg = _continuation_config(opts)
    out = _ensure_out(opts.get("out", str, required=True))
    opts.resolved["symbols"] = str(seq)
    opts.resolved["direction"] = "fwd" if direction is Direction.FORWARD else "bwd"

    t0 = time.time()
    branch = continue_branch(seq, r, c, delta, cfg, direction=direction)
    csv_path = os.path.join(out, "branch.csv")
    meta_path = os.path.join(out, "branch.json")
    art.write_branch_csv(branch, csv_path)
    art.write_branch_meta(branch, meta_path)
    art.write_manifest(os.path.join(out, "manifest.json"), "continue",
                       opts.resolved,
                       {"branch.csv": csv_path, "branch.json": meta_path},
                       time.time() - t0)
    turning = detect_turning_points(branch)
    print(f"continue: {len(branch.points)} points, "
          f"termination={branch.termination.value}, "
          f"max_epsilon={branch.max_epsilon!r}, turning_points={turning}")
    return 0


# ----------------------------------------------------------------- pipeline

def cmd_pipeline(args) -> int:
    opts = _Options(args)
    alpha = opts.get("alpha", float, required=True)
    r = opts.get("r", float, required=True)
    ic = _parse_ic(opts.get("ic", str, required=True))
    threshold = opts.get("threshold", float, default=0.005)
    max_steps = opts.get("max-steps", int, default=1500)
    delta = opts.get("delta", float, default=0.05)
    c = opts.get("c", float, default=0.0)
    max_branches = opts.get("max-branches", int, default=1)
    eps_max_margin = opts.get("eps-max-margin", float, default=0.15)
    out = _ensure_out(opts.get("out", str, required=True))
    if alpha >= 0.0:
        raise InvalidInput("pipeline requires alpha < 0")

    t0 = time.time()
    eps = 1.0 / math.sqrt(-alpha)
    sigma = r / eps
    params = MapParams.reduced(alpha=alpha, sigma=sigma, c=c, delta=delta)
    events = close_returns(ic, params, threshold, max_steps)
    files = {}
    returns_path = os.path.join(out, "returns.csv")
    with open(returns_path, "w") as fh:
        fh.write("period,distance\n")
        for period, dist in events:
            fh.write(f"{period},{dist!r}\n")
    files["returns.csv"] = returns_path
    if not events:
        raise NumericalFailure(
            f"no close return within {max_steps} steps at threshold {threshold}")

    # Re-run the orbit once to capture the x series for symbol extraction.
    from .core import map_forward
    longest = max(p for p, _ in events[:max_branches])
    xs = [ic.x]
    state = ic
    for _ in range(longest):
        state = map_forward(state, params)
        xs.append(state.x)

    cfg = _continuation_config(opts)
    summary = []
    for period, dist in events[:max_branches]:
        seq = symbols_from_orbit(xs[:period], eps)
        branch = continue_branch(
            seq, r, c, delta,
            ContinuationConfig(ell0=cfg.ell0, ell_min=cfg.ell_min,
                               jump_threshold=cfg.jump_threshold,
                               corrector_tol=cfg.corrector_tol,
                               max_corrector_iters=cfg.max_corrector_iters,
                               initial_eps_dot=cfg.initial_eps_dot,
                               eps_max=eps + eps_max_margin))
        tag = f"branch_p{period}"
        csv_path = os.path.join(out, f"{tag}.csv")
        meta_path = os.path.join(out, f"{tag}.json")
        art.write_branch_csv(branch, csv_path)
        art.write_branch_meta(branch, meta_path)
        files[f"{tag}.csv"] = csv_path
        files[f"{tag}.json"] = meta_path
        summary.append((period, dist, branch.max_epsilon,
                        branch.termination.value))

    art.write_manifest(os.path.join(out, "manifest.json"), "pipeline",
                       opts.resolved, files, time.time() - t0)
    for period, dist, max_eps, term in summary:
        print(f"pipeline: period={period} return_distance={dist!r} "
              f"max_epsilon={max_eps!r} termination={term}")
    return 0


# ----------------------------------------------------------------- doubling

def cmd_doubling(args) -> int:
    opts = _Options(args)
    seq = SymbolSequence.parse(opts.get("symbols", str, required=True))
    count = opts.get("count", int, default=1)
    if count < 0:
        raise InvalidInput("count must be >= 0")
    print(f"{seq.period} {seq}")
    for _ in range(count):
        seq = double_sequence(seq)
        print(f"{seq.period} {seq}")
    return 0


def cmd_doubling_curve(args) -> int:
    opts = _Options(args)
    r = opts.get("r", float, required=True)
    delta = opts.get("delta", float, required=True)
    roots = doubling_curve_alpha(r, delta)
    if roots is None:
        print("no real doubling roots")
        return 0
    print(f"alpha1: {roots[0]!r}")
    print(f"alpha2: {roots[1]!r}")
    return 0


# --------------------------------------------------------------------- main

def _add_common(sub):
    sub.add_argument("--config", help="flat key=value file or a manifest.json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ailimit",
        description="Anti-integrable limit toolkit for 3D quadratic maps")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("classify", help="classify the AI curve at (r, c)")
    sp.add_argument("--r", type=float)
    sp.add_argument("--c", type=float)
    _add_common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = subs.add_parser("regions", help="contraction / maps-into masks")
    sp.add_argument("--grid", help="rmin:rmax:nr,cmin:cmax:nc")
    sp.add_argument("--n-max", type=int)
    sp.add_argument("--direction", choices=["fwd", "bwd"])
    sp.add_argument("--seeds", type=int)
    sp.add_argument("--analytic", action="store_true", default=None)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--out")
    _add_common(sp)
    sp.set_defaults(func=cmd_regions)

    sp = subs.add_parser("hausdorff", help="distance between two mask CSVs")
    sp.add_argument("--mask-a")
    sp.add_argument("--mask-b")
    _add_common(sp)
    sp.set_defaults(func=cmd_hausdorff)

    sp = subs.add_parser("scan", help="attractor classification scan")
    sp.add_argument("--grid", help="amin:amax:na,rmin:rmax:nr")
    sp.add_argument("--kappa-max", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--a", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--ic", help="explicit initial condition x,y,z")
    sp.add_argument("--transient", type=int)
    sp.add_argument("--period-max", type=int)
    sp.add_argument("--return-tol", type=float)
    sp.add_argument("--lyap-steps", type=int)
    sp.add_argument("--lyap-discard", type=int)
    sp.add_argument("--chaos-threshold", type=float)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--out")
    _add_common(sp)
    sp.set_defaults(func=cmd_scan)

    sp = subs.add_parser("continue", help="continue a symbol word in epsilon")
    sp.add_argument("--symbols", help="sign word, run-length counts allowed")
    sp.add_argument("--r", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--direction", choices=["fwd", "bwd"])
    sp.add_argument("--ell0", type=float)
    sp.add_argument("--eps-max", type=float)
    sp.add_argument("--out")
    _add_common(sp)
    sp.set_defaults(func=cmd_continue)

    sp = subs.add_parser("pipeline",
                         help="close returns -> symbols -> AI state -> branch")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--r", type=float)
    sp.add_argument("--ic", help="attractor point x,y,z")
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--max-steps", type=int)
    sp.add_argument("--max-branches", type=int)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--out")
    _add_common(sp)
    sp.set_defaults(func=cmd_pipeline)

    sp = subs.add_parser("doubling", help="repeat the doubling rule on a word")
    sp.add_argument("--symbols")
    sp.add_argument("--count", type=int)
    _add_common(sp)
    sp.set_defaults(func=cmd_doubling)

    sp = subs.add_parser("doubling-curve",
                         help="alpha roots of the fixed-point doubling curve")
    sp.add_argument("--r", type=float)
    sp.add_argument("--delta", type=float)
    _add_common(sp)
    sp.set_defaults(func=cmd_doubling_curve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except AiLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
