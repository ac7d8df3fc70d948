"""CSV / JSON / heatmap emitters, run manifests, config files.

Every CLI run writes its artifacts plus a manifest.json echoing the fully
resolved configuration and a sha256 per artifact; feeding the manifest back
through --config reproduces the CSV outputs byte for byte.  Floats are
formatted with repr, the shortest round-trip form.
"""

from __future__ import annotations

import hashlib
import json
import math
from importlib import resources

import numpy as np

from .continuation import Branch, detect_turning_points
from .errors import InvalidInput
from .regions import ParamGrid, RegionMask
from .scan import OrbitClass, ScanResult
from .correspondence import Direction

__all__ = [
    "SCHEMA_VERSION",
    "load_palette",
    "write_region_csv",
    "read_region_csv",
    "write_grid_sidecar",
    "write_scan_csv",
    "write_branch_csv",
    "write_branch_meta",
    "region_heatmap",
    "scan_heatmap",
    "write_manifest",
    "load_config_file",
    "sha256_file",
]

SCHEMA_VERSION = "1"


def load_palette(version: int = 1) -> dict:
    name = f"palette_v{version}.json"
    with resources.files("ailimit.data").joinpath(name).open("r") as fh:
        return json.load(fh)


def _fmt(x) -> str:
    return repr(float(x))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


# ---------------------------------------------------------------- regions

def write_region_csv(mask: RegionMask, path) -> None:
    rv = mask.grid.r_values
    cv = mask.grid.c_values
    with open(path, "w") as fh:
        fh.write("r,c,label,direction\n")
        for i in range(mask.grid.nr):
            for j in range(mask.grid.nc):
                fh.write(f"{_fmt(rv[i])},{_fmt(cv[j])},"
                         f"{int(mask.labels[i, j])},{mask.direction.value}\n")


def read_region_csv(path) -> RegionMask:
    """Rebuild a mask from its CSV; the lattice is recovered from the
    coordinate columns, which must form a full regular grid."""
    rs, cs, labels, directions = [], [], [], set()
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "r,c,label,direction":
            raise InvalidInput(f"unrecognized region CSV header: {header!r}")
        for line in fh:
            r_s, c_s, l_s, d_s = line.rstrip("\n").split(",")
            rs.append(float(r_s))
            cs.append(float(c_s))
            labels.append(int(l_s))
            directions.add(d_s)
    if len(directions) != 1:
        raise InvalidInput("region CSV mixes directions")
    r_vals = sorted(set(rs))
    c_vals = sorted(set(cs))
    nr, nc = len(r_vals), len(c_vals)
    if nr * nc != len(labels):
        raise InvalidInput("region CSV does not cover a full grid")
    grid = ParamGrid(r_min=r_vals[0], r_max=r_vals[-1],
                     c_min=c_vals[0], c_max=c_vals[-1], nr=nr, nc=nc)
    r_index = {v: i for i, v in enumerate(r_vals)}
    c_index = {v: j for j, v in enumerate(c_vals)}
    lab = np.zeros((nr, nc), dtype=np.int32)
    for r, c, l in zip(rs, cs, labels):
        lab[r_index[r], c_index[c]] = l
    n_max = int(lab.max()) if lab.size else 0
    return RegionMask(grid=grid, labels=lab,
                      direction=Direction(directions.pop()), n_max=n_max)


def write_grid_sidecar(grid, path, extra: dict | None = None) -> None:
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update({k: getattr(grid, k) for k in grid.__dataclass_fields__})
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _ramp(start, end, frac):
    return [int(round(s + (e - s) * frac)) for s, e in zip(start, end)]


def region_heatmap(mask: RegionMask, palette: dict) -> np.ndarray:
    """Rows run from c_max down to c_min so the image reads like a plot."""
    ramp = (palette["region_forward"] if mask.direction is Direction.FORWARD
            else palette["region_backward"])
    bg = palette["background"]
    solid = palette["region_analytic"]
    nr, nc = mask.grid.nr, mask.grid.nc
    img = np.zeros((nc, nr, 3), dtype=np.uint8)
    span = max(1, mask.n_max)
    for i in range(nr):
        for j in range(nc):
            label = int(mask.labels[i, j])
            if label <= 0:
                color = bg
            elif mask.kind == "maps-into":
                color = solid
            else:
                frac = (label - 1) / span
                color = _ramp(ramp["start"], ramp["end"], frac)
            img[nc - 1 - j, i] = color
    return img


# ------------------------------------------------------------------- scan

def write_scan_csv(result: ScanResult, path) -> None:
    av = result.grid.alpha_values
    rv = result.grid.r_values
    with open(path, "w") as fh:
        fh.write("alpha,r,class,period,lyapunov\n")
        for i in range(result.grid.na):
            for j in range(result.grid.nr):
                cell = result.cells[i][j]
                period = "" if cell.period is None else str(cell.period)
                lam = "" if cell.lyapunov is None else _fmt(cell.lyapunov)
                fh.write(f"{_fmt(av[i])},{_fmt(rv[j])},"
                         f"{cell.classification},{period},{lam}\n")


def scan_heatmap(result: ScanResult, palette: dict) -> np.ndarray:
    classes = palette["classes"]
    anchors = palette["period_anchors"]
    na, nr = result.grid.na, result.grid.nr
    img = np.zeros((nr, na, 3), dtype=np.uint8)
    for i in range(na):
        for j in range(nr):
            cell = result.cells[i][j]
            if cell.classification == OrbitClass.PERIODIC:
                color = anchors[(cell.period - 1) % len(anchors)]
            else:
                color = classes[cell.classification]
            img[nr - 1 - j, i] = color
    return img


# ----------------------------------------------------------------- branch

def write_branch_csv(branch: Branch, path) -> None:
    n = branch.points[0].state.xi.shape[0]
    cols = ",".join(f"xi_{t}" for t in range(n))
    with open(path, "w") as fh:
        fh.write(f"k,epsilon,alpha,{cols},residual,step_len\n")
        for k, pt in enumerate(branch.points):
            eps = pt.state.epsilon
            alpha = -math.inf if eps == 0.0 else -1.0 / (eps * eps)
            xi = ",".join(_fmt(v) for v in pt.state.xi)
            fh.write(f"{k},{_fmt(eps)},{_fmt(alpha)},{xi},"
                     f"{_fmt(pt.residual_norm)},{_fmt(pt.step_len)}\n")


def write_branch_meta(branch: Branch, path) -> None:
    turning = [{"epsilon": e, "alpha": a}
               for e, a in detect_turning_points(branch)]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "symbols": str(branch.symbols),
        "period": branch.symbols.period,
        "termination": branch.termination.value,
        "points": len(branch.points),
        "max_epsilon": branch.max_epsilon,
        "turning_points": turning,
        "log": branch.log,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --------------------------------------------------------------- manifest

def write_manifest(path, command: str, config: dict, artifacts: dict,
                   wall_time_s: float, palette_version: int | None = None) -> None:
    import scipy

    from . import __version__

    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "artifacts": {name: sha256_file(p) for name, p in artifacts.items()},
        "wall_time_s": wall_time_s,
        "versions": {
            "ailimit": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    if palette_version is not None:
        doc["palette_version"] = palette_version
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_config_file(path) -> dict:
    """Read a flat key=value config file, or pull the config block out of a
    previously emitted JSON manifest."""
    text = open(path).read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        return doc.get("config", doc)
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidInput(f"bad config line {lineno}: {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out
