"""Text formats for sampled seeds and immersion charts.

Seed file:   header ``n=<int> target=<sphere|ads|flat> dims=<int>`` (dims = number
             of complex components), then rows ``u2 .. un re(z1) im(z1) ...``.
Chart file:  first line a JSON object with the chart meta, then rows
             ``t u2 .. un re(z1) im(z1) ...``.

Both are rectangular grids; on reading they are turned back into smooth
maps by tensor-product quintic B-spline interpolation.
"""
import json
from pathlib import Path

import numpy as np
from scipy.interpolate import NdBSpline, make_interp_spline

from .immersions import ImmersionChart
from .linalg import AmbientSpace
from .seeds import SeedMap, certify_seed

SPLINE_DEGREE = 5
TARGETS = ("sphere", "ads", "flat")


class FileFormatError(ValueError):
    pass


def _fmt_row(vals):
    return " ".join(f"{v:.17g}" for v in vals)


def _rows(points, values):
    z = np.asarray(values, complex)
    inter = np.empty((len(z), 2 * z.shape[1]))
    inter[:, 0::2], inter[:, 1::2] = z.real, z.imag
    return [_fmt_row(np.concatenate([p, r])) for p, r in zip(np.asarray(points, float), inter)]


def _parse_table(lines, start, ncols, path):
    rows = []
    for lineno, line in enumerate(lines[start:], start + 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if len(parts) != ncols:
            raise FileFormatError(f"{path}:{lineno}: expected {ncols} columns, got {len(parts)}")
        try:
            row = [float(x) for x in parts]
        except ValueError as exc:
            raise FileFormatError(f"{path}:{lineno}: {exc}") from None
        if not np.all(np.isfinite(row)):
            raise FileFormatError(f"{path}:{lineno}: non-finite value")
        rows.append(row)
    if not rows:
        raise FileFormatError(f"{path}: no data rows")
    return np.array(rows)


class GridSpline:
    """Vector-valued tensor-product B-spline through samples on a rectangular grid."""

    def __init__(self, points, values, degree: int = SPLINE_DEGREE, path="<grid>"):
        points = np.asarray(points, float)
        values = np.asarray(values, complex)
        axes = [np.unique(points[:, i]) for i in range(points.shape[1])]
        shape = tuple(len(a) for a in axes)
        if int(np.prod(shape)) != len(points):
            raise FileFormatError(f"{path}: samples do not form a rectangular grid")
        for i, a in enumerate(axes):
            if len(a) <= degree:
                raise FileFormatError(f"{path}: axis {i} has {len(a)} samples, need > {degree} for degree {degree}")
        idx = tuple(np.searchsorted(a, points[:, i]) for i, a in enumerate(axes))
        m = values.shape[1]
        data = np.empty(shape + (2 * m,))
        data[idx] = np.concatenate([values.real, values.imag], axis=1)
        knots = []
        for i, a in enumerate(axes):
            spl = make_interp_spline(a, data, k=degree, axis=i)
            data = np.moveaxis(spl.c, 0, i)
            knots.append(spl.t)
        self.m = m
        self.axes = axes
        self.domain = tuple((float(a[0]), float(a[-1])) for a in axes)
        self._spline = NdBSpline(tuple(knots), data, degree)

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, float))
        out = self._spline(x)
        return out[:, :self.m] + 1j * out[:, self.m:]


def write_seed(path, seed: SeedMap, grid=None, points: int = 11):
    if grid is None:
        axes = [np.linspace(lo, hi, points) for lo, hi in seed.domain]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, seed.chart_dim)
    vals = seed.evaluator(grid)
    lines = [f"n={seed.n} target={seed.target} dims={vals.shape[1]}"] + _rows(grid, vals)
    Path(path).write_text("\n".join(lines) + "\n")


def read_seed(path, certify: bool = True) -> SeedMap:
    path = str(path)
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise FileFormatError(f"{path}:1: empty file")
    try:
        head = dict(kv.split("=", 1) for kv in lines[0].split())
        n, target, m = int(head["n"]), head["target"], int(head["dims"])
    except (KeyError, ValueError):
        raise FileFormatError(f"{path}:1: header must be 'n=<int> target=<sphere|ads|flat> dims=<int>'") from None
    if target not in TARGETS:
        raise FileFormatError(f"{path}:1: unknown target {target!r}")
    expect = n if target != "flat" else n - 1
    if m != expect:
        raise FileFormatError(f"{path}:1: dims={m} inconsistent with n={n} and target={target} (expected {expect})")
    table = _parse_table(lines, 1, (n - 1) + 2 * m, path)
    pts, raw = table[:, :n - 1], table[:, n - 1:]
    spline = GridSpline(pts, raw[:, 0::2] + 1j * raw[:, 1::2], path=path)
    seed = SeedMap(Path(path).stem, target, n, spline, spline.domain)
    if certify:
        grid = np.stack(np.meshgrid(*[np.linspace(lo, hi, 7)[1:-1] for lo, hi in spline.domain],
                                    indexing="ij"), -1).reshape(-1, n - 1)
        seed.report = certify_seed(seed, grid)
        seed.certified = seed.report["certified"]
    return seed


def chart_meta(chart: ImmersionChart) -> dict:
    meta = {k: v for k, v in (chart.meta or {}).items() if isinstance(v, (str, int, float, bool, type(None)))}
    meta.update({"c": chart.ambient.curvature_c, "n": chart.chart_dim,
                 "signature": [int(s) for s in chart.ambient.sig], "lift_norm": chart.lift_norm,
                 "truncated": bool(chart.truncated)})
    return meta


def sample_chart(chart: ImmersionChart, t_points: int = 21, u_points: int = 21, margin: float = 0.0):
    pts = chart.grid(t_points, u_points, margin)
    return pts, chart.evaluator(pts)


def write_chart(path, chart: ImmersionChart, t_points: int = 21, u_points: int = 21, margin: float = 0.0):
    pts, vals = sample_chart(chart, t_points, u_points, margin)
    lines = [json.dumps(chart_meta(chart), sort_keys=True)] + _rows(pts, vals)
    Path(path).write_text("\n".join(lines) + "\n")


def read_chart(path) -> ImmersionChart:
    path = str(path)
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise FileFormatError(f"{path}:1: empty file")
    try:
        meta = json.loads(lines[0])
        n, sig = int(meta["n"]), [int(s) for s in meta["signature"]]
        c = int(meta["c"])
    except (ValueError, KeyError, TypeError):
        raise FileFormatError(f"{path}:1: first line must be a JSON object with n, c and signature") from None
    m = len(sig)
    table = _parse_table(lines, 1, n + 2 * m, path)
    pts, raw = table[:, :n], table[:, n:]
    spline = GridSpline(pts, raw[:, 0::2] + 1j * raw[:, 1::2], path=path)
    ambient = AmbientSpace(c, m if c == 0 else m - 1, tuple(sig))
    lift = meta.get("lift_norm")
    meta = dict(meta, source=path)
    return ImmersionChart(ambient, n, spline, spline.domain, meta, None, None,
                          None if lift is None else float(lift), None, bool(meta.get("truncated", False)))
