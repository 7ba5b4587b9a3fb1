"""Similarity dimension and point embeddings of dice generations.

A generation built from n-sided dice consists of n-sided dice again, so each
member can be read as the point ``(x(0), x(1/n), ..., x((n-1)/n))`` in
rational n-space.  The point sets are self-similar: m copies of the previous
generation, each scaled by ``eps = 1/lambda``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .generation import BasicTuple, Generation
from .quantile import format_rational, to_rational


@dataclass(frozen=True)
class DimensionReport:
    m: int
    lam: Fraction
    d: float
    d_sup: float
    r: Fraction
    R: Fraction

    @property
    def fractal_dust(self) -> bool:
        return self.d < 1

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "lambda": format_rational(self.lam),
            "d": format(self.d, ".12g"),
            "d_sup": format(self.d_sup, ".12g"),
            "r": format_rational(self.r),
            "R": format_rational(self.R),
            "fractal_dust": self.fractal_dust,
        }


def similarity_dimension(m: int, lam) -> float:
    """``ln m / ln lambda`` for m copies scaled by ``1/lambda``."""
    if m < 1:
        raise ValueError("m must be positive")
    lam = to_rational(lam) if not isinstance(lam, float) else lam
    if lam <= 1:
        raise ValueError(f"lambda must exceed 1, got {lam}")
    return math.log(m) / math.log(lam)


def dimension_sup(basic: BasicTuple) -> float:
    return similarity_dimension(basic.m, 1 + basic.R / basic.r)


def dimension_report(basic: BasicTuple, lam=None) -> DimensionReport:
    """Dimension at ``lam`` (default: the boundary value ``1 + R/r``)."""
    lam = 1 + basic.R / basic.r if lam is None else to_rational(lam)
    return DimensionReport(
        basic.m, lam, similarity_dimension(basic.m, lam), dimension_sup(basic), basic.r, basic.R
    )


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank over the rationals by fraction-free (Bareiss) elimination."""
    mat = []
    for row in rows:
        scale = 1
        for v in row:
            scale = math.lcm(scale, Fraction(v).denominator)
        mat.append([int(Fraction(v) * scale) for v in row])
    if not mat:
        return 0
    nrows, ncols = len(mat), len(mat[0])
    r = 0
    prev = 1
    for col in range(ncols):
        pivot = next((i for i in range(r, nrows) if mat[i][col]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        p = mat[r][col]
        for i in range(r + 1, nrows):
            a = mat[i][col]
            row_i, row_r = mat[i], mat[r]
            for c in range(col + 1, ncols):
                row_i[c] = (row_i[c] * p - a * row_r[c]) // prev
            row_i[col] = 0
        prev = p
        r += 1
        if r == nrows:
            break
    return r


def _index_str(idx: tuple) -> str:
    if all(d < 10 for d in idx):
        return "".join(map(str, idx))
    return ".".join(map(str, idx)) + ("." if len(idx) == 1 else "")


def _parse_index(text: str) -> tuple:
    if "." in text:
        return tuple(int(t) for t in text.split(".") if t)
    return tuple(int(ch) for ch in text)


@dataclass(frozen=True)
class PointCloud:
    n: int
    points: tuple  # of (index, tuple of Fractions)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple((tuple(i), tuple(p)) for i, p in self.points))
        for idx, p in self.points:
            if len(p) != self.n:
                raise ValueError(f"point {idx} has {len(p)} coordinates, expected {self.n}")

    def __len__(self):
        return len(self.points)

    @cached_property
    def affine_rank(self) -> int:
        return affine_rank(self)

    def point_set(self) -> set:
        return {p for _, p in self.points}


def embed_points(gen: Generation, n: int | None = None) -> PointCloud:
    """One point ``(x(0), x(1/n), ..., x((n-1)/n))`` per member.

    ``n`` defaults to the common grid of the basic dice.
    """
    if n is None:
        n = 1
        for x0 in gen.basic.members:
            n = math.lcm(n, x0.grid_size())
    pts = tuple((idx, q.dice_faces(n)) for idx, q in gen.members.items())
    return PointCloud(n, pts)


def affine_rank(cloud: PointCloud) -> int:
    """Dimension of the affine span: 0 for a point, 1 collinear, 2 coplanar."""
    if not cloud.points:
        raise ValueError("empty point cloud")
    base = cloud.points[0][1]
    diffs = [[a - b for a, b in zip(p, base)] for _, p in cloud.points[1:]]
    return rank(diffs)


def self_similar_union(basic_points: Sequence[Sequence[Fraction]], eps, prev: PointCloud) -> set:
    """Points of ``eps * v_i + eps * prev`` over all basic points ``v_i``."""
    eps = to_rational(eps)
    return {
        tuple(eps * a + eps * b for a, b in zip(v, p))
        for v in basic_points
        for _, p in prev.points
    }


def export_csv(cloud: PointCloud) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", *(f"x{j}" for j in range(1, cloud.n + 1))])
    for idx, p in sorted(cloud.points, key=lambda t: t[0]):
        w.writerow([_index_str(idx), *map(format_rational, p)])
    return buf.getvalue()


def parse_csv(text: str) -> PointCloud:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    n = len(header) - 1
    pts = [(_parse_index(row[0]), tuple(Fraction(v) for v in row[1:])) for row in body]
    return PointCloud(n, pts)


# -- SVG ---------------------------------------------------------------------

CANVAS = 640
MARGIN = 56


def _span_basis(cloud: PointCloud) -> list:
    """Up to two difference vectors, chosen greedily, that are exactly independent."""
    base = cloud.points[0][1]
    chosen: list = []
    for _, p in cloud.points[1:]:
        diff = [a - b for a, b in zip(p, base)]
        if rank(chosen + [diff]) > len(chosen):
            chosen.append(diff)
            if len(chosen) == 2:
                break
    return chosen


def _orthonormal(vectors) -> np.ndarray:
    out = []
    for v in vectors:
        w = np.array([float(x) for x in v])
        for e in out:
            w = w - (w @ e) * e
        out.append(w / np.linalg.norm(w))
    return np.array(out)


def _projection_axes(cloud: PointCloud, projection) -> tuple[np.ndarray, tuple[str, str], str | None]:
    n = cloud.n
    if projection != "best_fit_plane":
        i, j = projection
        if not (1 <= i <= n and 1 <= j <= n and i != j):
            raise ValueError(f"bad coordinate pair {projection} for n={n}")
        axes = np.zeros((2, n))
        axes[0, i - 1] = 1.0
        axes[1, j - 1] = 1.0
        return axes, (f"x{i}", f"x{j}"), None
    rk = cloud.affine_rank
    if rk == 0:
        axes, labels, _ = _projection_axes(cloud, (1, 2))
        return axes, labels, "degenerate cloud (affine rank 0): showing coordinates x1, x2"
    if rk <= 2:
        axes = _orthonormal(_span_basis(cloud))
        if len(axes) == 1:
            axes = np.vstack([axes, np.zeros(n)])
        return axes, ("e1", "e2"), None
    pts = np.array([[float(v) for v in p] for _, p in cloud.points])
    _, _, vt = np.linalg.svd(pts - pts.mean(axis=0), full_matrices=False)
    axes = vt[:2].copy()
    for row in axes:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1
    return axes, ("pc1", "pc2"), f"affine rank {rk}: least-squares plane"


def project(cloud: PointCloud, projection="best_fit_plane") -> np.ndarray:
    """2-D float coordinates of the cloud under ``projection``."""
    axes, _, _ = _projection_axes(cloud, projection)
    pts = np.array([[float(v) for v in p] for _, p in cloud.points])
    return pts @ axes.T


def export_svg(cloud: PointCloud, projection="best_fit_plane") -> str:
    """Scatter plot of the cloud as a standalone SVG document.

    ``projection`` is ``"best_fit_plane"`` or a 1-based coordinate pair
    ``(i, j)``.
    """
    if cloud.n < 2:
        raise ValueError("need at least two coordinates to draw")
    axes, labels, warning = _projection_axes(cloud, projection)
    pts = np.array([[float(v) for v in p] for _, p in cloud.points]) @ axes.T

    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    extent = float(max(hi - lo)) or 1.0
    inner = CANVAS - 2 * MARGIN
    scale = inner / extent

    def to_px(x, y):
        return MARGIN + (x - lo[0]) * scale, CANVAS - MARGIN - (y - lo[1]) * scale

    w_px, h_px = (hi - lo) * scale
    diag = math.hypot(w_px, h_px) or math.hypot(inner, inner)
    radius = diag / 200

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
        f'viewBox="0 0 {CANVAS} {CANVAS}">',
        f'<rect x="0" y="0" width="{CANVAS}" height="{CANVAS}" fill="white"/>',
    ]
    x0, y0 = MARGIN - 12, CANVAS - MARGIN + 12
    out.append(
        f'<g class="axes" stroke="#444" stroke-width="1">'
        f'<line x1="{x0}" y1="{y0}" x2="{CANVAS - MARGIN}" y2="{y0}"/>'
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{MARGIN}"/></g>'
    )
    out.append(
        f'<g font-family="sans-serif" font-size="12" fill="#222">'
        f'<text x="{CANVAS - MARGIN}" y="{y0 + 18}" text-anchor="end">{labels[0]}</text>'
        f'<text x="{x0 - 6}" y="{MARGIN}" text-anchor="end">{labels[1]}</text>'
        f'<text x="{MARGIN}" y="{y0 + 18}">{lo[0]:.4g}</text>'
        f'<text x="{x0 - 6}" y="{CANVAS - MARGIN}" text-anchor="end">{lo[1]:.4g}</text>'
        "</g>"
    )
    if warning:
        out.append(
            f'<text class="warning" x="{MARGIN}" y="{MARGIN / 2:.0f}" font-family="sans-serif" '
            f'font-size="12" fill="#a00">{warning}</text>'
        )
    out.append('<g class="points" fill="#1f4e8c">')
    for (idx, _), (x, y) in zip(cloud.points, pts):
        px, py = to_px(x, y)
        label = _index_str(idx) or "()"
        out.append(
            f'<circle cx="{px:.3f}" cy="{py:.3f}" r="{radius:.3f}"><title>{label}</title></circle>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
