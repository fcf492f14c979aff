"""Structured graded quadrilateral mesh of the rectangular skid.

The contact (top) side carries a band of square elements of width b/m_x whose
depth is twice the coarsest element size; below it, 2:1 transition bands halve
the column count level by level, and the remainder of the block is filled with
rows at the coarsest size. Transition bands are conforming all-quad templates
spanning four fine columns -> two coarse columns (six quads, three interior
nodes), which is why m_x must be divisible by 2**(n_levels+1).

Coordinates: x1 in [0, b], x2 in [-h, 0] with the contact side at x2 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGrading

# 2x2 Gauss rule on the bilinear reference square
GAUSS_PTS = np.array([(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]) / np.sqrt(3.0)


@dataclass
class Mesh:
    nodes: np.ndarray        # (N, 2)
    quads: np.ndarray        # (E, 4) counterclockwise
    top_nodes: np.ndarray    # (m_x + 1,) left -> right along x2 = 0
    bottom_nodes: np.ndarray
    left_nodes: np.ndarray   # edge nodes top -> bottom, x1 = 0
    right_nodes: np.ndarray  # same heights as left_nodes, x1 = b
    element_size: np.ndarray
    b: float
    h: float
    m_x: int
    n_levels: int
    meta: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def n_elems(self) -> int:
        return int(self.quads.shape[0])


def auto_n_levels(b: float, h: float, m_x: int) -> int:
    """Deepest grading with coarsest size ~b/8 and fine depth 2x the coarsest.

    Falls back toward 0 when m_x divisibility or the block height disallow
    deeper coarsening, so meshes of different m_x built with 'auto' stay
    geometrically self-similar.
    """
    s0 = b / m_x
    n_cap = max(0, int(np.floor(np.log2(m_x))) - 3)
    for n in range(n_cap, 0, -1):
        if m_x % (2 ** (n + 1)) != 0:
            continue
        depth = (2 ** (n + 2) - 2) * s0
        if h - depth >= 0.5 * (2 ** n) * s0:
            return n
    return 0


def build_block_mesh(b: float, h: float, m_x: int, n_levels: int) -> Mesh:
    """Graded block mesh; raises InvalidGrading when constraints cannot hold."""
    if b <= 0 or h <= 0:
        raise InvalidGrading("block dimensions must be positive")
    if m_x < 1 or n_levels < 0:
        raise InvalidGrading("m_x >= 1 and n_levels >= 0 required")
    s0 = b / m_x
    if n_levels > 0:
        block = 2 ** (n_levels + 1)
        if m_x % block != 0:
            raise InvalidGrading(
                f"m_x={m_x} not divisible by 2^(n_levels+1)={block} "
                "(transition bands pair coarse columns)")
        depth = (2 ** (n_levels + 2) - 2) * s0
        if h <= depth:
            raise InvalidGrading(
                f"block height {h:g} too small for n_levels={n_levels} "
                f"(fine band + transitions need > {depth:g})")

    nodes: list = []
    quads: list = []
    esize: list = []
    left: list = []
    right: list = []

    def add_row(y: float, ncols: int) -> np.ndarray:
        xs = np.linspace(0.0, b, ncols + 1)
        base = len(nodes)
        nodes.extend((x, y) for x in xs)
        ids = np.arange(base, base + ncols + 1)
        left.append(ids[0])
        right.append(ids[-1])
        return ids

    def add_band(upper: np.ndarray, lower: np.ndarray, size: float) -> None:
        for i in range(upper.size - 1):
            quads.append((lower[i], lower[i + 1], upper[i + 1], upper[i]))
            esize.append(size)

    top = add_row(0.0, m_x)
    prev = top

    if n_levels == 0:
        nrows = max(1, int(round(h / s0)))
        dz = h / nrows
        for r in range(1, nrows + 1):
            row = add_row(-r * dz, m_x)
            add_band(prev, row, s0)
            prev = row
    else:
        fine_rows = 2 ** (n_levels + 1)
        for r in range(1, fine_rows + 1):
            row = add_row(-r * s0, m_x)
            add_band(prev, row, s0)
            prev = row
        y = -fine_rows * s0
        cols = m_x
        for k in range(n_levels):
            sk = s0 * 2 ** k
            y_bot = y - 2.0 * sk
            bot = add_row(y_bot, cols // 2)
            for j in range(cols // 4):
                f = prev[4 * j: 4 * j + 5]
                c = bot[2 * j: 2 * j + 3]
                x0 = nodes[f[0]][0]
                base = len(nodes)
                nodes.append((x0 + sk, y - sk))          # L
                nodes.append((x0 + 2.0 * sk, y - 1.25 * sk))  # M
                nodes.append((x0 + 3.0 * sk, y - sk))    # R
                ln, mn, rn = base, base + 1, base + 2
                new = [
                    (c[0], ln, f[1], f[0]),
                    (ln, mn, f[2], f[1]),
                    (mn, rn, f[3], f[2]),
                    (rn, c[2], f[4], f[3]),
                    (c[0], c[1], mn, ln),
                    (c[1], c[2], rn, mn),
                ]
                quads.extend(new)
                esize.extend([2.0 * sk] * 6)
            prev = bot
            cols //= 2
            y = y_bot
        sn = s0 * 2 ** n_levels
        remaining = h + y  # y is negative
        nrows = max(1, int(round(remaining / sn)))
        for r in range(1, nrows + 1):
            yr = -h if r == nrows else y - r * remaining / nrows
            row = add_row(yr, cols)
            add_band(prev, row, sn)
            prev = row

    mesh = Mesh(
        nodes=np.asarray(nodes, dtype=float),
        quads=np.asarray(quads, dtype=np.int64),
        top_nodes=top,
        bottom_nodes=prev,
        left_nodes=np.asarray(left, dtype=np.int64),
        right_nodes=np.asarray(right, dtype=np.int64),
        element_size=np.asarray(esize, dtype=float),
        b=float(b), h=float(h), m_x=int(m_x), n_levels=int(n_levels),
    )
    audit = audit_mesh(mesh)
    if audit["min_jacobian"] <= 0.0:
        raise InvalidGrading(f"non-positive Jacobian ({audit['min_jacobian']:g})")
    if abs(audit["area"] - b * h) > 1e-9 * b * h:
        raise InvalidGrading("mesh does not tile the block exactly")
    mesh.meta.update(audit)
    return mesh


def _jacobians(nodes, quads):
    """det J at the 2x2 Gauss points of every quad, shape (E, 4)."""
    coords = nodes[quads]  # (E, 4, 2)
    dets = np.empty((quads.shape[0], 4))
    for g, (xi, eta) in enumerate(GAUSS_PTS):
        dn_dxi = 0.25 * np.array([-(1 - eta), (1 - eta), (1 + eta), -(1 + eta)])
        dn_deta = 0.25 * np.array([-(1 - xi), -(1 + xi), (1 + xi), (1 - xi)])
        j11 = coords[:, :, 0] @ dn_dxi
        j12 = coords[:, :, 1] @ dn_dxi
        j21 = coords[:, :, 0] @ dn_deta
        j22 = coords[:, :, 1] @ dn_deta
        dets[:, g] = j11 * j22 - j12 * j21
    return dets


def audit_mesh(mesh: Mesh) -> dict:
    """Geometry checks: Jacobians, tiled area, top-row uniformity, fine depth."""
    dets = _jacobians(mesh.nodes, mesh.quads)
    area = float(dets.sum())  # unit Gauss weights: sum det = element areas
    top_x = mesh.nodes[mesh.top_nodes, 0]
    top_gaps = np.diff(top_x)
    s0 = mesh.b / mesh.m_x
    fine_depth = (2 ** (mesh.n_levels + 1)) * s0 if mesh.n_levels > 0 else mesh.h
    coarsest = s0 * 2 ** mesh.n_levels
    return {
        "min_jacobian": float(dets.min()),
        "area": area,
        "top_uniform": bool(np.allclose(top_gaps, s0, rtol=1e-12, atol=0.0)),
        "fine_depth": float(fine_depth),
        "coarsest_size": float(coarsest),
        "fine_depth_ok": bool(fine_depth >= 2.0 * coarsest - 1e-12 * coarsest),
    }


def dump_mesh_csv(mesh: Mesh, nodes_path, quads_path) -> None:
    """Nodes and connectivity as two CSV files."""
    with open(nodes_path, "w", encoding="utf-8") as fh:
        fh.write("node,x1_mm,x2_mm\n")
        for i, (x1, x2) in enumerate(mesh.nodes):
            fh.write(f"{i},{float(x1)!r},{float(x2)!r}\n")
    with open(quads_path, "w", encoding="utf-8") as fh:
        fh.write("elem,n1,n2,n3,n4\n")
        for e, q in enumerate(mesh.quads):
            fh.write(f"{e},{q[0]},{q[1]},{q[2]},{q[3]}\n")
