"""Zero-thickness interface layer carrying the rigid rough profile.

A single array of 4-node interface elements sits on the skid's top side. The
two lower nodes of each element are tied to the bulk mesh; the upper pair is
never meshed: the profile elevation, evaluated from the spline table at each
quadrature point's position in the moving profile frame, takes its place. Only
vertical displacements enter the corrected normal gap, and non-penetration is
enforced by a linear penalty on the negative part of the gap.

The profile translates horizontally; the skid's window starts at the far end
of the profile data (x_offset) and traverses toward its origin, which makes
the tangential projection integral positive as sliding resistance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ProfileExhausted
from .mesh import Mesh
from .profile import SplineTable, eval_spline, eval_spline_slope

GAUSS_1D = 1.0 / np.sqrt(3.0)


@dataclass
class MotionLaw:
    """Rigid translation of the profile: rest, cubic-fillet ramp, plateau.

    y1(t) is the accumulated sliding distance (0 through Phase I); y2 is the
    fixed vertical placement. The fillet is the smoothstep velocity profile
    v_inst = v s^2 (3 - 2s), integrated exactly.
    """

    v: float
    t1: float
    t_ramp: float
    y2_offset: float = 0.0
    x_offset: float = 0.0


def motion_law_eval(m: MotionLaw, t: float):
    """(y1, y2, v_inst) at global time t (Phase I starts at t = 0)."""
    if t <= m.t1:
        return 0.0, m.y2_offset, 0.0
    te = t - m.t1
    if te <= m.t_ramp and m.t_ramp > 0.0:
        s = te / m.t_ramp
        v_inst = m.v * s * s * (3.0 - 2.0 * s)
        y1 = m.v * m.t_ramp * (s ** 3 - 0.5 * s ** 4)
        return y1, m.y2_offset, v_inst
    return m.v * (0.5 * m.t_ramp + (te - m.t_ramp)), m.y2_offset, m.v


@dataclass
class InterfaceLayer:
    """Quadrature-point data of the interface element array."""

    qp_x: np.ndarray      # (Q,) global x1 positions
    qp_w: np.ndarray      # (Q,) tributary weights (element length / 2)
    node_left: np.ndarray   # (Q,) bulk node tied to shape function N1
    node_right: np.ndarray  # (Q,)
    n1: np.ndarray        # (Q,) shape function values at the point
    n2: np.ndarray
    eps_n: float          # penalty stiffness (MPa/mm)
    elem_len: float

    @property
    def n_qp(self) -> int:
        return int(self.qp_x.size)


def build_interface(mesh: Mesh, eps_n: float) -> InterfaceLayer:
    """Two-point Gauss interface layer over the skid's top side."""
    if eps_n <= 0:
        raise ValueError("penalty parameter must be positive")
    xs = mesh.nodes[mesh.top_nodes, 0]
    ell = float(xs[1] - xs[0])
    mids = 0.5 * (xs[:-1] + xs[1:])
    qp_x = np.empty(2 * (xs.size - 1))
    qp_x[0::2] = mids - 0.5 * ell * GAUSS_1D
    qp_x[1::2] = mids + 0.5 * ell * GAUSS_1D
    left = np.repeat(mesh.top_nodes[:-1], 2)
    right = np.repeat(mesh.top_nodes[1:], 2)
    xi = np.tile([-GAUSS_1D, GAUSS_1D], xs.size - 1)
    n1 = 0.5 * (1.0 - xi)
    n2 = 0.5 * (1.0 + xi)
    w = np.full(qp_x.size, 0.5 * ell)
    return InterfaceLayer(qp_x, w, left, right, n1, n2, float(eps_n), ell)


def place_profile(spline: SplineTable, layer: InterfaceLayer, b_b: float):
    """Initial placement: window at the far end, minimum elevation touching.

    Returns (x_offset, y2_offset) such that at t = 0 the corrected gap over
    the window is nonnegative with minimum exactly zero at one quadrature
    point (single touching point, zero pressure).
    """
    extent = float(spline.knots[-1] - spline.knots[0])
    if extent < b_b:
        raise ProfileExhausted(
            f"profile extent {extent:g} mm shorter than the skid ({b_b:g} mm)")
    x_offset = float(spline.knots[-1]) - b_b
    z0 = eval_spline(spline, x_offset + layer.qp_x)
    return x_offset, -float(z0.min())


def locate_bracket(knots: np.ndarray, x):
    """(trailing, leading) knot indices with knots[tr] <= x < knots[le].

    Clamps to the first/last interval outside the knot range (the spline
    table records the clamp). leading is always trailing + 1.
    """
    xq = np.atleast_1d(np.asarray(x, dtype=float))
    tr = np.clip(np.searchsorted(knots, xq, side="right") - 1, 0, knots.size - 2)
    scalar = np.ndim(x) == 0
    if scalar:
        return int(tr[0]), int(tr[0]) + 1
    return tr, tr + 1


def profile_datum(layer: InterfaceLayer, spline: SplineTable,
                  motion: MotionLaw, t: float):
    """Profile elevation and slope at every quadrature point at time t.

    The elevation is expressed in the skid frame (vertical placement applied),
    ready to be compared against the deformed surface position.
    """
    y1, y2, _ = motion_law_eval(motion, t)
    x_loc = layer.qp_x + motion.x_offset - y1
    d = eval_spline(spline, x_loc) + y2
    slope = eval_spline_slope(spline, x_loc)
    return d, slope


def corrected_gap(layer: InterfaceLayer, u2_nodes: np.ndarray,
                  spline: SplineTable, motion: MotionLaw, t: float):
    """Corrected normal gap g* = profile elevation - interpolated surface lift.

    u2_nodes: vertical displacement per mesh node (full node array). The
    horizontal displacements never enter: the interface line is horizontal,
    so only the vertical kinematics survives in the gap.
    """
    d, _ = profile_datum(layer, spline, motion, t)
    u2q = layer.n1 * u2_nodes[layer.node_left] + layer.n2 * u2_nodes[layer.node_right]
    return d - u2q


def penalty_traction(g, eps_n: float):
    """p_n = eps_n * (-g) on penetration, zero on open gaps (compression > 0)."""
    g = np.asarray(g, dtype=float)
    out = np.where(g < 0.0, -eps_n * g, 0.0)
    return float(out) if out.ndim == 0 else out


def interface_forces(p_n, slope, w):
    """(P, Q) in N/mm: normal resultant and tangential projection integral."""
    p_n = np.asarray(p_n, dtype=float)
    total_p = float(np.sum(p_n * w))
    total_q = float(np.sum(p_n * slope * w))
    return total_p, total_q
