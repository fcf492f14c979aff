"""Plane-strain bilinear-quad FEM with generalized-Maxwell internal variables.

The viscous strain of each arm follows the exponential integrator that is
exact for a strain history linear in time over the step:
    eps_v' = beta eps_v + (1 - beta) eps_old + (1 - gamma) (eps_new - eps_old)
with beta = exp(-dt/tau) and gamma = (tau/dt)(1 - beta). Its consistent
tangent is C(E0) + sum_i gamma_i C(E_i) (instantaneous as dt -> 0, fully
relaxed as dt -> inf), and the per-step dissipation is integrated in closed
form along the same linear path, so it is nonnegative by construction. Since
nu is constant, every tangent is the unit-modulus plane-strain matrix scaled
by the algorithmic modulus E_alg(dt) = E0 + sum_i gamma_i E_i; stiffness is
assembled once per geometry and rescaled per time-step size.

Forces are per millimetre of out-of-plane thickness. Voigt order is
[eps_11, eps_22, gamma_12] with engineering shear.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import FactorizationFailed, SingularSystem
from .mesh import GAUSS_PTS, Mesh


def plane_strain_unit(nu: float) -> np.ndarray:
    """Plane-strain stiffness matrix for unit Young's modulus."""
    f = 1.0 / ((1.0 + nu) * (1.0 - 2.0 * nu))
    return f * np.array([
        [1.0 - nu, nu, 0.0],
        [nu, 1.0 - nu, 0.0],
        [0.0, 0.0, (1.0 - 2.0 * nu) / 2.0],
    ])


def elastic_matrix(e: float, nu: float) -> np.ndarray:
    return e * plane_strain_unit(nu)


def _beta_gamma(tau: float, dt: float):
    """exp(-dt/tau) and its ramp average (tau/dt)(1 - exp(-dt/tau))."""
    x = dt / tau
    beta = np.exp(-x)
    gamma = -np.expm1(-x) / x  # cancellation-safe for small dt/tau
    return beta, gamma


def alg_modulus(m, dt: float) -> float:
    """Algorithmic modulus E0 + sum gamma_i E_i for a step of size dt."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    out = m.e0
    for e, tau in m.arms:
        out += e * _beta_gamma(tau, dt)[1]
    return float(out)


# --- degrees of freedom -------------------------------------------------------

@dataclass
class DofMap:
    """Node-component to equation mapping with periodic pairs and fixed values.

    eq[node, comp] is the reduced equation index, or -1 where the value is
    prescribed (then presc[node, comp] holds it). Periodic partners share one
    equation index.
    """

    eq: np.ndarray      # (N, 2) int
    presc: np.ndarray   # (N, 2) float
    n_eq: int
    periodic: bool

    def expand(self, u_eq: np.ndarray) -> np.ndarray:
        """Reduced solution -> flat (2N,) node-dof vector with prescribed values."""
        full = self.presc.copy()
        free = self.eq >= 0
        full[free] = u_eq[self.eq[free]]
        return full.ravel()


def build_dofmap(mesh: Mesh, periodic: bool = False, prescribed=None,
                 anchor: bool = True) -> DofMap:
    """Number equations; pair periodic sides; apply prescribed values.

    prescribed: {(node, comp): value}. With anchor=True one u1 dof (bottom-left
    node) is pinned to remove the horizontal rigid mode unless a u1 value is
    already prescribed somewhere.
    """
    n = mesh.n_nodes
    presc_mask = np.zeros((n, 2), dtype=bool)
    presc_val = np.zeros((n, 2))
    if prescribed:
        for (node, comp), val in prescribed.items():
            presc_mask[node, comp] = True
            presc_val[node, comp] = float(val)
    if anchor and not presc_mask[:, 0].any():
        presc_mask[mesh.bottom_nodes[0], 0] = True

    slave = np.full(n, -1, dtype=np.int64)
    if periodic:
        for ln, rn in zip(mesh.left_nodes, mesh.right_nodes):
            slave[rn] = ln
            presc_mask[rn] = presc_mask[ln]
            presc_val[rn] = presc_val[ln]

    eq = np.full((n, 2), -1, dtype=np.int64)
    counter = 0
    for node in range(n):
        if slave[node] >= 0:
            continue
        for comp in range(2):
            if not presc_mask[node, comp]:
                eq[node, comp] = counter
                counter += 1
    if periodic:
        for node in range(n):
            if slave[node] >= 0:
                eq[node] = eq[slave[node]]
    if counter == 0:
        raise SingularSystem("all degrees of freedom prescribed")
    return DofMap(eq=eq, presc=presc_val, n_eq=counter, periodic=periodic)


# --- element precomputation ---------------------------------------------------

@dataclass
class ElementData:
    b_mat: np.ndarray    # (E, 4, 3, 8) strain-displacement at Gauss points
    detw: np.ndarray     # (E, 4) det J (unit Gauss weights)
    ke_unit: np.ndarray  # (E, 8, 8) unit-modulus stiffness
    edof: np.ndarray     # (E, 8) equation ids, -1 = prescribed
    enod: np.ndarray     # (E, 8) flat node-dof ids (always valid)
    evals: np.ndarray    # (E, 8) prescribed values (0 at free slots)
    nu: float

    @property
    def n_elems(self) -> int:
        return int(self.b_mat.shape[0])


def precompute_elements(mesh: Mesh, dofmap: DofMap, nu: float) -> ElementData:
    coords = mesh.nodes[mesh.quads]  # (E, 4, 2)
    ne = mesh.n_elems
    b_mat = np.empty((ne, 4, 3, 8))
    detw = np.empty((ne, 4))
    for g, (xi, eta) in enumerate(GAUSS_PTS):
        dn = 0.25 * np.array([
            [-(1 - eta), -(1 - xi)],
            [(1 - eta), -(1 + xi)],
            [(1 + eta), (1 + xi)],
            [-(1 + eta), (1 - xi)],
        ])  # (4 nodes, 2 ref dirs)
        j11 = coords[:, :, 0] @ dn[:, 0]
        j12 = coords[:, :, 1] @ dn[:, 0]
        j21 = coords[:, :, 0] @ dn[:, 1]
        j22 = coords[:, :, 1] @ dn[:, 1]
        det = j11 * j22 - j12 * j21
        detw[:, g] = det
        # dN/dx = Jinv @ dN/dref
        inv11, inv12 = j22 / det, -j12 / det
        inv21, inv22 = -j21 / det, j11 / det
        dndx = inv11[:, None] * dn[:, 0] + inv12[:, None] * dn[:, 1]  # (E, 4)
        dndy = inv21[:, None] * dn[:, 0] + inv22[:, None] * dn[:, 1]
        bg = np.zeros((ne, 3, 8))
        bg[:, 0, 0::2] = dndx
        bg[:, 1, 1::2] = dndy
        bg[:, 2, 0::2] = dndy
        bg[:, 2, 1::2] = dndx
        b_mat[:, g] = bg
    c1 = plane_strain_unit(nu)
    ke_unit = np.einsum("eqki,kl,eqlj,eq->eij", b_mat, c1, b_mat, detw,
                        optimize=True)
    nq = mesh.quads
    enod = np.empty((ne, 8), dtype=np.int64)
    enod[:, 0::2] = 2 * nq
    enod[:, 1::2] = 2 * nq + 1
    edof = np.empty((ne, 8), dtype=np.int64)
    edof[:, 0::2] = dofmap.eq[nq, 0]
    edof[:, 1::2] = dofmap.eq[nq, 1]
    evals = np.zeros((ne, 8))
    evals[:, 0::2] = dofmap.presc[nq, 0] * (dofmap.eq[nq, 0] < 0)
    evals[:, 1::2] = dofmap.presc[nq, 1] * (dofmap.eq[nq, 1] < 0)
    return ElementData(b_mat, detw, ke_unit, edof, enod, evals, nu)


def assemble_matrix(ed: ElementData, n_eq: int, scale: float = 1.0) -> sp.csc_matrix:
    """Scatter scale * ke_unit into the reduced sparse stiffness."""
    rows = np.repeat(ed.edof, 8, axis=1).ravel()
    cols = np.tile(ed.edof, (1, 8)).ravel()
    vals = (scale * ed.ke_unit).ravel()
    keep = (rows >= 0) & (cols >= 0)
    k = sp.coo_matrix((vals[keep], (rows[keep], cols[keep])),
                      shape=(n_eq, n_eq))
    return k.tocsc()


# --- viscoelastic state ---------------------------------------------------------

@dataclass
class ViscoState:
    """Per-quadrature-point strain history of the block."""

    eps: np.ndarray     # (E, 4, 3) current total strain
    eps_v: np.ndarray   # (A, E, 4, 3) per-arm internal (viscous) strain
    diss: np.ndarray    # (E, 4) accumulated dissipated energy density (mJ/mm^3)
    t: float = 0.0

    @classmethod
    def zero(cls, n_arms: int, n_elems: int) -> "ViscoState":
        return cls(np.zeros((n_elems, 4, 3)),
                   np.zeros((n_arms, n_elems, 4, 3)),
                   np.zeros((n_elems, 4)))

    def copy(self) -> "ViscoState":
        return ViscoState(self.eps.copy(), self.eps_v.copy(),
                          self.diss.copy(), self.t)


def history_force(ed: ElementData, material, state: ViscoState, dt: float,
                  n_eq: int) -> np.ndarray:
    """RHS contribution of the frozen strain history for a step of size dt.

    The arm stress is E_i C : [beta (eps_old - eps_v) + gamma (eps_new -
    eps_old)]; everything not multiplying eps_new moves to the right-hand
    side: f += int B^T sum_i E_i C [beta_i eps_v_i + (gamma_i - beta_i)
    eps_old].
    """
    f = np.zeros(n_eq)
    if material.n_arms == 0:
        return f
    c1 = plane_strain_unit(material.nu)
    s_hist = np.zeros_like(state.eps)
    for i, (e_i, tau_i) in enumerate(material.arms):
        beta, gamma = _beta_gamma(tau_i, dt)
        s_hist += e_i * ((beta * state.eps_v[i]
                          + (gamma - beta) * state.eps) @ c1.T)
    fe = np.einsum("eqkj,eqk,eq->ej", ed.b_mat, s_hist, ed.detw, optimize=True)
    valid = ed.edof >= 0
    np.add.at(f, ed.edof[valid], fe[valid])
    return f


def strains_from_u(ed: ElementData, u_full: np.ndarray) -> np.ndarray:
    """Total strain at every Gauss point from the flat node-dof vector."""
    ue = u_full[ed.enod]  # (E, 8)
    return np.einsum("eqij,ej->eqi", ed.b_mat, ue, optimize=True)


def advance_state(state: ViscoState, material, ed: ElementData,
                  eps_new: np.ndarray, dt: float) -> float:
    """Update internal strains and dissipation in place; returns the global
    dissipation increment integrated over the block (mJ/mm).

    The dissipation of each arm is the closed-form integral of (E_i/tau_i)
    |eps - eps_v|_C^2 along the linear strain path, which is nonnegative by
    construction and exact for the interpolated history.
    """
    c1 = plane_strain_unit(material.nu)
    inc_total = 0.0
    d_eps = eps_new - state.eps
    for i, (e_i, tau_i) in enumerate(material.arms):
        beta, gamma = _beta_gamma(tau_i, dt)
        # overstress path: h(s) = a exp(-s/tau) + c, with c the moving-load
        # plateau tau * d_eps/dt and a the initial offset
        c_vec = (tau_i / dt) * d_eps
        a_vec = (state.eps - state.eps_v[i]) - c_vec
        aa = np.einsum("eqk,eqk->eq", a_vec @ c1.T, a_vec)
        ac = np.einsum("eqk,eqk->eq", a_vec @ c1.T, c_vec)
        cc = np.einsum("eqk,eqk->eq", c_vec @ c1.T, c_vec)
        inc = e_i * (0.5 * (1.0 - beta * beta) * aa
                     + 2.0 * (1.0 - beta) * ac + (dt / tau_i) * cc)
        state.diss += inc
        inc_total += float(np.sum(inc * ed.detw))
        state.eps_v[i] = (beta * state.eps_v[i] + (1.0 - beta) * state.eps
                          + (1.0 - gamma) * d_eps)
    state.eps = eps_new.copy()
    return inc_total


def dissipated_total(state: ViscoState, ed: ElementData) -> float:
    """Accumulated dissipated energy over the block (mJ per mm thickness)."""
    return float(np.sum(state.diss * ed.detw))


def constitutive_update(material, eps_v, eps_old, strain_new, dt: float):
    """Single-point Prony update: (stress, tangent, eps_v_new, dissipation).

    eps_v has shape (n_arms, 3); eps_old and strain_new shape (3,). The
    strain is interpolated linearly over the step, for which the recurrence
    and the dissipation integral are exact; the tangent is consistent with
    the update, so one linear solve equilibrates a step.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    eps_v = np.atleast_2d(np.asarray(eps_v, dtype=float))
    eps_old = np.asarray(eps_old, dtype=float)
    strain_new = np.asarray(strain_new, dtype=float)
    c1 = plane_strain_unit(material.nu)
    stress = material.e0 * (c1 @ strain_new)
    tangent = material.e0 * c1
    eps_v_new = np.empty_like(eps_v) if material.n_arms else eps_v.copy()
    diss = 0.0
    d_eps = strain_new - eps_old
    for i, (e_i, tau_i) in enumerate(material.arms):
        beta, gamma = _beta_gamma(tau_i, dt)
        ev = (beta * eps_v[i] + (1.0 - beta) * eps_old
              + (1.0 - gamma) * d_eps)
        sig_arm = e_i * (c1 @ (strain_new - ev))
        c_vec = (tau_i / dt) * d_eps
        a_vec = (eps_old - eps_v[i]) - c_vec
        aa = float(a_vec @ (c1 @ a_vec))
        ac = float(a_vec @ (c1 @ c_vec))
        cc = float(c_vec @ (c1 @ c_vec))
        diss += e_i * (0.5 * (1.0 - beta * beta) * aa
                       + 2.0 * (1.0 - beta) * ac + (dt / tau_i) * cc)
        stress = stress + sig_arm
        tangent = tangent + (gamma * e_i) * c1
        eps_v_new[i] = ev
    return stress, tangent, eps_v_new, diss


# --- plain assembled path (single solves, verification and unit tests) --------

@dataclass
class LinearSystem:
    k: sp.csc_matrix
    f: np.ndarray
    dofmap: DofMap
    ed: ElementData


def assemble(mesh: Mesh, dofmap: DofMap, material, state: ViscoState,
             dt: float, ed: ElementData = None, loads=None) -> LinearSystem:
    """Reduced stiffness and RHS for one implicit step (no contact terms).

    loads: {(node, comp): force} nodal forces, or an (n_eq,) array. Prescribed
    displacement values couple into the RHS through the eliminated columns.
    """
    if ed is None:
        ed = precompute_elements(mesh, dofmap, material.nu)
    e_alg = alg_modulus(material, dt)
    k = assemble_matrix(ed, dofmap.n_eq, scale=e_alg)
    f = history_force(ed, material, state, dt, dofmap.n_eq)
    if loads is not None:
        if isinstance(loads, dict):
            for (node, comp), val in loads.items():
                idx = dofmap.eq[node, comp]
                if idx >= 0:
                    f[idx] += val
        else:
            f = f + loads
    if np.any(ed.evals != 0.0):
        fe = -e_alg * np.einsum("eij,ej->ei", ed.ke_unit, ed.evals,
                                optimize=True)
        valid = ed.edof >= 0
        np.add.at(f, ed.edof[valid], fe[valid])
    return LinearSystem(k=k, f=f, dofmap=dofmap, ed=ed)


def step_solve(system: LinearSystem) -> np.ndarray:
    """Direct sparse solve; returns the flat (2N,) node-dof vector."""
    try:
        lu = spla.splu(system.k)
        u = lu.solve(system.f)
    except RuntimeError as exc:
        if "singular" in str(exc).lower():
            raise SingularSystem(str(exc)) from None
        raise FactorizationFailed(str(exc)) from None
    if not np.all(np.isfinite(u)):
        raise FactorizationFailed("solution contains non-finite entries")
    rhs_norm = np.linalg.norm(system.f)
    if rhs_norm > 0:
        res = np.linalg.norm(system.k @ u - system.f)
        if res > 1e-10 * rhs_norm:
            raise FactorizationFailed(f"residual {res:g} > 1e-10 * |f|")
    return system.dofmap.expand(u)
