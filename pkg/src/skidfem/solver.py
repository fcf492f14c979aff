"""Direct contact solver with boundary Schur-complement active-set updates.

The reference operator K0 = E_alg * K_bulk + (all interface penalty springs)
is factorized once per time-step size. Deactivating the springs of open gaps
is a low-rank downdate confined to the top-surface vertical dofs, so each
active-set trial costs two triangular sparse solves plus a dense Cholesky of
the inactive-set capacitance matrix - no refactorization while dt is fixed.
The result is algebraically identical to assembling and factorizing the
active-set stiffness directly (covered by tests).

The penalty contact problem is the minimization of the convex energy
    Pi(u) = 1/2 u'K_bulk u - b'u + 1/2 sum_q eps w_q <u2q - d_q>+^2,
and the plain active-set fixed point is its undamped semismooth Newton
iteration. It converges in a few steps for warm starts, but a nearly rigid
block resting on isolated asperities can make it cycle between single-point
supports; on cycling the solver switches to the damped (Armijo line-search)
variant of the same iteration, which descends Pi monotonically and is
globally convergent.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ContactLoopDiverged, FactorizationFailed
from .fem import DofMap, ElementData, assemble_matrix
from .mesh import Mesh
from .mpjr import InterfaceLayer

MAX_CONTACT_ITERS = 50
MAX_DAMPED_ITERS = 300
_SOLVE_CHUNK = 128


class ContactSolver:
    """Owns the factorization and the interface capacitance data."""

    def __init__(self, mesh: Mesh, dofmap: DofMap, ed: ElementData,
                 layer: InterfaceLayer):
        self.dofmap = dofmap
        self.layer = layer
        self.n_eq = dofmap.n_eq
        self.k_unit = assemble_matrix(ed, dofmap.n_eq, 1.0)

        # distinct top-surface u2 equations, first-occurrence order
        top_eq_all = dofmap.eq[mesh.top_nodes, 1]
        if np.any(top_eq_all < 0):
            raise ValueError("top-surface u2 dofs must be free")
        seen: dict = {}
        for e in top_eq_all:
            if int(e) not in seen:
                seen[int(e)] = len(seen)
        self.t_eqs = np.fromiter(seen.keys(), dtype=np.int64)
        pos = {e: i for i, e in enumerate(self.t_eqs)}
        n_t = self.t_eqs.size
        q = layer.n_qp
        # qp -> top-dof lift matrix A (dense; Q and T are interface-sized)
        self.a_mat = np.zeros((q, n_t))
        rows = np.arange(q)
        lpos = np.fromiter((pos[int(e)] for e in dofmap.eq[layer.node_left, 1]),
                           dtype=np.int64, count=q)
        rpos = np.fromiter((pos[int(e)] for e in dofmap.eq[layer.node_right, 1]),
                           dtype=np.int64, count=q)
        self.a_mat[rows, lpos] += layer.n1
        self.a_mat[rows, rpos] += layer.n2
        self.d_pen = layer.eps_n * layer.qp_w  # spring stiffness per qp

        core = self.a_mat.T @ (self.d_pen[:, None] * self.a_mat)  # (T, T)
        pen = sp.coo_matrix(
            (core.ravel(),
             (np.repeat(self.t_eqs, n_t), np.tile(self.t_eqs, n_t))),
            shape=(self.n_eq, self.n_eq))
        self.pen_mat = pen.tocsc()
        self.pen_mat.eliminate_zeros()

        self.lu = None
        self.h_mat = None
        self.g_mat = None
        self.e_alg = None

    def set_phase(self, e_alg: float) -> None:
        """Factorize K0 for a new algorithmic modulus (i.e. a new dt)."""
        if self.e_alg is not None and e_alg == self.e_alg:
            return
        k0 = (e_alg * self.k_unit + self.pen_mat).tocsc()
        try:
            self.lu = spla.splu(k0)
        except RuntimeError as exc:
            raise FactorizationFailed(str(exc)) from None
        n_t = self.t_eqs.size
        h = np.empty((n_t, n_t))
        for start in range(0, n_t, _SOLVE_CHUNK):
            stop = min(start + _SOLVE_CHUNK, n_t)
            rhs = np.zeros((self.n_eq, stop - start))
            rhs[self.t_eqs[start:stop], np.arange(stop - start)] = 1.0
            h[:, start:stop] = self.lu.solve(rhs)[self.t_eqs]
        self.h_mat = h
        self.g_mat = self.a_mat @ h @ self.a_mat.T
        self.e_alg = e_alg

    # --- internals -------------------------------------------------------------

    def _with_lift(self, b_fix: np.ndarray, add_t: np.ndarray) -> np.ndarray:
        b_tot = b_fix.copy()
        b_tot[self.t_eqs] += add_t
        return b_tot

    def _solve_with_set(self, b_fix: np.ndarray, d: np.ndarray,
                        active: np.ndarray) -> np.ndarray:
        """Full equilibrium with the springs of `active` engaged (bilateral).

        Raises numpy.linalg.LinAlgError when the spring set leaves a rigid
        mode (capacitance not positive definite).
        """
        rq = np.where(active, self.d_pen * d, 0.0)
        r_t = self.a_mat.T @ rq
        inact = ~active
        if not inact.any():
            return self.lu.solve(self._with_lift(b_fix, r_t))
        m_cap = -self.g_mat[np.ix_(inact, inact)]
        idx = np.arange(m_cap.shape[0])
        m_cap[idx, idx] += 1.0 / self.d_pen[inact]
        cf = sla.cho_factor(m_cap, check_finite=False)
        y = self.lu.solve(self._with_lift(b_fix, r_t))
        gamma = self.a_mat @ y[self.t_eqs]
        c_vec = sla.cho_solve(cf, gamma[inact], check_finite=False)
        return self.lu.solve(self._with_lift(
            b_fix, r_t + self.a_mat[inact].T @ c_vec))

    def _energy(self, u: np.ndarray, b_fix: np.ndarray,
                d: np.ndarray) -> float:
        pen = np.maximum(self.a_mat @ u[self.t_eqs] - d, 0.0)
        bulk = self.e_alg * float(u @ (self.k_unit @ u))
        return 0.5 * bulk - float(b_fix @ u) + 0.5 * float(self.d_pen @ pen ** 2)

    def _guarded_solve(self, b_fix, d, active):
        """Solve with a set, re-arming nearest gaps while rigid modes remain."""
        active = active.copy()
        for _ in range(active.size):
            try:
                return self._solve_with_set(b_fix, d, active), active
            except np.linalg.LinAlgError:
                inact = np.nonzero(~active)[0]
                if inact.size == 0:
                    raise ContactLoopDiverged("all-spring operator singular")
                active[inact[int(np.argmin(d[inact]))]] = True
        raise ContactLoopDiverged("could not stabilize rigid modes")

    def _finish(self, u, active, d, it):
        gaps = d - self.a_mat @ u[self.t_eqs]
        tractions = np.where(active,
                             -self.layer.eps_n * np.minimum(gaps, 0.0), 0.0)
        return u, active, gaps, tractions, it

    def _damped_solve(self, b_fix, d, active, it0):
        """Armijo-damped semismooth iteration on the contact energy."""
        u, active = self._guarded_solve(b_fix, d, active)
        pi_cur = self._energy(u, b_fix, d)
        it = it0
        for _ in range(MAX_DAMPED_ITERS):
            it += 1
            trial = (self.a_mat @ u[self.t_eqs] - d) > 0.0
            try:
                u_new, trial = self._guarded_solve(b_fix, d, trial)
            except ContactLoopDiverged:
                raise
            s_new = self.a_mat @ u_new[self.t_eqs]
            consistent = (s_new - d > 0.0)
            if np.array_equal(consistent, trial):
                return self._finish(u_new, trial, d, it)
            step = u_new - u
            theta = 1.0
            scale = max(abs(pi_cur), 1e-30)
            while theta > 1e-8:
                u_try = u + theta * step
                pi_try = self._energy(u_try, b_fix, d)
                if pi_try < pi_cur - 1e-15 * scale:
                    break
                theta *= 0.5
            else:
                # no descent left: numerically at the minimum
                return self._finish(u_new, consistent, d, it)
            u, pi_cur = u_try, pi_try
        raise ContactLoopDiverged(
            f"damped contact iteration exhausted {MAX_DAMPED_ITERS} steps")

    # --- public ----------------------------------------------------------------

    def solve_step(self, b_fix: np.ndarray, d: np.ndarray,
                   active: np.ndarray):
        """Equilibrium with the penalty active set fixed-point loop.

        b_fix: reduced RHS without contact terms; d: profile elevation datum
        per quadrature point; active: starting guess (bool per qp).

        Returns (u_eq, active, gaps, tractions, iterations).
        """
        lu, a_mat, g_mat = self.lu, self.a_mat, self.g_mat
        if lu is None:
            raise FactorizationFailed("set_phase() must be called first")
        y0 = lu.solve(b_fix)
        beta0 = y0[self.t_eqs]
        active = active.copy()
        r_t = None
        c_vec = None
        s_prev = None
        seen = set()
        inact = ~active
        for it in range(1, MAX_CONTACT_ITERS + 1):
            rq = np.where(active, self.d_pen * d, 0.0)
            r_t = a_mat.T @ rq
            t_vals = beta0 + self.h_mat @ r_t
            gamma = a_mat @ t_vals
            inact = ~active
            if inact.any():
                m_cap = -g_mat[np.ix_(inact, inact)]
                idx = np.arange(m_cap.shape[0])
                m_cap[idx, idx] += 1.0 / self.d_pen[inact]
                try:
                    cf = sla.cho_factor(m_cap, check_finite=False)
                except np.linalg.LinAlgError:
                    # rigid mode: too few springs left; re-arm the nearest gap
                    gap_est = d - gamma
                    gap_est[active] = np.inf
                    active[int(np.argmin(gap_est))] = True
                    continue
                c_vec = sla.cho_solve(cf, gamma[inact], check_finite=False)
                s = gamma + g_mat[:, inact] @ c_vec
            else:
                c_vec = None
                s = gamma
            gaps = d - s
            new_active = gaps < 0.0
            if np.array_equal(new_active, active):
                break
            # identical surface solution: relabeling exact-zero gaps cannot
            # change equilibrium (degenerate zero-load configurations)
            scale = max(1.0, float(np.abs(s).max()), float(np.abs(d).max()))
            if s_prev is not None and np.abs(s - s_prev).max() <= 1e-14 * scale:
                break
            s_prev = s
            key = np.packbits(new_active).tobytes()
            if key in seen:
                # seesaw between near-rigid supports: switch to the damped,
                # monotonically descending variant
                return self._damped_solve(b_fix, d, new_active, it)
            seen.add(key)
            active = new_active
        else:
            return self._damped_solve(b_fix, d, active, MAX_CONTACT_ITERS)

        add_t = r_t.copy()
        if c_vec is not None:
            add_t += a_mat[inact].T @ c_vec
        u = lu.solve(self._with_lift(b_fix, add_t))
        return self._finish(u, active, d, it)
