"""Two-phase sliding simulation: vertical loading, then finite sliding.

Phase I presses the block against the rigid profile by ramping a uniform
pressure on the face opposite the contact side over a duration T1 (given, or
computed from the loading-duration equation at the stiffest requested
excitation). Phase II translates the profile with a cubic-fillet velocity ramp
of duration T1 followed by a constant-velocity plateau, stepping so that the
plateau advancement per step is a fifth of the interface grid spacing.

Per time step the contact solver equilibrates the penalty active set; the
recorded series (P, Q, mu, contact fraction, accumulated dissipation) feeds
the steady-window average and the energy audit.
"""

from __future__ import annotations

import logging
import multiprocessing as mp
from dataclasses import dataclass

import numpy as np

from . import fem, mesh as meshmod, mpjr
from .errors import ProfileExhausted, WindowTooShort
from .material import PronySeries, optimal_t1
from .profile import Profile, build_spline
from .solver import ContactSolver

log = logging.getLogger("skidfem")

P_FLOOR_REL = 1e-9  # active-P threshold relative to p0 * b_b


@dataclass
class SimulationConfig:
    """Resolved inputs of one simulation family (geometry, material, loading)."""

    material: PronySeries
    profile: Profile
    b_b: float
    h_b: float
    m_x: int
    p0: float
    velocities: tuple
    t1: float = None           # None -> optimal_t1 at the highest velocity
    t_s1: int = 100
    lam: float = None          # profile wavelength (periodic runs)
    n_lambda: float = 4.0
    slide_length: float = None  # rough runs; None -> full profile
    eps_n: object = "paper_text"
    boundary: str = "periodic"
    n_levels: int = None       # None -> auto grading
    rho: int = 1               # down-sampling factor already applied (recorded)
    label: str = ""

    def resolved_eps_n(self) -> float:
        if isinstance(self.eps_n, str):
            presets = {"paper_text": 100.0, "paper_fig9": 10.0}
            if self.eps_n not in presets:
                raise ValueError(f"unknown penalty preset {self.eps_n!r}")
            return presets[self.eps_n] * self.material.e_inst / self.h_b
        return float(self.eps_n)

    def lam_for_t1(self) -> float:
        """Wavelength the loading-duration rule uses: the profile wavelength
        for periodic runs, the Nyquist wavelength 2*dx_mean for rough ones."""
        if self.boundary == "periodic" and self.lam:
            return self.lam
        return 2.0 * self.profile.dx_mean

    def to_dict(self) -> dict:
        m = self.material
        return {
            "material": {"E0_MPa": m.e0, "arms": [list(a) for a in m.arms],
                         "nu": m.nu},
            "profile": {"source": self.profile.source_id,
                        "points": self.profile.npoints,
                        "dx_mean_mm": self.profile.dx_mean,
                        "processing": list(self.profile.processing_log)},
            "b_b_mm": self.b_b, "h_b_mm": self.h_b, "m_x": self.m_x,
            "p0_MPa": self.p0, "velocities_mmps": list(self.velocities),
            "t1_s": self.t1, "t_s1": self.t_s1, "lam_mm": self.lam,
            "n_lambda": self.n_lambda, "slide_length_mm": self.slide_length,
            "eps_n": self.eps_n if isinstance(self.eps_n, str) else float(self.eps_n),
            "eps_n_MPa_per_mm": self.resolved_eps_n(),
            "boundary": self.boundary, "n_levels": self.n_levels,
            "rho": self.rho, "label": self.label,
        }


@dataclass
class SimEnv:
    """Mesh-level machinery shared by every run of one configuration."""

    cfg: SimulationConfig
    mesh: object
    dofmap: fem.DofMap
    ed: fem.ElementData
    layer: mpjr.InterfaceLayer
    solver: ContactSolver
    spline: object
    f_press_unit: np.ndarray
    x_offset: float
    y2_offset: float
    t1: float
    advance: float       # plateau advancement per step (mm)
    slide_total: float   # total sliding distance (mm)


@dataclass
class Phase1Result:
    state: fem.ViscoState
    u_full: np.ndarray
    active: np.ndarray
    p_total: float
    approach_top: float     # mean vertical lift of the contact face (mm)
    approach_bottom: float  # mean vertical lift of the loaded face (mm)
    dt: float

    def fork(self):
        return self.state.copy(), self.active.copy()


@dataclass
class FrictionSeries:
    step: np.ndarray
    t: np.ndarray
    y1: np.ndarray
    v_inst: np.ndarray
    p: np.ndarray
    q: np.ndarray
    mu: np.ndarray
    valid: np.ndarray
    contact_fraction: np.ndarray
    diss_total: np.ndarray


@dataclass
class FrictionResult:
    velocity: float
    series: FrictionSeries
    window: tuple            # (i_a, i_b) indices into the series
    mu_avg: float
    w_ext: float
    e_diss: float
    energy_gap: float
    energy_flagged: bool
    contact_fraction_mean: float
    t1: float
    dt: float


def prepare_env(cfg: SimulationConfig) -> SimEnv:
    """Build mesh, dof map, interface, contact solver and placement."""
    if cfg.boundary == "free_sides":
        cfg.boundary = "free"
    if cfg.boundary not in ("periodic", "free"):
        raise ValueError("boundary must be 'periodic' or 'free'")
    if min(v for v in cfg.velocities) <= 0:
        raise ValueError("velocities must be positive")
    n_levels = (meshmod.auto_n_levels(cfg.b_b, cfg.h_b, cfg.m_x)
                if cfg.n_levels is None else cfg.n_levels)
    msh = meshmod.build_block_mesh(cfg.b_b, cfg.h_b, cfg.m_x, n_levels)
    dofmap = fem.build_dofmap(msh, periodic=(cfg.boundary == "periodic"))
    ed = fem.precompute_elements(msh, dofmap, cfg.material.nu)
    layer = mpjr.build_interface(msh, cfg.resolved_eps_n())
    solver = ContactSolver(msh, dofmap, ed, layer)
    spline = build_spline(cfg.profile)
    x_off, y2_off = mpjr.place_profile(spline, layer, cfg.b_b)

    # consistent nodal loads of a unit pressure on the bottom face (upward)
    f_press = np.zeros(dofmap.n_eq)
    for a, b in zip(msh.bottom_nodes[:-1], msh.bottom_nodes[1:]):
        ell = msh.nodes[b, 0] - msh.nodes[a, 0]
        for node in (a, b):
            idx = dofmap.eq[node, 1]
            if idx >= 0:
                f_press[idx] += 0.5 * ell

    t1 = _resolve_t1(cfg)
    if cfg.boundary == "periodic":
        if not cfg.lam:
            raise ValueError("periodic runs need the profile wavelength lam")
        advance = 0.2 * cfg.b_b / cfg.m_x
        slide_total = cfg.n_lambda * cfg.lam
    else:
        advance = 0.2 * cfg.profile.dx_mean
        slide_total = (cfg.slide_length if cfg.slide_length is not None
                       else cfg.profile.extent - cfg.b_b - 2.0 * advance)
    # the final step may overshoot the slide length by up to one advancement
    if slide_total + advance > x_off + 1e-9:
        raise ProfileExhausted(
            f"sliding length {slide_total:g} mm (+1 step) exceeds the "
            f"available profile run-out {x_off:g} mm")
    return SimEnv(cfg, msh, dofmap, ed, layer, solver, spline, f_press,
                  x_off, y2_off, t1, advance, slide_total)


def _resolve_t1(cfg: SimulationConfig) -> float:
    if cfg.t1 is not None:
        return float(cfg.t1)
    v_max = max(cfg.velocities)
    if cfg.material.n_arms == 0:
        # elastic block: any loading duration works; keep it short
        return 0.1 * cfg.b_b / v_max
    omega_max = 2.0 * np.pi * v_max / cfg.lam_for_t1()
    return optimal_t1(cfg.material, omega_max)


def run_phase1(cfg: SimulationConfig, env: SimEnv = None) -> Phase1Result:
    """Ramp the pressure from 0 to p0 in t_s1 equal steps of T1/t_s1."""
    env = prepare_env(cfg) if env is None else env
    dt = env.t1 / cfg.t_s1
    env.solver.set_phase(fem.alg_modulus(cfg.material, dt))
    state = fem.ViscoState.zero(cfg.material.n_arms, env.mesh.n_elems)
    motion = mpjr.MotionLaw(0.0, env.t1, env.t1, env.y2_offset, env.x_offset)
    d, _ = mpjr.profile_datum(env.layer, env.spline, motion, 0.0)
    active = d <= d.min() + 1e-14 * max(abs(d).max(), 1.0)
    u = np.zeros(env.dofmap.n_eq)
    p_total = 0.0
    for k in range(1, cfg.t_s1 + 1):
        p_k = cfg.p0 * k / cfg.t_s1
        b_fix = p_k * env.f_press_unit + fem.history_force(
            env.ed, cfg.material, state, dt, env.dofmap.n_eq)
        u, active, gaps, tractions, _ = env.solver.solve_step(b_fix, d, active)
        u_full = env.dofmap.expand(u)
        eps_new = fem.strains_from_u(env.ed, u_full)
        fem.advance_state(state, cfg.material, env.ed, eps_new, dt)
        state.t += dt
        p_total = float(np.sum(tractions * env.layer.qp_w))
    if cfg.p0 > 0 and abs(p_total - cfg.p0 * cfg.b_b) > 0.01 * cfg.p0 * cfg.b_b:
        log.warning("Phase-I normal force %.6g N/mm misses p0*b_b = %.6g by "
                    "more than 1%%", p_total, cfg.p0 * cfg.b_b)
    u_full = env.dofmap.expand(u)
    u2 = u_full[1::2]
    top = env.mesh.top_nodes[:-1] if cfg.boundary == "periodic" else env.mesh.top_nodes
    approach_top = float(np.mean(u2[top]))
    bot = env.mesh.bottom_nodes
    trib = np.empty(bot.size)
    xb = env.mesh.nodes[bot, 0]
    trib[1:-1] = 0.5 * (xb[2:] - xb[:-2])
    trib[0] = 0.5 * (xb[1] - xb[0])
    trib[-1] = 0.5 * (xb[-1] - xb[-2])
    approach_bottom = float((u2[bot] @ trib) / trib.sum())
    return Phase1Result(state, u_full, active, p_total,
                        approach_top, approach_bottom, dt)


def run_phase2(cfg: SimulationConfig, env: SimEnv, phase1: Phase1Result,
               velocity: float, observer=None,
               dt_factor: float = 1.0) -> FrictionResult:
    """Slide at one velocity from the Phase-I state; average over the steady window.

    dt_factor < 1 refines the time step below the advancement rule at a fixed
    mesh (time-step convergence studies).
    """
    dt = dt_factor * env.advance / velocity
    env.solver.set_phase(fem.alg_modulus(cfg.material, dt))
    state, active = phase1.fork()
    motion = mpjr.MotionLaw(velocity, env.t1, env.t1,
                            env.y2_offset, env.x_offset)
    p_floor = P_FLOOR_REL * max(cfg.p0 * cfg.b_b, 1e-30)

    rec = {k: [] for k in ("step", "t", "y1", "v_inst", "p", "q", "mu",
                           "valid", "frac", "diss")}
    t = env.t1
    step = 0
    n_qp = env.layer.n_qp
    while True:
        step += 1
        t += dt
        y1, _, v_inst = mpjr.motion_law_eval(motion, t)
        if y1 > env.x_offset + 1e-9 * max(env.x_offset, 1.0):
            raise ProfileExhausted(
                f"skid would pass the first profile point at y1={y1:g} mm")
        d, slope = mpjr.profile_datum(env.layer, env.spline, motion, t)
        b_fix = cfg.p0 * env.f_press_unit + fem.history_force(
            env.ed, cfg.material, state, dt, env.dofmap.n_eq)
        u, active, gaps, tractions, _ = env.solver.solve_step(b_fix, d, active)
        p_tot, q_tot = mpjr.interface_forces(tractions, slope, env.layer.qp_w)
        u_full = env.dofmap.expand(u)
        eps_new = fem.strains_from_u(env.ed, u_full)
        fem.advance_state(state, cfg.material, env.ed, eps_new, dt)
        state.t = t
        ok = p_tot > p_floor
        rec["step"].append(step)
        rec["t"].append(t)
        rec["y1"].append(y1)
        rec["v_inst"].append(v_inst)
        rec["p"].append(p_tot)
        rec["q"].append(q_tot)
        rec["mu"].append(q_tot / p_tot if ok else 0.0)
        rec["valid"].append(ok)
        rec["frac"].append(float(np.count_nonzero(active)) / n_qp)
        rec["diss"].append(fem.dissipated_total(state, env.ed))
        if observer is not None:
            observer(step, t, env, u_full, state, gaps, tractions, slope, active)
        if y1 >= env.slide_total - 1e-12 * env.slide_total:
            break

    series = FrictionSeries(
        step=np.asarray(rec["step"]), t=np.asarray(rec["t"]),
        y1=np.asarray(rec["y1"]), v_inst=np.asarray(rec["v_inst"]),
        p=np.asarray(rec["p"]), q=np.asarray(rec["q"]),
        mu=np.asarray(rec["mu"]), valid=np.asarray(rec["valid"], dtype=bool),
        contact_fraction=np.asarray(rec["frac"]),
        diss_total=np.asarray(rec["diss"]))
    if env.spline.clamp_count:
        log.info("v=%g mm/s: %d clamped profile evaluations",
                 velocity, env.spline.clamp_count)
    ramp_dist = velocity * env.t1 / 2.0
    mode = "periodic" if cfg.boundary == "periodic" else "rough"
    feature = cfg.lam if mode == "periodic" else cfg.b_b
    win = steady_window(series, mode, feature, ramp_dist)
    mu_avg = window_average(series, win)
    w_ext, e_diss, gap, flagged = energy_audit(series, win)
    ia, ib = win
    frac_mean = float(series.contact_fraction[ia:ib + 1].mean())
    return FrictionResult(velocity, series, win, mu_avg, w_ext, e_diss,
                          gap, flagged, frac_mean, env.t1, dt)


class Window(tuple):
    """Steady averaging window: grid indices plus exact boundary times.

    Behaves as the (i_a, i_b) index pair; t_a/t_b interpolate the sliding
    distance to the ideal window boundaries, which keeps periodic windows an
    exact whole number of wavelengths apart (stored energy cancels between
    the ends regardless of the step size).
    """

    def __new__(cls, ia, ib, t_a, t_b):
        self = super().__new__(cls, (ia, ib))
        self.t_a = t_a
        self.t_b = t_b
        return self

    def __getnewargs__(self):
        return (self[0], self[1], self.t_a, self.t_b)


def _time_at_distance(series: FrictionSeries, target: float, k: int) -> float:
    """Time at which y1 crosses target, interpolating below sample k."""
    if k == 0 or series.y1[k] <= target:
        return float(series.t[k])
    y0, y1v = series.y1[k - 1], series.y1[k]
    w = (target - y0) / (y1v - y0)
    return float(series.t[k - 1] + w * (series.t[k] - series.t[k - 1]))


def _series_at_time(series: FrictionSeries, arr: np.ndarray, t: float) -> float:
    k = int(np.searchsorted(series.t, t))
    if k == 0:
        return float(arr[0])
    if k >= series.t.size:
        return float(arr[-1])
    w = (t - series.t[k - 1]) / (series.t[k] - series.t[k - 1])
    return float(arr[k - 1] + w * (arr[k] - arr[k - 1]))


def _window_integral(series: FrictionSeries, arr: np.ndarray,
                     win: "Window") -> float:
    """Trapezoid integral of arr over [t_a, t_b] with interpolated ends."""
    ia, ib = win
    t = np.concatenate(([win.t_a], series.t[ia:ib + 1], [win.t_b]))
    v = np.concatenate(([_series_at_time(series, arr, win.t_a)],
                        arr[ia:ib + 1],
                        [_series_at_time(series, arr, win.t_b)]))
    return float(np.trapezoid(v, t))


def steady_window(series: FrictionSeries, mode: str, feature_len: float,
                  ramp_dist: float) -> Window:
    """Steady averaging window of the sliding history.

    Periodic runs discard the ramp plus one full wavelength and keep only
    complete wavelengths; rough runs discard the ramp plus one skid length
    and keep the rest.
    """
    y1 = series.y1
    start = ramp_dist + feature_len
    idx = np.nonzero(y1 >= start - 1e-12 * max(start, 1.0))[0]
    if idx.size < 2:
        raise WindowTooShort(
            f"series ends at y1={y1[-1]:g} mm, window starts at {start:g} mm")
    ia = int(idx[0])
    if mode == "periodic":
        # complete wavelengths measured from the ideal window start, so a
        # series covering exactly ramp + (n+1) wavelengths keeps n of them
        n_complete = int(np.floor((y1[-1] - start) / feature_len + 1e-9))
        if n_complete < 1:
            raise WindowTooShort("less than one complete wavelength after the ramp")
        end = start + n_complete * feature_len
        ib = int(np.nonzero(y1 <= end + 1e-12 * max(end, 1.0))[0][-1])
        t_b = _time_at_distance(series, end,
                                min(ib + 1, y1.size - 1))
    else:
        ib = int(y1.size - 1)
        t_b = float(series.t[ib])
    if ib <= ia:
        raise WindowTooShort("empty steady window")
    return Window(ia, ib, _time_at_distance(series, start, ia), t_b)


def window_average(series: FrictionSeries, ia, ib=None) -> float:
    """Time average of mu over the window; steps with P = 0 are excluded."""
    win = ia if isinstance(ia, Window) else Window(ia, ib, series.t[ia],
                                                   series.t[ib])
    ia, ib = win
    valid = series.valid[ia:ib + 1]
    if valid.all():
        return float(_window_integral(series, series.mu, win)
                     / (win.t_b - win.t_a))
    if not valid.any():
        return 0.0
    return float(series.mu[ia:ib + 1][valid].mean())


def energy_audit(series: FrictionSeries, ia, ib=None):
    """(W_ext, E_diss, relative gap, flagged) over the steady window.

    W_ext integrates the tangential force against the instantaneous profile
    velocity; E_diss is the growth of the accumulated bulk dissipation. The
    two are computed by independent code paths, so their relative gap is a
    discretization self-check. Near-zero energies (elastic runs) report a
    zero gap with a flag.
    """
    win = ia if isinstance(ia, Window) else Window(ia, ib, series.t[ia],
                                                   series.t[ib])
    ia, ib = win
    w_ext = _window_integral(series, series.q * series.v_inst, win)
    e_diss = (_series_at_time(series, series.diss_total, win.t_b)
              - _series_at_time(series, series.diss_total, win.t_a))
    scale = max(abs(w_ext), abs(e_diss))
    # reference: work the normal force would do over the window; energies
    # vanishing against it mean an elastic run (gap undefined, flagged)
    w_ref = _window_integral(series, series.p * series.v_inst, win)
    if scale <= 1e-9 * abs(w_ref) or scale == 0.0:
        return w_ext, e_diss, 0.0, True
    return w_ext, e_diss, abs(w_ext - e_diss) / scale, False


def analytic_u0(p0: float, lam: float, nu: float, e_inst: float) -> float:
    """Documented pressure-to-displacement mapping for the sinusoid formula.

    The closed-form layer model imposes a far-field displacement u0; the
    simulations impose a pressure p0. The two are connected through the
    half-space sinusoidal contact stiffness: a full-contact pressure wave of
    wavelength lam indents a plane-strain half-space by (1 - nu^2) lam / (pi E)
    per unit pressure, so the equivalent layer has depth l_eff = (1-nu^2)
    lam / pi and u0 = p0 * l_eff / E_inst. The Phase-I approach measured on
    the loaded face overestimates this by ~h/l_eff because the block is
    deeper than the equivalent layer (both values are recorded per run).
    """
    return (1.0 - nu * nu) * lam * p0 / (np.pi * e_inst)


def analytic_mu_sine(e1: float, e_inst: float, a: float, u0: float,
                     lam: float, tau: float, v: float) -> float:
    """Closed-form averaged friction of a single-arm layer on a sinusoid.

    mu = pi * E1 * a^2 * omega * tau / (E_inst * u0 * lam * (1 + (omega tau)^2))
    with omega = 2 pi v / lam. Peaks at omega = 1/tau and vanishes in both
    velocity extremes.
    """
    if min(e1, e_inst, a, u0, lam, tau, v) <= 0:
        raise ValueError("all arguments must be positive")
    omega = 2.0 * np.pi * v / lam
    wt = omega * tau
    return float(np.pi * e1 * a * a * wt
                 / (e_inst * u0 * lam * (1.0 + wt * wt)))


@dataclass
class SweepEntry:
    velocity: float
    result: FrictionResult = None
    error: str = ""


def run_single(cfg: SimulationConfig, velocity: float = None) -> FrictionResult:
    """Phase I + Phase II for one velocity."""
    v = velocity if velocity is not None else cfg.velocities[0]
    env = prepare_env(cfg)
    phase1 = run_phase1(cfg, env)
    return run_phase2(cfg, env, phase1, v)


def _sweep_worker(args):
    cfg, v = args
    try:
        return SweepEntry(v, result=run_single(cfg, v))
    except Exception as exc:  # recorded, sweep continues
        return SweepEntry(v, error=f"{type(exc).__name__}: {exc}")


def run_sweep(cfg: SimulationConfig, jobs: int = 1):
    """Independent Phase I + II per velocity; Phase I reused when T1 is shared.

    Returns a list of SweepEntry in the order of cfg.velocities. Individual
    failures are recorded and do not stop the sweep. jobs > 1 distributes
    velocities over processes (each worker rebuilds its own state, so results
    are bit-identical to the serial path).
    """
    if jobs > 1:
        with mp.get_context("fork").Pool(jobs) as pool:
            return pool.map(_sweep_worker,
                            [(cfg, v) for v in cfg.velocities], chunksize=1)
    entries = []
    env = prepare_env(cfg)
    phase1 = run_phase1(cfg, env)
    for v in cfg.velocities:
        try:
            entries.append(SweepEntry(v, result=run_phase2(cfg, env, phase1, v)))
        except Exception as exc:
            entries.append(SweepEntry(v, error=f"{type(exc).__name__}: {exc}"))
    return entries


def log_centered_velocities(center: float, count: int,
                            vmin: float = None, vmax: float = None) -> tuple:
    """Log-spaced velocity list centered on a value or bounded explicitly."""
    if vmin is not None and vmax is not None:
        return tuple(np.geomspace(vmin, vmax, count))
    span = 10.0
    return tuple(np.geomspace(center / span, center * span, count))


# --- sinusoid benchmark presets ------------------------------------------------

BENCH_LAM = 2.0 * np.pi / 320.0  # wavelength (mm)
BENCH_AMP = 2.0e-3               # amplitude (mm)


def benchmark_profile(lam: float, amplitude: float, n_lambda: float,
                      points_per_wavelength: int = 256) -> Profile:
    """Sinusoid long enough for the slide plus one skid length and run-out."""
    from .profile import sine_profile
    extent = (n_lambda + 1.25) * lam
    return sine_profile(lam, amplitude, extent, points_per_wavelength)


def benchmark_config(preset: str, m_x: int = 128, velocities=None,
                     n_velocities: int = 9, p0: float = 10.0, t1: float = None,
                     n_lambda: float = 4.0, eps_n="paper_text") -> SimulationConfig:
    """Sinusoid benchmark: single-arm sweep or the three-arm near-critical run.

    single-arm defaults to n_velocities log-centered on the critical velocity
    of the arm; three-arm defaults to the single velocity 100 mm/s. T1 = None
    resolves through the loading-duration equation at the highest velocity.
    """
    from .material import SBR_THREE_ARM, SINGLE_ARM_BENCH, critical_velocity
    if preset == "single-arm":
        mat = SINGLE_ARM_BENCH
        if velocities is None:
            v_star = critical_velocity(mat.arms[0][1], BENCH_LAM)
            velocities = log_centered_velocities(v_star, n_velocities)
    elif preset == "three-arm":
        mat = SBR_THREE_ARM
        if velocities is None:
            velocities = (100.0,)
    else:
        raise ValueError(f"unknown benchmark preset {preset!r}")
    prof = benchmark_profile(BENCH_LAM, BENCH_AMP, n_lambda,
                             points_per_wavelength=max(128, 2 * m_x))
    return SimulationConfig(
        material=mat, profile=prof, b_b=BENCH_LAM, h_b=0.75 * BENCH_LAM,
        m_x=m_x, p0=p0, velocities=tuple(velocities), t1=t1, lam=BENCH_LAM,
        n_lambda=n_lambda, eps_n=eps_n, boundary="periodic",
        label=f"benchmark-{preset}")


# --- output writers ----------------------------------------------------------

def write_timeseries_csv(result: FrictionResult, path) -> None:
    s = result.series
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("step,t_s,y1_mm,P_Npmm,Q_Npmm,mu\n")
        for k in range(s.t.size):
            fh.write(f"{int(s.step[k])},{float(s.t[k])!r},{float(s.y1[k])!r},"
                     f"{float(s.p[k])!r},{float(s.q[k])!r},{float(s.mu[k])!r}\n")


def write_sweep_csv(entries, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("v_mmps,mu_avg,contact_fraction_mean,energy_gap\n")
        for e in entries:
            if e.result is None:
                fh.write(f"{float(e.velocity)!r},nan,nan,nan\n")
            else:
                r = e.result
                fh.write(f"{float(e.velocity)!r},{float(r.mu_avg)!r},"
                         f"{float(r.contact_fraction_mean)!r},{float(r.energy_gap)!r}\n")


class ContactTraceWriter:
    """Per-step contact trace: x, corrected gap, traction, slope, active flag."""

    def __init__(self, path):
        self.fh = open(path, "w", encoding="utf-8")
        self.fh.write("step,x_mm,g_mm,p_MPa,slope,active\n")

    def __call__(self, step, t, env, u_full, state, gaps, tractions, slope,
                 active):
        for k in range(gaps.size):
            self.fh.write(f"{step},{float(env.layer.qp_x[k])!r},{float(gaps[k])!r},"
                          f"{float(tractions[k])!r},{float(slope[k])!r},{int(active[k])}\n")

    def close(self):
        self.fh.close()


class FieldDumpWriter:
    """Legacy-VTK text dumps of displacement and mean element stress."""

    def __init__(self, out_dir, material, every: int = 1, prefix="fields"):
        self.out_dir = out_dir
        self.material = material
        self.every = max(1, every)
        self.prefix = prefix

    def __call__(self, step, t, env, u_full, state, gaps, tractions, slope,
                 active):
        if step % self.every:
            return
        path = f"{self.out_dir}/{self.prefix}_{step:06d}.vtk"
        write_vtk(path, env.mesh, u_full, state, self.material, t)


def write_vtk(path, msh, u_full, state: fem.ViscoState, material, t: float):
    c1 = fem.plane_strain_unit(material.nu)
    sig = material.e0 * (state.eps @ c1.T)
    for i, (e_i, _) in enumerate(material.arms):
        sig = sig + e_i * ((state.eps - state.eps_v[i]) @ c1.T)
    sig_elem = sig.mean(axis=1)  # (E, 3)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(f"skidfem fields t={t!r}\nASCII\nDATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {msh.n_nodes} double\n")
        for x1, x2 in msh.nodes:
            fh.write(f"{float(x1)!r} {float(x2)!r} 0.0\n")
        fh.write(f"CELLS {msh.n_elems} {5 * msh.n_elems}\n")
        for q in msh.quads:
            fh.write(f"4 {q[0]} {q[1]} {q[2]} {q[3]}\n")
        fh.write(f"CELL_TYPES {msh.n_elems}\n")
        fh.write("\n".join(["9"] * msh.n_elems) + "\n")
        fh.write(f"POINT_DATA {msh.n_nodes}\nVECTORS displacement double\n")
        for n in range(msh.n_nodes):
            fh.write(f"{float(u_full[2 * n])!r} {float(u_full[2 * n + 1])!r} 0.0\n")
        fh.write(f"CELL_DATA {msh.n_elems}\nTENSORS stress double\n")
        for s11, s22, s12 in sig_elem:
            s11, s22, s12 = float(s11), float(s22), float(s12)
            fh.write(f"{s11!r} {s12!r} 0.0\n{s12!r} {s22!r} 0.0\n0.0 0.0 0.0\n\n")
