"""Command-line interface: roughness reports, material tables, benchmark and
rough-profile sliding runs, sweeps and SVG plots.

Every run writes a RunManifest (run.json) holding the resolved configuration,
input file hashes, tool version and timing stats; `skidfem rerun run.json`
re-executes it and reproduces the product files bit-identically (run.json
itself differs only in its timing block).

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__, material as mat, profile as prof, roughness, sim
from .errors import (CutoffTooLarge, InvalidGrading, NonMonotonicKnots,
                     ParseError, SkidfemError, TooFewPoints)
from .svgplot import plot_xy

log = logging.getLogger("skidfem")

INPUT_ERRORS = (FileNotFoundError, IsADirectoryError, PermissionError,
                ParseError, TooFewPoints, CutoffTooLarge, NonMonotonicKnots,
                InvalidGrading, ValueError)

DEFAULT_CUTOFF = 2.5e-3  # mm, short-wavelength S-filter
ROUGH_P0 = 2.0           # MPa, rough-profile default pressure
ROUGH_B = 10.0           # mm, rough-profile default skid length
ROUGH_V_MIN, ROUGH_V_CENTER, ROUGH_V_MAX = 1.0e3, 1.0e4, 1.0e5


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


class Manifest:
    """Collects the resolved run description; written before and after."""

    def __init__(self, out_dir, command, args):
        import platform

        import scipy

        self.out_dir = out_dir
        self.data = {
            "tool": "skidfem",
            "version": __version__,
            "command": command,
            "args": {k: v for k, v in sorted(vars(args).items())
                     if k not in ("func", "out", "from_manifest", "command",
                                  "config")},
            "environment": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
            "inputs": {},
            "config": {},
            "outputs": [],
            "timing": {},
        }
        self._t0 = time.time()

    def add_input(self, path):
        self.data["inputs"][str(path)] = file_sha256(path)

    def add_output(self, path):
        self.data["outputs"].append(os.path.basename(str(path)))

    def path(self):
        return os.path.join(self.out_dir, "run.json")

    def write(self, final=False):
        if final:
            self.data["timing"]["wall_s"] = time.time() - self._t0
        with open(self.path(), "w", encoding="utf-8") as fh:
            json.dump(self.data, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _outfile(manifest, name):
    path = os.path.join(manifest.out_dir, name)
    manifest.add_output(path)
    return path


def load_prepared_profile(path, cutoff=DEFAULT_CUTOFF, rho=1, do_filter=True):
    """File -> leveled, S-filtered, rebased (and down-sampled) profile."""
    raw = prof.load_profile(path)
    raw = prof.level(raw)
    if do_filter and cutoff > 0:
        raw = prof.gaussian_s_filter(raw, cutoff)
    p = prof.rebase(raw)
    if rho > 1:
        p = prof.downsample(p, rho)
    return p


def resolve_material(spec):
    if spec in mat.PRESETS:
        return mat.PRESETS[spec], None
    return mat.load_material(spec), spec


# --- roughness ----------------------------------------------------------------

def cmd_roughness(args):
    manifest = Manifest(args.out, "roughness", args)
    manifest.add_input(args.profile)
    p = load_prepared_profile(args.profile, cutoff=args.cutoff,
                              do_filter=not args.no_filter)
    report = roughness.roughness_report(
        p, n_sections=args.sections, height_disc=args.height_disc,
        spacing_disc=args.spacing_disc)
    manifest.data["config"] = {"cutoff_mm": args.cutoff,
                               "sections": args.sections,
                               "height_disc": args.height_disc,
                               "spacing_disc": args.spacing_disc}
    with open(_outfile(manifest, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(report.to_json() + "\n")
    table = report.format_table()
    with open(_outfile(manifest, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(table + "\n")
    print(table)
    manifest.write(final=True)
    return 0


# --- material -----------------------------------------------------------------

def cmd_material(args):
    manifest = Manifest(args.out, "material", args)
    if args.fit:
        manifest.add_input(args.fit)
        rows = np.loadtxt(args.fit, delimiter=",", comments="#")
        omega = rows[:, 0]
        taus = (np.geomspace(1.0 / omega.max(), 1.0 / omega.min(), args.arms)
                if args.arms > 0 else np.array([]))
        fitted = mat.fit_prony(rows, taus, nu=args.nu)
        res = mat.fit_residual(fitted, rows)
        out = _outfile(manifest, "fitted.mat")
        mat.save_material(fitted, out)
        print(f"fitted {fitted.n_arms} arms, residual {res:.6g} -> {out}")
        manifest.data["config"] = {"arms": args.arms, "residual": res}
        manifest.write(final=True)
        return 0
    if args.file:
        manifest.add_input(args.file)
        m, _ = resolve_material(args.file)
    else:
        m = mat.PRESETS[args.preset]
    manifest.data["config"] = {"E0_MPa": m.e0, "arms": [list(a) for a in m.arms],
                               "nu": m.nu, "E_inst_MPa": m.e_inst}
    if args.t1:
        if not args.omega:
            raise SkidfemError("--t1 needs --omega (rad/s)")
        t1 = mat.optimal_t1(m, args.omega)
        print(f"T1 = {t1!r} s at omega = {args.omega:g} rad/s")
        manifest.data["config"]["t1_s"] = t1
        manifest.data["config"]["omega_rad_s"] = args.omega
    if args.table:
        taus = m.taus if m.n_arms else np.array([1.0])
        tgrid = np.geomspace(taus.min() / 1e3, taus.max() * 1e3, 121)
        wgrid = np.geomspace(1e-3 / taus.max(), 1e3 / taus.min(), 121)
        with open(_outfile(manifest, "relaxation.csv"), "w", encoding="utf-8") as fh:
            fh.write("t_s,E_MPa\n")
            for t, e in zip(tgrid, mat.relaxation_modulus(m, tgrid)):
                fh.write(f"{float(t)!r},{float(e)!r}\n")
        stor = mat.storage_modulus(m, wgrid)
        loss = mat.loss_modulus(m, wgrid)
        with open(_outfile(manifest, "moduli.csv"), "w", encoding="utf-8") as fh:
            fh.write("omega_rad_s,storage_MPa,loss_MPa\n")
            for w, s, l in zip(wgrid, stor, loss):
                fh.write(f"{float(w)!r},{float(s)!r},{float(l)!r}\n")
        plot_xy([(wgrid, stor, "storage"), (wgrid, np.maximum(loss, 1e-300), "loss")],
                _outfile(manifest, "moduli.svg"), title="Dynamic moduli",
                xlabel="omega (rad/s)", ylabel="modulus (MPa)",
                logx=True, logy=True)
        print(f"tables written to {args.out}")
    manifest.write(final=True)
    return 0


# --- benchmark ----------------------------------------------------------------

def _run_and_write_sweep(cfg, manifest, jobs, v_mark=None, observers=None):
    if observers:
        # observers (field dumps, contact traces) attach to a direct
        # single-velocity run; sweeps stay observer-free
        if len(cfg.velocities) != 1:
            raise ValueError("--dump-fields/--contact-trace need a single "
                             "velocity")
        env = sim.prepare_env(cfg)
        from .mesh import dump_mesh_csv
        dump_mesh_csv(env.mesh, _outfile(manifest, "mesh_nodes.csv"),
                      _outfile(manifest, "mesh_quads.csv"))
        phase1 = sim.run_phase1(cfg, env)

        def fanout(*a):
            for obs in observers:
                obs(*a)

        res = sim.run_phase2(cfg, env, phase1, cfg.velocities[0],
                             observer=fanout)
        for obs in observers:
            if hasattr(obs, "close"):
                obs.close()
        entries = [sim.SweepEntry(cfg.velocities[0], result=res)]
    else:
        entries = sim.run_sweep(cfg, jobs=jobs)
    sim.write_sweep_csv(entries, _outfile(manifest, "sweep.csv"))
    for e in entries:
        if e.result is not None:
            sim.write_timeseries_csv(
                e.result, _outfile(manifest, f"timeseries_{e.velocity:.6g}.csv"))
        else:
            log.warning("velocity %g failed: %s", e.velocity, e.error)
    ok = [e for e in entries if e.result is not None]
    if ok:
        vs = np.array([e.velocity for e in ok])
        mus = np.array([e.result.mu_avg for e in ok])
        series = [(vs, mus, "simulated")]
        if v_mark is not None:
            series.append((np.array([v_mark, v_mark]),
                           np.array([max(mus.min(), 1e-12), mus.max()]), "v*"))
        plot_xy(series, _outfile(manifest, "sweep_mu.svg"),
                title="Averaged friction vs sliding velocity",
                xlabel="v (mm/s)", ylabel="mu_avg", logx=True)
        pick = ok[int(np.argmin([abs(np.log10(e.velocity / (v_mark or e.velocity)))
                                 for e in ok]))]
        s = pick.result.series
        plot_xy([(s.y1, s.mu, f"v={pick.velocity:.4g} mm/s")],
                _outfile(manifest, "mu_t.svg"),
                title="Instantaneous friction coefficient",
                xlabel="sliding distance (mm)", ylabel="mu")
    return entries


def cmd_benchmark(args):
    manifest = Manifest(args.out, "benchmark", args)
    mx_list = [int(s) for s in str(args.mx).split(",")]
    t1 = None if args.t1 in (None, "auto") else float(args.t1)
    velocities = None
    if args.velocities:
        velocities = tuple(float(s) for s in args.velocities.split(","))
    v_star = None
    if args.preset == "single-arm":
        m = mat.SINGLE_ARM_BENCH
        v_star = mat.critical_velocity(m.arms[0][1], sim.BENCH_LAM)

    if len(mx_list) > 1:
        # mesh-convergence study at one velocity
        v = velocities[0] if velocities else (v_star or 100.0)
        rows = []
        for mx in mx_list:
            cfg = sim.benchmark_config(args.preset, m_x=mx, velocities=(v,),
                                       p0=args.p0, t1=t1,
                                       n_lambda=args.n_lambda, eps_n=args.eps_n)
            res = sim.run_single(cfg)
            rows.append((mx, res.mu_avg))
            print(f"m_x={mx}: mu_avg={res.mu_avg!r}")
        with open(_outfile(manifest, "convergence.csv"), "w", encoding="utf-8") as fh:
            fh.write("m_x,mu_avg\n")
            for mx, mu in rows:
                fh.write(f"{mx},{float(mu)!r}\n")
        manifest.data["config"] = {"preset": args.preset, "m_x": mx_list,
                                   "velocity_mmps": v}
        manifest.write(final=True)
        return 0

    cfg = sim.benchmark_config(args.preset, m_x=mx_list[0],
                               velocities=velocities,
                               n_velocities=args.v_count, p0=args.p0, t1=t1,
                               n_lambda=args.n_lambda, eps_n=args.eps_n)
    manifest.data["config"] = cfg.to_dict()
    manifest.write()
    entries = _run_and_write_sweep(cfg, manifest, args.jobs, v_mark=v_star,
                                   observers=_build_observers(args, manifest, cfg))
    if args.preset == "single-arm":
        ok = [e for e in entries if e.result is not None]
        if ok:
            env_u0 = sim.analytic_u0(args.p0, sim.BENCH_LAM, m.nu, m.e_inst)
            e1, tau = m.arms[0]
            with open(_outfile(manifest, "analytic_mu.csv"), "w",
                      encoding="utf-8") as fh:
                fh.write("v_mmps,mu_eq_analytic\n")
                for e in ok:
                    mu_a = sim.analytic_mu_sine(e1, m.e_inst, sim.BENCH_AMP,
                                                env_u0, sim.BENCH_LAM, tau,
                                                e.velocity)
                    fh.write(f"{float(e.velocity)!r},{float(mu_a)!r}\n")
    for e in entries:
        if e.result is not None:
            print(f"v={e.velocity:.6g} mm/s: mu_avg={e.result.mu_avg!r}")
        else:
            print(f"v={e.velocity:.6g} mm/s: FAILED ({e.error})")
    manifest.write(final=True)
    return 0


def _build_observers(args, manifest, cfg):
    observers = []
    if getattr(args, "contact_trace", False):
        observers.append(sim.ContactTraceWriter(
            _outfile(manifest, "contact_trace.csv")))
    every = getattr(args, "dump_fields", 0)
    if every:
        observers.append(sim.FieldDumpWriter(manifest.out_dir, cfg.material,
                                             every=every))
    return observers


# --- rough-profile sliding ------------------------------------------------------

def cmd_slide(args):
    manifest = Manifest(args.out, "slide", args)
    manifest.add_input(args.profile)
    m, mfile = resolve_material(args.material)
    if mfile:
        manifest.add_input(mfile)
    rhos = [int(s) for s in str(args.rho).split(",")]
    b_b = args.b
    h_b = 0.75 * b_b

    def build_cfg(rho, velocities):
        p = load_prepared_profile(args.profile, cutoff=args.cutoff, rho=rho)
        m_x = max(32, int(round(b_b / (rho * p.dx_mean) / 32.0)) * 32)
        length = args.length
        if args.short:
            length = 2.0 * b_b
        return sim.SimulationConfig(
            material=m, profile=p, b_b=b_b, h_b=h_b, m_x=m_x, p0=args.p0,
            velocities=velocities, t1=None if args.t1 in (None, "auto")
            else float(args.t1), slide_length=length, eps_n=args.eps_n,
            boundary="free", rho=rho, label=f"slide-rho{rho}")

    if len(rhos) > 1:
        v = args.v_center
        rows = []
        for rho in rhos:
            cfg = build_cfg(rho, (v,))
            res = sim.run_single(cfg)
            rows.append((rho, cfg.m_x, res.mu_avg))
            print(f"rho={rho} (m_x={cfg.m_x}): mu_avg={res.mu_avg!r}")
        with open(_outfile(manifest, "rho_compare.csv"), "w", encoding="utf-8") as fh:
            fh.write("rho,m_x,mu_avg\n")
            for rho, mx, mu in rows:
                fh.write(f"{rho},{mx},{float(mu)!r}\n")
        manifest.data["config"] = {"rho": rhos, "velocity_mmps": v,
                                   "p0_MPa": args.p0, "b_mm": b_b}
        manifest.write(final=True)
        return 0

    velocities = tuple(np.geomspace(args.v_min, args.v_max, args.v_count))
    cfg = build_cfg(rhos[0], velocities)
    manifest.data["config"] = cfg.to_dict()
    manifest.write()
    entries = _run_and_write_sweep(cfg, manifest, args.jobs,
                                   v_mark=args.v_center,
                                   observers=_build_observers(args, manifest, cfg))
    for e in entries:
        if e.result is not None:
            print(f"v={e.velocity:.6g} mm/s: mu_avg={e.result.mu_avg!r}")
        else:
            print(f"v={e.velocity:.6g} mm/s: FAILED ({e.error})")
    manifest.write(final=True)
    return 0


# --- rerun from manifest --------------------------------------------------------

def cmd_rerun(args):
    with open(args.manifest, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    for path, digest in data.get("inputs", {}).items():
        if file_sha256(path) != digest:
            raise SkidfemError(f"input {path} changed since the manifest was written")
    command = data["command"]
    argv = [command]
    for key, val in data["args"].items():
        if val in (None, False):
            continue
        flag = "--" + key.replace("_", "-")
        if key in ("profile", "manifest"):
            argv.append(str(val))
        elif val is True:
            argv.append(flag)
        else:
            argv.extend([flag, str(val)])
    argv.extend(["--out", args.out])
    return main(argv)


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="skidfem",
        description="Hysteretic friction of a viscoelastic skid on rigid rough "
                    "profiles, plus an ISO-style profile roughness toolkit. "
                    "Units: mm, s, MPa, N/mm.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    ap._skidfem_subs = {}

    def add_out(p, name):
        ap._skidfem_subs[name.split("/")[0]] = p
        p.add_argument("--out", default=f"skidfem-out/{name}",
                       help="output directory (created if missing)")
        p.add_argument("--config", default=None, metavar="FILE",
                       help="key-value run-config file (key = value per "
                            "line, keys are the long option names); explicit "
                            "command-line flags override it")

    pr = sub.add_parser("roughness", help="roughness parameter report")
    pr.add_argument("profile", help="two-column x z profile file (mm)")
    pr.add_argument("--sections", type=int, default=5,
                    help="section count for the peak/pit parameters (default 5)")
    pr.add_argument("--height-disc", type=float, default=0.10,
                    help="element height discrimination, fraction of Pt (default 0.10)")
    pr.add_argument("--spacing-disc", type=float, default=0.01,
                    help="element spacing discrimination, fraction of length (default 0.01)")
    pr.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF,
                    help=f"Gaussian S-filter cutoff in mm (default {DEFAULT_CUTOFF})")
    pr.add_argument("--no-filter", action="store_true",
                    help="skip the S-filter")
    add_out(pr, "roughness")
    pr.set_defaults(func=cmd_roughness)

    pm = sub.add_parser("material", help="rheology tables, T1, Prony fitting")
    pm.add_argument("--file", help="material file (E0/arm/nu keys; MPa, s)")
    pm.add_argument("--preset", choices=sorted(mat.PRESETS),
                    default="three-arm", help="built-in material")
    pm.add_argument("--table", action="store_true",
                    help="write relaxation and dynamic-moduli CSV + SVG")
    pm.add_argument("--t1", action="store_true",
                    help="solve the loading-duration equation")
    pm.add_argument("--omega", type=float,
                    help="excitation frequency for --t1 (rad/s)")
    pm.add_argument("--fit", help="CSV of omega_rad_s,storage_MPa,loss_MPa to fit")
    pm.add_argument("--arms", type=int, default=3,
                    help="number of Prony arms for --fit (default 3)")
    pm.add_argument("--nu", type=float, default=0.3,
                    help="Poisson ratio attached to fitted material (default 0.3)")
    add_out(pm, "material")
    pm.set_defaults(func=cmd_material)

    pb = sub.add_parser("benchmark", help="sinusoid benchmark runs and sweeps")
    pb.add_argument("--preset", choices=("single-arm", "three-arm"),
                    default="single-arm")
    pb.add_argument("--mx", default="128",
                    help="interface elements per wavelength; a comma list runs "
                         "a mesh-convergence study (default 128)")
    pb.add_argument("--velocities", help="comma list of velocities (mm/s)")
    pb.add_argument("--v-count", type=int, default=9,
                    help="log-centered velocity count when --velocities is not "
                         "given (default 9)")
    pb.add_argument("--n-lambda", type=float, default=4.0,
                    help="sliding distance in wavelengths (default 4)")
    pb.add_argument("--p0", type=float, default=10.0,
                    help="applied pressure in MPa (default 10)")
    pb.add_argument("--t1", default="auto",
                    help="Phase-I duration in s, or 'auto' (loading-duration "
                         "equation at the highest velocity)")
    pb.add_argument("--eps-n", default="paper_text",
                    help="penalty: 'paper_text' (100 E_inst/h), 'paper_fig9' "
                         "(10 E_inst/h) or a value in MPa/mm")
    pb.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                    help="parallel sweep processes (default: cpu count)")
    pb.add_argument("--dump-fields", type=int, default=0, metavar="N",
                    help="write VTK displacement/stress fields every N steps "
                         "(single-velocity runs)")
    pb.add_argument("--contact-trace", action="store_true",
                    help="write the per-step contact trace CSV "
                         "(single-velocity runs)")
    add_out(pb, "benchmark")
    pb.set_defaults(func=cmd_benchmark)

    ps = sub.add_parser("slide", help="rough-profile sliding sweep")
    ps.add_argument("profile", help="two-column x z profile file (mm)")
    ps.add_argument("--material", default="three-arm",
                    help="material file or preset name (default three-arm)")
    ps.add_argument("--rho", default="2",
                    help="down-sampling factor; a comma list runs the "
                         "resolution comparison at --v-center (default 2)")
    ps.add_argument("--b", type=float, default=ROUGH_B,
                    help=f"skid length in mm (default {ROUGH_B}; height is 0.75 b)")
    ps.add_argument("--p0", type=float, default=ROUGH_P0,
                    help=f"applied pressure in MPa (default {ROUGH_P0})")
    ps.add_argument("--v-center", type=float, default=ROUGH_V_CENTER,
                    help="sweep center / comparison velocity in mm/s "
                         f"(default {ROUGH_V_CENTER:g})")
    ps.add_argument("--v-min", type=float, default=ROUGH_V_MIN,
                    help=f"sweep lower bound in mm/s (default {ROUGH_V_MIN:g})")
    ps.add_argument("--v-max", type=float, default=ROUGH_V_MAX,
                    help=f"sweep upper bound in mm/s (default {ROUGH_V_MAX:g})")
    ps.add_argument("--v-count", type=int, default=20,
                    help="sweep point count (default 20)")
    ps.add_argument("--length", type=float,
                    help="sliding length in mm (default: full profile)")
    ps.add_argument("--short", action="store_true",
                    help="short run: sliding length 2 b")
    ps.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF,
                    help=f"S-filter cutoff in mm (default {DEFAULT_CUTOFF})")
    ps.add_argument("--t1", default="auto",
                    help="Phase-I duration in s or 'auto' (Nyquist rule)")
    ps.add_argument("--eps-n", default="paper_text",
                    help="penalty preset or value in MPa/mm")
    ps.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                    help="parallel sweep processes (default: cpu count)")
    ps.add_argument("--dump-fields", type=int, default=0, metavar="N",
                    help="write VTK displacement/stress fields every N steps "
                         "(single-velocity runs)")
    ps.add_argument("--contact-trace", action="store_true",
                    help="write the per-step contact trace CSV "
                         "(single-velocity runs)")
    add_out(ps, "slide")
    ps.set_defaults(func=cmd_slide)

    pe = sub.add_parser("rerun", help="re-execute a run from its manifest")
    pe.add_argument("manifest", help="path to a run.json")
    add_out(pe, "rerun")
    pe.set_defaults(func=cmd_rerun)
    return ap


def _apply_config_file(ap, argv):
    """Pull --config FILE out of argv and install its keys as defaults."""
    path = None
    out = []
    it = iter(argv)
    for a in it:
        if a == "--config":
            path = next(it, None)
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
        else:
            out.append(a)
    if path is None:
        return argv
    command = next((a for a in out if not a.startswith("-")), None)
    sub = ap._skidfem_subs.get(command)
    if sub is None:
        raise SkidfemError(f"--config needs a known command, got {command!r}")
    actions = {a.dest: a for a in sub._actions}
    overrides = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError("expected 'key = value'", line=lineno)
            key, _, value = line.partition("=")
            dest = key.strip().replace("-", "_")
            value = value.strip()
            if dest not in actions:
                raise ParseError(f"unknown config key {key.strip()!r}",
                                 line=lineno)
            action = actions[dest]
            if isinstance(action, argparse._StoreTrueAction):
                overrides[dest] = value.lower() in ("1", "true", "yes", "on")
            elif action.type is not None:
                overrides[dest] = action.type(value)
            else:
                overrides[dest] = value
    sub.set_defaults(**overrides)
    return out


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config_file(ap, argv)
    except INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except SkidfemError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    args = ap.parse_args(argv)
    try:
        os.makedirs(args.out, exist_ok=True)
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except SkidfemError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
