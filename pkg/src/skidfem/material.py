"""Generalized Maxwell (Prony series) rheology.

Relaxation modulus E(t) = E0 + sum_i E_i exp(-t/tau_i), its frequency-domain
storage/loss split, the optimal vertical-loading duration T1 (the root of
matching the relaxed-to-T1 stiffness with the storage stiffness at the sliding
excitation frequency), the critical sliding velocity of a single arm, and a
fixed-grid nonnegative least-squares Prony fit.

Poisson's ratio is constant in time: bulk and shear relax proportionally to
E(t), which is the minimal consistent isotropic choice when only E(t} and nu
are known.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .errors import NoRoot, ParseError, RankDeficient

T1_BRACKET_FACTOR = 50.0   # initial upper bracket: 50 x slowest arm
T1_REL_TOL = 1e-10


@dataclass(frozen=True)
class PronySeries:
    """Long-term modulus E0 (MPa) plus (E_i MPa, tau_i s) Maxwell arms."""

    e0: float
    arms: tuple = ()
    nu: float = 0.3

    def __post_init__(self):
        object.__setattr__(self, "e0", float(self.e0))
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "arms",
                           tuple((float(e), float(t)) for e, t in self.arms))
        if self.e0 <= 0:
            raise ValueError("E0 must be positive")
        if not 0.0 <= self.nu < 0.5:
            raise ValueError("nu must lie in [0, 0.5)")
        for e, t in self.arms:
            if e <= 0 or t <= 0:
                raise ValueError("arm moduli and relaxation times must be positive")

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    @property
    def e_inst(self) -> float:
        """Instantaneous modulus E0 + sum(E_i)."""
        return self.e0 + sum(e for e, _ in self.arms)

    @property
    def stiffnesses(self) -> np.ndarray:
        return np.array([e for e, _ in self.arms])

    @property
    def taus(self) -> np.ndarray:
        return np.array([t for _, t in self.arms])

    def without_arms(self) -> "PronySeries":
        """Elastic twin: same E0 and nu, no viscous arms."""
        return PronySeries(self.e0, (), self.nu)


@dataclass(frozen=True)
class ComplexModulusSample:
    omega: float
    storage: float
    loss: float


def relaxation_modulus(m: PronySeries, t):
    """E(t) = E0 + sum E_i exp(-t/tau_i); t scalar or array, t >= 0."""
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, m.e0)
    for e, tau in m.arms:
        out = out + e * np.exp(-t / tau)
    return float(out) if out.ndim == 0 else out


def storage_modulus(m: PronySeries, omega):
    omega = np.asarray(omega, dtype=float)
    out = np.full(omega.shape, m.e0)
    for e, tau in m.arms:
        wt2 = (omega * tau) ** 2
        out = out + e * wt2 / (1.0 + wt2)
    return float(out) if out.ndim == 0 else out


def loss_modulus(m: PronySeries, omega):
    omega = np.asarray(omega, dtype=float)
    out = np.zeros(omega.shape)
    for e, tau in m.arms:
        wt = omega * tau
        out = out + e * wt / (1.0 + wt * wt)
    return float(out) if out.ndim == 0 else out


def complex_modulus(m: PronySeries, omega: float) -> ComplexModulusSample:
    """Storage and loss moduli at a single circular frequency (rad/s)."""
    return ComplexModulusSample(float(omega),
                                storage_modulus(m, omega),
                                loss_modulus(m, omega))


def optimal_t1(m: PronySeries, omega: float) -> float:
    """Duration of the vertical loading phase matched to an excitation omega.

    Solves sum_k E_k exp(-T1/tau_k) = sum_k E_k (omega tau_k)^2 / (1 + (omega
    tau_k)^2) by bisection. The left side is strictly decreasing in T1, so the
    root is unique; for a single arm it reduces to T1 = tau ln(1 + 1/(omega
    tau)^2).
    """
    if m.n_arms == 0:
        raise NoRoot("material has no viscous arms")
    if omega <= 0:
        raise ValueError("omega must be positive")
    es, taus = m.stiffnesses, m.taus
    wt2 = (omega * taus) ** 2
    rhs = float(np.sum(es * wt2 / (1.0 + wt2)))
    e_sum = float(es.sum())
    if rhs >= e_sum:
        raise NoRoot("storage fraction reached the instantaneous limit")

    def lhs(t1):
        return float(np.sum(es * np.exp(-t1 / taus)))

    lo, hi = 0.0, T1_BRACKET_FACTOR * float(taus.max())
    while lhs(hi) > rhs:
        hi *= 2.0
        if hi > 1e12 * taus.max():
            raise NoRoot("bracket expansion failed")
    while hi - lo > T1_REL_TOL * hi:
        mid = 0.5 * (lo + hi)
        if lhs(mid) > rhs:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_velocity(tau: float, lam: float) -> float:
    """Sliding speed whose excitation frequency 2 pi v / lam equals 1/tau."""
    if tau <= 0 or lam <= 0:
        raise ValueError("tau and lam must be positive")
    return lam / (2.0 * np.pi * tau)


def fit_prony(samples, tau_grid, nu: float = 0.3) -> PronySeries:
    """Nonnegative least-squares Prony fit on a fixed relaxation-time grid.

    samples: iterable of (omega, storage, loss) rows. The objective is the
    summed squared *relative* error of storage and loss. Arms that the
    active-set solve clips to zero are dropped from the returned series.
    """
    data = np.asarray(list(samples), dtype=float)
    if data.ndim != 2 or data.shape[1] != 3:
        raise ValueError("samples must be (omega, storage, loss) rows")
    taus = np.asarray(tau_grid, dtype=float)
    n_arms = taus.size
    if data.shape[0] < 2 * n_arms + 1:
        raise ValueError(f"need >= {2 * n_arms + 1} samples for {n_arms} arms")
    omega, stor, loss = data.T
    if np.any(stor <= 0):
        raise ValueError("storage samples must be positive")

    wt = omega[:, None] * taus[None, :]
    stor_cols = wt ** 2 / (1.0 + wt ** 2)
    loss_cols = wt / (1.0 + wt ** 2)
    a_top = np.hstack([np.ones((omega.size, 1)), stor_cols]) / stor[:, None]
    loss_scale = np.where(loss > 0, loss, 1.0)
    a_bot = np.hstack([np.zeros((omega.size, 1)), loss_cols]) / loss_scale[:, None]
    a = np.vstack([a_top, a_bot])
    b = np.concatenate([np.ones(omega.size), np.where(loss > 0, 1.0, 0.0)])

    if n_arms > 0:
        sv = np.linalg.svd(a, compute_uv=False)
        if sv[-1] < 1e-10 * sv[0]:
            raise RankDeficient(
                "tau grid produces collinear columns over the sampled omega range")
    coeffs, _ = nnls(a, b)
    # E0 clipped to zero by the active set: keep the series valid with a
    # floor far below the data scale.
    e0 = coeffs[0] if coeffs[0] > 0.0 else 1e-12 * float(stor.max())
    arms = tuple((coeffs[1 + k], taus[k]) for k in range(n_arms)
                 if coeffs[1 + k] > 0.0)
    return PronySeries(e0, arms, nu)


def fit_residual(m: PronySeries, samples) -> float:
    """Summed squared relative storage+loss error of a series on sample rows."""
    data = np.asarray(list(samples), dtype=float)
    omega, stor, loss = data.T
    rs = (storage_modulus(m, omega) - stor) / stor
    loss_scale = np.where(loss > 0, loss, 1.0)
    rl = (loss_modulus(m, omega) - loss) / loss_scale
    return float(rs @ rs + rl @ rl)


# --- material files ---------------------------------------------------------

def load_material(path) -> PronySeries:
    """Key-value material file: `E0 = <MPa>`, repeated `arm = E_i, tau_i`, `nu = <->`."""
    e0 = None
    nu = 0.3
    arms = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError("expected 'key = value'", line=lineno)
            key, _, value = line.partition("=")
            key = key.strip().lower()
            try:
                if key == "e0":
                    e0 = float(value)
                elif key == "nu":
                    nu = float(value)
                elif key == "arm":
                    parts = value.replace(",", " ").split()
                    if len(parts) != 2:
                        raise ValueError("arm needs 'E_i, tau_i'")
                    arms.append((float(parts[0]), float(parts[1])))
                else:
                    raise ValueError(f"unknown key {key!r}")
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
    if e0 is None:
        raise ParseError(f"{path}: missing E0")
    return PronySeries(e0, tuple(arms), nu)


def save_material(m: PronySeries, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# skidfem material (MPa, s)\n")
        fh.write(f"E0 = {m.e0!r}\n")
        for e, tau in m.arms:
            fh.write(f"arm = {e!r}, {tau!r}\n")
        fh.write(f"nu = {m.nu!r}\n")


# --- presets ----------------------------------------------------------------

# Three-arm styrene-butadiene rubber fit used by the rough-profile runs.
SBR_THREE_ARM = PronySeries(
    9.77, ((5.41e2, 1.85e-6), (1.16e3, 8.09e-8), (1.19e3, 4.22e-10)), 0.3)

# Single-relaxation-time block used by the sinusoid benchmark.
SINGLE_ARM_BENCH = PronySeries(4.17, ((1.72, 0.01134034),), 0.3)

# Vertical-loading duration quoted for the single-arm benchmark run.
BENCH_T1 = 0.16150688

PRESETS = {"three-arm": SBR_THREE_ARM, "single-arm": SINGLE_ARM_BENCH}
