"""Rough-profile ingestion, cleanup and cubic-spline interpolation.

Profiles are ordered (x, z) samples in millimetres. The functions here take a
measured two-column file through the preparation pipeline (sort/merge, level,
Gaussian S-filter, rebase, optional down-sampling) and build the natural cubic
spline table that both the roughness toolkit and the contact solver consume.

All operations are pure: they return new objects and never mutate their input
(the spline table carries a clamp counter, which is the one mutable statistic).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import CutoffTooLarge, NonMonotonicKnots, ParseError, TooFewPoints

log = logging.getLogger("skidfem")

# Points closer than this in x are considered duplicates and merged (mm).
DUPLICATE_TOL = 1e-9

# Standard metrology Gaussian constant: 50% transmission at lambda = cutoff.
GAUSS_ALPHA = float(np.sqrt(np.log(2.0) / np.pi))


@dataclass
class RawProfile:
    """Measured profile as ingested: sorted, duplicate-free, otherwise untouched."""

    x: np.ndarray
    z: np.ndarray
    source_id: str = ""

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.z = np.asarray(self.z, dtype=float)
        if self.x.size < 4:
            raise TooFewPoints(f"profile needs >= 4 points, got {self.x.size}")
        if np.any(np.diff(self.x) <= 0):
            raise NonMonotonicKnots("profile x values must be strictly increasing")

    @property
    def npoints(self) -> int:
        return int(self.x.size)


@dataclass
class Profile:
    """Rebased profile: x starts at 0, min z is 0, with a processing trail."""

    x: np.ndarray
    z: np.ndarray
    source_id: str = ""
    processing_log: list = field(default_factory=list)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.z = np.asarray(self.z, dtype=float)

    @property
    def npoints(self) -> int:
        return int(self.x.size)

    @property
    def dx_mean(self) -> float:
        """Mean horizontal point spacing (mm)."""
        return float((self.x[-1] - self.x[0]) / (self.x.size - 1))

    @property
    def extent(self) -> float:
        return float(self.x[-1] - self.x[0])


@dataclass
class SplineTable:
    """Natural cubic spline: per-interval coefficients c1..c4 about the left knot.

    z(x) = c1 + c2*d + c3*d**2 + c4*d**3 with d = x - knots[i] on interval i.
    Out-of-range evaluations clamp to the end intervals; the first clamp per
    table is reported to the run log and all clamps are counted.
    """

    knots: np.ndarray
    coeffs: np.ndarray  # shape (n-1, 4)
    clamp_count: int = 0

    def _bracket(self, x):
        idx = np.searchsorted(self.knots, x, side="right") - 1
        clamped = int(np.count_nonzero(idx < 0) + np.count_nonzero(x > self.knots[-1]))
        if clamped:
            if self.clamp_count == 0:
                log.warning(
                    "spline evaluated outside [%g, %g]; clamping to end intervals",
                    self.knots[0], self.knots[-1],
                )
            self.clamp_count += clamped
        return np.clip(idx, 0, self.knots.size - 2)


def load_profile(path, fmt: str = "auto") -> RawProfile:
    """Read a two-column (x, z) text file in mm.

    Accepts whitespace- or comma-separated columns ("xy_text" / "csv";
    "auto" sniffs per line). Blank lines and '#' comments are skipped.
    Points are sorted ascending in x and duplicates within 1e-9 mm are
    merged by averaging z.
    """
    xs, zs = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if fmt == "csv" or (fmt == "auto" and "," in line):
                parts = [p for p in line.split(",") if p.strip()]
            else:
                parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"expected 2 columns, got {len(parts)}", line=lineno)
            try:
                xs.append(float(parts[0]))
                zs.append(float(parts[1]))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
    if len(xs) < 4:
        raise TooFewPoints(f"{path}: {len(xs)} valid rows, need >= 4")
    x = np.asarray(xs)
    z = np.asarray(zs)
    order = np.argsort(x, kind="stable")
    x, z = x[order], z[order]
    x, z = _merge_duplicates(x, z)
    if x.size < 4:
        raise TooFewPoints(f"{path}: {x.size} distinct x values, need >= 4")
    return RawProfile(x, z, source_id=str(path))


def save_profile(p, path) -> None:
    """Write a profile in the same two-column text format (round-trippable)."""
    header = f"# skidfem profile ({getattr(p, 'source_id', '') or 'unnamed'})\n"
    steps = getattr(p, "processing_log", None)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header)
        if steps:
            fh.write("# processing: " + " -> ".join(steps) + "\n")
        for xi, zi in zip(p.x, p.z):
            fh.write(f"{float(xi)!r} {float(zi)!r}\n")


def _merge_duplicates(x, z):
    if x.size == 0:
        return x, z
    group = np.concatenate(([0], np.cumsum(np.diff(x) > DUPLICATE_TOL)))
    n = group[-1] + 1
    counts = np.bincount(group, minlength=n)
    xm = np.bincount(group, weights=x, minlength=n) / counts
    zm = np.bincount(group, weights=z, minlength=n) / counts
    return xm, zm


def _lsq_line(x, z):
    """Least-squares line through (x, z); returns (slope, intercept)."""
    xm = x.mean()
    zm = z.mean()
    dx = x - xm
    denom = float(dx @ dx)
    slope = float(dx @ (z - zm)) / denom if denom > 0 else 0.0
    return slope, zm - slope * xm


def level(p: RawProfile) -> RawProfile:
    """Subtract the least-squares best-fit line from z."""
    slope, intercept = _lsq_line(p.x, p.z)
    return RawProfile(p.x.copy(), p.z - (slope * p.x + intercept), p.source_id)


def gaussian_s_filter(p: RawProfile, cutoff: float) -> RawProfile:
    """Low-pass Gaussian filter with the standard metrology weighting.

    The weighting function w(s) = exp(-pi (s / (alpha*cutoff))**2),
    alpha = sqrt(ln 2 / pi), transmits exactly 50% at wavelength = cutoff.
    Output is sampled at the input x positions. Near the ends the weights are
    renormalized over the available window (no zero padding), which keeps the
    DC gain at one everywhere.
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    x, z = p.x, p.z
    span = x[-1] - x[0]
    if span < 10.0 * cutoff:
        raise CutoffTooLarge(
            f"profile extent {span:g} mm < 10 x cutoff ({10 * cutoff:g} mm)"
        )
    # tributary lengths for the non-uniform quadrature of the convolution
    trib = np.empty_like(x)
    trib[1:-1] = 0.5 * (x[2:] - x[:-2])
    trib[0] = 0.5 * (x[1] - x[0])
    trib[-1] = 0.5 * (x[-1] - x[-2])
    width = GAUSS_ALPHA * cutoff
    reach = 2.5 * cutoff  # weight at the edge ~ exp(-89), fully negligible
    out = np.empty_like(z)
    lo = np.searchsorted(x, x - reach, side="left")
    hi = np.searchsorted(x, x + reach, side="right")
    for i in range(x.size):
        sl = slice(lo[i], hi[i])
        w = np.exp(-np.pi * ((x[sl] - x[i]) / width) ** 2) * trib[sl]
        out[i] = (w @ z[sl]) / w.sum()
    return RawProfile(x.copy(), out, p.source_id)


def rebase(p) -> Profile:
    """Shift x so x[0] = 0 and z so min(z) = 0."""
    steps = list(getattr(p, "processing_log", []))
    steps.append("rebase")
    return Profile(p.x - p.x[0], p.z - p.z.min(),
                   source_id=p.source_id, processing_log=steps)


def downsample(p: Profile, rho: int) -> Profile:
    """Keep every rho-th point (always including the last), then re-rebase."""
    if rho < 1:
        raise ValueError("rho must be a positive integer")
    if rho == 1:
        return Profile(p.x.copy(), p.z.copy(), p.source_id,
                       list(p.processing_log))
    idx = np.arange(0, p.npoints, rho)
    if idx[-1] != p.npoints - 1:
        idx = np.append(idx, p.npoints - 1)
    if idx.size < 4:
        raise TooFewPoints(f"rho={rho} leaves {idx.size} points, need >= 4")
    x, z = p.x[idx], p.z[idx]
    steps = list(p.processing_log) + [f"downsample(rho={rho})"]
    return Profile(x - x[0], z - z.min(), p.source_id, steps)


def build_spline(p) -> SplineTable:
    """Natural cubic spline through the profile points.

    Second derivatives vanish at both ends; knot values are reproduced
    exactly and the interpolant is C2 at interior knots.
    """
    x = np.asarray(p.x, dtype=float)
    z = np.asarray(p.z, dtype=float)
    n = x.size
    if n < 4:
        raise TooFewPoints(f"spline needs >= 4 knots, got {n}")
    h = np.diff(x)
    if np.any(h <= 0):
        raise NonMonotonicKnots("spline knots must be strictly increasing")
    # tridiagonal system for interior second derivatives (Thomas algorithm)
    m = np.zeros(n)
    if n > 2:
        a = h[:-1].copy()                      # sub-diagonal
        b = 2.0 * (h[:-1] + h[1:])             # diagonal
        c = h[1:].copy()                       # super-diagonal
        d = 6.0 * ((z[2:] - z[1:-1]) / h[1:] - (z[1:-1] - z[:-2]) / h[:-1])
        for i in range(1, n - 2):
            w = a[i] / b[i - 1]
            b[i] -= w * c[i - 1]
            d[i] -= w * d[i - 1]
        sol = np.zeros(n - 2)
        sol[-1] = d[-1] / b[-1]
        for i in range(n - 4, -1, -1):
            sol[i] = (d[i] - c[i] * sol[i + 1]) / b[i]
        m[1:-1] = sol
    c1 = z[:-1].copy()
    c2 = (z[1:] - z[:-1]) / h - h * (2.0 * m[:-1] + m[1:]) / 6.0
    c3 = m[:-1] / 2.0
    c4 = (m[1:] - m[:-1]) / (6.0 * h)
    return SplineTable(x.copy(), np.column_stack([c1, c2, c3, c4]))


def eval_spline(s: SplineTable, x):
    """Piecewise-cubic value at x (scalar or array); clamps outside the knots."""
    xq = np.asarray(x, dtype=float)
    scalar = xq.ndim == 0
    xq = np.atleast_1d(xq)
    i = s._bracket(xq)
    d = xq - s.knots[i]
    c = s.coeffs[i]
    out = c[:, 0] + d * (c[:, 1] + d * (c[:, 2] + d * c[:, 3]))
    return float(out[0]) if scalar else out


def eval_spline_slope(s: SplineTable, x):
    """First derivative dz/dx of the spline at x; clamps outside the knots."""
    xq = np.asarray(x, dtype=float)
    scalar = xq.ndim == 0
    xq = np.atleast_1d(xq)
    i = s._bracket(xq)
    d = xq - s.knots[i]
    c = s.coeffs[i]
    out = c[:, 1] + d * (2.0 * c[:, 2] + d * 3.0 * c[:, 3])
    return float(out[0]) if scalar else out


# --- synthetic profiles -----------------------------------------------------

def sine_profile(lam: float, amplitude: float, extent: float,
                 points_per_wavelength: int = 64) -> Profile:
    """Rebased sinusoid z = a*(1 + sin(2 pi x / lam)) over [0, extent]."""
    n = max(4, int(round(extent / lam * points_per_wavelength)) + 1)
    x = np.linspace(0.0, extent, n)
    z = amplitude * (1.0 + np.sin(2.0 * np.pi * x / lam))
    return rebase(Profile(x, z, source_id=f"sine(lam={lam:g},a={amplitude:g})"))


def synthetic_rough_profile(extent: float, dx: float, seed: int = 0,
                            components: int = 6,
                            lam_max: float = None,
                            lam_min: float = None,
                            amplitude: float = None,
                            hurst: float = 0.8) -> Profile:
    """Deterministic multi-sine 'rough' profile for tests and demos.

    Wavelengths are log-spaced in [lam_min, lam_max] (defaults extent/8 down to
    8*dx) with amplitudes ~ lam**hurst and seed-fixed phases. The result is
    leveled and rebased like a measured profile.
    """
    rng = np.random.RandomState(seed)
    n = int(round(extent / dx)) + 1
    x = np.linspace(0.0, extent, n)
    lam_max = extent / 8.0 if lam_max is None else lam_max
    lam_min = 8.0 * dx if lam_min is None else lam_min
    lams = np.geomspace(lam_max, lam_min, components)
    amps = lams ** hurst
    if amplitude is not None:
        amps *= amplitude / amps.sum()
    phases = rng.uniform(0.0, 2.0 * np.pi, components)
    z = np.zeros_like(x)
    for lam_i, a_i, ph_i in zip(lams, amps, phases):
        z += a_i * np.sin(2.0 * np.pi * x / lam_i + ph_i)
    raw = level(RawProfile(x, z, source_id=f"synthetic(seed={seed})"))
    return rebase(raw)
