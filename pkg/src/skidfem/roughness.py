"""ISO-style profile roughness descriptors on primary (unfiltered-scale) profiles.

Amplitude parameters (Pa, Pq, Pt) are length-weighted over the evaluation
length; feature parameters (Ppt, Pvt, Pz) come from fixed-width sections of
the global mean-line residual; element parameters (Psm, Psmx, Pc, Pcx) come
from mean-line crossings with height/spacing discrimination; MPD is the
classic two-half-peak texture depth. Profiles are expected leveled (least
squares line removed) before any of these are computed.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import NoElementsFound, TooFewPointsPerSection
from .profile import _lsq_line

log = logging.getLogger("skidfem")

DEFAULT_SECTIONS = 5
DEFAULT_HEIGHT_DISC = 0.10
DEFAULT_SPACING_DISC = 0.01

# Ratio of total height to x-extent below which a profile is treated as
# featureless (float noise left by leveling an exact line).
_DEGENERATE_RATIO = 1e-12


@dataclass
class SectionScheme:
    n_sections: int
    section_len: float  # mm, evaluation length / n_sections


@dataclass
class ProfileElement:
    x_start: float
    x_end: float
    height: float  # peak-to-pit within the element (mm)

    @property
    def spacing(self) -> float:
        return self.x_end - self.x_start


@dataclass
class RoughnessReport:
    mpd: float
    pa: float
    pq: float
    pt: float
    ppt: float
    pvt: float
    pz: float
    psm: float
    psmx: float
    pc: float
    pcx: float
    element_count: int
    scheme: SectionScheme
    height_disc: float = DEFAULT_HEIGHT_DISC
    spacing_disc: float = DEFAULT_SPACING_DISC
    source_id: str = ""
    notes: list = field(default_factory=list)

    _ROWS = ("mpd", "pa", "pq", "pt", "ppt", "pvt", "pz",
             "psm", "psmx", "pc", "pcx")
    _LABELS = {"mpd": "MPD", "pa": "Pa", "pq": "Pq", "pt": "Pt",
               "ppt": "Ppt", "pvt": "Pvt", "pz": "Pz", "psm": "Psm",
               "psmx": "Psmx", "pc": "Pc", "pcx": "Pcx"}

    def to_dict(self) -> dict:
        d = {self._LABELS[k]: getattr(self, k) for k in self._ROWS}
        d["element_count"] = self.element_count
        d["n_sections"] = self.scheme.n_sections
        d["section_len_mm"] = self.scheme.section_len
        d["height_disc"] = self.height_disc
        d["spacing_disc"] = self.spacing_disc
        if self.source_id:
            d["source"] = self.source_id
        if self.notes:
            d["notes"] = list(self.notes)
        return d

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def format_table(self) -> str:
        """Aligned text table, one parameter per row (all values in mm)."""
        lines = [f"{'Parameter':<10} {'Value (mm)':>14}"]
        lines.append("-" * 25)
        for k in self._ROWS:
            lines.append(f"{self._LABELS[k]:<10} {getattr(self, k):>14.6f}")
        lines.append("-" * 25)
        lines.append(f"{'elements':<10} {self.element_count:>14d}")
        return "\n".join(lines)


def _trapz_mean(x, z):
    return float(np.trapezoid(z, x) / (x[-1] - x[0]))


def amplitude_params(p):
    """(Pa, Pq, Pt): mean |z - zbar|, rms, and total height, trapezoid-weighted."""
    x, z = p.x, p.z
    if x.size < 2:
        raise TooFewPointsPerSection("amplitude parameters need >= 2 points")
    span = x[-1] - x[0]
    zbar = _trapz_mean(x, z)
    pa = float(np.trapezoid(np.abs(z - zbar), x) / span)
    pq = float(np.sqrt(np.trapezoid((z - zbar) ** 2, x) / span))
    pt = float(z.max() - z.min())
    return pa, pq, pt


def section_params(p, scheme=None, n_sections: int = DEFAULT_SECTIONS):
    """(Ppt, Pvt, Pz) over equal-width sections of the mean-line residual.

    The mean line is the global least-squares line (profiles arrive leveled,
    so it is numerically ~0); no per-section re-leveling is applied.
    """
    if scheme is not None:
        n_sections = scheme.n_sections
    x, z = p.x, p.z
    if n_sections < 1:
        raise ValueError("n_sections must be >= 1")
    if 10 * n_sections > x.size:
        raise TooFewPointsPerSection(
            f"{n_sections} sections need >= {10 * n_sections} points, "
            f"profile has {x.size}")
    slope, intercept = _lsq_line(x, z)
    r = z - (slope * x + intercept)
    edges = x[0] + (x[-1] - x[0]) * np.arange(n_sections + 1) / n_sections
    peaks = np.empty(n_sections)
    pits = np.empty(n_sections)
    for s in range(n_sections):
        if s < n_sections - 1:
            sel = (x >= edges[s]) & (x < edges[s + 1])
        else:
            sel = (x >= edges[s]) & (x <= edges[s + 1])
        if not np.any(sel):
            raise TooFewPointsPerSection(f"section {s} contains no points")
        peaks[s] = r[sel].max()
        pits[s] = -r[sel].min()
    return float(peaks.max()), float(pits.max()), float((peaks + pits).mean())


def _crossings(x, r):
    """Upward/downward mean-line crossings as (x_cross, direction) pairs."""
    out = []
    n = r.size
    i = 0
    while i < n - 1:
        a, b = r[i], r[i + 1]
        if a == 0.0:
            # exact touch: direction from the next nonzero sample
            j = i + 1
            while j < n and r[j] == 0.0:
                j += 1
            prev = r[i - 1] if i > 0 else 0.0
            if j < n and prev != 0.0 and np.sign(r[j]) != np.sign(prev):
                out.append((x[i], 1 if r[j] > 0 else -1))
            elif j < n and i == 0:
                out.append((x[i], 1 if r[j] > 0 else -1))
            i = j if j > i + 1 else i + 1
            continue
        if a * b < 0.0:
            xc = x[i] - a * (x[i + 1] - x[i]) / (b - a)
            out.append((xc, 1 if b > 0 else -1))
        i += 1
    return out


def element_params(p, height_disc: float = DEFAULT_HEIGHT_DISC,
                   spacing_disc: float = DEFAULT_SPACING_DISC):
    """(Psm, Psmx, Pc, Pcx, elements) from discriminated mean-line crossings.

    Candidate elements span consecutive upward crossings of the global
    least-squares mean line. Candidates whose height is below
    height_disc * Pt or whose spacing is below spacing_disc * evaluation
    length are merged into their neighbours until every element passes
    (or one element remains).
    """
    if not (0.0 < height_disc < 1.0) or not (0.0 < spacing_disc < 1.0):
        raise ValueError("discrimination fractions must lie in (0, 1)")
    x, z = p.x, p.z
    span = x[-1] - x[0]
    pt = float(z.max() - z.min())
    if pt <= _DEGENERATE_RATIO * span:
        raise NoElementsFound("profile is flat to numerical precision")
    slope, intercept = _lsq_line(x, z)
    r = z - (slope * x + intercept)
    ups = [xc for xc, d in _crossings(x, r) if d > 0]
    if len(ups) < 2:
        raise NoElementsFound("profile never crosses its mean line twice")

    def span_height(x0, x1):
        sel = (x >= x0) & (x <= x1)
        return float(r[sel].max() - r[sel].min()) if np.any(sel) else 0.0

    bounds = [(ups[k], ups[k + 1]) for k in range(len(ups) - 1)]
    heights = [span_height(a, b) for a, b in bounds]

    h_min = height_disc * pt
    s_min = spacing_disc * span
    while len(bounds) > 1:
        fail = next((k for k, (bb, hh) in enumerate(zip(bounds, heights))
                     if hh < h_min or (bb[1] - bb[0]) < s_min), None)
        if fail is None:
            break
        k = fail if fail < len(bounds) - 1 else fail - 1
        merged = (bounds[k][0], bounds[k + 1][1])
        bounds[k:k + 2] = [merged]
        heights[k:k + 2] = [span_height(*merged)]

    elements = [ProfileElement(a, b, h) for (a, b), h in zip(bounds, heights)]
    spacings = np.array([e.spacing for e in elements])
    hts = np.array([e.height for e in elements])
    return (float(spacings.mean()), float(spacings.max()),
            float(hts.mean()), float(hts.max()), elements)


def mpd(p) -> float:
    """Mean profile depth: average of the two half-length peaks minus the mean.

    Slope correction per half baseline is omitted (profiles arrive leveled);
    evaluation lengths under 100 mm trigger a logged warning.
    """
    x, z = p.x, p.z
    span = x[-1] - x[0]
    if span < 100.0:
        log.warning("MPD evaluation length %.3g mm < 100 mm recommended", span)
    mid = x[0] + span / 2.0
    first = z[x <= mid]
    second = z[x >= mid]
    return float((first.max() + second.max()) / 2.0 - _trapz_mean(x, z))


def roughness_report(p, n_sections: int = DEFAULT_SECTIONS,
                     height_disc: float = DEFAULT_HEIGHT_DISC,
                     spacing_disc: float = DEFAULT_SPACING_DISC) -> RoughnessReport:
    """All Table-style descriptors on one leveled primary profile."""
    pa, pq, pt = amplitude_params(p)
    ppt, pvt, pz = section_params(p, n_sections=n_sections)
    notes = []
    try:
        psm, psmx, pc, pcx, elements = element_params(
            p, height_disc=height_disc, spacing_disc=spacing_disc)
        count = len(elements)
    except NoElementsFound as exc:
        psm = psmx = pc = pcx = 0.0
        count = 0
        notes.append(f"element parameters: {exc}")
    span = p.x[-1] - p.x[0]
    scheme = SectionScheme(n_sections, span / n_sections)
    return RoughnessReport(
        mpd=mpd(p), pa=pa, pq=pq, pt=pt, ppt=ppt, pvt=pvt, pz=pz,
        psm=psm, psmx=psmx, pc=pc, pcx=pcx, element_count=count,
        scheme=scheme, height_disc=height_disc, spacing_disc=spacing_disc,
        source_id=getattr(p, "source_id", ""), notes=notes)
