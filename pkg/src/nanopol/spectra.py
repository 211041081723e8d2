"""Spectral sweeps and lineshape analysis.

A *scene* is either a :class:`~nanopol.mie.LayeredSphere` or a
:class:`~nanopol.cluster.SphereCluster`. Sweeps over wavelengths (and over a
tuning parameter) are embarrassingly parallel; work items run on a thread
pool and results are gathered in grid order so the output never depends on
scheduling.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
from scipy.signal import find_peaks as _scipy_find_peaks
from scipy.signal import peak_widths

from .cluster import (DEFAULT_NMAX_CAP, SphereCluster, cluster_cross_sections, solve_cluster,
                      solve_converged)
from .errors import DomainError, NanopolError
from .mie import LayeredSphere, choose_multipole_order, cross_sections, mie_stratified, size_parameter
from .units import HC_EV_NM

log = logging.getLogger(__name__)

DEFAULT_PROMINENCE = 0.02
DEFAULT_DIP_RATIO = 0.3
SINGLE, DOUBLET, DIP = "single", "doublet", "dip"


@dataclass(frozen=True, eq=False)
class SpectrumSeries:
    """Cross sections (nm**2) on an ascending wavelength grid (nm)."""

    wavelengths: np.ndarray
    sigma_ext: np.ndarray
    sigma_scat: np.ndarray
    sigma_abs: np.ndarray
    scene: object = None
    n_max: object = None

    def __post_init__(self):
        arrays = [np.asarray(a, dtype=float) for a in
                  (self.wavelengths, self.sigma_ext, self.sigma_scat, self.sigma_abs)]
        if len({a.shape for a in arrays}) != 1 or arrays[0].ndim != 1:
            raise DomainError("spectrum arrays must be 1-D and of equal length")
        if arrays[0].size and np.any(np.diff(arrays[0]) <= 0):
            raise DomainError("wavelengths must be strictly increasing")
        scale = max(1.0, float(np.max(np.abs(arrays[1]), initial=0.0)))
        if any(np.any(a < -1e-9 * scale) for a in arrays[1:]):
            raise DomainError("cross sections must be non-negative")
        for name, a in zip(("wavelengths", "sigma_ext", "sigma_scat", "sigma_abs"), arrays):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def __len__(self):
        return self.wavelengths.size


@dataclass(frozen=True)
class Peak:
    lambda_peak: float
    sigma_peak: float
    prominence: float
    fwhm: float = float("nan")


@dataclass(frozen=True)
class AnticrossingScan:
    parameter: str
    values: np.ndarray
    spectra: tuple
    peaks: tuple
    branch_wavelengths: np.ndarray  # shape (2, n_values); nan marks a gap
    branch_sigma: np.ndarray
    branch_fwhm: np.ndarray
    branch_prominence: np.ndarray
    min_separation: float
    min_separation_at: float
    discontinuous: bool = False
    gaps: tuple = field(default_factory=tuple)


# --- sweeps -----------------------------------------------------------------


def _annotate(exc, wavelength):
    msg = exc.args[0] if exc.args else str(exc)
    exc.args = (f"{msg} [wavelength {wavelength:g} nm]",) + tuple(exc.args[1:])
    exc.wavelength = wavelength
    return exc


def _evaluate(scene, wavelength, n_max, nmax_cap):
    """``(sigma_ext, sigma_scat, sigma_abs, order)`` at one wavelength."""
    E = HC_EV_NM / wavelength
    if isinstance(scene, SphereCluster):
        if n_max is None:
            sol = solve_converged(scene, E, cap=nmax_cap)
        else:
            sol = solve_cluster(scene, E, n_max)
        cs = cluster_cross_sections(sol)
        order = sol.n_max
    elif isinstance(scene, LayeredSphere):
        order = n_max or choose_multipole_order(
            size_parameter(scene, E), lambda n: cross_sections(mie_stratified(scene, E, n)).sigma_ext)
        cs = cross_sections(mie_stratified(scene, E, order))
    else:
        raise TypeError(f"unsupported scene {type(scene).__name__}")
    return cs.sigma_ext, cs.sigma_scat, cs.sigma_abs, order


def parallel_map(fn, items, threads=1):
    """``list(map(fn, items))`` on a thread pool, in input order."""
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _sweep(scene, wavelengths, n_max, nmax_cap, threads):
    def one(w):
        try:
            return _evaluate(scene, w, n_max, nmax_cap)
        except NanopolError as exc:
            raise _annotate(exc, w)

    return np.array(parallel_map(one, wavelengths, threads), dtype=float).reshape(-1, 4)


def _refinement_points(series, step, halfwidth, prominence_fraction):
    pts = []
    for pk in find_peaks(series, prominence_fraction):
        pts.append(np.arange(pk.lambda_peak - halfwidth, pk.lambda_peak + halfwidth + 1e-9, step))
    if not pts:
        return np.empty(0)
    extra = np.unique(np.round(np.concatenate(pts), 9))
    lo, hi = series.wavelengths[0], series.wavelengths[-1]
    extra = extra[(extra > lo) & (extra < hi)]
    keep = np.min(np.abs(extra[:, None] - series.wavelengths[None, :]), axis=1) > 1e-6
    return extra[keep]


def compute_spectrum(scene, grid, threads=1, n_max=None, nmax_cap=DEFAULT_NMAX_CAP,
                     refine_step=None, refine_halfwidth=4.0,
                     prominence_fraction=DEFAULT_PROMINENCE):
    """Cross-section spectrum of ``scene`` on the wavelength ``grid`` (nm).

    Unless ``n_max`` is given, every wavelength uses its own converged
    multipole order (capped at ``nmax_cap`` for clusters); the orders used
    are kept in ``series.n_max``. With
    ``refine_step`` the grid is densified within ``refine_halfwidth`` nm of
    every detected peak.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("wavelength grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("wavelength grid must be strictly increasing")
    if np.any(grid <= 0):
        raise DomainError("wavelengths must be positive")
    rows = _sweep(scene, grid, n_max, nmax_cap, threads)
    series = SpectrumSeries(grid, rows[:, 0], rows[:, 1], rows[:, 2], scene, rows[:, 3].astype(int))
    if refine_step:
        extra = _refinement_points(series, refine_step, refine_halfwidth, prominence_fraction)
        if extra.size:
            more = _sweep(scene, extra, n_max, nmax_cap, threads)
            wl = np.concatenate([grid, extra])
            order = np.argsort(wl, kind="stable")
            allrows = np.concatenate([rows, more])[order]
            series = SpectrumSeries(wl[order], allrows[:, 0], allrows[:, 1], allrows[:, 2], scene,
                                    allrows[:, 3].astype(int))
    return series


# --- peak analysis ----------------------------------------------------------


def _index_to_wavelength(wl, pos):
    return np.interp(pos, np.arange(wl.size), wl)


def _vertex(wl, y, i):
    """Parabola vertex through samples ``i-1, i, i+1`` (non-uniform spacing allowed)."""
    if i <= 0 or i >= wl.size - 1:
        return wl[i], y[i]
    x = wl[i - 1:i + 2] - wl[i]
    c = np.polyfit(x, y[i - 1:i + 2], 2)
    if c[0] >= 0:
        return wl[i], y[i]
    xv = -c[1] / (2 * c[0])
    xv = float(np.clip(xv, x[0], x[2]))
    return wl[i] + xv, float(np.polyval(c, xv))


def find_peaks(series, prominence_fraction=DEFAULT_PROMINENCE):
    """Prominent maxima of ``sigma_ext``, sorted by wavelength.

    A maximum qualifies when its prominence is at least
    ``prominence_fraction * max(sigma_ext)``. Positions and heights are
    refined to the vertex of the local parabola; ``fwhm`` is the width (nm)
    at half prominence.
    """
    if not 0 < prominence_fraction < 1:
        raise DomainError("prominence_fraction must lie in (0, 1)")
    wl, y = series.wavelengths, series.sigma_ext
    if y.size < 3 or not np.any(y > 0):
        return ()
    threshold = prominence_fraction * float(y.max())
    idx, props = _scipy_find_peaks(y, prominence=threshold)
    if idx.size == 0:
        return ()
    # equal maxima each get the full prominence; merge those split by a shallow saddle
    keep = [0]
    for k in range(1, idx.size):
        a, b = idx[keep[-1]], idx[k]
        if min(y[a], y[b]) - y[a:b + 1].min() < threshold:
            if y[b] > y[a]:
                keep[-1] = k
        else:
            keep.append(k)
    if len(keep) < idx.size:
        idx = idx[keep]
        props = {key: v[keep] for key, v in props.items()}
    widths = peak_widths(y, idx, rel_height=0.5, prominence_data=(
        props["prominences"], props["left_bases"], props["right_bases"]))
    left = _index_to_wavelength(wl, widths[2])
    right = _index_to_wavelength(wl, widths[3])
    out = []
    for k, i in enumerate(idx):
        lam, sig = _vertex(wl, y, i)
        out.append(Peak(float(lam), float(sig), float(props["prominences"][k]), float(right[k] - left[k])))
    return tuple(out)


def envelope_fwhm(series):
    """Full width (nm) of the region around the global maximum where sigma_ext >= max/2."""
    wl, y = series.wavelengths, series.sigma_ext
    i = int(np.argmax(y))
    half = y[i] / 2.0
    lo = i
    while lo > 0 and y[lo - 1] >= half:
        lo -= 1
    hi = i
    while hi < y.size - 1 and y[hi + 1] >= half:
        hi += 1
    left = wl[lo] if lo == 0 else np.interp(half, [y[lo - 1], y[lo]], [wl[lo - 1], wl[lo]])
    right = wl[hi] if hi == y.size - 1 else np.interp(half, [y[hi + 1], y[hi]], [wl[hi + 1], wl[hi]])
    return float(right - left)


def classify_lineshape(series, prominence_fraction=DEFAULT_PROMINENCE, dip_ratio=DEFAULT_DIP_RATIO):
    """``'single'``, ``'doublet'`` or ``'dip'``.

    With fewer than two prominent peaks the line is single. Otherwise the hole
    between the two most prominent peaks is measured by the separation of the
    maxima that bound it; when that width is below ``dip_ratio`` times the
    envelope FWHM the structure is a narrow dip in one broad line, else a
    doublet. A hole reaching below half the maximum ends the envelope, so
    such peaks count as resolved.
    """
    peaks = find_peaks(series, prominence_fraction)
    if len(peaks) < 2:
        return SINGLE
    top = sorted(peaks, key=lambda p: p.prominence, reverse=True)[:2]
    hole = abs(top[1].lambda_peak - top[0].lambda_peak)
    env = envelope_fwhm(series)
    if env > 0 and hole / env < dip_ratio:
        return DIP
    return DOUBLET


def count_stationary_points(series, window=None):
    """Sign changes of the finite-difference slope of sigma_ext (inside ``window`` nm)."""
    wl, y = series.wavelengths, series.sigma_ext
    if window is not None:
        sel = (wl >= window[0]) & (wl <= window[1])
        wl, y = wl[sel], y[sel]
    dy = np.diff(y)
    dy = dy[dy != 0]
    return int(np.sum(np.sign(dy[1:]) != np.sign(dy[:-1])))


# --- anticrossing scans -------------------------------------------------------


def _assign(prev, peaks):
    """Map up to two peaks onto branches 0/1 by minimal total jump from ``prev``."""
    best, best_cost = None, np.inf
    for slots in permutations(range(2), len(peaks)):
        cost = 0.0
        for pk, s in zip(peaks, slots):
            ref = prev[s]
            cost += 0.0 if np.isnan(ref) else abs(pk.lambda_peak - ref)
        # ties keep wavelength order
        if cost < best_cost - 1e-12:
            best, best_cost = slots, cost
    return best


def track_branches(peaksets):
    """Branch wavelengths, heights, widths and prominences for a sequence of peak sets.

    The two most prominent peaks of every set are kept; branches are seeded at
    the first set with two peaks (shorter wavelength is branch 0) and extended
    both ways by minimal-jump assignment.
    """
    T = len(peaksets)
    lam = np.full((2, T), np.nan)
    sig = np.full((2, T), np.nan)
    fwhm = np.full((2, T), np.nan)
    prom = np.full((2, T), np.nan)

    def put(s, t, pk):
        lam[s, t], sig[s, t], fwhm[s, t], prom[s, t] = pk.lambda_peak, pk.sigma_peak, pk.fwhm, pk.prominence

    chosen = [tuple(sorted(sorted(ps, key=lambda p: p.prominence, reverse=True)[:2],
                           key=lambda p: p.lambda_peak)) for ps in peaksets]
    anchors = [t for t, ps in enumerate(chosen) if len(ps) == 2]
    if not anchors:
        for t, ps in enumerate(chosen):
            if ps:
                put(0, t, ps[0])
        return lam, sig, fwhm, prom
    a = anchors[0]
    for s, pk in enumerate(chosen[a]):
        put(s, a, pk)

    def fill(order):
        last = lam[:, a].copy()
        for t in order:
            ps = chosen[t]
            if not ps:
                continue
            slots = _assign(last, ps)
            for pk, s in zip(ps, slots):
                put(s, t, pk)
                last[s] = pk.lambda_peak

    fill(range(a + 1, T))
    fill(range(a - 1, -1, -1))
    return lam, sig, fwhm, prom


def branch_discontinuity(lam):
    """True when a per-step branch jump exceeds three times the median jump."""
    jumps = []
    for row in lam:
        t = np.flatnonzero(~np.isnan(row))
        if t.size > 1:
            jumps.extend(np.abs(np.diff(row[t])) / np.diff(t))
    if len(jumps) < 2:
        return False
    jumps = np.asarray(jumps)
    med = float(np.median(jumps))
    return bool(jumps.max() > 3.0 * med) if med > 0 else bool(jumps.max() > 0)


def anticrossing_scan(scene_template, parameter, values, grid, threads=1, n_max=None,
                      nmax_cap=DEFAULT_NMAX_CAP, prominence_fraction=DEFAULT_PROMINENCE,
                      refine_step=None, refine_halfwidth=4.0):
    """Spectra and branch tracking over a tuning parameter.

    ``scene_template(value)`` returns the scene for one tuning value. A value
    without any prominent peak is recorded as a gap.
    """
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        raise DomainError("an anticrossing scan needs at least three tuning values")
    scenes = [scene_template(v) for v in values]

    def one(scene):
        return compute_spectrum(scene, grid, threads=1, n_max=n_max, nmax_cap=nmax_cap,
                                refine_step=refine_step, refine_halfwidth=refine_halfwidth,
                                prominence_fraction=prominence_fraction)

    spectra = tuple(parallel_map(one, scenes, threads))
    peaks = tuple(find_peaks(s, prominence_fraction) for s in spectra)
    gaps = tuple(float(v) for v, p in zip(values, peaks) if not p)
    lam, sig, fwhm, prom = track_branches(peaks)
    sep = lam[1] - lam[0]
    if np.all(np.isnan(sep)):
        min_sep, at = float("nan"), float("nan")
    else:
        i = int(np.nanargmin(np.abs(sep)))
        min_sep, at = float(abs(sep[i])), float(values[i])
    return AnticrossingScan(parameter, values, spectra, peaks, lam, sig, fwhm, prom, min_sep, at,
                            branch_discontinuity(lam), gaps)


def peak_height_balance(scan):
    """Ratio sigma(long-wavelength branch) / sigma(short-wavelength branch) per tuning value."""
    lam, sig = scan.branch_wavelengths, scan.branch_sigma
    long_first = lam[1] >= lam[0]
    hi = np.where(long_first, sig[1], sig[0])
    lo = np.where(long_first, sig[0], sig[1])
    with np.errstate(invalid="ignore", divide="ignore"):
        return hi / lo


def most_balanced_index(ratios):
    """Index of the ratio closest to one on a logarithmic scale."""
    r = np.asarray(ratios, dtype=float)
    score = np.where(np.isfinite(r) & (r > 0), np.abs(np.log(np.where(r > 0, r, 1.0))), np.inf)
    return int(np.argmin(score))
