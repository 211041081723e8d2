"""Scene definition files.

A scene file is TOML with the sections ``[materials]``, ``[geometry]``,
``[incidence]``, ``[sweep]`` (with optional ``[sweep.tuning]``) and
``[analysis]``. Every dimensional key carries its unit in the name
(``radius_nm``, ``E0_eV``, ``strength_A_eV2``). Errors name the offending
section and field.

Linewidths may be given as ``fwhm_eV`` (full width) or ``gamma0_eV`` (the
parameter in the Lorentz denominator, half the full width).
"""

import copy
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .cluster import DEFAULT_NMAX_CAP, ClusterMember, Incidence, SphereCluster, validate_geometry
from .errors import GeometryError, InputError, NanopolError, NumericalError
from .materials import (
    ConstantMaterial,
    LorentzMaterial,
    LorentzParams,
    QuantumDotMaterial,
    QuantumDotSpec,
    TabulatedMaterial,
    data_dir,
    load_optical_constants,
    lorentz_strength_for_kappa,
    silver,
)
from .mie import LayeredSphere
from .spectra import (DEFAULT_DIP_RATIO, DEFAULT_PROMINENCE, anticrossing_scan, compute_spectrum,
                      find_peaks)
from .units import HC_EV_NM

RECIPE_NAMES = ("fig1b", "fig1c", "fig1d", "fig1e", "fig2b", "fig2c", "fig2d")
BARE_PEAK = "bare-peak"

# keys that describe the same quantity; setting one removes the others
_ALTERNATES = (
    {"eps_b", "n_b"},
    {"eps", "n"},
    {"kappa", "strength_A_eV2"},
    {"E0_eV", "lambda0_nm", "E0_from"},
    {"gamma0_eV", "fwhm_eV"},
)


@dataclass(frozen=True)
class SweepSettings:
    wavelengths: np.ndarray
    refine_step: object
    refine_halfwidth: float
    n_max: object
    nmax_cap: int
    threads: int


@dataclass(frozen=True)
class Tuning:
    parameter: str
    values: np.ndarray


@dataclass
class SceneConfig:
    """Parsed scene file; ``data`` is the raw TOML tree."""

    data: dict
    base_dir: Path = Path(".")
    source: str = "<config>"

    # --- access helpers -------------------------------------------------

    def section(self, name, required=True):
        node = self.data
        for part in name.split("."):
            if not isinstance(node, dict) or part not in node:
                if required:
                    raise InputError(f"[{name}] section is missing")
                return {}
            node = node[part]
        if not isinstance(node, dict):
            raise InputError(f"[{name}] must be a table")
        return node

    # --- derived objects ------------------------------------------------

    def materials(self):
        mats = self.section("materials")
        return {name: build_material(name, spec, self) for name, spec in mats.items()}

    def scene(self):
        return build_scene(self)

    def sweep(self):
        return sweep_settings(self)

    def tuning(self):
        sec = self.section("sweep.tuning", required=False)
        if not sec:
            return None
        where = "sweep.tuning"
        param = _get(sec, where, "parameter", str)
        if "values" in sec:
            values = np.asarray(_get(sec, where, "values", list), dtype=float)
        elif {"start", "stop", "num"} <= sec.keys():
            values = np.linspace(_num(sec, where, "start"), _num(sec, where, "stop"),
                                 int(_num(sec, where, "num"))).round(12)
        else:
            raise InputError(f"[{where}] field 'values': give a list or start/stop/num")
        if values.size < 3:
            raise InputError(f"[{where}] field 'values': at least three tuning values are required")
        _resolve_path(self.data, param, where)
        return Tuning(param, values)

    def analysis(self):
        sec = self.section("analysis", required=False)
        prom = _num(sec, "analysis", "prominence_fraction", DEFAULT_PROMINENCE)
        dip = _num(sec, "analysis", "dip_ratio", DEFAULT_DIP_RATIO)
        if not 0 < prom < 1:
            raise InputError("[analysis] field 'prominence_fraction': must lie in (0, 1)")
        if not 0 < dip < 1:
            raise InputError("[analysis] field 'dip_ratio': must lie in (0, 1)")
        return prom, dip

    def with_value(self, dotted, value):
        """Copy with the field at ``dotted`` set to ``value``."""
        data = copy.deepcopy(self.data)
        parent, key = _resolve_path(data, dotted, "set", create=True)
        for group in _ALTERNATES:
            if key in group:
                for other in group - {key}:
                    parent.pop(other, None)
        parent[key] = value
        return SceneConfig(data, self.base_dir, self.source)

    def key(self):
        return json.dumps(self.data, sort_keys=True, default=str) + str(self.base_dir)


# --- loading -----------------------------------------------------------------


def recipe_path(name):
    """Path of a bundled recipe, honouring ``NANOPOL_DATA_DIR``."""
    override = data_dir() / "recipes" / f"{name}.toml"
    if override.is_file():
        return override
    return Path(str(resources.files("nanopol") / "data" / "recipes" / f"{name}.toml"))


def load_config(path_or_name, overrides=()):
    """Read a scene file (or a bundled recipe name) and apply ``key=value`` overrides."""
    path = Path(path_or_name)
    if not path.is_file() and str(path_or_name) in RECIPE_NAMES:
        path = recipe_path(str(path_or_name))
    if not path.is_file():
        raise InputError(f"config file not found: {path_or_name}")
    try:
        data = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"{path}: cannot parse: {exc}") from None
    cfg = SceneConfig(data, path.parent, str(path))
    for item in overrides:
        dotted, value = parse_override(item)
        cfg = cfg.with_value(dotted, value)
    return cfg


def parse_override(item):
    if "=" not in item:
        raise InputError(f"override '{item}' must look like section.field=value")
    dotted, raw = item.split("=", 1)
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return dotted.strip(), value


def _resolve_path(data, dotted, where, create=False):
    parts = dotted.split(".")
    if len(parts) < 2:
        raise InputError(f"[{where}] field 'parameter': '{dotted}' is not a section.field path")
    node = data
    for part in parts[:-1]:
        if isinstance(node, list):
            node = _list_item(node, part, where, dotted)
            continue
        if part not in node:
            if not create:
                raise InputError(f"[{where}] field 'parameter': no section '{part}' in '{dotted}'")
            node[part] = {}
        node = node[part]
    if not isinstance(node, dict):
        raise InputError(f"[{where}] '{dotted}' does not address a table field")
    return node, parts[-1]


def _list_item(items, part, where, dotted):
    for item in items:
        if isinstance(item, dict) and item.get("name") == part:
            return item
    if part.isdigit() and int(part) < len(items):
        return items[int(part)]
    raise InputError(f"[{where}] no entry '{part}' in '{dotted}'")


# --- field readers -----------------------------------------------------------


def _get(sec, where, key, kind, default=...):
    if key not in sec:
        if default is ...:
            raise InputError(f"[{where}] field '{key}' is required")
        return default
    value = sec[key]
    if kind is list and not isinstance(value, list):
        raise InputError(f"[{where}] field '{key}': expected a list")
    if kind is str and not isinstance(value, str):
        raise InputError(f"[{where}] field '{key}': expected a string")
    return value


def _num(sec, where, key, default=...):
    value = _get(sec, where, key, float, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise InputError(f"[{where}] field '{key}': expected a finite number, got {value!r}")
    return float(value)


def _positive(sec, where, key, default=...):
    value = _num(sec, where, key, default)
    if value is not None and value <= 0:
        raise InputError(f"[{where}] field '{key}': must be positive, got {value}")
    return value


def _vector(sec, where, key, default):
    value = _get(sec, where, key, list, ... if default is None else list(default))
    if len(value) != 3:
        raise InputError(f"[{where}] field '{key}': expected three components")
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise InputError(f"[{where}] field '{key}': components must be numbers") from None


def _one_of(sec, where, keys):
    present = [k for k in keys if k in sec]
    if len(present) > 1:
        raise InputError(f"[{where}] fields {present} are alternatives; give only one")
    if not present:
        raise InputError(f"[{where}] one of the fields {list(keys)} is required")
    return present[0]


def _background(sec, where):
    key = _one_of(sec, where, ("eps_b", "n_b"))
    value = _positive(sec, where, key)
    return value**2 if key == "n_b" else value


def _linewidth(sec, where):
    key = _one_of(sec, where, ("gamma0_eV", "fwhm_eV"))
    value = _positive(sec, where, key)
    return value / 2.0 if key == "fwhm_eV" else value


def _resonance(sec, where, name, cfg):
    key = _one_of(sec, where, ("E0_eV", "lambda0_nm", "E0_from"))
    if key == "E0_from":
        if sec[key] != BARE_PEAK:
            raise InputError(f"[{where}] field 'E0_from': only '{BARE_PEAK}' is supported")
        return bare_peak_energy(cfg, name)
    value = _positive(sec, where, key)
    return HC_EV_NM / value if key == "lambda0_nm" else value


# --- builders ----------------------------------------------------------------


def build_material(name, spec, cfg):
    where = f"materials.{name}"
    if not isinstance(spec, dict):
        raise InputError(f"[{where}] must be a table")
    kind = _get(spec, where, "type", str)
    try:
        if kind == "constant":
            key = _one_of(spec, where, ("eps", "n"))
            if key == "n":
                eps = _positive(spec, where, "n") ** 2
            else:
                eps = _num(spec, where, "eps")
            eps = complex(eps, _num(spec, where, "eps_imag", 0.0))
            return ConstantMaterial(eps, name=name)
        if kind == "lorentz":
            eps_b = _background(spec, where)
            E0 = _resonance(spec, where, name, cfg)
            gamma = _linewidth(spec, where)
            key = _one_of(spec, where, ("kappa", "strength_A_eV2"))
            if key == "kappa":
                A = lorentz_strength_for_kappa(eps_b, _num(spec, where, "kappa"), E0, gamma)
            else:
                A = _num(spec, where, "strength_A_eV2")
            return LorentzMaterial(LorentzParams(eps_b, A, E0, gamma), name=name)
        if kind == "tabulated":
            builtin = spec.get("builtin")
            if builtin is not None:
                if builtin != "silver":
                    raise InputError(f"[{where}] field 'builtin': unknown table '{builtin}'")
                return silver()
            fname = _get(spec, where, "file", str)
            path = cfg.base_dir / fname
            if not path.is_file():
                path = data_dir() / fname
            if not path.is_file():
                raise InputError(f"[{where}] field 'file': cannot find '{fname}'")
            return TabulatedMaterial(load_optical_constants(path), name=name)
        if kind == "quantum-dot":
            qd = QuantumDotSpec(
                radius=_positive(spec, where, "radius_nm"),
                dipole_length_r0=_num(spec, where, "dipole_length_nm"),
                E0=_resonance(spec, where, name, cfg),
                gamma0=_linewidth(spec, where),
                eps_b=_background(spec, where) if ({"eps_b", "n_b"} & spec.keys()) else 3.0,
            )
            return QuantumDotMaterial(qd, name=name)
    except (InputError, GeometryError):
        raise
    except NumericalError as exc:
        exc.args = (f"[{where}] {exc}",)
        raise
    except NanopolError as exc:
        raise InputError(f"[{where}] {exc}") from None
    raise InputError(f"[{where}] field 'type': unknown material type '{kind}'")


def _layers(entries, where, materials):
    if not isinstance(entries, list) or not entries:
        raise InputError(f"[{where}] field 'layers': expected a non-empty list of tables")
    radii, mats = [], []
    for i, layer in enumerate(entries):
        lw = f"{where}.layers[{i}]"
        if not isinstance(layer, dict):
            raise InputError(f"[{lw}] must be a table")
        radii.append(_positive(layer, lw, "radius_nm"))
        ref = _get(layer, lw, "material", str)
        if ref not in materials:
            raise InputError(f"[{lw}] field 'material': '{ref}' is not defined in [materials]")
        mats.append(materials[ref])
    return radii, mats


def build_scene(cfg):
    """Layered sphere or sphere cluster described by ``cfg``."""
    materials = cfg.materials()
    geo = cfg.section("geometry")
    kind = _get(geo, "geometry", "type", str)
    host = _num(geo, "geometry", "host_eps", 1.0)
    if host < 1:
        raise InputError(f"[geometry] field 'host_eps': must be >= 1, got {host}")
    if kind == "layered-sphere":
        radii, mats = _layers(geo.get("layers"), "geometry", materials)
        try:
            return LayeredSphere(tuple(radii), tuple(mats), host)
        except NanopolError as exc:
            raise InputError(f"[geometry] field 'layers': {exc}") from None
    if kind == "cluster":
        entries = _get(geo, "geometry", "members", list)
        if not entries:
            raise InputError("[geometry] field 'members': at least one member is required")
        members = []
        for i, m in enumerate(entries):
            name = m.get("name", f"member{i}") if isinstance(m, dict) else f"member{i}"
            mw = f"geometry.members.{name}"
            if not isinstance(m, dict):
                raise InputError(f"[{mw}] must be a table")
            center = _vector(m, mw, "center_nm", None)
            radii, mats = _layers(m.get("layers"), mw, materials)
            try:
                sphere = LayeredSphere(tuple(radii), tuple(mats), host)
            except NanopolError as exc:
                raise InputError(f"[{mw}] field 'layers': {exc}") from None
            members.append(ClusterMember(center, sphere, name))
        inc = cfg.section("incidence", required=False)
        incidence = Incidence(_vector(inc, "incidence", "direction", (1.0, 0.0, 0.0)),
                              _vector(inc, "incidence", "polarization", (0.0, 0.0, 1.0)))
        cluster = SphereCluster(tuple(members), host, incidence)
        try:
            validate_geometry(cluster)
        except GeometryError as exc:
            raise GeometryError(f"[geometry] field 'members': {exc}", pair=exc.pair) from None
        except InputError as exc:
            raise InputError(f"[incidence] {exc}") from None
        return cluster
    raise InputError(f"[geometry] field 'type': unknown geometry '{kind}'")


def sweep_settings(cfg):
    sec = cfg.section("sweep")
    lo = _positive(sec, "sweep", "wavelength_min_nm")
    hi = _positive(sec, "sweep", "wavelength_max_nm")
    step = _positive(sec, "sweep", "wavelength_step_nm", 1.0)
    if hi <= lo:
        raise InputError("[sweep] field 'wavelength_max_nm': must exceed wavelength_min_nm")
    count = int(round((hi - lo) / step)) + 1
    wavelengths = np.round(lo + step * np.arange(count), 9)
    wavelengths = wavelengths[wavelengths <= hi + 1e-9]
    n_max = sec.get("n_max")
    if n_max is not None and (not isinstance(n_max, int) or n_max < 1):
        raise InputError("[sweep] field 'n_max': must be a positive integer")
    cap = sec.get("nmax_cap", DEFAULT_NMAX_CAP)
    if not isinstance(cap, int) or cap < 1:
        raise InputError("[sweep] field 'nmax_cap': must be a positive integer")
    threads = sec.get("threads", 1)
    if not isinstance(threads, int) or threads < 1:
        raise InputError("[sweep] field 'threads': must be a positive integer")
    return SweepSettings(
        wavelengths=wavelengths,
        refine_step=_positive(sec, "sweep", "refine_step_nm", None),
        refine_halfwidth=_positive(sec, "sweep", "refine_halfwidth_nm", 4.0),
        n_max=n_max,
        nmax_cap=cap,
        threads=threads,
    )


# --- bare-peak resonance -----------------------------------------------------


def bare_config(cfg, name):
    """Copy of ``cfg`` with the oscillator strength of material ``name`` switched off."""
    spec = cfg.section(f"materials.{name}")
    if spec.get("type") == "quantum-dot":
        out = cfg.with_value(f"materials.{name}.dipole_length_nm", 0.0)
    elif spec.get("type") == "lorentz":
        out = cfg.with_value(f"materials.{name}.strength_A_eV2", 0.0)
    else:
        raise InputError(f"[materials.{name}] field 'E0_from': needs a lorentz or quantum-dot material")
    # any placeholder resonance is irrelevant once the strength is zero
    return out.with_value(f"materials.{name}.E0_eV", 1.0)


@lru_cache(maxsize=32)
def _bare_peak_cached(key, cfg_json, base_dir, name, source):
    cfg = SceneConfig(json.loads(cfg_json), Path(base_dir), source)
    bare = bare_config(cfg, name)
    sweep = bare.sweep()
    prom, _ = bare.analysis()
    series = compute_spectrum(bare.scene(), sweep.wavelengths, threads=sweep.threads,
                              n_max=sweep.n_max, nmax_cap=sweep.nmax_cap,
                              refine_step=sweep.refine_step or 0.25,
                              refine_halfwidth=sweep.refine_halfwidth,
                              prominence_fraction=prom)
    peaks = find_peaks(series, prom)
    if not peaks:
        raise InputError(f"[materials.{name}] field 'E0_from': the bare spectrum has no peak in the sweep window")
    top = max(peaks, key=lambda p: p.sigma_peak)
    return HC_EV_NM / top.lambda_peak


def bare_peak_energy(cfg, name):
    """Photon energy (eV) of the strongest extinction peak with material ``name`` inert."""
    cfg_json = json.dumps(cfg.data, sort_keys=True)
    return _bare_peak_cached(cfg.key(), cfg_json, str(cfg.base_dir), name, cfg.source)


def scene_for(cfg, parameter, value):
    """Scene with the tuning ``parameter`` set to ``value``."""
    return cfg.with_value(parameter, float(value)).scene()


# --- config-driven sweeps ----------------------------------------------------


def _run_settings(cfg, grid, threads, nmax_cap):
    sweep = cfg.sweep()
    refine = sweep.refine_step
    if grid is None:
        grid = sweep.wavelengths
    else:
        # an explicit grid is honoured point for point
        refine = None
    return (np.asarray(grid, dtype=float), refine, sweep.refine_halfwidth, sweep.n_max,
            nmax_cap or sweep.nmax_cap, threads or sweep.threads)


def config_spectrum(cfg, grid=None, threads=None, nmax_cap=None):
    """Spectrum of the scene in ``cfg``; an explicit ``grid`` disables refinement."""
    grid, refine, halfwidth, n_max, cap, threads = _run_settings(cfg, grid, threads, nmax_cap)
    prom, _ = cfg.analysis()
    return compute_spectrum(cfg.scene(), grid, threads=threads, n_max=n_max, nmax_cap=cap,
                            refine_step=refine, refine_halfwidth=halfwidth,
                            prominence_fraction=prom)


def config_scan(cfg, grid=None, threads=None, nmax_cap=None):
    """Anticrossing scan over the ``[sweep.tuning]`` parameter of ``cfg``."""
    tuning = cfg.tuning()
    if tuning is None:
        raise InputError("[sweep.tuning] section is missing")
    grid, refine, halfwidth, n_max, cap, threads = _run_settings(cfg, grid, threads, nmax_cap)
    prom, _ = cfg.analysis()
    # build every scene up front so validation errors surface before any solve
    scenes = {float(v): scene_for(cfg, tuning.parameter, v) for v in tuning.values}
    return anticrossing_scan(lambda v: scenes[float(v)], tuning.parameter, tuning.values, grid,
                             threads=threads, n_max=n_max, nmax_cap=cap,
                             prominence_fraction=prom, refine_step=refine,
                             refine_halfwidth=halfwidth)
