"""Complex relative permittivities of the media used in the scattering models.

All permittivities follow the exp(-i*omega*t) time convention, so passive
media have a non-negative imaginary part. Photon energies are in eV.

Every material object exposes ``permittivity(E)`` which accepts a scalar or an
array of energies; plain numbers are accepted wherever a material is expected
and are treated as constant permittivities.
"""

import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, RangeError
from .units import ELEMENTARY_CHARGE, EPSILON_0

DATA_DIR_ENV = "NANOPOL_DATA_DIR"
SILVER_FILE = "silver_johnson_christy.txt"


@dataclass(frozen=True)
class LorentzParams:
    """Single-resonance medium ``eps_b + A / (E0**2 - E**2 - 2j*E*gamma0)``.

    ``strength_A`` is in eV**2, ``E0`` and ``gamma0`` in eV.
    """

    eps_b: float
    strength_A: float
    E0: float
    gamma0: float

    def __post_init__(self):
        if self.eps_b < 1:
            raise DomainError(f"eps_b must be >= 1, got {self.eps_b}")
        if self.strength_A < 0:
            raise DomainError(f"strength_A must be >= 0, got {self.strength_A}")
        if self.E0 <= 0 or self.gamma0 <= 0:
            raise DomainError("E0 and gamma0 must be positive")


@dataclass(frozen=True)
class QuantumDotSpec:
    """Spherical two-level quantum dot (lengths in nm, energies in eV)."""

    radius: float
    dipole_length_r0: float
    E0: float
    gamma0: float
    eps_b: float = 3.0

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError(f"quantum dot radius must be positive, got {self.radius}")
        if self.dipole_length_r0 < 0:
            raise DomainError("dipole_length_r0 must be >= 0")


@dataclass(frozen=True, eq=False)
class TabulatedOpticalData:
    """Optical constants ``(energy_eV, n, k)`` with strictly increasing energy."""

    energy: np.ndarray
    n: np.ndarray
    k: np.ndarray
    source: str = ""
    _n_interp: object = field(init=False, repr=False, compare=False)
    _k_interp: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        energy = np.asarray(self.energy, dtype=float)
        n = np.asarray(self.n, dtype=float)
        k = np.asarray(self.k, dtype=float)
        if not (energy.shape == n.shape == k.shape) or energy.ndim != 1:
            raise DomainError("energy, n and k must be 1-D arrays of equal length")
        if energy.size < 2:
            raise DomainError("at least two tabulated rows are required")
        if np.any(np.diff(energy) <= 0):
            raise DomainError("tabulated energies must be strictly increasing")
        if np.any(n <= 0) or np.any(k < 0):
            raise DomainError("tabulated data needs n > 0 and k >= 0")
        object.__setattr__(self, "energy", energy)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "_n_interp", PchipInterpolator(energy, n, extrapolate=False))
        object.__setattr__(self, "_k_interp", PchipInterpolator(energy, k, extrapolate=False))

    @property
    def energy_range(self):
        return float(self.energy[0]), float(self.energy[-1])


def _check_energy(E):
    E = np.asarray(E, dtype=float)
    if np.any(E <= 0):
        raise DomainError("photon energy must be positive")
    return E


def _scalar_or_array(z):
    return complex(z) if np.ndim(z) == 0 else z


def lorentz_permittivity(params, E):
    """Permittivity of a single-resonance (Lorentz) medium at energy ``E``."""
    E = _check_energy(E)
    denom = params.E0**2 - E**2 - 2j * E * params.gamma0
    return _scalar_or_array(params.eps_b + params.strength_A / denom)


def lorentz_strength_for_kappa(eps_b, kappa, E0, gamma0):
    """Oscillator strength A giving extinction coefficient ``kappa`` at E = E0.

    At resonance the permittivity is ``eps_b + 1j*A/(2*E0*gamma0)``; solving
    ``Im sqrt(eps) = kappa`` gives ``A = 4*E0*gamma0*kappa*sqrt(eps_b + kappa**2)``.
    """
    if kappa < 0:
        raise DomainError("kappa must be >= 0")
    return 4.0 * E0 * gamma0 * kappa * np.sqrt(eps_b + kappa**2)


def qd_oscillator_strength(spec):
    """Oscillator strength A (eV**2) of a two-level dot, ``2*E0*mu**2/(eps0*V)``."""
    if spec.radius <= 0:
        raise DomainError("quantum dot radius must be positive")
    mu = ELEMENTARY_CHARGE * spec.dipole_length_r0 * 1e-9
    volume = 4.0 / 3.0 * np.pi * (spec.radius * 1e-9) ** 3
    coupling_ev = mu**2 / (EPSILON_0 * volume) / ELEMENTARY_CHARGE
    return 2.0 * spec.E0 * coupling_ev


def qd_permittivity(spec, E):
    params = LorentzParams(spec.eps_b, qd_oscillator_strength(spec), spec.E0, spec.gamma0)
    return lorentz_permittivity(params, E)


def tabulated_permittivity(table, E):
    """``(n + ik)**2`` with n, k monotone-cubic interpolated in energy.

    Queries outside the tabulated range raise :class:`RangeError`.
    """
    E = np.asarray(E, dtype=float)
    lo, hi = table.energy_range
    if np.any(E < lo) or np.any(E > hi):
        raise RangeError(f"energy outside tabulated range [{lo}, {hi}] eV")
    n = table._n_interp(E)
    k = table._k_interp(E)
    # exact node values, free of interpolant rounding
    idx = np.searchsorted(table.energy, E)
    idx = np.clip(idx, 0, table.energy.size - 1)
    at_node = table.energy[idx] == E
    n = np.where(at_node, table.n[idx], n)
    k = np.where(at_node, table.k[idx], k)
    return _scalar_or_array((n + 1j * k) ** 2)


def refractive_index(eps):
    """Principal square root of ``eps`` as ``(n, kappa)`` with both >= 0."""
    eps = complex(eps)
    if eps.imag == 0.0:
        eps = complex(eps.real, 0.0)
    root = np.sqrt(eps)
    return float(root.real), float(root.imag)


# --- material objects -----------------------------------------------------


@dataclass(frozen=True)
class ConstantMaterial:
    eps: complex
    name: str = "constant"

    def permittivity(self, E):
        E = _check_energy(E)
        return _scalar_or_array(np.full(E.shape, complex(self.eps)))


@dataclass(frozen=True)
class LorentzMaterial:
    params: LorentzParams
    name: str = "lorentz"

    def permittivity(self, E):
        return lorentz_permittivity(self.params, E)


@dataclass(frozen=True)
class QuantumDotMaterial:
    spec: QuantumDotSpec
    name: str = "quantum-dot"

    @property
    def strength_A(self):
        return qd_oscillator_strength(self.spec)

    def permittivity(self, E):
        return qd_permittivity(self.spec, E)


@dataclass(frozen=True, eq=False)
class TabulatedMaterial:
    table: TabulatedOpticalData
    name: str = field(default="tabulated")

    def permittivity(self, E):
        return tabulated_permittivity(self.table, E)


def as_material(obj):
    """Wrap plain numbers as :class:`ConstantMaterial`; pass materials through."""
    if hasattr(obj, "permittivity"):
        return obj
    if isinstance(obj, (int, float, complex, np.number)):
        return ConstantMaterial(complex(obj))
    raise TypeError(f"not a material: {obj!r}")


# --- optical-constants files ------------------------------------------------


def parse_optical_constants(text, source=""):
    """Parse whitespace-separated ``energy_eV n k`` rows; ``#`` starts a comment."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DomainError(f"{source or 'optical constants'}:{lineno}: expected 3 columns")
        rows.append([float(p) for p in parts])
    if not rows:
        raise DomainError(f"{source or 'optical constants'}: no data rows")
    data = np.array(rows)
    return TabulatedOpticalData(data[:, 0], data[:, 1], data[:, 2], source=source)


def load_optical_constants(path):
    path = Path(path)
    return parse_optical_constants(path.read_text(), source=str(path))


def data_dir():
    """Directory holding bundled data; ``NANOPOL_DATA_DIR`` overrides it."""
    override = os.environ.get(DATA_DIR_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("nanopol") / "data"))


@lru_cache(maxsize=None)
def _silver_from(path):
    return TabulatedMaterial(load_optical_constants(path), name="Ag")


def silver():
    """Johnson & Christy silver as a :class:`TabulatedMaterial`."""
    return _silver_from(str(data_dir() / SILVER_FILE))
