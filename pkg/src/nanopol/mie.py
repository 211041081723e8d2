"""Mie scattering by homogeneous and radially stratified spheres.

The host is a real dielectric; cross sections are normalised to the incident
irradiance in the host. Coefficients follow the Bohren-Huffman sign
convention, so the scattered field of the sphere has multipole coefficients
``-a_n`` (electric, N-type) and ``-b_n`` (magnetic, M-type) times those of the
incident wave.
"""

from dataclasses import dataclass
from math import ceil

import numpy as np

from .errors import DomainError
from .materials import as_material
from .swf import log_derivative_psi, riccati_bessel
from .units import HC_EV_NM, host_wavenumber


@dataclass(frozen=True)
class LayeredSphere:
    """Concentric sphere; ``layer_radii`` and ``layer_materials`` run from the core out."""

    layer_radii: tuple
    layer_materials: tuple
    host_eps: float = 1.0

    def __post_init__(self):
        radii = tuple(float(r) for r in np.atleast_1d(self.layer_radii))
        mats = tuple(as_material(m) for m in (self.layer_materials
                                               if isinstance(self.layer_materials, (list, tuple))
                                               else (self.layer_materials,)))
        if len(radii) == 0 or len(radii) != len(mats):
            raise DomainError("need one material per layer radius")
        if radii[0] <= 0 or any(b <= a for a, b in zip(radii, radii[1:])):
            raise DomainError("layer radii must be positive and strictly increasing")
        if isinstance(self.host_eps, complex) or np.iscomplexobj(self.host_eps):
            raise DomainError("host permittivity must be real")
        if float(self.host_eps) < 1:
            raise DomainError("host permittivity must be >= 1")
        object.__setattr__(self, "layer_radii", radii)
        object.__setattr__(self, "layer_materials", mats)
        object.__setattr__(self, "host_eps", float(self.host_eps))

    @property
    def radius(self):
        return self.layer_radii[-1]

    def permittivities(self, E):
        return np.array([complex(m.permittivity(E)) for m in self.layer_materials])

    def with_host(self, host_eps):
        return LayeredSphere(self.layer_radii, self.layer_materials, host_eps)


def homogeneous_sphere(radius, material, host_eps=1.0):
    return LayeredSphere((radius,), (material,), host_eps)


@dataclass(frozen=True)
class MieCoefficients:
    """``a[n-1]``, ``b[n-1]`` for n = 1..n_max and the host wavenumber (1/nm).

    ``absorption`` optionally holds ``Re(a) - |a|**2 + Re(b) - |b|**2`` per
    order, evaluated without the cancellation of the difference.
    """

    a: np.ndarray
    b: np.ndarray
    k_host: float
    absorption: np.ndarray = None

    @property
    def n_max(self):
        return self.a.size


@dataclass(frozen=True)
class CrossSections:
    sigma_ext: float
    sigma_scat: float
    sigma_abs: float


def _check(E, radius):
    if E <= 0:
        raise DomainError("photon energy must be positive")
    if radius <= 0:
        raise DomainError("radius must be positive")


def _coefficients_from_log_derivatives(ha, hb, m_out, x, n_max):
    """External coefficients from the interior log-derivatives at the surface."""
    rb = riccati_bessel(n_max, x)
    n = np.arange(1, n_max + 1)
    psi, chi = rb.psi[1:].real, rb.chi[1:].real
    psi_prev, chi_prev = rb.psi[:-1].real, rb.chi[:-1].real
    out, absorption = [], 0.0
    for t in (ha / m_out + n / x, hb * m_out + n / x):
        # c = num / (num - i den); Re(c) - |c|^2 = -Im(num conj(den)) / |num - i den|^2
        num = t * psi - psi_prev
        den = t * chi - chi_prev
        full = num - 1j * den
        out.append(num / full)
        absorption = absorption - (num * np.conj(den)).imag / np.abs(full) ** 2
    return out[0], out[1], absorption


def mie_homogeneous(radius, eps, host_eps, E, n_max):
    """Mie coefficients of a homogeneous sphere at photon energy ``E`` (eV).

    ``eps`` is a permittivity value or a material object.
    """
    _check(E, radius)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    eps = complex(as_material(eps).permittivity(E))
    k = host_wavenumber(E, host_eps)
    x = k * radius
    m = np.sqrt(eps / host_eps)
    if eps == host_eps:
        zeros = np.zeros(n_max, dtype=complex)
        return MieCoefficients(zeros, zeros.copy(), k)
    d = log_derivative_psi(n_max, m * x)[1:]
    a, b, absorption = _coefficients_from_log_derivatives(d, d, m, x, n_max)
    return MieCoefficients(a, b, k, absorption)


def _log_derivative_xi(n_max, z, d1):
    """``xi_n'/xi_n`` from ``D1`` through the product ``psi_n xi_n``."""
    d3 = np.empty(n_max + 1, dtype=complex)
    prod = -1j * np.sin(z) * np.exp(1j * z)
    d3[0] = 1j
    for n in range(1, n_max + 1):
        prod = prod * (n / z - d1[n - 1]) * (n / z - d3[n - 1])
        d3[n] = d1[n] + 1j / prod
    return d3


def _log_derivative_chi(n_max, z):
    """``chi_n'/chi_n`` for real ``z`` by upward recurrence (stable for chi)."""
    d2 = np.empty(n_max + 1)
    d2[0] = -np.tan(z)
    for n in range(1, n_max + 1):
        d2[n] = 1.0 / (n / z - d2[n - 1]) - n / z
    return d2


def _psi_xi_ratio(n_max, z1, z2, d1_1, d3_1, d1_2, d3_2, q0=None):
    """``Q_n = [psi_n(z1)/xi_n(z1)] / [psi_n(z2)/xi_n(z2)]`` by upward ratios.

    With ``q0`` given, ``d3`` may belong to any other solution of the Riccati
    recurrence (such as chi) and ``q0`` is its ``n = 0`` ratio.
    """
    q = np.empty(n_max + 1, dtype=complex)
    if q0 is None:
        q0 = np.sin(z1) * np.exp(1j * z2) / (np.sin(z2) * np.exp(1j * z1))
    q[0] = q0
    for n in range(1, n_max + 1):
        num = (d3_1[n] + n / z1) * (d1_2[n] + n / z2)
        den = (d1_1[n] + n / z1) * (d3_2[n] + n / z2)
        q[n] = q[n - 1] * num / den
    return q


def stratified_coefficients(radii, eps_layers, host_eps, E, n_max):
    """Mie coefficients of concentric layers from permittivity values.

    Layer-by-layer propagation of the internal-field log-derivatives from the
    core outward; only ratios of Riccati-Bessel functions enter, which keeps
    metallic layers with large ``Im(m x)`` well conditioned.
    """
    radii = np.asarray(radii, dtype=float)
    eps_layers = np.asarray(eps_layers, dtype=complex)
    _check(E, radii[0])
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    k = host_wavenumber(E, host_eps)
    x = k * radii
    m = np.sqrt(eps_layers / host_eps)
    if np.all(eps_layers == host_eps):
        zeros = np.zeros(n_max, dtype=complex)
        return MieCoefficients(zeros, zeros.copy(), k)

    ha = hb = log_derivative_psi(n_max, m[0] * x[0])
    for ell in range(1, radii.size):
        z1 = m[ell] * x[ell - 1]
        z2 = m[ell] * x[ell]
        d1_1 = log_derivative_psi(n_max, z1)
        d1_2 = log_derivative_psi(n_max, z2)
        if m[ell].imag == 0:
            # lossless layer: the real chi basis keeps the recursion real
            z1r, z2r = z1.real, z2.real
            d3_1 = _log_derivative_chi(n_max, z1r)
            d3_2 = _log_derivative_chi(n_max, z2r)
            d1_1, d1_2 = d1_1.real, d1_2.real
            q = _psi_xi_ratio(n_max, z1r, z2r, d1_1, d3_1, d1_2, d3_2,
                              q0=np.tan(z1r) / np.tan(z2r)).real
        else:
            d3_1 = _log_derivative_xi(n_max, z1, d1_1)
            d3_2 = _log_derivative_xi(n_max, z2, d1_2)
            q = _psi_xi_ratio(n_max, z1, z2, d1_1, d3_1, d1_2, d3_2)
        g1 = m[ell] * ha - m[ell - 1] * d1_1
        g2 = m[ell] * ha - m[ell - 1] * d3_1
        ha = (g2 * d1_2 - q * g1 * d3_2) / (g2 - q * g1)
        g1 = m[ell - 1] * hb - m[ell] * d1_1
        g2 = m[ell - 1] * hb - m[ell] * d3_1
        hb = (g2 * d1_2 - q * g1 * d3_2) / (g2 - q * g1)
    a, b, absorption = _coefficients_from_log_derivatives(ha[1:], hb[1:], m[-1], x[-1], n_max)
    return MieCoefficients(a, b, k, absorption)


def mie_stratified(sphere, E, n_max):
    """Mie coefficients of a :class:`LayeredSphere` at photon energy ``E`` (eV)."""
    return stratified_coefficients(sphere.layer_radii, sphere.permittivities(E),
                                   sphere.host_eps, E, n_max)


def cross_sections(coeffs):
    """Extinction, scattering and absorption cross sections (nm**2)."""
    n = np.arange(1, coeffs.n_max + 1)
    pref = float(2 * np.pi / coeffs.k_host**2)
    scat = pref * float(np.sum((2 * n + 1) * (abs(coeffs.a) ** 2 + abs(coeffs.b) ** 2)))
    if coeffs.absorption is None:
        ext = pref * float(np.sum((2 * n + 1) * (coeffs.a + coeffs.b).real))
        return CrossSections(ext, scat, ext - scat)
    absorption = pref * float(np.sum((2 * n + 1) * coeffs.absorption))
    return CrossSections(scat + absorption, scat, absorption)


def wiscombe_order(x):
    """Seed multipole order ``ceil(x + 4 x**(1/3) + 2)``."""
    if x <= 0:
        raise DomainError("size parameter must be positive")
    return int(ceil(x + 4.0 * x ** (1.0 / 3.0) + 2.0))


def choose_multipole_order(size_parameter_x, sigma_ext=None, rtol=1e-8, cap=100):
    """Multipole truncation for size parameter ``x``.

    Without ``sigma_ext`` the Wiscombe seed is returned. With a callable
    ``sigma_ext(n_max)`` the order grows in steps of two from the seed until
    the relative change of the extinction drops below ``rtol``.
    """
    n = min(wiscombe_order(size_parameter_x), cap)
    if sigma_ext is None:
        return n
    prev = sigma_ext(n)
    while n + 2 <= cap:
        cur = sigma_ext(n + 2)
        if abs(cur - prev) <= rtol * abs(cur):
            return n
        n, prev = n + 2, cur
    return n


def size_parameter(sphere, E):
    return float(host_wavenumber(E, sphere.host_eps) * sphere.radius)


def sphere_cross_sections(sphere, E, n_max=None):
    """Cross sections of a layered sphere with a converged multipole order."""
    if n_max is None:
        n_max = choose_multipole_order(
            size_parameter(sphere, E),
            lambda n: cross_sections(mie_stratified(sphere, E, n)).sigma_ext,
        )
    return cross_sections(mie_stratified(sphere, E, n_max))


def dipole_limit_scattering(radius, eps, host_eps, wavelength_nm):
    """Quasi-static scattering ``(8 pi/3) k^4 a^6 |(eps-eh)/(eps+2 eh)|^2``."""
    k = 2 * np.pi * np.sqrt(host_eps) / wavelength_nm
    alpha = (eps - host_eps) / (eps + 2 * host_eps)
    return 8 * np.pi / 3 * k**4 * radius**6 * abs(alpha) ** 2


def dipole_limit_absorption(radius, eps, host_eps, wavelength_nm):
    """Quasi-static absorption ``4 pi k a^3 Im[(eps-eh)/(eps+2 eh)]``."""
    k = 2 * np.pi * np.sqrt(host_eps) / wavelength_nm
    alpha = (eps - host_eps) / (eps + 2 * host_eps)
    return 4 * np.pi * k * radius**3 * alpha.imag


def energy_grid(wavelengths_nm):
    return HC_EV_NM / np.asarray(wavelengths_nm, dtype=float)
