"""Unit conversions. Energies are photon energies in eV, lengths in nm."""

import numpy as np

#: h*c in eV*nm
HC_EV_NM = 1239.8419
#: hbar in eV*s
HBAR_EV_S = 6.582119569e-16
#: SI constants used by the quantum-dot oscillator strength
ELEMENTARY_CHARGE = 1.602176634e-19
EPSILON_0 = 8.8541878128e-12


def wavelength_to_energy(wavelength_nm):
    return HC_EV_NM / np.asarray(wavelength_nm, dtype=float)


def energy_to_wavelength(energy_ev):
    return HC_EV_NM / np.asarray(energy_ev, dtype=float)


def host_wavenumber(energy_ev, host_eps):
    """Wavenumber (1/nm) in a real host of permittivity ``host_eps``."""
    return 2.0 * np.pi * np.sqrt(host_eps) * energy_ev / HC_EV_NM


def lifetime_to_rate(tau_s):
    """Radiative rate hbar/tau in eV."""
    return HBAR_EV_S / tau_s
