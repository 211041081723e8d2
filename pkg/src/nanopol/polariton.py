"""Coupled-oscillator description of an emitter interacting with a plasmon mode.

All energies, rates and linewidths are in eV; every linewidth is a full width
at half maximum.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

WEAK = "weak"
SPLIT = "split"
RESOLVED = "resolved"


@dataclass(frozen=True)
class OscillatorParams:
    omega0: float
    gamma_sp: float
    gamma0: float
    g: float

    def __post_init__(self):
        if self.omega0 <= 0:
            raise DomainError("omega0 must be positive")
        if self.gamma_sp < 0 or self.gamma0 < 0:
            raise DomainError("linewidths must be >= 0")
        if self.g < 0:
            raise DomainError("coupling g must be >= 0")


@dataclass(frozen=True)
class EmitterParams:
    gamma_big0: float
    rho: float

    def __post_init__(self):
        if self.gamma_big0 <= 0:
            raise DomainError("gamma_big0 must be positive")
        if self.rho <= 0:
            raise DomainError("rho must be positive")


def coupled_mode_energies(p):
    """Complex energies ``(Omega_plus, Omega_minus)`` of the two hybrid modes."""
    centre = p.omega0 - 0.25j * (p.gamma_sp + p.gamma0)
    root = np.sqrt(complex(p.g**2 - (p.gamma_sp - p.gamma0) ** 2 / 16.0))
    return centre + root, centre - root


def rabi_splitting(p):
    """``Re(Omega_plus) - Re(Omega_minus)``."""
    plus, minus = coupled_mode_energies(p)
    return plus.real - minus.real


def regime_thresholds(gamma_sp, gamma0):
    """Couplings above which the modes split and above which the doublet is resolved."""
    return abs(gamma_sp - gamma0) / 4.0, (gamma_sp + gamma0) / 4.0


def coupling_regime(p):
    """``'weak'``, ``'split'`` or ``'resolved'``; a coupling on a boundary gets the lower class."""
    if p.g**2 <= (p.gamma_sp - p.gamma0) ** 2 / 16.0:
        return WEAK
    if p.g <= (p.gamma_sp + p.gamma0) / 4.0:
        return SPLIT
    return RESOLVED


def collective_coupling(g1, N):
    """Coupling of ``N`` identical emitters seeing the same field, ``sqrt(N) g1``."""
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer")
    return float(np.sqrt(N) * g1)


def purcell_rate(gamma_big0, g1, gamma_sp):
    """Modified emission rate ``Gamma0 + 4 g1**2 / gamma_sp``."""
    if gamma_sp <= 0:
        raise DomainError("gamma_sp must be positive")
    return gamma_big0 + 4.0 * g1**2 / gamma_sp


def rate_from_density(gamma_big0, rho):
    """Emission rate from the mode-density enhancement, ``Gamma0 * rho``."""
    if rho <= 0:
        raise DomainError("rho must be positive")
    return gamma_big0 * rho


def g1_from_density(gamma_big0, gamma_sp, rho):
    """Single-emitter coupling that makes the two rate expressions agree."""
    if rho < 1:
        raise DomainError("rho must be >= 1 to infer a coupling")
    return float(np.sqrt(gamma_big0 * gamma_sp * (rho - 1.0) / 4.0))


def spaser_threshold_satisfied(g, delta, gamma_sp, gamma0):
    """Whether ``g**2 * delta > gamma_sp * gamma0 / 4`` for inversion ``delta`` in (0, 1]."""
    if not 0 < delta <= 1:
        raise DomainError("delta must lie in (0, 1]")
    return bool(g**2 * delta > gamma_sp * gamma0 / 4.0)
