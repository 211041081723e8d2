"""Multipole optics of metal-shell and quantum-dot nanostructures."""

from .cluster import (ClusterMember, Incidence, MultipoleSolution, SphereCluster,
                      cluster_cross_sections, member_absorption, solve_cluster, solve_converged)
from .config import SceneConfig, config_scan, config_spectrum, load_config
from .errors import (DomainError, GeometryError, InputError, NanopolError, NumericalError,
                     RangeError)
from .materials import (ConstantMaterial, LorentzMaterial, LorentzParams, QuantumDotMaterial,
                        QuantumDotSpec, TabulatedMaterial, TabulatedOpticalData,
                        lorentz_strength_for_kappa, silver)
from .mie import (CrossSections, LayeredSphere, MieCoefficients, cross_sections,
                  homogeneous_sphere, mie_homogeneous, mie_stratified, sphere_cross_sections)
from .polariton import (EmitterParams, OscillatorParams, coupled_mode_energies, coupling_regime,
                        g1_from_density, purcell_rate, rabi_splitting, rate_from_density)
from .spectra import (AnticrossingScan, Peak, SpectrumSeries, anticrossing_scan,
                      classify_lineshape, compute_spectrum, find_peaks, peak_height_balance)
from .swf import riccati_bessel, translation_coefficients, vswf

__version__ = "0.1.0"
