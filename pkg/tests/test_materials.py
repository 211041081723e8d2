import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nanopol.errors import DomainError, RangeError
from nanopol.materials import (
    ConstantMaterial,
    LorentzParams,
    QuantumDotSpec,
    as_material,
    data_dir,
    load_optical_constants,
    lorentz_permittivity,
    lorentz_strength_for_kappa,
    parse_optical_constants,
    qd_oscillator_strength,
    qd_permittivity,
    refractive_index,
    silver,
    tabulated_permittivity,
)
from nanopol.units import HC_EV_NM, energy_to_wavelength, lifetime_to_rate, wavelength_to_energy


def test_units_round_trip():
    assert wavelength_to_energy(HC_EV_NM) == pytest.approx(1.0)
    assert energy_to_wavelength(wavelength_to_energy(432.1)) == pytest.approx(432.1)
    assert lifetime_to_rate(4e-9) == pytest.approx(1.6455e-7, rel=1e-4)


def test_lorentz_zero_strength_is_background():
    p = LorentzParams(3.01, 0.0, 2.88, 0.057)
    assert lorentz_permittivity(p, 2.88) == 3.01 + 0j


def test_lorentz_at_resonance():
    p = LorentzParams(3.01, 7.8e-2, 2.88, 0.057)
    eps = lorentz_permittivity(p, 2.88)
    assert eps.real == pytest.approx(3.01, abs=1e-12)
    assert eps.imag == pytest.approx(7.8e-2 / (2 * 2.88 * 0.057))
    assert eps.imag == pytest.approx(0.2376, abs=1e-4)


def test_lorentz_far_off_resonance():
    p = LorentzParams(3.01, 7.8e-2, 2.88, 0.057)
    E = 28.8
    eps = lorentz_permittivity(p, E)
    ref = 3.01 + 7.8e-2 / (2.88**2 - E**2)
    assert eps.real == pytest.approx(ref, rel=1e-2)
    assert abs(eps.imag) < 1e-3 * abs(eps.real)


def test_lorentz_peak_of_imaginary_part():
    p = LorentzParams(3.01, 7.8e-2, 2.88, 0.02)
    E = np.linspace(2.88 - 5 * 0.02, 2.88 + 5 * 0.02, 2001)
    im = lorentz_permittivity(p, E).imag
    assert abs(E[np.argmax(im)] - 2.88) <= E[1] - E[0]
    assert np.all(im > 0)


def test_lorentz_rejects_non_positive_energy():
    p = LorentzParams(3.01, 7.8e-2, 2.88, 0.057)
    with pytest.raises(DomainError):
        lorentz_permittivity(p, 0.0)
    with pytest.raises(DomainError):
        LorentzParams(0.5, 0.0, 2.88, 0.057)


@pytest.mark.parametrize("kappa", [7e-3, 3e-2, 0.2])
def test_strength_for_kappa_round_trip(kappa):
    A = lorentz_strength_for_kappa(3.01, kappa, 2.88, 0.0285)
    eps = lorentz_permittivity(LorentzParams(3.01, A, 2.88, 0.0285), 2.88)
    assert refractive_index(eps)[1] == pytest.approx(kappa, rel=1e-12)


def test_qd_strength_value():
    spec = QuantumDotSpec(radius=2.0, dipole_length_r0=0.5, E0=2.88, gamma0=0.0025)
    A = qd_oscillator_strength(spec)
    assert A / (2 * 2.88) == pytest.approx(0.135, rel=1e-2)
    assert A == pytest.approx(0.778, rel=2e-3)


def test_qd_strength_scales_with_dipole_squared():
    a1 = qd_oscillator_strength(QuantumDotSpec(2.0, 0.1, 2.88, 0.0025))
    a5 = qd_oscillator_strength(QuantumDotSpec(2.0, 0.5, 2.88, 0.0025))
    assert a1 / a5 == pytest.approx(1 / 25, rel=1e-12)


def test_qd_zero_dipole_and_bad_radius():
    spec = QuantumDotSpec(2.0, 0.0, 2.88, 0.0025)
    assert qd_permittivity(spec, 2.5) == 3.0 + 0j
    with pytest.raises(DomainError):
        QuantumDotSpec(0.0, 0.5, 2.88, 0.0025)


@pytest.mark.parametrize("eps, expected", [(4 + 0j, (2.0, 0.0)), (-1 + 0j, (0.0, 1.0))])
def test_refractive_index_simple(eps, expected):
    assert refractive_index(eps) == pytest.approx(expected, abs=1e-15)


def test_refractive_index_shell_value():
    n, kappa = refractive_index(3.01 + 0.2376j)
    assert n == pytest.approx(1.736, abs=1e-3)
    assert kappa == pytest.approx(0.0684, abs=1e-4)


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(0, 50))
def test_refractive_index_round_trip(re, im):
    eps = complex(re, im)
    n, kappa = refractive_index(eps)
    assert n >= 0 and kappa >= 0
    assert abs((n + 1j * kappa) ** 2 - eps) <= 1e-12 * max(abs(eps), 1e-300) + 1e-300


def test_silver_table_nodes_are_exact():
    table = silver().table
    for j in (0, 10, len(table.energy) - 1):
        eps = tabulated_permittivity(table, table.energy[j])
        assert eps == (table.n[j] + 1j * table.k[j]) ** 2


def test_silver_midpoints_are_bracketed():
    table = silver().table
    mids = 0.5 * (table.energy[1:] + table.energy[:-1])
    eps = tabulated_permittivity(table, mids)
    root = np.sqrt(eps)
    lo_n = np.minimum(table.n[1:], table.n[:-1])
    hi_n = np.maximum(table.n[1:], table.n[:-1])
    lo_k = np.minimum(table.k[1:], table.k[:-1])
    hi_k = np.maximum(table.k[1:], table.k[:-1])
    assert np.all((root.real >= lo_n - 1e-12) & (root.real <= hi_n + 1e-12))
    assert np.all((root.imag >= lo_k - 1e-12) & (root.imag <= hi_k + 1e-12))


def test_silver_is_continuous():
    table = silver().table
    E = np.linspace(table.energy[0], table.energy[-1], 20001)
    eps = tabulated_permittivity(table, E)
    jump = np.abs(np.diff(eps))
    assert jump.max() < 0.05 * np.abs(eps).max()


def test_silver_out_of_range():
    table = silver().table
    with pytest.raises(RangeError):
        tabulated_permittivity(table, table.energy[0] * 0.9)


def test_parse_rejects_bad_rows():
    with pytest.raises(DomainError):
        parse_optical_constants("1.0 0.1\n")
    with pytest.raises(DomainError):
        parse_optical_constants("# only a comment\n")
    with pytest.raises(DomainError):
        parse_optical_constants("2.0 0.1 1.0\n1.0 0.1 1.0\n")


def test_data_dir_override(tmp_path, monkeypatch):
    src = data_dir() / "silver_johnson_christy.txt"
    rows = [line for line in src.read_text().splitlines() if line and not line.startswith("#")]
    (tmp_path / "silver_johnson_christy.txt").write_text("\n".join(rows[:6]) + "\n")
    monkeypatch.setenv("NANOPOL_DATA_DIR", str(tmp_path))
    assert data_dir() == tmp_path
    assert len(silver().table.energy) == 6
    assert len(load_optical_constants(src).energy) > 6


def test_as_material():
    assert isinstance(as_material(2.25), ConstantMaterial)
    m = ConstantMaterial(2.0 + 0.1j)
    assert as_material(m) is m
    assert np.allclose(m.permittivity(np.array([1.0, 2.0])), 2.0 + 0.1j)
    with pytest.raises(TypeError):
        as_material("glass")
