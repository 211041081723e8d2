import numpy as np
import pytest

from nanopol import mie
from nanopol.errors import DomainError
from nanopol.materials import silver
from nanopol.units import HC_EV_NM

RNG = np.random.default_rng(7)


def test_index_matched_sphere_is_null():
    c = mie.mie_homogeneous(12.0, 2.25, 2.25, 2.5, 8)
    assert np.all(c.a == 0) and np.all(c.b == 0)
    assert mie.cross_sections(c) == mie.CrossSections(0.0, 0.0, 0.0)
    s = mie.LayeredSphere((5.0, 9.0), (2.25, 2.25), 2.25)
    c = mie.mie_stratified(s, 2.5, 6)
    assert np.all(c.a == 0) and np.all(c.b == 0)


def test_dipole_limit_small_sphere():
    E = HC_EV_NM / 500.0
    cs = mie.cross_sections(mie.mie_homogeneous(5.0, 2.25, 1.0, E, 4))
    ref = mie.dipole_limit_scattering(5.0, 2.25, 1.0, 500.0)
    assert ref == pytest.approx(2.82e-4, rel=2e-3)
    assert cs.sigma_scat == pytest.approx(ref, rel=5e-3)


@pytest.mark.parametrize("eps", [2.25 + 0.1j, -4.0 + 0.3j, 10 + 2j])
def test_dipole_limit_below_x_002(eps):
    radius, host, wl = 1.0, 1.5, 500.0
    E = HC_EV_NM / wl
    x = mie.size_parameter(mie.homogeneous_sphere(radius, eps, host), E)
    assert x < 0.02
    cs = mie.cross_sections(mie.mie_homogeneous(radius, eps, host, E, 3))
    assert cs.sigma_scat == pytest.approx(mie.dipole_limit_scattering(radius, eps, host, wl), rel=1e-2)
    assert cs.sigma_abs == pytest.approx(mie.dipole_limit_absorption(radius, eps, host, wl), rel=1e-2)


def test_lossless_energy_conservation_grid():
    for _ in range(40):
        r = RNG.uniform(2, 30)
        wl = RNG.uniform(350, 700)
        eps = RNG.uniform(1.1, 12)
        E = HC_EV_NM / wl
        sph = mie.LayeredSphere((r * 0.5, r), (eps, RNG.uniform(1.1, 5)), RNG.uniform(1, 2))
        c = mie.mie_stratified(sph, E, 10)
        cs = mie.cross_sections(c)
        assert abs(cs.sigma_abs) < 1e-10 * cs.sigma_ext
        assert cs.sigma_ext == pytest.approx(cs.sigma_scat + cs.sigma_abs, rel=1e-14)
        assert np.all(np.abs(c.a) ** 2 <= c.a.real + 1e-10)
        assert np.all(np.abs(c.b) ** 2 <= c.b.real + 1e-10)


def test_degenerate_layers_grid():
    for _ in range(40):
        r = RNG.uniform(2, 30)
        wl = RNG.uniform(350, 700)
        eps = complex(RNG.uniform(-10, 10), RNG.uniform(0, 3))
        host = RNG.uniform(1, 3)
        E = HC_EV_NM / wl
        layered = mie.stratified_coefficients([0.3 * r, 0.7 * r, r], [eps] * 3, host, E, 12)
        single = mie.mie_homogeneous(r, eps, host, E, 12)
        assert np.max(np.abs(layered.a - single.a)) < 1e-10
        assert np.max(np.abs(layered.b - single.b)) < 1e-10


def test_nonnegative_for_passive_media():
    ag = silver()
    for wl in np.linspace(350, 700, 15):
        cs = mie.sphere_cross_sections(mie.LayeredSphere((7.0, 22.0), (ag, 3.01 + 0.05j), 1.0), HC_EV_NM / wl)
        assert cs.sigma_ext > 0 and cs.sigma_scat > 0 and cs.sigma_abs > 0


def test_vanishing_shell_tends_to_core():
    E = HC_EV_NM / 430.0
    ag = silver()
    core = mie.mie_stratified(mie.homogeneous_sphere(7.0, ag, 1.0), E, 8)
    errs = []
    for t in (1e-1, 1e-3, 1e-6):
        shell = mie.mie_stratified(mie.LayeredSphere((7.0, 7.0 + t), (ag, 3.01), 1.0), E, 8)
        errs.append(np.max(np.abs(shell.a - core.a)) / np.max(np.abs(core.a)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-5


@pytest.mark.parametrize("shell_eps", [3.01 + 0.05j, 3.01, 12.0])
def test_metal_core_shell_matches_transfer_matrix(shell_eps):
    # direct solution of the interface conditions of each multipole order
    from scipy.special import spherical_jn, spherical_yn

    E = HC_EV_NM / 430.0
    radii = [7.0, 22.0]
    eps = [complex(silver().permittivity(E)), shell_eps]
    host = 1.0
    k0 = 2 * np.pi * E / HC_EV_NM
    n_max = 6
    ref = mie.stratified_coefficients(radii, eps, host, E, n_max)

    def psi(n, z):
        return z * spherical_jn(n, z)

    def dpsi(n, z):
        return spherical_jn(n, z) + z * spherical_jn(n, z, derivative=True)

    def chi(n, z):
        return -z * spherical_yn(n, z)

    def dchi(n, z):
        return -(spherical_yn(n, z) + z * spherical_yn(n, z, derivative=True))

    m = np.sqrt(np.array(eps) / host)
    kh = k0 * np.sqrt(host)
    for n in range(1, n_max + 1):
        for kind in ("a", "b"):
            # unknowns: core c1; shell c2 (psi), c3 (chi); outside coefficient s (xi)
            r1, r2 = radii
            z11, z21, z22 = m[0] * kh * r1, m[1] * kh * r1, m[1] * kh * r2
            x = kh * r2
            # tangential continuity weights: value by m for a, derivative by m for b
            if kind == "b":
                w_val, w_der = (lambda mi: 1.0), (lambda mi: mi)
            else:
                w_val, w_der = (lambda mi: mi), (lambda mi: 1.0)
            xi = lambda z: psi(n, z) - 1j * chi(n, z)  # noqa: E731
            dxi = lambda z: dpsi(n, z) - 1j * dchi(n, z)  # noqa: E731
            A = np.array([
                [psi(n, z11) * w_val(m[0]), -psi(n, z21) * w_val(m[1]), -chi(n, z21) * w_val(m[1]), 0],
                [dpsi(n, z11) * w_der(m[0]), -dpsi(n, z21) * w_der(m[1]), -dchi(n, z21) * w_der(m[1]), 0],
                [0, psi(n, z22) * w_val(m[1]), chi(n, z22) * w_val(m[1]), xi(x)],
                [0, dpsi(n, z22) * w_der(m[1]), dchi(n, z22) * w_der(m[1]), dxi(x)],
            ], dtype=complex)
            rhs = np.array([0, 0, psi(n, x), dpsi(n, x)], dtype=complex)
            coef = np.linalg.solve(A, rhs)[3]
            got = (ref.a if kind == "a" else ref.b)[n - 1]
            assert coef == pytest.approx(got, rel=1e-9, abs=1e-15)


def test_fig1_geometry_single_peak_near_430():
    ag = silver()
    sph = mie.LayeredSphere((7.0, 22.0), (ag, 3.01), 1.0)
    wl = np.arange(380.0, 520.0, 1.0)
    ext = np.array([mie.sphere_cross_sections(sph, HC_EV_NM / w).sigma_ext for w in wl])
    assert abs(wl[np.argmax(ext)] - 430.0) <= 15.0


def test_host_red_shifts_silver_resonance():
    ag = silver()
    wl = np.arange(330.0, 520.0, 1.0)
    peaks = []
    for host in (1.0, 3.0):
        s = mie.homogeneous_sphere(7.0, ag, host)
        ext = [mie.sphere_cross_sections(s, HC_EV_NM / w).sigma_ext for w in wl]
        peaks.append(wl[int(np.argmax(ext))])
    assert peaks[1] > peaks[0] + 20


def test_absorbing_silver_core():
    cs = mie.sphere_cross_sections(mie.homogeneous_sphere(7.0, silver(), 1.0), HC_EV_NM / 380.0)
    assert cs.sigma_abs > 0


def test_multipole_order_choice():
    assert mie.wiscombe_order(10.0) == 21
    assert mie.wiscombe_order(0.1) == 4
    sph = mie.homogeneous_sphere(2.0, 4.0 + 0.5j, 1.0)
    E = HC_EV_NM * 0.1 / (2 * np.pi * 2.0)
    x = mie.size_parameter(sph, E)
    assert x == pytest.approx(0.1)

    def ext(n):
        return mie.cross_sections(mie.mie_stratified(sph, E, n)).sigma_ext

    n = mie.choose_multipole_order(x, ext)
    assert n <= 5
    assert abs(ext(2 * n) - ext(n)) < 1e-8 * abs(ext(n))


def test_monotone_convergence():
    sph = mie.LayeredSphere((7.0, 22.0), (silver(), 3.01), 1.0)
    E = HC_EV_NM / 430.0
    seed = mie.wiscombe_order(mie.size_parameter(sph, E))
    vals = [mie.cross_sections(mie.mie_stratified(sph, E, n)).sigma_ext for n in range(seed, seed + 9, 2)]
    diffs = np.abs(np.diff(vals))
    assert np.all(diffs[1:] <= diffs[:-1] + 1e-12 * abs(vals[-1]))


def test_sphere_validation():
    with pytest.raises(DomainError):
        mie.LayeredSphere((5.0, 4.0), (2.0, 2.0))
    with pytest.raises(DomainError):
        mie.LayeredSphere((5.0,), (2.0,), host_eps=0.5)
    with pytest.raises(DomainError):
        mie.LayeredSphere((5.0,), (2.0,), host_eps=2.0 + 0.1j)
    with pytest.raises(DomainError):
        mie.mie_homogeneous(5.0, 2.0, 1.0, -1.0, 3)
