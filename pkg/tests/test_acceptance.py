"""Acceptance criteria 1-9; the terminal summary lists one PASS/FAIL line per criterion."""

import time

import numpy as np
import pytest

from nanopol import polariton
from nanopol.cluster import (ClusterMember, SphereCluster, cluster_cross_sections, solve_cluster,
                             solve_converged)
from nanopol.config import load_config
from nanopol.materials import silver
from nanopol.mie import (LayeredSphere, cross_sections, dipole_limit_absorption,
                         dipole_limit_scattering, homogeneous_sphere, mie_homogeneous,
                         mie_stratified, size_parameter, stratified_coefficients)
from nanopol.spectra import (DIP, DOUBLET, SINGLE, classify_lineshape, compute_spectrum,
                             count_stationary_points, most_balanced_index, peak_height_balance)
from nanopol.units import HBAR_EV_S, HC_EV_NM, lifetime_to_rate

RNG = np.random.default_rng(2024)


def crit(number, title):
    return pytest.mark.criterion(number, title)


# --- 1 -----------------------------------------------------------------------


@crit(1, "oscillator identities")
def test_oscillator_identities():
    start = time.perf_counter()
    N = 10_000
    omega0 = RNG.uniform(0.5, 4.0, N)
    gsp = RNG.uniform(0.0, 0.2, N)
    g0 = RNG.uniform(0.0, 0.2, N)
    g = RNG.uniform(0.0, 0.1, N)
    # pin some points exactly onto the regime boundaries
    g[:100] = np.abs(gsp[:100] - g0[:100]) / 4
    g[100:200] = (gsp[100:200] + g0[100:200]) / 4
    for w, a, b, c in zip(omega0, gsp, g0, g):
        p = polariton.OscillatorParams(w, a, b, c)
        plus, minus = polariton.coupled_mode_energies(p)
        total = plus + minus
        assert abs(total - (2 * w - 0.5j * (a + b))) <= 1e-12 * abs(total)
        disc = c**2 - (a - b) ** 2 / 16
        expect = 2 * np.sqrt(disc) if disc > 0 else 0.0
        assert abs(polariton.rabi_splitting(p) - expect) <= 1e-12
        split, resolved = polariton.regime_thresholds(a, b)
        regime = polariton.coupling_regime(p)
        if c**2 <= (a - b) ** 2 / 16:
            assert regime == polariton.WEAK
        elif c <= resolved:
            assert regime == polariton.SPLIT and c > split
        else:
            assert regime == polariton.RESOLVED
    assert time.perf_counter() - start < 1.0


# --- 2 -----------------------------------------------------------------------


def _direct_g1(tau, gamma_sp, rho):
    return np.sqrt(HBAR_EV_S / tau * gamma_sp * (rho - 1) / 4)


@crit(2, "rate/coupling consistency chain")
def test_density_chain():
    gamma_sp = 0.06
    for rho in np.geomspace(1.0, 1e5, 200):
        gamma_big0 = lifetime_to_rate(4e-9)
        g1 = polariton.g1_from_density(gamma_big0, gamma_sp, rho)
        direct = polariton.rate_from_density(gamma_big0, rho)
        assert polariton.purcell_rate(gamma_big0, g1, gamma_sp) == pytest.approx(direct, rel=4e-15, abs=0)
    assert lifetime_to_rate(4e-9) == pytest.approx(1.6455e-7, rel=1e-4)
    g_a = polariton.g1_from_density(lifetime_to_rate(4e-9), gamma_sp, 2000)
    g_b = polariton.g1_from_density(lifetime_to_rate(400e-12), gamma_sp, 9000)
    assert g_a == pytest.approx(_direct_g1(4e-9, gamma_sp, 2000), rel=1e-6)
    assert g_b == pytest.approx(_direct_g1(400e-12, gamma_sp, 9000), rel=1e-6)
    assert g_a == pytest.approx(2.2e-3, abs=0.05e-3)
    assert g_b == pytest.approx(14.9e-3, abs=0.05e-3)
    assert g_b == pytest.approx(gamma_sp / 4, rel=1e-2)


# --- 3 -----------------------------------------------------------------------


@crit(3, "Mie correctness suite")
def test_mie_suite():
    start = time.perf_counter()
    for _ in range(200):
        radius = RNG.uniform(0.2, 1.5)
        wl = RNG.uniform(400, 800)
        host = RNG.uniform(1.0, 2.5)
        eps = complex(RNG.uniform(-20, 15), RNG.uniform(0.01, 5))
        E = HC_EV_NM / wl
        sph = homogeneous_sphere(radius, eps, host)
        if size_parameter(sph, E) >= 0.02:
            continue
        cs = cross_sections(mie_homogeneous(radius, eps, host, E, 3))
        assert cs.sigma_scat == pytest.approx(dipole_limit_scattering(radius, eps, host, wl), rel=1e-2)
        assert cs.sigma_abs == pytest.approx(dipole_limit_absorption(radius, eps, host, wl), rel=1e-2)
    for _ in range(300):
        r = RNG.uniform(1, 60)
        E = HC_EV_NM / RNG.uniform(300, 900)
        host = RNG.uniform(1, 2.5)
        layers = np.sort(RNG.uniform(0.1, 1, 3)) * r
        eps = RNG.uniform(1.05, 16, 3)
        cs = cross_sections(stratified_coefficients(layers, eps, host, E, 30))
        assert abs(cs.sigma_abs) / cs.sigma_ext < 1e-10
        e1 = complex(RNG.uniform(-30, 10), RNG.uniform(0, 5))
        single = mie_homogeneous(r, e1, host, E, 20)
        split = stratified_coefficients(layers[:2].tolist() + [r], [e1] * 3, host, E, 20)
        assert np.max(np.abs(split.a - single.a)) < 1e-10
        assert np.max(np.abs(split.b - single.b)) < 1e-10
        nul = mie_stratified(LayeredSphere(tuple(layers), (host,) * 3, host), E, 10)
        assert np.all(nul.a == 0) and np.all(nul.b == 0)
    assert time.perf_counter() - start < 30.0


# --- 4 -----------------------------------------------------------------------

AG = silver()


@crit(4, "cluster correctness and trimer timing")
def test_cluster_suite():
    E = HC_EV_NM / 430.0
    s = LayeredSphere((7.0, 15.0), (AG, 2.5 + 0.1j), 1.3)
    one = SphereCluster([ClusterMember((1.0, 2.0, -3.0), s)], 1.3)
    ref = cross_sections(mie_stratified(s, E, 12))
    got = cluster_cross_sections(solve_cluster(one, E, 12))
    for a, b in ((got.sigma_ext, ref.sigma_ext), (got.sigma_scat, ref.sigma_scat),
                 (got.sigma_abs, ref.sigma_abs)):
        assert abs(a - b) < 1e-8 * abs(b)

    ag7 = homogeneous_sphere(7.0, AG, 1.0)
    for wl in (360.0, 400.0, 450.0):
        Ew = HC_EV_NM / wl
        single = cross_sections(mie_stratified(ag7, Ew, 8)).sigma_ext
        pair = SphereCluster([ClusterMember((0, 0, -500), ag7), ClusterMember((0, 0, 500), ag7)], 1.0)
        assert cluster_cross_sections(solve_cluster(pair, Ew, 8)).sigma_ext == pytest.approx(2 * single,
                                                                                            rel=2e-2)

    cfg = load_config("fig2b").with_value("materials.qd.lambda0_nm", 449.85)
    scene = cfg.scene()
    mirror = SphereCluster([ClusterMember(tuple(-np.asarray(m.center)), m.sphere, m.name)
                            for m in scene.members[::-1]], scene.host_eps, scene.incidence)
    for wl in (440.0, 449.85):
        Ew = HC_EV_NM / wl
        a = cluster_cross_sections(solve_cluster(scene, Ew, 12))
        b = cluster_cross_sections(solve_cluster(mirror, Ew, 12))
        assert abs(a.sigma_ext - b.sigma_ext) < 1e-10 * a.sigma_ext
        assert abs(a.sigma_scat - b.sigma_scat) < 1e-10 * a.sigma_scat

    for wl in (420.0, 440.0, 446.0, 449.85, 452.0, 460.0, 480.0):
        assert solve_converged(scene, HC_EV_NM / wl).converged

    start = time.perf_counter()
    series = compute_spectrum(scene, np.linspace(415.0, 485.0, 200), n_max=14)
    elapsed = time.perf_counter() - start
    print(f"trimer spectrum, 200 points at n_max=14: {elapsed:.1f} s")
    assert len(series) == 200
    assert elapsed < 300.0


# --- 5 - 8 -------------------------------------------------------------------


@crit(5, "core-shell lineshape versus dye strength")
def test_fig1b(fig1b_scan):
    cfg, scan = fig1b_scan
    prom, dip = cfg.analysis()
    shapes = dict(zip(scan.values, (classify_lineshape(s, prom, dip) for s in scan.spectra)))
    print("lineshapes:", shapes)
    assert shapes[0.007] == SINGLE
    assert all(shape == DOUBLET for kappa, shape in shapes.items() if kappa >= 0.03)


@crit(6, "core-shell anticrossing versus background index")
def test_fig1d(fig1d_scan):
    _, scan = fig1d_scan
    assert not scan.gaps
    assert np.all(np.isfinite(scan.branch_wavelengths))
    assert scan.min_separation > 0
    sep_index = int(np.argmin(np.abs(scan.branch_wavelengths[1] - scan.branch_wavelengths[0])))
    bal_index = most_balanced_index(peak_height_balance(scan))
    print(f"min separation {scan.min_separation:.2f} nm at index {sep_index}; balance at {bal_index}")
    assert abs(sep_index - bal_index) <= 1


@crit(7, "trimer lineshape versus dipole length")
def test_fig2b(fig2b_scan):
    cfg, scan = fig2b_scan
    prom, dip = cfg.analysis()
    by_value = dict(zip(scan.values, scan.spectra))
    assert classify_lineshape(by_value[0.1], prom, dip) == DIP
    assert classify_lineshape(by_value[0.5], prom, dip) == DOUBLET
    mid = by_value[0.3]
    assert len(scan.peaks[list(scan.values).index(0.3)]) >= 2 or count_stationary_points(mid) >= 2


@crit(8, "trimer anticrossing versus exciton energy")
def test_fig2d(fig2d_scan):
    _, scan = fig2d_scan
    lam, width = scan.branch_wavelengths, scan.branch_fwhm
    assert scan.min_separation > 0
    assert np.all(np.isfinite(lam[:, [0, -1]]))
    # the exciton-like branch is the one far from the plasmon at each end
    first, last = 0, -1
    assert width[0, first] < width[1, first]
    assert width[1, last] < width[0, last]
    print(f"min separation {scan.min_separation:.2f} nm; endpoint widths {width[:, first]} {width[:, last]}")


# --- 9 -----------------------------------------------------------------------


@crit(9, "thread-count independence")
def test_threads_bitwise():
    scene = load_config("fig1c").scene()
    grid = np.arange(400.0, 470.0, 1.0)
    a = compute_spectrum(scene, grid, threads=1, refine_step=0.25)
    b = compute_spectrum(scene, grid, threads=4, refine_step=0.25)
    assert np.array_equal(a.wavelengths, b.wavelengths)
    assert np.array_equal(a.sigma_ext, b.sigma_ext) and np.array_equal(a.sigma_abs, b.sigma_abs)
    trimer = load_config("fig2b").with_value("materials.qd.lambda0_nm", 449.85).scene()
    grid = np.linspace(440.0, 460.0, 12)
    c = compute_spectrum(trimer, grid, threads=1)
    d = compute_spectrum(trimer, grid, threads=4)
    assert np.array_equal(c.sigma_ext, d.sigma_ext) and np.array_equal(c.n_max, d.n_max)
