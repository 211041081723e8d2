"""Quantum dot between two silver spheres: from a narrow dip to a split doublet.

The exciton is tuned to the bare bonding peak; larger dipole lengths couple
more strongly. Takes about two minutes.

Run: python demos/trimer_dip_to_doublet.py
"""

from nanopol.config import bare_peak_energy, config_scan, load_config
from nanopol.spectra import classify_lineshape, find_peaks
from nanopol.units import HC_EV_NM


def main():
    cfg = load_config("fig2b")
    E0 = bare_peak_energy(cfg, "qd")
    print(f"bare bonding peak: {HC_EV_NM / E0:.2f} nm ({E0:.4f} eV)")
    prom, dip = cfg.analysis()
    scan = config_scan(cfg)
    for r0, s in zip(scan.values, scan.spectra):
        peaks = ", ".join(f"{p.lambda_peak:.2f}" for p in find_peaks(s, prom))
        print(f"  r0={r0:g} nm  {classify_lineshape(s, prom, dip):8s} peaks at {peaks} nm"
              f"  (orders {s.n_max.min()}-{s.n_max.max()})")


if __name__ == "__main__":
    main()
