"""Peak branches of a silver core in a dye-doped shell as the shell index is tuned.

Run: python demos/core_shell_anticrossing.py
"""

from nanopol.config import config_scan, load_config
from nanopol.spectra import classify_lineshape, most_balanced_index, peak_height_balance


def main():
    cfg = load_config("fig1b")
    prom, dip = cfg.analysis()
    scan = config_scan(cfg)
    print("dye strength -> lineshape")
    for kappa, s in zip(scan.values, scan.spectra):
        print(f"  kappa={kappa:<6g} {classify_lineshape(s, prom, dip)}")

    scan = config_scan(load_config("fig1d"))
    ratio = peak_height_balance(scan)
    print("\n  n_b   branch0_nm  branch1_nm  height_ratio")
    for t, n_b in enumerate(scan.values):
        lo, hi = scan.branch_wavelengths[:, t]
        print(f"  {n_b:4.2f}  {lo:10.2f}  {hi:10.2f}  {ratio[t]:12.3f}")
    best = most_balanced_index(ratio)
    print(f"\nminimum separation {scan.min_separation:.2f} nm at n_b = {scan.min_separation_at:g};"
          f" most balanced heights at n_b = {scan.values[best]:g}")


if __name__ == "__main__":
    main()
