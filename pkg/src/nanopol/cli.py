"""Command-line front end: ``nanopol spectrum|scan|oscillator|materials``.

Exit codes: 0 success, 1 numerical failure, 2 invalid input.
"""

import argparse
import csv
import io
import logging
import sys

import numpy as np

from . import polariton
from .config import config_scan, config_spectrum, load_config
from .errors import NanopolError, NumericalError
from .materials import refractive_index, silver
from .spectra import classify_lineshape, find_peaks
from .units import HC_EV_NM

EXIT_OK, EXIT_NUMERICAL, EXIT_INVALID = 0, 1, 2

SPECTRUM_HEADER = ("wavelength_nm", "sigma_ext_nm2", "sigma_scat_nm2", "sigma_abs_nm2")
SCAN_HEADER = ("tuning_value", "branch", "lambda_peak_nm", "sigma_peak_nm2", "prominence_nm2")
SCAN_SPECTRA_HEADER = ("tuning_value",) + SPECTRUM_HEADER
MATERIAL_HEADER = ("wavelength_nm", "energy_eV", "eps_real", "eps_imag", "n", "kappa")


class UsageError(Exception):
    """Inconsistent command-line flags."""


def fmt(x):
    """Locale-independent, round-trip-safe number text."""
    x = float(x)
    return repr(x) if np.isfinite(x) else "nan"


def _csv_text(header, rows, footer=()):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if not isinstance(v, (str, int)) else v for v in row])
    for line in footer:
        buf.write(line + "\n")
    return buf.getvalue()


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def parse_grid(text):
    """``START:STOP:COUNT`` in nm -> evenly spaced wavelengths."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("--grid must look like START:STOP:COUNT")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError("--grid must look like START:STOP:COUNT") from None
    if count < 1 or start <= 0 or (count > 1 and stop <= start):
        raise UsageError("--grid needs 0 < START < STOP and COUNT >= 1")
    return np.linspace(start, stop, count)


def _load(args):
    return load_config(args.config, overrides=args.set or ())


def _grid(args):
    return parse_grid(args.grid) if args.grid else None


# --- subcommands -------------------------------------------------------------


def run_spectrum(args):
    cfg = _load(args)
    series = config_spectrum(cfg, grid=_grid(args), threads=args.threads, nmax_cap=args.nmax_cap)
    rows = zip(series.wavelengths, series.sigma_ext, series.sigma_scat, series.sigma_abs)
    _emit(_csv_text(SPECTRUM_HEADER, rows), args.out)
    prom, dip = cfg.analysis()
    peaks = find_peaks(series, prom)
    shape = classify_lineshape(series, prom, dip)
    print(f"lineshape={shape} peaks_nm=" + ",".join(f"{p.lambda_peak:.2f}" for p in peaks),
          file=sys.stderr)
    return EXIT_OK


def run_scan(args):
    cfg = _load(args)
    scan = config_scan(cfg, grid=_grid(args), threads=args.threads, nmax_cap=args.nmax_cap)
    rows = []
    for t, value in enumerate(scan.values):
        for branch in (0, 1):
            lam = scan.branch_wavelengths[branch, t]
            if np.isnan(lam):
                continue
            rows.append((value, branch, lam, scan.branch_sigma[branch, t],
                         scan.branch_prominence[branch, t]))
    footer = []
    if scan.gaps:
        footer.append("# gaps at tuning=" + ",".join(fmt(g) for g in scan.gaps))
    if scan.discontinuous:
        footer.append("# warning: branch discontinuity, assignment may be unreliable")
    footer.append(f"# min_separation_nm={fmt(scan.min_separation)} at tuning={fmt(scan.min_separation_at)}")
    _emit(_csv_text(SCAN_HEADER, rows, footer), args.out)
    if args.spectra_out:
        srows = []
        for value, s in zip(scan.values, scan.spectra):
            srows.extend((value, *r) for r in zip(s.wavelengths, s.sigma_ext, s.sigma_scat, s.sigma_abs))
        _emit(_csv_text(SCAN_SPECTRA_HEADER, srows), args.spectra_out)
    return EXIT_OK


def oscillator_report(args):
    """Text report for the oscillator subcommand."""
    density = args.from_density or args.rho is not None or args.gamma_big0 is not None
    if density and args.g is not None:
        raise UsageError("give either --g or the density flags (--gamma-big0, --rho), not both")
    if not density and args.g is None:
        raise UsageError("give --g, or --gamma-big0 with --rho")
    if density and (args.rho is None or args.gamma_big0 is None):
        raise UsageError("the density route needs both --gamma-big0 and --rho")
    lines = []
    if density:
        g1 = polariton.g1_from_density(args.gamma_big0, args.gamma_sp, args.rho)
        lines += [f"Gamma0_eV = {args.gamma_big0:.6g}",
                  f"rho = {args.rho:.6g}",
                  f"Gamma_purcell_eV = {polariton.purcell_rate(args.gamma_big0, g1, args.gamma_sp):.6g}",
                  f"g1_eV = {g1:.6g}"]
        g = polariton.collective_coupling(g1, args.N)
    else:
        g = polariton.collective_coupling(args.g, args.N)
        lines.append(f"g1_eV = {args.g:.6g}")
    p = polariton.OscillatorParams(args.omega0, args.gamma_sp, args.gamma0, g)
    plus, minus = polariton.coupled_mode_energies(p)
    split, resolved = polariton.regime_thresholds(args.gamma_sp, args.gamma0)
    regime = polariton.coupling_regime(p)
    lines += [
        f"N = {args.N}",
        f"g_eV = {g:.6g}",
        f"omega0_eV = {args.omega0:.6g}",
        f"gamma_sp_eV = {args.gamma_sp:.6g}",
        f"gamma0_eV = {args.gamma0:.6g}",
        f"Omega_plus_eV = {plus.real:.9g} {plus.imag:+.6g}i",
        f"Omega_minus_eV = {minus.real:.9g} {minus.imag:+.6g}i",
        f"rabi_splitting_eV = {polariton.rabi_splitting(p):.6g}",
        f"split_threshold_eV = {split:.6g}",
        f"resolved_threshold_eV = {resolved:.6g}",
        f"regime = {regime}",
        f"delta = {args.delta:.6g}",
        "spaser_threshold = "
        + str(polariton.spaser_threshold_satisfied(g, args.delta, args.gamma_sp, args.gamma0)).lower(),
    ]
    return "\n".join(lines) + "\n"


def run_oscillator(args):
    _emit(oscillator_report(args), args.out)
    return EXIT_OK


def run_materials(args):
    if args.config:
        cfg = _load(args)
        mats = cfg.materials()
        if args.name not in mats:
            raise UsageError(f"material '{args.name}' is not defined in {args.config}")
        material = mats[args.name]
        grid = _grid(args)
        if grid is None:
            grid = cfg.sweep().wavelengths
    elif args.name in ("silver", "ag", "Ag"):
        material = silver()
        grid = _grid(args)
        if grid is None:
            grid = np.linspace(300.0, 800.0, 501)
    else:
        raise UsageError(f"unknown material '{args.name}'; pass --config to read a scene file")
    energies = HC_EV_NM / grid
    rows = []
    for wl, E in zip(grid, energies):
        eps = complex(material.permittivity(E))
        n, kappa = refractive_index(eps)
        rows.append((wl, E, eps.real, eps.imag, n, kappa))
    _emit(_csv_text(MATERIAL_HEADER, rows), args.out)
    return EXIT_OK


# --- parser ------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="nanopol", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def sweep_flags(p):
        p.add_argument("config", help="scene file or bundled recipe name (fig1b ... fig2d)")
        p.add_argument("--out", help="write CSV here instead of standard output")
        p.add_argument("--grid", help="wavelength grid START:STOP:COUNT in nm (disables refinement)")
        p.add_argument("--threads", type=int, help="worker threads")
        p.add_argument("--nmax-cap", type=int, dest="nmax_cap", help="highest multipole order for clusters")
        p.add_argument("--set", action="append", metavar="SECTION.FIELD=VALUE",
                       help="override a config field (repeatable)")

    p = sub.add_parser("spectrum", help="extinction, scattering and absorption spectrum")
    sweep_flags(p)
    p.set_defaults(func=run_spectrum)

    p = sub.add_parser("scan", help="peak branches over the [sweep.tuning] parameter")
    sweep_flags(p)
    p.add_argument("--spectra-out", dest="spectra_out", help="also write every spectrum of the scan")
    p.set_defaults(func=run_scan)

    p = sub.add_parser("oscillator", help="coupled-oscillator energies and coupling regime")
    p.add_argument("--omega0", type=float, default=2.88, help="mode energy in eV (default 2.88)")
    p.add_argument("--gamma-sp", type=float, default=0.06, dest="gamma_sp",
                   help="plasmon FWHM in eV (default 0.06)")
    p.add_argument("--gamma0", type=float, default=0.0, help="emitter FWHM in eV (default 0)")
    p.add_argument("--g", type=float, help="single-emitter coupling in eV")
    p.add_argument("--from-density", action="store_true", dest="from_density",
                   help="infer the coupling from --gamma-big0 and --rho")
    p.add_argument("--gamma-big0", type=float, dest="gamma_big0", help="free-space emission rate in eV")
    p.add_argument("--rho", type=float, help="mode-density enhancement at the emitter")
    p.add_argument("--N", type=int, default=1, help="number of identical emitters (default 1)")
    p.add_argument("--delta", type=float, default=1.0, help="population inversion in (0, 1] (default 1)")
    p.add_argument("--out", help="write the report here instead of standard output")
    p.set_defaults(func=run_oscillator)

    p = sub.add_parser("materials", help="permittivity table of a material")
    p.add_argument("name", help="'silver', or a material name from --config")
    p.add_argument("--config", help="scene file or bundled recipe holding the material")
    p.add_argument("--grid", help="wavelength grid START:STOP:COUNT in nm")
    p.add_argument("--out", help="write CSV here instead of standard output")
    p.add_argument("--set", action="append", metavar="SECTION.FIELD=VALUE",
                   help="override a config field (repeatable)")
    p.set_defaults(func=run_materials)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except NumericalError as exc:
        print(f"nanopol: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NanopolError as exc:
        print(f"nanopol: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"nanopol: {exc}", file=sys.stderr)
        return EXIT_INVALID
