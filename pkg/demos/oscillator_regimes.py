"""Coupling regimes of N emitters at a plasmon with 60 meV linewidth.

Run: python demos/oscillator_regimes.py
"""

from nanopol import polariton
from nanopol.units import lifetime_to_rate


def main():
    gamma_sp = 0.06
    for tau, rho in ((4e-9, 2000.0), (400e-12, 9000.0)):
        g1 = polariton.g1_from_density(lifetime_to_rate(tau), gamma_sp, rho)
        print(f"tau={tau:.1e} s rho={rho:g}: g1 = {1e3 * g1:.2f} meV")
        for N in (1, 10, 50, 200):
            g = polariton.collective_coupling(g1, N)
            p = polariton.OscillatorParams(2.88, gamma_sp, 0.0, g)
            print(f"    N={N:<4d} g={1e3 * g:6.2f} meV  splitting={1e3 * polariton.rabi_splitting(p):6.2f} meV"
                  f"  {polariton.coupling_regime(p)}")


if __name__ == "__main__":
    main()
