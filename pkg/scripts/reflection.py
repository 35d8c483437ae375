"""Reflection recurrence regimes and the decay fit on the bifurcation line."""

import argparse
from fractions import Fraction

from shockfree.scenarios import decay_rate_fit, reflect_recurrence, reflection_far_field, vacuum_condition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--Q", default="2")
    ap.add_argument("--z0", default="1")
    ap.add_argument("--d", type=float, default=2.0)
    ap.add_argument("--n", type=int, default=200)
    args = ap.parse_args()
    Q, z0 = Fraction(args.Q), Fraction(args.z0)
    eta = (Q - 1) / (Q + 1)
    print(f"eta = {eta}")
    for mult in (Fraction(1, 2), Fraction(1), Fraction(3, 2)):
        z1 = min(mult * eta * z0, z0 * Fraction(99, 100))
        tr = reflect_recurrence(z0, z1, Q, 0.0, 1.0, args.d, n_max=args.n)
        ff = reflection_far_field(z0, z1, Q)
        v = vacuum_condition(*(float(ff[k]) for k in
                               ("u_left", "u_right", "m_left", "m_right", "z_left", "z_right")))
        line = (f"z1 = {str(z1):>8}  zeta = {float(tr.zeta):+.4f}  {tr.regime:20s}"
                f"  steps {len(tr.z_exact) - 1:4d}  terminal {tr.N_terminal}  margin {v.margin:+.3e}")
        if tr.regime == "vacuum-in-the-limit":
            fit = decay_rate_fit(tr)
            line += f"  z ~ t^{fit.exponent:.4f} (expect {fit.expected:.4f}), sandwich {fit.sandwich_ok}"
        print(line)


if __name__ == "__main__":
    main()
