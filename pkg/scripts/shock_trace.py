"""Shock with a stationary state behind it, x(a) = nu log(a - 1).

Prints the jump-relation residual, the range of t(a), the gradient size on
the isentropic side and the logarithmic spread against its lower bound.
"""

import argparse

import numpy as np

from shockfree.gas import gas_from_d
from shockfree.scenarios import log_divergence_check, trace_single_shock


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nu", type=float, default=0.5)
    ap.add_argument("--bound", type=float, default=50.0)
    ap.add_argument("--eps", type=float, default=1e-4)
    args = ap.parse_args()
    nu = args.nu
    for d in (2.0, 3.0, 4.0):
        for family in ("forward", "backward"):
            tr = trace_single_shock(lambda a: nu * np.log(np.asarray(a) - 1.0), (1.0 + args.eps, 1.5), 0.0,
                                    1.0, 1.0, family, gas_from_d(d),
                                    dx_da=lambda a: nu / (np.asarray(a) - 1.0), n=201,
                                    focusing_bound=args.bound)
            lhs, rhs, rate, ok = log_divergence_check(tr, 0.5, args.eps, bound=args.bound)
            grad = max(np.max(np.abs(tr.r_x)), np.max(np.abs(tr.s_x)))
            print(f"d={d:g} {family:8s} rh {tr.rh_max:.1e}  t in [{tr.t.min():+.3f}, {tr.t.max():+.3f}]"
                  f"  max|grad| {grad:.3f}  spread {lhs:.3f} >= {rhs:.3f} ({'ok' if ok else 'FAILS'})")


if __name__ == "__main__":
    main()
