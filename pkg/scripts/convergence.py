"""Mesh refinement study on an exact rarefactive simple wave.

Prints the max z error at t = 1 and the observed order for each halving.
"""

import argparse

import numpy as np
from scipy.optimize import brentq

from shockfree.gas import gas_from_d
from shockfree.mesh import EntropyProfile
from shockfree.moc import InitialData, MocOptions, solve_ibvp
from shockfree.scenarios import smooth_step, smooth_step_prime


def simple_wave(amp, d, centre=0.5):
    # forward wave with r = -1 and z rising smoothly from 1 to 1 + amp
    def z(x):
        return 1.0 + amp * smooth_step(np.asarray(x, dtype=float) - centre)

    def zx(x):
        return amp * smooth_step_prime(np.asarray(x, dtype=float) - centre)

    init = InitialData(0.0, 4.0, lambda x: -1.0 + z(x), lambda x: z(x) ** (d + 1) / (d + 1),
                       zx, lambda x: z(x) ** d * zx(x))
    return init, z


def exact_z(z0, x, t, d):
    # z is constant on forward characteristics x = xi + z0(xi)^d t
    out = np.empty_like(x)
    for i, xv in enumerate(x):
        out[i] = z0(brentq(lambda xi: xi + float(z0(xi)) ** d * t - xv, xv - 10.0, xv + 1.0, xtol=1e-15))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--amp", type=float, default=0.4)
    ap.add_argument("--d", type=float, default=2.0)
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--h0", type=float, default=0.04)
    args = ap.parse_args()
    init, z0 = simple_wave(args.amp, args.d)
    gas = gas_from_d(args.d)
    prev = None
    print(f"{'h':>8} {'error':>12} {'ratio':>7} {'order':>6} {'status'}")
    for k in range(args.levels):
        h = args.h0 / 2**k
        out = solve_ibvp(init, EntropyProfile.constant(1.0), 1.0, gas, MocOptions(h=h, n_tracks=0))
        sn = out.mesh.snapshots[-1]
        sel = (sn.x > 0.3) & (sn.x < 3.7)
        err = float(np.max(np.abs(sn.z[sel] - exact_z(z0, sn.x[sel], sn.t, args.d))))
        ratio = prev / err if prev else float("nan")
        print(f"{h:8.4f} {err:12.4e} {ratio:7.2f} {np.log2(ratio):6.2f} {out.status}")
        prev = err


if __name__ == "__main__":
    main()
