"""Single 3-contact with a backward rarefaction: verdict versus simulation.

For each (d, Q) and each ratio z_inf / z_star the far-field classifier is
compared with the solver status; in the vacuum cases the leftmost stalled
backward characteristic is compared with the threshold x*.
"""

import argparse
import itertools
import time

from shockfree.gas import gas_from_d
from shockfree.moc import MocOptions, solve_ibvp
from shockfree.scenarios import SingleContactSetup, classify_single_contact


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ratios", type=float, nargs="+", default=[0.3, 0.6, 0.85, 1.25, 1.6])
    ap.add_argument("--horizon-factor", type=float, default=60.0,
                    help="horizon in far-field crossing times of the rarefaction width")
    ap.add_argument("--cap", type=float, default=30000.0)
    ap.add_argument("--h", type=float, default=0.02)
    args = ap.parse_args()
    cases = [(2.0, 2.0), (3.0, 3.0), (2.0, 3.0), (3.0, 1.5)]
    print(f"{'d':>3} {'Q':>4} {'ratio':>5} {'horizon':>8} {'verdict':>26} {'simulated':>26} "
          f"{'x*':>7} {'min stall':>9} {'sec':>5}")
    for (d, Q), ratio in itertools.product(cases, args.ratios):
        gas = gas_from_d(d)
        st = SingleContactSetup(d, Q, ratio * (Q - 1) / (2 * Q))
        init = st.initial_data(-1.0, 1.5)
        verdict = classify_single_contact(init, st.profile, gas)
        H = min(args.horizon_factor * st.width / (st.m_r * st.z_inf**d), args.cap)
        t0 = time.perf_counter()
        out = solve_ibvp(init, st.profile, H, gas,
                         MocOptions(h=args.h, block_h=(2 * args.h, args.h), n_tracks=24))
        stall = None
        if out.vacuum is not None:
            starts = [s.x_start for s in out.vacuum.stalled if s.family == "backward"]
            stall = min(starts) if starts else None
        xs = st.x_star()
        print(f"{d:3g} {Q:4g} {ratio:5.2f} {H:8.0f} {verdict.kind:>26} {out.status:>26} "
              f"{'-' if xs is None else f'{xs:.4f}':>7} {'-' if stall is None else f'{stall:.4f}':>9} "
              f"{time.perf_counter() - t0:5.1f}")


if __name__ == "__main__":
    main()
