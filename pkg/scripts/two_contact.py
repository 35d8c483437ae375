"""Certified shock-free data between two 3-contacts, then simulated.

Reports the certificate, the most negative gradient relative to the
gradient scale, the noninteraction times and the R/C checker result.
"""

import argparse

from shockfree.gas import gas_from_d
from shockfree.gradients import check_global_rc
from shockfree.moc import MocOptions, detect_noninteracting, interaction_boundary_is_forward, solve_ibvp
from shockfree.scenarios import HypothesisViolation, SmoothZ, construct_shockfree_two_contacts


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=float, default=2.0)
    ap.add_argument("--Q", type=float, default=1.1)
    ap.add_argument("--drop", type=float, default=0.03, help="Z(0) - Z(T)")
    ap.add_argument("--length-factor", type=float, default=1.05)
    ap.add_argument("--h", type=float, default=0.01)
    ap.add_argument("--horizon", type=float, default=20.0)
    ap.add_argument("--quiet", type=float, default=1e-4)
    args = ap.parse_args()
    d, Q, T = args.d, args.Q, 1.0
    gas = gas_from_d(d)
    L = args.length_factor * Q ** ((d + 1) / (d - 1)) * T
    try:
        con = construct_shockfree_two_contacts(Q, Q, 0.0, L, T, SmoothZ(1.0, 1.0 - args.drop, T), gas,
                                               n_grid=1200)
    except HypothesisViolation as exc:
        print("rejected:", exc)
        for c in exc.certificate.checks:
            print(f"  {'ok ' if c.ok else 'BAD'} {c.name:40s} margin {c.margin:+.3e}")
        return
    for c in con.certificate.checks:
        print(f"  {'ok ' if c.ok else 'BAD'} {c.name:40s} margin {c.margin:+.3e}")
    print(f"X* = {con.X_star:.4f}  T* = {con.T_star:.4f}")
    out = solve_ibvp(con.initial, con.profile, args.horizon, gas, MocOptions(h=args.h, n_tracks=24))
    mesh = out.mesh
    low = min(min(sn.alpha.min(), sn.beta.min()) for sn in mesh.snapshots) / mesh.grad_scale
    ni = detect_noninteracting(mesh, args.quiet)
    print(f"status {out.status}, min gradient / scale {low:.2e}")
    if ni is not None:
        fwd, _ = interaction_boundary_is_forward(mesh, ni)
        print(f"quiet after t = {[round(t, 3) for t in ni.T_jumps]}, forward boundary {fwd}")
    print(f"R/C violations: {len(check_global_rc(mesh, args.quiet))}")


if __name__ == "__main__":
    main()
