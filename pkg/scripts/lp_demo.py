"""Solve one random LP every way the package offers and print what each costs."""

import argparse

import numpy as np

from distlearn.opt import (
    LinearProgram,
    count_violations,
    lp_binary_search,
    multipass_lp_violate,
    mwu_lp_solve,
    simplex_solve,
    two_party_lp,
)


def random_feasible_lp(n: int, d: int, seed: int) -> LinearProgram:
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(0.2, 0.8, d)
    A = rng.uniform(-1, 1, (n, d))
    b = A @ x0 - rng.uniform(0, 0.5, n)
    return LinearProgram(A, b, rng.normal(size=d), 0.0, 1.0)


def run(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=40)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--epsilon", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    lp = random_feasible_lp(args.n, args.d, args.seed)

    exact = simplex_solve(lp)
    print(f"simplex        z* = {exact.objective:.9f}  ({exact.pivots} pivots)")

    res = mwu_lp_solve(lp, exact.objective, args.epsilon)
    print(f"mwu            min slack {res.min_slack:+.4f} after {res.iterations} iterations")

    half = args.n // 2
    a_party = LinearProgram(lp.A[:half], lp.b[:half], lp.g, lp.lo, lp.hi)
    two, net = two_party_lp(a_party, lp.A[half:], lp.b[half:], exact.objective, args.epsilon)
    print(f"two-party      min slack {np.min(lp.slacks(two.x)):+.4f}, {net.ledger.total_words} words")

    search = lp_binary_search(lp, args.epsilon, tol=1e-3)
    print(f"binary search  z = {search.z:.6f} after {search.probes} probes")

    stream = multipass_lp_violate(lp.A, lp.b, 0.05, seed=args.seed, players=3, g=lp.g, lo=lp.lo, hi=lp.hi)
    print(f"streaming      {count_violations(stream.x, lp.A, lp.b)} of {lp.n} rows violated, "
          f"{stream.passes} passes, {stream.ledger.total_words} words")
    return 0


if __name__ == "__main__":
    raise SystemExit(run())
