"""Deviation of the elliptic -> hyperbolic gamma limit as v shrinks.

A fitted slope near 1 in log-log means the deviation is first order in v.
"""
import argparse

import numpy as np

from hyperdual.identities import ModularPair, ReductionScaling, reduction_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--z", type=complex, default=0.4)
    ap.add_argument("--v", type=float, nargs="*",
                    default=[0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625])
    args = ap.parse_args()

    pair = ModularPair(1j, 1)
    devs = [reduction_check(ReductionScaling(v, pair, args.z)) for v in args.v]
    for v, d in zip(args.v, devs):
        print(f"v={v:<9g} deviation={d:.4e}  deviation/v={d / v:.4f}")
    slope = np.polyfit(np.log(args.v), np.log(devs), 1)[0]
    print(f"log-log slope {slope:.3f}")


if __name__ == "__main__":
    main()
