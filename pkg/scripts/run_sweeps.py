"""Seeded sweep over every registered identity; prints a summary table."""
import argparse
import time

from hyperdual.verify import SamplerConfig, known_identities, sweep

# rank options per identity family; other identities take none
OPTIONS = {
    "sp_elliptic": [{"N": 1, "K": 1, "Nf": 3}, {"N": 1, "K": 1, "Nf": 4}],
    "sp_hyperbolic": [{"N": 1, "K": 1, "Nf": 3}, {"N": 1, "K": 1, "Nf": 4}],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--samples", type=int, default=20)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--only", nargs="*", help="restrict to these identity ids")
    args = ap.parse_args()

    ids = args.only or known_identities()
    print(f"{'identity':<20} {'options':<18} {'pass':>5} {'fail':>5} {'rej':>4} "
          f"{'max rel':>10} {'secs':>7}")
    for ident in ids:
        for opts in OPTIONS.get(ident, [{}]):
            cfg = SamplerConfig(seed=args.seed, n_samples=args.samples, options=opts)
            start = time.perf_counter()
            rep = sweep(ident, cfg, workers=args.workers)
            secs = time.perf_counter() - start
            label = ",".join(f"{k}={v}" for k, v in opts.items()) or "-"
            print(f"{ident:<20} {label:<18} {rep.n_pass:>5} {rep.n_fail:>5} "
                  f"{rep.n_rejected:>4} {rep.max_rel_error:>10.2e} {secs:>7.1f}")


if __name__ == "__main__":
    main()
