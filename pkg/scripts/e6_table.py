"""Exact t-expansion of the E6 index next to the numerical integral."""
import argparse

from hyperdual.identities import e6_index_numeric
from hyperdual.series import expand_e6


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=8)
    ap.add_argument("--t", type=float, nargs="*", default=[0.05, 0.1, 0.15])
    args = ap.parse_args()

    series = expand_e6(args.order)
    print(series.to_text())
    print()
    print(f"{'t_deg':>5} {'y_deg':>5}  coefficient")
    for rec in series.to_records():
        print(f"{rec['t_degree']:>5} {rec['y_degree']:>5}  "
              f"{rec['numerator']}/{rec['denominator']}")
    print()
    print(f"{'t':>6} {'numeric':>22} {'series':>22} {'diff':>10}")
    for t in args.t:
        num = e6_index_numeric(t).real
        ser = float(complex(series.evaluate(t=t, y=1.0)).real)
        print(f"{t:>6} {num:>22.16f} {ser:>22.16f} {abs(num - ser):>10.2e}")


if __name__ == "__main__":
    main()
