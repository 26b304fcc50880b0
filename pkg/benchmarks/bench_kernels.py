"""Time the compiled and pure-Python form-enumeration kernels on the same counts.

    python benchmarks/bench_kernels.py [--repeat N] [--quick]
"""
import argparse
import time

from toricount import kernels
from toricount.fan import library_fan
from toricount.ffcount import raw_form_count

CASES = [
    ("p1", 5, (3, 3), None),
    ("p1", 3, (4, 4), (2, 2)),
    ("p2", 2, (3, 3, 3), None),
    ("p2", 3, (2, 2, 2), None),
    ("p1xp1", 3, (1, 1, 2, 2), None),
    ("f1", 2, (2, 1, 2, 3), None),
    ("p2", 3, (3, 3, 3), None),
]


def best_time(fn, repeat):
    best, value = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return best, value


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the largest case")
    args = ap.parse_args(argv)
    if not kernels.HAVE_COMPILED:
        print("compiled kernel not built; run: python setup.py build_ext --inplace")
        return 1
    cases = CASES[:-1] if args.quick else CASES
    print(f"{'fan':<7} {'q':>2} {'d':<10} {'m':<6} {'count':>10} {'python s':>9} "
          f"{'cython s':>9} {'speedup':>8}")
    for name, q, d, m in cases:
        fan = library_fan(name)
        tp, vp = best_time(lambda: raw_form_count(fan, q, d, m, backend="python"), args.repeat)
        tc, vc = best_time(lambda: raw_form_count(fan, q, d, m, backend="cython"), args.repeat)
        if vp != vc:
            raise SystemExit(f"backends disagree on {name} q={q} d={d}: {vp} != {vc}")
        ds = ",".join(map(str, d))
        ms = "1" if m is None else ",".join(map(str, m))
        print(f"{name:<7} {q:>2} {ds:<10} {ms:<6} {vc:>10} {tp:>9.3f} {tc:>9.4f} {tp / tc:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
