"""Compare the compiled and pure-Python kernels on the two hot paths.

Both backends are exercised on the Monte Carlo protocol simulator and the
exhaustive protocol search, with identical inputs; results are checked for
bitwise agreement before timings are reported, so a reported speedup is
never bought with a numerical divergence.

Usage:
    python3 benchmarks/benchmark_backends.py [--trials N] [--sim-n N]
                                             [--search-n N] [--repeat K]
"""

import argparse
import time

from tandembit import (
    RelayStrategy,
    available_backends,
    bsc,
    optimal_protocol,
    simulate,
)

PAIR = (bsc(0.1), bsc(0.2))


def best_of(repeat, fn):
    best = float("inf")
    value = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return best, value


def bench_simulate(backend, n, trials, repeat):
    p, q = PAIR
    return best_of(
        repeat,
        lambda: simulate(
            p, q, n, RelayStrategy.best_guess(), trials=trials, seed=0, backend=backend
        ),
    )


def bench_search(backend, n, repeat):
    p, q = PAIR
    return best_of(repeat, lambda: optimal_protocol(p, q, n, backend=backend))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100_000, help="simulator trials")
    ap.add_argument("--sim-n", type=int, default=40, help="simulator blocklength")
    ap.add_argument("--search-n", type=int, default=3, help="search blocklength")
    ap.add_argument("--repeat", type=int, default=2, help="best-of repetitions")
    args = ap.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled backend not built; timing the python backend alone")

    rows = []
    sim_results = {}
    for backend in backends:
        t, r = bench_simulate(backend, args.sim_n, args.trials, args.repeat)
        sim_results[backend] = (r.err0, r.err1)
        rows.append((f"simulate n={args.sim_n} trials={args.trials}", backend, t,
                     args.trials / t))
    search_results = {}
    for backend in backends:
        t, (pt, table) = bench_search(backend, args.search_n, args.repeat)
        search_results[backend] = (pt.relay_int(), table.pe0, table.pe1)
        rows.append((f"search n={args.search_n}", backend, t, None))

    for results, label in ((sim_results, "simulate"), (search_results, "search")):
        if len(set(results.values())) > 1:
            print(f"BACKEND MISMATCH on {label}: {results}")
            return 1

    width = max(len(r[0]) for r in rows)
    print(f"{'task':<{width}}  {'backend':<9} {'seconds':>9}  throughput")
    for task, backend, t, rate in rows:
        extra = f"{rate:,.0f} trials/s" if rate else ""
        print(f"{task:<{width}}  {backend:<9} {t:>9.3f}  {extra}")
    if "compiled" in backends and "python" in backends:
        for task in dict.fromkeys(r[0] for r in rows):
            times = {b: t for (tk, b, t, _) in rows if tk == task}
            print(f"{task}: compiled is x{times['python'] / times['compiled']:.2f} "
                  f"faster than python")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
