#!/usr/bin/env python3
"""Compare the pure-Python and compiled elimination kernels end to end.

Each task builds graded bases from scratch in a fresh subprocess with the
backend pinned through TAUTRING_KERNEL, so the numbers include the full
streaming-elimination path (monomial enumeration, product keys, fraction-free
row reduction).  Run from the repository root:

    python3 benchmarks/bench_kernel.py [--heavy]

The default workload finishes in well under a minute per backend; --heavy
adds the six-point power ring, which is substantial for the pure backend.
"""

import argparse
import json
import os
import subprocess
import sys

TASKS = {
    "xn4-full-check": (
        "from tautring.algebra import ring_for\n"
        "from tautring.xn import xn_presentation\n"
        "ring_for(xn_presentation(4)).gorenstein_check()\n"
    ),
    "xn5-bases": (
        "from tautring.algebra import ring_for\n"
        "from tautring.xn import xn_presentation\n"
        "ring_for(xn_presentation(5)).hilbert(5)\n"
    ),
    "fm4-full-check": (
        "from tautring.algebra import ring_for\n"
        "from tautring.fm import fm_presentation\n"
        "ring_for(fm_presentation(4)).gorenstein_check()\n"
    ),
}

HEAVY_TASKS = {
    "xn6-bases": (
        "from tautring.algebra import ring_for\n"
        "from tautring.xn import xn_presentation\n"
        "ring_for(xn_presentation(6)).hilbert(6)\n"
    ),
}


def run_task(backend, body):
    script = (
        "import time\n"
        "t0 = time.perf_counter()\n"
        + body
        + "print(time.perf_counter() - t0)\n"
    )
    env = dict(os.environ, TAUTRING_KERNEL=backend)
    out = subprocess.run(
        [sys.executable, "-c", script],
        env=env, capture_output=True, text=True, check=True,
    )
    return float(out.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--heavy", action="store_true",
                        help="include the six-point power ring")
    parser.add_argument("--json", action="store_true", help="machine output")
    args = parser.parse_args()

    tasks = dict(TASKS)
    if args.heavy:
        tasks.update(HEAVY_TASKS)

    results = {}
    for name, body in tasks.items():
        times = {}
        for backend in ("pure", "compiled"):
            try:
                times[backend] = run_task(backend, body)
            except subprocess.CalledProcessError as exc:
                sys.stderr.write(f"{name} [{backend}] failed:\n{exc.stderr}\n")
                times[backend] = None
        results[name] = times

    if args.json:
        print(json.dumps(results, indent=2))
        return

    width = max(len(name) for name in results)
    print(f"{'task':<{width}}  {'pure':>9}  {'compiled':>9}  {'speedup':>8}")
    for name, times in results.items():
        pure, fast = times["pure"], times["compiled"]
        if pure is None or fast is None:
            print(f"{name:<{width}}  {'error':>9}")
            continue
        print(f"{name:<{width}}  {pure:>8.2f}s  {fast:>8.2f}s  {pure / fast:>7.1f}x")


if __name__ == "__main__":
    main()
