"""Compare the numba kernels against the interpreted fallback.

Each backend runs in its own interpreter because the choice is made at
import time (``TREEFREE_DISABLE_NUMBA``).  The numba run does one untimed
pass first so compilation is not counted.

    python benchmarks/bench_kernels.py --radius 2 --repeat 3
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def worker(radius, repeat):
    import numpy as np

    from treefree import _jit
    from treefree import _kernels as K
    from treefree.cli import resolve_presentation
    from treefree.order import enumerate_ball, search_cone

    p = resolve_presentation("gamma.txt")
    rel = K.pack_relations([(s.codes, t.codes) for s, t in p.relations], p.rank)
    mat, lens = K.pack_words([w.codes for w in p.combined.words_up_to(radius)])
    ball = enumerate_ball(p, radius)

    def normal_forms():
        K.normal_forms(mat, lens, p.rank, *rel)

    def tables():
        enumerate_ball(p, radius)

    def cone():
        search_cone(ball, "bi")

    cases = {"normal_forms": normal_forms, "ball_tables": tables, "cone_search": cone}
    if _jit.USE_NUMBA:
        for fn in cases.values():
            fn()
    out = {name: _best(fn, repeat) for name, fn in cases.items()}
    out["backend"] = _jit.backend()
    out["ball_size"] = len(ball)
    out["candidates"] = int(np.asarray(lens).shape[0])
    print(json.dumps(out))


def run_backend(disable, radius, repeat):
    env = dict(os.environ)
    if disable:
        env["TREEFREE_DISABLE_NUMBA"] = "1"
    else:
        env.pop("TREEFREE_DISABLE_NUMBA", None)
    cmd = [sys.executable, __file__, "--worker", "--radius", str(radius), "--repeat", str(repeat)]
    proc = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        worker(args.radius, args.repeat)
        return

    fast = run_backend(False, args.radius, args.repeat)
    slow = run_backend(True, args.radius, args.repeat)
    print(f"Gamma ball radius {args.radius}: {fast['candidates']} candidates, {fast['ball_size']} elements")
    print(f"{'kernel':<14}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for name in ("normal_forms", "ball_tables", "cone_search"):
        a, b = fast[name], slow[name]
        print(f"{name:<14}{a * 1e3:>10.2f}ms{b * 1e3:>10.2f}ms{b / a:>9.1f}x")


if __name__ == "__main__":
    main()
