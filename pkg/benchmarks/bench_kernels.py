"""Compare the numba kernels with their numpy twins.

Each backend runs in its own interpreter because the choice is fixed at
import time by ``TORELLI_DISABLE_NUMBA``.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from torelli import _kernels as K
from torelli.charvar import TORUS, get_surface, relation_k
from torelli.poisson import ham_field
from torelli.su2dyn import sample_rep, trace_coords, walk

repeat = int(sys.argv[1])
c = (0.3, -1.1)
field = K.PolySystem(ham_field(TORUS, get_surface(TORUS).trace_functions["p0"]).comps)
k = K.PolySystem([relation_k()])
X = np.array([trace_coords(sample_rep(TORUS, c, seed=i)) for i in range(100)])
r0 = sample_rep(TORUS, c, seed=0)
cases = {
    "eval k, 10^5 points": lambda: k(np.random.default_rng(0).uniform(-2, 2, (100_000, 7))),
    "rk4 H(p0), 100 starts x 1000 steps": lambda: K.rk4(field, X, 1e-3, 1000),
    "torus walk, 10^5 steps": lambda: walk(TORUS, r0, steps=100_000, seed=1),
}
for fn in cases.values():
    fn()  # compile and warm caches
out = {}
for name, fn in cases.items():
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out[name] = best
print(json.dumps({"backend": K.BACKEND, "seconds": out}))
"""


def run(disable, repeat):
    env = dict(os.environ)
    env.pop("TORELLI_DISABLE_NUMBA", None)
    if disable:
        env["TORELLI_DISABLE_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    width = max(map(len, fast["seconds"]))
    print(f"{'kernel':<{width}}  {fast['backend']:>10}  {slow['backend']:>10}  speedup")
    for name, t in fast["seconds"].items():
        u = slow["seconds"][name]
        print(f"{name:<{width}}  {t:>9.4f}s  {u:>9.4f}s  {u / t:6.1f}x")


if __name__ == "__main__":
    main()
