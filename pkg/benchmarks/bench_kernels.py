"""Compare the numba and numpy trial kernels.

    python benchmarks/bench_kernels.py --trials 1000000 --repeat 5

Reports the best-of-N wall time per kernel and backend, and checks that the
two backends produced the same counts.
"""

import argparse
import math
import time

import numpy as np

from bellspace import kernels
from bellspace.models import BellSphereModel, MixtureModel, SingletSampler
from bellspace.probability_space import seed_key, uniform_settings


def cases():
    cum = uniform_settings().cumulative()
    mix = MixtureModel((((1, 1, 1, 1), "1/2"), ((1, -1, 1, -1), "1/3"), ((-1, 1, 1, 1), "1/6")))
    signs = np.array([s.signs for s in mix.strategies], dtype=np.int8)
    singlet = SingletSampler(0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4)
    sphere = BellSphereModel.planar(0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4)
    return {
        "mixture": ("strategy_trials", (cum, mix._cumulative(), signs)),
        "singlet": ("singlet_trials", (cum, singlet.cos_table())),
        "sphere": ("sphere_trials", (cum, sphere.vectors)),
    }


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    key = np.uint64(seed_key(args.seed))
    backends = {name: kernels.backend(name) for name in kernels.BACKENDS}
    print(f"{'kernel':<10}{'backend':<8}{'seconds':>10}{'Mtrials/s':>12}")
    for label, (fname, extra) in cases().items():
        counts = {}
        for name, mod in backends.items():
            fn = getattr(mod, fname)
            # first call compiles under numba
            mod.accumulate(*fn(key, 0, 1000, *extra))

            def go():
                return mod.accumulate(*fn(key, 0, args.trials, *extra))

            secs, (n, s) = best_of(go, args.repeat)
            counts[name] = (tuple(n), tuple(s))
            print(f"{label:<10}{name:<8}{secs:>10.4f}{args.trials / secs / 1e6:>12.1f}")
        same = len(set(counts.values())) == 1
        print(f"{'':<10}{'counts identical across backends: ' + str(same)}")


if __name__ == "__main__":
    main()
