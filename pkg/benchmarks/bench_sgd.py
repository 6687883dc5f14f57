"""Time the compiled and pure-Python SGD kernels on a featurized corpus.

    python benchmarks/bench_sgd.py [--tweets 4000] [--passes 20] [--repeat 3]
"""

import argparse
import time

import numpy as np

from offlang import linear
from offlang.linear._backend import KERNELS
from offlang.pipeline import Pipeline, default_config
from offlang.synthetic import generate_corpus

LEXICON = ("fuck", "shit", "ass", "bitch", "crap", "damn", "wtf", "suck")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tweets", type=int, default=4000)
    ap.add_argument("--passes", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    data = generate_corpus(args.tweets, LEXICON, seed=0)
    pipe = Pipeline(default_config())
    X = pipe._features(data.texts, fit=True)
    hp = linear.Hyperparams(max_iter=args.passes)
    print(f"{X.shape[0]} rows, {X.shape[1]} columns, {X.nnz} non-zeros, {args.passes} passes")

    timings, weights = {}, {}
    for name in ("cython", "python"):
        if name not in KERNELS:
            print(f"{name:>7}: not available")
            continue
        best = float("inf")
        for _ in range(args.repeat):
            start = time.perf_counter()
            model = linear.fit(X, data.labels, hp, backend=name)
            best = min(best, time.perf_counter() - start)
        timings[name], weights[name] = best, model.weights
        print(f"{name:>7}: {best:8.3f}s  ({best / args.passes * 1e3:.1f} ms/pass)")

    if len(timings) == 2:
        diff = float(np.max(np.abs(weights["cython"] - weights["python"])))
        print(f"speedup {timings['python'] / timings['cython']:.1f}x, max |weight diff| {diff:.1e}")


if __name__ == "__main__":
    main()
