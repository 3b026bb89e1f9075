"""Compare the compiled and pure-Python DP kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--length 120]
"""

from __future__ import annotations

import argparse
import random
import timeit

from semqa import _kernels_py

try:
    from semqa import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def workload(rng: random.Random, length: int, pairs: int):
    vocab = [f"w{i}" for i in range(200)]
    tokens = [([rng.choice(vocab) for _ in range(length)], [rng.choice(vocab) for _ in range(length)])
              for _ in range(pairs)]
    letters = "abcdefghij"
    strings = [("".join(rng.choices(letters, k=length // 2)), "".join(rng.choices(letters, k=length // 2)))
               for _ in range(pairs)]
    return tokens, strings


def bench(module, tokens, strings, repeat: int) -> dict[str, float]:
    lcs = min(timeit.repeat(lambda: [module.lcs_length(a, b) for a, b in tokens], number=1, repeat=repeat))
    lev = min(timeit.repeat(lambda: [module.levenshtein(a, b) for a, b in strings], number=1, repeat=repeat))
    return {"lcs_length": lcs, "levenshtein": lev}


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--length", type=int, default=120, help="tokens per LCS input")
    parser.add_argument("--pairs", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    tokens, strings = workload(random.Random(args.seed), args.length, args.pairs)
    py = bench(_kernels_py, tokens, strings, args.repeat)
    print(f"{args.pairs} pairs, LCS length {args.length}, edit-distance length {args.length // 2}")
    if _kernels_c is None:
        print("compiled kernels not built; python timings only")
        for name, t in py.items():
            print(f"{name:12s} python {t * 1e3:9.2f} ms")
        return
    for a, b in tokens[:20]:
        assert _kernels_c.lcs_length(a, b) == _kernels_py.lcs_length(a, b)
    c = bench(_kernels_c, tokens, strings, args.repeat)
    for name in py:
        print(f"{name:12s} python {py[name] * 1e3:9.2f} ms   cython {c[name] * 1e3:8.2f} ms   "
              f"speedup {py[name] / c[name]:6.1f}x")


if __name__ == "__main__":
    main()
