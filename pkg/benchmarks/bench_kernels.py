"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best-of-N time per call for each backend
and the speedup.  Both backends are run on identical inputs and their outputs
are compared before timing.
"""
import argparse
import timeit

import numpy as np

from dykstra_msf import _pykernels
from dykstra_msf.kernels import available_backends


def _cases(rng):
    a = np.abs(rng.standard_normal(8)) + 0.5
    u = rng.standard_normal(12)
    M = rng.standard_normal((20, 20))
    S = M + M.T
    G = rng.standard_normal((10, 5))
    h = rng.uniform(0.1, 1.0, 10)
    v = 3.0 * rng.standard_normal(5)
    return {
        "pball_project_unit(n=8, p=1.5)": lambda k: k.pball_project_unit(a, 1.5),
        "soc_project(n=12)": lambda k: k.soc_project(u),
        "jacobi_eigvalsh(20x20)": lambda k: k.jacobi_eigvalsh(S),
        "activeset_solve(J=10, n=5)": lambda k: k.activeset_solve(G, h, v),
    }


def _first_array(out):
    return np.atleast_1d(np.asarray(out[0] if isinstance(out, tuple) else out, dtype=float))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels are not built; only the numpy fallback is available")
    py = _pykernels
    cy = backends.get("cython")
    for name, call in _cases(np.random.default_rng(args.seed)).items():
        ref = call(py)
        t_py = min(timeit.repeat(lambda: call(py), number=20, repeat=args.repeat)) / 20
        if cy is None:
            print(f"{name:34s} python {t_py * 1e6:9.1f} us")
            continue
        diff = float(np.max(np.abs(_first_array(call(cy)) - _first_array(ref))))
        t_cy = min(timeit.repeat(lambda: call(cy), number=20, repeat=args.repeat)) / 20
        print(f"{name:34s} python {t_py * 1e6:9.1f} us  cython {t_cy * 1e6:8.1f} us  "
              f"speedup {t_py / t_cy:6.1f}x  max diff {diff:.1e}")


if __name__ == "__main__":
    main()
