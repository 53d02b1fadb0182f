"""Compare the compiled and pure-Python kernels.

Run from the repository root after an editable install:

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel is timed on a workload typical of the package (Jacobi functions
along an orbit, full spectra of a Wang block, Sturm counts during
bisection). Results from both backends are checked against each other
before timing.
"""

import argparse
import math
import sys
import timeit

import numpy as np

from toprot import _pykernels
from toprot.classical import get_molecule
from toprot.quantum_spectrum import build_blocks

try:
    from toprot import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None


def _workloads(k, block):
    diag = list(block.diagonal)
    off = list(block.offdiagonal)
    us = np.linspace(-8.0, 8.0, 2000).tolist()
    ms = np.linspace(0.0, 0.999, 200).tolist()
    mid = 0.5 * (min(diag) + max(diag))
    return {
        "ellipk x200": lambda: [k.ellipk(m) for m in ms],
        "ellipj x2000": lambda: [k.ellipj(u, 0.87) for u in us],
        f"tridiag eig n={len(diag)}": lambda: k.tridiag_eigenvalues(diag, off),
        "sturm count x200": lambda: [k.sturm_count(diag, off, mid + 0.01 * i) for i in range(200)],
    }


def _agree(block):
    diag, off = list(block.diagonal), list(block.offdiagonal)
    a = np.array(_pykernels.tridiag_eigenvalues(diag, off))
    b = np.array(_ckernels.tridiag_eigenvalues(diag, off))
    scale = np.max(np.abs(a))
    assert np.max(np.abs(a - b)) <= 1e-12 * scale, "eigenvalues differ between backends"
    for u in (-3.0, 0.4, 7.5):
        pj, cj = _pykernels.ellipj(u, 0.87), _ckernels.ellipj(u, 0.87)
        assert max(abs(x - y) for x, y in zip(pj, cj)) <= 1e-14
    assert math.isclose(_pykernels.ellipk(0.9), _ckernels.ellipk(0.9), rel_tol=1e-15)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--j", type=int, default=200, help="angular momentum of the benchmark block")
    args = parser.parse_args(argv)

    block = build_blocks(get_molecule("water"), args.j, 1.0)["E+"]
    if _ckernels is None:
        print("compiled kernels not built; only the pure-Python timings are shown")
    else:
        _agree(block)

    print(f"{'kernel':<22}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    py = _workloads(_pykernels, block)
    cy = _workloads(_ckernels, block) if _ckernels is not None else {}
    for name, fn in py.items():
        t_py = min(timeit.repeat(fn, number=1, repeat=args.repeat)) * 1e3
        if name in cy:
            t_cy = min(timeit.repeat(cy[name], number=1, repeat=args.repeat)) * 1e3
            print(f"{name:<22}{t_py:>14.3f}{t_cy:>14.3f}{t_py / t_cy:>9.1f}x")
        else:
            print(f"{name:<22}{t_py:>14.3f}{'-':>14}{'-':>10}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
