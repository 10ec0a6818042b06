"""Time Hamiltonian assembly with the compiled scatter kernel against the numpy fallback.

    python benchmarks/bench_assembly.py [--repeat N]

``kernel`` times only the scatter calls into a preallocated matrix;
``build`` is the full ``build_hamiltonian`` call, which also pays for
allocating and freezing the dense result.
"""

import argparse
import time

import numpy as np

from dysonize import kernels
from dysonize.algebra import DoubledSpin
from dysonize.lattice import square_cluster
from dysonize.models import HamiltonianSpec, build_hamiltonian, hamiltonian_terms

CASES = [
    ("heisenberg_FM", "mapped_substituted", 2, (3, 2, "open")),
    ("heisenberg_AFM", "mapped_transcribed", 1, (4, 3, "open")),
    ("tJ_ferro", "mapped_substituted", 2, (2, 2, "periodic")),
    ("tJ_AF", "spin", 1, (3, 2, "open")),
]


def best_of(fn, repeat, setup=lambda: None):
    times = []
    for _ in range(repeat):
        setup()
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def scatter_plan(spec, c):
    terms, ctx = hamiltonian_terms(spec, c)
    plan = []
    for t in terms:
        merged = {}
        for site, op in t.factors:
            merged[site] = merged[site] @ op.entries if site in merged else op.entries
        plan.append((list(merged), [np.ascontiguousarray(m) for m in merged.values()], t.coeff))
    return plan, np.asarray(ctx.site_dims, dtype=np.int64)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    backends = sorted(kernels.BACKENDS)
    if "compiled" not in backends:
        print("compiled extension not built; only the numpy fallback is available")
    cols = [f"{k} {b}" for k in ("kernel", "build") for b in backends]
    print(f"{'model':<16}{'repr':<20}{'dim':>6}" + "".join(f"{c + ' [ms]':>22}" for c in cols) + f"{'kernel speedup':>16}")
    for model, rep, two_s, shape in CASES:
        spec = HamiltonianSpec(model, rep, 1.0, 0.4, DoubledSpin(two_s))
        c = square_cluster(*shape)
        plan, dims = scatter_plan(spec, c)
        dim = int(np.prod(dims))
        H = np.zeros((dim, dim), dtype=complex)
        kernel, build, mats = {}, {}, {}
        for b in backends:
            def scatter(b=b):
                for sites, ms, coeff in plan:
                    kernels.accumulate(H, dims, sites, ms, coeff, backend=b)
            kernel[b] = best_of(scatter, args.repeat, setup=lambda: H.fill(0))
            mats[b] = H.copy()
            build[b] = best_of(lambda b=b: build_hamiltonian(spec, c, backend=b), args.repeat)
        ref = next(iter(mats.values()))
        assert all(np.allclose(ref, m) for m in mats.values())
        speed = kernel["python"] / kernel["compiled"] if "compiled" in kernel else float("nan")
        timings = [kernel[b] for b in backends] + [build[b] for b in backends]
        print(f"{model:<16}{rep:<20}{dim:>6}" + "".join(f"{1e3 * t:>22.2f}" for t in timings) + f"{speed:>15.1f}x")


if __name__ == "__main__":
    main()
