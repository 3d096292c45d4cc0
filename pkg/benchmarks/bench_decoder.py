"""Benchmark the belief-propagation kernel: compiled (numba) vs pure numpy.

Both paths share the same flattened-graph interface, so the comparison times
identical work. Run as:

    python benchmarks/bench_decoder.py [--decodes 200] [--iters 5]
"""

import argparse
import time

import numpy as np

from rafharq import bpdec, kernels, ldpc, phy
from rafharq.galois import GaloisField


def make_inputs(n, seed=0):
    code = ldpc.construct_mother_code(1, 15, 5, GaloisField(256))
    graph = bpdec.TannerGraph(code)
    mod = phy.Modulation(256, 256)
    sigma2 = phy.snr_to_sigma2(6.0)
    rng = np.random.default_rng(seed)
    batches = []
    for _ in range(n):
        c = ldpc.encode(code, rng.integers(0, 2, size=40))
        y, beta = phy.apply_channel(mod.map_symbols(c), "awgn", sigma2, rng)
        batches.append(np.ascontiguousarray(mod.demodulate(y, beta, sigma2)))
    return graph, batches


def run(core, graph, batches, iters):
    start = time.perf_counter()
    for intr in batches:
        core(intr, graph.edge_var, graph.check_ptr, graph.var_ptr,
             graph.var_edges, graph.perm_vc, graph.perm_cv, iters)
    return (time.perf_counter() - start) / len(batches)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--decodes", type=int, default=200)
    parser.add_argument("--iters", type=int, default=5)
    args = parser.parse_args()

    graph, batches = make_inputs(args.decodes)

    t_np = run(kernels.bp_core_np, graph, batches, args.iters)
    print(f"numpy kernel:  {1e3 * t_np:7.3f} ms/decode")

    if kernels.HAVE_NUMBA:
        run(kernels.bp_core_nb, graph, batches[:2], args.iters)  # JIT warm-up
        t_nb = run(kernels.bp_core_nb, graph, batches, args.iters)
        print(f"numba kernel:  {1e3 * t_nb:7.3f} ms/decode")
        print(f"speedup:       {t_np / t_nb:7.2f}x")
    else:
        print("numba kernel:  unavailable (package not installed)")

    # spot parity check so the benchmark never compares diverging kernels
    if kernels.HAVE_NUMBA:
        a = kernels.bp_core_np(batches[0], graph.edge_var, graph.check_ptr,
                               graph.var_ptr, graph.var_edges, graph.perm_vc,
                               graph.perm_cv, args.iters)
        b = kernels.bp_core_nb(batches[0], graph.edge_var, graph.check_ptr,
                               graph.var_ptr, graph.var_edges, graph.perm_vc,
                               graph.perm_cv, args.iters)
        assert np.allclose(a[0], b[0], atol=1e-10) and a[2] == b[2]
        print("parity:        posteriors match to 1e-10")


if __name__ == "__main__":
    main()
