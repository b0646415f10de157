#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two hot operations of every solve (stiffness matvec / quadratic
form and the max-shifted exponential reduction) on the default mesh, plus a
full energy+gradient evaluation through whichever backend is active.  Run
the end-to-end comparison by setting the env var, e.g.

    DISKCURV_BACKEND=numpy python benchmarks/bench_kernels.py
    DISKCURV_BACKEND=numba python benchmarks/bench_kernels.py
"""

import argparse
import time

import numpy as np

from diskcurv import kernels
from diskcurv.energy import energy_at_optimal_rho, grad_u, rho_stationary
from diskcurv.mesh import build_mesh


def timeit(fn, repeat):
    fn()  # warm-up (JIT compile on the numba path)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-radial", type=int, default=48)
    ap.add_argument("--n-angular", type=int, default=192)
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()

    mesh = build_mesh(args.n_radial, args.n_angular)
    rng = np.random.default_rng(0)
    u = rng.normal(0.0, 0.5, mesh.n_nodes)
    K = np.ones(mesh.n_nodes)
    h = np.ones(mesh.n_angular)
    S = mesh.stiffness.matrix
    data, indices, indptr = S.data, S.indices, S.indptr
    w = mesh.interior_weights

    print(f"mesh {args.n_radial}x{args.n_angular}: {mesh.n_nodes} nodes, "
          f"{S.nnz} stiffness nonzeros; active backend: {kernels.ACTIVE_BACKEND}")

    rows = []
    t_np = timeit(lambda: kernels.csr_matvec_numpy(data, indices, indptr, u),
                  args.repeat)
    t_sp = timeit(lambda: S @ u, args.repeat)
    rows.append(("csr_matvec", t_np, t_sp, "scipy"))
    t_np = timeit(lambda: kernels.exp_weighted_numpy(w, K, u, 1.0), args.repeat)
    rows.append(("exp_weighted", t_np, None, None))

    if kernels.ACTIVE_BACKEND == "numba":
        t_nb = timeit(lambda: kernels.csr_matvec_numba(data, indices, indptr, u),
                      args.repeat)
        rows[0] = ("csr_matvec", rows[0][1], t_nb, "numba")
        t_nb = timeit(lambda: kernels.exp_weighted_numba(w, K, u, 1.0),
                      args.repeat)
        rows[1] = ("exp_weighted", rows[1][1], t_nb, "numba")
        t_qf_np = timeit(lambda: kernels.csr_quadform_numpy(data, indices, indptr, u),
                         args.repeat)
        t_qf_nb = timeit(lambda: kernels.csr_quadform_numba(data, indices, indptr, u),
                         args.repeat)
        rows.append(("csr_quadform", t_qf_np, t_qf_nb, "numba"))

    print(f"{'kernel':<14} {'numpy':>12} {'other':>12} {'speedup':>9}")
    for name, t_np, t_other, label in rows:
        if t_other is None:
            print(f"{name:<14} {t_np * 1e6:>10.1f}us {'-':>12} {'-':>9}")
        else:
            print(f"{name:<14} {t_np * 1e6:>10.1f}us {t_other * 1e6:>10.1f}us "
                  f"{t_np / t_other:>8.2f}x  ({label})")

    t_en = timeit(lambda: energy_at_optimal_rho(mesh, K, h, u), args.repeat)
    t_gr = timeit(lambda: grad_u(mesh, K, h, u, rho_stationary(mesh, K, h, u)),
                  args.repeat)
    print(f"\nfull evaluations via {kernels.ACTIVE_BACKEND} backend:")
    print(f"  energy(+optimal rho): {t_en * 1e6:.1f}us")
    print(f"  gradient:             {t_gr * 1e6:.1f}us")


if __name__ == "__main__":
    main()
