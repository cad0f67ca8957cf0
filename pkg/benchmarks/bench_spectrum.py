"""Benchmark the compiled susceptibility kernel against the numpy fallback.

Run:  python benchmarks/bench_spectrum.py [points] [repeats]
"""

import sys
import time

import numpy as np

from mdsr import _kernels
from mdsr.bloch import DecayModel, LaserField
from mdsr.levels import Manifold, build_level_scheme
from mdsr.spectrum import (
    ExperimentModel,
    PopulationDistribution,
    _term_parameters,
    susceptibility_prefactor,
)


def make_args(points):
    model = ExperimentModel(
        scheme=build_level_scheme(0.15),
        coupling=LaserField(0, 78.0, 0.0, (Manifold.G2, Manifold.E2)),
        probe=LaserField(-1, 1.0, 0.0, (Manifold.G1, Manifold.E2)),
        decay=DecayModel(2.0, 4.0),
        n_f1=1.2e11,
        path_length_mm=2.0,
        wavelength_nm=795.0,
    )
    amp2, omega_c, dps, dcs = _term_parameters(model)
    pref = susceptibility_prefactor(model.n_f1, model.scheme.reduced_dipole)
    grid = np.linspace(-80.0, 80.0, points)
    pops = PopulationDistribution(0.32, 0.36, 0.32).as_array()
    return (grid, pops, amp2, omega_c, dps, dcs, 0.0,
            model.decay.gamma_ab, model.decay.gamma_ac, pref)


def bench(fn, args, repeats):
    fn(*args)  # warm up (triggers JIT compilation on the fast path)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    points = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    repeats = int(sys.argv[2]) if len(sys.argv) > 2 else 20
    args = make_args(points)

    t_numpy = bench(_kernels.chi_grid_numpy, args, repeats)
    print(f"grid points: {points}, repeats: {repeats} (best-of shown)")
    print(f"numpy fallback : {1e3 * t_numpy:8.3f} ms")
    if _kernels.NUMBA_ENABLED:
        t_fast = bench(_kernels.chi_grid, args, repeats)
        print(f"numba kernel   : {1e3 * t_fast:8.3f} ms  ({t_numpy / t_fast:.2f}x)")
        diff = np.abs(_kernels.chi_grid(*args) - _kernels.chi_grid_numpy(*args)).max()
        print(f"max |difference|: {diff:.3e}")
    else:
        print("numba kernel   : disabled (MDSR_NO_NUMBA set or numba unavailable)")


if __name__ == "__main__":
    main()
