"""Compare the compiled and pure-Python kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on the same inputs under both backends; the table reports
the best-of-N wall time per call and the speed-up of the compiled path.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from optoent import kernels
from optoent.dynamics import build_diffusion, build_drift
from optoent.model import TWO_PI, EffectiveParams


def _cases():
    p = EffectiveParams.from_normalized(
        TWO_PI * 10e6, gamma_m=1e-5, kappa=0.5, detuning=1.0, coupling=0.3,
        hopping=0.2, thermal_occupation=1250.0)
    c, d = np.array(build_drift(p)), np.array(build_diffusion(p))

    rng = np.random.default_rng(0)
    a = rng.normal(size=(8, 8))
    a -= (np.linalg.eigvals(a).real.max() + 0.5) * np.eye(8)
    dr = np.diag(rng.uniform(0.0, 2.0, 8))
    t_end = 50.0 / 0.5

    r = np.zeros((4, 4))
    r[:2, :2] = r[2:, 2:] = 0.5 * np.cosh(1.0) * np.eye(2)
    r[:2, 2:] = r[2:, :2] = 0.5 * np.sinh(1.0) * np.diag([1.0, -1.0])

    return {
        "kron_lyapunov_solve (8x8)": lambda m: m.kron_lyapunov_solve(c, d),
        "integrate_lyapunov_ode (t=50/|a|)":
            lambda m: m.integrate_lyapunov_ode(a, dr, 0.5 * np.eye(8), t_end, 1e-10, 1e-13,
                                               2_000_000),
        "theta_minus_parts (4x4)": lambda m: m.theta_minus_parts(r),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    mods = kernels.backends()
    if "cython" not in mods:
        print("compiled backend not built; only the Python fallback is available")
    print(f"{'kernel':<36}" + "".join(f"{name:>14}" for name in mods) + f"{'speed-up':>12}")
    for label, fn in _cases().items():
        times = {}
        for name, mod in mods.items():
            fn(mod)  # warm-up
            t = timeit.Timer(lambda: fn(mod))
            n, _ = t.autorange()
            times[name] = min(t.repeat(args.repeat, n)) / n
        row = f"{label:<36}" + "".join(f"{times[k] * 1e6:>11.1f} us" for k in mods)
        if len(times) == 2:
            row += f"{times['python'] / times['cython']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
