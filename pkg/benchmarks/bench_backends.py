"""Compare the compiled kernels against the NumPy fallback.

Runs both backends on identical inputs, checks they agree, and reports
throughput. Usage:

    python benchmarks/bench_backends.py [--trials 200000] [--beams 5]
                                        [--cells 16] [--order 8] [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fso_miso._backend import available_backends, get_backend


def make_inputs(trials: int, beams: int, cells: int, order: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    # Hermitian PSD tensor per cell, built as a Gram matrix of random profiles
    g = rng.normal(size=(cells, beams, 4)) + 1j * rng.normal(size=(cells, beams, 4))
    tensor = np.einsum("mik,mjk->mij", g, np.conj(g)) / 4.0
    coeff = rng.normal(size=(trials, beams)) * np.exp(
        1j * rng.uniform(-np.pi, np.pi, size=(trials, beams))
    )
    additive = rng.exponential(0.05, size=(trials, cells))
    weights = rng.exponential(1.0, size=cells)
    signal = float(weights.sum() * 1.5)
    noise = rng.normal(size=(trials, order, cells))
    tie_u = rng.random(trials)
    return tensor, coeff, additive, weights, signal, noise, tie_u


def bench(fn, repeat: int):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=200_000)
    parser.add_argument("--beams", type=int, default=5)
    parser.add_argument("--cells", type=int, default=16)
    parser.add_argument("--order", type=int, default=8)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    names = available_backends()
    print(f"backends available: {', '.join(names)}")
    tensor, coeff, additive, weights, signal, noise, tie_u = make_inputs(
        args.trials, args.beams, args.cells, args.order
    )
    sigma = 1.3

    results: dict[str, dict[str, float]] = {}
    pe_ref = None
    err_ref = None
    for name in names:
        mod = get_backend(name)
        times: dict[str, float] = {}
        for mrc in (True, False):
            label = "quad_form/" + ("mrc" if mrc else "egc")
            pe, dt = bench(
                lambda: mod.quad_form_pe_batch(
                    tensor, coeff, additive, sigma, args.order, mrc
                ),
                args.repeat,
            )
            times[label] = dt
            if mrc:
                if pe_ref is None:
                    pe_ref = pe
                elif not np.allclose(pe, pe_ref, rtol=1e-12, atol=1e-15):
                    raise AssertionError(f"{name}: quad_form disagrees with reference")
        errs, dt = bench(
            lambda: mod.oracle_errors_batch(weights, signal, sigma, noise, tie_u),
            args.repeat,
        )
        times["oracle"] = dt
        if err_ref is None:
            err_ref = errs
        elif not np.array_equal(errs, err_ref):
            raise AssertionError(f"{name}: oracle decisions disagree with reference")
        results[name] = times

    print(f"\ntrials={args.trials} beams={args.beams} cells={args.cells} "
          f"order={args.order} (best of {args.repeat})")
    header = f"{'kernel':<16}" + "".join(f"{n:>14}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label in ("quad_form/mrc", "quad_form/egc", "oracle"):
        row = f"{label:<16}"
        for n in names:
            rate = args.trials / results[n][label]
            row += f"{rate / 1e6:>11.2f} M/s"
        if len(names) == 2:
            row += f"{results[names[0]][label] / results[names[1]][label]:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
