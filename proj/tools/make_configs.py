#!/usr/bin/env python3
"""Regenerates the shipped problem configurations in configs/."""
import json
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "configs"


def dump(name, problem, profile, sweep=None, solver=None):
    cfg = {"problem": dict(problem, name=name), "profile": profile}
    if sweep:
        cfg["sweep"] = sweep
    if solver:
        cfg["solver"] = solver
    cfg["output"] = f"out/{name}"
    (OUT / f"{name}.json").write_text(json.dumps(cfg, indent=2) + "\n")


def mat(a):
    return [[float(v) for v in row] for row in np.atleast_2d(a)]


def vec(v):
    return [float(x) for x in np.ravel(v)]


def main():
    OUT.mkdir(exist_ok=True)
    default_sweep = {"delta_min": 1e-4, "delta_max": 1e-1, "points_per_decade": 5,
                     "seeds": [0, 1, 2], "mode": "both", "c1": 1, "c2": 1}

    # Scalar A = 1, Omega = x^2/2, x_dagger = 1: D(r) = max(0, 1 - r)^2 / 2.
    dump("scalar_demo",
         {"A": [[1.0]], "y_exact": [1.0], "p": 2, "q": 2, "penalty": {"kind": "SquaredL2"}},
         {"r_min": 1e-3, "r_max": 10, "points_per_decade": 10}, default_sweep)

    # Diagonal operator with decaying spectrum, x_dagger of limited smoothness.
    sigma = 2.0 ** -np.arange(1, 9)
    xd = np.sqrt(sigma)
    dump("diag_quadratic",
         {"A": mat(np.diag(sigma)), "y_exact": vec(sigma * xd), "p": 2, "q": 2,
          "penalty": {"kind": "SquaredL2"}},
         {"r_min": 1e-2, "r_max": 100, "points_per_decade": 5}, default_sweep)

    # Underdetermined operator: the minimum-norm solution lies in range(A^T),
    # so D vanishes beyond a finite radius (linear-rate benchmark).
    rng = np.random.default_rng(20240611)
    A = rng.standard_normal((6, 8)) / np.sqrt(8)
    x0 = rng.standard_normal(8)
    dump("benchmark_quadratic",
         {"A": mat(A), "y_exact": vec(A @ x0), "p": 2, "q": 2, "penalty": {"kind": "SquaredL2"}},
         {"r_min": 1e-3, "r_max": 100, "points_per_decade": 5}, default_sweep)

    # Square, well-posed Hilbert-space instance.
    rng = np.random.default_rng(7)
    A = rng.standard_normal((10, 10)) / np.sqrt(10) + np.eye(10)
    xd = rng.standard_normal(10)
    dump("hilbert_demo",
         {"A": mat(A), "y_exact": vec(A @ xd), "p": 2, "q": 2, "penalty": {"kind": "SquaredL2"}},
         {"r_min": 1e-3, "r_max": 100, "points_per_decade": 5}, default_sweep)

    # Banach setting: power-norm penalty, non-Hilbert data norm and fitting exponent.
    sigma = 2.0 ** -np.arange(1, 7)
    xd = sigma ** 0.5
    dump("banach_power",
         {"A": mat(np.diag(sigma)), "y_exact": vec(sigma * xd), "p": 1.5, "q": 3,
          "penalty": {"kind": "PowerNorm", "s": 1.5}},
         {"r_min": 1e-2, "r_max": 100, "points_per_decade": 5}, default_sweep)

    # Sparse recovery with an l1 penalty.
    rng = np.random.default_rng(11)
    A = rng.standard_normal((6, 10)) / np.sqrt(6)
    xd = np.zeros(10)
    xd[[1, 6]] = [1.0, -0.5]
    dump("sparse_l1",
         {"A": mat(A), "y_exact": vec(A @ xd), "p": 2, "q": 2, "penalty": {"kind": "L1"}},
         {"r_min": 1e-3, "r_max": 100, "points_per_decade": 5}, default_sweep)


if __name__ == "__main__":
    main()
