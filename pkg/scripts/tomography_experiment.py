#!/usr/bin/env python3
"""Tomography experiment: recover E2 parameters from sampled measurements.

Simulates the full yes-no + von Neumann battery on a 2-mode test state,
prints recovered parameters against ground truth with their propagated
standard errors, and measures the error-envelope scaling in the shot
count.

Run:
    python scripts/tomography_experiment.py --shots 1000000 --seed 7
"""

import argparse

import numpy as np

from gausskit.states import GaussianState
from gausskit.tomography import estimate, simulate_battery


def build_state(args) -> GaussianState:
    a = np.array([[0.0, args.coupling], [args.coupling, 0.0]])
    lam = args.lam * np.eye(2)
    return GaussianState.from_a_lambda(a, lam, [0.1, -0.05j])


def report_table(rep, truth) -> None:
    rows = [("c", truth.c, rep.estimates.c.real, rep.stderr["c"])]
    n = truth.n
    for j in range(1, n + 1):
        rows.append((f"Re alpha_{j}", truth.mu[j - 1].real,
                     rep.estimates.alpha[j - 1].real, rep.stderr[f"alpha_re[{j}]"]))
        rows.append((f"Im alpha_{j}", truth.mu[j - 1].imag,
                     rep.estimates.alpha[j - 1].imag, rep.stderr[f"alpha_im[{j}]"]))
    for j in range(1, n + 1):
        for k in range(j, n + 1):
            rows.append((f"Re A_{j}{k}", truth.a[j - 1, k - 1].real,
                         rep.estimates.a[j - 1, k - 1].real, rep.stderr[f"A_re[{j},{k}]"]))
            rows.append((f"Re Lambda_{j}{k}", truth.lam[j - 1, k - 1].real,
                         rep.estimates.lam[j - 1, k - 1].real,
                         rep.stderr[f"Lambda_re[{j},{k}]"]))
    print(f"{'parameter':>16} {'truth':>10} {'estimate':>11} {'stderr':>10} {'z':>6}")
    for name, truth_v, est, se in rows:
        z = abs(est - truth_v) / se if se > 0 else 0.0
        print(f"{name:>16} {truth_v:>10.5f} {est:>11.5f} {se:>10.2e} {z:>6.2f}")


def scaling_ratio(state, truth, base_shots, seeds) -> float:
    def envelope(shots):
        per_seed = []
        for seed in range(seeds):
            rep = estimate(simulate_battery(state, shots, seed=100 + seed))
            est = rep.estimates
            errs = [abs(est.c.real - truth.c)]
            for j in range(truth.n):
                errs += [abs((est.alpha[j] - truth.mu[j]).real),
                         abs((est.alpha[j] - truth.mu[j]).imag)]
                for k in range(j, truth.n):
                    errs += [abs((est.a[j, k] - truth.a[j, k]).real),
                             abs((est.a[j, k] - truth.a[j, k]).imag)]
                errs.append(abs((est.lam[j, j] - truth.lam[j, j]).real))
            per_seed.append(np.sqrt(np.mean(np.array(errs) ** 2)))
        return float(np.sqrt(np.mean(np.array(per_seed) ** 2)))

    return envelope(4 * base_shots) / envelope(base_shots)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--shots", type=int, default=10**6)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--coupling", type=float, default=0.2)
    parser.add_argument("--lam", type=float, default=0.1)
    parser.add_argument("--scaling-seeds", type=int, default=20)
    parser.add_argument("--scaling-shots", type=int, default=20000)
    args = parser.parse_args()

    state = build_state(args)
    truth = state.params
    print(f"ground truth: 2-mode state, A coupling {args.coupling}, "
          f"Lambda = {args.lam} I, mu = (0.1, -0.05i)")
    print(f"simulating battery at {args.shots} shots (seed {args.seed}) ...")
    rep = estimate(simulate_battery(state, args.shots, args.seed))
    report_table(rep, truth)

    print(f"\nscaling check over {args.scaling_seeds} seeds "
          f"({args.scaling_shots} vs {4 * args.scaling_shots} shots) ...")
    ratio = scaling_ratio(state, truth, args.scaling_shots, args.scaling_seeds)
    print(f"envelope ratio after quadrupling shots: {ratio:.3f} (ideal 0.5)")


if __name__ == "__main__":
    main()
