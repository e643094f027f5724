"""Grid-refinement study of the scalar wave: energy drift and convergence factor per N."""
import argparse

from eqym.solvers import WaveConfig, convergence_factor, evolve_wave
from eqym.suites import bump_data


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--T", type=float, default=1.0)
    args = ap.parse_args()
    u0, v0 = bump_data()
    print(f"{'N':>6} {'steps':>7} {'drift':>10}")
    for N in (128, 256, 512, 1024, 2048):
        run = evolve_wave(u0, v0, WaveConfig(n=args.n, N=N, T=args.T))
        print(f"{N:6d} {len(run.times) - 1:7d} {run.energy_drift:10.3e}")
    res = convergence_factor(u0, v0, WaveConfig(n=args.n, N=256, T=args.T))
    print(f"convergence factor (N=256,512 vs 1024): {res['factor']:.3f}")


if __name__ == "__main__":
    main()
