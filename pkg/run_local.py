"""Small local run of the main operations without the command line.

Usage:
    python run_local.py

Classifies g(u) = u^2, brackets the blow-up radius of the radial solution
with central value 1 in dimension 3, verifies the trajectory estimates and
solves one Dirichlet problem by both methods.
"""
import numpy as np

from core import (
    PowerLaw,
    ProblemSpec,
    blowup_radius,
    ko_classify,
    ko_integral,
    run_estimate_suite,
    solve_monotone,
    solve_shooting,
)
from utils_logging import configure_logging


def main():
    configure_logging("WARNING")
    nl = PowerLaw(p=2.0, k=1)
    report = ko_integral(nl, 1.0)
    print("=== KELLER-OSSERMAN ===")
    print(f"g(u) = u^2, k = 1: {ko_classify(nl).value}, K(1) = {report.value:.12g} +- {report.error_bound:.2g}")

    est = blowup_radius(ProblemSpec(3, 1), nl, 1.0)
    print("\n=== BLOW-UP RADIUS ===")
    print(f"beta = 1: rho in [{est.rho_low:.10g}, {est.rho_high:.10g}] ({est.verdict.value})")

    if est.trajectory is not None:
        print("\n=== ESTIMATES ===")
        for r in run_estimate_suite(est.trajectory):
            print(f"{r.name}: lhs={r.lhs:.6g} rhs={r.rhs:.6g} {'pass' if r.passed else 'FAIL'}")

    spec = ProblemSpec(3, 2, R=1.0, c=2.0)
    shot = solve_shooting(spec, nl.with_order(2))
    mono, trace = solve_monotone(spec, nl.with_order(2), grid_size=256)
    print("\n=== DIRICHLET N=3 k=2 R=1 c=2 ===")
    print(f"shooting u(0) = {shot.u[0]:.12g}, monotone u(0) = {mono.u[0]:.12g} after {trace.iterations} sweeps")
    grid = np.linspace(0.0, 1.0, 257)
    diff = np.max(np.abs(np.interp(grid, shot.r, shot.u) - mono.u))
    print(f"max |difference| on the monotone grid: {diff:.3g}")


if __name__ == "__main__":
    main()
