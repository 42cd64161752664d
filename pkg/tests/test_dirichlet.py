import math
import os
import sys
from dataclasses import replace

import numpy as np
import pytest

# Ensure the package root (one level up) is on sys.path so tests can import `core`.
ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from core.dirichlet import (  # noqa: E402
    RadialProfile,
    comparison_check,
    default_grid,
    explicit_subsolution,
    laplace_nonlinearity,
    laplace_supersolution,
    large_solution_sequence,
    ordered_in_n,
    solve_monotone,
    solve_shooting,
)
from core.errors import (  # noqa: E402
    DomainError,
    GridMismatchError,
    NoExplosiveSupersolutionError,
    UnreachableBoundaryError,
)
from core.hessian_radial import ProblemSpec  # noqa: E402
from core.nonlinearity import Constant, PowerLaw  # noqa: E402

FIXTURES = [
    (ProblemSpec(3, 1, R=1.0, c=2.0), PowerLaw(p=1.0)),
    (ProblemSpec(3, 1, R=1.0, c=1.0), PowerLaw(p=2.0)),
    (ProblemSpec(3, 2, R=1.0, c=1.0), PowerLaw(p=1.0, k=2)),
    (ProblemSpec(4, 3, R=1.0, c=1.0), PowerLaw(p=2.0, k=3)),
    (ProblemSpec(4, 2, R=1.0, c=3.0), PowerLaw(p=2.0, k=2)),
    (ProblemSpec(3, 2, R=2.0, c=5.0), Constant(c=math.sqrt(3.0), k=2)),
]


def test_explicit_subsolution():
    spec = ProblemSpec(4, 2, R=2.0, c=3.0)
    sub = explicit_subsolution(spec, PowerLaw(p=2.0, k=2))
    assert sub.a == pytest.approx(9.0 / math.sqrt(6.0))
    assert sub.value(2.0) == pytest.approx(3.0)
    assert sub.value(0.0) == pytest.approx(3.0 - 2.0 * sub.a)
    profile = sub.sample(default_grid(spec, 16))
    assert profile.label == "explicit_subsolution"
    assert profile.u[-1] == pytest.approx(3.0)
    with pytest.raises(DomainError):
        explicit_subsolution(ProblemSpec(4, 2), PowerLaw(p=2.0, k=2))


def test_laplace_nonlinearity_scaling():
    g = laplace_nonlinearity(ProblemSpec(4, 2), PowerLaw(p=2.0, k=2))
    assert g.k == 1
    assert g.g(2.0) == pytest.approx(4.0 * 4.0 / math.sqrt(6.0))


def test_shooting_recovers_sinh_solution():
    sol = solve_shooting(ProblemSpec(3, 1, R=1.0, c=2.0), PowerLaw(p=1.0))
    assert sol.info["beta_star"] == pytest.approx(2.0 / math.sinh(1.0), rel=1e-9)
    pos = sol.r > 0
    exact = 2.0 * np.sinh(sol.r[pos]) / (sol.r[pos] * math.sinh(1.0))
    assert np.max(np.abs(sol.u[pos] - exact)) <= 1e-8
    assert sol.boundary_error <= 1e-8 * 2.0
    assert sol.residual <= 1e-6


def test_shooting_recovers_quadratic_solution():
    spec = ProblemSpec(3, 2, R=2.0, c=5.0)
    sol = solve_shooting(spec, Constant(c=math.sqrt(3.0), k=2))
    assert sol.info["beta_star"] == pytest.approx(3.0, rel=1e-9)
    assert np.max(np.abs(sol.u - (3.0 + 0.5 * sol.r ** 2))) <= 1e-8
    assert sol.admissible(Constant(c=math.sqrt(3.0), k=2))


def test_shooting_unreachable_boundary():
    with pytest.raises(UnreachableBoundaryError):
        solve_shooting(ProblemSpec(3, 1, R=2.0, c=1.0), Constant(c=10.0))


def test_shooting_rejects_bad_grid():
    spec = ProblemSpec(3, 1, R=1.0, c=2.0)
    with pytest.raises(DomainError):
        solve_shooting(spec, PowerLaw(p=1.0), grid=np.linspace(0.0, 2.0, 11))
    with pytest.raises(DomainError):
        solve_shooting(spec, PowerLaw(p=1.0), grid=[0.0, 1.0])
    with pytest.raises(DomainError):
        solve_shooting(ProblemSpec(3, 1), PowerLaw(p=1.0))


@pytest.mark.parametrize("spec,nl", FIXTURES)
def test_monotone_agrees_with_shooting(spec, nl):
    sol, trace = solve_monotone(spec, nl, grid_size=1024)
    ref = solve_shooting(spec, nl, grid=sol.r)
    assert np.max(np.abs(sol.u - ref.u)) <= 1e-6
    assert trace.violations == 0
    assert trace.iterations >= 1
    # even iterates increase from the subsolution and stay below the odd ones
    for a, b in zip(trace.lower, trace.lower[1:]):
        assert np.all(b >= a - 1e-10 * np.maximum(1.0, np.abs(a)))
    for lo, hi in zip(trace.lower[1:], trace.upper):
        assert np.all(lo <= hi + 1e-10 * np.maximum(1.0, np.abs(hi)))
    assert sol.admissible(nl)
    assert comparison_check(explicit_subsolution(spec, nl).sample(sol.r), sol.profile(), slack=1e-8)
    if isinstance(nl, PowerLaw) and nl.p > 1:
        sup = laplace_supersolution(spec, nl, sol.r)
        assert comparison_check(sol.profile(), sup)
        for u in trace.lower:
            assert comparison_check(RadialProfile(sol.r, u), sup)


def test_monotone_on_the_quadratic_fixture():
    spec = ProblemSpec(3, 2, R=2.0, c=5.0)
    sol, _ = solve_monotone(spec, Constant(c=math.sqrt(3.0), k=2), grid_size=256)
    assert sol.u[0] == pytest.approx(3.0, abs=1e-9)
    assert sol.method == "monotone"


@pytest.mark.parametrize("spec,nl", [FIXTURES[0], FIXTURES[2]])
def test_shifted_iteration_agrees_with_shooting(spec, nl):
    sol, trace = solve_monotone(spec, nl, grid_size=256, shift=True)
    ref = solve_shooting(spec, nl, grid=sol.r)
    assert sol.method == "monotone_shifted"
    g_c, dg_c = float(nl.g(spec.c)), float(nl.derivative(spec.c))
    assert sol.info["mu"] == pytest.approx(spec.k * g_c ** (spec.k - 1) * dg_c)
    assert np.max(np.abs(sol.u - ref.u)) <= 1e-6
    assert trace.violations == 0


def test_monotone_rejects_coarse_grid():
    with pytest.raises(DomainError):
        solve_monotone(ProblemSpec(3, 1, R=1.0, c=2.0), PowerLaw(p=1.0), grid_size=32)


def test_ordering_chain_sub_solution_super():
    spec = ProblemSpec(3, 2, R=1.0, c=1.0)
    nl = PowerLaw(p=2.0, k=2)
    sol = solve_shooting(spec, nl)
    sub = explicit_subsolution(spec, nl).sample(sol.r)
    sup = laplace_supersolution(spec, nl, sol.r)
    assert sup.label == "laplace_supersolution"
    assert comparison_check(sub, sol.profile())
    assert comparison_check(sol.profile(), sup)


def test_supersolution_needs_the_growth_condition():
    with pytest.raises(NoExplosiveSupersolutionError):
        laplace_supersolution(ProblemSpec(3, 1, R=1.0, c=2.0), PowerLaw(p=1.0))
    with pytest.raises(NoExplosiveSupersolutionError):
        laplace_supersolution(ProblemSpec(3, 2, R=2.0, c=5.0), Constant(c=math.sqrt(3.0), k=2))


def test_comparison_check_grid_mismatch():
    a = RadialProfile(np.linspace(0.0, 1.0, 5), np.zeros(5))
    b = RadialProfile(np.linspace(0.0, 1.0, 6), np.ones(6))
    with pytest.raises(GridMismatchError):
        comparison_check(a, b)
    c = RadialProfile(np.linspace(0.0, 1.0, 5), np.array([1.0, 1.0, 1.0, np.inf, np.inf]))
    assert comparison_check(a, c)
    assert not comparison_check(c, a)


def test_large_solution_sequence_is_monotone_and_bounded():
    spec = ProblemSpec(3, 1, R=1.0)
    seq = large_solution_sequence(spec, PowerLaw(p=2.0), [2.0, 4.0, 8.0, 16.0, 32.0])
    assert seq.monotone
    assert seq.bounded
    assert all(d > 0 for d in seq.cauchy)
    # small n are still far from the limit; the differences grow here
    assert seq.cauchy == sorted(seq.cauchy)
    central = [float(s.u[0]) for s in seq.solutions]
    assert central == sorted(central)
    assert central[-1] <= seq.bound.metadata["beta"] + 1e-9
    assert seq.to_dict()["bound_beta"] == seq.bound.metadata["beta"]


def test_large_solution_central_increments_shrink():
    spec = ProblemSpec(3, 1, R=1.0)
    seq = large_solution_sequence(spec, PowerLaw(p=2.0), [128.0, 256.0, 512.0, 1024.0])
    assert all(b < a for a, b in zip(seq.center_cauchy, seq.center_cauchy[1:]))
    assert seq.limit_profile.r[-1] <= 0.9 + 1e-12


def test_large_solution_sequence_preconditions():
    spec = ProblemSpec(3, 1, R=1.0)
    with pytest.raises(DomainError):
        large_solution_sequence(spec, PowerLaw(p=1.0), [2.0, 4.0])
    with pytest.raises(DomainError):
        large_solution_sequence(spec, PowerLaw(p=2.0), [4.0, 2.0])


def test_explicit_subsolution_laplacian_case():
    spec = ProblemSpec(2, 1, R=1.0, c=1.0)
    sub = explicit_subsolution(spec, PowerLaw(p=1.0).scaled(2.0))
    assert sub.a == pytest.approx(1.0)
    assert sub.value(0.0) == pytest.approx(0.5)


def test_supersolution_dominates_a_large_boundary_value():
    spec = ProblemSpec(4, 2, R=1.0, c=10.0)
    nl = PowerLaw(p=2.0, k=2)
    sol = solve_shooting(spec, nl)
    sup = laplace_supersolution(spec, nl, sol.r)
    assert comparison_check(sol.profile(), sup)
    assert comparison_check(sol.profile(), sol.profile())


def test_large_solution_sequence_second_order():
    spec = ProblemSpec(4, 2, R=1.0)
    nl = PowerLaw(p=3.0, k=2)
    seq = large_solution_sequence(spec, nl, [2.0, 4.0, 8.0], grid=np.linspace(0.0, 1.0, 257))
    assert seq.monotone and seq.bounded
    sup = laplace_supersolution(spec.with_boundary(c=8.0), nl, seq.solutions[-1].r)
    assert all(comparison_check(s.profile(), sup) for s in seq.solutions)


@pytest.mark.parametrize("c", [1e-3, 1e-6])
def test_small_boundary_values_give_uniformly_small_solutions(c):
    spec = ProblemSpec(3, 2, R=1.0, c=c)
    sol = solve_shooting(spec, PowerLaw(p=2.0, k=2))
    assert np.max(np.abs(sol.u)) <= c * (1.0 + 1e-8)
    assert np.min(sol.u) > 0.5 * c
    assert np.all(np.diff(sol.u) >= -1e-12 * c)


def test_large_solution_sequence_flags_a_decrease(monkeypatch):
    def lowered(spec, *args, **kwargs):
        sol = solve_shooting(spec, *args, **kwargs)
        return replace(sol, u=sol.u - 10.0) if spec.c == 4.0 else sol

    monkeypatch.setattr("core.dirichlet.solve_shooting", lowered)
    seq = large_solution_sequence(ProblemSpec(3, 1, R=1.0), PowerLaw(p=2.0), [2.0, 4.0])
    assert not seq.monotone
    assert seq.to_dict()["monotone"] is False
    assert not ordered_in_n(seq.solutions)
    assert ordered_in_n(seq.solutions[:1])
