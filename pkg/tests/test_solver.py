"""Tests for the orthogonal state-pair solver and the published-solution registry."""

from __future__ import annotations

import math

import numpy as np
import pytest

from bornchoice import quantum, solver
from bornchoice.scenarios import BUILTIN_NAMES, ScenarioError, builtin
from bornchoice.solver import (
    DEFAULT_TARGETS,
    ResidualSystem,
    SolveTarget,
    SolverConfig,
    explore_solution_family,
    paper_solutions,
    solve,
    verify,
)

# moduli as printed (3 decimals) and their squares after the exact
# within-group rescale; recomputed from p_i = printed_i^2 * t / s with
# s the printed squared group sum
PRINTED = {
    "ellsberg3": ((0.577, 0.644, 0.502), (0.577, 0.505, 0.641)),
    "machina5051": ((0.487, 0.508, 0.345, 0.621), (0.605, 0.359, 0.530, 0.474)),
    "reflection_lower": ((0.333, 0.624, 0.333, 0.624), (0.342, 0.619, 0.342, 0.619)),
    "reflection_upper": ((0.297, 0.642, 0.297, 0.642), (0.353, 0.613, 0.353, 0.613)),
}
PROJECTED_PROBS = {
    "ellsberg3": (
        (0.333333333333, 0.414690384058, 0.251976282609),
        (0.333333333333, 0.255316315916, 0.411350350750),
    ),
    "machina5051": (
        (0.237081123511, 0.257968381440, 0.119092097889, 0.385858397160),
        (0.366131134093, 0.128918370857, 0.280552467007, 0.224398028043),
    ),
    "reflection_lower": (
        (0.110830259962, 0.389169740038, 0.110830259962, 0.389169740038),
        (0.116934766308, 0.383065233692, 0.116934766308, 0.383065233692),
    ),
    "reflection_upper": (
        (0.088143245139, 0.411856754861, 0.088143245139, 0.411856754861),
        (0.124514866761, 0.375485133239, 0.124514866761, 0.375485133239),
    ),
}
REALIZED_GAPS = {
    "ellsberg3": (0.813570507244, 0.780170174169),
    "machina5051": (0.578113468568, 0.631221624289),
    "reflection_lower": (0.576459937956, 0.551174244754),
    "reflection_upper": (0.670432630251, 0.519776440639),
}


# -- targets and configuration -------------------------------------------

def test_default_targets_table():
    assert DEFAULT_TARGETS == {
        "ellsberg3": (0.815, 0.780),
        "machina5051": (0.580, 0.630),
        "reflection_lower": (0.575, 0.550),
        "reflection_upper": (0.670, 0.520),
    }


def test_solve_target_for_scenario():
    s = builtin("ellsberg3")
    t = SolveTarget.for_scenario(s)
    assert t.pair_1 == ("f1", "f2") and t.d1 == 0.815
    assert t.pair_2 == ("f4", "f3") and t.d2 == 0.780
    assert t.require_orthogonal
    override = SolveTarget.for_scenario(s, d1=0.5)
    assert override.d1 == 0.5 and override.d2 == 0.780
    lo = SolveTarget.for_scenario(builtin("reflection_lower"))
    assert lo.pair_2 == ("f3", "f4") and lo.d2 == 0.550


def test_solve_target_validation():
    with pytest.raises(ScenarioError, match="finite"):
        SolveTarget(("f1", "f2"), math.nan, ("f4", "f3"), 0.5)
    doc = builtin("ellsberg3").to_document()
    doc["name"] = "custom"
    from bornchoice.scenarios import load_scenario

    custom = load_scenario(doc)
    with pytest.raises(ScenarioError, match="no default targets"):
        SolveTarget.for_scenario(custom)
    # explicit gaps work for any scenario
    t = SolveTarget.for_scenario(custom, d1=0.1, d2=0.2)
    assert (t.d1, t.d2) == (0.1, 0.2)


def test_solver_config_validation():
    with pytest.raises(ScenarioError, match="restarts"):
        SolverConfig(restarts=0)
    with pytest.raises(ScenarioError, match="max_iterations"):
        SolverConfig(max_iterations=0)
    with pytest.raises(ScenarioError, match="residual_tolerance"):
        SolverConfig(residual_tolerance=0.0)


# -- published-solution registry -------------------------------------------

@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_registry_keeps_printed_values_verbatim(name):
    sol = paper_solutions(name)
    assert sol.printed_moduli_1 == PRINTED[name][0]
    assert sol.printed_moduli_2 == PRINTED[name][1]
    data = sol.to_dict()
    assert data["printed_moduli_2"] == list(PRINTED[name][1])
    assert data["target"]["d1"] == DEFAULT_TARGETS[name][0]


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_registry_states_project_onto_constraints(name):
    sol = paper_solutions(name)
    assert sol.w1.probabilities() == pytest.approx(PROJECTED_PROBS[name][0], abs=1e-9)
    assert sol.w2.probabilities() == pytest.approx(PROJECTED_PROBS[name][1], abs=1e-9)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_registry_passes_verify_at_half_percent(name):
    sol = paper_solutions(name)
    report = sol.verify()
    assert report.passed, report.summary()
    d1, d2 = DEFAULT_TARGETS[name]
    g1, g2 = REALIZED_GAPS[name]
    assert report.check("target_1").deviation == pytest.approx(abs(g1 - d1), abs=1e-9)
    assert report.check("target_2").deviation == pytest.approx(abs(g2 - d2), abs=1e-9)
    # group lines are held to the tighter 2e-3 tolerance
    for line in report.checks:
        if line.name.startswith("group_"):
            assert line.tolerance == 2e-3
            assert line.deviation <= 1e-12


def test_registry_orthogonality_magnitudes():
    z = quantum.overlap(*_pair("ellsberg3"))
    assert 1e-4 <= abs(z) <= 2e-4
    z = quantum.overlap(*_pair("machina5051"))
    assert 5e-4 <= abs(z) <= 6e-4
    for name in ("reflection_lower", "reflection_upper"):
        # the twofold symmetry of the printed vectors cancels the overlap exactly
        assert abs(quantum.overlap(*_pair(name))) <= 1e-12


def _pair(name):
    sol = paper_solutions(name)
    return sol.w1, sol.w2


def test_registry_accepts_scenario_objects_and_rejects_unknown():
    sol = paper_solutions(builtin("machina5051"))
    assert sol.scenario_name == "machina5051"
    doc = builtin("ellsberg3").to_document()
    doc["name"] = "custom"
    from bornchoice.scenarios import load_scenario

    with pytest.raises(ScenarioError, match="no published solution"):
        paper_solutions(load_scenario(doc))


# -- solve ------------------------------------------------------------------

@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_solve_converges_on_builtin_targets(name):
    s = builtin(name)
    target = SolveTarget.for_scenario(s)
    result = solve(s, target)
    assert result.converged, result.summary()
    assert all(abs(v) <= 1e-8 for v in result.residuals.values())
    assert result.restarts_used == 64
    # a converged result re-verifies at the residual tolerance
    assert verify(s, result.w1, result.w2, target, tol=1e-8).passed


def test_solve_is_deterministic():
    s = builtin("ellsberg3")
    target = SolveTarget.for_scenario(s)
    first = solve(s, target)
    second = solve(s, target)
    assert first.to_dict() == second.to_dict()


def test_solve_unreachable_target_reports_failure():
    s = builtin("ellsberg3")
    # |W(f1) - W(f2)| is capped by u(100) * (2/3), so 20 is out of reach
    target = SolveTarget.for_scenario(s, d1=20.0)
    result = solve(s, target, config=SolverConfig(restarts=8, max_iterations=120))
    assert not result.converged
    assert abs(result.residuals["target_1"]) > 1.0
    assert "did NOT converge" in result.summary()


def test_solve_without_orthogonality_requirement():
    s = builtin("ellsberg3")
    target = SolveTarget(("f1", "f2"), 0.815, ("f1", "f2"), 0.815, require_orthogonal=False)
    result = solve(s, target, config=SolverConfig(restarts=8))
    assert result.converged
    assert abs(result.residuals["target_1"]) <= 1e-8
    assert abs(result.residuals["target_2"]) <= 1e-8
    # the overlap is still reported, it just is not a requirement
    assert "overlap_re" in result.residuals
    assert verify(s, result.w1, result.w2, target, tol=1e-8).passed


def test_verify_self_pair_fails_orthogonality():
    sol = paper_solutions("ellsberg3")
    report = verify(sol.w1.scenario, sol.w1, sol.w1, sol.target, tol=5e-3)
    assert not report.passed
    assert report.check("overlap_re").deviation == pytest.approx(1.0, abs=1e-9)


def test_solve_result_round_trip_dict():
    s = builtin("reflection_upper")
    result = solve(s, SolveTarget.for_scenario(s), config=SolverConfig(restarts=4))
    data = result.to_dict()
    assert data["scenario"] == "reflection_upper"
    assert set(data["residuals"]) == {
        "target_1",
        "target_2",
        "overlap_re",
        "overlap_im",
        "norm_w1",
        "norm_w2",
        "group_RY_w1",
        "group_RY_w2",
        "group_BG_w1",
        "group_BG_w2",
    }
    assert data["method"] == solver.METHOD_DESCRIPTION


# -- parameterization and gradients ------------------------------------------

@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_parameterization_always_lands_on_constraints(name):
    s = builtin(name)
    system = ResidualSystem(s, SolveTarget.for_scenario(s))
    rng = np.random.default_rng(5)
    for _ in range(25):
        x = rng.uniform(-10.0, 10.0, system.n_params)
        w1, w2 = system.states(x)  # constructor enforces the group sums at 1e-12
        r = system.residuals(x)
        named = solver._named_residuals(s, w1, w2, system.target, system.u)
        assert r[0] == pytest.approx(named["target_1"], abs=1e-10)
        assert r[1] == pytest.approx(named["target_2"], abs=1e-10)
        assert r[2] == pytest.approx(named["overlap_re"], abs=1e-10)
        assert r[3] == pytest.approx(named["overlap_im"], abs=1e-10)


def central_difference_jacobian(system, x, step=1e-6):
    num = np.zeros((system.n_residuals, system.n_params))
    for j in range(system.n_params):
        up = x.copy()
        down = x.copy()
        up[j] += step
        down[j] -= step
        num[:, j] = (system.residuals(up) - system.residuals(down)) / (2 * step)
    return num


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_jacobian_matches_central_differences(name):
    s = builtin(name)
    system = ResidualSystem(s, SolveTarget.for_scenario(s))
    rng = np.random.default_rng(42)
    points = system.initial_points(rng, 10)
    for x in points:
        analytic = system.jacobian(x)
        numeric = central_difference_jacobian(system, x)
        scale = np.maximum(1.0, np.abs(analytic))
        assert np.max(np.abs(numeric - analytic) / scale) <= 1e-4


# -- families ------------------------------------------------------------------

def test_explore_family_collapses_when_targets_pin_the_moduli():
    s = builtin("ellsberg3")
    family = explore_solution_family(
        s, SolveTarget.for_scenario(s), config=SolverConfig(restarts=8), count=4
    )
    # both gaps fix the entire probability profile here, so every seed
    # lands in the same mu-class
    assert len(family) == 1
    assert family[0].converged
    assert family[0].w1.probabilities()[2] == pytest.approx(1 / 3 - 0.0815, abs=1e-8)
    assert family[0].w2.probabilities()[2] == pytest.approx(1 / 3 + 0.0780, abs=1e-8)


def test_explore_family_finds_distinct_solutions():
    s = builtin("reflection_lower")
    family = explore_solution_family(
        s, SolveTarget.for_scenario(s), config=SolverConfig(restarts=8), count=4
    )
    assert len(family) >= 2
    profiles = [np.array(r.w1.probabilities() + r.w2.probabilities()) for r in family]
    for i in range(len(profiles)):
        assert family[i].converged
        for j in range(i + 1, len(profiles)):
            assert float(np.max(np.abs(profiles[i] - profiles[j]))) > 1e-3


def test_explore_family_empty_for_unreachable_target():
    s = builtin("ellsberg3")
    target = SolveTarget.for_scenario(s, d1=20.0)
    family = explore_solution_family(
        s, target, config=SolverConfig(restarts=2, max_iterations=80), count=2
    )
    assert family == []
