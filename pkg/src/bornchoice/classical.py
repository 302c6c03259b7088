"""Classical subjective expected utility over the constrained event simplex.

Expected utility W(f) = sum_i p_i u(x_i) for a single probability
assignment p, plus exact feasibility analysis of joint preference
patterns: because every W(f) - W(g) is affine in p, a pattern of strict
preferences and indifferences is decided exactly over the constraint
polytope (a product of scaled simplices), with a dense grid sweep as an
independent cross-check. Infeasibility comes with a sign-analysis
certificate, and the certificate notes when the conclusion does not
depend on the utility values at all.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import linprog

from .scenarios import (
    DEFAULT_UTILITY,
    Act,
    Scenario,
    ScenarioError,
    UtilityFunction,
    utility_values,
)

FIRST_STRICT = "first-strict"
SECOND_STRICT = "second-strict"
INDIFFERENT = "indifferent"
RELATIONS = (FIRST_STRICT, SECOND_STRICT, INDIFFERENT)

# a strict preference only counts as witnessed when the utility gap
# clears this margin; separates open-region feasibility from boundary
# indifference
STRICT_MARGIN = 1e-9

GROUP_SUM_TOL = 1e-12


class PatternError(ValueError):
    """Raised for preference patterns that cannot be parsed or do not fit the scenario."""


@dataclass(frozen=True)
class ClassicalProbability:
    """A probability per event, honoring the scenario's group constraints.

    Entries must lie in [0, 1], sum to 1 within 1e-12, and each
    constraint group must sum to its exact rational total within 1e-12.
    """

    scenario: Scenario
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        probs = tuple(float(x) for x in self.probs)
        n = self.scenario.n_events
        if len(probs) != n:
            raise ScenarioError(f"expected {n} probabilities (one per event), got {len(probs)}")
        for label, p in zip(self.scenario.events, probs):
            if p < -GROUP_SUM_TOL or p > 1 + GROUP_SUM_TOL:
                raise ScenarioError(f"probability of event {label!r} is {p}, outside [0, 1]")
        total = sum(probs)
        if abs(total - 1.0) > 1e-12:
            raise ScenarioError(f"probabilities sum to {total!r}, not 1")
        for indices, t in self.scenario.groups():
            s = sum(probs[i] for i in indices)
            if abs(s - float(t)) > GROUP_SUM_TOL:
                labels = [self.scenario.events[i] for i in indices]
                raise ScenarioError(f"group {labels} sums to {s!r}, constraint requires {t} (= {float(t)!r})")
        object.__setattr__(self, "probs", probs)

    def as_array(self) -> np.ndarray:
        return np.array(self.probs, dtype=float)

    def to_dict(self) -> dict:
        return {label: p for label, p in zip(self.scenario.events, self.probs)}

    def __repr__(self) -> str:
        body = ", ".join(f"{e}={p:.6g}" for e, p in zip(self.scenario.events, self.probs))
        return f"ClassicalProbability({body})"


@dataclass(frozen=True)
class PreferencePattern:
    """One relation per question pair: first-strict, second-strict, or indifferent."""

    relations: tuple[str, ...]

    def __post_init__(self) -> None:
        rels = tuple(self.relations)
        for r in rels:
            if r not in RELATIONS:
                raise PatternError(f"unknown relation {r!r}; expected one of {RELATIONS}")
        object.__setattr__(self, "relations", rels)

    @staticmethod
    def from_text(scenario: Scenario, text: str) -> "PreferencePattern":
        """Parse a pattern like ``f1>f2,f4>f3`` against a scenario's question pairs.

        Each comma-separated term is ``A>B`` (A strictly preferred),
        ``A<B``, or ``A=B``; the two acts must form one of the
        scenario's question pairs, and every pair must be covered
        exactly once.
        """
        terms = [t.strip() for t in text.split(",") if t.strip()]
        if not terms:
            raise PatternError(f"empty preference pattern {text!r}")
        pair_sets = [frozenset(pair) for pair in scenario.question_pairs]
        relations: dict[int, str] = {}
        for term in terms:
            m = re.fullmatch(r"(\w+)\s*([<>=])\s*(\w+)", term)
            if m is None:
                raise PatternError(f"bad pattern term {term!r}; expected ACT>ACT, ACT<ACT, or ACT=ACT")
            a, op, b = m.group(1), m.group(2), m.group(3)
            ia, ib = scenario.act_index(a), scenario.act_index(b)
            key = frozenset({ia, ib})
            if key not in pair_sets:
                raise PatternError(
                    f"acts {a!r} and {b!r} do not form a question pair of scenario {scenario.name!r}"
                )
            slot = pair_sets.index(key)
            if slot in relations:
                raise PatternError(f"question pair of {a!r} and {b!r} is specified twice")
            first, _second = scenario.question_pairs[slot]
            if op == "=":
                rel = INDIFFERENT
            elif op == ">":
                rel = FIRST_STRICT if ia == first else SECOND_STRICT
            else:
                rel = SECOND_STRICT if ia == first else FIRST_STRICT
            relations[slot] = rel
        missing = [i for i in range(len(scenario.question_pairs)) if i not in relations]
        if missing:
            pairs = [
                f"{scenario.acts[a].label}/{scenario.acts[b].label}"
                for a, b in (scenario.question_pairs[i] for i in missing)
            ]
            raise PatternError(f"pattern {text!r} does not cover question pair(s) {pairs}")
        return PreferencePattern(tuple(relations[i] for i in range(len(scenario.question_pairs))))

    def describe(self, scenario: Scenario) -> str:
        parts = []
        for (a, b), rel in zip(scenario.question_pairs, self.relations):
            la, lb = scenario.acts[a].label, scenario.acts[b].label
            op = {FIRST_STRICT: ">", SECOND_STRICT: "<", INDIFFERENT: "="}[rel]
            parts.append(f"{la}{op}{lb}")
        return ",".join(parts)


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of a pattern feasibility decision.

    ``witness`` is present exactly when feasible and reproduces the
    pattern with margin at least 1e-9 on strict entries; ``certificate``
    explains an infeasibility by sign analysis of the affine difference
    functionals. ``u_independent`` records whether every functional's
    sign structure involves a single payoff swap, in which case the
    conclusion holds for every strictly increasing utility function.
    """

    scenario_name: str
    pattern: PreferencePattern
    feasible: bool
    witness: Optional[ClassicalProbability]
    certificate: str
    margin: Optional[float]
    grid_agrees: Optional[bool]
    u_independent: bool

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario_name,
            "pattern": list(self.pattern.relations),
            "feasible": self.feasible,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "certificate": self.certificate,
            "margin": self.margin,
            "grid_agrees": self.grid_agrees,
            "u_independent": self.u_independent,
        }

    def summary(self) -> str:
        lines = [f"scenario {self.scenario_name}: pattern is {'FEASIBLE' if self.feasible else 'INFEASIBLE'}"]
        if self.witness is not None:
            body = ", ".join(f"p({e}) = {p:.6g}" for e, p in self.witness.to_dict().items())
            lines.append(f"  witness: {body} (margin {self.margin:.3e})")
        lines.append("  " + self.certificate.replace("\n", "\n  "))
        if self.grid_agrees is not None:
            lines.append(f"  grid cross-check (step 1e-3): {'agrees' if self.grid_agrees else 'DISAGREES'}")
        return "\n".join(lines)


def expected_utility(
    p: ClassicalProbability, act: Union[Act, str, int], u: UtilityFunction = DEFAULT_UTILITY
) -> float:
    """Expected utility sum_i p_i u(x_i) of an act under probability p."""
    values = utility_values(p.scenario, act, u)
    return float(np.dot(p.as_array(), values))


def _difference_coefficients(
    scenario: Scenario, first: Union[Act, str, int], second: Union[Act, str, int], u: UtilityFunction
) -> np.ndarray:
    return utility_values(scenario, first, u) - utility_values(scenario, second, u)


def _is_single_swap(scenario: Scenario, first: Union[Act, str, int], second: Union[Act, str, int]) -> bool:
    # the sign structure is utility-independent when the two payoff rows
    # differ only by permuting one high/low payoff pair across events
    fa, fb = scenario.act(first), scenario.act(second)
    pairs = {frozenset({xa, xb}) for xa, xb in zip(fa.payoffs, fb.payoffs) if xa != xb}
    return len(pairs) <= 1


@dataclass(frozen=True)
class _ReducedForm:
    """Affine form coeffs . y + const on the polytope's free coordinates."""

    coeffs: tuple[float, ...]
    const: float

    def stacked(self) -> np.ndarray:
        return np.array(list(self.coeffs) + [self.const], dtype=float)


def _free_coordinates(scenario: Scenario) -> list[tuple[int, Fraction, tuple[int, ...]]]:
    """Per group: (determined index, total, free indices); size-1 groups have no free index."""
    out = []
    for indices, total in scenario.groups():
        out.append((indices[-1], total, indices[:-1]))
    return out


def _reduce(scenario: Scenario, coeffs: np.ndarray) -> _ReducedForm:
    """Restrict a linear form c . p to the constraint polytope's free coordinates."""
    const = 0.0
    reduced: list[float] = []
    for determined, total, free in _free_coordinates(scenario):
        const += coeffs[determined] * float(total)
        for i in free:
            reduced.append(float(coeffs[i] - coeffs[determined]))
    return _ReducedForm(tuple(reduced), float(const))


def _describe_functional(scenario: Scenario, coeffs: np.ndarray, la: str, lb: str) -> str:
    terms = []
    for label, c in zip(scenario.events, coeffs):
        if abs(c) > 1e-12:
            terms.append(f"{'+' if c >= 0 else '-'} {abs(c):.6g} p({label})")
    body = " ".join(terms) if terms else "0"
    return f"W({la}) - W({lb}) = {body}"


def biconditional_check(
    scenario: Scenario,
    pair_a: Sequence[Union[Act, str, int]],
    pair_b: Sequence[Union[Act, str, int]],
    u: UtilityFunction = DEFAULT_UTILITY,
) -> bool:
    """Whether sign(W difference of pair_a) = sign(W difference of pair_b) on the whole polytope.

    Decided by comparing the two affine difference functionals restricted
    to the constraint polytope: they must be positive multiples of each
    other there, or both identically zero.
    """
    ca = _difference_coefficients(scenario, pair_a[0], pair_a[1], u)
    cb = _difference_coefficients(scenario, pair_b[0], pair_b[1], u)
    va = _reduce(scenario, ca).stacked()
    vb = _reduce(scenario, cb).stacked()
    scale = max(1.0, float(np.max(np.abs(va))), float(np.max(np.abs(vb))))
    tol = 1e-12 * scale
    a_zero = bool(np.all(np.abs(va) <= tol))
    b_zero = bool(np.all(np.abs(vb) <= tol))
    if a_zero or b_zero:
        return a_zero and b_zero
    j = int(np.argmax(np.abs(va)))
    lam = vb[j] / va[j]
    if lam <= 0:
        return False
    return bool(np.max(np.abs(vb - lam * va)) <= tol * max(1.0, abs(lam)))


def _signed_conditions(
    scenario: Scenario, pattern: PreferencePattern, u: UtilityFunction
) -> list[tuple[str, np.ndarray, str]]:
    """One (kind, oriented coefficients, description) triple per question pair.

    Strict entries are oriented so the condition reads "coefficients . p > 0";
    indifferent entries require "coefficients . p = 0".
    """
    if len(pattern.relations) != len(scenario.question_pairs):
        raise PatternError(
            f"pattern has {len(pattern.relations)} entries, scenario {scenario.name!r} has "
            f"{len(scenario.question_pairs)} question pairs"
        )
    out = []
    for (a, b), rel in zip(scenario.question_pairs, pattern.relations):
        la, lb = scenario.acts[a].label, scenario.acts[b].label
        coeffs = _difference_coefficients(scenario, a, b, u)
        desc = _describe_functional(scenario, coeffs, la, lb)
        if rel == FIRST_STRICT:
            out.append(("strict", coeffs, f"{desc}; require W({la}) > W({lb})"))
        elif rel == SECOND_STRICT:
            out.append(("strict", -coeffs, f"{desc}; require W({la}) < W({lb})"))
        else:
            out.append(("equal", coeffs, f"{desc}; require W({la}) = W({lb})"))
    return out


def _solve_lp(scenario: Scenario, conditions) -> tuple[Optional[np.ndarray], Optional[float]]:
    """Maximize the minimum strict margin over the polytope; returns (p, margin).

    Without strict conditions this degenerates to a pure feasibility
    check and the margin is None. Returns (None, None) when the LP is
    infeasible.
    """
    n = scenario.n_events
    strict = [c for kind, c, _ in conditions if kind == "strict"]
    equal = [c for kind, c, _ in conditions if kind == "equal"]
    a_eq = []
    b_eq = []
    for indices, total in scenario.groups():
        row = np.zeros(n + 1)
        row[list(indices)] = 1.0
        a_eq.append(row)
        b_eq.append(float(total))
    for c in equal:
        a_eq.append(np.append(c, 0.0))
        b_eq.append(0.0)
    bounds = [(0.0, 1.0)] * n
    if strict:
        # lifted variable s = joint margin; maximize it
        a_ub = [np.append(-c, 1.0) for c in strict]
        b_ub = [0.0] * len(strict)
        bounds.append((None, float(np.max(np.abs(strict)) * n + 1.0)))
        res = linprog(
            c=np.append(np.zeros(n), -1.0),
            A_ub=np.array(a_ub),
            b_ub=np.array(b_ub),
            A_eq=np.array(a_eq),
            b_eq=np.array(b_eq),
            bounds=bounds,
            method="highs",
        )
        if not res.success:
            return None, None
        return res.x[:n], float(res.x[n])
    res = linprog(
        c=np.zeros(n),
        A_eq=np.array(a_eq)[:, :n],
        b_eq=np.array(b_eq),
        bounds=bounds,
        method="highs",
    )
    if not res.success:
        return None, None
    return res.x, None


def _project_onto_polytope(scenario: Scenario, p: np.ndarray) -> ClassicalProbability:
    out = np.clip(np.array(p, dtype=float), 0.0, 1.0)
    for indices, total in scenario.groups():
        idx = list(indices)
        s = out[idx].sum()
        if s <= 0:
            # spread the group total evenly when the LP returned zeros
            out[idx] = float(total) / len(idx)
        else:
            out[idx] *= float(total) / s
    return ClassicalProbability(scenario, tuple(out.tolist()))


def _grid_axes(scenario: Scenario, step: float) -> tuple[list[np.ndarray], list[tuple[int, ...]]]:
    axes: list[np.ndarray] = []
    group_slots: list[tuple[int, ...]] = []
    slot = 0
    for _determined, total, free in _free_coordinates(scenario):
        slots = []
        for _ in free:
            axes.append(np.arange(0.0, float(total) + step / 2, step))
            slots.append(slot)
            slot += 1
        group_slots.append(tuple(slots))
    return axes, group_slots


def _grid_decision(
    scenario: Scenario, conditions, step: float
) -> Optional[bool]:
    """Cell-based dense sweep over the free coordinates.

    A cell (hypercube of adjacent grid points) witnesses the pattern
    when every strict condition is positive on all of its corners (an
    affine function positive on the corners is positive on the whole
    cell) and every equality condition changes sign or vanishes inside
    it. Returns None when there are too many free coordinates to sweep.
    """
    reduced = [(kind, _reduce(scenario, c)) for kind, c, _ in conditions]
    axes, group_slots = _grid_axes(scenario, step)
    d = len(axes)
    if d > 3:
        return None
    if d == 0:
        # fully pinned polytope: a single admissible point
        ok = True
        for kind, form in reduced:
            value = form.const
            ok &= (value > 1e-12) if kind == "strict" else (abs(value) <= STRICT_MARGIN)
        return bool(ok)
    mesh = np.meshgrid(*axes, indexing="ij") if d > 1 else [axes[0]]
    valid = np.ones(mesh[0].shape, dtype=bool)
    for slots, (_, total, free) in zip(group_slots, _free_coordinates(scenario)):
        if len(slots) > 1:
            total_used = sum(mesh[s] for s in slots)
            valid &= total_used <= float(total) + 1e-12
    values = []
    for _kind, form in reduced:
        v = np.full(mesh[0].shape, form.const, dtype=float)
        for j, c in enumerate(form.coeffs):
            v = v + c * mesh[j]
        values.append(v)

    corner_slices = list(product((slice(None, -1), slice(1, None)), repeat=d))
    cell_valid = np.ones(tuple(s - 1 for s in mesh[0].shape), dtype=bool)
    for sl in corner_slices:
        cell_valid &= valid[sl]
    feasible_cells = cell_valid
    for (kind, _), v in zip(reduced, values):
        corners = np.stack([v[sl] for sl in corner_slices], axis=0)
        if kind == "strict":
            feasible_cells = feasible_cells & np.all(corners > 1e-12, axis=0)
        else:
            feasible_cells = feasible_cells & (corners.min(axis=0) <= STRICT_MARGIN) & (
                corners.max(axis=0) >= -STRICT_MARGIN
            )
    return bool(np.any(feasible_cells))


def _infeasibility_certificate(scenario: Scenario, conditions, margin: Optional[float]) -> str:
    lines = [desc for _, _, desc in conditions]
    reduced = [(kind, _reduce(scenario, c).stacked()) for kind, c, _ in conditions]
    # point out when two conditions pull on one functional in opposite directions
    for i in range(len(reduced)):
        for j in range(i + 1, len(reduced)):
            vi, vj = reduced[i][1], reduced[j][1]
            scale = max(1.0, float(np.max(np.abs(vi))))
            if np.max(np.abs(vi)) <= 1e-12 * scale:
                continue
            k = int(np.argmax(np.abs(vi)))
            if abs(vi[k]) <= 1e-12:
                continue
            lam = vj[k] / vi[k]
            if np.max(np.abs(vj - lam * vi)) <= 1e-9 * scale * max(1.0, abs(lam)):
                if reduced[i][0] == "strict" and reduced[j][0] == "strict" and lam < 0:
                    lines.append(
                        "on the admissible set, condition "
                        f"{j + 1} is a negative multiple (factor {lam:.6g}) of condition {i + 1}; "
                        "the two cannot be strictly positive at the same time"
                    )
                elif lam != 0 and (reduced[i][0] == "equal") != (reduced[j][0] == "equal"):
                    lines.append(
                        f"conditions {i + 1} and {j + 1} constrain proportional functionals "
                        f"(factor {lam:.6g}); an exact zero and a strict sign cannot hold together"
                    )
    if margin is not None:
        lines.append(f"maximum joint strict margin over the admissible set: {margin:.3e} (needs >= {STRICT_MARGIN:.0e})")
    return "\n".join(lines)


def feasibility(
    scenario: Scenario,
    pattern: Union[PreferencePattern, str],
    u: UtilityFunction = DEFAULT_UTILITY,
    grid_step: float = 1e-3,
    grid_check: bool = True,
) -> FeasibilityResult:
    """Decide exactly whether a joint preference pattern is realizable classically.

    Each pattern entry constrains the affine functional W(first) -
    W(second) on the constraint polytope. The decision maximizes the
    joint strict margin by linear programming over the polytope's exact
    description; strict entries need an open region, so a feasible
    pattern returns a witness with margin at least 1e-9. A cell-based
    grid sweep at ``grid_step`` on the free coordinates must agree with
    the exact decision; disagreement raises, since it would mean the
    two decision procedures contradict each other.
    """
    if isinstance(pattern, str):
        pattern = PreferencePattern.from_text(scenario, pattern)
    conditions = _signed_conditions(scenario, pattern, u)
    u_independent = all(
        _is_single_swap(scenario, a, b) for a, b in scenario.question_pairs
    )
    p_opt, margin = _solve_lp(scenario, conditions)
    has_strict = any(kind == "strict" for kind, _, _ in conditions)

    feasible = p_opt is not None and (not has_strict or (margin is not None and margin >= STRICT_MARGIN))
    witness = None
    witness_margin: Optional[float] = None
    if feasible:
        witness = _project_onto_polytope(scenario, p_opt)
        # recompute the margins from the witness itself; the LP solution
        # must survive the projection onto the exact polytope
        margins = []
        for kind, coeffs, _ in conditions:
            value = float(np.dot(coeffs, witness.as_array()))
            if kind == "strict":
                margins.append(value)
            elif abs(value) > STRICT_MARGIN:
                feasible = False
        if feasible and margins:
            witness_margin = min(margins)
            if witness_margin < STRICT_MARGIN:
                feasible = False
        if not feasible:
            witness = None

    if grid_check:
        grid = _grid_decision(scenario, conditions, grid_step)
        grid_agrees = None if grid is None else (grid == feasible)
        if grid_agrees is False:
            raise RuntimeError(
                f"grid sweep (step {grid_step}) contradicts the exact feasibility decision "
                f"for pattern {pattern.describe(scenario)!r} on scenario {scenario.name!r}"
            )
    else:
        grid_agrees = None

    if feasible:
        certificate = "\n".join(desc for _, _, desc in conditions)
        if u_independent:
            certificate += (
                "\neach functional's sign depends only on the order of one payoff pair, "
                "so the analysis holds for every strictly increasing utility function"
            )
        return FeasibilityResult(
            scenario_name=scenario.name,
            pattern=pattern,
            feasible=True,
            witness=witness,
            certificate=certificate,
            margin=witness_margin,
            grid_agrees=grid_agrees,
            u_independent=u_independent,
        )

    certificate = _infeasibility_certificate(scenario, conditions, margin)
    if u_independent:
        certificate += (
            "\neach functional's sign depends only on the order of one payoff pair, "
            "so the impossibility holds for every strictly increasing utility function"
        )
    return FeasibilityResult(
        scenario_name=scenario.name,
        pattern=pattern,
        feasible=False,
        witness=None,
        certificate=certificate,
        margin=margin,
        grid_agrees=grid_agrees,
        u_independent=u_independent,
    )
