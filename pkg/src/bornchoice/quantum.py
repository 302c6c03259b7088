"""Born-rule beliefs and state-dependent expected utility.

A decision-maker's beliefs are a unit vector over the event basis: the
squared modulus of each amplitude is the subjective probability of that
event, and the expected utility of an act is the quadratic form of the
act's diagonal payoff-utility operator in that state. On a single state
this reproduces the classical value exactly; the point of the vector
representation is that different questions may be evaluated in
different states, which is where classically impossible preference
patterns become representable.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import hilbert
from .classical import ClassicalProbability
from .scenarios import (
    DEFAULT_UTILITY,
    Act,
    Scenario,
    ScenarioError,
    UtilityFunction,
    act_operator,
    utility_values,
)

# polar inputs are snapped onto the constraint surface when they are
# this close; printed 3-decimal vectors land well inside the band
SNAP_TOL = 5e-3

# the quantum and direct probability-weighted evaluations of one act
# must agree to this; larger gaps mean corrupted state or operator
CROSS_CHECK_TOL = 1e-10

INDIFFERENCE_BAND = 1e-9


@dataclass(frozen=True)
class QuantumState:
    """Belief vector in polar form over a scenario's event basis.

    ``moduli[i]`` squared is the subjective probability of event i and
    must satisfy the scenario's group constraints exactly (within
    1e-12); phases are stored in radians and enter only through
    interference terms such as overlaps between states. Construct via
    :func:`state_from_polar` or :func:`initial_state`, which handle
    snapping measured vectors onto the constraint surface.
    """

    scenario: Scenario
    moduli: tuple[float, ...]
    phases: tuple[float, ...]

    def __post_init__(self) -> None:
        moduli = tuple(float(m) for m in self.moduli)
        phases = tuple(float(p) for p in self.phases)
        n = self.scenario.n_events
        if len(moduli) != n or len(phases) != n:
            raise ScenarioError(
                f"state needs {n} moduli and {n} phases, got {len(moduli)} and {len(phases)}"
            )
        for label, m in zip(self.scenario.events, moduli):
            if m < 0:
                raise ScenarioError(f"modulus of event {label!r} is negative ({m})")
        norm_sq = sum(m * m for m in moduli)
        if abs(norm_sq - 1.0) > 1e-6:
            raise ScenarioError(f"squared moduli sum to {norm_sq!r}, state is not a unit vector")
        for indices, total in self.scenario.groups():
            s = sum(moduli[i] ** 2 for i in indices)
            if abs(s - float(total)) > 1e-12:
                labels = [self.scenario.events[i] for i in indices]
                raise ScenarioError(
                    f"squared moduli of group {labels} sum to {s!r}, constraint requires {float(total)!r}; "
                    "build states with state_from_polar so they are projected onto the constraints"
                )
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "phases", phases)

    @property
    def phases_deg(self) -> tuple[float, ...]:
        return tuple(math.degrees(p) for p in self.phases)

    def ket(self) -> hilbert.Ket:
        amps = [m * cmath.exp(1j * p) for m, p in zip(self.moduli, self.phases)]
        return hilbert.ket(amps)

    def probabilities(self) -> tuple[float, ...]:
        return tuple(m * m for m in self.moduli)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.name,
            "events": list(self.scenario.events),
            "moduli": list(self.moduli),
            "phases_deg": list(self.phases_deg),
            "probabilities": list(self.probabilities()),
        }

    def __repr__(self) -> str:
        body = ", ".join(
            f"{e}: {m:.6g}@{d:.6g}deg"
            for e, m, d in zip(self.scenario.events, self.moduli, self.phases_deg)
        )
        return f"QuantumState({self.scenario.name}; {body})"


def state_from_polar(
    scenario: Scenario,
    moduli: Sequence[float],
    phases_deg: Optional[Sequence[float]] = None,
    snap_tol: float = SNAP_TOL,
) -> QuantumState:
    """Build a state from moduli and phases in degrees, snapping onto the constraints.

    Rounded vectors (for instance three-decimal printouts) rarely sit on
    the constraint surface exactly; each group's moduli are rescaled by
    a common factor so the squared group sums match the exact rational
    totals. Inputs whose group sums are off by more than ``snap_tol``
    are rejected rather than silently repaired. Negative moduli are
    folded into the phase (modulus made positive, phase shifted by half
    a turn).
    """
    n = scenario.n_events
    mods = np.array([float(m) for m in moduli], dtype=float)
    if mods.shape != (n,):
        raise ScenarioError(f"expected {n} moduli, got {mods.size}")
    if phases_deg is None:
        phs = np.zeros(n)
    else:
        phs = np.array([math.radians(float(d)) for d in phases_deg], dtype=float)
        if phs.shape != (n,):
            raise ScenarioError(f"expected {n} phases, got {phs.size}")
    negative = mods < 0
    mods = np.abs(mods)
    phs = np.where(negative, phs + math.pi, phs)

    norm_sq = float(np.sum(mods**2))
    if abs(norm_sq - 1.0) > snap_tol:
        raise ScenarioError(
            f"squared moduli sum to {norm_sq:.6g}; off from 1 by more than snap tolerance {snap_tol:g}"
        )
    for indices, total in scenario.groups():
        idx = list(indices)
        s = float(np.sum(mods[idx] ** 2))
        t = float(total)
        if abs(s - t) > snap_tol:
            labels = [scenario.events[i] for i in idx]
            raise ScenarioError(
                f"squared moduli of group {labels} sum to {s:.6g}, constraint requires {t:.6g}; "
                f"gap exceeds snap tolerance {snap_tol:g}"
            )
        if s <= 0:
            raise ScenarioError(
                f"group {[scenario.events[i] for i in idx]} has zero total amplitude; cannot rescale"
            )
        mods[idx] *= math.sqrt(t / s)
    return QuantumState(scenario, tuple(mods.tolist()), tuple(phs.tolist()))


def initial_state(scenario: Scenario) -> QuantumState:
    """Uninformed state: each group's probability spread evenly over its events, zero phases."""
    n = scenario.n_events
    mods = np.zeros(n)
    for indices, total in scenario.groups():
        share = float(total) / len(indices)
        for i in indices:
            mods[i] = math.sqrt(share)
    return QuantumState(scenario, tuple(mods.tolist()), (0.0,) * n)


def subjective_probabilities(state: QuantumState) -> ClassicalProbability:
    """The squared-modulus probability of each event, as a classical assignment."""
    return ClassicalProbability(state.scenario, state.probabilities())


def expected_utility(
    state: QuantumState, act: Union[Act, str, int], u: UtilityFunction = DEFAULT_UTILITY
) -> float:
    """Expected utility of an act in a belief state, via the act's operator.

    Evaluates the quadratic form of the diagonal payoff-utility operator
    in the state vector, and cross-checks it against the direct
    probability-weighted sum; the two must agree to 1e-10.
    """
    op = act_operator(state.scenario, act, u)
    value = hilbert.expectation(op, state.ket())
    direct = float(np.dot(np.array(state.probabilities()), utility_values(state.scenario, act, u)))
    if abs(value - direct) > CROSS_CHECK_TOL:
        raise RuntimeError(
            f"operator evaluation {value!r} and probability-weighted sum {direct!r} disagree "
            f"beyond {CROSS_CHECK_TOL:g} for act {state.scenario.act(act).label!r}"
        )
    return value


def preference(
    state: QuantumState,
    first: Union[Act, str, int],
    second: Union[Act, str, int],
    u: UtilityFunction = DEFAULT_UTILITY,
    tol: float = INDIFFERENCE_BAND,
) -> str:
    """Compare two acts in one state: '>', '<', or '=' within an indifference band."""
    gap = expected_utility(state, first, u) - expected_utility(state, second, u)
    if gap > tol:
        return ">"
    if gap < -tol:
        return "<"
    return "="


def expected_ball_counts(
    state: QuantumState, event_labels: Sequence[str], total_balls: float
) -> dict[str, float]:
    """Expected composition of an urn's unknown portion implied by the beliefs.

    ``event_labels`` must be exactly the events of one constraint group
    (the draw outcomes whose joint chance is fixed but whose split is
    not); each event's share of ``total_balls`` is its probability
    divided by the group total.
    """
    scenario = state.scenario
    if total_balls <= 0:
        raise ScenarioError(f"total ball count must be positive, got {total_balls}")
    indices = tuple(sorted(scenario.event_index(lab) for lab in event_labels))
    for group, total in scenario.groups():
        if group == indices:
            group_total = float(total)
            break
    else:
        raise ScenarioError(
            f"events {list(event_labels)} do not form a constraint group of scenario {scenario.name!r}"
        )
    probs = state.probabilities()
    return {
        scenario.events[i]: total_balls * probs[i] / group_total for i in indices
    }


def overlap(a: QuantumState, b: QuantumState) -> complex:
    """Inner product between two belief states over the same scenario."""
    if a.scenario.name != b.scenario.name or a.scenario.events != b.scenario.events:
        raise ScenarioError("states belong to different scenarios")
    return hilbert.inner_product(a.ket(), b.ket())
