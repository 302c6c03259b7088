"""Decision scenarios: events, acts, probability constraints, question pairs.

A scenario holds an ordered list of elementary events, a payoff table
(one act per row), fixed-probability constraints over groups of events
(stored as exact rationals so downstream feasibility analysis stays
exact), and the pairs of acts posed as binary questions. Four urn
scenarios are built in; user scenarios load from a JSON document whose
schema is documented in :func:`load_scenario`.

The order inside a question pair is meaningful: the first-listed act is
the one whose preference fraction the experiment reports, and the first
act of each pair is the one a solve target's expectation difference is
anchored to.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .hilbert import HermitianOp


class ScenarioError(ValueError):
    """Raised for malformed scenarios, acts, constraints, or utility functions."""


@dataclass(frozen=True)
class UtilityFunction:
    """Strictly increasing map from dollar payoffs to utility values.

    Kinds: ``sqrt`` (u(x) = sqrt(x)), ``power`` (u(x) = x**alpha with
    alpha > 0), ``linear`` and ``identity`` (u(x) = x), and ``table``
    (explicit payoff -> utility pairs). Monotonicity is checked on a
    sampled grid of the domain it is applied to, and applying the
    function outside its domain is an error naming the payoff.
    """

    kind: str
    alpha: float | None = None
    table: tuple[tuple[float, float], ...] | None = None

    _KINDS = ("sqrt", "power", "linear", "identity", "table")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ScenarioError(f"unknown utility kind {self.kind!r}; expected one of {self._KINDS}")
        if self.kind == "power":
            if self.alpha is None or not self.alpha > 0:
                raise ScenarioError(f"power utility needs alpha > 0, got {self.alpha!r}")
        if self.kind == "table":
            if not self.table:
                raise ScenarioError("table utility needs at least one (payoff, value) pair")
            pairs = sorted((float(x), float(u)) for x, u in self.table)
            for (x0, u0), (x1, u1) in zip(pairs, pairs[1:]):
                if x1 == x0:
                    raise ScenarioError(f"table utility defines payoff {x0} twice")
                if u1 <= u0:
                    raise ScenarioError(f"table utility is not strictly increasing between payoffs {x0} and {x1}")
            object.__setattr__(self, "table", tuple(pairs))

    @staticmethod
    def sqrt() -> "UtilityFunction":
        return UtilityFunction("sqrt")

    @staticmethod
    def linear() -> "UtilityFunction":
        return UtilityFunction("linear")

    @staticmethod
    def identity() -> "UtilityFunction":
        return UtilityFunction("identity")

    @staticmethod
    def power(alpha: float) -> "UtilityFunction":
        return UtilityFunction("power", alpha=float(alpha))

    @staticmethod
    def from_table(mapping: Mapping[float, float]) -> "UtilityFunction":
        return UtilityFunction("table", table=tuple(mapping.items()))

    @staticmethod
    def parse(spec: str) -> "UtilityFunction":
        """Parse a CLI-style utility spec: ``sqrt``, ``linear``, ``identity``, or ``power:ALPHA``."""
        spec = spec.strip()
        if spec in ("sqrt", "linear", "identity"):
            return UtilityFunction(spec)
        if spec.startswith("power:"):
            try:
                return UtilityFunction.power(float(spec.split(":", 1)[1]))
            except ValueError as exc:
                raise ScenarioError(f"bad power utility spec {spec!r}: {exc}") from None
        raise ScenarioError(f"unknown utility spec {spec!r}; expected sqrt, linear, identity, or power:ALPHA")

    def __call__(self, payoff: float) -> float:
        x = float(payoff)
        if self.kind == "sqrt":
            if x < 0:
                raise ScenarioError(f"sqrt utility is undefined at payoff {x}")
            return math.sqrt(x)
        if self.kind == "power":
            if x < 0:
                raise ScenarioError(f"power utility is undefined at payoff {x}")
            return x ** self.alpha
        if self.kind in ("linear", "identity"):
            return x
        for px, u in self.table:
            if px == x:
                return u
        raise ScenarioError(f"table utility is undefined at payoff {x}")

    def check_increasing_on(self, payoffs: Iterable[float], grid: int = 101) -> None:
        """Verify strict monotonicity on the given payoffs plus a sampled grid between them.

        Raises
        ------
        ScenarioError
            If the function is undefined at some payoff or fails to
            strictly increase on the sampled points.
        """
        points = sorted(set(float(x) for x in payoffs))
        if not points:
            return
        values = [self(x) for x in points]  # raises if undefined at a payoff
        if self.kind != "table" and len(points) > 1:
            lo, hi = points[0], points[-1]
            sampled = sorted(set(points) | {lo + (hi - lo) * i / (grid - 1) for i in range(grid)})
            values = [self(x) for x in sampled]
            points = sampled
        for (x0, u0), (x1, u1) in zip(zip(points, values), zip(points[1:], values[1:])):
            if u1 <= u0:
                raise ScenarioError(
                    f"utility is not strictly increasing: u({x0}) = {u0} versus u({x1}) = {u1}"
                )

    def label(self) -> str:
        if self.kind == "power":
            return f"power:{self.alpha:g}"
        return self.kind


DEFAULT_UTILITY = UtilityFunction.sqrt()


@dataclass(frozen=True)
class Act:
    """A named act: one dollar payoff per elementary event."""

    label: str
    payoffs: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "payoffs", tuple(float(x) for x in self.payoffs))

    @property
    def n_events(self) -> int:
        return len(self.payoffs)


@dataclass(frozen=True)
class ProbabilityConstraint:
    """Fixed total probability over a group of event indices, stored exactly."""

    event_indices: frozenset[int]
    total: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "event_indices", frozenset(int(i) for i in self.event_indices))
        total = Fraction(self.total)
        if not 0 <= total <= 1:
            raise ScenarioError(f"constraint total {total} is outside [0, 1]")
        if not self.event_indices:
            raise ScenarioError("a probability constraint needs at least one event")
        object.__setattr__(self, "total", total)

    def sorted_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.event_indices))


@dataclass(frozen=True)
class Scenario:
    """Events, acts, exact probability constraints, and question pairs.

    The constraints must partition the events (disjoint groups covering
    every event, totals summing to 1); that partition is what both the
    classical simplex and the quantum state space are built on.
    """

    name: str
    events: tuple[str, ...]
    acts: tuple[Act, ...]
    constraints: tuple[ProbabilityConstraint, ...]
    question_pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(str(e) for e in self.events))
        object.__setattr__(self, "acts", tuple(self.acts))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "question_pairs", tuple((int(a), int(b)) for a, b in self.question_pairs))
        n = len(self.events)
        if n == 0:
            raise ScenarioError("a scenario needs at least one event")
        if len(set(self.events)) != n:
            raise ScenarioError(f"event labels must be unique, got {self.events}")
        labels = [a.label for a in self.acts]
        if len(set(labels)) != len(labels):
            raise ScenarioError(f"act labels must be unique, got {labels}")
        for act in self.acts:
            if act.n_events != n:
                raise ScenarioError(
                    f"act {act.label!r}: expected {n} payoffs (one per event), got {act.n_events}"
                )
        seen: set[int] = set()
        for c in self.constraints:
            for i in c.event_indices:
                if not 0 <= i < n:
                    raise ScenarioError(f"constraint references event index {i}, valid range is 0..{n - 1}")
                if i in seen:
                    raise ScenarioError(f"constraints overlap on event {self.events[i]!r}")
            seen |= c.event_indices
        if seen != set(range(n)):
            missing = [self.events[i] for i in sorted(set(range(n)) - seen)]
            raise ScenarioError(f"constraints do not cover events {missing}; groups must partition the events")
        total = sum((c.total for c in self.constraints), Fraction(0))
        if total != 1:
            raise ScenarioError(f"constraint totals must sum to 1, got {total} (partition violation)")
        for a, b in self.question_pairs:
            if not (0 <= a < len(self.acts) and 0 <= b < len(self.acts)):
                raise ScenarioError(f"question pair ({a}, {b}) references a missing act")
            if a == b:
                raise ScenarioError(f"question pair ({a}, {b}) must reference two distinct acts")

    @property
    def n_events(self) -> int:
        return len(self.events)

    def act(self, label_or_index: Union[str, int]) -> Act:
        """Look up an act by label or index."""
        if isinstance(label_or_index, int):
            try:
                return self.acts[label_or_index]
            except IndexError:
                raise ScenarioError(f"act index {label_or_index} out of range") from None
        for a in self.acts:
            if a.label == label_or_index:
                return a
        raise ScenarioError(f"unknown act {label_or_index!r}; scenario has {[a.label for a in self.acts]}")

    def act_index(self, label_or_index: Union[str, int]) -> int:
        if isinstance(label_or_index, int):
            self.act(label_or_index)
            return label_or_index
        for i, a in enumerate(self.acts):
            if a.label == label_or_index:
                return i
        raise ScenarioError(f"unknown act {label_or_index!r}; scenario has {[a.label for a in self.acts]}")

    def event_index(self, label_or_index: Union[str, int]) -> int:
        if isinstance(label_or_index, int):
            if not 0 <= label_or_index < self.n_events:
                raise ScenarioError(f"event index {label_or_index} out of range")
            return label_or_index
        try:
            return self.events.index(label_or_index)
        except ValueError:
            raise ScenarioError(f"unknown event {label_or_index!r}; scenario has {list(self.events)}") from None

    def groups(self) -> tuple[tuple[tuple[int, ...], Fraction], ...]:
        """Constraint groups as (sorted event indices, exact total), in first-index order."""
        items = [(c.sorted_indices(), c.total) for c in self.constraints]
        return tuple(sorted(items, key=lambda it: it[0][0]))

    def payoff_matrix(self) -> np.ndarray:
        return np.array([a.payoffs for a in self.acts], dtype=float)

    def to_document(self) -> dict:
        """Plain-dict form matching the JSON schema of :func:`load_scenario`."""
        return {
            "name": self.name,
            "events": list(self.events),
            "acts": [{"label": a.label, "payoffs": list(a.payoffs)} for a in self.acts],
            "constraints": [
                {"events": [self.events[i] for i in c.sorted_indices()], "total": str(c.total)}
                for c in self.constraints
            ],
            "question_pairs": [[self.acts[a].label, self.acts[b].label] for a, b in self.question_pairs],
        }

    def serialize(self) -> str:
        """JSON text that :func:`load_scenario` parses back to an equal scenario."""
        return json.dumps(self.to_document(), indent=2)


BUILTIN_NAMES = ("ellsberg3", "machina5051", "reflection_lower", "reflection_upper")


def _build_ellsberg3() -> Scenario:
    return Scenario(
        name="ellsberg3",
        events=("R", "Y", "B"),
        acts=(
            Act("f1", (100, 0, 0)),
            Act("f2", (0, 0, 100)),
            Act("f3", (100, 100, 0)),
            Act("f4", (0, 100, 100)),
        ),
        constraints=(
            ProbabilityConstraint(frozenset({0}), Fraction(1, 3)),
            ProbabilityConstraint(frozenset({1, 2}), Fraction(2, 3)),
        ),
        # pair 2 lists f4 first: the reported fraction is for f4 over f3
        question_pairs=((0, 1), (3, 2)),
    )


def _build_machina5051() -> Scenario:
    return Scenario(
        name="machina5051",
        events=("R", "Y", "B", "G"),
        acts=(
            Act("f1", (202, 202, 101, 101)),
            Act("f2", (202, 101, 202, 101)),
            Act("f3", (303, 202, 101, 0)),
            Act("f4", (303, 101, 202, 0)),
        ),
        constraints=(
            ProbabilityConstraint(frozenset({0, 1}), Fraction(50, 101)),
            ProbabilityConstraint(frozenset({2, 3}), Fraction(51, 101)),
        ),
        question_pairs=((0, 1), (3, 2)),
    )


def _build_reflection_lower() -> Scenario:
    return Scenario(
        name="reflection_lower",
        events=("R", "Y", "B", "G"),
        acts=(
            Act("f1", (0, 50, 25, 25)),
            Act("f2", (0, 25, 50, 25)),
            Act("f3", (25, 50, 25, 0)),
            Act("f4", (25, 25, 50, 0)),
        ),
        constraints=(
            ProbabilityConstraint(frozenset({0, 1}), Fraction(1, 2)),
            ProbabilityConstraint(frozenset({2, 3}), Fraction(1, 2)),
        ),
        # pair 2 lists f3 first: the reported fraction is for f3 over f4
        question_pairs=((0, 1), (2, 3)),
    )


def _build_reflection_upper() -> Scenario:
    return Scenario(
        name="reflection_upper",
        events=("R", "Y", "B", "G"),
        acts=(
            Act("f1", (50, 50, 25, 75)),
            Act("f2", (50, 25, 50, 75)),
            Act("f3", (75, 50, 25, 50)),
            Act("f4", (75, 25, 50, 50)),
        ),
        constraints=(
            ProbabilityConstraint(frozenset({0, 1}), Fraction(1, 2)),
            ProbabilityConstraint(frozenset({2, 3}), Fraction(1, 2)),
        ),
        question_pairs=((0, 1), (2, 3)),
    )


_BUILDERS = {
    "ellsberg3": _build_ellsberg3,
    "machina5051": _build_machina5051,
    "reflection_lower": _build_reflection_lower,
    "reflection_upper": _build_reflection_upper,
}


def builtin(name: str) -> Scenario:
    """Return one of the built-in scenarios by name.

    Valid names: ``ellsberg3``, ``machina5051``, ``reflection_lower``,
    ``reflection_upper``.
    """
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ScenarioError(f"unknown scenario {name!r}; built-ins are {BUILTIN_NAMES}") from None
    return builder()


def _require(document: Mapping, key: str, kind: type, where: str):
    if key not in document:
        raise ScenarioError(f"{where}: missing field {key!r}")
    value = document[key]
    if not isinstance(value, kind):
        raise ScenarioError(f"{where}: field {key!r} must be a {kind.__name__}, got {type(value).__name__}")
    return value


def _parse_total(raw, where: str) -> Fraction:
    if isinstance(raw, bool):
        raise ScenarioError(f"{where}: total must be a rational given as an integer fraction string, got {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ScenarioError(f"{where}: bad rational {raw!r} ({exc})") from None
    raise ScenarioError(
        f"{where}: total must be a rational given as an integer fraction string like \"50/101\", got {raw!r}"
    )


def load_scenario(document: Union[str, Mapping]) -> Scenario:
    """Parse a scenario from a JSON document (text or already-parsed mapping).

    Schema
    ------
    ::

        {
          "name": "my_urn",
          "events": ["R", "Y", "B"],
          "acts": [{"label": "f1", "payoffs": [100, 0, 0]}, ...],
          "constraints": [{"events": ["R"], "total": "1/3"}, ...],
          "question_pairs": [["f1", "f2"], ["f4", "f3"]]
        }

    Constraint totals are exact rationals written as integer fractions
    ("1/3", "50/101"); floats are rejected. Constraint ``events`` and
    ``question_pairs`` entries may be labels or 0-based indices. The
    constraint groups must partition the events. Validation failures
    name the offending field.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario document is not valid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise ScenarioError(f"scenario document must be a JSON object, got {type(document).__name__}")

    name = _require(document, "name", str, "scenario")
    events = _require(document, "events", list, f"scenario {name!r}")
    events = tuple(str(e) for e in events)
    raw_acts = _require(document, "acts", list, f"scenario {name!r}")
    acts = []
    for k, entry in enumerate(raw_acts):
        if not isinstance(entry, Mapping):
            raise ScenarioError(f"scenario {name!r}: acts[{k}] must be an object with label and payoffs")
        label = _require(entry, "label", str, f"acts[{k}]")
        payoffs = _require(entry, "payoffs", list, f"act {label!r}")
        if len(payoffs) != len(events):
            raise ScenarioError(
                f"act {label!r}: expected {len(events)} payoffs (one per event), got {len(payoffs)}"
            )
        try:
            acts.append(Act(label, tuple(float(x) for x in payoffs)))
        except (TypeError, ValueError):
            raise ScenarioError(f"act {label!r}: payoffs must be numbers, got {payoffs!r}") from None

    raw_constraints = _require(document, "constraints", list, f"scenario {name!r}")
    constraints = []
    for k, entry in enumerate(raw_constraints):
        if not isinstance(entry, Mapping):
            raise ScenarioError(f"scenario {name!r}: constraints[{k}] must be an object with events and total")
        raw_events = _require(entry, "events", list, f"constraints[{k}]")
        indices = set()
        for e in raw_events:
            if isinstance(e, bool):
                raise ScenarioError(f"constraints[{k}]: bad event reference {e!r}")
            if isinstance(e, int):
                if not 0 <= e < len(events):
                    raise ScenarioError(f"constraints[{k}]: event index {e} out of range 0..{len(events) - 1}")
                indices.add(e)
            elif isinstance(e, str):
                if e not in events:
                    raise ScenarioError(f"constraints[{k}]: unknown event {e!r}; events are {list(events)}")
                indices.add(events.index(e))
            else:
                raise ScenarioError(f"constraints[{k}]: bad event reference {e!r}")
        total = _parse_total(entry.get("total"), f"constraints[{k}]")
        constraints.append(ProbabilityConstraint(frozenset(indices), total))

    raw_pairs = _require(document, "question_pairs", list, f"scenario {name!r}")
    label_to_index = {a.label: i for i, a in enumerate(acts)}
    pairs = []
    for k, entry in enumerate(raw_pairs):
        if not isinstance(entry, Sequence) or isinstance(entry, str) or len(entry) != 2:
            raise ScenarioError(f"question_pairs[{k}] must be a pair of act labels or indices")
        resolved = []
        for e in entry:
            if isinstance(e, bool):
                raise ScenarioError(f"question_pairs[{k}]: bad act reference {e!r}")
            if isinstance(e, int):
                if not 0 <= e < len(acts):
                    raise ScenarioError(f"question_pairs[{k}]: act index {e} out of range")
                resolved.append(e)
            elif isinstance(e, str):
                if e not in label_to_index:
                    raise ScenarioError(f"question_pairs[{k}]: unknown act {e!r}")
                resolved.append(label_to_index[e])
            else:
                raise ScenarioError(f"question_pairs[{k}]: bad act reference {e!r}")
        pairs.append((resolved[0], resolved[1]))

    return Scenario(
        name=name,
        events=events,
        acts=tuple(acts),
        constraints=tuple(constraints),
        question_pairs=tuple(pairs),
    )


def load_scenario_file(path) -> Scenario:
    """Read and parse a scenario JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(fh.read())


def resolve_scenario(name_or_path: str) -> Scenario:
    """Interpret a CLI-style scenario argument as a builtin name or a file path."""
    if name_or_path in _BUILDERS:
        return builtin(name_or_path)
    import os

    if os.path.exists(name_or_path):
        return load_scenario_file(name_or_path)
    raise ScenarioError(
        f"unknown scenario {name_or_path!r}: not a built-in ({', '.join(BUILTIN_NAMES)}) and not an existing file"
    )


def utility_values(scenario: Scenario, act: Union[Act, str, int], u: UtilityFunction) -> np.ndarray:
    """Per-event utilities u(x_i) for an act, after validating u on the scenario's payoffs."""
    if isinstance(act, Act):
        found = scenario.act(act.label)
        if found != act:
            raise ScenarioError(f"act {act.label!r} does not belong to scenario {scenario.name!r}")
        act = found
    else:
        act = scenario.act(act)
    all_payoffs = [x for a in scenario.acts for x in a.payoffs]
    u.check_increasing_on(all_payoffs)
    return np.array([u(x) for x in act.payoffs], dtype=float)


def act_operator(scenario: Scenario, act: Union[Act, str, int], u: UtilityFunction = DEFAULT_UTILITY) -> HermitianOp:
    """Hermitian act operator: diagonal, with eigenvalue u(x_i) on event i.

    Eigenvalues follow the scenario's event order. Raises if the act
    does not belong to the scenario or u is undefined or non-increasing
    on the scenario's payoffs.
    """
    values = utility_values(scenario, act, u)
    return HermitianOp(np.diag(values.astype(np.complex128)))


@dataclass(frozen=True)
class ExperimentCounts:
    """Cell counts of the four answer combinations of a two-question experiment.

    ``n_f1f4`` counts participants preferring the first act of pair 1
    and the act labeled f4; the four cells must sum to ``n_total``.
    """

    n_f1f4: int
    n_f1f3: int
    n_f2f3: int
    n_f2f4: int
    n_total: int | None = None

    def __post_init__(self) -> None:
        cells = (self.n_f1f4, self.n_f1f3, self.n_f2f3, self.n_f2f4)
        for value in cells:
            if not isinstance(value, int) or value < 0:
                raise ScenarioError(f"cell counts must be non-negative integers, got {cells}")
        total = sum(cells)
        if self.n_total is None:
            object.__setattr__(self, "n_total", total)
        elif self.n_total != total:
            raise ScenarioError(f"cell counts {cells} sum to {total}, not the stated total {self.n_total}")
        if self.n_total <= 0:
            raise ScenarioError("an experiment needs at least one participant")

    def cells(self) -> tuple[int, int, int, int]:
        return (self.n_f1f4, self.n_f1f3, self.n_f2f3, self.n_f2f4)

    def to_dict(self) -> dict:
        return {
            "n_f1f4": self.n_f1f4,
            "n_f1f3": self.n_f1f3,
            "n_f2f3": self.n_f2f3,
            "n_f2f4": self.n_f2f4,
            "n_total": self.n_total,
        }
