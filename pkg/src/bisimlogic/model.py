"""Finite-state Markov reward/decision processes and the value types around them.

A finite state space carries the power-set sigma-algebra, so measurability is
vacuous and every object below is a plain vector or matrix indexed by dense
0-based state ids. An MRP is simply an :class:`Mdp` with one action.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotReflexive,
    NotSymmetric,
    ParseError,
    SchemaError,
    TriangleViolation,
    ValidationError,
)

PROB_TOL = 1e-9
METRIC_TOL = 1e-9
MRP_ACTION = "τ"


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dist:
    """Probability vector over states."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1:
            raise DimensionMismatch("a distribution is a 1-d vector")
        if np.any(p < 0) or np.any(p > 1):
            raise ValidationError(f"probabilities must lie in [0,1], got {p}")
        total = p.sum()
        if abs(total - 1.0) > PROB_TOL:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", _frozen(p))

    def __array__(self, dtype=None, copy=None):
        return self.probs if dtype is None else self.probs.astype(dtype)

    def __len__(self):
        return len(self.probs)


@dataclass(frozen=True, eq=False)
class Predicate:
    """A [0,1]-valued function on states."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise DimensionMismatch("a predicate is a 1-d vector")
        if np.any(v < 0) or np.any(v > 1) or np.any(np.isnan(v)):
            raise ValidationError("predicate values must lie in [0,1]")
        object.__setattr__(self, "values", _frozen(v))

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class PMetric:
    """A validated [0,1]-valued pseudometric on states.

    Construct through :func:`validate_pmetric`; the constructor assumes the
    axioms were already checked.
    """

    d: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.d if dtype is None else self.d.astype(dtype)

    @property
    def n(self) -> int:
        return self.d.shape[0]


def validate_pmetric(d, tol: float = METRIC_TOL) -> PMetric:
    """Check reflexivity, symmetry, range and the triangle inequality.

    Raises the first violated axiom with the offending indices in
    ``witness``. Passing an existing :class:`PMetric` returns it unchanged.
    """
    if isinstance(d, PMetric):
        return d
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DimensionMismatch(f"metric must be a square matrix, got shape {d.shape}")
    n = d.shape[0]
    bad = np.argwhere((d < -tol) | (d > 1 + tol) | np.isnan(d))
    if len(bad):
        i, j = map(int, bad[0])
        raise ValidationError(f"d({i},{j})={d[i, j]!r} outside [0,1]", state=(i, j))
    diag = np.abs(np.diag(d))
    if np.any(diag > tol):
        i = int(np.argmax(diag))
        raise NotReflexive(f"d({i},{i})={d[i, i]!r} is not 0", witness=(i,))
    asym = np.abs(d - d.T)
    if np.any(asym > tol):
        i, j = map(int, np.unravel_index(np.argmax(asym), asym.shape))
        i, j = min(i, j), max(i, j)
        raise NotSymmetric(f"d({i},{j})={d[i, j]!r} but d({j},{i})={d[j, i]!r}", witness=(i, j))
    # excess[x, y, z] = d(x,z) - d(x,y) - d(y,z)
    excess = d[:, None, :] - d[:, :, None] - d[None, :, :]
    if n and excess.max() > tol:
        x, y, z = map(int, np.unravel_index(np.argmax(excess), excess.shape))
        raise TriangleViolation(
            f"d({x},{z})={d[x, z]!r} > d({x},{y}) + d({y},{z}) = {d[x, y] + d[y, z]!r}",
            witness=(x, y, z),
        )
    return PMetric(_frozen(np.clip(d, 0.0, 1.0)))


def dirac(x: int, n: int) -> Dist:
    """Point mass at state ``x`` in an ``n``-state space."""
    if not 0 <= x < n:
        raise IndexOutOfRange(f"state {x} out of range for {n} states")
    p = np.zeros(n)
    p[x] = 1.0
    return Dist(p)


@dataclass(frozen=True, eq=False)
class Mdp:
    """Finite MDP: ``kernel[a, x]`` is the successor distribution and
    ``rewards[a, x]`` the reward in [0,1] of action ``a`` at state ``x``."""

    states: tuple
    actions: tuple
    kernel: np.ndarray
    rewards: np.ndarray

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        actions = tuple(str(a) for a in self.actions)
        if len(set(states)) != len(states):
            raise ValidationError("state names must be unique")
        if len(set(actions)) != len(actions):
            raise ValidationError("action labels must be unique")
        if not states or not actions:
            raise ValidationError("a model needs at least one state and one action")
        n, k = len(states), len(actions)
        kernel = np.array(self.kernel, dtype=float)
        rewards = np.array(self.rewards, dtype=float)
        if kernel.shape != (k, n, n):
            raise ValidationError(f"kernel must have shape {(k, n, n)}, got {kernel.shape}")
        if rewards.shape != (k, n):
            raise ValidationError(f"rewards must have shape {(k, n)}, got {rewards.shape}")
        for a in range(k):
            for x in range(n):
                row = kernel[a, x]
                if np.any(np.isnan(row)) or np.any(row < 0) or np.any(row > 1):
                    raise ValidationError(
                        f"transition row ({actions[a]}, {states[x]}) has entries outside [0,1]",
                        action=actions[a], state=states[x])
                total = row.sum()
                if abs(total - 1.0) > PROB_TOL:
                    raise ValidationError(
                        f"transition row ({actions[a]}, {states[x]}) sums to {total!r}, not 1",
                        action=actions[a], state=states[x])
                kernel[a, x] = row / total
                r = rewards[a, x]
                if not 0.0 <= r <= 1.0:
                    raise ValidationError(
                        f"reward ({actions[a]}, {states[x]}) = {r!r} outside [0,1]",
                        action=actions[a], state=states[x])
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "kernel", _frozen(kernel))
        object.__setattr__(self, "rewards", _frozen(rewards))

    @classmethod
    def mrp(cls, kernel, rewards, states=None) -> "Mdp":
        """Single-action model; the action is labelled ``τ``."""
        kernel = np.asarray(kernel, dtype=float)
        states = states if states is not None else [f"s{i}" for i in range(kernel.shape[0])]
        return cls(states, (MRP_ACTION,), kernel[None], np.asarray(rewards, dtype=float)[None])

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    def action_index(self, label: str) -> int:
        from .errors import UnknownAction

        try:
            return self.actions.index(label)
        except ValueError:
            raise UnknownAction(label) from None

    def state_index(self, name) -> int:
        """Resolve a state name, or a decimal index given as int/str."""
        if isinstance(name, (int, np.integer)):
            if not 0 <= name < self.n_states:
                raise IndexOutOfRange(f"state {name} out of range for {self.n_states} states")
            return int(name)
        if name in self.states:
            return self.states.index(name)
        if str(name).isdigit():
            return self.state_index(int(name))
        raise IndexOutOfRange(f"no state named {name!r}")

    def row(self, action: int, state: int) -> Dist:
        return Dist(self.kernel[action, state])

    def with_rewards(self, rewards) -> "Mdp":
        return Mdp(self.states, self.actions, self.kernel, rewards)

    def to_dict(self) -> dict:
        return {
            "states": list(self.states),
            "actions": list(self.actions),
            "transitions": {a: self.kernel[i].tolist() for i, a in enumerate(self.actions)},
            "rewards": {a: self.rewards[i].tolist() for i, a in enumerate(self.actions)},
        }


def _require(doc, key, kind):
    if key not in doc:
        raise SchemaError(f"missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise SchemaError(f"field {key!r} must be a JSON {kind.__name__}")
    return value


def model_from_dict(doc) -> Mdp:
    if not isinstance(doc, dict):
        raise SchemaError("model document must be a JSON object")
    states = _require(doc, "states", list)
    actions = _require(doc, "actions", list)
    transitions = _require(doc, "transitions", dict)
    rewards = _require(doc, "rewards", dict)
    n = len(states)
    kernel, reward_rows = [], []
    for a in actions:
        if a not in transitions:
            raise SchemaError(f"missing transitions for action {a!r}")
        if a not in rewards:
            raise SchemaError(f"missing rewards for action {a!r}")
        rows, rs = transitions[a], rewards[a]
        if not isinstance(rows, list) or not isinstance(rs, list):
            raise SchemaError(f"transitions/rewards of action {a!r} must be arrays")
        if len(rows) != n:
            raise ValidationError(f"action {a!r} has {len(rows)} transition rows for {n} states", action=a)
        if len(rs) != n:
            raise ValidationError(f"action {a!r} has {len(rs)} rewards for {n} states", action=a)
        for x, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise ValidationError(
                    f"transition row ({a}, {states[x]}) must list {n} probabilities "
                    "(dangling state index)", action=a, state=states[x])
            for v in row + [rs[x]]:
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise SchemaError(f"non-numeric entry in ({a}, {states[x]})")
        kernel.append(rows)
        reward_rows.append(rs)
    for a in transitions:
        if a not in actions:
            raise ValidationError(f"transitions given for undeclared action {a!r}", action=a)
    return Mdp(states, actions, kernel, reward_rows)


def load_model(source) -> Mdp:
    """Read a model from JSON bytes, text, or a readable file object."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"model is not UTF-8: {exc}") from None
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    return model_from_dict(doc)


def dump_model(m: Mdp) -> str:
    """Serialize to the JSON schema read by :func:`load_model` (floats round-trip exactly)."""
    return json.dumps(m.to_dict(), indent=2, ensure_ascii=False)


# -- metric CSV ---------------------------------------------------------------

def format_number(v: float) -> str:
    """12 significant digits, trailing zeros kept."""
    return f"{float(v):#.12g}"


def metric_to_csv(d, states: Sequence[str]) -> str:
    d = np.asarray(d)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(states)
    for row in d:
        w.writerow([format_number(v) for v in row])
    return buf.getvalue()


def metric_from_csv(text: str):
    """Parse a metric CSV; returns ``(state_names, matrix)``."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise ParseError("empty metric CSV")
    names, body = rows[0], rows[1:]
    n = len(names)
    if len(body) != n or any(len(r) != n for r in body):
        raise ValidationError(f"metric CSV must be {n}x{n} after the header")
    try:
        d = np.array([[float(v) for v in r] for r in body])
    except ValueError as exc:
        raise ParseError(f"non-numeric metric entry: {exc}") from None
    return names, d
