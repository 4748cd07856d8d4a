"""Finite syntactic approximations of the language, built breadth-first by depth.

Candidates are generated and deduplicated on their theory vectors in bulk
(numpy), and Formula objects are only materialised for survivors. Because
every lower-depth semantic class already has a representative, a new layer
only needs operator applications that involve at least one formula first
found at the previous layer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..model import Mdp
from .syntax import L, LPRIME, TOP, AddC, And, Dia, DiaPrime, Not, Plus, Rew, Scale, SubC

DEDUP_DECIMALS = 12
DEFAULT_GRID = (0.25, 0.5)


@dataclass(frozen=True, eq=False)
class Enumeration:
    formulas: list
    values: np.ndarray  # (len(formulas), n_states)
    depth_of: np.ndarray  # AST depth of each representative

    def __len__(self):
        return len(self.formulas)


def _keys(values):
    r = np.round(values, DEDUP_DECIMALS) + 0.0
    return np.ascontiguousarray(r).view(np.dtype((np.void, r.dtype.itemsize * r.shape[1]))).ravel()


def _pairs(frontier, count, ordered):
    """Index pairs (i, j) with at least one side in ``frontier``."""
    f = np.asarray(frontier)
    in_f = np.zeros(count, dtype=bool)
    in_f[f] = True
    i = np.repeat(f, count)
    j = np.tile(np.arange(count), len(f))
    if ordered:
        rest = np.flatnonzero(~in_f)
        return (np.concatenate([i, np.repeat(rest, len(f))]),
                np.concatenate([j, np.tile(f, len(rest))]))
    # (i, j) and (j, i) with both in the frontier are the same conjunction
    keep = ~in_f[j] | (j >= i)
    return i[keep], j[keep]


def enumerate_theory(m: Mdp, depth: int, scalar_grid: Sequence[float] = DEFAULT_GRID, c=0.5,
                     language: str = L, dedup: bool = True) -> Enumeration:
    """All formulas of AST depth <= ``depth`` over the standard signature.

    L uses ``T, not, and, dia_a, add r, sub r``; L' uses
    ``T, rew_a, not, and, diap_a, scale r, plus``. Scalars come from
    ``scalar_grid``. With ``dedup`` one representative per theory vector is
    kept (the shallowest, first generated).
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if language not in (L, LPRIME):
        raise ValueError(f"language must be {L!r} or {LPRIME!r}")
    grid = [float(r) for r in scalar_grid]
    if any(not 0.0 <= r <= 1.0 for r in grid):
        raise ValueError("scalar grid values must lie in [0,1]")
    c = float(getattr(c, "c", c))
    n, k = m.n_states, m.n_actions
    K, R = m.kernel, m.rewards

    formulas = [TOP]
    values = [np.ones(n)]
    if language == LPRIME:
        formulas += [Rew(a) for a in m.actions]
        values += [R[a].copy() for a in range(k)]
    V = np.array(values)
    depths = np.zeros(len(formulas), dtype=int)
    if dedup:
        _, first = np.unique(_keys(V), return_index=True)
        first = np.sort(first)
        formulas = [formulas[i] for i in first]
        V, depths = V[first], depths[first]
    frontier = np.arange(len(formulas))

    for level in range(1, depth + 1):
        F = V[frontier]
        blocks, ops = [], []  # ops[b] = (code, left indices, right indices) of block b

        def add(vals, code, i, j=None):
            blocks.append(vals)
            ops.append((code, np.asarray(i), None if j is None else np.asarray(j)))

        add(1.0 - F, "not", frontier)
        bi, bj = _pairs(frontier, len(V), ordered=not dedup)
        if language == L:
            add(np.minimum(V[bi], V[bj]), "and", bi, bj)
            for a in range(k):
                add(np.clip(c * F @ K[a].T + (1.0 - c) * R[a], 0.0, 1.0), ("dia", a), frontier)
            for r in grid:
                add(np.minimum(1.0, F + r), ("add", r), frontier)
                add(np.maximum(0.0, F - r), ("sub", r), frontier)
        else:
            add(np.minimum(V[bi], V[bj]), "and", bi, bj)
            add(np.minimum(1.0, V[bi] + V[bj]), "plus", bi, bj)
            for a in range(k):
                add(c * F @ K[a].T, ("diap", a), frontier)
            for r in grid:
                add(r * F, ("scale", r), frontier)

        cand = np.concatenate(blocks) if blocks else np.zeros((0, n))
        if dedup:
            allv = np.concatenate([V, cand])
            _, first = np.unique(_keys(allv), return_index=True)
            new = np.sort(first[first >= len(V)]) - len(V)
        else:
            new = np.arange(len(cand))

        offsets = np.cumsum([0] + [len(b) for b in blocks])
        new_formulas = []
        for idx in new:
            b = int(np.searchsorted(offsets, idx, side="right") - 1)
            row = idx - offsets[b]
            code, i, j = ops[b]
            new_formulas.append(_build(code, formulas, int(i[row]), None if j is None else int(j[row]), m))
        start = len(formulas)
        formulas.extend(new_formulas)
        V = np.concatenate([V, cand[new]])
        depths = np.concatenate([depths, np.full(len(new), level)])
        frontier = np.arange(start, len(formulas))
        if len(frontier) == 0:
            break
    return Enumeration(formulas, V, depths)


def _build(code, formulas, i, j, m):
    f = formulas[i]
    if code == "not":
        return Not(f)
    if code == "and":
        return And(f, formulas[j])
    if code == "plus":
        return Plus(f, formulas[j])
    name, param = code
    if name == "dia":
        return Dia(m.actions[param], f)
    if name == "diap":
        return DiaPrime(m.actions[param], f)
    if name == "add":
        return AddC(f, param)
    if name == "sub":
        return SubC(f, param)
    return Scale(param, f)


def enumerate_formulas(m: Mdp, depth: int, scalar_grid: Sequence[float] = DEFAULT_GRID, c=0.5,
                       language: str = L, dedup: bool = True) -> list:
    """Formula list of :func:`enumerate_theory`."""
    return enumerate_theory(m, depth, scalar_grid, c, language, dedup).formulas
