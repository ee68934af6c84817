"""Generalised singular numbers as exact step functions.

A left-invariant operator on one of the models is block diagonal over the
dual, so ``t -> mu_t(A)`` is a non-increasing step function: each singular
value of each block contributes a step of length equal to the Plancherel
weight of its dual point. Everything here (distribution function, Lorentz
and weak norms, traces of Borel functions) is evaluated in closed form
block by block.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, InvalidParameter, UnsupportedModel


@dataclass(frozen=True, eq=False)
class StepRearrangement:
    """``mu_t = values[i]`` on ``[ends[i-1], ends[i])`` (``ends[-1] = 0``), zero after ``ends[-1]``."""

    ends: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        ends = np.asarray(self.ends, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if ends.shape != values.shape or ends.ndim != 1:
            raise InvalidInput("ends and values must be 1-D arrays of equal length")
        if values.size and (np.any(np.diff(ends) <= 0) or ends[0] <= 0):
            raise InvalidInput("breakpoints must be positive and strictly increasing")
        if values.size and (np.any(np.diff(values) >= 0) or values[-1] <= 0):
            raise InvalidInput("values must be positive and strictly decreasing")
        object.__setattr__(self, "ends", ends)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_masses(cls, values, masses) -> "StepRearrangement":
        """Sort ``values`` (each carrying ``masses``) into a decreasing step.

        Zero values and zero masses are dropped; equal values are merged.
        Ties keep their original order, so the result is deterministic.
        """
        values = np.asarray(values, dtype=float).ravel()
        masses = np.broadcast_to(np.asarray(masses, dtype=float), values.shape).ravel()
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(masses))):
            raise InvalidInput("non-finite singular values or masses")
        keep = (values > 0) & (masses > 0)
        values, masses = values[keep], masses[keep]
        order = np.argsort(-values, kind="stable")
        values, masses = values[order], masses[order]
        if values.size == 0:
            return cls(np.zeros(0), np.zeros(0))
        starts = np.concatenate([[True], values[1:] != values[:-1]])
        group = np.cumsum(starts) - 1
        merged_mass = np.bincount(group, weights=masses)
        return cls(np.cumsum(merged_mass), values[starts])

    @property
    def starts(self) -> np.ndarray:
        return np.concatenate([[0.0], self.ends[:-1]])

    @property
    def masses(self) -> np.ndarray:
        return np.diff(np.concatenate([[0.0], self.ends]))

    @property
    def total_mass(self) -> float:
        return float(self.ends[-1]) if self.ends.size else 0.0

    @property
    def is_empty(self) -> bool:
        return self.values.size == 0

    def rows(self):
        """``(t_start, t_end, value)`` triples for CSV export."""
        return list(zip(self.starts.tolist(), self.ends.tolist(), self.values.tolist()))


def rearrangement_of_symbol(sigma) -> StepRearrangement:
    """Pool the singular values of every block with its Plancherel weight."""
    svals = sigma.singular_values()
    weights = sigma.weights
    vals = np.concatenate([s for s in svals]) if svals else np.zeros(0)
    masses = np.concatenate([np.full(s.size, w) for s, w in zip(svals, weights)]) if svals else np.zeros(0)
    return StepRearrangement.from_masses(vals, masses)


def classical_rearrangement(phi, model) -> StepRearrangement:
    """Decreasing rearrangement of a radial scalar function on R^n.

    ``phi`` is either a callable of the radius or an array with one value
    per shell.
    """
    if model.kind != "euclidean_radial":
        raise UnsupportedModel("classical rearrangement needs the euclidean_radial model")
    vals = phi(model.radii) if callable(phi) else np.asarray(phi, dtype=float)
    return StepRearrangement.from_masses(np.abs(vals), model.volumes)


def mu_at(r: StepRearrangement, t: float) -> float:
    """Right-continuous evaluation of ``mu_t``."""
    if t < 0:
        raise InvalidParameter("t must be >= 0")
    i = int(np.searchsorted(r.ends, t, side="right"))
    return float(r.values[i]) if i < r.values.size else 0.0


def distribution_at(r: StepRearrangement, lam: float) -> float:
    """``d_lambda``: mass where ``mu`` strictly exceeds ``lam``."""
    if lam < 0:
        raise InvalidParameter("lambda must be >= 0")
    k = int(np.sum(r.values > lam))
    return float(r.ends[k - 1]) if k else 0.0


def distribution_closed(r: StepRearrangement, s: float) -> float:
    """Mass of ``{t : mu_t >= s}`` (closed superlevel set)."""
    k = int(np.sum(r.values >= s))
    return float(r.ends[k - 1]) if k else 0.0


def _block_sup(r: StepRearrangement, a: float) -> float:
    # sup_t t^a mu_t; on each block the sup is the left limit at its right end
    if r.is_empty:
        return 0.0
    if a == 0:
        return float(r.values[0])
    return float(np.max(r.values * r.ends**a))


def weak_norm(r: StepRearrangement, rr: float) -> float:
    """``sup_t t^{1/rr} mu_t`` (``rr = inf`` gives ``sup mu``)."""
    if not rr >= 1:
        raise InvalidParameter("weak index must be >= 1")
    return _block_sup(r, 0.0 if math.isinf(rr) else 1.0 / rr)


def lorentz_norm(r: StepRearrangement, p: float, q: float) -> float:
    """``(int (t^{1/p} mu_t)^q dt/t)^{1/q}``, closed form per block."""
    if not (p >= 1 and q >= 1):
        raise InvalidParameter("Lorentz indices must be >= 1")
    if math.isinf(q):
        return weak_norm(r, p)
    if r.is_empty:
        return 0.0
    if p == q:
        return float(np.sum(r.values**p * r.masses) ** (1.0 / p))
    e = q / p
    pieces = r.values**q * (r.ends**e - r.starts**e) / e
    return float(np.sum(pieces) ** (1.0 / q))


def sup_duality_check(r: StepRearrangement, alpha: float):
    """Return ``(sup_t t^alpha mu_t, sup_s s d_s^alpha)`` computed separately."""
    if alpha <= 0:
        raise InvalidParameter("alpha must be positive")
    first = _block_sup(r, alpha)
    # d_s is constant on [v_{i+1}, v_i); the sup over that interval is the
    # left limit at v_i, where d equals the closed superlevel mass at v_i
    second = 0.0
    for v in r.values:
        second = max(second, float(v) * distribution_closed(r, float(v)) ** alpha)
    return first, second


def trace_of_function(r: StepRearrangement, phi) -> float:
    """``tau(phi(|A|)) = int phi(mu_t) dt``; ``+inf`` when ``phi(0) != 0``."""
    if float(phi(0.0)) != 0.0:
        return math.inf
    if r.is_empty:
        return 0.0
    vals = np.asarray([phi(float(v)) for v in r.values], dtype=float)
    return float(np.sum(vals * r.masses))
