"""Fourier transforms, L^p norms and partial sums on compact models.

``f^(pi) = sum_x w_x f(x) pi(x)^*`` and
``f(x) = sum_pi d_pi Tr(f^(pi) pi(x))``. Cyclic and torus models use FFTs
and SU(2) a separable Euler-angle contraction; both are factorisations of
the same quadrature sums, checked against the dense sums in the tests.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, InvalidParameter, UnsupportedModel
from .groups import GroupModel

EPS = 1e-300


@dataclass(frozen=True, eq=False)
class GroupFunction:
    """Samples of a function at the quadrature nodes of ``model``."""

    model: GroupModel
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 1 or vals.shape[0] != self.model.n_nodes:
            raise InvalidInput(f"expected {self.model.n_nodes} samples, got shape {vals.shape}")
        object.__setattr__(self, "values", vals)

    def __add__(self, other):
        return GroupFunction(self.model, self.values + other.values)

    def __mul__(self, c):
        return GroupFunction(self.model, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SymbolField:
    """A matrix (or diagonal vector) attached to each dual point.

    Compact models hold ``d_pi x d_pi`` complex matrices; dual-only models
    hold 1-D arrays of diagonal entries.
    """

    model: GroupModel
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(np.asarray(b) for b in self.blocks)
        if len(blocks) != len(self.model.dual):
            raise InvalidInput(f"expected {len(self.model.dual)} blocks, got {len(blocks)}")
        compact = self.model.is_compact
        for p, b in zip(self.model.dual, blocks):
            if compact:
                if b.shape != (p.dim, p.dim):
                    raise InvalidInput(f"block {p.index} has shape {b.shape}, expected {(p.dim, p.dim)}")
            elif b.ndim != 1:
                raise InvalidInput("dual-only symbols are diagonal vectors")
        flat = np.concatenate([b.ravel() for b in blocks]) if blocks else np.zeros(0)
        if not np.all(np.isfinite(flat)):
            bad = next(i for i, b in enumerate(blocks) if not np.all(np.isfinite(b)))
            raise InvalidInput(f"non-finite entries in block {bad}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def is_diagonal(self) -> bool:
        return not self.model.is_compact

    @property
    def weights(self) -> np.ndarray:
        return self.model.plancherel_weights

    def adjoint(self) -> "SymbolField":
        if self.is_diagonal:
            return SymbolField(self.model, tuple(np.conj(b) for b in self.blocks))
        return SymbolField(self.model, tuple(b.conj().T for b in self.blocks))

    def singular_values(self) -> list:
        """Descending singular values of every block (batched per shape)."""
        if self.is_diagonal:
            return [np.sort(np.abs(b))[::-1] for b in self.blocks]
        out = [None] * len(self.blocks)
        by_dim: dict = {}
        for i, b in enumerate(self.blocks):
            by_dim.setdefault(b.shape[0], []).append(i)
        for _, idx in by_dim.items():
            sv = np.linalg.svd(np.stack([self.blocks[i] for i in idx]), compute_uv=False)
            for i, s in zip(idx, sv):
                out[i] = s
        return out

    def op_norms(self) -> np.ndarray:
        return np.array([s[0] if s.size else 0.0 for s in self.singular_values()])

    def matmul(self, other: "SymbolField") -> "SymbolField":
        if self.is_diagonal:
            return SymbolField(self.model, tuple(a * b for a, b in zip(self.blocks, other.blocks)))
        return SymbolField(self.model, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))


def _require_quadrature(model):
    if not model.has_quadrature:
        raise UnsupportedModel(f"{model.kind} model has no quadrature")


def forward_transform(f: GroupFunction) -> SymbolField:
    _require_quadrature(f.model)
    return SymbolField(f.model, tuple(f.model._forward(f.values)))


def inverse_transform(sigma: SymbolField) -> GroupFunction:
    _require_quadrature(sigma.model)
    return GroupFunction(sigma.model, sigma.model._inverse(list(sigma.blocks)))


def lp_norm(f: GroupFunction, p: float) -> float:
    """Quadrature L^p norm; ``p = inf`` is the maximum over nodes."""
    if not p >= 1:
        raise InvalidParameter(f"p must be >= 1, got {p}")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max()) if a.size else 0.0
    _, w = f.model.quadrature()
    return float(np.sum(w * a**p) ** (1.0 / p))


def hs_norm_sq(sigma: SymbolField) -> float:
    """``sum_pi d_pi ||sigma(pi)||_HS^2``."""
    flat = np.concatenate([b.ravel() for b in sigma.blocks])
    dims = np.repeat(sigma.model.dims, [b.size for b in sigma.blocks])
    return float(np.sum(dims * np.abs(flat) ** 2))


def plancherel_defect(f: GroupFunction) -> float:
    """Relative mismatch between ``||f||_2^2`` and the dual-side energy."""
    lhs = lp_norm(f, 2) ** 2
    rhs = hs_norm_sq(forward_transform(f))
    return abs(lhs - rhs) / max(lhs, EPS)


def partial_sum(f: GroupFunction, Q) -> GroupFunction:
    """Projection of ``f`` onto the isotypic components listed in ``Q``."""
    model = f.model
    keep = set()
    for p in Q:
        if p.index >= len(model.dual) or model.dual[p.index] != p:
            raise InvalidParameter(f"dual point {p!r} does not belong to this model")
        keep.add(p.index)
    fh = forward_transform(f)
    blocks = tuple(b if i in keep else np.zeros_like(b) for i, b in enumerate(fh.blocks))
    return inverse_transform(SymbolField(model, blocks))


# --------------------------------------------------------------------------
# constructors


def from_callable(model: GroupModel, fn) -> GroupFunction:
    """Sample ``fn(points)`` at the quadrature nodes."""
    pts, _ = model.quadrature()
    return GroupFunction(model, np.asarray(fn(pts), dtype=complex))


def constant(model: GroupModel, c: complex = 1.0) -> GroupFunction:
    return GroupFunction(model, np.full(model.n_nodes, c, dtype=complex))


def character(model: GroupModel, point) -> GroupFunction:
    """``x -> Tr pi(x)`` for the dual point ``point``."""
    blocks = tuple(
        (np.eye(p.dim) / p.dim if p.index == point.index else np.zeros((p.dim, p.dim))).astype(complex)
        for p in model.dual
    )
    return inverse_transform(SymbolField(model, blocks))


def zero_symbol(model: GroupModel) -> SymbolField:
    if model.is_compact:
        return SymbolField(model, tuple(np.zeros((p.dim, p.dim), dtype=complex) for p in model.dual))
    return SymbolField(model, tuple(np.zeros(1) for _ in model.dual))


def identity_symbol(model: GroupModel) -> SymbolField:
    return SymbolField(model, tuple(np.eye(p.dim, dtype=complex) for p in model.dual))


def random_symbol(model: GroupModel, rng, support=None, rank=None) -> SymbolField:
    """Standard complex Gaussian blocks on ``support`` (indices), zero elsewhere.

    ``rank`` optionally maps an index to the rank of its block. Full-rank
    blocks are drawn in one batch per block dimension.
    """
    n = len(model.dual)
    keep = np.zeros(n, dtype=bool)
    keep[list(range(n)) if support is None else [int(i) for i in support]] = True
    rank = rank or {}
    dims = model.dims
    blocks = [None] * n
    for d in np.unique(dims):
        idx = np.flatnonzero(dims == d)
        g = (rng.standard_normal((idx.size, d, d)) + 1j * rng.standard_normal((idx.size, d, d))) / np.sqrt(2)
        for i, b in zip(idx, g):
            blocks[i] = b if keep[i] else np.zeros((d, d), dtype=complex)
    for i, r in sorted(rank.items()):
        d = int(dims[i])
        r = max(1, min(d, int(r)))
        if keep[i] and r < d:
            a = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
            b = rng.standard_normal((r, d)) + 1j * rng.standard_normal((r, d))
            blocks[i] = a @ b / np.sqrt(2 * r)
    return SymbolField(model, tuple(blocks))


def random_band_limited(model: GroupModel, rng, support=None, rank=None) -> GroupFunction:
    return inverse_transform(random_symbol(model, rng, support, rank))
