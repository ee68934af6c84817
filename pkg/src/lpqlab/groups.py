"""Finite computable models of unimodular groups.

Compact models (cyclic, torus, SU(2)) carry a quadrature that integrates
products of retained matrix coefficients exactly, so Fourier transforms,
Plancherel and Schur orthogonality hold to rounding. The Heisenberg and
Euclidean models are dual-only: they hold spectral data and Plancherel
weights but no points of the group.

Haar measure has total mass one on compact models, and the dual carries
counting measure weighted by the dimension of each representation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CapacityError, InvalidParameter, UnderResolvedQuadrature, UnsupportedModel
from .kernels import wigner_d_table

DUAL_CAP = 1_000_000

KINDS = ("cyclic", "torus", "su2", "heisenberg_spectral", "euclidean_radial")


@dataclass(frozen=True)
class DualPoint:
    """One class of irreducible representations.

    ``spectral_tag`` orders the dual; ``eigenvalue`` is the Laplacian
    eigenvalue on the isotypic component (None for Heisenberg cells).
    ``label`` is the model-specific parameter: the character index on
    Z_N and T^d, ``l`` on SU(2), ``lambda`` on the Heisenberg group and
    the representative radius on R^n.
    """

    index: int
    dim: int
    plancherel_weight: float
    spectral_tag: float
    label: object
    eigenvalue: float | None = None
    highest_weight: tuple | None = None


def _order_dual(points):
    # ties broken by (dim, lexicographic highest weight); total and deterministic
    def key(p):
        hw = p.highest_weight if p.highest_weight is not None else ()
        return (p.spectral_tag, p.dim, hw, repr(p.label))

    ordered = sorted(points, key=key)
    return tuple(
        DualPoint(i, p.dim, p.plancherel_weight, p.spectral_tag, p.label, p.eigenvalue, p.highest_weight)
        for i, p in enumerate(ordered)
    )


@dataclass(frozen=True, eq=False)
class GroupModel:
    """Common surface of all models."""

    kind: str
    dual: tuple
    topo_dim: int
    homogeneous_dim: int | None = None
    rank: int | None = None
    rho: tuple | None = None
    haar_mass: float | None = None
    params: dict = field(default_factory=dict)

    @property
    def is_compact(self) -> bool:
        return self.kind in ("cyclic", "torus", "su2")

    @property
    def has_quadrature(self) -> bool:
        return self.is_compact

    @property
    def dims(self) -> np.ndarray:
        return np.array([p.dim for p in self.dual], dtype=np.int64)

    @property
    def plancherel_weights(self) -> np.ndarray:
        return np.array([p.plancherel_weight for p in self.dual], dtype=float)

    def describe(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.kind}({inner})"

    def quadrature(self):
        """Return ``(points, weights)``; raises for dual-only models."""
        raise UnsupportedModel(f"{self.kind} model has no quadrature")

    def rep_eval(self, point: DualPoint, x) -> np.ndarray:
        raise UnsupportedModel(f"{self.kind} model has no representation matrices")

    # transform hooks, overridden by compact models
    def _forward(self, values: np.ndarray) -> list:
        raise UnsupportedModel(f"{self.kind} model is dual-only")

    def _inverse(self, blocks: list) -> np.ndarray:
        raise UnsupportedModel(f"{self.kind} model is dual-only")

    @property
    def n_nodes(self) -> int:
        return len(self.quadrature()[1])


# --------------------------------------------------------------------------
# cyclic group Z_N


@dataclass(frozen=True, eq=False)
class CyclicModel(GroupModel):
    @cached_property
    def _chars(self) -> np.ndarray:
        return np.array([p.label for p in self.dual], dtype=np.int64)

    def quadrature(self):
        N = self.params["N"]
        return np.arange(N), np.full(N, 1.0 / N)

    def rep_eval(self, point, x):
        N = self.params["N"]
        return np.array([[np.exp(2j * np.pi * point.label * int(x) / N)]])

    def _forward(self, values):
        N = self.params["N"]
        coeffs = np.fft.fft(values) / N
        return [c.reshape(1, 1) for c in coeffs[self._chars]]

    def _inverse(self, blocks):
        N = self.params["N"]
        coeffs = np.zeros(N, dtype=complex)
        coeffs[self._chars] = [b[0, 0] for b in blocks]
        return np.fft.ifft(coeffs) * N


def build_cyclic(N: int) -> CyclicModel:
    """Cyclic group Z_N with characters ordered by ``1 + min(k, N-k)^2``."""
    if int(N) != N or N < 1:
        raise InvalidParameter(f"N must be a positive integer, got {N!r}")
    N = int(N)
    points = []
    for k in range(N):
        signed = k if 2 * k <= N else k - N
        eig = float(min(k, N - k) ** 2)
        points.append(DualPoint(0, 1, 1.0, 1.0 + eig, k, eig, (signed,)))
    return CyclicModel(
        kind="cyclic", dual=_order_dual(points), topo_dim=1, rank=1,
        haar_mass=1.0, params={"N": N},
    )


# --------------------------------------------------------------------------
# torus T^d


@dataclass(frozen=True, eq=False)
class TorusModel(GroupModel):
    @property
    def grid_size(self) -> int:
        return 2 * self.params["band"] + 2

    @cached_property
    def _quad(self):
        d, M = self.params["d"], self.grid_size
        axes = [2 * np.pi * np.arange(M) / M] * d
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        return pts, np.full(M**d, 1.0 / M**d)

    def quadrature(self):
        return self._quad

    @cached_property
    def _fft_index(self):
        M = self.grid_size
        ks = np.array([p.label for p in self.dual], dtype=np.int64) % M
        return tuple(ks.T)

    def rep_eval(self, point, x):
        return np.array([[np.exp(1j * np.dot(point.label, np.asarray(x, dtype=float)))]])

    def _forward(self, values):
        d, M = self.params["d"], self.grid_size
        coeffs = np.fft.fftn(values.reshape((M,) * d)) / M**d
        return [c.reshape(1, 1) for c in coeffs[self._fft_index]]

    def _inverse(self, blocks):
        d, M = self.params["d"], self.grid_size
        arr = np.zeros((M,) * d, dtype=complex)
        arr[self._fft_index] = [b[0, 0] for b in blocks]
        return (np.fft.ifftn(arr) * M**d).ravel()


def build_torus(d: int, band: int, cap: int = DUAL_CAP) -> TorusModel:
    """Torus T^d with characters ``|k|_inf <= band`` and a uniform grid."""
    if d < 1 or band < 1:
        raise InvalidParameter("torus needs d >= 1 and band >= 1")
    if (2 * band + 1) ** d > cap or (2 * band + 2) ** d > cap:
        raise CapacityError(f"torus d={d}, band={band} exceeds the dual cap {cap}")
    points = []
    for k in itertools.product(range(-band, band + 1), repeat=d):
        eig = float(sum(x * x for x in k))
        points.append(DualPoint(0, 1, 1.0, 1.0 + eig, tuple(k), eig, tuple(k)))
    return TorusModel(
        kind="torus", dual=_order_dual(points), topo_dim=d, rank=d,
        rho=(1,) * d, haar_mass=1.0, params={"d": d, "band": band},
    )


# --------------------------------------------------------------------------
# SU(2)


@dataclass(frozen=True, eq=False)
class SU2Model(GroupModel):
    """SU(2) truncated at ``l_max`` with Euler-angle product quadrature.

    Matrix entries are ``pi_l(a, b, g)[m, m'] = exp(-i m a) d^l_{m m'}(b)
    exp(-i m' g)`` with ``a in [0, 2pi)``, ``b in [0, pi]``,
    ``g in [0, 4pi)`` and rows ordered ``m = l, ..., -l``.
    """

    @property
    def two_lmax(self) -> int:
        return int(round(2 * self.params["l_max"]))

    @cached_property
    def _angles(self):
        M = self.params["quad_order"]
        x, w = np.polynomial.legendre.leggauss(M)
        alpha = 2 * np.pi * np.arange(M) / M
        beta = np.arccos(x)
        gamma = 4 * np.pi * np.arange(M) / M
        return alpha, beta, gamma, w / 2

    @cached_property
    def _quad(self):
        alpha, beta, gamma, wb = self._angles
        M = len(alpha)
        A, B, C = np.meshgrid(alpha, beta, gamma, indexing="ij")
        pts = np.stack([A, B, C], axis=-1).reshape(-1, 3)
        weights = (np.ones(M)[:, None, None] * wb[None, :, None] * np.ones(M)[None, None, :]) / M**2
        return pts, weights.ravel()

    def quadrature(self):
        return self._quad

    @cached_property
    def _dtab(self):
        return wigner_d_table(self.two_lmax, self._angles[1])

    @cached_property
    def _mgrid(self):
        # all m values |m| <= l_max on the half-integer lattice, descending
        t = self.two_lmax
        ms = 0.5 * np.arange(t, -t - 1, -1)
        alpha, _, gamma, _ = self._angles
        return ms, np.exp(1j * np.outer(alpha, ms)), np.exp(1j * np.outer(gamma, ms))

    def _m_index(self, l2):
        # positions of m = l..-l inside the global m grid
        t = self.two_lmax
        return np.arange(t - l2, t - l2 + 2 * l2 + 1, 2)

    def rep_eval(self, point, x):
        a, b, g = (float(v) for v in x)
        l2 = point.highest_weight[0]
        d = wigner_d_table(l2, np.array([b]))[l2][0]
        m = 0.5 * l2 - np.arange(l2 + 1)
        return np.exp(-1j * m * a)[:, None] * d * np.exp(-1j * m * g)[None, :]

    def _forward(self, values):
        alpha, beta, gamma, wb = self._angles
        M = len(alpha)
        _, ea, eg = self._mgrid
        f = values.reshape(M, M, M)
        # G[mu, b, nu] = mean over (a, g) of f * exp(i mu a) exp(i nu g)
        G = np.einsum("abc,am,cn->mbn", f, ea, eg, optimize=True) / M**2
        out = []
        for p in self.dual:
            l2 = p.highest_weight[0]
            idx = self._m_index(l2)
            sub = G[np.ix_(idx, np.arange(M), idx)]
            out.append(np.einsum("b,bji,jbi->ij", wb, self._dtab[l2], sub))
        return out

    def _inverse(self, blocks):
        alpha, beta, gamma, wb = self._angles
        M = len(alpha)
        _, ea, eg = self._mgrid
        nm = ea.shape[1]
        H = np.zeros((nm, M, nm), dtype=complex)
        for p, blk in zip(self.dual, blocks):
            l2 = p.highest_weight[0]
            idx = self._m_index(l2)
            H[np.ix_(idx, np.arange(M), idx)] += p.dim * np.einsum("ij,bji->jbi", blk, self._dtab[l2])
        f = np.einsum("mbn,am,cn->abc", H, ea.conj(), eg.conj(), optimize=True)
        return f.ravel()


def build_su2(l_max: float, quad_order: int | None = None) -> SU2Model:
    """SU(2) with representations ``l = 0, 1/2, ..., l_max``.

    ``quad_order`` is the node count per Euler angle; it must be at least
    ``4 l_max + 1``. The quadrature itself is built on first use, so
    spectral-only work with large ``l_max`` stays cheap.
    """
    two = 2 * l_max
    if l_max < 0 or abs(two - round(two)) > 1e-12:
        raise InvalidParameter(f"l_max must be a non-negative half-integer, got {l_max!r}")
    two = int(round(two))
    if quad_order is None:
        quad_order = 2 * two + 1
    if quad_order < 2 * two + 1:
        raise UnderResolvedQuadrature(
            f"quad_order={quad_order} < {2 * two + 1} cannot resolve l_max={l_max}"
        )
    points = []
    for l2 in range(two + 1):
        l = l2 / 2
        eig = l * (l + 1)
        d = l2 + 1
        points.append(DualPoint(0, d, float(d), (1.0 + eig) ** 1.5, l, eig, (l2,)))
    return SU2Model(
        kind="su2", dual=_order_dual(points), topo_dim=3, homogeneous_dim=4, rank=1,
        rho=(1,), haar_mass=1.0, params={"l_max": l_max, "quad_order": int(quad_order)},
    )


# --------------------------------------------------------------------------
# Heisenberg group, dual side only


@dataclass(frozen=True, eq=False)
class HeisenbergModel(GroupModel):
    """Dual-only model of H^n: Schroedinger cells ``lambda`` with the
    Hermite spectrum of the rescaled harmonic oscillator truncated at
    ``K`` modes per coordinate."""

    hermite_products: np.ndarray = field(default=None, repr=False)

    def spectral_values(self, point: DualPoint) -> np.ndarray:
        """Eigenvalues ``|lambda| prod(2 k_j + 1)`` of the sub-Laplacian symbol."""
        return abs(point.label) * self.hermite_products

    @property
    def lambda_max(self) -> float:
        return max(abs(p.label) for p in self.dual)


def hermite_products(n: int, K: int) -> np.ndarray:
    """Sorted values of ``prod_j (2 k_j + 1)`` over ``k in {0..K-1}^n``."""
    odd = 2.0 * np.arange(K) + 1.0
    prod = odd
    for _ in range(n - 1):
        prod = np.multiply.outer(prod, odd).ravel()
    return np.sort(prod)


def geometric_lambda_grid(n: int, lam_min: float, lam_max: float, cells: int, mirrored: bool = True):
    """Geometric cells on ``[lam_min, lam_max]`` as ``(lambda, weight)`` pairs.

    The representative is the geometric midpoint and the weight is chosen
    so that ``|lambda|^n * weight`` equals the exact cell integral of
    ``|lambda|^n``.
    """
    if not 0 < lam_min < lam_max or cells < 1:
        raise InvalidParameter("need 0 < lam_min < lam_max and cells >= 1")
    edges = np.geomspace(lam_min, lam_max, cells + 1)
    lo, hi = edges[:-1], edges[1:]
    rep = np.sqrt(lo * hi)
    weight = (hi ** (n + 1) - lo ** (n + 1)) / (n + 1) / rep**n
    grid = list(zip(rep.tolist(), weight.tolist()))
    if mirrored:
        grid = [(-lam, w) for lam, w in reversed(grid)] + grid
    return grid


def build_heisenberg_spectral(n: int, lambda_grid, hermite_cutoff: int,
                              plancherel_scale: float | None = None) -> HeisenbergModel:
    """Dual-only Heisenberg model.

    Plancherel weight of a cell is ``scale * |lambda|^n * weight``. The
    default scale is 1/2 when the grid has cells of both signs, so that the
    pair ``(lambda, -lambda)`` carries one copy of ``|lambda|^n d lambda``;
    with this normalisation the grid trace converges to
    ``s^{n+1}/(n+1) * prod_j sum_k (2k+1)^{-(n+1)}``.
    """
    if n < 1 or hermite_cutoff < 1:
        raise InvalidParameter("need n >= 1 and hermite_cutoff >= 1")
    grid = [(float(lam), float(w)) for lam, w in lambda_grid]
    if not grid:
        raise InvalidParameter("empty lambda grid")
    for lam, w in grid:
        if lam == 0:
            raise InvalidParameter("lambda = 0 is not in the Schroedinger part of the dual")
        if w <= 0:
            raise InvalidParameter("cell weights must be positive")
    if plancherel_scale is None:
        plancherel_scale = 0.5 if any(l < 0 for l, _ in grid) and any(l > 0 for l, _ in grid) else 1.0
    K = int(hermite_cutoff)
    points = [
        DualPoint(0, K**n, plancherel_scale * abs(lam) ** n * w, abs(lam), lam, None, None)
        for lam, w in grid
    ]
    return HeisenbergModel(
        kind="heisenberg_spectral", dual=_order_dual(points), topo_dim=2 * n + 1,
        homogeneous_dim=2 * n + 2, params={"n": n, "K": K, "cells": len(grid)},
        hermite_products=hermite_products(n, K),
    )


# --------------------------------------------------------------------------
# R^n, radial rearrangement model


@dataclass(frozen=True, eq=False)
class RadialModel(GroupModel):
    edges: np.ndarray = field(default=None, repr=False)

    @property
    def radii(self) -> np.ndarray:
        return np.array([p.label for p in self.dual])

    @property
    def volumes(self) -> np.ndarray:
        return self.plancherel_weights


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def build_euclidean_radial(n: int, grid) -> RadialModel:
    """Radial shells of R^n.

    ``grid`` is either an increasing array of shell edges starting at 0, or
    a mapping ``{"R": R_max, "shells": m}`` for uniform shells. Each shell is
    one dual point weighted by its Lebesgue volume (two-sided on the line);
    scalar symbols are sampled at the shell's mid radius.
    """
    if isinstance(grid, dict):
        if grid.get("shells", 0) < 1 or grid.get("R", 0) <= 0:
            raise InvalidParameter("radial grid needs R > 0 and shells >= 1")
        edges = np.linspace(0.0, float(grid["R"]), int(grid["shells"]) + 1)
    else:
        edges = np.asarray(grid, dtype=float)
    if edges.ndim != 1 or edges.size < 2:
        raise InvalidParameter("empty radial grid")
    if edges[0] != 0 or np.any(np.diff(edges) <= 0):
        raise InvalidParameter("radial edges must start at 0 and increase strictly")
    vol = unit_ball_volume(n) * (edges[1:] ** n - edges[:-1] ** n)
    mid = 0.5 * (edges[1:] + edges[:-1])
    points = [
        DualPoint(i, 1, float(v), float(r), float(r), float(r * r), None)
        for i, (v, r) in enumerate(zip(vol, mid))
    ]
    return RadialModel(
        kind="euclidean_radial", dual=tuple(points), topo_dim=n, homogeneous_dim=n,
        params={"n": n, "R": float(edges[-1]), "shells": len(points)}, edges=edges,
    )


# --------------------------------------------------------------------------
# dual-side enumerations


def enumerate_polyhedron(model: GroupModel, N: int) -> list:
    """Dual points with highest weight bounded by ``N * rho`` coordinatewise.

    On SU(2) the highest weight is ``2l`` and ``rho = 1``; on the torus the
    box convention ``rho_i = 1`` bounds ``|k_i| <= N``.
    """
    if N < 0:
        raise InvalidParameter("polyhedron order must be >= 0")
    if model.kind == "su2":
        return [p for p in model.dual if p.highest_weight[0] <= N * model.rho[0]]
    if model.kind == "torus":
        return [p for p in model.dual if all(abs(k) <= N * r for k, r in zip(p.highest_weight, model.rho))]
    raise UnsupportedModel(f"{model.kind} model has no highest-weight data")


def laplacian_spectrum(model: GroupModel) -> list:
    """Laplacian eigenvalues with multiplicities, ascending.

    Compact models give ``d_pi^2`` per dual point (equal eigenvalues
    merged). The Heisenberg model lists sub-Laplacian values with their
    cell weights; the radial model lists ``|xi|^2`` with shell volumes.
    """
    acc: dict = {}
    if model.kind == "heisenberg_spectral":
        for p in model.dual:
            for v in model.spectral_values(p):
                acc[float(v)] = acc.get(float(v), 0.0) + p.plancherel_weight
    elif model.kind == "euclidean_radial":
        for p in model.dual:
            acc[p.eigenvalue] = acc.get(p.eigenvalue, 0.0) + p.plancherel_weight
    else:
        for p in model.dual:
            acc[p.eigenvalue] = acc.get(p.eigenvalue, 0) + p.dim**2
    return sorted(acc.items())


def build_model(spec: dict) -> GroupModel:
    """Construct a model from a config mapping with a ``kind`` key."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind == "cyclic":
        return build_cyclic(spec["N"])
    if kind == "torus":
        return build_torus(spec["d"], spec["band"])
    if kind == "su2":
        return build_su2(spec["l_max"], spec.get("quad_order"))
    if kind == "heisenberg_spectral":
        n = spec["n"]
        grid = geometric_lambda_grid(
            n, spec.get("lambda_min", 1e-4), spec.get("lambda_max", 1e3),
            spec.get("cells", 4000), spec.get("mirrored", True),
        )
        # K^n Hermite modes per cell: keep n >= 2 affordable
        return build_heisenberg_spectral(n, grid, spec.get("K", 400 if n == 1 else 100))
    if kind == "euclidean_radial":
        return build_euclidean_radial(spec["n"], {"R": spec.get("R", 1.0), "shells": spec.get("shells", 1000)})
    raise InvalidParameter(f"unknown model kind {kind!r}")
