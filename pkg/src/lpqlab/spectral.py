"""Spectral projections, their traces, and bounds derived from them.

A :class:`SpectralData` lists, for every dual point of a model, the
eigenvalues of a positive left-invariant operator together with the trace
mass each eigenvalue carries. ``tau(E_(0,u))`` is the total mass of
eigenvalues in the open interval ``(0, u)``.

Counts computed on a truncated model are only trusted up to a validity
ceiling ``s_max``; an optional ``tail_law = (alpha, C)`` asserts
``tau(E_(0,s)) ~ C s^alpha`` and feeds the closed-form bounds. The law is
never used to extrapolate a count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .errors import InvalidInput, InvalidParameter, UnsupportedModel
from .fourier import SymbolField
from .groups import build_euclidean_radial
from .rearrangement import rearrangement_of_symbol, weak_norm


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigenvalues and trace masses per dual point.

    Parameters
    ----------
    model : GroupModel or None
        ``None`` for law-only data (no eigenvalues, only ``tail_law``).
    values, masses : tuple of ndarray
        Per dual point: ascending eigenvalues and the trace mass of each.
    tail_law : (alpha, C) or None
    s_max, s_min : float
        Validity window: counts for ``s`` outside ``[s_min, s_max]`` are
        biased by truncation of the model.
    factors : (scales, cell_masses, base) or None
        Factored form ``values[i] = scales[i] * base`` with uniform mass
        ``cell_masses[i]``; per-point arrays are then built on demand.
    """

    model: object
    values: tuple = ()
    masses: tuple = ()
    tail_law: tuple | None = None
    s_max: float = math.inf
    s_min: float = 0.0
    label: str = ""
    factors: tuple | None = field(default=None, repr=False)
    _flat: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.values) != len(self.masses):
            raise InvalidInput("values and masses must align")
        for v, m in zip(self.values, self.masses):
            if v.shape != m.shape:
                raise InvalidInput("values and masses must align")
            if np.any(v < 0) or np.any(np.diff(v) < 0):
                raise InvalidInput("eigenvalues must be nonnegative and ascending per point")
            if np.any(m <= 0):
                raise InvalidInput("multiplicities must be positive")

    @property
    def law_only(self) -> bool:
        return self.model is None

    def point_arrays(self):
        """Per-point ``(values, masses)``, expanding the factored form if needed."""
        if self.factors is None:
            return self.values, self.masses
        scales, cm, base = self.factors
        return (tuple(s * base for s in scales), tuple(np.full(base.size, m) for m in cm))

    def flat(self):
        """All positive eigenvalues (merged, ascending) with cumulative mass."""
        if "v" not in self._flat:
            values, masses = self.point_arrays()
            v = np.concatenate(values) if values else np.zeros(0)
            m = np.concatenate(masses) if masses else np.zeros(0)
            keep = v > 0
            v, m = v[keep], m[keep]
            uv, inv = np.unique(v, return_inverse=True)
            um = np.bincount(inv, weights=m, minlength=uv.size)
            self._flat["v"] = uv
            self._flat["cum"] = np.cumsum(um)
        return self._flat["v"], self._flat["cum"]


def laplacian_data(model, shift: float = 1.0) -> SpectralData:
    """Spectral data of ``shift * I - Laplacian`` on a compact or radial model.

    The default ``shift = 1`` gives the strictly positive operator
    ``I - Laplacian`` (eigenvalue ``1 + l(l+1)`` on SU(2)); with
    ``shift = 0`` the trivial representation is a zero mode and never
    counts in ``(0, u)``. Compact points carry ``d_pi`` eigenvalues of mass
    ``d_pi`` each.
    """
    if model.kind == "heisenberg_spectral":
        return heisenberg_sublaplacian_data(model)
    vals, masses = [], []
    for p in model.dual:
        if model.is_compact:
            vals.append(np.full(p.dim, shift + p.eigenvalue))
            masses.append(np.full(p.dim, float(p.dim)))
        else:
            vals.append(np.array([shift + p.eigenvalue]))
            masses.append(np.array([p.plancherel_weight]))
    tail = None
    s_max = math.inf
    if model.kind == "su2":
        # Weyl law for SU(2) = S^3 of radius 2: tau(E_(0,s)) ~ (8/3) s^(3/2)
        tail = (1.5, 8.0 / 3.0)
        s_max = shift + max(p.eigenvalue for p in model.dual)
    elif model.kind == "euclidean_radial":
        s_max = shift + model.params["R"] ** 2
    elif model.is_compact:
        s_max = shift + max(p.eigenvalue for p in model.dual)
    return SpectralData(model, tuple(vals), tuple(masses), tail_law=tail, s_max=s_max,
                        label=f"laplacian({model.describe()})")


def heisenberg_sublaplacian_data(model) -> SpectralData:
    """Sub-Laplacian ``|lambda| prod(2k_j + 1)`` with cell weights as masses.

    The tail law is the exact trace ``C_n s^{n+1}``. The validity ceiling
    is the largest ``|lambda|`` of the grid (cells beyond it are missing);
    cells below the smallest ``|lambda|`` are missing too, which biases
    counts by a relative ``O(lambda_min / s)``, hence the floor
    ``s_min = 1000 lambda_min``.
    """
    if model.kind != "heisenberg_spectral":
        raise UnsupportedModel("need a heisenberg_spectral model")
    n = model.params["n"]
    scales = np.array([abs(p.label) for p in model.dual])
    cm = model.plancherel_weights
    return SpectralData(model, tail_law=(n + 1.0, heisenberg_trace_exact(n, 1.0)),
                        s_max=model.lambda_max, s_min=1e3 * float(scales.min()), label=f"sublaplacian({model.describe()})",
                        factors=(scales, cm, model.hermite_products))


def law_only(alpha: float, C: float, label: str = "law") -> SpectralData:
    if alpha <= 0 or C <= 0:
        raise InvalidParameter("tail law needs alpha > 0 and C > 0")
    return SpectralData(None, tail_law=(float(alpha), float(C)), label=label)


def random_spectral_data(model, rng, spread: float = 50.0) -> SpectralData:
    """Random positive spectra of mass ``d_pi`` per eigenvalue on a compact model."""
    vals, masses = [], []
    for p in model.dual:
        # coarse rounding produces repeated eigenvalues across points
        v = np.sort(np.round(rng.uniform(0.05, spread, size=p.dim), 1))
        vals.append(v)
        masses.append(np.full(p.dim, float(p.dim)))
    return SpectralData(model, tuple(vals), tuple(masses), label="random")


def spectral_counting(L: SpectralData, u: float) -> float:
    """``tau(E_(0,u))``: total mass of eigenvalues strictly between 0 and ``u``."""
    if u <= 0:
        raise InvalidParameter("u must be positive")
    if L.law_only:
        raise UnsupportedModel("law-only data has no eigenvalues to count")
    if L.factors is not None:
        scales, cm, base = L.factors
        pos = base[base > 0]
        return float(np.sum(cm * np.searchsorted(pos, u / scales, side="left")))
    v, cum = L.flat()
    i = int(np.searchsorted(v, u, side="left"))
    return float(cum[i - 1]) if i > 0 else 0.0


def odd_zeta(m: float) -> float:
    """``sum_{k>=0} (2k+1)^{-m} = (1 - 2^{-m}) zeta(m)``."""
    return (1.0 - 2.0**-m) * float(special.zeta(m))


def heisenberg_trace_exact(n: int, s: float) -> float:
    """``s^{n+1}/(n+1) * (sum_k (2k+1)^{-(n+1)})^n``."""
    if s <= 0:
        raise InvalidParameter("s must be positive")
    return s ** (n + 1) / (n + 1) * odd_zeta(n + 1) ** n


def rockland_count(n: int, j: int, lambda_grid, K: int, s: float) -> float:
    """Count for the diagonal Rockland law ``|lambda|^j prod m_k^{2j}``, ``m_k >= 1``.

    ``lambda_grid`` is a list of ``(lambda, weight)`` cells as produced by
    ``geometric_lambda_grid``; mirrored grids get the factor 1/2 used for
    the sub-Laplacian.
    """
    if j < 1 or n < 1 or K < 1:
        raise InvalidParameter("need n, j, K >= 1")
    lam = np.array([abs(l) for l, _ in lambda_grid], dtype=float)
    w = np.array([w for _, w in lambda_grid], dtype=float)
    signs = {math.copysign(1, l) for l, _ in lambda_grid}
    scale = 0.5 if len(signs) == 2 else 1.0
    base = np.arange(1, K + 1, dtype=float) ** (2 * j)
    prod = base
    for _ in range(n - 1):
        prod = np.multiply.outer(prod, base).ravel()
    prod = np.sort(prod)
    counts = np.searchsorted(prod, s / lam**j, side="right")
    return float(scale * np.sum(lam**n * w * counts))


def apply_spectral_function(L: SpectralData, phi) -> SymbolField:
    """Diagonal symbol ``phi(eigenvalue)`` on every dual point."""
    if L.law_only:
        raise UnsupportedModel("law-only data has no symbol")
    model = L.model
    blocks = []
    for p, v in zip(model.dual, L.point_arrays()[0]):
        e = np.asarray(phi(v), dtype=float)
        if not np.all(np.isfinite(e)):
            raise InvalidInput("phi is not finite on the spectrum")
        if model.is_compact:
            if v.size != p.dim:
                raise InvalidInput("compact points need d_pi eigenvalues")
            blocks.append(np.diag(e).astype(complex))
        else:
            blocks.append(e.astype(complex))
    return SymbolField(model, tuple(blocks))


def _is_decreasing(phi, v) -> bool:
    e = np.asarray(phi(v), dtype=float)
    return bool(np.all(np.diff(e) <= 0))


def _law_sup(alpha, C, phi, rr):
    """``sup_u phi(u) (C u^alpha)^{1/rr}`` by bounded search in ``log u``."""
    a = alpha / rr
    f = lambda x: -(math.log(max(phi(math.exp(x)), 1e-300)) + a * x)
    xs = np.linspace(-40, 40, 4001)
    x0 = xs[int(np.argmin([f(x) for x in xs]))]
    res = optimize.minimize_scalar(f, bounds=(x0 - 0.05, x0 + 0.05), method="bounded",
                                   options={"xatol": 1e-12})
    return C ** (1 / rr) * math.exp(-res.fun)


def spectral_weak_norm(L: SpectralData, phi, rr: float, return_route: bool = False):
    """``sup_u phi(u) tau(E_(0,u))^{1/rr}`` for decreasing ``phi``.

    ``tau(E_(0,u))`` is a left-continuous step, so for decreasing ``phi``
    the sup is taken at right limits of the eigenvalue breakpoints:
    ``max_i phi(v_i) (mass of eigenvalues <= v_i)^{1/rr}``. Non-monotone
    ``phi`` falls back to the weak norm of the rearrangement of
    ``phi(|L|)``; the route is returned when ``return_route`` is set.
    """
    if rr < 1:
        raise InvalidParameter("rr must be >= 1")
    if L.law_only:
        alpha, C = L.tail_law
        val, route = _law_sup(alpha, C, phi, rr), "law"
    else:
        v, cum = L.flat()
        if v.size and not _is_decreasing(phi, v):
            sym = apply_spectral_function(L, phi)
            val, route = weak_norm(rearrangement_of_symbol(sym), rr), "rearrangement"
        elif v.size == 0:
            val, route = 0.0, "breakpoints"
        else:
            e = np.asarray(phi(v), dtype=float)
            val, route = float(np.max(e * cum ** (1.0 / rr))), "breakpoints"
    return (val, route) if return_route else val


def _inv_r(p, q):
    if not 1 < p <= 2 <= q < math.inf:
        raise InvalidParameter(f"need 1 < p <= 2 <= q < inf, got p={p}, q={q}")
    return 1.0 / p - 1.0 / q


def heat_decay_bound(L: SpectralData, t: float, p: float, q: float) -> float:
    """``C^{1/r} (alpha/(t r))^{alpha/r} e^{-alpha/r}`` with ``1/r = 1/p - 1/q``."""
    if L.tail_law is None:
        raise UnsupportedModel("heat bound needs a declared tail law")
    if t <= 0:
        raise InvalidParameter("t must be positive")
    ir = _inv_r(p, q)
    if ir == 0:
        return 1.0
    alpha, C = L.tail_law
    a = alpha * ir
    return C**ir * (a / t) ** a * math.exp(-a)


def empirical_heat_bound(L: SpectralData, t: float, p: float, q: float) -> float:
    """``sup_u tau(E_(0,u))^{1/r} e^{-t u}`` from the counted spectrum."""
    ir = _inv_r(p, q)
    if ir == 0:
        return 1.0
    return spectral_weak_norm(L, lambda u: np.exp(-t * np.asarray(u)), 1.0 / ir)


def embedding_constant(L: SpectralData, gamma: float, p: float, q: float) -> float:
    """``sup_u (1+u)^{-gamma} tau(E_(0,u))^{1/r}``.

    With a tail law ``(alpha, C)`` the constant is infinite exactly when
    ``gamma < alpha/r``. Law-only data use the closed form of
    ``sup C^{1/r} u^a (1+u)^{-gamma}``, ``a = alpha/r``; counted data use
    breakpoints below ``s_max``.
    """
    if gamma < 0:
        raise InvalidParameter("gamma must be nonnegative")
    ir = _inv_r(p, q)
    if L.tail_law is not None:
        alpha, C = L.tail_law
        a = alpha * ir
        if gamma < a:
            return math.inf
        if L.law_only:
            if gamma == a:
                return C**ir
            return C**ir * (a / (gamma - a)) ** a * ((gamma - a) / gamma) ** gamma
    elif L.law_only:
        raise UnsupportedModel("law-only data without a tail law")
    v, cum = L.flat()
    keep = v <= L.s_max
    if not np.any(keep):
        return 0.0
    return float(np.max((1.0 + v[keep]) ** -gamma * cum[keep] ** ir))


def loglog_fit(x, y):
    """Least-squares line through ``(log x, log y)``: ``(slope, intercept, max residual)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3 or x.size != y.size:
        raise InvalidInput("need at least 3 matching points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise InvalidInput("log-log fit needs positive values")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return float(slope), float(intercept), resid


def homogeneous_symbol_trace(a, n: int, s, R: float | None = None, shells: int = 20000):
    """Grid measure of ``{xi in R^n : |a(|xi|)| <= s}`` for a radial symbol.

    The symbol is sampled at shell mid radii of a uniform radial grid on
    ``[0, R]``; ``R`` must cover the sublevel set (checked).
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if R is None:
        raise InvalidParameter("radial extent R is required")
    model = build_euclidean_radial(n, {"R": R, "shells": shells})
    av = np.abs(np.asarray(a(model.radii), dtype=float))
    if np.any(av[-1] <= s_arr):
        raise InvalidParameter("radial grid does not cover the sublevel set")
    vol = model.volumes
    out = np.array([float(np.sum(vol[av <= si])) for si in s_arr])
    return out if np.ndim(s) else float(out[0])


def fit_homogeneous_law(a, n: int, s_values, R: float, shells: int = 20000):
    """Fitted ``(exponent, C)`` of ``tau ~ C s^exponent``."""
    tau = homogeneous_symbol_trace(a, n, np.asarray(s_values), R, shells)
    slope, intercept, _ = loglog_fit(s_values, tau)
    return slope, math.exp(intercept)
