"""Fourier multipliers, the bounds they satisfy, and inequality verifiers.

Right-hand sides (Hormander, compact symbol, Lizorkin) are computed in
closed form from step rearrangements. Left-hand sides of operator-norm
inequalities are lower-bound probes: a maximum of ``||Af||_q / ||f||_p``
over seeded random band-limited trials plus a fixed family of structured
probes (constants, Dirichlet-type kernels, heat kernels).

Constant policy. Inequalities whose proofs carry constant one (Plancherel,
Hausdorff-Young, Nikolskii on these models, L^beta -> L^inf, the p = q = 2
Hormander identity) pass when ``ratio <= 1 + tol``. The remaining ones are
stated up to an unnamed constant; a single report records its ratio and
``lab.scan_constant_stability`` judges the growth of that ratio along a
size ladder.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InvalidInput, InvalidParameter, UnsupportedModel
from .fourier import (
    GroupFunction,
    SymbolField,
    constant,
    forward_transform,
    inverse_transform,
    lp_norm,
    random_symbol,
)
from .rearrangement import (
    StepRearrangement,
    distribution_closed,
    lorentz_norm,
    rearrangement_of_symbol,
)

CONST_TOL = 1e-9
SHARP_TOL = 1e-8


def conjugate_index(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _inv(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


@dataclass(frozen=True, eq=False)
class MultiplierSpec:
    symbol: SymbolField
    name: str = "A"

    @property
    def model(self):
        return self.symbol.model


@dataclass
class VerificationReport:
    inequality_id: str
    model: str
    lhs: float
    rhs: float
    params: dict
    passed: bool
    policy: str
    seed: int | None = None
    trials: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        if self.rhs > 0:
            return self.lhs / self.rhs
        return 0.0 if self.lhs == 0 else math.inf

    def as_dict(self) -> dict:
        d = asdict(self)
        d["ratio"] = self.ratio
        return d


def _ratio(lhs, rhs):
    if rhs > 0:
        return lhs / rhs
    return 0.0 if lhs == 0 else math.inf


# --------------------------------------------------------------------------
# symbol algebra


def apply_multiplier(A: MultiplierSpec, f: GroupFunction) -> GroupFunction:
    """``Af`` via ``sigma_A(pi) f^(pi)`` on every dual point."""
    if A.model is not f.model:
        raise InvalidInput("multiplier and function live on different models")
    return inverse_transform(A.symbol.matmul(forward_transform(f)))


def adjoint_symbol(A: MultiplierSpec) -> MultiplierSpec:
    return MultiplierSpec(A.symbol.adjoint(), f"{A.name}*")


def _check_pq(p, q):
    if not (1 < p <= 2 <= q < math.inf):
        raise InvalidParameter(f"need 1 < p <= 2 <= q < inf, got p={p}, q={q}")


def hormander_rhs(r: StepRearrangement, p: float, q: float) -> float:
    """``sup_s s |{t : mu_t >= s}|^{1/p - 1/q}`` (with ``0^0 = 0``)."""
    _check_pq(p, q)
    e = 1.0 / p - 1.0 / q
    best = 0.0
    for s in r.values:
        best = max(best, float(s) * distribution_closed(r, float(s)) ** e)
    return best


def symbol_rhs_compact(A: MultiplierSpec, p: float, q: float) -> float:
    """``sup_s s (sum_{||sigma(xi)||_op >= s} d_xi^2)^{1/p - 1/q}``."""
    if not A.model.is_compact:
        raise UnsupportedModel("symbol bound needs a compact model")
    _check_pq(p, q)
    e = 1.0 / p - 1.0 / q
    norms = A.symbol.op_norms()
    d2 = A.model.dims.astype(float) ** 2
    best = 0.0
    for s in np.unique(norms[norms > 0]):
        best = max(best, float(s) * float(np.sum(d2[norms >= s])) ** e)
    return best


def difference_operator(A: MultiplierSpec, mode: str = "literal") -> MultiplierSpec:
    """Difference of singular values along the spectral enumeration of the dual.

    Block ``j`` is ``U_j diag(mu_k(sigma_j) - mu_k(sigma_{j+1}))`` for
    ``k < d_j`` with last entry ``mu_{d_j}(sigma_j)`` (``mode="literal"``)
    or the difference there too (``mode="difference_last"``). ``U_j`` is
    the unitary polar factor of ``sigma_j``; ``sigma`` is zero past the
    last retained dual point.
    """
    if not A.model.is_compact:
        raise UnsupportedModel("difference operator needs a compact model")
    if mode not in ("literal", "difference_last"):
        raise InvalidParameter(f"unknown mode {mode!r}")
    blocks = A.symbol.blocks
    svals = A.symbol.singular_values()
    out = []
    for j, b in enumerate(blocks):
        d = b.shape[0]
        cur = svals[j]
        nxt = np.zeros(d)
        if j + 1 < len(blocks):
            s = svals[j + 1][:d]
            nxt[: s.size] = s
        entries = cur - nxt
        if mode == "literal":
            entries[-1] = cur[-1]
        w, _, vh = np.linalg.svd(b)
        out.append((w @ vh) @ np.diag(entries))
    return MultiplierSpec(SymbolField(A.model, tuple(out)), f"diff({A.name})")


def difference_diagonals(A: MultiplierSpec, mode: str = "literal") -> list:
    """Diagonal entries of each block of the difference operator (isometry removed)."""
    D = difference_operator(A, mode)
    out = []
    for (w_b, b) in zip(A.symbol.blocks, D.symbol.blocks):
        w, _, vh = np.linalg.svd(w_b)
        out.append(np.real(np.diag((w @ vh).conj().T @ b)))
    return out


def bracket_power(model, point, power: float) -> float:
    """``<pi>^{n * power}`` with ``<pi> = (1 + Laplacian eigenvalue)^{1/2}``."""
    return (1.0 + point.eigenvalue) ** (0.5 * model.topo_dim * power)


def lizorkin_rhs_compact(A: MultiplierSpec, p: float, q: float, m: float | None = None) -> float:
    """Compact-group Lizorkin bound; sup form when ``m`` is given, sum form otherwise."""
    if not A.model.is_compact:
        raise UnsupportedModel("Lizorkin symbol bound needs a compact model")
    if not 1 < p <= q < math.inf:
        raise InvalidParameter("need 1 < p <= q < inf")
    if m is not None and not (1 - 1 / p <= m < 1):
        raise InvalidParameter(f"m must lie in [1 - 1/p, 1), got {m}")
    e = 1.0 / p - 1.0 / q
    model = A.model
    norms = A.symbol.op_norms()
    first = max((bracket_power(model, pt, e) * nrm for pt, nrm in zip(model.dual, norms)), default=0.0)
    dnorms = difference_operator(A).symbol.op_norms()
    if m is None:
        second = sum(bracket_power(model, pt, e) * nrm for pt, nrm in zip(model.dual, dnorms))
    else:
        second = max(bracket_power(model, pt, e + m) * nrm for pt, nrm in zip(model.dual, dnorms))
    return float(first + second)


@dataclass(frozen=True)
class LizorkinBound:
    sup_term: float
    jump_term: float

    @property
    def total(self) -> float:
        return self.sup_term + self.jump_term


def lizorkin_rhs_lcg(r: StepRearrangement, w, p: float, q: float, t: float | None = None) -> LizorkinBound:
    """``sup_t w(t)^{1/r} mu_t + int w(t)^{1/r} (-d mu_t)`` for a step ``mu``.

    ``w`` must be non-negative and non-decreasing; the sup on each block is
    then its left limit at the right end. With ``t`` given, the finite-t
    form ``w(t)^{1/r} mu_t + int_0^t w^{1/r} (-d mu)`` is returned.
    """
    if not 1 < p <= min(2.0, q):
        raise InvalidParameter("need 1 < p <= min(2, q)")
    e = 1.0 / p - _inv(q)
    if r.is_empty:
        return LizorkinBound(0.0, 0.0)
    wv = np.array([float(w(float(x))) for x in r.ends])
    jumps = r.values - np.concatenate([r.values[1:], [0.0]])
    if t is None:
        return LizorkinBound(float(np.max(wv**e * r.values)), float(np.sum(wv**e * jumps)))
    i = int(np.searchsorted(r.ends, t, side="right"))
    mu_t = float(r.values[i]) if i < r.values.size else 0.0
    inside = r.ends <= t
    return LizorkinBound(float(w(t)) ** e * mu_t, float(np.sum((wv**e * jumps)[inside])))


# --------------------------------------------------------------------------
# trial functions and empirical norms


def _rng(seed, i):
    return np.random.default_rng([int(seed), int(i)])


def _diag_symbol(model, values):
    return SymbolField(model, tuple(v * np.eye(p.dim, dtype=complex) for p, v in zip(model.dual, values)))


def heat_kernel(model, t: float) -> GroupFunction:
    eig = np.array([p.eigenvalue for p in model.dual])
    return inverse_transform(_diag_symbol(model, np.exp(-t * eig)))


def dirichlet_kernel(model, k: int) -> GroupFunction:
    """``sum of d_pi chi_pi`` over the first ``k`` dual points."""
    return inverse_transform(_diag_symbol(model, (np.arange(len(model.dual)) < k).astype(float)))


def structured_probes(model, family: str = "all") -> list:
    """Deterministic extremiser candidates: constant, Dirichlet and heat kernels."""
    n = len(model.dual)
    probes = []
    if family in ("all", "dirichlet"):
        probes.append(constant(model))
        ks = sorted(set(np.unique(np.geomspace(1, n, num=min(n, 12)).astype(int)).tolist()))
        probes.extend(dirichlet_kernel(model, k) for k in ks if k >= 2)
    if family in ("all", "heat"):
        top = max(p.eigenvalue for p in model.dual) or 1.0
        for t in np.geomspace(0.1 / top, 10.0, 10):
            probes.append(heat_kernel(model, float(t)))
    return probes


def trial_function(model, seed: int, i: int) -> GroupFunction:
    """Random band-limited trial ``i`` of stream ``seed``.

    Trials cycle through full-band Gaussian coefficients, random supports
    with random ranks, and Gaussian coefficients under a random
    power-law profile in the spectral tag.
    """
    rng = _rng(seed, i)
    n = len(model.dual)
    kind = i % 3
    if kind == 0:
        return inverse_transform(random_symbol(model, rng))
    if kind == 1:
        size = int(rng.integers(1, n + 1))
        support = rng.choice(n, size=size, replace=False)
        rank = {int(j): int(rng.integers(1, model.dual[j].dim + 1)) for j in support}
        return inverse_transform(random_symbol(model, rng, support, rank))
    sym = random_symbol(model, rng)
    expo = float(rng.uniform(-1.5, 1.5))
    tags = np.array([p.spectral_tag for p in model.dual])
    scaled = tuple(b * t**expo for b, t in zip(sym.blocks, tags))
    return inverse_transform(SymbolField(model, scaled))


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _ratio_for(A, p, q):
    def run(f):
        nf = lp_norm(f, p)
        if nf == 0:
            return 0.0
        return lp_norm(apply_multiplier(A, f), q) / nf
    return run


def _power_iteration(A: MultiplierSpec, seed: int, block: int = 8, max_iter: int = 5000,
                     tol: float = 1e-15) -> float:
    """Block power iteration on ``A*A`` with Rayleigh-Ritz extraction.

    A block of ``b`` vectors converges at rate ``mu_{b+1}/mu_1`` rather than
    ``mu_2/mu_1``, which keeps nearly tied top singular values cheap.
    """
    model = A.model
    At = adjoint_symbol(A)
    _, w = model.quadrature()
    sw = np.sqrt(w)
    b = max(1, min(block, int(sum(p.dim**2 for p in model.dual))))
    X = np.stack([trial_function(model, seed, i).values for i in range(b)], axis=1)

    def gram(Y):
        # columns orthonormal in L^2(G)
        q, _ = np.linalg.qr(sw[:, None] * Y)
        return q / sw[:, None]

    # A*A is itself a multiplier with symbol sigma* sigma
    AtA = MultiplierSpec(At.symbol.matmul(A.symbol), f"{A.name}*{A.name}")

    def apply(Y):
        return np.stack([apply_multiplier(AtA, GroupFunction(model, Y[:, j])).values
                         for j in range(Y.shape[1])], axis=1)

    X = gram(X)
    est, stable = 0.0, 0
    for _ in range(max_iter):
        Y = apply(X)
        H = (X.conj() * w[:, None]).T @ Y
        top = float(np.linalg.eigvalsh(0.5 * (H + H.conj().T))[-1])
        if top <= 0:
            return 0.0
        stable = stable + 1 if abs(top - est) <= tol * top else 0
        est = top
        if stable >= 3:
            break
        X = gram(Y)
    return math.sqrt(est)


def empirical_opnorm(A: MultiplierSpec, p: float, q: float, strategy: str = "random_band",
                     trials: int = 100, seed: int = 0, workers: int = 1) -> float:
    """Lower-bound probe for ``||A||_{L^p -> L^q}``.

    ``random_band``: seeded random trials plus the structured probes;
    ``heat_family``: heat kernels only; ``power2``: block power iteration
    on ``A*A`` (``p = q = 2`` only), which converges to ``sup_t mu_t``.
    """
    if not A.model.is_compact:
        raise UnsupportedModel("operator-norm probes need a compact model")
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    if not (p >= 1 and q >= 1):
        raise InvalidParameter("norm indices must be >= 1")
    if strategy == "power2":
        if p != 2 or q != 2:
            raise InvalidParameter("power2 strategy is only defined for p = q = 2")
        return _power_iteration(A, seed)
    run = _ratio_for(A, p, q)
    if strategy == "heat_family":
        return max(run(f) for f in structured_probes(A.model, "heat"))
    if strategy != "random_band":
        raise InvalidParameter(f"unknown strategy {strategy!r}")
    model = A.model
    vals = _map(lambda i: run(trial_function(model, seed, i)), range(trials), workers)
    vals += [run(f) for f in structured_probes(model)]
    return float(max(vals))


# --------------------------------------------------------------------------
# weights for Paley / Hausdorff-Young-Paley


class InverseWeight:
    """``phi(t) = c / t``; ``M_phi = c``."""

    name = "inverse"

    def __init__(self, c: float = 1.0):
        self.c = float(c)

    def m_phi(self) -> float:
        return self.c

    def power_integral(self, a: np.ndarray, b: np.ndarray, k: float) -> np.ndarray:
        # int_a^b (c/t)^k dt for k < 1
        if k == 0:
            return b - a
        if k >= 1:
            raise InvalidParameter("1/t weight needs exponent < 1 for integrability at 0")
        return self.c**k * (b ** (1 - k) - a ** (1 - k)) / (1 - k)


class StepWeight:
    """``phi = values[i]`` on ``[ends[i-1], ends[i])``, zero after the last end."""

    name = "step"

    def __init__(self, ends, values):
        self.ends = np.asarray(ends, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.ends.shape != self.values.shape or np.any(np.diff(self.ends) <= 0) or np.any(self.values <= 0):
            raise InvalidInput("step weight needs increasing ends and positive values")

    @classmethod
    def dyadic(cls, total: float) -> "StepWeight":
        """``2^{-j}`` on ``[2^j - 1, 2^{j+1} - 1)`` covering ``[0, total]``."""
        J = max(0, int(math.ceil(math.log2(total + 1))))
        j = np.arange(J + 1)
        return cls(2.0 ** (j + 1) - 1, 2.0 ** (-j))

    def m_phi(self) -> float:
        lengths = np.diff(np.concatenate([[0.0], self.ends]))
        return float(max(v * lengths[self.values >= v].sum() for v in self.values))

    def power_integral(self, a, b, k):
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        if k == 0:
            return b - a
        knots = np.concatenate([[0.0], self.ends])
        cum = np.concatenate([[0.0], np.cumsum(np.diff(knots) * self.values**k)])
        F = lambda x: np.interp(x, knots, cum, right=cum[-1])
        return F(b) - F(a)


def make_weight(spec) -> object:
    if isinstance(spec, (InverseWeight, StepWeight)):
        return spec
    if spec in ("inverse", "1/t"):
        return InverseWeight()
    raise InvalidParameter(f"unknown weight {spec!r}")


def hyp_lhs(r: StepRearrangement, phi, p: float, b: float) -> float:
    """``(int (mu_t phi(t)^{1/b - 1/p'})^b dt)^{1/b}``."""
    e = 1.0 / b - 1.0 / conjugate_index(p)
    if r.is_empty:
        return 0.0
    ints = phi.power_integral(r.starts, r.ends, e * b)
    return float(np.sum(r.values**b * ints) ** (1.0 / b))


# --------------------------------------------------------------------------
# verifiers


def verify_hyp(f: GroupFunction, phi, p: float, b: float, seed: int | None = None) -> VerificationReport:
    """Hausdorff-Young-Paley check; ``b = p'`` is Hausdorff-Young, ``b = p`` Paley."""
    pp = conjugate_index(p)
    if not 1 < p <= 2:
        raise InvalidParameter(f"need 1 < p <= 2, got {p}")
    if not (p - 1e-12 <= b <= pp + 1e-12):
        raise InvalidParameter(f"need p <= b <= p', got b={b}")
    phi = make_weight(phi) if isinstance(phi, str) else phi
    params = {"p": p, "q": pp, "b": b, "phi": phi.name}
    M = phi.m_phi()
    if not math.isfinite(M):
        return VerificationReport("hyp", f.model.describe(), math.nan, math.inf, params, False,
                                  "precondition-violation", seed, 1)
    r = rearrangement_of_symbol(forward_transform(f))
    lhs = hyp_lhs(r, phi, p, b)
    rhs = M ** (1.0 / b - 1.0 / pp) * lp_norm(f, p)
    exact = abs(b - pp) <= 1e-12 or (p == 2 and b == 2)
    ratio = _ratio(lhs, rhs)
    if exact:
        return VerificationReport("hyp", f.model.describe(), lhs, rhs, params, ratio <= 1 + CONST_TOL,
                                  "constant-1", seed, 1)
    return VerificationReport("hyp", f.model.describe(), lhs, rhs, params, math.isfinite(ratio),
                              "stability", seed, 1)


def support_trace(sigma: SymbolField, rtol: float = 1e-9) -> float:
    """``tau`` of the support projection: ``sum d_pi rank(sigma(pi))``."""
    svals = sigma.singular_values()
    top = max((s[0] for s in svals if s.size), default=0.0)
    if top == 0:
        return 0.0
    return float(sum(p.dim * int(np.sum(s > rtol * top)) for p, s in zip(sigma.model.dual, svals)))


def verify_nikolskii(f: GroupFunction, p: float, q: float, seed: int | None = None) -> VerificationReport:
    """``||f||_q <= tau(P_supp)^{1/p - 1/q} ||f||_p`` with constant one."""
    if not (1 < q <= math.inf and 1 < p <= min(2.0, q)):
        raise InvalidParameter(f"need 1 < q <= inf and 1 < p <= min(2, q), got p={p}, q={q}")
    tau = support_trace(forward_transform(f))
    lhs = lp_norm(f, q)
    rhs = tau ** (1.0 / p - _inv(q)) * lp_norm(f, p) if tau > 0 else 0.0
    ratio = _ratio(lhs, rhs)
    params = {"p": p, "q": q, "b": None, "tau_support": tau}
    return VerificationReport("nikolskii", f.model.describe(), lhs, rhs, params,
                              tau == 0 or ratio <= 1 + CONST_TOL, "constant-1", seed, 1)


def verify_hormander(A: MultiplierSpec, p: float, q: float, trials: int = 100, seed: int = 0,
                     workers: int = 1) -> VerificationReport:
    """Empirical ``||A||_{p->q}`` against the rearrangement bound and the symbol bound."""
    _check_pq(p, q)
    r = rearrangement_of_symbol(A.symbol)
    rhs = hormander_rhs(r, p, q)
    sym = symbol_rhs_compact(A, p, q)
    chain = rhs <= sym * (1 + 1e-12) + 1e-300
    params = {"p": p, "q": q, "b": None, "symbol": A.name}
    extra = {"symbol_rhs": sym, "chain_ok": bool(chain)}
    if p == 2 and q == 2:
        lhs = empirical_opnorm(A, 2, 2, "power2", trials, seed)
        ok = chain and abs(lhs - rhs) <= SHARP_TOL * max(rhs, 1.0)
        return VerificationReport("hormander", A.model.describe(), lhs, rhs, params, bool(ok),
                                  "constant-1", seed, trials, extra)
    lhs = empirical_opnorm(A, p, q, "random_band", trials, seed, workers)
    return VerificationReport("hormander", A.model.describe(), lhs, rhs, params, bool(chain),
                              "stability", seed, trials, extra)


def verify_beta_infty(A: MultiplierSpec, beta: float, trials: int = 100, seed: int = 0,
                      workers: int = 1) -> VerificationReport:
    """``||Af||_inf <= ||A||_{L^beta(VN)} ||f||_beta`` (sup over quadrature nodes)."""
    if not 1 < beta <= 2:
        raise InvalidParameter(f"need 1 < beta <= 2, got {beta}")
    rhs = lorentz_norm(rearrangement_of_symbol(A.symbol), beta, beta)
    lhs = empirical_opnorm(A, beta, math.inf, "random_band", trials, seed, workers)
    params = {"p": beta, "q": math.inf, "b": None, "symbol": A.name}
    return VerificationReport("beta_infty", A.model.describe(), lhs, rhs, params,
                              _ratio(lhs, rhs) <= 1 + CONST_TOL, "constant-1", seed, trials)


def verify_lizorkin(A: MultiplierSpec, p: float, q: float, t: float, trials: int = 100,
                    seed: int = 0, w=lambda s: s) -> VerificationReport:
    """Finite-``t`` Lizorkin check on trials with ``tau(P_supp) <= w(t)``.

    Trial supports are random sets of dual points whose total ``d_pi^2``
    mass fits under ``w(t)``.
    """
    if not A.model.is_compact:
        raise UnsupportedModel("Lizorkin trials need a compact model")
    model = A.model
    budget = float(w(t))
    d2 = model.dims.astype(float) ** 2
    run = _ratio_for(A, p, q)
    best = 0.0
    for i in range(trials):
        rng = _rng(seed, i)
        order = rng.permutation(len(model.dual))
        support, used = [], 0.0
        for j in order:
            if used + d2[j] <= budget:
                support.append(int(j))
                used += d2[j]
        if not support:
            continue
        best = max(best, run(inverse_transform(random_symbol(model, rng, support))))
    bound = lizorkin_rhs_lcg(rearrangement_of_symbol(A.symbol), w, p, q, t)
    params = {"p": p, "q": q, "b": None, "t": t, "symbol": A.name}
    return VerificationReport("lizorkin", model.describe(), best, bound.total, params,
                              math.isfinite(_ratio(best, bound.total)), "stability", seed, trials)
