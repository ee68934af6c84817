"""Independent reference computations used only by the tests.

Nothing here calls the package's transforms or rearrangement code:
representations come from matrix exponentials of the spin generators,
transforms are dense quadrature sums, and singular-number functions are
evaluated by brute force on expanded lists.
"""
import math

import numpy as np
from scipy.linalg import expm


def spin_generators(l2):
    """``(J_y, J_z)`` for spin ``l = l2/2`` with basis ``m = l, ..., -l``."""
    l = l2 / 2
    m = l - np.arange(l2 + 1)
    jz = np.diag(m).astype(complex)
    # J_+ |m> = sqrt(l(l+1) - m(m+1)) |m+1>; row m+1 sits one above row m
    jp = np.zeros((l2 + 1, l2 + 1), dtype=complex)
    for k in range(1, l2 + 1):
        mm = m[k]
        jp[k - 1, k] = math.sqrt(l * (l + 1) - mm * (mm + 1))
    jy = (jp - jp.conj().T) / 2j
    return jy, jz


def su2_rep(l2, alpha, beta, gamma):
    jy, jz = spin_generators(l2)
    return expm(-1j * alpha * jz) @ expm(-1j * beta * jy) @ expm(-1j * gamma * jz)


def dense_forward_su2(model, values):
    pts, w = model.quadrature()
    out = []
    for p in model.dual:
        l2 = p.highest_weight[0]
        acc = np.zeros((p.dim, p.dim), dtype=complex)
        for (a, b, g), wx, fx in zip(pts, w, values):
            acc += wx * fx * su2_rep(l2, a, b, g).conj().T
        out.append(acc)
    return out


def dense_inverse_su2(model, blocks):
    pts, _ = model.quadrature()
    vals = np.zeros(len(pts), dtype=complex)
    for p, blk in zip(model.dual, blocks):
        l2 = p.highest_weight[0]
        for i, (a, b, g) in enumerate(pts):
            vals[i] += p.dim * np.trace(blk @ su2_rep(l2, a, b, g))
    return vals


def dense_dft(values, ks):
    N = len(values)
    x = np.arange(N)
    return np.array([np.mean(values * np.exp(-2j * np.pi * k * x / N)) for k in ks])


def expand(values, masses, unit):
    """Expand a step into equal atoms of size ``unit`` (integer masses only)."""
    out = []
    for v, m in zip(values, masses):
        out.extend([v] * int(round(m / unit)))
    return np.sort(np.array(out, dtype=float))[::-1]


def brute_mu(atoms, unit, t):
    """``inf{lambda : #{atoms > lambda} * unit <= t}`` scanning candidate lambdas."""
    cands = np.concatenate([[0.0], np.unique(atoms)])
    for lam in cands:
        if np.sum(atoms > lam) * unit <= t:
            return float(lam)
    raise AssertionError("unreachable")


def brute_distribution(atoms, unit, lam):
    return float(np.sum(atoms > lam) * unit)


def brute_weak_norm(atoms, unit, rr, grid=20000):
    """``sup_t t^{1/rr} mu_t`` over a fine grid plus left limits at atom ends."""
    total = len(atoms) * unit
    ends = unit * np.arange(1, len(atoms) + 1)
    left = atoms * ends ** (1 / rr)
    ts = np.linspace(0, total, grid)
    idx = np.minimum((ts / unit).astype(int), len(atoms) - 1)
    sampled = np.where(ts < total, ts ** (1 / rr) * atoms[idx], 0.0)
    return max(left.max(), sampled.max())
