"""Pure-numpy fallback for the compiled kernels."""
import numpy as np
from scipy.special import gammaln


def _edge(j, mr, mc, ch, sh):
    total = np.zeros_like(ch)
    lognum = 0.5 * (gammaln(j + mr + 1) + gammaln(j - mr + 1)
                    + gammaln(j + mc + 1) + gammaln(j - mc + 1))
    for s in range(int(2 * j) + 2):
        a, b, c = j + mc - s, mr - mc + s, j - mr - s
        if min(a, b, c) < -1e-9:
            continue
        logden = gammaln(a + 1) + gammaln(s + 1) + gammaln(b + 1) + gammaln(c + 1)
        sign = -1.0 if int(round(b)) % 2 else 1.0
        total += (sign * np.exp(lognum - logden)
                  * ch ** (2 * j + mc - mr - 2 * s) * sh ** (mr - mc + 2 * s))
    return total


def wigner_d_packed(two_lmax, beta):
    """Small-d matrices d^l(beta) for 2l = 0..two_lmax, packed.

    Block ``2l`` occupies ``out[offsets[2l]:offsets[2l+1]]`` and reshapes to
    ``(len(beta), 2l+1, 2l+1)``; row/column ``a`` carries ``m = l - a``.
    Entries come from the three-term recurrence in ``l`` at fixed
    ``(m1, m2)``, seeded with the closed form at ``l = max(|m1|, |m2|)``.
    """
    beta = np.ascontiguousarray(beta, dtype=np.float64)
    nb = beta.shape[0]
    dims = np.arange(1, two_lmax + 2)
    offsets = np.concatenate([[0], np.cumsum(nb * dims**2)]).astype(np.int64)
    blocks = [np.zeros((nb, d, d)) for d in dims]
    cb = np.cos(beta)
    ch, sh = np.cos(0.5 * beta), np.sin(0.5 * beta)
    for t1 in range(-two_lmax, two_lmax + 1):
        for t2 in range(-two_lmax, two_lmax + 1):
            if (t1 - t2) % 2:
                continue
            m1, m2 = 0.5 * t1, 0.5 * t2
            tcur = max(abs(t1), abs(t2))
            prev = np.zeros(nb)
            cur = _edge(0.5 * tcur, m1, m2, ch, sh)
            while True:
                blocks[tcur][:, (tcur - t1) // 2, (tcur - t2) // 2] = cur
                if tcur + 2 > two_lmax:
                    break
                l = 0.5 * tcur
                if tcur == 0:
                    nxt = cb.copy()
                else:
                    a = (2 * l + 1) * (l * (l + 1) * cb - m1 * m2)
                    b = (l + 1) * np.sqrt(abs((l * l - m1 * m1) * (l * l - m2 * m2)))
                    den = l * np.sqrt(((l + 1) ** 2 - m1 * m1) * ((l + 1) ** 2 - m2 * m2))
                    nxt = (a * cur - b * prev) / den
                prev, cur = cur, nxt
                tcur += 2
    out = np.concatenate([b.ravel() for b in blocks])
    return out, offsets
