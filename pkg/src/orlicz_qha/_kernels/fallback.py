"""Pure-numpy implementations of the hot kernels.

Selected automatically when the compiled extension is unavailable (or
when ORLICZ_QHA_FORCE_FALLBACK is set). The algorithms are identical to
the compiled ones; the Jacobi sweep uses a round-robin parallel ordering
so each round applies n/2 disjoint rotations with vectorized column ops.
"""

from __future__ import annotations

import numpy as np

BACKEND = "fallback"


def _round_robin_rounds(n: int):
    """Circle-method tournament schedule: n-1 rounds of disjoint pairs."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = [
            (players[i], players[m - 1 - i])
            for i in range(m // 2)
            if players[i] != -1 and players[m - 1 - i] != -1
        ]
        rounds.append([(min(a, b), max(a, b)) for a, b in pairs])
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_singular_values(
    a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100
) -> np.ndarray:
    """Singular values by one-sided Jacobi orthogonalization of columns."""
    work = np.array(a, dtype=complex, order="F", copy=True)
    n = work.shape[1]
    if n < 2:
        return np.abs(np.linalg.norm(work, axis=0))
    rounds = _round_robin_rounds(n)
    for _ in range(max_sweeps):
        off = 0.0
        for pairs in rounds:
            ii = np.array([p[0] for p in pairs])
            jj = np.array([p[1] for p in pairs])
            ci = work[:, ii]
            cj = work[:, jj]
            aa = np.einsum("ki,ki->i", ci.conj(), ci).real
            bb = np.einsum("ki,ki->i", cj.conj(), cj).real
            g = np.einsum("ki,ki->i", ci.conj(), cj)
            ref = np.sqrt(aa * bb)
            active = (ref > 0) & (np.abs(g) > tol * ref)
            if active.any():
                off = max(off, float(np.max(np.abs(g[active]) / ref[active])))
                absg = np.abs(g[active])
                phase = g[active] / absg
                tau = (bb[active] - aa[active]) / (2.0 * absg)
                t = np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(tau == 0.0, 1.0, t)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                sel_i = ii[active]
                sel_j = jj[active]
                ci_a = work[:, sel_i]
                cj_a = work[:, sel_j] * np.conj(phase)[None, :]
                work[:, sel_i] = c[None, :] * ci_a - s[None, :] * cj_a
                work[:, sel_j] = s[None, :] * ci_a + c[None, :] * cj_a
        if off <= tol:
            break
    sv = np.linalg.norm(work, axis=0)
    sv.sort()
    return sv[::-1].copy()


def displacement_batch(alphas: np.ndarray, n: int) -> np.ndarray:
    """Fock-basis displacement matrices D(alpha) for a batch of alphas.

    Entries along each diagonal follow the normalized associated-Laguerre
    three-term recurrence carried in fully scaled form (the Gaussian
    prefactor is inside the recurrence seed), so no intermediate quantity
    overflows; the lower triangle reuses the same recurrence values.
    """
    alphas = np.ascontiguousarray(alphas, dtype=complex).ravel()
    K = alphas.size
    x = (alphas.real**2 + alphas.imag**2).astype(float)
    out = np.zeros((K, n, n), dtype=complex)
    nz = np.abs(alphas) > 0
    safe = np.where(nz, alphas, 1.0)
    pref = np.exp(-0.5 * x).astype(complex)
    for k in range(n):
        if k > 0:
            pref = pref * alphas / np.sqrt(k)
        if k == 0:
            mirror = np.ones(K, dtype=complex)
        else:
            mirror = np.where(nz, (-np.conj(safe) / safe) ** k, 0.0)
        e_prev = np.zeros(K, dtype=complex)
        e = pref.copy()
        out[:, k, 0] = e
        out[:, 0, k] = e * mirror
        for m in range(0, n - 1 - k):
            coef_a = (2 * m + 1 + k - x) / np.sqrt((m + 1) * (m + 1 + k))
            coef_b = np.sqrt(m * (m + k) / ((m + 1) * (m + 1 + k)))
            e_prev, e = e, coef_a * e - coef_b * e_prev
            out[:, m + 1 + k, m + 1] = e
            out[:, m + 1, m + 1 + k] = e * mirror
    return out
