"""Independent reference computations shared by several test modules."""

import numpy as np


def canon(mats, decimals=9):
    """Order-independent representation of a matrix stack, for set comparisons."""
    mats = np.round(np.asarray(mats, dtype=complex), decimals) + 0.0
    return sorted(tuple(np.concatenate([m.real.ravel(), m.imag.ravel()])) for m in mats)


def det2(a, b, c, d):
    return a * d - b * c


def coding_gain_loop(codewords, root=False):
    """min |det(D D^H)| over codeword pairs, by explicit loops (2x2 only)."""
    best = float("inf")
    n = len(codewords)
    for i in range(n):
        for j in range(i + 1, n):
            D = np.asarray(codewords[i]) - np.asarray(codewords[j])
            G = D @ D.conj().T
            v = abs(det2(G[0, 0], G[0, 1], G[1, 0], G[1, 1]))
            best = min(best, v ** 0.5 if root else v)
    return best


def dcmc_direct(codewords, snr_db, H, Z, k, N0=1.0):
    """Capacity sample mean from explicit draws, using a plain log-sum-exp."""
    C, M, T = codewords.shape
    a = np.sqrt(10 ** (snr_db / 10) / M)
    total = 0.0
    for b in range(len(k)):
        X = codewords[k[b]]
        terms = []
        for c in range(C):
            D = a * H[b] @ (X - codewords[c]) + Z[b]
            terms.append(-(np.sum(np.abs(D) ** 2) - np.sum(np.abs(Z[b]) ** 2)) / N0)
        m = max(terms)
        total += np.log2(C) - (m + np.log(np.sum(np.exp(np.array(terms) - m)))) / np.log(2)
    return total / len(k) / T
