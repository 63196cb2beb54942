"""Coding gain, diversity, rates, configuration counts and DCMC capacity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from .codebook import StskCodebook
from .rng import CAPACITY, crandn, stream

__all__ = [
    "CodeMetrics",
    "ConfigOption",
    "CapacityEstimate",
    "coding_gain",
    "diversity_order",
    "code_metrics",
    "rate_stsk",
    "rate_ldc",
    "rate_cda",
    "enumerate_configs",
    "estimate_dcmc",
    "dcmc_capacity",
]


@dataclass(frozen=True)
class CodeMetrics:
    coding_gain: float
    diversity_order: int
    rate_bpcu: float


@dataclass(frozen=True)
class ConfigOption:
    Q: int
    L: int


@dataclass(frozen=True)
class CapacityEstimate:
    """Monte-Carlo DCMC capacity with a normal-approximation 95% interval."""

    value: float
    ci_low: float
    ci_high: float
    samples: int
    std_error: float


def _pairwise_reduce(cb: StskCodebook, fn: Callable, block: int = 512):
    """Apply `fn` to the differences of every unordered codeword pair, block by block.

    Yields one reduced value per block pair; the caller combines them.
    """
    if cb.size < 2:
        raise ValueError("need at least two codewords")
    blocks = list(cb.iter_blocks(block))
    for bi, (si, Ci) in enumerate(blocks):
        for sj, Cj in blocks[bi:]:
            D = Ci[:, None] - Cj[None, :]
            ii = si + np.arange(len(Ci))[:, None]
            jj = sj + np.arange(len(Cj))[None, :]
            mask = jj > ii
            if mask.any():
                yield fn(D[mask])


def coding_gain(cb: StskCodebook, root: bool = False) -> float:
    """Minimum ``|det(D D^H)|`` over all pairs of distinct codewords.

    With ``root=True`` the value is raised to ``1/M`` per pair before the
    minimum, i.e. the geometric-mean form of the determinant criterion.
    The default (no root) is the quantity the reference gain tables list.
    """

    def block_min(D):
        d = np.abs(np.linalg.det(D @ np.conj(np.swapaxes(D, -1, -2))))
        return d.min()

    g = min(_pairwise_reduce(cb, block_min))
    g = max(float(g), 0.0)
    return g ** (1.0 / cb.M) if root else g


def diversity_order(cb: StskCodebook) -> int:
    """Minimum rank of codeword differences.

    Rank uses singular values above ``max(M, T) * eps * sigma_max``.
    """
    return int(min(_pairwise_reduce(cb, lambda D: np.linalg.matrix_rank(D).min())))


def code_metrics(cb: StskCodebook) -> CodeMetrics:
    return CodeMetrics(coding_gain(cb), diversity_order(cb), cb.rate)


def rate_stsk(Q: int, L: int, T: int) -> float:
    """``log2(Q*L)/T`` bits per channel use."""
    return math.log2(Q * L) / T


def rate_ldc(V: int, r: int, L: int, T: int) -> float:
    """Rate with the DM subset ``E_{L_r}`` of a V-matrix linear code."""
    return (V - r + 1) * math.log2(L) / T


def rate_cda(M: int, m: int, r: int, L: int, T: int) -> float:
    """Rate with the CDA DM subset ``E_{(m,r)}``."""
    return (M * M - m * r + 1) * math.log2(L) / T


def enumerate_configs(R: float, T: int) -> list[ConfigOption]:
    """All power-of-two ``(Q, L)`` with ``log2(Q*L)/T == R``; there are ``R*T + 1``."""
    bits = R * T
    if bits < 0 or abs(bits - round(bits)) > 1e-12:
        raise ValueError(f"R*T must be a non-negative integer, got {bits}")
    bits = int(round(bits))
    return [ConfigOption(2**k, 2 ** (bits - k)) for k in range(bits + 1)]


def _dcmc_chunk(cw, a, N, N0, n, rng):
    C, M, T = cw.shape
    k = rng.integers(0, C, size=n)
    H = crandn(rng, (n, N, M))
    Z = crandn(rng, (n, N, T), N0)
    # H X_c for every codeword in one product, then differences
    HC = (H @ np.transpose(cw, (1, 0, 2)).reshape(M, C * T)).reshape(n, N, C, T)
    HX = HC[np.arange(n), :, k, :]                  # (n, N, T)
    D = a * (HX[:, :, None, :] - HC) + Z[:, :, None, :]
    sq = np.einsum("bnct,bnct->bc", D.real, D.real) + np.einsum("bnct,bnct->bc", D.imag, D.imag)
    metric = -(sq - np.sum(np.abs(Z) ** 2, axis=(1, 2))[:, None]) / N0
    return math.log2(C) - logsumexp(metric, axis=1) / math.log(2)


def estimate_dcmc(
    cb: StskCodebook,
    snr_db: float,
    N: int = 2,
    samples: int = 10_000,
    rng_seed: int = 0,
    N0: float = 1.0,
    chunk: int = 2048,
    executor=None,
) -> CapacityEstimate:
    """Monte-Carlo DCMC capacity of equiprobable codewords, in bits per channel use.

    Each chunk of samples draws from its own stream keyed by the chunk index
    only, so every SNR point sees the same channel and noise realisations.
    An optional ``concurrent.futures`` executor spreads chunks over workers;
    the result does not depend on it.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    cw = cb.codewords
    if cb.size == 1:
        return CapacityEstimate(0.0, 0.0, 0.0, samples, 0.0)
    a = math.sqrt(10 ** (snr_db / 10) / cb.M)
    sizes = [min(chunk, samples - s) for s in range(0, samples, chunk)]

    def job(i):
        return _dcmc_chunk(cw, a, N, N0, sizes[i], stream(rng_seed, CAPACITY, i))

    idx = range(len(sizes))
    parts = list(executor.map(job, idx)) if executor is not None else [job(i) for i in idx]
    v = np.concatenate(parts) / cb.T
    mean = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
    return CapacityEstimate(mean, mean - 1.96 * se, mean + 1.96 * se, samples, se)


def dcmc_capacity(cb: StskCodebook, snr_db: float, N: int = 2, samples: int = 10_000,
                  rng_seed: int = 0) -> float:
    return estimate_dcmc(cb, snr_db, N, samples, rng_seed).value
