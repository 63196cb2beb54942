"""Receivers for CSTSK codebooks.

Each detector has a per-block form operating on one observation and a
``*_batch`` form used by the Monte-Carlo harness. All ties go to the
lexicographically smallest ``(p, q)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import ls_estimate
from .codebook import StskCodebook, vec

__all__ = [
    "Decision",
    "FrameResult",
    "ml_detect",
    "single_stream_ml",
    "mf_detect",
    "iterative_semiblind",
    "ml_detect_batch",
    "single_stream_batch",
    "mf_detect_batch",
    "effective_columns",
    "semiblind_batch",
]


@dataclass(frozen=True)
class Decision:
    p: int
    q: int
    metric: float


@dataclass
class FrameResult:
    decisions: list[Decision]
    channel_estimate: np.ndarray
    iterations_run: int
    # decisions after each iteration; metrics use the final estimate
    history: list[list[Decision]] = field(default_factory=list, repr=False)


def _sq_norm(x, axes):
    return np.sum(x.real**2 + x.imag**2, axis=axes)


# -- exhaustive ML -----------------------------------------------------------

def ml_detect_batch(Y, H, codewords, gain):
    """Exhaustive ML over all codewords for a batch of blocks.

    Parameters
    ----------
    Y : (B, N, T) array
    H : (B, N, M) array
        Channel (or channel estimate) per block.
    codewords : (C, M, T) array
    gain : float
        ``sqrt(rho/M)``.

    Returns
    -------
    idx : (B,) int array
        Codeword index ``p*L + q``.
    metric : (B,) float array
        ``||Y - gain*H*X||_F^2`` at the decision.
    """
    C, M, T = codewords.shape
    B, N, _ = H.shape
    # one (B, N, M) x (M, C*T) product is much cheaper than a 4-index einsum
    wide = gain * np.transpose(codewords, (1, 0, 2)).reshape(M, C * T)
    R = Y[:, :, None, :] - (H @ wide).reshape(B, N, C, T)
    d = np.einsum("bnct,bnct->bc", R.real, R.real) + np.einsum("bnct,bnct->bc", R.imag, R.imag)
    idx = np.argmin(d, axis=1)
    return idx, d[np.arange(len(idx)), idx]


def ml_detect(Y, H, codebook: StskCodebook, rho: float) -> Decision:
    """Exhaustive ML: minimise ``||Y - sqrt(rho/M) H s_q A_p||_F`` over ``(p, q)``."""
    if codebook.size < 1:
        raise ValueError("empty codebook")
    gain = math.sqrt(rho / codebook.M)
    idx, metric = ml_detect_batch(np.asarray(Y)[None], np.asarray(H)[None], codebook.codewords, gain)
    p, q = divmod(int(idx[0]), codebook.L)
    return Decision(p, q, float(metric[0]))


# -- single-stream ML over the vectorised model ---------------------------------

def _scalar_metrics(y_norm, z, h_norm, S):
    # ||y - s h_p||^2 = ||y||^2 - 2 Re(conj(s) <h_p, y>) + |s|^2 ||h_p||^2
    S = np.asarray(S)
    return (
        y_norm[..., None, None]
        - 2.0 * np.real(np.conj(S) * z[..., :, None])
        + (np.abs(S) ** 2) * h_norm[..., :, None]
    )


def single_stream_batch(y_bar, h, S):
    """Single-stream ML for a batch.

    `h` holds the effective columns ``sqrt(rho/M) * H_bar @ chi``, shape
    ``(B, NT, Q)``. Returns codeword indices ``p*L + q`` and metrics.
    """
    z = np.einsum("bkp,bk->bp", np.conj(h), y_bar)
    m = _scalar_metrics(_sq_norm(y_bar, -1), z, _sq_norm(h, -2), S)
    flat = m.reshape(len(m), -1)
    idx = np.argmin(flat, axis=1)
    return idx, flat[np.arange(len(idx)), idx]


def single_stream_ml(y_bar, H_bar, chi, S, rho: float) -> Decision:
    """ML detection on ``y = sqrt(rho/M) H_bar chi K + n``.

    Only one entry of K is active, so each DM index p needs one projection
    ``<h_p, y>`` followed by L scalar metrics.
    """
    chi = np.asarray(chi)
    S = np.asarray(getattr(S, "points", S))
    if chi.shape[1] < 1 or len(S) < 1:
        raise ValueError("empty codebook")
    M = math.isqrt(chi.shape[0])
    h = math.sqrt(rho / M) * np.asarray(H_bar) @ chi
    idx, metric = single_stream_batch(np.asarray(y_bar)[None], h[None], S)
    p, q = divmod(int(idx[0]), len(S))
    return Decision(p, q, float(metric[0]))


# -- matched-filter shortlist ---------------------------------------------------

def mf_detect_batch(y_bar, h, S, shortlist_size: int = 1):
    """Matched-filter ranking of DM indices followed by ML on the shortlist.

    The statistic ``|h_p^H y| / ||h_p||`` ranks the Q columns; exact scalar
    ML is then run over ``shortlist x S``.
    """
    B, _, Q = h.shape
    if not 1 <= shortlist_size <= Q:
        raise ValueError(f"shortlist size must lie in [1, {Q}]")
    z = np.einsum("bkp,bk->bp", np.conj(h), y_bar)
    h_norm = _sq_norm(h, -2)
    stat = np.abs(z) / np.sqrt(h_norm)
    order = np.argsort(-stat, axis=1, kind="stable")[:, :shortlist_size]
    if shortlist_size < Q:
        order = np.sort(order, axis=1)
    rows = np.arange(B)[:, None]
    m = _scalar_metrics(_sq_norm(y_bar, -1), z[rows, order], h_norm[rows, order], S)
    flat = m.reshape(B, -1)
    j = np.argmin(flat, axis=1)
    k, q = np.divmod(j, len(S))
    p = order[np.arange(B), k]
    return p * len(S) + q, flat[np.arange(B), j]


def mf_detect(y_bar, H_bar, chi, S, rho: float, shortlist_size: int = 1) -> Decision:
    """Reduced-search detector: ML restricted to the best `shortlist_size` DMs."""
    chi = np.asarray(chi)
    S = np.asarray(getattr(S, "points", S))
    M = math.isqrt(chi.shape[0])
    h = math.sqrt(rho / M) * np.asarray(H_bar) @ chi
    idx, metric = mf_detect_batch(np.asarray(y_bar)[None], h[None], S, shortlist_size)
    p, q = divmod(int(idx[0]), len(S))
    return Decision(p, q, float(metric[0]))


def effective_columns(H, dms, gain):
    """``gain * vec(H A_p)`` for every DM, i.e. ``gain * (I_T kron H) chi``.

    H is ``(B, N, M)``; the result is ``(B, NT, Q)``.
    """
    HA = np.einsum("bnm,pmt->bpnt", H, dms)
    return gain * np.swapaxes(vec(HA), -1, -2)


# -- semi-blind iterative receiver --------------------------------------------

def semiblind_batch(Y_train, X_train, Y_data, codewords, rho, iters):
    """Decision-directed LS re-estimation for a batch of frames.

    Parameters
    ----------
    Y_train : (B, Kt, N, T) array
    X_train : (Kt, M, T) array
        Known training codewords, shared by all frames.
    Y_data : (B, Kd, N, T) array
    codewords : (C, M, T) array
    rho : float
    iters : int
        Number of re-estimation passes after the training-only pass.

    Returns
    -------
    history : list of (B, Kd) int arrays
        Decisions after iteration 0, 1, ..., iters.
    H_hat : (B, N, M) array
        Final channel estimate.
    """
    if iters < 0:
        raise ValueError("iters must be non-negative")
    B, Kt, N, T = Y_train.shape
    Kd = Y_data.shape[1]
    M = codewords.shape[1]
    gain = math.sqrt(rho / M)

    def stack(a):
        # (B, K, R, T) -> (B, R, K*T), blocks side by side in time
        return np.swapaxes(a, 1, 2).reshape(a.shape[0], a.shape[2], -1)

    Yt = stack(Y_train)
    Xt = stack(np.broadcast_to(X_train, (B,) + X_train.shape))
    Yd = stack(Y_data)
    H_hat = ls_estimate([Yt], [Xt], rho)
    history = []
    flatY = Y_data.reshape(B * Kd, N, T)
    for it in range(iters + 1):
        Hrep = np.repeat(H_hat, Kd, axis=0)
        idx, _ = ml_detect_batch(flatY, Hrep, codewords, gain)
        idx = idx.reshape(B, Kd)
        history.append(idx)
        if it == iters:
            break
        Xd = stack(codewords[idx])
        H_hat = ls_estimate([Yt, Yd], [Xt, Xd], rho)
    return history, H_hat


def iterative_semiblind(
    training_blocks: Sequence[tuple[np.ndarray, np.ndarray]],
    data_observations: Sequence[np.ndarray],
    codebook: StskCodebook,
    rho: float,
    iters: int = 3,
) -> FrameResult:
    """Semi-blind detection of one frame.

    Iteration 0 estimates the channel from the ``(X, Y)`` training pairs
    alone and detects every data block by ML. Each further iteration refits
    the LS estimate on training plus detected data, weighting both equally,
    and detects again.
    """
    X_train = np.array([x for x, _ in training_blocks])
    Y_train = np.array([y for _, y in training_blocks])[None]
    Y_data = np.array(list(data_observations))[None]
    hist, H_hat = semiblind_batch(Y_train, X_train, Y_data, codebook.codewords, rho, iters)

    def decisions(idx):
        out = []
        for c, Y in zip(idx[0], Y_data[0]):
            p, q = divmod(int(c), codebook.L)
            X = codebook.codewords[c]
            r = Y - math.sqrt(rho / codebook.M) * H_hat[0] @ X
            out.append(Decision(p, q, float(_sq_norm(r, (0, 1)))))
        return out

    final = decisions(hist[-1])
    return FrameResult(final, H_hat[0], iters, [decisions(h) for h in hist])
