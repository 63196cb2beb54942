"""Block-fading MIMO channel ``Y = sqrt(rho/M) H X + N`` and its vectorised form.

H has i.i.d. CN(0, 1) entries and stays fixed over the T slots of a block.
The noise variance ``N0`` defaults to 1, so ``rho`` is the SNR per receive
antenna for unit-power codewords.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .codebook import vec
from .rng import crandn

__all__ = [
    "ChannelBlock",
    "Observation",
    "db2lin",
    "sample_channel",
    "transmit",
    "perturb_csir",
    "ls_estimate",
    "equivalent_channel",
]


def db2lin(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


@dataclass(frozen=True, eq=False)
class ChannelBlock:
    H: np.ndarray
    rho: float
    N0: float = 1.0

    @property
    def N(self) -> int:
        return self.H.shape[0]

    @property
    def M(self) -> int:
        return self.H.shape[1]

    @property
    def gain(self) -> float:
        return math.sqrt(self.rho / self.M)


@dataclass(frozen=True, eq=False)
class Observation:
    Y: np.ndarray
    y_bar: np.ndarray
    H_bar: np.ndarray


def equivalent_channel(H: np.ndarray, T: int) -> np.ndarray:
    """``I_T kron H``, mapping ``vec(X)`` to ``vec(H X)``."""
    return np.kron(np.eye(T), H)


def sample_channel(N: int, M: int, rng: np.random.Generator, rho: float = 1.0,
                   N0: float = 1.0) -> ChannelBlock:
    """A block with i.i.d. CN(0, 1) channel entries."""
    return ChannelBlock(crandn(rng, (N, M)), float(rho), float(N0))


def transmit(block: ChannelBlock, X: np.ndarray, rng: np.random.Generator | None = None) -> Observation:
    """Pass the codeword `X` through `block`, adding CN(0, N0) noise.

    With ``rng=None`` or ``N0 == 0`` the observation is noiseless.
    """
    X = np.asarray(X, dtype=complex)
    if X.shape[0] != block.M:
        raise ValueError(f"codeword has {X.shape[0]} rows, channel has {block.M} inputs")
    T = X.shape[1]
    Y = block.gain * block.H @ X
    if rng is not None and block.N0 > 0:
        Y = Y + crandn(rng, Y.shape, block.N0)
    return Observation(Y, vec(Y), equivalent_channel(block.H, T))


def perturb_csir(H: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Channel estimate ``H + E`` with E i.i.d. CN(0, sigma); `sigma` is a variance."""
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    E = crandn(rng, np.shape(H), sigma)
    return H + E if sigma > 0 else np.array(H, dtype=complex, copy=True)


def ls_estimate(Y_train: Sequence[np.ndarray], X_train: Sequence[np.ndarray], rho: float) -> np.ndarray:
    """Least-squares channel estimate from known blocks.

    Solves ``min ||Y - sqrt(rho/M) H X||`` over the horizontally stacked
    blocks, giving ``H = Y X^H (X X^H)^-1 / sqrt(rho/M)``. Works on single
    frames (lists of 2-D blocks) and on batches where every block carries a
    leading frame axis.

    Raises
    ------
    numpy.linalg.LinAlgError
        If the stacked training matrix has rank below M.
    """
    Y = np.concatenate(list(Y_train), axis=-1)
    X = np.concatenate(list(X_train), axis=-1)
    M = X.shape[-2]
    Xh = np.conj(np.swapaxes(X, -1, -2))
    G = X @ Xh
    if np.any(np.linalg.matrix_rank(G) < M):
        raise np.linalg.LinAlgError("training blocks do not span the transmit space")
    # H G = Y X^H  ->  G^H H^H = (Y X^H)^H, G Hermitian
    Hh = np.linalg.solve(G, np.conj(np.swapaxes(Y @ Xh, -1, -2)))
    return np.conj(np.swapaxes(Hh, -1, -2)) / math.sqrt(rho / M)
