"""Codeword sets ``C = {s * A : s in S, A in D}`` and decomposition checks.

A codebook pairs a constellation with a DM set. Codewords are indexed
``c = p * L + q`` (DM index major, symbol index minor), so the first index
of any argmin is the lexicographically smallest ``(p, q)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .constellation import PSK, Constellation, symmetry_decompose
from .dispersion import DispersionMatrixSet

__all__ = [
    "DuplicateCodeword",
    "StskCodebook",
    "EquivalentInput",
    "expand",
    "vec",
    "k_vector",
    "matrix_keys",
    "DecompositionReport",
    "verify_decomposition",
    "ldc_code",
    "qam_decompose",
]

# above this many codewords the full stack is not cached
MATERIALIZE_LIMIT = 2**16
KEY_QUANTUM = 1e-10


class DuplicateCodeword(ValueError):
    """The product map S x D -> C is not one-to-one."""


def vec(X: np.ndarray) -> np.ndarray:
    """Column-major vectorisation of the last two axes."""
    X = np.asarray(X)
    return np.swapaxes(X, -1, -2).reshape(X.shape[:-2] + (-1,))


def matrix_keys(mats: np.ndarray, quantum: float = KEY_QUANTUM) -> list[bytes]:
    """Hashable keys of matrices with entries rounded to `quantum`."""
    mats = np.asarray(mats, dtype=complex)
    q = np.stack([np.rint(mats.real / quantum), np.rint(mats.imag / quantum)], axis=-1)
    q = q.astype(np.int64).reshape(len(mats), -1)
    return [row.tobytes() for row in q]


@dataclass(frozen=True, eq=False)
class StskCodebook:
    """Constellation x DM set, with the stacking matrix ``chi``."""

    constellation: Constellation
    dms: DispersionMatrixSet
    chi: np.ndarray = field(repr=False)
    _codewords: np.ndarray | None = field(default=None, repr=False)

    @property
    def L(self) -> int:
        return self.constellation.order

    @property
    def Q(self) -> int:
        return self.dms.Q

    @property
    def M(self) -> int:
        return self.dms.M

    @property
    def T(self) -> int:
        return self.dms.T

    @property
    def size(self) -> int:
        return self.L * self.Q

    def __len__(self):
        return self.size

    @property
    def rate(self) -> float:
        return float(np.log2(self.size) / self.T)

    @property
    def codewords(self) -> np.ndarray:
        """All codewords, shape ``(Q*L, M, T)``, index ``p*L + q``."""
        if self._codewords is None:
            raise MemoryError(f"{self.size} codewords exceed the cache limit; use iter_blocks()")
        return self._codewords

    def codeword(self, p: int, q: int) -> np.ndarray:
        return self.constellation.points[q] * self.dms.matrices[p]

    def iter_blocks(self, block: int = 4096) -> Iterator[tuple[int, np.ndarray]]:
        """Yield ``(start, codewords[start:start+block])`` without caching all of them."""
        S, A = self.constellation.points, self.dms.matrices
        for start in range(0, self.size, block):
            idx = np.arange(start, min(start + block, self.size))
            p, q = np.divmod(idx, self.L)
            yield start, S[q][:, None, None] * A[p]

    def split(self, index):
        """Codeword index -> ``(p, q)``."""
        return np.divmod(index, self.L)


@dataclass(frozen=True)
class EquivalentInput:
    """Length-Q input of the vectorised model, one nonzero entry ``s`` at ``p``."""

    p: int
    s: complex
    Q: int

    @property
    def vector(self) -> np.ndarray:
        k = np.zeros(self.Q, dtype=complex)
        k[self.p] = self.s
        return k


def expand(S: Constellation, D: DispersionMatrixSet, check: bool = True) -> StskCodebook:
    """Form every product ``s_q * A_p`` and the matrix ``chi``.

    Raises
    ------
    DuplicateCodeword
        If two ``(p, q)`` pairs give the same matrix.
    """
    chi = vec(D.matrices).T.copy()
    chi.setflags(write=False)
    cb = StskCodebook(S, D, chi)
    size = cb.size
    cached = None
    if size <= MATERIALIZE_LIMIT:
        cached = (S.points[None, :, None, None] * D.matrices[:, None]).reshape(size, D.M, D.T)
        cached.setflags(write=False)
        object.__setattr__(cb, "_codewords", cached)
    if check:
        seen: dict[bytes, int] = {}
        for start, blk in cb.iter_blocks():
            for off, key in enumerate(matrix_keys(blk)):
                if key in seen:
                    a = divmod(seen[key], cb.L)
                    b = divmod(start + off, cb.L)
                    raise DuplicateCodeword(f"(p, q) = {a} and {b} give the same codeword")
                seen[key] = start + off
    return cb


def k_vector(p: int, s: complex, Q: int, S: Constellation | None = None) -> EquivalentInput:
    """The equivalent input with symbol `s` on DM `p`."""
    if not 0 <= p < Q:
        raise IndexError(f"DM index {p} out of range for Q = {Q}")
    if S is not None:
        S.index_of(s)
    return EquivalentInput(int(p), complex(s), int(Q))


@dataclass
class DecompositionReport:
    """Outcome of an exhaustive product-map check ``S x E -> C``."""

    name: str
    domain_size: int
    image_size: int
    target_size: int
    collisions: int
    outside_target: int

    @property
    def is_bijection(self) -> bool:
        return (
            self.collisions == 0
            and self.outside_target == 0
            and self.domain_size == self.target_size
            and self.image_size == self.target_size
        )

    @property
    def passed(self) -> bool:
        return self.is_bijection

    def csv(self) -> str:
        return f"{self.name},{self.domain_size},{self.image_size},{self.collisions},{int(self.passed)}"

    def __str__(self):
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict} {self.name}: |domain| = {self.domain_size}, |image| = {self.image_size}, "
            f"|target| = {self.target_size}, collisions = {self.collisions}, "
            f"outside target = {self.outside_target}"
        )


def verify_decomposition(
    S_factor: Sequence[complex],
    E: Iterable[np.ndarray],
    C_target: Iterable[np.ndarray],
    name: str = "decomposition",
) -> DecompositionReport:
    """Check by enumeration that ``(s, E_j) -> s * E_j`` maps onto `C_target` one-to-one."""
    S_factor = np.asarray(list(S_factor), dtype=complex)
    E = np.asarray(list(E) if not isinstance(E, np.ndarray) else E, dtype=complex)
    target = set(matrix_keys(np.asarray(list(C_target) if not isinstance(C_target, np.ndarray) else C_target)))
    images = S_factor[:, None, None, None] * E[None]
    keys = matrix_keys(images.reshape(-1, *E.shape[1:]))
    distinct = set(keys)
    return DecompositionReport(
        name=name,
        domain_size=len(keys),
        image_size=len(distinct),
        target_size=len(target),
        collisions=len(keys) - len(distinct),
        outside_target=len(distinct - target),
    )


def ldc_code(S: Sequence[complex], basis: np.ndarray) -> np.ndarray:
    """All ``sum_i f_i * basis[i]`` with every ``f_i in S``."""
    S = np.asarray(list(S), dtype=complex)
    basis = np.asarray(basis, dtype=complex)
    V = len(basis)
    grid = np.array(list(itertools.product(S, repeat=V)))
    return np.tensordot(grid, basis, axes=1)


def qam_decompose(S: Constellation, basis: np.ndarray, pivot: int = 0):
    """Rotation subgroup and matrix set for a QAM-based linear code.

    Returns ``(s_sym, E)`` where
    ``E = {f_l * M_l + sum_{i != l} f_i * M_i : f_l in S', f_i in S}`` and
    ``|E| = |S'| * L**(V-1)``.
    """
    if S.kind == PSK:
        raise ValueError("qam_decompose expects a square- or star-QAM constellation")
    basis = np.asarray(basis, dtype=complex)
    V = len(basis)
    if not 0 <= pivot < V:
        raise ValueError(f"pivot must lie in [0, {V - 1}], got {pivot}")
    dec = symmetry_decompose(S)
    others = [i for i in range(V) if i != pivot]
    mats = []
    for f_l in dec.s_prime:
        for f in itertools.product(S.points, repeat=V - 1):
            X = f_l * basis[pivot]
            for i, fi in zip(others, f):
                X = X + fi * basis[i]
            mats.append(X)
    return np.array(dec.s_sym), np.array(mats)
