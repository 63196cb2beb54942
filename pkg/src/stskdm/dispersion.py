"""Dispersion-matrix (DM) sets.

Three structured families are built here:

* field-extension (FEC) sets from powers of a companion matrix,
* cyclic-division-algebra (CDA) sets, and
* capacity-optimised (CO) sets found by random search,

plus the printed CO set for CSTSK(2,2,2,8)/BPSK as a fixture. Every set is
checked against the unit-power constraint ``trace(A^H A) = T``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constellation import PSK, Constellation

__all__ = [
    "PowerConstraintError",
    "DispersionMatrixSet",
    "FecParams",
    "CdaParams",
    "companion_matrix",
    "binomial_poly",
    "fec_dm_set",
    "cda_codeword",
    "cda_dm_set",
    "co_dm_search",
    "random_dm_set",
    "co_fixture_bpsk8",
    "base_psk_order",
    "save_dm_set",
    "load_dm_set",
    "format_dm_set",
    "parse_dm_set",
]

POWER_TOL = 1e-9
FIXTURE_POWER_TOL = 5e-3
DISTINCT_TOL = 1e-12


class PowerConstraintError(ValueError):
    """A dispersion matrix violates ``trace(A^H A) = T``."""


@dataclass(frozen=True, eq=False)
class DispersionMatrixSet:
    """Q complex M x T dispersion matrices.

    Attributes
    ----------
    matrices : np.ndarray
        Shape ``(Q, M, T)``, read-only.
    family : str
        ``"FEC"``, ``"CDA"``, ``"CO"`` or ``"Fixture"``.
    params : dict
        Record of the construction inputs.
    power_tol : float
        Tolerance used when the power constraint was checked.
    """

    matrices: np.ndarray
    family: str
    params: dict = field(default_factory=dict)
    power_tol: float = POWER_TOL

    def __post_init__(self):
        A = np.array(self.matrices, dtype=complex)
        if A.ndim != 3 or A.shape[0] < 1:
            raise ValueError(f"expected a (Q, M, T) stack, got shape {A.shape}")
        if A.shape[1] != A.shape[2]:
            raise ValueError(f"only square DMs (M = T) are supported, got {A.shape[1:]}")
        err = power_errors(A)
        bad = np.flatnonzero(err > self.power_tol)
        if bad.size:
            raise PowerConstraintError(
                f"DM {bad[0]} has trace(A^H A) off by {err[bad[0]]:.3g} "
                f"(tolerance {self.power_tol:g})"
            )
        A.setflags(write=False)
        object.__setattr__(self, "matrices", A)

    @property
    def Q(self) -> int:
        return self.matrices.shape[0]

    @property
    def M(self) -> int:
        return self.matrices.shape[1]

    @property
    def T(self) -> int:
        return self.matrices.shape[2]

    def __len__(self):
        return self.Q

    def __getitem__(self, p):
        return self.matrices[p]

    def take(self, Q: int) -> "DispersionMatrixSet":
        """The first `Q` matrices; any subset of a DDC set is a valid DM set."""
        if not 1 <= Q <= self.Q:
            raise ValueError(f"cannot take {Q} of {self.Q} matrices")
        params = dict(self.params, taken=Q)
        return DispersionMatrixSet(self.matrices[:Q], self.family, params, self.power_tol)

    def is_distinct(self, tol: float = DISTINCT_TOL) -> bool:
        A = self.matrices.reshape(self.Q, -1)
        i, j = np.triu_indices(self.Q, 1)
        return bool(np.all(np.max(np.abs(A[i] - A[j]), axis=1) > tol))


def power_errors(A: np.ndarray) -> np.ndarray:
    """``|trace(A^H A) - T|`` for each matrix of a ``(Q, M, T)`` stack."""
    A = np.asarray(A)
    return np.abs(np.sum(np.abs(A) ** 2, axis=(-2, -1)) - A.shape[-1])


def companion_matrix(poly_coeffs: Sequence[complex]) -> np.ndarray:
    """Companion matrix of the monic ``x^n + a_{n-1} x^{n-1} + ... + a_0``.

    `poly_coeffs` lists ``a_0 .. a_{n-1}`` (the leading 1 is implicit). The
    result has ones on the sub-diagonal and ``-a_0 .. -a_{n-1}`` in the last
    column.

    >>> companion_matrix([1, 0])
    array([[ 0.+0.j, -1.+0.j],
           [ 1.+0.j,  0.+0.j]])
    """
    a = np.asarray(poly_coeffs, dtype=complex).ravel()
    n = a.size
    if n < 1:
        raise ValueError("polynomial degree must be at least 1")
    C = np.zeros((n, n), dtype=complex)
    C[np.arange(1, n), np.arange(n - 1)] = 1.0
    C[:, -1] = -a
    return C


def binomial_poly(M: int, c: complex) -> list[complex]:
    """Coefficients ``a_0..a_{M-1}`` of ``x^M - c``."""
    return [-complex(c)] + [0j] * (M - 1)


@dataclass
class FecParams:
    """Inputs of a field-extension DM set.

    `poly_coeffs` defaults to ``x^M - g`` with ``g = exp(2j*pi/L)``. `subset`
    selects ``E_{L_r}`` (coefficients ``0..r-1`` pinned to 1); when it is
    None the single coefficient `pivot` is pinned.
    """

    M: int = 2
    poly_coeffs: Sequence[complex] | None = None
    pivot: int = 1
    subset: int | None = None


def _coefficient_sets(S, n_coeffs, fixed):
    """Enumerate coefficient vectors with `fixed` positions set to 1."""
    free = [i for i in range(n_coeffs) if i not in fixed]
    for vals in itertools.product(S, repeat=len(free)):
        f = np.ones(n_coeffs, dtype=complex)
        f[free] = vals
        yield f


def fec_dm_set(S: Constellation, params: FecParams | None = None, **kw) -> DispersionMatrixSet:
    """Field-extension DM set over the PSK constellation `S`.

    Builds ``{sum_i f_i M^i}`` over the free coefficients ``f_i in S`` with the
    pinned coefficients set to 1, and scales by ``1/sqrt(M)``. The full set
    (pivot only) has ``L**(M-1)`` matrices, the subset ``E_{L_r}`` has
    ``L**(M-r)``.

    Irreducibility of the polynomial over ``Q(S)`` is the caller's
    responsibility; a reducible one shows up later as zero coding gain.
    """
    if params is None:
        params = FecParams(**kw)
    elif kw:
        raise TypeError("pass either params or keyword arguments")
    if S.kind != PSK:
        raise ValueError("FEC dispersion matrices are defined over PSK sets")
    M = params.M
    L = S.order
    coeffs = params.poly_coeffs
    if coeffs is None:
        coeffs = binomial_poly(M, S.generator)
    coeffs = list(coeffs)
    if len(coeffs) != M:
        raise ValueError(f"need {M} polynomial coefficients, got {len(coeffs)}")
    if params.subset is None:
        if not 0 <= params.pivot <= M - 1:
            raise ValueError(f"pivot must lie in [0, {M - 1}], got {params.pivot}")
        fixed = {params.pivot}
    else:
        if not 1 <= params.subset <= M - 1:
            raise ValueError(f"subset r must lie in [1, {M - 1}], got {params.subset}")
        fixed = set(range(params.subset))
    C = companion_matrix(coeffs)
    powers = np.stack([np.linalg.matrix_power(C, i) for i in range(M)])
    mats = [np.tensordot(f, powers, axes=1) for f in _coefficient_sets(S.points, M, fixed)]
    mats = np.array(mats) / math.sqrt(M)
    record = dict(L=L, M=M, poly_coeffs=coeffs, pivot=params.pivot, subset=params.subset)
    try:
        return DispersionMatrixSet(mats, "FEC", record)
    except PowerConstraintError as exc:
        raise PowerConstraintError(
            f"{exc}; FEC scaling by 1/sqrt(M) needs unit-modulus companion powers"
        ) from None


@dataclass
class CdaParams:
    """Inputs of a CDA code / DM set.

    Phases are given in units of pi, so ``t_phase=0.5`` means
    ``t_M = exp(j*pi/2)``. `epsilon` is added to both phases (in radians
    divided by pi, like the phases) to move them off rational multiples.

    `pivot` pins one coefficient of the diagonal symbol group. It may be a
    sequence ``l_1..l_M`` but the entries must agree, since the diagonal
    blocks share the same symbols. `subset` = ``(m, r)`` selects
    ``E_{(m,r)}`` instead.
    """

    M: int = 2
    t_phase: float = 0.5
    delta_phase: float = 3 / 8
    epsilon: float = 0.0
    pivot: int | Sequence[int] = 0
    subset: tuple[int, int] | None = None

    @property
    def t(self) -> complex:
        return complex(np.exp(1j * np.pi * (self.t_phase + self.epsilon)))

    @property
    def delta(self) -> complex:
        return complex(np.exp(1j * np.pi * (self.delta_phase + self.epsilon)))

    @property
    def omega(self) -> complex:
        return complex(np.exp(2j * np.pi / self.M))

    def pinned(self) -> set[tuple[int, int]]:
        """Coefficient positions ``(j, i)`` fixed to 1."""
        M = self.M
        if self.subset is not None:
            m, r = self.subset
            if not (1 <= m <= M and 1 <= r <= M - 1):
                raise ValueError(f"(m, r) = {(m, r)} out of range for M = {M}")
            return {(j, i) for j in range(m) for i in range(r)}
        piv = self.pivot
        if not isinstance(piv, (int, np.integer)):
            piv = list(piv)
            if len(piv) != M or len(set(piv)) != 1:
                raise ValueError(f"diagonal pivots must be {M} equal indices, got {piv}")
            piv = piv[0]
        if not 0 <= piv <= M - 1:
            raise ValueError(f"pivot must lie in [0, {M - 1}], got {piv}")
        return {(0, int(piv))}


def cda_codeword(params: CdaParams, f) -> np.ndarray:
    """One CDA code matrix for the symbol grid ``f[j, i]``.

    Entry ``(u, k)`` is ``sum_i f[(u-k) mod M, i] * (omega**k * t)**i``,
    multiplied by ``delta`` above the diagonal. Column ``k`` is therefore
    column 0 with ``t`` replaced by ``omega**k * t``.
    """
    M = params.M
    f = np.asarray(f, dtype=complex)
    if f.shape != (M, M):
        raise ValueError(f"symbol grid must be {M}x{M}, got {f.shape}")
    return _cda_matrices(params, f[None])[0]


def _cda_matrices(params: CdaParams, f: np.ndarray) -> np.ndarray:
    # f: (n, M, M) symbol grids -> (n, M, M) code matrices
    M = params.M
    t, delta, w = params.t, params.delta, params.omega
    u, k = np.meshgrid(np.arange(M), np.arange(M), indexing="ij")
    j = (u - k) % M
    # basis[k, i] = (w^k t)^i
    basis = (w ** np.arange(M)[:, None] * t) ** np.arange(M)[None, :]
    X = np.einsum("nuki,ki->nuk", f[:, j, :], basis)
    return np.where(u < k, delta, 1.0) * X


def cda_dm_set(S: Constellation, params: CdaParams | None = None, **kw) -> DispersionMatrixSet:
    """CDA DM set over the PSK constellation `S`, scaled by ``1/M``.

    The full set (one pinned coefficient) has ``L**(M*M - 1)`` matrices; the
    subset ``E_{(m,r)}`` pins ``f[j, i] = 1`` for ``j < m``, ``i < r`` and has
    ``L**(M*M - m*r)``.
    """
    if params is None:
        params = CdaParams(**kw)
    elif kw:
        raise TypeError("pass either params or keyword arguments")
    if S.kind != PSK:
        raise ValueError("CDA dispersion matrices are defined over PSK sets")
    M = params.M
    pinned = params.pinned()
    flat_fixed = {j * M + i for j, i in pinned}
    grids = np.array(list(_coefficient_sets(S.points, M * M, flat_fixed))).reshape(-1, M, M)
    mats = _cda_matrices(params, grids) / M
    record = dict(
        L=S.order, M=M, t_phase=params.t_phase, delta_phase=params.delta_phase,
        epsilon=params.epsilon, pivot=params.pivot, subset=params.subset,
    )
    return DispersionMatrixSet(mats, "CDA", record)


def base_psk_order(Q: int, M: int, family: str) -> int:
    """Smallest power-of-two PSK order whose FEC or CDA set has ``>= Q`` DMs."""
    exp = {"FEC": M - 1, "CDA": M * M - 1}[family.upper()]
    L = 1
    while L**exp < Q:
        L *= 2
    return L


# CSTSK(2,2,2,8), BPSK; entries as printed to four decimals
_CO_BPSK8 = [
    [[-0.2609 - 0.1663j, 0.4274 + 1.2471j], [-0.3356 - 0.1604j, 0.0127 + 0.1667j]],
    [[-0.8256 + 0.5391j, 0.1502 + 0.0534j], [-0.0718 - 0.4744j, 0.3378 - 0.8112j]],
    [[-0.4371 - 0.3679j, -0.5509 - 0.3024j], [-0.8711 + 0.1085j, -0.4850 - 0.5224j]],
    [[-0.1173 - 0.8969j, 0.1467 + 0.2945j], [-0.2049 + 0.4875j, 0.8546 + 0.2524j]],
    [[-0.0852 - 0.1935j, 0.6287 + 0.0950j], [0.9992 - 0.3717j, -0.5449 - 0.3428j]],
    [[-0.2352 + 1.0560j, -0.6267 - 0.1166j], [0.1142 + 0.4872j, -0.4154 + 0.0112j]],
    [[-0.1408 + 0.0534j, -0.4832 + 0.8613j], [0.6937 + 0.6212j, 0.1325 - 0.3425j]],
    [[-0.4118 + 0.0950j, 0.6746 - 0.0363j], [-0.5485 + 0.3372j, -0.9707 + 0.0908j]],
]


def co_fixture_bpsk8() -> DispersionMatrixSet:
    """The published capacity-optimised DMs for CSTSK(2,2,2,8) with BPSK."""
    return DispersionMatrixSet(
        np.array(_CO_BPSK8), "Fixture", {"source": "CO, CSTSK(2,2,2,8) BPSK"},
        power_tol=FIXTURE_POWER_TOL,
    )


def random_dm_set(Q: int, M: int, rng: np.random.Generator) -> DispersionMatrixSet:
    """Q i.i.d. complex Gaussian M x M matrices, each rescaled to power M."""
    G = (rng.standard_normal((Q, M, M)) + 1j * rng.standard_normal((Q, M, M))) / math.sqrt(2)
    G *= np.sqrt(M / np.sum(np.abs(G) ** 2, axis=(1, 2)))[:, None, None]
    return DispersionMatrixSet(G, "CO")


def co_dm_search(
    M: int,
    T: int,
    Q: int,
    S: Constellation,
    candidates: int = 1000,
    mi_samples: int = 10_000,
    rng_seed: int = 0,
    snr_db: float = 10.0,
    N: int = 2,
) -> DispersionMatrixSet:
    """Random search for the DM set with the largest DCMC mutual information.

    Every candidate is scored on the same channel/noise samples, so the
    ranking is not blurred by Monte-Carlo noise between candidates. Candidate
    ``i`` is drawn from its own stream derived from ``(rng_seed, i)``.
    """
    from .codebook import expand
    from .metrics import estimate_dcmc
    from .rng import CO_CANDIDATES, stream

    if candidates < 1:
        raise ValueError("need at least one candidate")
    if M != T:
        raise ValueError("only M = T is supported")
    best, best_mi = None, -np.inf
    for i in range(candidates):
        cand = random_dm_set(Q, M, stream(rng_seed, CO_CANDIDATES, i))
        if candidates == 1:
            best = cand
            break
        est = estimate_dcmc(expand(S, cand), snr_db, N, mi_samples, rng_seed=rng_seed)
        if est.value > best_mi:
            best, best_mi = cand, est.value
    params = dict(candidates=candidates, mi_samples=mi_samples, seed=rng_seed,
                  snr_db=snr_db, N=N, L=S.order, mi=best_mi)
    return DispersionMatrixSet(best.matrices, "CO", params)


# -- plain-text matrix files ------------------------------------------------

def _fmt_complex(z: complex) -> str:
    re, im = repr(float(z.real)), repr(float(z.imag))
    if not im.startswith("-"):
        im = "+" + im
    return f"{re}{im}j"


def format_dm_set(dms: DispersionMatrixSet) -> str:
    """Header ``"Q M T family"`` followed by Q blocks of M rows of T entries."""
    lines = [f"{dms.Q} {dms.M} {dms.T} {dms.family}"]
    for A in dms.matrices:
        for row in A:
            lines.append(" ".join(_fmt_complex(z) for z in row))
        lines.append("")
    return "\n".join(lines)


def parse_dm_set(text: str) -> DispersionMatrixSet:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 4:
        raise ValueError("missing 'Q M T family' header")
    Q, M, T = (int(x) for x in rows[0][:3])
    family = rows[0][3]
    body = rows[1:]
    if len(body) != Q * M or any(len(r) != T for r in body):
        raise ValueError(f"expected {Q * M} rows of {T} entries")
    A = np.array([[complex(tok) for tok in r] for r in body]).reshape(Q, M, T)
    tol = FIXTURE_POWER_TOL if family == "Fixture" else POWER_TOL
    return DispersionMatrixSet(A, family, {"source": "file"}, power_tol=tol)


def save_dm_set(dms: DispersionMatrixSet, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_dm_set(dms))


def load_dm_set(path) -> DispersionMatrixSet:
    with open(path) as fh:
        return parse_dm_set(fh.read())
