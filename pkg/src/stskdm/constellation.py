"""PSK, square-QAM and star-QAM signal sets.

Besides the points themselves each constellation carries the data needed to
split it multiplicatively into a rotation subgroup and a set of coset
representatives (``s_sym`` and ``s_prime``), which is what the decomposition
checks in :mod:`stskdm.codebook` work with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Constellation",
    "SymmetryDecomposition",
    "make_psk",
    "make_square_qam",
    "make_star_qam",
    "symmetry_decompose",
    "parse_constellation",
]

PSK = "PSK"
SQUARE_QAM = "SquareQAM"
STAR_QAM = "StarQAM"


def _is_power_of(n: int, base: int) -> bool:
    if n < 1:
        return False
    while n % base == 0:
        n //= base
    return n == 1


@dataclass(frozen=True, eq=False)
class Constellation:
    """An ordered, immutable set of complex signal points.

    Attributes
    ----------
    kind : str
        One of ``"PSK"``, ``"SquareQAM"`` or ``"StarQAM"``.
    points : np.ndarray
        Complex points, shape ``(L,)``. The array is read-only.
    generator : complex
        Unit-modulus rotation generating the symmetry subgroup.
    ring_ratio : float or None
        Geometric ring spacing, star-QAM only.
    """

    kind: str
    points: np.ndarray
    generator: complex
    ring_ratio: float | None = None
    _sym: "SymmetryDecomposition | None" = field(default=None, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def order(self) -> int:
        return len(self.points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __repr__(self):
        return f"Constellation({self.kind}, L={self.order})"

    def index_of(self, s: complex, tol: float = 1e-9) -> int:
        """Index of the point closest to `s`; raises if none within `tol`."""
        d = np.abs(self.points - s)
        k = int(np.argmin(d))
        if d[k] > tol:
            raise ValueError(f"{s!r} is not a point of {self!r}")
        return k

    @property
    def spec(self) -> str:
        if self.kind == PSK:
            return f"psk:{self.order}"
        if self.kind == SQUARE_QAM:
            return f"sqam:{self.order}"
        return f"star:{self.order}:{self.ring_ratio:g}"


@dataclass(frozen=True, eq=False)
class SymmetryDecomposition:
    """Factorisation ``S = {a * b : a in s_sym, b in s_prime}``.

    ``quadrant_set`` is the first-quadrant subset for square QAM, the ring
    radii for star QAM and ``[1]`` for PSK.
    """

    s_sym: np.ndarray
    s_prime: np.ndarray
    quadrant_set: np.ndarray

    def factor(self, s: complex, tol: float = 1e-9) -> tuple[int, int]:
        """Return ``(k, i)`` with ``s == s_sym[k] * s_prime[i]``."""
        prods = self.s_sym[:, None] * self.s_prime[None, :]
        hits = np.argwhere(np.abs(prods - s) <= tol)
        if len(hits) != 1:
            raise ValueError(f"{s!r} factors {len(hits)} ways, expected 1")
        return int(hits[0, 0]), int(hits[0, 1])


def make_psk(L: int) -> Constellation:
    """Unrotated L-PSK, ``exp(2j*pi*k/L)`` for ``k = 0..L-1``.

    ``L = 1`` gives the single point ``{1}``.
    """
    L = int(L)
    if not _is_power_of(L, 2):
        raise ValueError(f"PSK order must be a power of two, got {L}")
    pts = np.exp(2j * np.pi * np.arange(L) / L)
    # points on the axes are stored exactly
    re = np.where(np.abs(pts.real) < 1e-12, 0.0, pts.real)
    im = np.where(np.abs(pts.imag) < 1e-12, 0.0, pts.imag)
    pts = re + 1j * im
    g = pts[1] if L > 1 else 1.0 + 0j
    return Constellation(PSK, pts, complex(g))


def make_square_qam(L: int) -> Constellation:
    """Square L-QAM with unit average energy, ``L = 4**a``.

    Points are stored row by row, top row first, left to right.
    """
    L = int(L)
    if L < 4 or not _is_power_of(L, 4):
        raise ValueError(f"square QAM order must be 4**a with a >= 1, got {L}")
    side = math.isqrt(L)
    levels = np.arange(-(side - 1), side, 2, dtype=float)
    re, im = np.meshgrid(levels, levels[::-1])
    pts = (re + 1j * im).ravel()
    pts = pts / math.sqrt(2.0 * (L - 1) / 3.0)
    return Constellation(SQUARE_QAM, pts, 1j)


def make_star_qam(L: int, ring_ratio: float = 2.0) -> Constellation:
    """Star L-QAM: ``2**(a-1)`` rings of ``2**(a+1)`` equally spaced phases.

    Ring radii grow geometrically by `ring_ratio` and are scaled for unit
    average energy. The first point of every ring lies on the positive real
    axis. Points are ordered ring by ring, inner ring first.
    """
    L = int(L)
    if L < 4 or not _is_power_of(L, 4):
        raise ValueError(f"star QAM order must be 4**a with a >= 1, got {L}")
    if not ring_ratio > 0 or not math.isfinite(ring_ratio):
        raise ValueError(f"ring_ratio must be a positive real, got {ring_ratio}")
    a = int(round(math.log(L, 4)))
    n_rings, n_phases = 2 ** (a - 1), 2 ** (a + 1)
    if n_rings > 1 and ring_ratio == 1:
        raise ValueError("ring_ratio = 1 collapses the rings")
    radii = ring_ratio ** np.arange(n_rings, dtype=float)
    radii = radii / math.sqrt(np.mean(radii**2))
    phases = np.exp(2j * np.pi * np.arange(n_phases) / n_phases)
    pts = (radii[:, None] * phases[None, :]).ravel()
    return Constellation(STAR_QAM, pts, complex(phases[1]), float(ring_ratio))


def symmetry_decompose(c: Constellation) -> SymmetryDecomposition:
    """Split `c` into its rotation subgroup and coset representatives.

    For PSK the whole set is the subgroup. For square QAM the subgroup is
    ``{1, j, -1, -j}`` and the representatives are the first-quadrant points.
    For star QAM the subgroup is the ``2**(a+1)`` ring phases and the
    representatives are the ring radii on the positive real axis.
    """
    if c._sym is not None:
        return c._sym
    pts = c.points
    if c.kind == PSK:
        dec = SymmetryDecomposition(pts.copy(), np.ones(1, complex), np.ones(1, complex))
    elif c.kind == SQUARE_QAM:
        sym = np.array([1, 1j, -1, -1j], dtype=complex)
        quad = pts[(pts.real > 0) & (pts.imag > 0)]
        dec = SymmetryDecomposition(sym, quad.copy(), quad.copy())
    elif c.kind == STAR_QAM:
        n_phases = 2 * int(round(math.sqrt(c.order)))
        sym = pts[:n_phases] / abs(pts[0])
        amp = np.abs(pts[::n_phases]).astype(complex)
        dec = SymmetryDecomposition(sym, amp, amp.copy())
    else:
        raise ValueError(f"unknown constellation kind {c.kind!r}")
    for arr in (dec.s_sym, dec.s_prime, dec.quadrant_set):
        arr.setflags(write=False)
    object.__setattr__(c, "_sym", dec)
    return dec


def parse_constellation(spec: str) -> Constellation:
    """Build a constellation from ``"psk:L"``, ``"sqam:L"`` or ``"star:L:ratio"``."""
    parts = [p.strip() for p in spec.strip().lower().split(":")]
    try:
        if parts[0] == "psk" and len(parts) == 2:
            return make_psk(int(parts[1]))
        if parts[0] == "sqam" and len(parts) == 2:
            return make_square_qam(int(parts[1]))
        if parts[0] == "star" and len(parts) in (2, 3):
            ratio = float(parts[2]) if len(parts) == 3 else 2.0
            return make_star_qam(int(parts[1]), ratio)
    except ValueError as exc:
        raise ValueError(f"bad constellation spec {spec!r}: {exc}") from None
    raise ValueError(f"bad constellation spec {spec!r}")
