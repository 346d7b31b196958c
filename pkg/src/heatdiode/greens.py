"""Frequency-domain Green's function of a damped harmonic chain.

The inverse Green's matrix is the complex-symmetric tridiagonal matrix

    G^{-1}(w) = K - w^2 diag(m) + i w diag(gamma)

with K the stiffness matrix (walls and pinning on the diagonal). Production
code only ever needs a few columns of G, obtained with a vectorized Thomas
sweep over a whole frequency grid. Dense determinants are kept for oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BathSpec, ChainSpec


class SingularMatrixError(ArithmeticError):
    pass


@dataclass(frozen=True)
class InverseGreenMatrix:
    omega: float
    entries: np.ndarray

    def is_complex_symmetric(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.T))


@dataclass(frozen=True)
class GreenElements:
    omega: float
    values: dict[tuple[int, int], complex]

    def __getitem__(self, pair: tuple[int, int]) -> complex:
        return self.values[pair]


def bands(chain: ChainSpec, frictions, omega):
    """Diagonal (shape ``(n,) + omega.shape``) and off-diagonal (shape ``(n-1,)``)."""
    omega = np.asarray(omega, dtype=float)
    k = np.asarray(chain.springs)
    static = k[:-1] + k[1:] + np.asarray(chain.pinning)
    m = np.asarray(chain.masses)
    g = np.asarray(frictions, dtype=float)
    w = omega[None, ...]
    shape = (-1,) + (1,) * omega.ndim
    diag = static.reshape(shape) - m.reshape(shape) * w**2 + 1j * g.reshape(shape) * w
    return diag, -k[1:-1]


def build_inverse_green(chain: ChainSpec, baths: BathSpec, omega: float) -> InverseGreenMatrix:
    diag, off = bands(chain, baths.frictions, float(omega))
    mat = np.diag(diag.astype(complex))
    mat += np.diag(off.astype(complex), 1) + np.diag(off.astype(complex), -1)
    return InverseGreenMatrix(float(omega), mat)


#: pivots smaller than this (relative to the largest diagonal entry) go to the dense fallback
PIVOT_FLOOR = 1e-10


def _sweep(diag: np.ndarray, off: np.ndarray, cols):
    """Thomas elimination; returns the columns and a mask of frequencies with tiny pivots."""
    n, nw = diag.shape
    piv = np.empty_like(diag)
    cp = np.empty((max(n - 1, 0), nw), dtype=diag.dtype)
    piv[0] = diag[0]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for i in range(n - 1):
            cp[i] = off[i] / piv[i]
            piv[i + 1] = diag[i + 1] - off[i] * cp[i]
        scale = np.max(np.abs(diag), axis=0)
        bad = ~np.all(np.isfinite(piv) & (np.abs(piv) > PIVOT_FLOOR * scale), axis=0)

        out = np.zeros((len(cols), n, nw), dtype=diag.dtype)
        for c, m in enumerate(cols):
            y = out[c]
            y[m] = 1.0 / piv[m]
            for i in range(m + 1, n):
                y[i] = -off[i - 1] * y[i - 1] / piv[i]
            for i in range(n - 2, -1, -1):
                y[i] -= cp[i] * y[i + 1]
    return out, bad


def solve_columns(diag: np.ndarray, off: np.ndarray, cols) -> np.ndarray:
    """Columns ``cols`` of the inverse of a symmetric tridiagonal matrix.

    ``diag`` has shape ``(n, nw)`` (one system per frequency); the result has
    shape ``(len(cols), n, nw)``. Frequencies where elimination without
    pivoting meets a tiny pivot are redone with a dense LU solve.
    """
    out, bad = _sweep(diag, off, cols)
    if np.any(bad):
        n = diag.shape[0]
        idx = np.flatnonzero(bad)
        mats = np.zeros((idx.size, n, n), dtype=diag.dtype)
        mats[:, np.arange(n), np.arange(n)] = diag[:, idx].T
        mats[:, np.arange(n - 1), np.arange(1, n)] = off
        mats[:, np.arange(1, n), np.arange(n - 1)] = off
        rhs = np.zeros((idx.size, n, len(cols)), dtype=diag.dtype)
        rhs[:, list(cols), np.arange(len(cols))] = 1.0
        try:
            sol = np.linalg.solve(mats, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrixError("inverse Green's matrix is singular at a sampled frequency") from exc
        if not np.all(np.isfinite(sol)):
            raise SingularMatrixError("inverse Green's matrix is singular at a sampled frequency")
        out[:, :, idx] = np.transpose(sol, (2, 1, 0))
    return out


def green_columns(chain: ChainSpec, frictions, omega, cols) -> np.ndarray:
    """Columns of G(omega) for a grid of frequencies, shape ``(len(cols), n, nw)``."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    diag, off = bands(chain, frictions, omega)
    n = chain.n
    # start the sweep at a damped end so every pivot keeps a positive imaginary part
    flip = frictions[0] == 0 and frictions[-1] > 0
    if flip:
        g = solve_columns(diag[::-1], off[::-1], [n - 1 - c for c in cols])
        return g[:, ::-1, :]
    return solve_columns(diag, off, list(cols))


def green_elements(chain: ChainSpec, baths: BathSpec, omega: float, pairs=None) -> GreenElements:
    """G_lm at one frequency for hot x cold pairs (both orders) unless ``pairs`` given."""
    if pairs is None:
        pairs = [(l, m) for l in baths.hot_set for m in baths.cold_set]
        pairs += [(m, l) for l, m in pairs]
    cols = sorted({m for _, m in pairs})
    g = green_columns(chain, baths.frictions, [omega], cols)
    index = {m: c for c, m in enumerate(cols)}
    values = {(l, m): complex(g[index[m], l, 0]) for l, m in pairs}
    return GreenElements(float(omega), values)


def dense_minor(matrix: np.ndarray, row: int, col: int) -> complex:
    """Determinant of ``matrix`` with ``row`` and ``col`` removed (LU with partial pivoting)."""
    sub = np.delete(np.delete(matrix, row, axis=0), col, axis=1)
    return complex(np.linalg.det(sub))


def dense_green(matrix: np.ndarray, row: int, col: int) -> complex:
    """Cofactor expansion of one element of the inverse; test oracle only."""
    sign = (-1) ** (row + col)
    return sign * dense_minor(matrix, row, col) / complex(np.linalg.det(matrix))


def _edge_pairs(n: int) -> dict[tuple[int, int], str]:
    return {(0, n - 1): "1N", (0, n - 2): "1N-1", (1, n - 1): "2N", (1, n - 2): "2N-1"}


def analytic_minor(chain: ChainSpec, baths: BathSpec, omega: float, row: int, col: int) -> complex:
    """Closed-form minor det(C_row,col) for a chain with two baths at each end.

    Supported pairs (0-based) are (0, n-1), (0, n-2), (1, n-1), (1, n-2) and
    their transposes. Only the two end diagonal entries and the spring
    constants enter, so the forms hold for asymmetric springs as well as for
    pinned uniform chains. Signs are those of the true minors.
    """
    n = chain.n
    if n < 4:
        raise ValueError(f"closed forms need at least 4 beads, got {n}")
    key = (min(row, col), max(row, col))
    kind = _edge_pairs(n).get(key)
    if kind is None:
        raise ValueError(f"no closed form for pair ({row}, {col}) on {n} beads")

    k = chain.springs
    diag, _ = bands(chain, baths.frictions, float(omega))
    d_first, d_last = complex(diag[0]), complex(diag[n - 1])
    inner = 1.0
    for i in range(2, n - 1):
        inner *= -k[i]
    if kind == "1N":
        return k[1] * k[n - 1] * inner
    if kind == "1N-1":
        return -k[1] * inner * d_last
    if kind == "2N":
        return -k[n - 1] * inner * d_first
    return inner * d_first * d_last


@dataclass(frozen=True)
class MinorCheck:
    pair: tuple[int, int]
    analytic: complex
    numeric: complex

    @property
    def rel_error(self) -> float:
        return abs(self.analytic - self.numeric) / abs(self.numeric)


def general_minor_check(chain: ChainSpec, omega: float, gamma: float = 1.0) -> list[MinorCheck]:
    """Compare the closed-form edge minors with dense determinants."""
    n = chain.n
    if n < 5:
        raise ValueError(f"general minor check needs n >= 5, got {n}")
    baths = BathSpec.edges(n, [0.0, 0.0], [0.0, 0.0], gamma=gamma)
    matrix = build_inverse_green(chain, baths, omega).entries
    return [
        MinorCheck(pair, analytic_minor(chain, baths, omega, *pair), dense_minor(matrix, *pair))
        for pair in _edge_pairs(n)
    ]
