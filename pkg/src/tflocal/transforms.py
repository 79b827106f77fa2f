"""Discrete STFT, its adjoint, inversion, Fourier and cross-Wigner transforms.

Conventions (all sums are Riemann sums on a centered grid):

* ``V_psi f(x, xi) = h^d sum_y f(y) conj(psi(y - x)) exp(-i y.xi)``
* ``fhat(xi) = h^d sum_x f(x) exp(-i x.xi)``
* ``W(f, g)(x, xi) = int f(x + t/2) conj(g(x - t/2)) exp(-i xi.t) dt``

Signals live on the discrete torus of ``n`` nodes per axis: window
translations wrap around.  Because ``exp(-i y.xi)`` is ``n``-periodic in both
indices this makes the STFT an exact finite Heisenberg representation, so
``V_gamma^* V_psi = (2 pi)^d <gamma, psi> I`` holds to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class GridMismatchError(ValueError):
    """Operands live on different grids."""


class SingularWindowError(ValueError):
    """Window pair with vanishing inner product."""


@dataclass(frozen=True)
class Grid:
    """Centered uniform grid ``x_j = (j - n/2) h`` in each of ``dim`` axes."""

    dim: int
    n: int
    h: float

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("only d = 1 or d = 2 is supported")
        if self.n < 4 or self.n % 2:
            raise ValueError("n must be an even integer >= 4")
        if not self.h > 0:
            raise ValueError("spacing must be positive")

    @classmethod
    def from_extent(cls, T: float, n: int, dim: int = 1) -> "Grid":
        return cls(dim, n, 2.0 * T / n)

    @property
    def T(self) -> float:
        return self.n * self.h / 2.0

    @property
    def dxi(self) -> float:
        return 2.0 * math.pi / (self.n * self.h)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def nodes(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.h

    @property
    def freqs(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dxi

    def dual(self) -> "Grid":
        return Grid(self.dim, self.n, self.dxi)

    def mesh(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*([self.nodes] * self.dim), indexing="ij")

    def norms(self) -> np.ndarray:
        """|x| at every node."""
        return np.sqrt(sum(c**2 for c in self.mesh()))

    def freq_norms(self) -> np.ndarray:
        return self.dual().norms()

    @property
    def cell(self) -> float:
        return self.h**self.dim

    @property
    def phase_cell(self) -> float:
        return (2.0 * math.pi / self.n) ** self.dim


@dataclass(frozen=True, eq=False)
class SampledSignal:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise GridMismatchError(f"values of shape {v.shape} do not fit grid {self.grid.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: Grid, func) -> "SampledSignal":
        return cls(grid, func(*grid.mesh()))

    def norm(self) -> float:
        return math.sqrt(self.grid.cell * float(np.sum(np.abs(self.values) ** 2)))

    def inner(self, other: "SampledSignal") -> complex:
        """``<self, other>``, linear in the first slot."""
        _check_same(self.grid, other.grid)
        return complex(self.grid.cell * np.vdot(other.values, self.values))

    def __add__(self, other):
        _check_same(self.grid, other.grid)
        return SampledSignal(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same(self.grid, other.grid)
        return SampledSignal(self.grid, self.values - other.values)

    def __rmul__(self, scalar):
        return SampledSignal(self.grid, scalar * self.values)

    def __mul__(self, scalar):
        return SampledSignal(self.grid, self.values * scalar)


@dataclass(frozen=True, eq=False)
class PhaseSpaceFunction:
    """Values on the x-grid times the induced frequency grid."""

    xgrid: Grid
    values: np.ndarray
    xigrid: Grid = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.xgrid.shape * 2:
            raise GridMismatchError(f"values of shape {v.shape} do not fit phase grid {self.xgrid.shape * 2}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "xigrid", self.xgrid.dual())

    @classmethod
    def from_function(cls, grid: Grid, func) -> "PhaseSpaceFunction":
        axes = [grid.nodes] * grid.dim + [grid.freqs] * grid.dim
        return cls(grid, func(*np.meshgrid(*axes, indexing="ij")))

    @property
    def cell(self) -> float:
        return self.xgrid.phase_cell

    def inner(self, other: "PhaseSpaceFunction") -> complex:
        _check_same(self.xgrid, other.xgrid)
        return complex(self.cell * np.vdot(other.values, self.values))

    def norm(self) -> float:
        return math.sqrt(self.cell * float(np.sum(np.abs(self.values) ** 2)))

    def spacings(self) -> tuple[float, ...]:
        return (self.xgrid.h,) * self.xgrid.dim + (self.xgrid.dxi,) * self.xgrid.dim


def _check_same(a: Grid, b: Grid):
    if a != b:
        raise GridMismatchError(f"grid mismatch: {a} vs {b}")


# -- centered DFT -------------------------------------------------------------

def cdft(a, axes):
    """``sum_k a_k exp(-2 pi i (k - n/2)(m - n/2)/n)`` along ``axes``."""
    return np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(a, axes=axes), axes=axes), axes=axes)


def icdft(a, axes):
    """Inverse of :func:`cdft` (includes ``1/n`` per axis)."""
    return np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(a, axes=axes), axes=axes), axes=axes)


def circular_convolve(a, b, cell: float, axes=None):
    """``c_k = cell * sum_j a_j b_{k - j}`` with node offsets measured from the center."""
    if axes is None:
        axes = tuple(range(np.ndim(a)))
    return cell * icdft(cdft(a, axes) * cdft(b, axes), axes)


def fourier(f: SampledSignal) -> SampledSignal:
    """Fourier transform sampled on the dual grid; the result carries ``grid.dual()``."""
    axes = tuple(range(f.grid.dim))
    return SampledSignal(f.grid.dual(), f.grid.cell * cdft(f.values, axes))


def inverse_fourier(F: SampledSignal) -> SampledSignal:
    """Inverse of :func:`fourier`: ``(2 pi)^-d dxi^d sum F exp(+i x.xi)``."""
    g = F.grid.dual()  # dual of the dual grid is the original grid
    axes = tuple(range(g.dim))
    return SampledSignal(g, icdft(F.values, axes) / g.cell)


def convolve(f: SampledSignal, g: SampledSignal) -> SampledSignal:
    """Riemann-sum convolution ``(f*g)(x) = h^d sum_y f(y) g(x - y)``."""
    _check_same(f.grid, g.grid)
    axes = tuple(range(f.grid.dim))
    return SampledSignal(f.grid, circular_convolve(f.values, g.values, f.grid.cell, axes))


# -- STFT ---------------------------------------------------------------------

def _shift_index(n: int) -> np.ndarray:
    """``idx[j, k] = (k - j + n/2) mod n``: node of ``y_k - x_j`` on the torus."""
    j = np.arange(n)
    return (j[None, :] - j[:, None] + n // 2) % n


def translation_table(window: np.ndarray, positions=None) -> np.ndarray:
    """``P[pos..., k...] = window(y_k - x_pos)`` on the torus.

    ``positions`` optionally restricts the translation nodes per axis (a
    sequence of index arrays), producing an output of shape
    ``(len(pos_0), ..., n_0, ...)``.
    """
    window = np.asarray(window)
    nd = window.ndim
    idx = []
    for ax, n in enumerate(window.shape):
        table = _shift_index(n)
        if positions is not None:
            table = table[np.asarray(positions[ax])]
        idx.append(table)
    # broadcast per-axis tables into a full index grid
    full = []
    for ax in range(nd):
        t = idx[ax]
        shape = [1] * (2 * nd)
        shape[ax] = t.shape[0]
        shape[nd + ax] = t.shape[1]
        full.append(t.reshape(shape))
    return window[tuple(full)]


def stft_values(values, window, spacings, positions=None):
    """Array-level STFT with per-axis spacings.

    Output axes: translation nodes (all, or ``positions``) then frequency nodes.
    """
    values = np.asarray(values, dtype=complex)
    nd = values.ndim
    cell = float(np.prod(spacings))
    P = translation_table(np.conj(np.asarray(window, dtype=complex)), positions)
    axes = tuple(range(nd, 2 * nd))
    return cell * cdft(values[(None,) * nd] * P, axes)


def stft(f: SampledSignal, psi: SampledSignal) -> PhaseSpaceFunction:
    _check_same(f.grid, psi.grid)
    if not np.any(psi.values):
        raise ValueError("window must not vanish identically")
    g = f.grid
    return PhaseSpaceFunction(g, stft_values(f.values, psi.values, (g.h,) * g.dim))


def stft_batch(F: np.ndarray, psi: SampledSignal) -> np.ndarray:
    """STFT of a stack of signals ``F[b, ...]`` (1-d grids), shape ``(b, n, n)``."""
    g = psi.grid
    if g.dim != 1:
        raise ValueError("batched STFT is implemented for d = 1")
    P = np.conj(translation_table(psi.values))  # (n_x, n_y)
    return g.h * cdft(F[:, None, :] * P[None], axes=(2,))


def stft_adjoint_batch(Fs: np.ndarray, gamma: SampledSignal) -> np.ndarray:
    g = gamma.grid
    P = translation_table(gamma.values)
    B = icdft(Fs, axes=(2,))
    # hdxi * n * sum_j P[j,k] B[j,k] = 2 pi sum_j ...
    return 2.0 * math.pi * np.einsum("jk,bjk->bk", P, B)


def stft_adjoint(F: PhaseSpaceFunction, gamma: SampledSignal) -> SampledSignal:
    """Exact adjoint: ``(hdxi)^d sum_{x,xi} F(x,xi) exp(i y.xi) gamma(y - x)``."""
    _check_same(F.xgrid, gamma.grid)
    g = gamma.grid
    d = g.dim
    P = translation_table(gamma.values)
    axes = tuple(range(d, 2 * d))
    B = icdft(F.values, axes) * g.n**d  # sum over xi of F exp(+i y xi)
    out = g.phase_cell * np.sum(P * B, axis=tuple(range(d)))
    return SampledSignal(g, out)


def invert(f: SampledSignal, psi: SampledSignal, gamma: SampledSignal,
           min_overlap: float = 1e-12) -> SampledSignal:
    """Reconstruct ``f`` from ``V_psi f`` by synthesis with ``gamma``."""
    ip = gamma.inner(psi)
    if abs(ip) <= min_overlap:
        raise SingularWindowError(f"|<gamma, psi>| = {abs(ip):.3e} is below {min_overlap:g}")
    d = f.grid.dim
    rec = stft_adjoint(stft(f, psi), gamma)
    return SampledSignal(f.grid, rec.values / ((2.0 * math.pi) ** d * ip))


# -- Wigner -------------------------------------------------------------------

def wigner_band(grid: Grid) -> np.ndarray:
    """Mask of frequency nodes with ``|xi_k| < pi/(2h)`` in every axis."""
    m = np.arange(grid.n) - grid.n // 2
    inside = (m >= -grid.n // 4) & (m < grid.n // 4)
    out = inside
    for _ in range(grid.dim - 1):
        out = np.logical_and.outer(out, inside)
    return out


def cross_wigner(f: SampledSignal, g: SampledSignal) -> PhaseSpaceFunction:
    """Cross-Wigner transform ``W(f, g)`` on the standard phase grid (d = 1).

    With ``t = 2 m h`` the half shifts land on grid nodes and
    ``W(x_j, xi) = 2h sum_m f(x_j + mh) conj(g(x_j - mh)) exp(-2i xi m h)``,
    signals zero-extended off the grid.  The sum is ``pi/h``-periodic in
    ``xi``, so it is evaluated on the central half band ``|xi| < pi/(2h)``
    and set to zero outside, where it would only repeat aliases.
    """
    _check_same(f.grid, g.grid)
    grid = f.grid
    if grid.dim != 1:
        raise ValueError("cross_wigner is implemented for d = 1")
    n = grid.n
    half = n // 2
    m = np.arange(-(n - 1), n)
    j = np.arange(n)
    ip = j[:, None] + m[None, :]
    im = j[:, None] - m[None, :]
    fv = np.where((ip >= 0) & (ip < n), f.values[np.clip(ip, 0, n - 1)], 0.0)
    gv = np.where((im >= 0) & (im < n), g.values[np.clip(im, 0, n - 1)], 0.0)
    c = fv * np.conj(gv)
    # fold m modulo n/2, then evaluate sum_r C_r exp(-2 pi i p' r/(n/2))
    folded = np.zeros((n, half), dtype=complex)
    np.add.at(folded, (slice(None), m % half), c)
    spec = np.fft.fft(folded, axis=1)  # index p' mod n/2
    p = np.arange(n) - half
    W = 2.0 * grid.h * spec[:, p % half]
    W[:, ~wigner_band(grid)] = 0.0
    return PhaseSpaceFunction(grid, W)


def wigner(f: SampledSignal) -> PhaseSpaceFunction:
    return cross_wigner(f, f)


# -- standard signals ---------------------------------------------------------

def gaussian(grid: Grid, scale: float = 1.0) -> SampledSignal:
    """``exp(-pi |x|^2 / scale^2)``; ``scale = 1`` gives ``g0``."""
    return SampledSignal(grid, np.exp(-math.pi * grid.norms() ** 2 / scale**2))


def hermite1(grid: Grid) -> SampledSignal:
    """``x exp(-pi x^2)`` normalised in L2 (first axis for d = 2)."""
    x = grid.mesh()[0]
    s = SampledSignal(grid, x * np.exp(-math.pi * grid.norms() ** 2))
    return SampledSignal(grid, s.values / s.norm())


def tf_shift(f: SampledSignal, x0, xi0) -> SampledSignal:
    """``M_xi0 T_x0 f`` with ``x0`` rounded to the nearest node (torus shift)."""
    grid = f.grid
    x0 = np.broadcast_to(np.asarray(x0, float), (grid.dim,))
    xi0 = np.broadcast_to(np.asarray(xi0, float), (grid.dim,))
    shifts = tuple(int(round(s / grid.h)) for s in x0)
    v = np.roll(f.values, shifts, axis=tuple(range(grid.dim)))
    phase = sum(c * w for c, w in zip(grid.mesh(), xi0))
    return SampledSignal(grid, v * np.exp(1j * phase))
