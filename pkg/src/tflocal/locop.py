"""Localization operators: construction, Weyl correspondence and spectra.

Three routes produce the same operator on a signal grid:

* ``localization_matrix``: ``V_gamma^*(a . V_psi f)`` pushed through every
  basis vector,
* ``weyl_symbol`` + ``weyl_kernel`` + ``kernel_matrix``: the Weyl operator
  with symbol ``a * W(gamma, psi)`` and kernel
  ``k(x, y) = (2 pi)^-1 int a^w((x+y)/2, eta) exp(i (y-x) eta) d eta``,
  acting as ``Lf(y) = int k(x, y) f(x) dx``.

Matrices act on sample values; because the L2 quadrature weight ``h^d`` is
the same at every node, their singular values approximate those of the
continuous operator on L2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import transforms as tr
from .norms import MixedNormParams, m01_values, modulation_norm, outer_mask
from .transforms import Grid, PhaseSpaceFunction, SampledSignal
from .weights import WeightSpec

SYMBOL_KINDS = ("constant", "gaussian", "indicator", "x_dependent_only", "user_sampled")


@dataclass(eq=False)
class SymbolSpec:
    kind: str
    samples: PhaseSpaceFunction
    params: dict = field(default_factory=dict)
    expect_2m2: bool | None = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in SYMBOL_KINDS:
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if not np.all(np.isfinite(self.samples.values)):
            raise ValueError("symbol samples must be finite")
        if not self.name:
            self.name = self.kind

    @property
    def grid(self) -> Grid:
        return self.samples.xgrid


def constant_symbol(grid: Grid, c: complex = 1.0) -> SymbolSpec:
    vals = np.full(grid.shape * 2, c, dtype=complex)
    return SymbolSpec("constant", PhaseSpaceFunction(grid, vals), {"c": c}, False, "constant")


def gaussian_symbol(grid: Grid, decay=math.pi) -> SymbolSpec:
    """``exp(-z^T D z)`` with ``D = decay`` (scalar or 2x2 matrix), d = 1."""
    D = np.asarray(decay, dtype=float) * (np.eye(2) if np.ndim(decay) == 0 else 1.0)
    X, XI = np.meshgrid(grid.nodes, grid.freqs, indexing="ij")
    q = D[0, 0] * X**2 + (D[0, 1] + D[1, 0]) * X * XI + D[1, 1] * XI**2
    return SymbolSpec("gaussian", PhaseSpaceFunction(grid, np.exp(-q)),
                      {"decay": D.tolist()}, True, "gaussian")


def indicator_symbol(grid: Grid, box=((-2.0, 2.0), (-2.0, 2.0))) -> SymbolSpec:
    (x0, x1), (k0, k1) = box
    X, XI = np.meshgrid(grid.nodes, grid.freqs, indexing="ij")
    vals = ((X >= x0) & (X <= x1) & (XI >= k0) & (XI <= k1)).astype(complex)
    return SymbolSpec("indicator", PhaseSpaceFunction(grid, vals),
                      {"box": [list(box[0]), list(box[1])]}, True, "box")


def x_only_symbol(grid: Grid, width: float = 1.0) -> SymbolSpec:
    """``exp(-pi x^2 / width^2)``, constant in frequency: violates (2M2)."""
    X = grid.nodes[:, None] + 0.0 * grid.freqs[None, :]
    vals = np.exp(-math.pi * X**2 / width**2)
    return SymbolSpec("x_dependent_only", PhaseSpaceFunction(grid, vals),
                      {"width": width}, False, "xonly")


def sampled_symbol(F: PhaseSpaceFunction, name="user") -> SymbolSpec:
    return SymbolSpec("user_sampled", F, {}, None, name)


BUILTIN_SYMBOLS = {
    "constant": constant_symbol,
    "gaussian": gaussian_symbol,
    "box": indicator_symbol,
    "xonly": x_only_symbol,
}


def make_symbol(name: str, grid: Grid) -> SymbolSpec:
    try:
        return BUILTIN_SYMBOLS[name](grid)
    except KeyError:
        raise ValueError(f"unknown symbol id {name!r}; expected one of {sorted(BUILTIN_SYMBOLS)}") from None


@dataclass(eq=False)
class LocOpMatrix:
    matrix: np.ndarray
    grid: Grid
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.matrix.shape != (self.grid.n, self.grid.n):
            raise tr.GridMismatchError("operator matrix does not fit the grid")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("operator matrix has non-finite entries")
        self._svals = None

    def kernel(self) -> np.ndarray:
        """``k[i, j] = k(x_i, y_j)`` recovered from the matrix."""
        return self.matrix.T / self.grid.h


def _check_windows(a: SymbolSpec, psi: SampledSignal, gamma: SampledSignal):
    if a.grid != psi.grid or a.grid != gamma.grid:
        raise tr.GridMismatchError("symbol and windows must share a grid")
    if a.grid.dim != 1:
        raise ValueError("operators are implemented for d = 1")
    if not (np.any(psi.values) and np.any(gamma.values)):
        raise ValueError("windows must be nonzero")


def localization_matrix(a: SymbolSpec, psi: SampledSignal, gamma: SampledSignal,
                        chunk: int = 32) -> LocOpMatrix:
    _check_windows(a, psi, gamma)
    g = a.grid
    n = g.n
    sym = a.samples.values
    M = np.empty((n, n), dtype=complex)
    for start in range(0, n, chunk):
        stop = min(n, start + chunk)
        E = np.zeros((stop - start, n), dtype=complex)
        E[np.arange(stop - start), np.arange(start, stop)] = 1.0
        V = tr.stft_batch(E, psi)
        M[:, start:stop] = tr.stft_adjoint_batch(sym[None] * V, gamma).T
    return LocOpMatrix(M, g, {"route": "localization", "symbol": a.name})


def weyl_symbol(a: SymbolSpec, psi: SampledSignal, gamma: SampledSignal,
                method: str = "fft") -> PhaseSpaceFunction:
    """``a^w = a * W(gamma, psi)`` as a circular phase-space convolution.

    ``method="direct"`` sums the convolution explicitly (row offsets times
    circulant products).  It is slower but keeps relative accuracy in the
    far tails, where the FFT route sits on an absolute rounding floor of
    about ``1e-16 * max|a^w|``.
    """
    _check_windows(a, psi, gamma)
    W = tr.cross_wigner(gamma, psi).values
    A = a.samples.values
    cell = a.samples.cell
    if method == "fft":
        return PhaseSpaceFunction(a.grid, tr.circular_convolve(A, W, cell))
    if method != "direct":
        raise ValueError(f"unknown convolution method {method!r}")
    real = not (np.any(A.imag) or np.any(W.imag))
    if real:
        A, W = A.real, W.real
    n = a.grid.n
    circ = tr._shift_index(n)  # circ[xi', xi] -> offset node of xi - xi'
    out = np.zeros(A.shape, dtype=A.dtype)
    for r in range(n):
        row = W[r]
        if not np.any(row):
            continue
        shifted = np.roll(A, r - n // 2, axis=0)  # A[x - offset_r, :]
        out += shifted @ row[circ]
    return PhaseSpaceFunction(a.grid, cell * out)


def _half_shift(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Trigonometric interpolation of a periodic array at ``x + h/2``."""
    n = values.shape[axis]
    k = np.fft.fftfreq(n) * n
    mult = np.exp(1j * math.pi * k / n)
    mult[n // 2] = mult[n // 2].real  # Nyquist bin
    shape = [1] * values.ndim
    shape[axis] = n
    return np.fft.ifft(np.fft.fft(values, axis=axis) * mult.reshape(shape), axis=axis)


def weyl_kernel(aw: PhaseSpaceFunction) -> np.ndarray:
    """Kernel ``k[i, j] = k(x_i, y_j)`` of the Weyl operator with symbol ``aw``."""
    g = aw.xgrid
    if g.dim != 1:
        raise ValueError("weyl_kernel is implemented for d = 1")
    n = g.n
    # (1/2pi) dxi sum_eta aw(x, eta) exp(i r h eta) = icdft(aw)[x, r + n/2] / h
    B = tr.icdft(aw.values, axes=(1,)) / g.h
    Bh = tr.icdft(_half_shift(aw.values, 0), axes=(1,)) / g.h
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    r = (j - i + n // 2) % n
    # midpoint along the short arc of the torus, consistent with the wrapped offset
    s = 2 * i + (r - n // 2)
    mid = (s // 2) % n
    return np.where(s % 2 == 0, B[mid, r], Bh[mid, r])


def kernel_matrix(k: np.ndarray, grid: Grid, provenance=None) -> LocOpMatrix:
    """Matrix ``M[j, i] = h k(x_i, x_j)`` of ``f -> int k(x, .) f(x) dx``."""
    return LocOpMatrix(grid.h * np.asarray(k).T, grid, provenance or {"route": "kernel"})


def weyl_route_matrix(a: SymbolSpec, psi, gamma) -> LocOpMatrix:
    k = weyl_kernel(weyl_symbol(a, psi, gamma))
    return kernel_matrix(k, a.grid, {"route": "weyl_kernel", "symbol": a.name})


def apply(op: LocOpMatrix, f: SampledSignal) -> SampledSignal:
    if f.grid != op.grid:
        raise tr.GridMismatchError("signal grid does not match operator grid")
    return SampledSignal(op.grid, op.matrix @ f.values)


def singular_values(op: LocOpMatrix) -> np.ndarray:
    if op._svals is None:
        try:
            op._svals = np.linalg.svd(op.matrix, compute_uv=False)
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(
                f"SVD failed (Frobenius norm {np.linalg.norm(op.matrix):.3e}): {exc}") from exc
    return op._svals


def spectral_cutoff(svals: np.ndarray, threshold: float = 1e-3) -> int:
    """Smallest ``K`` with ``sigma_k / sigma_1 < threshold`` for all ``k >= K`` (1-based)."""
    if svals[0] == 0:
        return 1
    rel = svals / svals[0]
    above = np.nonzero(rel >= threshold)[0]
    return int(above[-1] + 2) if above.size else 1


def trial_signal(grid: Grid, seed: int, index: int) -> SampledSignal:
    """Deterministic trial: a short sum of time-frequency shifted Gaussians."""
    g0 = tr.gaussian(grid)
    if index == 0:
        return g0
    rng = np.random.default_rng([seed, index])
    xmax = grid.T / 3.0
    # fixed unless the grid is very coarse, so n-ladders at fixed T see the same signals
    ximax = min(4.0, math.pi / (4 * grid.h))
    out = np.zeros(grid.shape, dtype=complex)
    for _ in range(int(rng.integers(1, 4))):
        c = rng.normal() + 1j * rng.normal()
        f = tr.tf_shift(g0, rng.uniform(-xmax, xmax), rng.uniform(-ximax, ximax))
        out += c * f.values
    return SampledSignal(grid, out)


def _is_hilbert(params: MixedNormParams) -> bool:
    w = params.weight
    return params.p == 2 and params.q == 2 and isinstance(w, WeightSpec) and w.exponent == 0


def operator_norm(op: LocOpMatrix, params: MixedNormParams, window: SampledSignal,
                  trial_count: int = 16, seed: int = 0) -> float:
    """Operator norm on ``M^{p,q}_{m_lam}``; exact on L2, a lower bound otherwise."""
    if trial_count < 1:
        raise ValueError("trial_count must be >= 1")
    if _is_hilbert(params):
        return float(singular_values(op)[0])
    best, seen = 0.0, 0
    for t in range(trial_count):
        f = trial_signal(op.grid, seed, t)
        nf = modulation_norm(f, window, params)
        if not nf > 0:
            continue
        seen += 1
        best = max(best, modulation_norm(apply(op, f), window, params) / nf)
    if seen == 0:
        raise ValueError("all trial signals were degenerate")
    return best


# -- symbols as signals on R^{2d}: slices of their 4d STFT ---------------------

def phase_window(grid: Grid) -> np.ndarray:
    """``exp(-pi (x^2 + xi^2))`` sampled on the phase grid."""
    X, XI = np.meshgrid(grid.nodes, grid.freqs, indexing="ij")
    return np.exp(-math.pi * (X**2 + XI**2)).astype(complex)


def position_subset(n: int, stride: int) -> np.ndarray:
    return np.unique(np.r_[np.arange(0, n, max(1, stride)), n // 2, n - 1])


@dataclass
class PhaseSTFTSlices:
    """|V_Phi F| at a sublattice of phase positions, over all dual frequencies."""

    grid: Grid
    pos_x: np.ndarray
    pos_xi: np.ndarray
    zeta1: np.ndarray
    zeta2: np.ndarray

    @property
    def z_coords(self):
        return np.meshgrid(self.grid.nodes[self.pos_x], self.grid.freqs[self.pos_xi], indexing="ij")

    @property
    def z_norm(self):
        X, XI = self.z_coords
        return np.hypot(X, XI)

    @property
    def zeta_norm(self):
        Z1, Z2 = np.meshgrid(self.zeta1, self.zeta2, indexing="ij")
        return np.hypot(Z1, Z2)

    @property
    def zeta_cell(self):
        return (self.zeta1[1] - self.zeta1[0]) * (self.zeta2[1] - self.zeta2[0])


def phase_stft_rows(F: PhaseSpaceFunction, window: np.ndarray | None = None, stride: int | None = None):
    """Yield ``(row, |V|)`` with ``|V|`` of shape ``(len(pos_xi), n, n)`` per x-position."""
    g = F.xgrid
    if g.dim != 1:
        raise ValueError("phase-space STFT slices are implemented for d = 1")
    if window is None:
        window = phase_window(g)
    if stride is None:
        stride = max(1, g.n // 32)
    px = position_subset(g.n, stride)
    pxi = position_subset(g.n, stride)
    meta = PhaseSTFTSlices(g, px, pxi, g.freqs, g.nodes)
    spacings = (g.h, g.dxi)

    def rows():
        for i, ix in enumerate(px):
            V = tr.stft_values(F.values, window, spacings, positions=([ix], pxi))
            yield i, np.abs(V[0])

    return meta, rows()


def phase_sup_norm(F: PhaseSpaceFunction, weight, window=None, stride=None) -> float:
    """``sup |V_Phi F(z, zeta)| w(|z|, |zeta|)`` over the sampled positions."""
    meta, rows = phase_stft_rows(F, window, stride)
    zn = meta.z_norm
    zetan = meta.zeta_norm
    best = 0.0
    for i, A in rows:
        wts = weight.on_norms(zn[i][:, None, None], zetan[None])
        best = max(best, float(np.max(A * wts)))
    return best


@dataclass
class DecayReport:
    radii: list
    edge: list
    peak: list
    profiles: list
    threshold: float

    @property
    def ratios(self):
        return [e / p if p > 0 else 0.0 for e, p in zip(self.edge, self.peak)]

    @property
    def holds(self) -> bool:
        return all(r < self.threshold for r in self.ratios)


def check_2m2(a: SymbolSpec, weight: WeightSpec, radii, g0: np.ndarray | None = None,
              stride: int | None = None, threshold: float = 1e-4) -> DecayReport:
    """Profiles ``z -> sup_{|zeta|<=R} |V_g0 a(z, zeta)| exp(lam w(|(z, zeta)|))``."""
    if weight.lam < 0:
        raise ValueError("hypothesis check needs lambda >= 0")
    g = a.grid
    rmax = min(g.T, math.pi / g.h)
    radii = [float(R) for R in radii]
    if any(R <= 0 or R > rmax for R in radii):
        raise ValueError(f"radii must lie in (0, {rmax:.4g}]")
    meta, rows = phase_stft_rows(a.samples, g0, stride)
    zn = meta.z_norm
    zetan = meta.zeta_norm
    prof = np.zeros((len(radii),) + zn.shape)
    for i, A in rows:
        full = np.hypot(zn[i][:, None, None], zetan[None])
        wA = A * np.exp(weight.exponent * weight.omega(full))
        for r, R in enumerate(radii):
            mask = zetan <= R
            prof[r, i] = np.max(wA[:, mask], axis=1)
    edge_mask = outer_mask(meta.z_coords, [g.T, math.pi / g.h])
    return DecayReport(radii, [float(p[edge_mask].max()) for p in prof],
                       [float(p.max()) for p in prof], list(prof), threshold)


@dataclass
class PhaseM01Profile:
    """Profile over phase positions ``z = (x, xi)``.

    ``edge_statistic`` takes the outer band of both axes; ``edge_statistic_x``
    only the outer band in ``x``, the direction a T-ladder at fixed ``h``
    extends.
    """

    values: np.ndarray
    edge_statistic: float
    edge_statistic_x: float
    peak: float
    z_coords: tuple

    @property
    def edge_ratio(self) -> float:
        return self.edge_statistic / self.peak if self.peak > 0 else 0.0


def symbol_m01_profile(F: PhaseSpaceFunction, weight: WeightSpec, window=None,
                       stride=None) -> PhaseM01Profile:
    """M^{0,1} profile of a function on R^{2d} (e.g. a Weyl symbol ``a * H``)."""
    meta, rows = phase_stft_rows(F, window, stride)
    zn = meta.z_norm
    vals = np.zeros(zn.shape)
    for i, A in rows:
        vals[i] = m01_values(A, zn[i], meta.zeta_norm, weight, meta.zeta_cell, 1)
    g = F.xgrid
    edge_mask = outer_mask(meta.z_coords, [g.T, math.pi / g.h])
    xedge = outer_mask(meta.z_coords[:1], [g.T])
    return PhaseM01Profile(vals, float(vals[edge_mask].max()), float(vals[xedge].max()),
                           float(vals.max()), meta.z_coords)


def symbol_sup_norm(a: SymbolSpec, omega, lam: float, stride=None) -> float:
    """``||a||_{M^inf_{m_{-lam,2}}}``, the weight acting on the dual variable only."""
    return phase_sup_norm(a.samples, WeightSpec(omega, -lam, "second"), stride=stride)


def boundedness_rhs(a: SymbolSpec, psi: SampledSignal, gamma: SampledSignal, omega, lam: float,
                    p: float, stride=None, symbol_norm: float | None = None) -> dict:
    """Factors of ``||a||_{M^inf_{m_{-lam,2}}} ||psi||_{M^1_{v_lam}} ||gamma||_{M^p_{m_lam}}``."""
    a_norm = symbol_sup_norm(a, omega, lam, stride) if symbol_norm is None else symbol_norm
    g0 = tr.gaussian(a.grid)
    psi_norm = modulation_norm(psi, g0, MixedNormParams(1, 1, WeightSpec(omega, lam, "absolute")))
    gamma_norm = modulation_norm(gamma, g0, MixedNormParams(p, p, WeightSpec(omega, lam, "full")))
    return {"symbol": a_norm, "psi": psi_norm, "gamma": gamma_norm,
            "rhs": a_norm * psi_norm * gamma_norm}
