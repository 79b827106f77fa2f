"""Gabor systems on the signal torus, frame-operator tightness and kernel expansions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .locop import LocOpMatrix, singular_values
from .transforms import Grid, SampledSignal


@dataclass(frozen=True, eq=False)
class GaborSystem:
    """Atoms ``M_{beta0 l} T_{alpha0 j} phi`` with the lattice living on the grid."""

    phi: SampledSignal
    alpha0: float
    beta0: float

    def __post_init__(self):
        g = self.phi.grid
        if g.dim != 1:
            raise ValueError("Gabor systems are implemented for d = 1")
        if not np.any(self.phi.values):
            raise ValueError("Gabor atom must not vanish")
        if self.alpha0 <= 0 or self.beta0 <= 0:
            raise ValueError("lattice steps must be positive")
        a = self.alpha0 / g.h
        b = self.beta0 / g.dxi
        for name, v in (("alpha0/h", a), ("beta0/dxi", b)):
            if abs(v - round(v)) > 1e-9 or round(v) < 1 or g.n % round(v):
                raise ValueError(f"{name} = {v:.6g} must be a positive integer dividing n = {g.n}")
        object.__setattr__(self, "_a", int(round(a)))
        object.__setattr__(self, "_b", int(round(b)))

    @property
    def grid(self) -> Grid:
        return self.phi.grid

    @property
    def steps(self) -> tuple[int, int]:
        """Lattice steps in grid nodes (time, frequency)."""
        return self._a, self._b

    @property
    def shape(self) -> tuple[int, int]:
        n = self.grid.n
        return n // self._a, n // self._b

    @property
    def jrange(self) -> range:
        nj = self.shape[0]
        return range(-(nj // 2), nj - nj // 2)

    @property
    def lrange(self) -> range:
        nl = self.shape[1]
        return range(-(nl // 2), nl - nl // 2)

    @property
    def redundancy(self) -> float:
        return 2 * math.pi / (self.alpha0 * self.beta0)

    @property
    def regime(self) -> str:
        r = self.redundancy
        if abs(r - 1.0) < 1e-9:
            return "critical"
        return "oversampled" if r > 1 else "undersampled"

    def atom(self, j: int, l: int) -> np.ndarray:
        g = self.grid
        shifted = np.roll(self.phi.values, j * self._a)
        return np.exp(1j * self.beta0 * l * g.nodes) * shifted

    def atoms(self) -> np.ndarray:
        """Matrix with one atom per column, ordered ``(j, l)`` row-major."""
        return np.stack([self.atom(j, l) for j in self.jrange for l in self.lrange], axis=1)


def build_gabor_system(phi: SampledSignal, alpha0: float, beta0: float) -> GaborSystem:
    return GaborSystem(phi, alpha0, beta0)


def frame_operator(sys: GaborSystem) -> np.ndarray:
    G = sys.atoms()
    return sys.grid.h * (G @ G.conj().T)


def frame_apply_direct(sys: GaborSystem, f: SampledSignal) -> np.ndarray:
    """``S f = sum <f, phi_jl> phi_jl`` evaluated atom by atom."""
    out = np.zeros(sys.grid.n, dtype=complex)
    for j in sys.jrange:
        for l in sys.lrange:
            at = sys.atom(j, l)
            out += sys.grid.h * np.vdot(at, f.values) * at
    return out


@dataclass
class Tightness:
    frame_constant: float
    defect: float
    hermitian_defect: float


def tightness_defect(sys: GaborSystem) -> Tightness:
    S = frame_operator(sys)
    n = sys.grid.n
    centre = slice(n // 4, 3 * n // 4)
    A = float(np.mean(np.diag(S)[centre].real))
    defect = float(np.linalg.norm(S - A * np.eye(n), 2) / A)
    herm = float(np.linalg.norm(S - S.conj().T) / np.linalg.norm(S))
    return Tightness(A, defect, herm)


@dataclass(eq=False)
class GaborCoefficients:
    """``c[j, l, m, n] = <k, phi_jl (x) phi_mn>`` for a kernel ``k(x, y)``."""

    coeffs: np.ndarray
    system: GaborSystem
    kernel: np.ndarray

    def max_index(self) -> np.ndarray:
        J = np.asarray(self.system.jrange)
        L = np.asarray(self.system.lrange)
        idx = np.meshgrid(np.abs(J), np.abs(L), np.abs(J), np.abs(L), indexing="ij")
        return np.maximum.reduce(idx)

    def tails(self) -> np.ndarray:
        """``t[r] = sum of |c| over entries whose largest |index| is >= r``."""
        mi = self.max_index().ravel()
        mass = np.bincount(mi, weights=np.abs(self.coeffs).ravel())
        return np.cumsum(mass[::-1])[::-1]

    @property
    def l1(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))


def kernel_gabor_coefficients(k: np.ndarray, sys: GaborSystem) -> GaborCoefficients:
    n = sys.grid.n
    k = np.asarray(k)
    if k.shape != (n, n):
        raise ValueError(f"kernel of shape {k.shape} does not fit the {n}-point grid")
    G = sys.atoms()
    C = sys.grid.h**2 * (G.conj().T @ k @ G.conj())
    nj, nl = sys.shape
    return GaborCoefficients(C.reshape(nj, nl, nj, nl), sys, k)


def reconstruct_kernel(coeffs: GaborCoefficients, frame_constant: float) -> np.ndarray:
    G = coeffs.system.atoms()
    N = G.shape[1]
    return G @ coeffs.coeffs.reshape(N, N) @ G.T / frame_constant**2


def tail_ladder(tails: np.ndarray, floor: float = 1e-12) -> list[int]:
    """Radii ``r0, 2 r0, ...`` past the bulk and above the rounding floor.

    ``r0`` is the first power of two with ``t(r0) <= t(0)/2``; the ladder
    stops once ``t(2r)`` would fall under ``floor * t(0)``.
    """
    total = tails[0]
    r = 1
    while r < len(tails) and tails[r] > 0.5 * total:
        r *= 2
    out = []
    while 2 * r < len(tails) and tails[2 * r] > floor * total:
        out.append(r)
        r *= 2
    return out


@dataclass
class NuclearBound:
    bound: float
    trace_norm: float
    frame_constant: float
    defect: float

    @property
    def ratio(self) -> float:
        return self.trace_norm / self.bound if self.bound > 0 else 0.0


def nuclear_bound(coeffs: GaborCoefficients, sys: GaborSystem, op: LocOpMatrix,
                  tightness: Tightness | None = None, rtol: float = 1e-8) -> NuclearBound:
    """``sum |c| ||phi_jl|| ||phi_mn|| / A^2`` against the trace norm of ``op``."""
    if coeffs.system is not sys:
        raise ValueError("coefficients were computed for a different Gabor system")
    k_op = op.kernel()
    scale = max(np.linalg.norm(k_op), np.linalg.norm(coeffs.kernel))
    if scale > 0 and np.linalg.norm(k_op - coeffs.kernel) > rtol * scale:
        raise ValueError("coefficients do not come from this operator's kernel")
    if tightness is None:
        tightness = tightness_defect(sys)
    A = tightness.frame_constant
    G = sys.atoms()
    norms = np.sqrt(sys.grid.h * np.sum(np.abs(G) ** 2, axis=0))
    nj, nl = sys.shape
    norms = norms.reshape(nj, nl)
    weights = norms[:, :, None, None] * norms[None, None, :, :]
    bound = float(np.sum(np.abs(coeffs.coeffs) * weights) / A**2)
    trace = float(np.sum(singular_values(op)))
    return NuclearBound(bound, trace, A, tightness.defect)
